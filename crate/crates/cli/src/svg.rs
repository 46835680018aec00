//! Hand-written SVG for tail plots: `log(−log Φ̂(V))` against `V`, where the
//! predicted envelopes are straight lines.

use std::fmt::Write;

use charsum::format::sig;
use charsum::theory::{EnvelopeKind, PredictionEnvelope};
use charsum::TailCurve;

use crate::CliResult;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Series {
    label: String,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

fn envelopes(d: u32) -> Vec<PredictionEnvelope> {
    let lower = if d % 2 == 0 { EnvelopeKind::Lower } else { EnvelopeKind::OddLower };
    [lower, EnvelopeKind::Upper]
        .into_iter()
        .filter_map(|k| PredictionEnvelope::new(d, k).ok())
        .filter(|e| e.constant > 0.0)
        .collect()
}

pub fn tail_plot(curves: &[TailCurve]) -> CliResult<String> {
    let mut series = Vec::new();
    let mut v_max: f64 = 0.0;
    for (i, c) in curves.iter().enumerate() {
        let pts: Vec<(f64, f64)> = c
            .v_grid
            .iter()
            .zip(&c.phi)
            .filter(|(_, &f)| f > 0.0 && f < 1.0)
            .map(|(&v, &f)| (v, (-f.ln()).ln()))
            .collect();
        v_max = v_max.max(c.v_grid.last().copied().unwrap_or(0.0));
        series.push(Series {
            label: format!("d = {}", c.order),
            color: PALETTE[i % PALETTE.len()],
            dashed: false,
            points: pts,
        });
    }
    let (y_lo, y_hi) = data_range(&series);
    let mut orders: Vec<u32> = curves.iter().map(|c| c.order).collect();
    orders.dedup();
    for (i, &d) in orders.iter().enumerate() {
        for env in envelopes(d) {
            series.push(Series {
                label: format!("d = {d} {}", env.kind.name()),
                color: PALETTE[i % PALETTE.len()],
                dashed: true,
                points: vec![(0.0, env.loglog(0.0)), (v_max, env.loglog(v_max))],
            });
        }
    }
    Ok(render(&series, (0.0, v_max.max(1.0)), (y_lo, y_hi), curves.first().map_or(0, |c| c.p)))
}

fn data_range(series: &[Series]) -> (f64, f64) {
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !lo.is_finite() {
        return (-5.0, 5.0);
    }
    let pad = 0.05 * (hi - lo).max(1.0);
    ((lo - pad).floor(), (hi + pad).ceil())
}

fn render(series: &[Series], (x0, x1): (f64, f64), (y0, y1): (f64, f64), p: u64) -> String {
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + (y1 - y.clamp(y0, y1)) / (y1 - y0) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=ticks(x0, x1) {
        let x = x0 + i as f64 * step(x0, x1);
        if x > x1 + 1e-9 {
            break;
        }
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_T + ph,
            MARGIN_T + ph + 5.0,
            MARGIN_T + ph + 18.0,
            sig(x, 3)
        );
    }
    for i in 0..=ticks(y0, y1) {
        let y = y0 + i as f64 * step(y0, y1);
        if y > y1 + 1e-9 {
            break;
        }
        let py = sy(y);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_L}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            py + 4.0,
            sig(y, 3)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">V</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">log(-log Phi(V)), p = {p}</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0
    );
    let _ = writeln!(s, r#"<clipPath id="plot"><rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}"/></clipPath>"#);
    for (i, ser) in series.iter().enumerate() {
        if ser.points.len() >= 2 {
            let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline clip-path="url(#plot)" fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                ser.color,
                pts.join(" ")
            );
        }
        let ly = MARGIN_T + 10.0 + 16.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            ser.color,
            lx + 30.0,
            ly + 4.0,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

/// A 1, 2 or 5 times power-of-ten spacing giving about six ticks.
fn step(a: f64, b: f64) -> f64 {
    let raw = (b - a) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 { 1.0 } else if r < 3.5 { 2.0 } else if r < 7.5 { 5.0 } else { 10.0 }
}

fn ticks(a: f64, b: f64) -> usize {
    ((b - a) / step(a, b)).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps() {
        assert_eq!(step(0.0, 6.0), 1.0);
        assert_eq!(step(0.0, 12.0), 2.0);
        assert_eq!(step(-5.0, 25.0), 5.0);
    }
}
