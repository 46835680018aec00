//! Invariant suite behind `charsum verify`.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use charsum::randmodel::{
    exact_log_laplace, exact_moments, moment_compare_with, second_moment_abs, theoretical_laplace,
    ArithmeticModel,
};
use charsum::spectrum::{
    arc_max_spectrum, exceptional_set, g_aux, midpoint_g, midpoint_spectrum, midpoint_transform, tail_curve,
    GMode,
};
use charsum::theory::{constants, limit_constant, EnvelopeKind, PredictionEnvelope};
use charsum::{DirichletCharacter, RandomModel, RandomModelConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{Level, VerifyArgs};
use crate::commands::Rendered;
use crate::{CliResult, Failure};

pub const DEFAULT_FIXTURE: &str = include_str!("../fixtures/constants.json");

/// Top-level keys other than these (such as a `note`) are ignored.
#[derive(Debug, Deserialize)]
pub struct Fixture {
    pub tolerance: f64,
    pub records: Vec<FixtureRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRecord {
    pub d: u32,
    pub values: BTreeMap<String, f64>,
}

impl Fixture {
    pub fn parse(text: &str) -> Result<Self, String> {
        let f: Fixture = serde_json::from_str(text).map_err(|e| format!("malformed fixture: {e}"))?;
        if !(f.tolerance > 0.0 && f.tolerance.is_finite()) {
            return Err("fixture tolerance must be positive".into());
        }
        let known = serde_json::to_value(constants(2)).expect("constants serialize");
        for r in &f.records {
            if r.d < 2 {
                return Err(format!("fixture order {} is below 2", r.d));
            }
            for key in r.values.keys() {
                if !known.get(key).is_some_and(|v| v.is_f64()) {
                    return Err(format!("fixture field '{key}' is not a numeric constant"));
                }
            }
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub property: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckReport>,
}

struct Scale {
    p: u64,
    p_large: u64,
    samples: usize,
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn chi(p: u64, d: u32) -> DirichletCharacter {
    DirichletCharacter::from_prime(p, d as u64, 1).expect("verify uses admissible orders")
}

fn check_fixture(f: &Fixture) -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for r in &f.records {
        let c = serde_json::to_value(constants(r.d)).expect("constants serialize");
        for (key, &want) in &r.values {
            let got = c[key.as_str()].as_f64().unwrap_or(f64::NAN);
            let err = (got - want).abs();
            worst = worst.max(err);
            if !(err <= f.tolerance) {
                bad.push(format!("d={} {key}: computed {got:.12} vs fixture {want:.12}", r.d));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{} records, max |diff| = {worst:.1e} (tol {:.0e})", f.records.len(), f.tolerance))
    } else {
        Err(bad.join("; "))
    }
}

fn check_gauss(s: &Scale) -> Outcome {
    let mut worst = 0.0f64;
    for d in [2u32, 3, 4, 6, 8] {
        let c = chi(s.p, d);
        worst = worst.max((c.gauss_sum().norm() - (s.p as f64).sqrt()).abs() / (s.p as f64).sqrt());
    }
    ensure(worst <= 1e-9, format!("max relative deviation {worst:.1e} (tol 1e-9)"))
}

fn check_interpolation(s: &Scale) -> Outcome {
    let c = chi(s.p, 4);
    let tau = c.gauss_sum();
    let sqrt_p = (s.p as f64).sqrt();
    let mut worst = 0.0f64;
    for k in [1u64, 2, 17, s.p / 3, s.p - 1] {
        let f = c.eval_f_direct(k as f64 / s.p as f64, 0);
        worst = worst.max((f - c.conj_value_at(k as i64) * tau).norm() / sqrt_p);
    }
    ensure(worst <= 1e-9, format!("max |f(e_p(k)) - conj(chi(k)) tau| / sqrt p = {worst:.1e} (tol 1e-9)"))
}

fn check_fast_transform(s: &Scale) -> Outcome {
    let mut worst = 0.0f64;
    for d in [2u32, 3] {
        let c = chi(s.p, d);
        let fast = midpoint_transform(&c, 5);
        let sqrt_p = (s.p as f64).sqrt();
        for k in [0u64, 1, 999, s.p / 2, s.p - 1] {
            let direct = c.eval_f_direct((k as f64 + 0.5) / s.p as f64, 5);
            worst = worst.max((fast[k as usize] - direct).norm() / sqrt_p);
        }
    }
    ensure(worst <= 1e-8, format!("max |fast - direct| / sqrt p = {worst:.1e} (tol 1e-8)"))
}

fn check_parseval(s: &Scale) -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for p in [s.p, s.p_large] {
        let spec = midpoint_spectrum(&chi(p, 2), 0);
        let want = (p - 1) as f64 / p as f64;
        let err = (spec.mean_square() - want).abs();
        ok &= err <= 1e-9;
        details.push(format!("p={p}: {err:.1e}"));
    }
    ensure(ok, format!("|mean square - (p-1)/p|: {} (tol 1e-9)", details.join(", ")))
}

fn check_g_identity(s: &Scale) -> Outcome {
    let c = chi(s.p, 3);
    let g = midpoint_g(&c, 0);
    let mut worst = 0.0f64;
    for k in [0i64, 3, 500, (s.p - 2) as i64] {
        let exact = g_aux(&c, k, 0.5, 0, GMode::Exact).map_err(|e| e.to_string())?.value;
        worst = worst.max((exact - g[k as usize]).norm());
    }
    let t = g_aux(&c, 7, 0.5, 0, GMode::Truncated { window: (s.p - 1) / 2 }).map_err(|e| e.to_string())?;
    let full_gap = (t.value - g[7]).norm();
    ensure(
        worst <= 1e-9 && full_gap <= 1e-9,
        format!("closed form vs fast {worst:.1e}, full interpolation sum vs fast {full_gap:.1e} (tol 1e-9)"),
    )
}

fn check_arc_max(_: &Scale) -> Outcome {
    let p = 1009;
    let c = chi(p, 4);
    let arc = arc_max_spectrum(&c, 0, 16, 1e-6).map_err(|e| e.to_string())?;
    let mid = midpoint_spectrum(&c, 0);
    let sqrt_p = (p as f64).sqrt();
    let below_mid = arc.values.iter().zip(&mid.values).filter(|(a, m)| **a < **m - 1e-12).count();
    let mut worst_gap = 0.0f64;
    for k in [0i64, 10, 500, 1008] {
        let fine = (0..=400).map(|i| c.eval_f_arc(k, i as f64 / 400.0, 0).norm() / sqrt_p).fold(0.0, f64::max);
        worst_gap = worst_gap.max(fine - arc.values[k as usize]);
    }
    ensure(
        below_mid == 0 && worst_gap <= 1e-9,
        format!("{below_mid} arcs below midpoint; dense-grid excess {worst_gap:.1e} (tol 1e-9)"),
    )
}

fn check_tail_counts(_: &Scale) -> Outcome {
    let spec = midpoint_spectrum(&chi(101, 2), 0);
    let grid: Vec<f64> = (0..=300).map(|i| i as f64 * 0.01).collect();
    let curve = tail_curve(&spec, &grid).map_err(|e| e.to_string())?;
    let integral = curve.phi.iter().all(|&f| {
        let n = f * 101.0;
        (n - n.round()).abs() < 1e-9
    });
    let monotone = curve.phi.windows(2).all(|w| w[1] <= w[0]);
    ensure(
        integral && monotone && curve.phi[0] == 1.0,
        format!("p=101: phi(0) = {}, integral counts {integral}, non-increasing {monotone}", curve.phi[0]),
    )
}

fn check_exceptional(s: &Scale) -> Outcome {
    let r = exceptional_set(&chi(s.p, 2), false);
    let bound = (s.p as f64).powf(0.75);
    ensure(
        (r.count as f64) <= bound,
        format!("|E_p| = {} at threshold {:.4} (bound p^(3/4) = {bound:.0})", r.count, r.threshold),
    )
}

fn check_mc_mean(s: &Scale) -> Outcome {
    let mut worst = 0.0f64;
    for d in [2u32, 3, 4] {
        let cfg = RandomModelConfig::new(s.p, d, s.samples, 17).map_err(|e| e.to_string())?;
        let smp = RandomModel::new(cfg).samples();
        for e in [smp.mean_re(), smp.mean_im()] {
            worst = worst.max(e.value.abs() / e.std_error);
        }
    }
    ensure(worst <= 4.0, format!("max |mean| / se = {worst:.2} (tol 4), N = {}", s.samples))
}

fn check_mc_second_moment(s: &Scale) -> Outcome {
    let cfg = RandomModelConfig::new(s.p, 3, s.samples, 23).map_err(|e| e.to_string())?;
    let est = RandomModel::new(cfg.clone()).samples().mean_abs2();
    let exact = second_moment_abs(&cfg);
    let z = (est.value - exact).abs() / est.std_error;
    ensure(z <= 4.0, format!("E|G|^2 = {:.6} vs {exact:.6}, {z:.2} se (tol 4)", est.value))
}

fn check_mc_laplace(s: &Scale) -> Outcome {
    let cfg = RandomModelConfig::new(s.p, 2, s.samples, 29).map_err(|e| e.to_string())?;
    let est = RandomModel::new(cfg.clone()).samples().laplace(1.0).map_err(|e| e.to_string())?;
    let exact = exact_log_laplace(&cfg, 1.0).exp();
    let z = (est.value - exact).abs() / est.std_error;
    ensure(z <= 4.0, format!("empirical {:.5} vs exact product {exact:.5}, {z:.2} se (tol 4)", est.value))
}

fn check_thread_invariance(s: &Scale) -> Outcome {
    let cfg = RandomModelConfig::new(s.p, 3, 20_000, 31).map_err(|e| e.to_string())?;
    let mut bits = Vec::new();
    for t in [1usize, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| e.to_string())?;
        let e = pool.install(|| RandomModel::new(cfg.clone()).samples().laplace(0.7)).map_err(|e| e.to_string())?;
        bits.push((e.value.to_bits(), e.std_error.to_bits()));
    }
    ensure(bits.windows(2).all(|w| w[0] == w[1]), "1, 3 and 8 threads give bitwise equal estimates".into())
}

fn check_split_product(s: &Scale) -> Outcome {
    let mut worst = 0.0f64;
    for d in [2u32, 3, 4] {
        let cfg = RandomModelConfig::new(s.p, d, 1, 0).map_err(|e| e.to_string())?;
        for t in [0.5, 2.0, 5.0] {
            let gap = (theoretical_laplace(s.p, d, t).log_value - exact_log_laplace(&cfg, t)).abs() / t;
            worst = worst.max(gap);
        }
    }
    ensure(worst <= 1e-2, format!("max |split - exact| / s in log scale = {worst:.1e} (tol 1e-2)"))
}

fn check_moments(s: &Scale) -> Outcome {
    let c = chi(s.p, 2);
    let model = ArithmeticModel::new(&c);
    let cfg = RandomModelConfig::new(s.p, 2, 1, 0).map_err(|e| e.to_string())?;
    let exact = exact_moments(&cfg, 6);
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let m = moment_compare_with(&model, &exact, n);
        worst = worst.max(m.gap / m.envelope);
    }
    ensure(worst <= 1.0, format!("max gap / envelope over n = 1..6: {worst:.3} (need <= 1)"))
}

fn check_laplace_consistency(s: &Scale) -> Outcome {
    let c = chi(s.p, 2);
    let a = ArithmeticModel::new(&c).laplace(2.0).value;
    let t = theoretical_laplace(s.p, 2, 2.0).value;
    ensure((a - t).abs() <= 0.05, format!("s=2: arithmetic {a:.5}, split product {t:.5} (tol 0.05)"))
}

fn check_constant_order(_: &Scale) -> Outcome {
    let c: Vec<f64> = (1..=8).map(|k| constants(2 * k).c_d).collect();
    let lim = limit_constant().value;
    let decreasing = c.windows(2).all(|w| w[1] < w[0]);
    let above = c.iter().all(|&x| x > lim);
    ensure(decreasing && above, format!("C_2..C_16 decreasing {decreasing}, all above limit {lim:.6}: {above}"))
}

fn check_envelope_order(_: &Scale) -> Outcome {
    let mut bad = Vec::new();
    for d in [2u32, 4, 6] {
        let lo = PredictionEnvelope::new(d, EnvelopeKind::Lower).map_err(|e| e.to_string())?;
        let hi = PredictionEnvelope::new(d, EnvelopeKind::Upper).map_err(|e| e.to_string())?;
        for i in 0..=30 {
            let v = 0.1 * i as f64;
            if lo.eval(v) > hi.eval(v) {
                bad.push(format!("d={d} V={v:.1}"));
            }
        }
    }
    ensure(bad.is_empty(), if bad.is_empty() { "lower <= upper on V in [0, 3] for d = 2, 4, 6".into() } else { bad.join(", ") })
}

type Check = (&'static str, &'static str, fn(&Scale) -> Outcome);

const CHECKS: [Check; 17] = [
    ("gauss-sum-modulus", "primitive characters have |tau| = sqrt p", check_gauss),
    ("interpolation-identity", "f evaluated at p-th roots of unity equals conj(chi(k)) tau", check_interpolation),
    ("fast-transform", "chirp-z midpoint transform agrees with direct summation", check_fast_transform),
    ("parseval", "midpoint spectrum has mean square (p-1)/p", check_parseval),
    ("auxiliary-g", "midpoint g from the transform matches the closed form and the interpolation sum", check_g_identity),
    ("arc-maximum", "arc maxima dominate midpoints and dense sampling", check_arc_max),
    ("tail-counting", "empirical tail is an exact non-increasing count", check_tail_counts),
    ("exceptional-set", "large values of |g| at midpoints are rare", check_exceptional),
    ("random-model-mean", "the random sum has mean zero", check_mc_mean),
    ("random-model-second-moment", "E|G|^2 equals the coefficient energy", check_mc_second_moment),
    ("random-model-laplace", "Monte Carlo Laplace transform matches the exact product", check_mc_laplace),
    ("thread-invariance", "Monte Carlo output does not depend on thread count", check_thread_invariance),
    ("split-product", "near/far split product tracks the exact product", check_split_product),
    ("moment-comparison", "arithmetic moments of Re g match the random model", check_moments),
    ("laplace-consistency", "arithmetic and probabilistic Laplace transforms agree at moderate s", check_laplace_consistency),
    ("constant-ordering", "even-order constants decrease toward their limit", check_constant_order),
    ("envelope-ordering", "lower envelope lies below the upper envelope", check_envelope_order),
];

fn timed(name: &'static str, property: &'static str, f: impl FnOnce() -> Outcome) -> CheckReport {
    let start = Instant::now();
    let outcome = f();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckReport { name, property, passed, detail, seconds }
}

pub fn run_checks(level: Level, fixture: &Fixture) -> VerifyReport {
    let scale = match level {
        Level::Quick => Scale { p: 10_009, p_large: 10_009, samples: 100_000 },
        Level::Full => Scale { p: 10_009, p_large: 200_003, samples: 1_000_000 },
    };
    let mut checks = vec![timed("constants-fixture", "quadrature constants reproduce the recorded values", || {
        check_fixture(fixture)
    })];
    for (name, property, f) in &CHECKS {
        checks.push(timed(name, property, || f(&scale)));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    VerifyReport {
        level: match level {
            Level::Quick => "quick",
            Level::Full => "full",
        },
        passed: checks.len() - failed,
        failed,
        checks,
    }
}

pub fn render_text(r: &VerifyReport) -> String {
    let mut s = String::new();
    let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &r.checks {
        let _ = writeln!(
            s,
            "{} {:<width$} {:>8.3}s  {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.seconds,
            c.property,
            c.detail
        );
    }
    let _ = writeln!(s, "verify {}: {} passed, {} failed", r.level, r.passed, r.failed);
    s
}

fn load_fixture(path: Option<&Path>) -> CliResult<Fixture> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => DEFAULT_FIXTURE.to_string(),
    };
    Fixture::parse(&text).map_err(Failure::Usage)
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<Rendered> {
    let fixture = load_fixture(a.fixture.as_deref())?;
    let report = run_checks(a.level, &fixture);
    let text = render_text(&report);
    // The text report always goes to stdout; `--out` adds a JSON copy.
    print!("{text}");
    let body = match &a.out {
        Some(_) => {
            let mut b = serde_json::to_vec_pretty(&report)?;
            b.push(b'\n');
            b
        }
        None => Vec::new(),
    };
    let failure = (report.failed > 0).then(|| {
        let names: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        names.join(", ")
    });
    Ok(Rendered {
        command: "verify",
        parameters: json!({
            "level": report.level,
            "fixture": a.fixture.as_ref().map(|p| p.display().to_string()),
        }),
        body,
        out: a.out.clone(),
        extra: Vec::new(),
        failure,
    })
}
