//! Locale-independent number formatting and the CSV layouts shared by the
//! command line tool and the bindings.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::spectrum::{Spectrum, TailCurve};

/// Formats like C's `%.9g`: nine significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-4, 1e9)`.
pub fn sig9(x: f64) -> String {
    sig(x, 9)
}

pub fn sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Let the scientific formatter do the rounding, then read back the exponent.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const TAIL_HEADER: &str = "V,phi,order,p,kind,shift";
pub const SPECTRUM_HEADER: &str = "K,value,order,p,kind,shift";

/// Appends the rows of one tail curve (no header).
pub fn tail_rows(curve: &TailCurve, out: &mut String) {
    let kind = curve.kind.name();
    for (v, phi) in curve.v_grid.iter().zip(&curve.phi) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sig9(*v),
            sig9(*phi),
            curve.order,
            curve.p,
            kind,
            curve.shift
        );
    }
}

/// Writes a complete tail CSV for any number of curves.
pub fn write_tail_csv<W: Write>(mut w: W, curves: &[TailCurve]) -> io::Result<()> {
    let mut s = String::new();
    s.push_str(TAIL_HEADER);
    s.push('\n');
    for c in curves {
        tail_rows(c, &mut s);
    }
    w.write_all(s.as_bytes())
}

pub fn write_spectrum_csv<W: Write>(mut w: W, spec: &Spectrum) -> io::Result<()> {
    let mut s = String::with_capacity(spec.values.len() * 32);
    s.push_str(SPECTRUM_HEADER);
    s.push('\n');
    let kind = spec.kind.name();
    for (k, v) in spec.values.iter().enumerate() {
        let _ = writeln!(s, "{k},{},{},{},{},{}", sig9(*v), spec.order, spec.p, kind, spec.shift);
    }
    w.write_all(s.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.1"),
            (-2.5, "-2.5"),
            (std::f64::consts::PI, "3.14159265"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (0.999999999951, "1"),
            (99.99999999, "100"),
            (0.324919696232906, "0.324919696"),
        ];
        for (x, expected) in cases {
            assert_eq!(sig9(x), expected, "x = {x:e}");
        }
    }

    #[test]
    fn special_values() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(f64::NAN), "nan");
        assert_eq!(sig9(f64::NEG_INFINITY), "-inf");
    }
}
