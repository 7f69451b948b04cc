//! Number formatting and CSV output.

use std::fmt::Write as _;

use crate::config::Observable;
use crate::engine::{Row, SweepResult};

/// `%.9g`-style formatting: 9 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-5, 1e9)`, `inf`/`-inf`/`nan` spelled out.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn value(row: &Row, o: Observable) -> f64 {
    match o {
        Observable::QfiTheta => row.qfi_theta,
        Observable::QfiPhi => row.qfi_phi,
        Observable::SigmaMin => row.sigma_min,
        Observable::Coherence => row.coherence,
        Observable::Hss => row.hss,
        Observable::Chi => row.chi,
    }
}

/// CSV with header `t,<observables…>`, `\n` line endings.
pub fn csv(result: &SweepResult, observables: &[Observable]) -> String {
    let mut out = String::from("t");
    for o in observables {
        out.push(',');
        out.push_str(o.name());
    }
    out.push('\n');
    for row in &result.rows {
        out.push_str(&format_g9(row.t));
        for &o in observables {
            let _ = write!(out, ",{}", format_g9(value(row, o)));
        }
        out.push('\n');
    }
    out
}

pub fn column(result: &SweepResult, o: Observable) -> Vec<f64> {
    result.rows.iter().map(|r| value(r, o)).collect()
}
