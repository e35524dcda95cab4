//! Argument parsers.

use std::f64::consts::PI;

/// Parses a real number, allowing multiples and fractions of π such as
/// `pi/3`, `-2pi/5`, `3*pi` or `π/4`.
pub fn parse_phase(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    let bad = || format!("'{s}' is not a number or a fraction of pi");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad()).and_then(|v| finite(v, s));
    };
    let head = t[..at].trim().trim_end_matches('*').trim();
    let tail = t[at + 2..].trim();
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = if tail.is_empty() {
        1.0
    } else {
        let d = tail.strip_prefix('/').ok_or_else(bad)?;
        d.trim().parse::<f64>().map_err(|_| bad())?
    };
    if divisor == 0.0 {
        return Err(format!("'{s}' divides by zero"));
    }
    finite(factor * PI / divisor, s)
}

fn finite(v: f64, s: &str) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// Comma-separated list of phases or numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_phase).collect()
}
