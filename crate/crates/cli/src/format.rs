//! Text formatting for the CSV outputs.

/// C-style `%.{precision}e`: mantissa with a fixed number of decimals and a
/// signed exponent of at least two digits, e.g. `1.500000000000e-03`.
pub fn sci(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.precision$e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// `%.12e`.
pub fn sci12(x: f64) -> String {
    sci(x, 12)
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}
