//! Locale-independent CSV number formatting: 12 significant digits,
//! `.` decimal separator, LF line endings.

pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..=11).contains(&exponent) {
        format!("{x:.11e}")
    } else {
        let decimals = (11 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    }
}
