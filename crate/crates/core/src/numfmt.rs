/// Significant digits written to data tables.
pub const TABLE_SIG_DIGITS: i32 = 12;

/// Formats `x` in plain decimal notation with [`TABLE_SIG_DIGITS`]
/// significant digits.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.*}", (TABLE_SIG_DIGITS - 1) as usize, 0.0);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (TABLE_SIG_DIGITS - 1 - exp).clamp(0, 340) as usize;
    format!("{x:.decimals$}")
}

/// Formats an optional value, leaving the field empty when absent.
pub fn sig_opt(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}
