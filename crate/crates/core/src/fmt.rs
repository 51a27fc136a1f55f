/// Scientific notation with `digits` significant digits and a lowercase `e`.
pub(crate) fn sci(value: f64, digits: usize) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{:.*e}", digits.saturating_sub(1), v)
}

/// Nine significant digits, the precision used by CSV and report output.
pub(crate) fn sci9(value: f64) -> String {
    sci(value, 9)
}
