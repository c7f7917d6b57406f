//! Deterministic numeric formatting for CSV output.

/// Format with `precision` digits after the decimal point; values with
/// magnitude below 1e-4 (nonzero) or at/above 1e15 switch to scientific
/// notation with the same precision. Negative zero is normalized so
/// identical values never format differently.
pub fn format_num(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let mag = x.abs();
    if mag != 0.0 && (mag < 1e-4 || mag >= 1e15) {
        format!("{:.*e}", precision, x)
    } else {
        format!("{:.*}", precision, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_keeps_trailing_zeros() {
        assert_eq!(format_num(2.0, 9), "2.000000000");
        assert_eq!(format_num(0.5, 3), "0.500");
        assert_eq!(format_num(-1.25, 4), "-1.2500");
    }

    #[test]
    fn small_values_go_scientific() {
        assert_eq!(format_num(1e-8, 9), "1.000000000e-8");
        assert_eq!(format_num(0.0, 9), "0.000000000");
        // negative zero normalized
        assert_eq!(format_num(-0.0, 3), "0.000");
    }

    #[test]
    fn non_finite_values_have_stable_text() {
        assert_eq!(format_num(f64::NAN, 9), "nan");
        assert_eq!(format_num(f64::INFINITY, 9), "inf");
    }
}
