//! Rounding for reproducible text output.

/// Digits used for floats in JSON output.
pub const JSON_DIGITS: usize = 12;
/// Digits used for floats in CSV output.
pub const CSV_DIGITS: usize = 9;

/// Rounds to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_significant(0.926_776_695_296_636_9, 12), 0.926_776_695_297);
        assert_eq!(round_significant(0.926_776_695_296_636_9, 9), 0.926_776_695);
        assert_eq!(round_significant(1.0, 9), 1.0);
        assert_eq!(round_significant(0.0, 9), 0.0);
        assert_eq!(format!("{}", round_significant(2.0 / 3.0, 9)), "0.666666667");
    }
}
