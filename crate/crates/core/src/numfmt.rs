/// Rounds `x` to 9 significant decimal digits.
///
/// Values that already carry at most 9 significant digits come back
/// unchanged, so writing rounded values and parsing them again is lossless.
pub(crate) fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_short_values() {
        for v in [0.0, 1.0, 0.5, 0.9, 0.123456789, 1e-7, 0.333333333] {
            assert_eq!(round_sig9(v), v);
        }
    }

    #[test]
    fn truncates_long_values() {
        assert_eq!(round_sig9(1.0 / 3.0), 0.333333333);
        assert_eq!(round_sig9(round_sig9(2.0 / 3.0)), round_sig9(2.0 / 3.0));
    }
}
