//! Number formatting shared by every file writer.

/// Significant digits carried by emitted floating-point values.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Text form with [`SIGNIFICANT_DIGITS`] significant digits, used in CSV output.
pub fn sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_string();
    }
    // shortest round-trip representation of the rounded value
    format!("{r}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round_sig(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round_sig(-1.0e-20 / 3.0), -3.33333333333e-21);
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(0.5), "0.5");
    }
}
