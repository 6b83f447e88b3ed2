//! Number formatting for text output.

/// `x` rounded to `digits` significant digits, without exponent notation
/// for magnitudes in `[1e-4, 1e9)`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&magnitude) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new digit (999.9996 -> 1000.000)
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded.abs() >= 10f64.powi(magnitude + 1) && decimals > 0 {
        return format!("{:.*}", decimals - 1, x);
    }
    s
}

/// Six significant digits, the text-mode default.
pub fn sig6(x: f64) -> String {
    sig(x, 6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(sig6(655.2887671), "655.289");
        assert_eq!(sig6(100.0), "100.000");
        assert_eq!(sig6(-0.0315177), "-0.0315177");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1592.795294), "1592.80");
        assert_eq!(sig6(999.99996), "1000.00");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(2.5e12), "2.50000e12");
    }
}
