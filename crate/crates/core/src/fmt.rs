//! Locale-independent number formatting shared by the text outputs.

/// Formats a float with 17 significant digits in scientific notation.
pub fn f64_17(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0e0"
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(f64_17(0.5), "5.0000000000000000e-1");
        assert_eq!(f64_17(-0.0), "0.0000000000000000e0");
        let s = f64_17(std::f64::consts::SQRT_2);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::SQRT_2);
    }
}
