/// Scientific notation with 12 significant digits; `nan` for missing values.
pub fn sci(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sci(0.5), "5.00000000000e-1");
        assert_eq!(sci(-1234.5), "-1.23450000000e3");
        assert_eq!(sci(f64::NAN), "nan");
    }
}
