//! printf-compatible number formatting for the CSV artifacts.
//!
//! Rust's `{:e}` omits the exponent sign and padding that C emits, and there is
//! no `%g`, so the two conversions used by the output files live here.

/// C `%.{precision}e`, e.g. `1.500000000000e-01`.
pub fn sci(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return non_finite(x);
    }
    let s = format!("{:.*e}", precision, x);
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// C `%.{precision}g`.
pub fn general(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return non_finite(x);
    }
    let p = precision.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // Exponent after rounding to p significant digits.
    let probe = format!("{:.*e}", p - 1, x);
    let exp: i32 = probe.split_once('e').unwrap().1.parse().unwrap();
    if exp < -4 || exp >= p as i32 {
        let s = sci(x, p - 1);
        let (mantissa, exp) = s.split_once('e').unwrap();
        format!("{}e{}", strip_zeros(mantissa), exp)
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn non_finite(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_matches_printf() {
        assert_eq!(sci(0.15, 12), "1.500000000000e-01");
        assert_eq!(sci(-1234.56, 3), "-1.235e+03");
        assert_eq!(sci(0.0, 2), "0.00e+00");
        assert_eq!(sci(1e-300, 1), "1.0e-300");
    }

    #[test]
    fn general_matches_printf() {
        assert_eq!(general(0.01, 10), "0.01");
        assert_eq!(general(1.23456789012345, 10), "1.23456789");
        assert_eq!(general(1000.0, 10), "1000");
        assert_eq!(general(50.0, 10), "50");
        assert_eq!(general(1e-5, 10), "1e-05");
        assert_eq!(general(123456789012.0, 10), "1.23456789e+11");
        assert_eq!(general(0.0001, 10), "0.0001");
        assert_eq!(general(f64::NAN, 10), "nan");
    }
}
