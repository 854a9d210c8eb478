//! Decimal rendering of output values.

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Shortest decimal with at most 12 significant digits.
///
/// Plain notation is used for decimal exponents in `-5..12`, scientific
/// notation otherwise. Non-finite values print as `inf`, `-inf` and `nan`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if x < 0.0 { "-" } else { "" };
    let all: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = all.trim_end_matches('0');

    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

/// The value that [`format_number`] prints, as a float.
pub fn round_significant(x: f64) -> f64 {
    format_number(x).parse().expect("formatted number parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_scientific() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(120.0), "120");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(1.5e-5), "0.000015");
        assert_eq!(format_number(1.5e-6), "1.5e-6");
        assert_eq!(format_number(123456789012.0), "123456789012");
        assert_eq!(format_number(1234567890123.0), "1.23456789012e12");
        assert_eq!(format_number(9.9999999999999), "10");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [std::f64::consts::E, 1e-300, 6.02214076e23, -0.000123456789012345] {
            let r = round_significant(x);
            assert_eq!(round_significant(r), r);
            assert_eq!(format_number(r), format_number(x));
            assert!((r - x).abs() <= 1e-11 * x.abs());
        }
    }
}
