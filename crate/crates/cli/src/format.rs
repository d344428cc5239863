//! Fixed float formatting shared by CSV and JSON output.

use serde_json::Value;

pub const SIG_DIGITS: usize = 12;

/// 12 significant digits; scientific notation for magnitudes below 1e-4.
/// Trailing zeros are dropped so equal values always print identically.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x.abs() < 1e-4 {
        let s = format!("{:.*e}", SIG_DIGITS - 1, x);
        let (mantissa, exp) = s
            .split_once('e')
            .expect("scientific format has an exponent");
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (SIG_DIGITS as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    trim_zeros(&s)
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Rounds every non-integer number in a JSON tree to the same precision as
/// [`fmt_float`].
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let rounded: f64 = fmt_float(x).parse().unwrap_or(x);
            if let Some(num) = serde_json::Number::from_f64(rounded) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_scientific() {
        assert_eq!(fmt_float(0.25), "0.25");
        assert_eq!(fmt_float(0.125), "0.125");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_float(4.18733e-6), "4.18733e-6");
        assert_eq!(fmt_float(-1.0 / 3.0 * 1e-7), "-3.33333333333e-8");
        assert_eq!(fmt_float(1e-4), "0.0001");
        assert_eq!(fmt_float(123456.789), "123456.789");
        assert_eq!(fmt_float(0.0), "0");
    }

    #[test]
    fn parses_back_to_the_rounded_value() {
        for x in [0.1, 1.0 / 7.0, 3.1e-9, 2.143347050754e-5, 5.118] {
            let s = fmt_float(x);
            let y: f64 = s.parse().unwrap();
            assert_eq!(fmt_float(y), s);
            assert!((x - y).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let mut v = serde_json::json!({"d": 4, "p": [0.1234567890123456, 1e-7]});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"d":4,"p":[0.123456789012,1e-7]}"#);
    }
}
