//! Complex flag values: `a+bi`, `a-bi`, `a`, `bi`, with optional signs and
//! decimal exponents.

use num_complex::Complex64;

pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse {text:?} as a complex number (expected e.g. \"0.5+2i\")");
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return real(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // the split is the last sign that does not start an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k]).ok_or_else(bad)?, imag(&body[k..]).ok_or_else(bad)?),
        None => (0.0, imag(body).ok_or_else(bad)?),
    };
    Ok(Complex64::new(re, im))
}

fn real(s: &str) -> Option<f64> {
    if s.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => real(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("2+0i").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("0+2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(parse_complex("-1.5e-3-2.5E+2i").unwrap(), c(-1.5e-3, -250.0));
        assert_eq!(parse_complex("1e3+1e-3i").unwrap(), c(1000.0, 1e-3));
        assert_eq!(parse_complex(" 0.5 + 14.1i ").unwrap(), c(0.5, 14.1));
        assert_eq!(parse_complex("+3").unwrap(), c(3.0, 0.0));
    }

    #[test]
    fn rejected_forms() {
        for s in ["", "i2", "2+", "abc", "1+2", "nan", "inf", "1+2ii", "1++2i", "1e+i"] {
            assert!(parse_complex(s).is_err(), "{s:?}");
        }
    }
}
