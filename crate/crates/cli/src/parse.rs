//! Text syntaxes accepted on the command line: complex numbers, z-lines
//! `start:end:count`, exact decimals and μ expressions such as `-3lambda`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

const MAX_INPUT: usize = 256;
const MAX_EXPONENT: i64 = 400;
pub const MAX_LINE_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ParseError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

fn guard(s: &str) -> Result<&str, ParseError> {
    if s.len() > MAX_INPUT {
        return err(format!("input longer than {MAX_INPUT} bytes"));
    }
    let t = s.trim();
    if t.is_empty() {
        return err("empty input");
    }
    Ok(t)
}

fn real(s: &str) -> Result<f64, ParseError> {
    // f64::from_str also takes "inf" and "nan"; only plain decimals are allowed
    if !s
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
    {
        return err(format!("'{s}' is not a real number"));
    }
    let v = f64::from_str(s).map_err(|_| ParseError(format!("'{s}' is not a real number")))?;
    if !v.is_finite() {
        return err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

/// `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64, ParseError> {
    let s = guard(s)?;
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(t),
    };
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZLine {
    pub start: Complex64,
    pub end: Complex64,
    pub count: usize,
}

impl ZLine {
    pub fn points(&self) -> Vec<Complex64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + step * k as f64).collect()
    }
}

impl std::fmt::Display for ZLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = |z: Complex64| {
            let sign = if z.im.is_sign_negative() { "" } else { "+" };
            format!("{:?}{sign}{:?}i", z.re, z.im)
        };
        write!(f, "{}:{}:{}", c(self.start), c(self.end), self.count)
    }
}

/// `start:end:count` with complex endpoints, e.g. `4+0i:8+0i:17`.
pub fn parse_z_line(s: &str) -> Result<ZLine, ParseError> {
    let s = guard(s)?;
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return err(format!("z-line '{s}' must have the form start:end:count"));
    }
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| ParseError(format!("bad point count '{}'", parts[2])))?;
    if count == 0 || count > MAX_LINE_POINTS {
        return err(format!("point count must be in 1..={MAX_LINE_POINTS}"));
    }
    Ok(ZLine {
        start: parse_complex(parts[0])?,
        end: parse_complex(parts[1])?,
        count,
    })
}

/// Exact value of a decimal literal `[-]digits[.digits][e[-]digits]` or a
/// fraction `p/q`.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let s = guard(s)?;
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return err("zero denominator");
        }
        return Ok(p / q);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(k) => {
            let e: i64 = body[k + 1..]
                .parse()
                .map_err(|_| ParseError(format!("bad exponent in '{s}'")))?;
            (&body[..k], e)
        }
        None => (body, 0),
    };
    if exp.abs() > MAX_EXPONENT {
        return err(format!("exponent out of range in '{s}'"));
    }
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return err(format!("'{s}' has no digits"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return err(format!("'{s}' is not a decimal number"));
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(&digits).map_err(|_| ParseError(format!("'{s}' is not a decimal number")))?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let mut v = if scale >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

/// A μ value: a rational, or a rational multiple of λ written `c lambda`,
/// `c*lambda`, `lambda`, `-lambda` (`λ` is accepted for `lambda`).
pub fn parse_mu(s: &str, lambda: &BigRational) -> Result<BigRational, ParseError> {
    let s = guard(s)?;
    let stripped = s
        .strip_suffix("lambda")
        .or_else(|| s.strip_suffix('λ'));
    let Some(coef) = stripped else {
        return parse_rational(s);
    };
    let coef = coef.trim_end();
    let coef = coef.strip_suffix('*').unwrap_or(coef).trim();
    let c = match coef {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        _ => parse_rational(coef)?,
    };
    Ok(c * lambda)
}

/// Comma-separated list of μ expressions.
pub fn parse_mu_list(s: &str, lambda: &BigRational) -> Result<Vec<BigRational>, ParseError> {
    if s.len() > 16 * MAX_INPUT {
        return err("μ list too long");
    }
    s.split(',').map(|t| parse_mu(t, lambda)).collect()
}

/// Nearest f64 of an exact rational.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}
