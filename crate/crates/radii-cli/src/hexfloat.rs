//! C99-style hexadecimal floating-point literals (`%a`), which round-trip an
//! `f64` bit for bit.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed hex float {0:?}")]
pub struct HexFloatError(pub String);

/// Formats `x` as `[-]0x1.<hex>p<exp>`, or `0x0.<hex>p-1022` for subnormals.
pub fn format(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (lead, exp) = match (exp_bits, frac) {
        (0, 0) => return format!("{sign}0x0p+0"),
        (0, _) => (0, -1022),
        _ => (1, exp_bits - 1023),
    };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let dot = if digits.is_empty() { "" } else { "." };
    format!("{sign}0x{lead}{dot}{digits}p{exp:+}")
}

/// Parses what [`format`] writes, and any other exactly representable
/// literal with at most 53 significant bits.
pub fn parse(s: &str) -> Result<f64, HexFloatError> {
    let err = || HexFloatError(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let signed = |v: f64| if neg { -v } else { v };
    match body {
        "inf" => return Ok(signed(f64::INFINITY)),
        "nan" => return Ok(f64::NAN),
        _ => {}
    }
    let body = body
        .strip_prefix("0x")
        .or_else(|| body.strip_prefix("0X"))
        .ok_or_else(err)?;
    let (mant, exp) = body.split_once(['p', 'P']).ok_or_else(err)?;
    let exp: i32 = exp.parse().map_err(|_| err())?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let mut value: u64 = 0;
    let mut shift = 0i32;
    for (i, ch) in int_part.chars().chain(frac_part.chars()).enumerate() {
        let d = ch.to_digit(16).ok_or_else(err)? as u64;
        if value >> 56 != 0 {
            return Err(err());
        }
        value = (value << 4) | d;
        if i >= int_part.len() {
            shift += 4;
        }
    }
    if value >> 53 != 0 {
        return Err(err());
    }
    let mut out = value as f64;
    let mut e = exp - shift;
    // Scale in steps so intermediate results stay normal until the end.
    while e > 0 {
        let k = e.min(1000);
        out *= 2f64.powi(k);
        e -= k;
    }
    while e < 0 {
        let k = (-e).min(1000);
        out *= 2f64.powi(-k);
        e += k;
    }
    if value != 0 && (out == 0.0 || out.is_infinite()) {
        return Err(err());
    }
    Ok(signed(out))
}
