//! Exact parsing of angle and axis tokens.
//!
//! Rational multiples of π are parsed symbolically ("pi/8", "3pi/4", "-2pi")
//! so config values land on the same floating-point numbers the library
//! computes internally, with no decimal-entry drift.

use std::f64::consts::PI;

pub fn parse_angle(token: &str) -> Result<f64, String> {
    let raw = token.trim();
    if raw.is_empty() {
        return Err("empty angle".into());
    }
    let (sign, body) = match raw.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => match raw.strip_prefix('+') {
            Some(rest) => (1.0, rest),
            None => (1.0, raw),
        },
    };
    let body = body.trim();
    if let Some(idx) = body.find("pi") {
        let (num_str, rest) = body.split_at(idx);
        let rest = &rest[2..];
        let numerator = match num_str.trim_end_matches('*').trim() {
            "" => 1.0,
            s => s
                .parse::<f64>()
                .map_err(|_| format!("bad numerator in angle '{raw}'"))?,
        };
        let denominator = match rest.trim() {
            "" => 1.0,
            s => {
                let s = s
                    .strip_prefix('/')
                    .ok_or_else(|| format!("expected '/denominator' after pi in '{raw}'"))?;
                let d = s
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad denominator in angle '{raw}'"))?;
                if d == 0.0 {
                    return Err(format!("zero denominator in angle '{raw}'"));
                }
                d
            }
        };
        Ok(sign * numerator * PI / denominator)
    } else {
        body.parse::<f64>()
            .map(|v| sign * v)
            .map_err(|_| format!("bad angle '{raw}'"))
    }
}

pub fn parse_axis(token: &str) -> Result<[f64; 3], String> {
    let raw = token.trim();
    let named = match raw {
        "x" | "+x" => Some([1.0, 0.0, 0.0]),
        "-x" => Some([-1.0, 0.0, 0.0]),
        "y" | "+y" => Some([0.0, 1.0, 0.0]),
        "-y" => Some([0.0, -1.0, 0.0]),
        "z" | "+z" => Some([0.0, 0.0, 1.0]),
        "-z" => Some([0.0, 0.0, -1.0]),
        _ => None,
    };
    if let Some(axis) = named {
        return Ok(axis);
    }
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "axis '{raw}' must be x|y|z (optionally signed) or three comma-separated components"
        ));
    }
    let mut v = [0.0f64; 3];
    for (slot, part) in v.iter_mut().zip(parts.iter()) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("bad axis component '{part}'"))?;
    }
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm < 1e-9 {
        return Err(format!("axis '{raw}' has near-zero norm"));
    }
    Ok([v[0] / norm, v[1] / norm, v[2] / norm])
}

/// "axis:angle", e.g. "z:pi/8" or "1,1,1:pi/4".
pub fn parse_target(token: &str) -> Result<([f64; 3], f64), String> {
    let idx = token
        .rfind(':')
        .ok_or_else(|| format!("target '{token}' must be axis:angle, e.g. z:pi/8"))?;
    let axis = parse_axis(&token[..idx])?;
    let angle = parse_angle(&token[idx + 1..])?;
    Ok((axis, angle))
}
