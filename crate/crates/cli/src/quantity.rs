//! Number-with-unit parsing for command-line values.

use anyhow::{anyhow, bail, Result};

fn split(text: &str) -> Result<(f64, String)> {
    let t = text.trim();
    let cut = t
        .char_indices()
        .find(|&(i, c)| {
            c.is_ascii_alphabetic()
                && !((c == 'e' || c == 'E')
                    && t[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+'))
        })
        .map_or(t.len(), |(i, _)| i);
    let (num, unit) = t.split_at(cut);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| anyhow!("'{text}' is not a number with an optional unit"))?;
    if !value.is_finite() {
        bail!("'{text}' is not finite");
    }
    Ok((value, unit.trim().to_ascii_lowercase()))
}

/// Frequency in Hz. Accepts Hz, kHz, MHz and GHz suffixes; a bare number is Hz.
pub fn frequency(text: &str) -> Result<f64> {
    let (v, unit) = split(text)?;
    let scale = match unit.as_str() {
        "" | "hz" => 1.0,
        "khz" => 1e3,
        "mhz" => 1e6,
        "ghz" => 1e9,
        other => bail!("unknown frequency unit '{other}' in '{text}'"),
    };
    Ok(v * scale)
}

/// Length in metres. Accepts m, cm, mm, um and mil; a bare number is mm.
pub fn length(text: &str) -> Result<f64> {
    let (v, unit) = split(text)?;
    let scale = match unit.as_str() {
        "" | "mm" => 1e-3,
        "m" => 1.0,
        "cm" => 1e-2,
        "um" => 1e-6,
        "mil" => 25.4e-6,
        other => bail!("unknown length unit '{other}' in '{text}'"),
    };
    Ok(v * scale)
}

/// Resistance in ohms, with an optional `ohm` suffix.
pub fn resistance(text: &str) -> Result<f64> {
    let (v, unit) = split(text)?;
    match unit.as_str() {
        "" | "ohm" | "ohms" => Ok(v),
        other => bail!("unknown resistance unit '{other}' in '{text}'"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies() {
        assert_eq!(frequency("5.2GHz").unwrap(), 5.2e9);
        assert_eq!(frequency("5.2 ghz").unwrap(), 5.2e9);
        assert_eq!(frequency("5200MHz").unwrap(), 5.2e9);
        assert_eq!(frequency("5.2e9").unwrap(), 5.2e9);
        assert_eq!(frequency("5.2e+9Hz").unwrap(), 5.2e9);
        assert_eq!(frequency("100kHz").unwrap(), 1e5);
        assert!(frequency("5.2 parsecs").is_err());
        assert!(frequency("GHz").is_err());
        assert!(frequency("").is_err());
    }

    #[test]
    fn lengths() {
        assert!((length("1.6mm").unwrap() - 1.6e-3).abs() < 1e-18);
        assert!((length("1.6").unwrap() - 1.6e-3).abs() < 1e-18);
        assert_eq!(length("0.5m").unwrap(), 0.5);
        assert!((length("62mil").unwrap() - 1.5748e-3).abs() < 1e-15);
        assert!((length("1e-3m").unwrap() - 1e-3).abs() < 1e-18);
        assert!(length("3 furlongs").is_err());
    }

    #[test]
    fn resistances() {
        assert_eq!(resistance("317").unwrap(), 317.0);
        assert_eq!(resistance("317 ohm").unwrap(), 317.0);
        assert!(resistance("317k").is_err());
    }
}
