use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use egdss_core::{datasets, Sample};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Where a sample came from, as recorded in the output envelope.
#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub source: String,
    pub n: usize,
    pub sha256: String,
}

pub struct LoadedSample {
    pub sample: Sample,
    pub record: InputRecord,
}

/// Numbers separated by commas and/or whitespace, `#` to end of line is a comment.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("");
        for token in body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v: f64 = token
                .parse()
                .map_err(|_| anyhow::anyhow!("line {line_no}: cannot parse {token:?} as a number"))?;
            if !v.is_finite() || v <= 0.0 {
                bail!("line {line_no}: value {token} is not a positive finite number");
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        bail!("no values found");
    }
    Ok(values)
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Loads a data file, falling back to the embedded datasets when no file of that
/// name exists.
pub fn load(spec: &str, label: &str) -> Result<LoadedSample> {
    let path = Path::new(spec);
    let (values, bytes) = if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let values = parse_values(&text).with_context(|| format!("parsing {spec}"))?;
        (values, text.into_bytes())
    } else if let Some(s) = datasets::embedded(spec) {
        let canonical: String = s.values().iter().map(|v| format!("{v}\n")).collect();
        (s.values().to_vec(), canonical.into_bytes())
    } else {
        bail!(
            "{spec}: no such file and not an embedded dataset (available: {})",
            datasets::NAMES.join(", ")
        );
    };
    let sample = Sample::new(label, values).with_context(|| format!("loading {spec}"))?;
    Ok(LoadedSample {
        record: InputRecord {
            source: spec.to_string(),
            n: sample.len(),
            sha256: hex_digest(&bytes),
        },
        sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_separators_and_comments() {
        let v = parse_values("# header\n1, 2 3\n\t4.5,,6 # trailing\n").unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.5, 6.0]);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_values("1\n2\n-1\n").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = parse_values("1 abc").unwrap_err().to_string();
        assert!(e.contains("line 1") && e.contains("abc"), "{e}");
        for bad in ["0", "inf", "NaN"] {
            assert!(parse_values(bad).is_err());
        }
        assert!(parse_values("# nothing\n").is_err());
    }

    #[test]
    fn embedded_fallback() {
        let s = load("jute10", "strength").unwrap();
        assert_eq!(s.sample.len(), 30);
        assert_eq!(s.sample.label(), "strength");
        assert_eq!(s.record.sha256.len(), 64);
        assert!(load("no-such-dataset", "x").is_err());
    }

    #[test]
    fn digest_known_value() {
        assert_eq!(
            hex_digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
