//! JSON and CSV helpers shared by the CLI and the audits.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Formats a float with 12 significant digits for CSV output.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Reads JSON, mapping I/O and parse failures to input errors.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// `sha256:<hex>` of a file's bytes, or of nothing when it cannot be read.
pub fn digest(path: &Path) -> String {
    let bytes = fs::read(path).unwrap_or_default();
    let hash = Sha256::digest(&bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Prior and per-preparation outcome probabilities for Bayesian updating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesInput {
    pub prior: BTreeMap<String, f64>,
    /// Preparation to observation to probability.
    pub conditionals: BTreeMap<String, BTreeMap<String, f64>>,
}

impl BayesInput {
    pub fn flat_conditionals(&self) -> BTreeMap<(String, String), f64> {
        self.conditionals
            .iter()
            .flat_map(|(p, row)| row.iter().map(move |(o, v)| ((p.clone(), o.clone()), *v)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(0.25), "0.25");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(-2.0), "-2");
        assert_eq!(fmt12(1e-9), "1.00000000000e-9");
    }
}
