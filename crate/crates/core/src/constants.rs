//! Versioned table of physical constants (SI).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../data/constants.json");

pub const CONSTANTS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub schema_version: u32,
    pub label: String,
    pub bohr_radius_m: f64,
    pub planck_length_m: f64,
    pub hartree_j: f64,
    pub hbar_js: f64,
}

impl PhysicalConstants {
    /// The bundled CODATA 2018 table.
    pub fn codata2018() -> Self {
        Self::from_json(BUNDLED).expect("bundled constants table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Domain(format!("constants table: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Domain(format!("cannot read constants table {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONSTANTS_SCHEMA_VERSION {
            return Err(Error::Domain(format!(
                "constants schema_version {} unsupported (expected {CONSTANTS_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        for (name, v) in [
            ("bohr_radius_m", self.bohr_radius_m),
            ("planck_length_m", self.planck_length_m),
            ("hartree_j", self.hartree_j),
            ("hbar_js", self.hbar_js),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("constant {name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Atomic unit of time `ħ/E_h` in seconds.
    pub fn atomic_time_s(&self) -> f64 {
        self.hbar_js / self.hartree_j
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table() {
        let c = PhysicalConstants::codata2018();
        assert_eq!(c.bohr_radius_m, 5.29177210903e-11);
        assert_eq!(c.planck_length_m, 1.616255e-35);
        assert!((c.atomic_time_s() / 2.4188843265857e-17 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_tables() {
        let mut v: serde_json::Value = serde_json::from_str(BUNDLED).unwrap();
        v["bohr_radius_m"] = serde_json::json!(-1.0);
        assert!(PhysicalConstants::from_json(&v.to_string()).is_err());
        v["bohr_radius_m"] = serde_json::json!(5.29e-11);
        v["extra"] = serde_json::json!(1);
        assert!(PhysicalConstants::from_json(&v.to_string()).is_err());
    }
}
