//! Medium datasets in the flat `key = value` format shared with the CLI
//! configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::parse_key_values;
use crate::error::{Error, Result};
use crate::model::{LadderMedium, Transition};

/// Bundled metastable-xenon dataset.
pub const XENON: &str = include_str!("../data/xenon.conf");

/// Raw line data as read from a dataset file. Values are not range-checked
/// until [`MediumData::check`] or [`MediumData::medium`] is called.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumData {
    pub lower_wavelength_nm: f64,
    pub lower_einstein_a: f64,
    pub upper_wavelength_nm: f64,
    pub upper_einstein_a: f64,
    pub density_cm3: f64,
}

const DATASET_KEYS: [&str; 5] = [
    "lower_wavelength_nm",
    "lower_einstein_a",
    "upper_wavelength_nm",
    "upper_einstein_a",
    "density_cm3",
];

impl MediumData {
    pub fn bundled() -> Result<Self> {
        Self::parse(XENON)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses a dataset. Every key must appear exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = [None; 5];
        for kv in parse_key_values(text)? {
            let slot = DATASET_KEYS
                .iter()
                .position(|k| *k == kv.key)
                .ok_or_else(|| Error::Config {
                    key: kv.key.clone(),
                    line: Some(kv.line),
                    message: "unknown dataset key".into(),
                })?;
            let v: f64 = kv.value.parse().map_err(|_| Error::Config {
                key: kv.key.clone(),
                line: Some(kv.line),
                message: format!("cannot parse `{}` as a number", kv.value),
            })?;
            values[slot] = Some(v);
        }
        let get = |i: usize| {
            values[i].ok_or_else(|| Error::config(DATASET_KEYS[i], "missing from dataset"))
        };
        Ok(Self {
            lower_wavelength_nm: get(0)?,
            lower_einstein_a: get(1)?,
            upper_wavelength_nm: get(2)?,
            upper_einstein_a: get(3)?,
            density_cm3: get(4)?,
        })
    }

    /// Integrity problems, one message per offending key. Empty when sound.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut positive = |key: &str, v: f64, allow_zero: bool| {
            let ok = v.is_finite() && if allow_zero { v >= 0.0 } else { v > 0.0 };
            if !ok {
                let bound = if allow_zero { ">= 0" } else { "> 0" };
                problems.push(format!("{key} = {v} (must be finite and {bound})"));
            }
        };
        positive("lower_wavelength_nm", self.lower_wavelength_nm, false);
        positive("upper_wavelength_nm", self.upper_wavelength_nm, false);
        positive("lower_einstein_a", self.lower_einstein_a, true);
        positive("upper_einstein_a", self.upper_einstein_a, true);
        positive("density_cm3", self.density_cm3, true);
        problems
    }

    pub fn medium(&self) -> Result<LadderMedium> {
        LadderMedium::new(
            Transition::from_einstein_a(self.lower_wavelength_nm * 1e-9, self.lower_einstein_a)?,
            Transition::from_einstein_a(self.upper_wavelength_nm * 1e-9, self.upper_einstein_a)?,
            self.density_cm3 * 1e6,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_xenon_is_sound() {
        let data = MediumData::bundled().unwrap();
        assert!(data.check().is_empty());
        assert_eq!(data.lower_wavelength_nm, 823.0);
        assert_eq!(data.upper_wavelength_nm, 853.0);
        assert_eq!(data.density_cm3, 1e10);
        let m = data.medium().unwrap();
        assert!(m.lower.wavelength() < m.upper.wavelength());
        assert_eq!(m.density, 1e16);
    }

    #[test]
    fn negative_rate_flagged() {
        let text = XENON.replace("lower_einstein_a = 2.6749e7", "lower_einstein_a = -5");
        let data = MediumData::parse(&text).unwrap();
        let problems = data.check();
        assert_eq!(problems.len(), 1);
        assert!(problems[0].starts_with("lower_einstein_a"));
        assert!(data.medium().is_err());
    }

    #[test]
    fn missing_and_unknown_keys() {
        assert!(matches!(
            MediumData::parse("lower_wavelength_nm = 823"),
            Err(Error::Config { .. })
        ));
        let err = MediumData::parse(&format!("{XENON}\nbogus = 1")).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, line: Some(_), .. } if key == "bogus"));
    }
}
