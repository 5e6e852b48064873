//! Flat `key = value` configuration.
//!
//! Units are fixed per key: wavelengths in nm, density in cm⁻³, mirror
//! radius in cm, spacing in mm, detunings in MHz (cyclic), rates in s⁻¹,
//! dipoles in C·m. Unknown keys are rejected. Lines starting with `#` and
//! trailing `# ...` comments are ignored.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::MediumData;
use crate::error::{Error, Result};
use crate::model::{
    AtomCount, CavitySpec, CavitySystem, LadderMedium, LifetimeFormula, ModelOptions, Transition,
};
use crate::quadrature::QuadratureOptions;
use crate::sweep::{Spacing, SweepSpec};

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyValue {
    pub key: String,
    pub value: String,
    /// 1-based line number.
    pub line: usize,
}

pub fn parse_key_values(text: &str) -> Result<Vec<KeyValue>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            key: line.to_string(),
            line: Some(idx + 1),
            message: "expected `key = value`".into(),
        })?;
        out.push(KeyValue {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line: idx + 1,
        });
    }
    Ok(out)
}

/// Every recognised key, in echo order.
pub const KEYS: &[&str] = &[
    "dataset",
    "lower_wavelength_nm",
    "upper_wavelength_nm",
    "lower_einstein_a",
    "upper_einstein_a",
    "lower_dipole",
    "upper_dipole",
    "density_cm3",
    "mirror_roc_cm",
    "mirror_spacing_mm",
    "finesse",
    "small_delta_mhz",
    "validity_threshold",
    "overlap_threshold",
    "lifetime_formula",
    "orientation_in_n1",
    "collective_atoms",
    "normalization_multiplier",
    "reference_wavelength_nm",
    "sweep_min_mhz",
    "sweep_max_mhz",
    "sweep_points",
    "sweep_spacing",
    "sweep_gauss",
    "quadrature_nodes",
    "quadrature_tolerance",
    "quadrature_max_refinements",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Medium dataset file; the bundled xenon data when `None`.
    pub dataset: Option<PathBuf>,
    pub lower_wavelength_nm: f64,
    pub upper_wavelength_nm: f64,
    pub lower_einstein_a: f64,
    pub upper_einstein_a: f64,
    /// Overrides the dipole derived from `lower_einstein_a`.
    pub lower_dipole: Option<f64>,
    pub upper_dipole: Option<f64>,
    pub density_cm3: f64,
    pub mirror_roc_cm: f64,
    pub mirror_spacing_mm: f64,
    pub finesse: f64,
    pub small_delta_mhz: f64,
    pub validity_threshold: f64,
    pub overlap_threshold: f64,
    pub lifetime_formula: LifetimeFormula,
    pub orientation_in_n1: bool,
    pub collective_atoms: AtomCount,
    pub normalization_multiplier: f64,
    pub reference_wavelength_nm: Option<f64>,
    pub sweep_min_mhz: f64,
    pub sweep_max_mhz: f64,
    pub sweep_points: usize,
    pub sweep_spacing: Spacing,
    pub sweep_gauss: bool,
    pub quadrature_nodes: usize,
    pub quadrature_tolerance: f64,
    pub quadrature_max_refinements: usize,
}

impl Default for Config {
    fn default() -> Self {
        let data = MediumData::bundled().expect("bundled dataset parses");
        Self::with_dataset(None, &data)
    }
}

impl Config {
    fn with_dataset(dataset: Option<PathBuf>, data: &MediumData) -> Self {
        let quad = QuadratureOptions::default();
        let opts = ModelOptions::default();
        Self {
            dataset,
            lower_wavelength_nm: data.lower_wavelength_nm,
            upper_wavelength_nm: data.upper_wavelength_nm,
            lower_einstein_a: data.lower_einstein_a,
            upper_einstein_a: data.upper_einstein_a,
            lower_dipole: None,
            upper_dipole: None,
            density_cm3: data.density_cm3,
            mirror_roc_cm: 2.5,
            mirror_spacing_mm: 2.5,
            finesse: 60_000.0,
            small_delta_mhz: 10.0,
            validity_threshold: opts.validity_threshold,
            overlap_threshold: opts.overlap_threshold,
            lifetime_formula: opts.lifetime,
            orientation_in_n1: opts.orientation_in_n1,
            collective_atoms: opts.collective_atoms,
            normalization_multiplier: opts.normalization_multiplier,
            reference_wavelength_nm: None,
            sweep_min_mhz: 1.0,
            sweep_max_mhz: 10_000.0,
            sweep_points: 200,
            sweep_spacing: Spacing::Log,
            sweep_gauss: false,
            quadrature_nodes: quad.nodes,
            quadrature_tolerance: quad.tolerance,
            quadrature_max_refinements: quad.max_refinements,
        }
    }

    /// Reads `path` (if any), then applies `overrides` (`key=value` strings)
    /// on top. Defaults fill every key left unspecified.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| {
                Error::config("config", format!("cannot read {}: {e}", p.display()))
            })?,
            None => String::new(),
        };
        Self::from_text(&text, overrides)
    }

    pub fn from_text(text: &str, overrides: &[String]) -> Result<Self> {
        let mut entries: Vec<(KeyValue, bool)> = parse_key_values(text)?
            .into_iter()
            .map(|kv| (kv, false))
            .collect();
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| Error::config(o.trim(), "override must be `key=value`"))?;
            entries.push((
                KeyValue {
                    key: key.trim().to_string(),
                    value: value.trim().to_string(),
                    line: 0,
                },
                true,
            ));
        }

        let dataset = entries
            .iter()
            .rev()
            .find(|(kv, _)| kv.key == "dataset")
            .map(|(kv, _)| PathBuf::from(&kv.value));
        let data = match &dataset {
            Some(p) => {
                MediumData::from_path(p).map_err(|e| Error::config("dataset", e.to_string()))?
            }
            None => MediumData::bundled()?,
        };
        let mut cfg = Self::with_dataset(dataset, &data);

        for (kv, is_override) in &entries {
            if kv.key == "dataset" {
                continue;
            }
            cfg.set(&kv.key, &kv.value)
                .map_err(|message| Error::Config {
                    key: kv.key.clone(),
                    line: (!is_override).then_some(kv.line),
                    message,
                })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value, checking its own range.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num(v: &str) -> std::result::Result<f64, String> {
            let x: f64 = v
                .parse()
                .map_err(|_| format!("cannot parse `{v}` as a number"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("`{v}` is not finite"))
            }
        }
        fn positive(v: &str) -> std::result::Result<f64, String> {
            let x = num(v)?;
            if x > 0.0 {
                Ok(x)
            } else {
                Err(format!("must be > 0, got {x}"))
            }
        }
        fn non_negative(v: &str) -> std::result::Result<f64, String> {
            let x = num(v)?;
            if x >= 0.0 {
                Ok(x)
            } else {
                Err(format!("must be >= 0, got {x}"))
            }
        }
        fn boolean(v: &str) -> std::result::Result<bool, String> {
            v.parse()
                .map_err(|_| format!("expected true or false, got `{v}`"))
        }
        fn count(v: &str, lo: usize, hi: usize) -> std::result::Result<usize, String> {
            let n: usize = v
                .parse()
                .map_err(|_| format!("expected an integer, got `{v}`"))?;
            if (lo..=hi).contains(&n) {
                Ok(n)
            } else {
                Err(format!("must be in {lo}..={hi}, got {n}"))
            }
        }

        match key {
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "lower_wavelength_nm" => self.lower_wavelength_nm = positive(value)?,
            "upper_wavelength_nm" => self.upper_wavelength_nm = positive(value)?,
            "lower_einstein_a" => self.lower_einstein_a = non_negative(value)?,
            "upper_einstein_a" => self.upper_einstein_a = non_negative(value)?,
            "lower_dipole" => self.lower_dipole = Some(non_negative(value)?),
            "upper_dipole" => self.upper_dipole = Some(non_negative(value)?),
            "density_cm3" => self.density_cm3 = non_negative(value)?,
            "mirror_roc_cm" => self.mirror_roc_cm = positive(value)?,
            "mirror_spacing_mm" => self.mirror_spacing_mm = positive(value)?,
            "finesse" => self.finesse = positive(value)?,
            "small_delta_mhz" => {
                let x = num(value)?;
                if x == 0.0 {
                    return Err("two-photon detuning must be nonzero".into());
                }
                self.small_delta_mhz = x;
            }
            "validity_threshold" => self.validity_threshold = positive(value)?,
            "overlap_threshold" => {
                let x = positive(value)?;
                if x > 1.0 {
                    return Err(format!("must be in (0, 1], got {x}"));
                }
                self.overlap_threshold = x;
            }
            "lifetime_formula" => {
                self.lifetime_formula = match value {
                    "field_decay" => LifetimeFormula::FieldDecay,
                    "energy_decay" => LifetimeFormula::EnergyDecay,
                    _ => {
                        return Err(format!(
                            "expected field_decay or energy_decay, got `{value}`"
                        ))
                    }
                }
            }
            "orientation_in_n1" => self.orientation_in_n1 = boolean(value)?,
            "collective_atoms" => {
                self.collective_atoms = match value {
                    "effective" => AtomCount::Effective,
                    "total" => AtomCount::Total,
                    _ => return Err(format!("expected effective or total, got `{value}`")),
                }
            }
            "normalization_multiplier" => self.normalization_multiplier = positive(value)?,
            "reference_wavelength_nm" => self.reference_wavelength_nm = Some(positive(value)?),
            "sweep_min_mhz" => self.sweep_min_mhz = num(value)?,
            "sweep_max_mhz" => self.sweep_max_mhz = num(value)?,
            "sweep_points" => self.sweep_points = count(value, 2, 100_000)?,
            "sweep_spacing" => {
                self.sweep_spacing = match value {
                    "log" => Spacing::Log,
                    "linear" => Spacing::Linear,
                    _ => return Err(format!("expected log or linear, got `{value}`")),
                }
            }
            "sweep_gauss" => self.sweep_gauss = boolean(value)?,
            "quadrature_nodes" => self.quadrature_nodes = count(value, 2, 1024)?,
            "quadrature_tolerance" => self.quadrature_tolerance = positive(value)?,
            "quadrature_max_refinements" => self.quadrature_max_refinements = count(value, 0, 16)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Cross-key invariants.
    pub fn validate(&self) -> Result<()> {
        if self.mirror_spacing_mm * 1e-3 >= 2.0 * self.mirror_roc_cm * 1e-2 {
            return Err(Error::config(
                "mirror_spacing_mm",
                format!(
                    "unstable resonator: spacing {} mm must be below twice the mirror radius ({} cm)",
                    self.mirror_spacing_mm, self.mirror_roc_cm
                ),
            ));
        }
        if !(self.sweep_min_mhz < self.sweep_max_mhz) {
            return Err(Error::config(
                "sweep_min_mhz",
                format!(
                    "must be below sweep_max_mhz ({} >= {})",
                    self.sweep_min_mhz, self.sweep_max_mhz
                ),
            ));
        }
        if self.sweep_spacing == Spacing::Log && self.sweep_min_mhz <= 0.0 {
            return Err(Error::config(
                "sweep_min_mhz",
                "must be > 0 for log spacing",
            ));
        }
        Ok(())
    }

    /// Line data as configured, before range checks.
    pub fn medium_data(&self) -> MediumData {
        MediumData {
            lower_wavelength_nm: self.lower_wavelength_nm,
            lower_einstein_a: self.lower_einstein_a,
            upper_wavelength_nm: self.upper_wavelength_nm,
            upper_einstein_a: self.upper_einstein_a,
            density_cm3: self.density_cm3,
        }
    }

    pub fn options(&self) -> ModelOptions {
        ModelOptions {
            lifetime: self.lifetime_formula,
            normalization_multiplier: self.normalization_multiplier,
            orientation_in_n1: self.orientation_in_n1,
            collective_atoms: self.collective_atoms,
            reference_wavelength: self.reference_wavelength_nm.map(|nm| nm * 1e-9),
            validity_threshold: self.validity_threshold,
            overlap_threshold: self.overlap_threshold,
        }
    }

    pub fn system(&self) -> Result<CavitySystem> {
        let data = self.medium_data();
        let problems = data.check();
        if !problems.is_empty() {
            return Err(Error::config("dataset", problems.join("; ")));
        }
        let lower = match self.lower_dipole {
            Some(mu) => Transition::from_dipole(self.lower_wavelength_nm * 1e-9, mu)?,
            None => {
                Transition::from_einstein_a(self.lower_wavelength_nm * 1e-9, self.lower_einstein_a)?
            }
        };
        let upper = match self.upper_dipole {
            Some(mu) => Transition::from_dipole(self.upper_wavelength_nm * 1e-9, mu)?,
            None => {
                Transition::from_einstein_a(self.upper_wavelength_nm * 1e-9, self.upper_einstein_a)?
            }
        };
        Ok(CavitySystem {
            medium: LadderMedium::new(lower, upper, self.density_cm3 * 1e6)?,
            cavity: CavitySpec::new(
                self.mirror_roc_cm * 1e-2,
                self.mirror_spacing_mm * 1e-3,
                self.finesse,
            )?,
            options: self.options(),
        })
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions {
            nodes: self.quadrature_nodes,
            tolerance: self.quadrature_tolerance,
            max_refinements: self.quadrature_max_refinements,
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        SweepSpec::new(
            self.sweep_min_mhz * 1e6,
            self.sweep_max_mhz * 1e6,
            self.sweep_points,
            self.sweep_spacing,
            self.small_delta_mhz * 1e6,
            self.system()?,
        )
        .map(|s| s.with_gauss(self.sweep_gauss, self.quadrature()))
    }

    /// Resolved `key = value` pairs, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        KEYS.iter()
            .map(|&k| {
                let v = match k {
                    "dataset" => self
                        .dataset
                        .as_ref()
                        .map(|p| p.display().to_string())
                        .unwrap_or_else(|| "bundled:xenon".into()),
                    "lower_wavelength_nm" => self.lower_wavelength_nm.to_string(),
                    "upper_wavelength_nm" => self.upper_wavelength_nm.to_string(),
                    "lower_einstein_a" => self.lower_einstein_a.to_string(),
                    "upper_einstein_a" => self.upper_einstein_a.to_string(),
                    "lower_dipole" => opt(self.lower_dipole),
                    "upper_dipole" => opt(self.upper_dipole),
                    "density_cm3" => self.density_cm3.to_string(),
                    "mirror_roc_cm" => self.mirror_roc_cm.to_string(),
                    "mirror_spacing_mm" => self.mirror_spacing_mm.to_string(),
                    "finesse" => self.finesse.to_string(),
                    "small_delta_mhz" => self.small_delta_mhz.to_string(),
                    "validity_threshold" => self.validity_threshold.to_string(),
                    "overlap_threshold" => self.overlap_threshold.to_string(),
                    "lifetime_formula" => self.lifetime_formula.as_str().into(),
                    "orientation_in_n1" => self.orientation_in_n1.to_string(),
                    "collective_atoms" => self.collective_atoms.as_str().into(),
                    "normalization_multiplier" => self.normalization_multiplier.to_string(),
                    "reference_wavelength_nm" => opt(self.reference_wavelength_nm),
                    "sweep_min_mhz" => self.sweep_min_mhz.to_string(),
                    "sweep_max_mhz" => self.sweep_max_mhz.to_string(),
                    "sweep_points" => self.sweep_points.to_string(),
                    "sweep_spacing" => self.sweep_spacing.as_str().into(),
                    "sweep_gauss" => self.sweep_gauss.to_string(),
                    "quadrature_nodes" => self.quadrature_nodes.to_string(),
                    "quadrature_tolerance" => self.quadrature_tolerance.to_string(),
                    "quadrature_max_refinements" => self.quadrature_max_refinements.to_string(),
                    _ => unreachable!("KEYS and entries() out of sync"),
                };
                (k, v)
            })
            .collect()
    }
}
