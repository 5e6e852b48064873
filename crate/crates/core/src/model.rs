//! Atomic transitions, cavity geometry, and the single-photon quantities
//! derived from them.
//!
//! Everything downstream works in angular-frequency units (rad/s); this module
//! is where SI energies, fields and dipoles are converted with ħ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{C, EPSILON0, HBAR};
use crate::error::{Error, Result};
use crate::perturbation::Scenario;

/// Angular frequency 2πc/λ of light with vacuum wavelength `wavelength` (m).
pub fn angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * C / wavelength
}

/// Transition dipole moment (C·m) from the spontaneous emission rate:
/// μ = sqrt(3π ε₀ ħ c³ A / ω³).
pub fn dipole_from_einstein_a(wavelength: f64, einstein_a: f64) -> Result<f64> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !(einstein_a >= 0.0) || !einstein_a.is_finite() {
        return Err(Error::domain(format!(
            "Einstein A coefficient must be non-negative, got {einstein_a}"
        )));
    }
    let omega = angular_frequency(wavelength);
    Ok((3.0 * PI * EPSILON0 * HBAR * C.powi(3) * einstein_a / omega.powi(3)).sqrt())
}

/// Inverse of [`dipole_from_einstein_a`]: A = ω³μ² / (3π ε₀ ħ c³).
pub fn einstein_a_from_dipole(wavelength: f64, dipole_moment: f64) -> Result<f64> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !(dipole_moment >= 0.0) || !dipole_moment.is_finite() {
        return Err(Error::domain(format!(
            "dipole moment must be non-negative, got {dipole_moment}"
        )));
    }
    let omega = angular_frequency(wavelength);
    Ok(omega.powi(3) * dipole_moment * dipole_moment / (3.0 * PI * EPSILON0 * HBAR * C.powi(3)))
}

/// One electric-dipole transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    wavelength: f64,
    einstein_a: f64,
    dipole_moment: f64,
    angular_frequency: f64,
}

impl Transition {
    pub fn from_einstein_a(wavelength: f64, einstein_a: f64) -> Result<Self> {
        let dipole_moment = dipole_from_einstein_a(wavelength, einstein_a)?;
        Ok(Self {
            wavelength,
            einstein_a,
            dipole_moment,
            angular_frequency: angular_frequency(wavelength),
        })
    }

    /// Builds a transition from a known dipole moment, e.g. a literature value.
    pub fn from_dipole(wavelength: f64, dipole_moment: f64) -> Result<Self> {
        let einstein_a = einstein_a_from_dipole(wavelength, dipole_moment)?;
        Ok(Self {
            wavelength,
            einstein_a,
            dipole_moment,
            angular_frequency: angular_frequency(wavelength),
        })
    }

    /// Vacuum wavelength, m.
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Spontaneous emission rate, s⁻¹.
    pub fn einstein_a(&self) -> f64 {
        self.einstein_a
    }

    /// Dipole moment, C·m.
    pub fn dipole_moment(&self) -> f64 {
        self.dipole_moment
    }

    /// Angular frequency, rad/s.
    pub fn angular_frequency(&self) -> f64 {
        self.angular_frequency
    }
}

/// A three-level ladder |g⟩ → |i⟩ → |h⟩ at uniform density.
///
/// `lower` is the control-coupled |g⟩↔|i⟩ line, `upper` the signal-coupled
/// |i⟩↔|h⟩ line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderMedium {
    pub lower: Transition,
    pub upper: Transition,
    /// Atoms per m³.
    pub density: f64,
}

impl LadderMedium {
    pub fn new(lower: Transition, upper: Transition, density: f64) -> Result<Self> {
        if !(density >= 0.0) || !density.is_finite() {
            return Err(Error::domain(format!(
                "density must be non-negative, got {density}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            density,
        })
    }

    /// ω_ig − ω_hi, rad/s.
    pub fn splitting(&self) -> f64 {
        self.lower.angular_frequency - self.upper.angular_frequency
    }
}

/// Symmetric two-mirror resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    mirror_radius_of_curvature: f64,
    mirror_spacing: f64,
    finesse: f64,
}

impl CavitySpec {
    /// Rejects geometries outside the stability range 0 < L < 2R and
    /// non-positive finesse.
    pub fn new(mirror_radius_of_curvature: f64, mirror_spacing: f64, finesse: f64) -> Result<Self> {
        if !(finesse > 0.0) || !finesse.is_finite() {
            return Err(Error::domain(format!(
                "finesse must be positive, got {finesse}"
            )));
        }
        if !(mirror_spacing > 0.0) || !(mirror_radius_of_curvature > 0.0) {
            return Err(Error::domain(format!(
                "mirror spacing ({mirror_spacing}) and radius of curvature \
                 ({mirror_radius_of_curvature}) must be positive"
            )));
        }
        if mirror_spacing >= 2.0 * mirror_radius_of_curvature {
            return Err(Error::domain(format!(
                "unstable resonator: spacing {mirror_spacing} m must be below 2R = {} m",
                2.0 * mirror_radius_of_curvature
            )));
        }
        Ok(Self {
            mirror_radius_of_curvature,
            mirror_spacing,
            finesse,
        })
    }

    pub fn mirror_radius_of_curvature(&self) -> f64 {
        self.mirror_radius_of_curvature
    }

    pub fn mirror_spacing(&self) -> f64 {
        self.mirror_spacing
    }

    pub fn finesse(&self) -> f64 {
        self.finesse
    }

    /// Resonator g-parameter 1 − L/R.
    pub fn g_parameter(&self) -> f64 {
        1.0 - self.mirror_spacing / self.mirror_radius_of_curvature
    }
}

/// Waist radius of the fundamental mode of a symmetric resonator,
/// w₀² = (Lλ/2π)·sqrt((1+g)/(1−g)).
pub fn beam_waist(spec: &CavitySpec, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    let g = spec.g_parameter();
    if g.abs() >= 1.0 {
        return Err(Error::domain(format!(
            "unstable resonator, |g| = {} >= 1",
            g.abs()
        )));
    }
    let w0_sq = spec.mirror_spacing * wavelength / (2.0 * PI) * ((1.0 + g) / (1.0 - g)).sqrt();
    Ok(w0_sq.sqrt())
}

/// Photon storage time convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifetimeFormula {
    /// Field amplitude 1/e time, 2FL/(πc).
    #[default]
    FieldDecay,
    /// Stored energy 1/e time, FL/(πc).
    EnergyDecay,
}

impl LifetimeFormula {
    pub fn as_str(self) -> &'static str {
        match self {
            LifetimeFormula::FieldDecay => "field_decay",
            LifetimeFormula::EnergyDecay => "energy_decay",
        }
    }
}

/// Interaction time between the medium and one intracavity photon, s.
pub fn interaction_time(spec: &CavitySpec, formula: LifetimeFormula) -> f64 {
    let energy_decay = spec.finesse * spec.mirror_spacing / (PI * C);
    match formula {
        LifetimeFormula::FieldDecay => 2.0 * energy_decay,
        LifetimeFormula::EnergyDecay => energy_decay,
    }
}

/// Volume π·w₀²·L of the uniform-field cylinder standing in for the mode.
pub fn mode_volume_cylinder(waist: f64, spacing: f64) -> f64 {
    PI * waist * waist * spacing
}

/// Spatially averaged single-photon field, sqrt(ħω / 2ε₀V), V/m.
pub fn single_photon_field(angular_frequency: f64, mode_volume: f64) -> f64 {
    (HBAR * angular_frequency / (2.0 * EPSILON0 * mode_volume)).sqrt()
}

/// Coupling μE/ħ in rad/s.
pub fn coupling_rate(dipole: f64, field: f64) -> f64 {
    dipole * field / HBAR
}

/// Atom count after orientation averaging, ρV/3. Not rounded.
pub fn effective_atom_number(density: f64, volume: f64) -> f64 {
    density * volume / 3.0
}

/// Geometry of the shared cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityMode {
    pub waist: f64,
    pub rayleigh_range: f64,
    pub cylinder_volume: f64,
    pub interaction_time: f64,
    pub reference_wavelength: f64,
    /// Mirror spacing, m.
    pub length: f64,
}

impl CavityMode {
    pub fn new(
        spec: &CavitySpec,
        reference_wavelength: f64,
        lifetime: LifetimeFormula,
    ) -> Result<Self> {
        let waist = beam_waist(spec, reference_wavelength)?;
        Ok(Self {
            waist,
            rayleigh_range: PI * waist * waist / reference_wavelength,
            cylinder_volume: mode_volume_cylinder(waist, spec.mirror_spacing),
            interaction_time: interaction_time(spec, lifetime),
            reference_wavelength,
            length: spec.mirror_spacing,
        })
    }
}

/// Single-photon couplings in rad/s, taken real and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CouplingSet {
    /// Control photon on |g⟩↔|i⟩.
    pub g1: f64,
    /// Signal photon on |i⟩↔|h⟩.
    pub g2: f64,
    /// Signal photon on |g⟩↔|i⟩ (far detuned).
    pub g3: f64,
}

/// Which atom number enters a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomCount {
    /// ρV/3, orientation averaged.
    #[default]
    Effective,
    /// ρV.
    Total,
}

impl AtomCount {
    pub fn as_str(self) -> &'static str {
        match self {
            AtomCount::Effective => "effective",
            AtomCount::Total => "total",
        }
    }
}

/// Convention switches for the open modelling choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    pub lifetime: LifetimeFormula,
    /// Multiplies the single-photon E² (1 = standing-wave average).
    pub normalization_multiplier: f64,
    /// Apply the 1/3 orientation factor to the first-excited population.
    pub orientation_in_n1: bool,
    /// Atom number used for the collective √N couplings.
    pub collective_atoms: AtomCount,
    /// Wavelength used for the shared mode geometry; mean of the two lines
    /// when `None`.
    pub reference_wavelength: Option<f64>,
    pub validity_threshold: f64,
    pub overlap_threshold: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            lifetime: LifetimeFormula::FieldDecay,
            normalization_multiplier: 1.0,
            orientation_in_n1: true,
            collective_atoms: AtomCount::Effective,
            reference_wavelength: None,
            validity_threshold: 0.1,
            overlap_threshold: 0.5,
        }
    }
}

/// Quantities derived once per medium/cavity pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub mode: CavityMode,
    /// Averaged control field, V/m.
    pub control_field: f64,
    /// Averaged signal field, V/m.
    pub signal_field: f64,
    pub couplings: CouplingSet,
    /// ρ·V_cyl.
    pub n_total: f64,
    /// ρ·V_cyl/3.
    pub n_eff: f64,
    /// ω_ig − ω_hi, rad/s.
    pub splitting: f64,
    pub interaction_time_field_decay: f64,
    pub interaction_time_energy_decay: f64,
}

/// Medium, cavity and conventions: the complete physical input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySystem {
    pub medium: LadderMedium,
    pub cavity: CavitySpec,
    pub options: ModelOptions,
}

impl CavitySystem {
    pub fn reference_wavelength(&self) -> f64 {
        self.options
            .reference_wavelength
            .unwrap_or(0.5 * (self.medium.lower.wavelength + self.medium.upper.wavelength))
    }

    pub fn derive(&self) -> Result<DerivedQuantities> {
        let mult = self.options.normalization_multiplier;
        if !(mult > 0.0) || !mult.is_finite() {
            return Err(Error::domain(format!(
                "normalization multiplier must be positive, got {mult}"
            )));
        }
        let mode = CavityMode::new(
            &self.cavity,
            self.reference_wavelength(),
            self.options.lifetime,
        )?;
        let scale = mult.sqrt();
        // control drives the lower line, signal the upper; each field at its own frequency
        let control_field =
            scale * single_photon_field(self.medium.lower.angular_frequency, mode.cylinder_volume);
        let signal_field =
            scale * single_photon_field(self.medium.upper.angular_frequency, mode.cylinder_volume);
        let couplings = CouplingSet {
            g1: coupling_rate(self.medium.lower.dipole_moment, control_field),
            g2: coupling_rate(self.medium.upper.dipole_moment, signal_field),
            g3: coupling_rate(self.medium.lower.dipole_moment, signal_field),
        };
        let n_total = self.medium.density * mode.cylinder_volume;
        Ok(DerivedQuantities {
            mode,
            control_field,
            signal_field,
            couplings,
            n_total,
            n_eff: effective_atom_number(self.medium.density, mode.cylinder_volume),
            splitting: self.medium.splitting(),
            interaction_time_field_decay: interaction_time(
                &self.cavity,
                LifetimeFormula::FieldDecay,
            ),
            interaction_time_energy_decay: interaction_time(
                &self.cavity,
                LifetimeFormula::EnergyDecay,
            ),
        })
    }

    /// Scenario at control detuning `big_delta` and two-photon detuning
    /// `small_delta`, both rad/s.
    pub fn scenario(&self, big_delta: f64, small_delta: f64) -> Result<Scenario> {
        let derived = self.derive()?;
        Ok(self.scenario_from(&derived, big_delta, small_delta))
    }

    /// Like [`CavitySystem::scenario`] but reuses precomputed quantities.
    pub fn scenario_from(
        &self,
        derived: &DerivedQuantities,
        big_delta: f64,
        small_delta: f64,
    ) -> Scenario {
        let mut s = Scenario::new(
            derived.splitting,
            big_delta,
            small_delta,
            derived.couplings,
            derived.n_total,
            derived.mode.interaction_time,
        );
        if !self.options.orientation_in_n1 {
            s.population_atoms = s.n_total;
        }
        if self.options.collective_atoms == AtomCount::Total {
            s.collective_atoms = s.n_total;
        }
        s
    }
}

/// Metastable xenon in the 2.5 cm / 2.5 mm / F = 60 000 cavity, built from
/// the bundled dataset with default conventions.
pub fn xenon_default() -> CavitySystem {
    crate::dataset::MediumData::bundled()
        .and_then(|data| data.medium())
        .and_then(|medium| {
            Ok(CavitySystem {
                medium,
                cavity: CavitySpec::new(0.025, 0.0025, 60_000.0)?,
                options: ModelOptions::default(),
            })
        })
        .expect("bundled xenon dataset is valid")
}
