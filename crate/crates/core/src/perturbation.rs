//! Fourth-order perturbative cross-phase estimate and its validity metric.
//!
//! Signs: Δ = ω_ig − ω₁ and δ = (ω_ig + ω_hi) − (ω₁ + ω₂), both positive
//! when the fields sit below their resonances. The reported phase φ carries
//! the sign of δ; the state picks up exp(−iφ).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CavityMode, CouplingSet};
use crate::quadrature::{converge, GaussLegendre, QuadratureOptions};

/// Radial cut-off of the Gaussian mode in units of the local beam radius.
pub const RADIAL_CUTOFF: f64 = 6.0;

/// Everything either method needs at one detuning point. Energies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Δ, control detuning from |i⟩.
    pub big_delta: f64,
    /// δ, two-photon detuning from |h⟩.
    pub small_delta: f64,
    /// Δ₃ = ω_ig − ω₂, signal detuning from the lower transition.
    pub delta3: f64,
    pub couplings: CouplingSet,
    /// ρV/3.
    pub n_eff: f64,
    /// ρV.
    pub n_total: f64,
    /// Interaction time, s.
    pub interaction_time: f64,
    /// Atom number in the first-excited population; `n_eff` by default.
    pub population_atoms: f64,
    /// Atom number in the collective couplings; `n_eff` by default.
    pub collective_atoms: f64,
}

impl Scenario {
    /// `splitting` is ω_ig − ω_hi.
    pub fn new(
        splitting: f64,
        big_delta: f64,
        small_delta: f64,
        couplings: CouplingSet,
        n_total: f64,
        interaction_time: f64,
    ) -> Self {
        let n_eff = n_total / 3.0;
        Self {
            big_delta,
            small_delta,
            delta3: splitting + small_delta - big_delta,
            couplings,
            n_eff,
            n_total,
            interaction_time,
            population_atoms: n_eff,
            collective_atoms: n_eff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeResult {
    /// Signed phase, rad.
    pub phase: f64,
    /// Atoms in the first excited state.
    pub n1: f64,
    pub valid: bool,
}

/// Fourth-order energy shift per atom, E⁽⁴⁾/ħ = g1²g2²/(Δ²δ), rad/s.
pub fn e4_shift_per_atom(g1: f64, g2: f64, big_delta: f64, small_delta: f64) -> Result<f64> {
    if big_delta == 0.0 {
        return Err(Error::Resonance("control (Δ)"));
    }
    if small_delta == 0.0 {
        return Err(Error::Resonance("two-photon (δ)"));
    }
    Ok(g1 * g1 * g2 * g2 / (big_delta * big_delta * small_delta))
}

/// Phase for a uniform field over the cylinder: N_eff·E⁽⁴⁾·t/ħ.
pub fn phi_uniform(s: &Scenario) -> Result<f64> {
    let e4 = e4_shift_per_atom(s.couplings.g1, s.couplings.g2, s.big_delta, s.small_delta)?;
    Ok(s.n_eff * e4 * s.interaction_time)
}

/// Expected number of atoms in |i⟩, N·g1²/Δ².
pub fn n1_population(s: &Scenario) -> Result<f64> {
    if s.big_delta == 0.0 {
        return Err(Error::Resonance("control (Δ)"));
    }
    Ok(s.population_atoms * s.couplings.g1 * s.couplings.g1 / (s.big_delta * s.big_delta))
}

pub fn evaluate_perturbative(s: &Scenario, validity_threshold: f64) -> Result<PerturbativeResult> {
    let phase = phi_uniform(s)?;
    let n1 = n1_population(s)?;
    Ok(PerturbativeResult {
        phase,
        n1,
        valid: n1 < validity_threshold,
    })
}

/// Ratio V_cyl·∫u²dV / (∫u dV)², where u is the squared Gaussian envelope
/// (w₀²/w(z)²)·exp(−2r²/w(z)²). This is the factor by which the local
/// fourth-order shift integrated over the true mode differs from the
/// uniform-cylinder value when both fields carry one photon's energy.
pub fn gaussian_mode_factor(mode: &CavityMode, opts: &QuadratureOptions) -> Result<f64> {
    let gl = GaussLegendre::new(opts.nodes);
    let (w0, zr, len) = (mode.waist, mode.rayleigh_range, mode.length);
    converge(opts, |panels| {
        let (mut first, mut second) = (0.0, 0.0);
        let h = len / panels as f64;
        for p in 0..panels {
            let mid = -0.5 * len + h * (p as f64 + 0.5);
            for (x, wz) in gl.nodes.iter().zip(&gl.weights) {
                let z = mid + 0.5 * h * x;
                let w_sq = w0 * w0 * (1.0 + (z / zr).powi(2));
                let peak = w0 * w0 / w_sq;
                let r_max = RADIAL_CUTOFF * w_sq.sqrt();
                let envelope = |r: f64| peak * (-2.0 * r * r / w_sq).exp();
                let u1 = gl.integrate(0.0, r_max, panels, |r| 2.0 * PI * r * envelope(r));
                let u2 = gl.integrate(0.0, r_max, panels, |r| 2.0 * PI * r * envelope(r).powi(2));
                first += 0.5 * h * wz * u1;
                second += 0.5 * h * wz * u2;
            }
        }
        mode.cylinder_volume * second / (first * first)
    })
}

/// Phase from integrating the local fourth-order shift over the Gaussian
/// mode, ρ/3 · ∫ E⁽⁴⁾(r, z) t/ħ dV.
pub fn phi_gaussian(
    mode: &CavityMode,
    density: f64,
    s: &Scenario,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let e4 = e4_shift_per_atom(s.couplings.g1, s.couplings.g2, s.big_delta, s.small_delta)?;
    if density == 0.0 || e4 == 0.0 {
        return Ok(0.0);
    }
    let factor = gaussian_mode_factor(mode, opts)?;
    Ok(density / 3.0 * mode.cylinder_volume * factor * e4 * s.interaction_time)
}
