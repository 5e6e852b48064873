//! Control-detuning sweeps comparing the two methods.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagonalization::nonlinear_shift;
use crate::error::{Error, Result};
use crate::model::{xenon_default, AtomCount, CavitySystem, LifetimeFormula};
use crate::perturbation::{evaluate_perturbative, phi_gaussian};
use crate::quadrature::QuadratureOptions;

/// Largest grid accepted.
pub const MAX_POINTS: usize = 100_000;

/// Relative disagreement treated as agreement by [`divergence_report`].
pub const AGREEMENT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

impl Spacing {
    pub fn as_str(self) -> &'static str {
        match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Lower end of Δ/2π, Hz.
    pub min_hz: f64,
    /// Upper end of Δ/2π, Hz.
    pub max_hz: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// δ/2π, Hz.
    pub small_delta_hz: f64,
    pub system: CavitySystem,
    /// Also integrate over the Gaussian mode at every point.
    pub gauss: bool,
    pub quadrature: QuadratureOptions,
}

impl SweepSpec {
    pub fn new(
        min_hz: f64,
        max_hz: f64,
        points: usize,
        spacing: Spacing,
        small_delta_hz: f64,
        system: CavitySystem,
    ) -> Result<Self> {
        if !(min_hz < max_hz) || !min_hz.is_finite() || !max_hz.is_finite() {
            return Err(Error::config(
                "sweep_min_mhz",
                format!("need min < max, got {min_hz} Hz and {max_hz} Hz"),
            ));
        }
        if spacing == Spacing::Log && min_hz <= 0.0 {
            return Err(Error::config(
                "sweep_min_mhz",
                "log spacing needs a positive lower end",
            ));
        }
        if !(2..=MAX_POINTS).contains(&points) {
            return Err(Error::config(
                "sweep_points",
                format!("must be in 2..={MAX_POINTS}, got {points}"),
            ));
        }
        if small_delta_hz == 0.0 || !small_delta_hz.is_finite() {
            return Err(Error::config(
                "small_delta_mhz",
                "two-photon detuning must be finite and nonzero",
            ));
        }
        Ok(Self {
            min_hz,
            max_hz,
            points,
            spacing,
            small_delta_hz,
            system,
            gauss: false,
            quadrature: QuadratureOptions::default(),
        })
    }

    /// Δ/2π ∈ [1 MHz, 10 GHz], 200 log points, δ/2π = 10 MHz, xenon defaults.
    pub fn default_xenon() -> Self {
        Self::new(1e6, 1e10, 200, Spacing::Log, 10e6, xenon_default())
            .expect("default sweep is valid")
    }

    pub fn with_gauss(mut self, gauss: bool, quadrature: QuadratureOptions) -> Self {
        self.gauss = gauss;
        self.quadrature = quadrature;
        self
    }

    /// Δ/2π values in ascending order with exact endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min_hz;
                }
                if i == n - 1 {
                    return self.max_hz;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Log => {
                        (self.min_hz.ln() + f * (self.max_hz.ln() - self.min_hz.ln())).exp()
                    }
                    Spacing::Linear => self.min_hz + f * (self.max_hz - self.min_hz),
                }
            })
            .collect()
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    /// Δ/2π, Hz.
    pub delta_hz: f64,
    pub phi_pert_rad: Option<f64>,
    pub phi_gauss_rad: Option<f64>,
    pub phi_diag_rad: Option<f64>,
    pub n1: Option<f64>,
    pub valid_pert: bool,
    pub dressed_overlap: Option<f64>,
    /// Diagnostic tag when a method failed at this point.
    pub error: Option<String>,
}

fn evaluate_point(
    spec: &SweepSpec,
    derived: &crate::model::DerivedQuantities,
    delta_hz: f64,
) -> PhasePoint {
    let sys = &spec.system;
    let s = sys.scenario_from(derived, 2.0 * PI * delta_hz, 2.0 * PI * spec.small_delta_hz);
    let mut errors: Vec<&'static str> = Vec::new();

    let pert = evaluate_perturbative(&s, sys.options.validity_threshold)
        .map_err(|e| errors.push(e.tag()))
        .ok();
    let phi_gauss = if spec.gauss {
        phi_gaussian(&derived.mode, sys.medium.density, &s, &spec.quadrature)
            .map_err(|e| errors.push(e.tag()))
            .ok()
    } else {
        None
    };
    let (phi_diag, overlap) = match nonlinear_shift(&s, sys.options.overlap_threshold) {
        Ok(r) => (Some(r.phase), Some(r.dressed_overlap)),
        Err(e) => {
            errors.push(e.tag());
            let overlap = match e {
                Error::StrongMixing { overlap, .. } => Some(overlap),
                _ => None,
            };
            (None, overlap)
        }
    };
    errors.dedup();

    PhasePoint {
        delta_hz,
        phi_pert_rad: pert.map(|p| p.phase),
        phi_gauss_rad: phi_gauss,
        phi_diag_rad: phi_diag,
        n1: pert.map(|p| p.n1),
        valid_pert: pert.is_some_and(|p| p.valid),
        dressed_overlap: overlap,
        error: (!errors.is_empty()).then(|| errors.join("+")),
    }
}

/// Evaluates every grid point. Points are independent and computed in
/// parallel; output order is the grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<PhasePoint>> {
    let derived = spec.system.derive()?;
    Ok(spec
        .grid()
        .into_par_iter()
        .map(|delta_hz| evaluate_point(spec, &derived, delta_hz))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxPhase {
    pub delta_hz: f64,
    /// Signed φ_diag at the maximum of |φ_diag|, rad.
    pub phi_rad: f64,
}

/// Point maximizing |φ_diag| among identified dressed states.
pub fn find_max_phase(points: &[PhasePoint], overlap_threshold: f64) -> Result<MaxPhase> {
    points
        .iter()
        .filter_map(|p| match (p.phi_diag_rad, p.dressed_overlap) {
            (Some(phi), Some(ov)) if ov >= overlap_threshold => Some(MaxPhase {
                delta_hz: p.delta_hz,
                phi_rad: phi,
            }),
            _ => None,
        })
        .fold(None, |best: Option<MaxPhase>, m| match best {
            Some(b) if b.phi_rad.abs() >= m.phi_rad.abs() => Some(b),
            _ => Some(m),
        })
        .ok_or(Error::EmptyResult)
}

/// |φ_pert − φ_diag| / |φ_diag|, when both are available.
pub fn relative_disagreement(p: &PhasePoint) -> Option<f64> {
    let (pert, diag) = (p.phi_pert_rad?, p.phi_diag_rad?);
    let diff = (pert - diag).abs();
    if diff == 0.0 {
        Some(0.0)
    } else {
        Some(diff / diag.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    /// Smallest Δ/2π from which the methods agree within
    /// [`AGREEMENT_TOLERANCE`] at every larger grid point.
    pub converged_delta_hz: Option<f64>,
    pub n1_at_convergence: Option<f64>,
    /// Largest disagreement among points with N₁ > 1.
    pub max_disagreement_large_n1: Option<f64>,
    /// Largest disagreement among points with N₁ < 0.01.
    pub max_disagreement_small_n1: Option<f64>,
}

/// Scans from the largest Δ downward. Assumes ascending Δ, as produced by
/// [`run_sweep`].
pub fn divergence_report(points: &[PhasePoint]) -> DivergenceReport {
    let mut converged = None;
    for p in points.iter().rev() {
        match relative_disagreement(p) {
            Some(d) if d <= AGREEMENT_TOLERANCE => converged = Some(p),
            _ => break,
        }
    }
    let max_where = |pred: &dyn Fn(f64) -> bool| {
        points
            .iter()
            .filter(|p| p.n1.is_some_and(pred))
            .filter_map(relative_disagreement)
            .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))))
    };
    DivergenceReport {
        converged_delta_hz: converged.map(|p| p.delta_hz),
        n1_at_convergence: converged.and_then(|p| p.n1),
        max_disagreement_large_n1: max_where(&|n1| n1 > 1.0),
        max_disagreement_small_n1: max_where(&|n1| n1 < 0.01),
    }
}

/// Maximum |φ_diag| under one set of conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub label: String,
    pub max: Option<MaxPhase>,
}

/// Reruns `spec` under each alternative convention, one change at a time,
/// plus the combination that maximizes the phase.
pub fn convention_sensitivity(spec: &SweepSpec) -> Result<Vec<SensitivityRow>> {
    type Tweak = fn(&mut SweepSpec);
    let variants: [(&str, Tweak); 6] = [
        ("baseline", |_| {}),
        ("field normalization x2 (no standing-wave 1/2)", |s| {
            s.system.options.normalization_multiplier *= 2.0
        }),
        ("energy-decay interaction time FL/(pi c)", |s| {
            s.system.options.lifetime = LifetimeFormula::EnergyDecay
        }),
        ("collective N = rho V (no orientation 1/3)", |s| {
            s.system.options.collective_atoms = AtomCount::Total
        }),
        ("sweep extended down to 0.1 MHz", |s| {
            s.min_hz = s.min_hz.min(1e5);
        }),
        ("normalization x2 and collective N = rho V", |s| {
            s.system.options.normalization_multiplier *= 2.0;
            s.system.options.collective_atoms = AtomCount::Total;
        }),
    ];
    variants
        .iter()
        .map(|(label, tweak)| {
            let mut s = spec.clone();
            s.gauss = false;
            tweak(&mut s);
            let points = run_sweep(&s)?;
            Ok(SensitivityRow {
                label: label.to_string(),
                max: find_max_phase(&points, s.system.options.overlap_threshold).ok(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(delta_hz: f64, pert: f64, diag: f64, n1: f64) -> PhasePoint {
        PhasePoint {
            delta_hz,
            phi_pert_rad: Some(pert),
            phi_gauss_rad: None,
            phi_diag_rad: Some(diag),
            n1: Some(n1),
            valid_pert: n1 < 0.1,
            dressed_overlap: Some(0.9),
            error: None,
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let sys = xenon_default();
        assert!(matches!(
            SweepSpec::new(1e6, 1e6, 10, Spacing::Log, 1e7, sys),
            Err(Error::Config { .. })
        ));
        assert!(SweepSpec::new(0.0, 1e6, 10, Spacing::Log, 1e7, sys).is_err());
        assert!(SweepSpec::new(1e6, 1e7, 1, Spacing::Log, 1e7, sys).is_err());
        assert!(SweepSpec::new(1e6, 1e7, MAX_POINTS + 1, Spacing::Log, 1e7, sys).is_err());
        assert!(SweepSpec::new(1e6, 1e7, 10, Spacing::Log, 0.0, sys).is_err());
    }

    #[test]
    fn grids() {
        let sys = xenon_default();
        let log = SweepSpec::new(1e6, 1e10, 5, Spacing::Log, 1e7, sys)
            .unwrap()
            .grid();
        assert_eq!(log.len(), 5);
        assert_eq!((log[0], log[4]), (1e6, 1e10));
        for w in log.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-12);
        }
        let lin = SweepSpec::new(-1e6, 3e6, 5, Spacing::Linear, 1e7, sys)
            .unwrap()
            .grid();
        assert_eq!(lin, vec![-1e6, 0.0, 1e6, 2e6, 3e6]);
    }

    #[test]
    fn resonant_grid_point_is_tagged_not_fatal() {
        let spec = SweepSpec::new(-1e9, 1e9, 3, Spacing::Linear, 1e7, xenon_default()).unwrap();
        let points = run_sweep(&spec).unwrap();
        assert_eq!(points[1].delta_hz, 0.0);
        assert!(points[1].error.as_deref().unwrap().contains("resonance"));
        assert!(points[1].phi_pert_rad.is_none());
        assert!(points[0].phi_pert_rad.is_some() && points[2].phi_pert_rad.is_some());
    }

    #[test]
    fn max_phase_examples() {
        let single = [point(1e9, 1.0, 0.3, 0.1)];
        assert_eq!(
            find_max_phase(&single, 0.5).unwrap(),
            MaxPhase {
                delta_hz: 1e9,
                phi_rad: 0.3
            }
        );
        let mono: Vec<_> = (1..=5)
            .map(|i| point(i as f64, 0.0, -(i as f64), 0.0))
            .collect();
        assert_eq!(
            find_max_phase(&mono, 0.5).unwrap(),
            MaxPhase {
                delta_hz: 5.0,
                phi_rad: -5.0
            }
        );
        let mut errored = point(1.0, 1.0, 1.0, 1.0);
        errored.phi_diag_rad = None;
        errored.error = Some("strong_mixing".into());
        assert!(matches!(
            find_max_phase(&[errored], 0.5),
            Err(Error::EmptyResult)
        ));
        let mut weak = point(1.0, 1.0, 1.0, 1.0);
        weak.dressed_overlap = Some(0.4);
        assert!(find_max_phase(&[weak], 0.5).is_err());
    }

    #[test]
    fn divergence_examples() {
        let same: Vec<_> = (1..=4)
            .map(|i| point(i as f64, 2.0, 2.0, 1.0 / i as f64))
            .collect();
        let r = divergence_report(&same);
        assert_eq!(r.converged_delta_hz, Some(1.0));
        assert_eq!(r.n1_at_convergence, Some(1.0));

        let off: Vec<_> = (1..=4).map(|i| point(i as f64, 1.05, 1.0, 0.0)).collect();
        let r = divergence_report(&off);
        assert_eq!(r.converged_delta_hz, None);
        assert!((r.max_disagreement_small_n1.unwrap() - 0.05).abs() < 1e-12);

        let mixed = vec![
            point(1.0, 3.0, 1.0, 5.0),
            point(2.0, 1.0, 1.5, 0.5),
            point(3.0, 1.01, 1.0, 0.005),
            point(4.0, 1.0, 1.0, 0.001),
        ];
        let r = divergence_report(&mixed);
        assert_eq!(r.converged_delta_hz, Some(3.0));
        assert_eq!(r.n1_at_convergence, Some(0.005));
        assert_eq!(r.max_disagreement_large_n1, Some(2.0));
    }

    #[test]
    fn perturbative_column_is_recomputable() {
        let spec = SweepSpec::new(1e8, 1e10, 7, Spacing::Log, 10e6, xenon_default()).unwrap();
        let d = spec.system.derive().unwrap();
        for p in run_sweep(&spec).unwrap() {
            let big = 2.0 * PI * p.delta_hz;
            let small = 2.0 * PI * spec.small_delta_hz;
            let (g1, g2) = (d.couplings.g1, d.couplings.g2);
            let expected =
                d.n_eff * g1 * g1 * g2 * g2 * d.mode.interaction_time / (big * big * small);
            assert!(((p.phi_pert_rad.unwrap() - expected) / expected).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = SweepSpec::default_xenon();
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        // sequential evaluation gives bit-identical rows
        let d = spec.system.derive().unwrap();
        let seq: Vec<_> = spec
            .grid()
            .into_iter()
            .map(|f| evaluate_point(&spec, &d, f))
            .collect();
        assert_eq!(a, seq);
    }

    #[test]
    fn default_sweep_has_no_convergence_region() {
        // With the collective Stark shift and the g3 cross term the two methods
        // still differ by tens of percent at Δ/2π = 10 GHz.
        let points = run_sweep(&SweepSpec::default_xenon()).unwrap();
        let r = divergence_report(&points);
        assert_eq!(r.converged_delta_hz, None);
        assert!(r.max_disagreement_large_n1.unwrap() > 0.1);
    }

    #[test]
    fn convergence_found_at_low_density_and_large_detuning() {
        let mut sys = xenon_default();
        sys.medium.density = 1e13;
        let spec = SweepSpec::new(1e8, 1e11, 31, Spacing::Log, 10e6, sys).unwrap();
        let points = run_sweep(&spec).unwrap();
        let r = divergence_report(&points);
        let at = r
            .converged_delta_hz
            .expect("methods agree at large detuning");
        assert!(at < 1e10);
        assert!(r.n1_at_convergence.unwrap() < 0.1);
    }
}
