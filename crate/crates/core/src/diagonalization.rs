//! Dressed-state treatment of the collective four-state problem.
//!
//! The Hamiltonian is written relative to the energy of the bare state with
//! both photons present, so its diagonal is (δ, Δ₃, Δ, 0) rad/s. That shift
//! is a multiple of the identity and leaves eigenvalue differences intact.
//! The nonlinear shift is the dressed energy of |4′⟩ minus the two
//! single-field light shifts. To leading order it equals −N·g1²g2²/(Δ²δ),
//! so the phase −shift·t has the same sign as the perturbative phase.

use serde::{Deserialize, Serialize};

use crate::eigen::{eigensolve_symmetric, EigenDecomposition};
use crate::error::{Error, Result};
use crate::model::CouplingSet;
use crate::perturbation::Scenario;

/// Bare basis of the collective problem, in matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BareState {
    /// |1′⟩: no photons, one atom in |h⟩.
    Upper = 0,
    /// |2′⟩: control photon left, one atom in |i⟩ (signal absorbed).
    ControlRemaining = 1,
    /// |3′⟩: signal photon left, one atom in |i⟩ (control absorbed).
    SignalRemaining = 2,
    /// |4′⟩: both photons, all atoms in |g⟩.
    BothPhotons = 3,
}

impl BareState {
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningFrameHamiltonian {
    /// Row-major, rad/s.
    pub matrix: [[f64; 4]; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedState {
    pub eigenvalue: f64,
    /// Squared component on the bare state.
    pub overlap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearShiftResult {
    pub full_shift: f64,
    pub control_linear: f64,
    pub signal_linear: f64,
    pub nonlinear: f64,
    pub dressed_overlap: f64,
    /// −nonlinear · t, rad.
    pub phase: f64,
}

/// Collective couplings: √N on the two |g⟩↔|i⟩ elements, none on |i⟩↔|h⟩
/// (a single photon leaves at most one atom excited).
pub fn collective_couplings(c: &CouplingSet, n: f64) -> CouplingSet {
    let root = n.max(0.0).sqrt();
    CouplingSet {
        g1: root * c.g1,
        g2: c.g2,
        g3: root * c.g3,
    }
}

pub fn build_hamiltonian(s: &Scenario) -> DetuningFrameHamiltonian {
    let c = collective_couplings(&s.couplings, s.collective_atoms);
    let mut m = [[0.0; 4]; 4];
    m[0][0] = s.small_delta;
    m[1][1] = s.delta3;
    m[2][2] = s.big_delta;
    m[3][3] = 0.0;
    let mut link = |i: usize, j: usize, g: f64| {
        m[i][j] = g;
        m[j][i] = g;
    };
    link(
        BareState::Upper.index(),
        BareState::SignalRemaining.index(),
        c.g2,
    );
    link(
        BareState::ControlRemaining.index(),
        BareState::BothPhotons.index(),
        c.g3,
    );
    link(
        BareState::SignalRemaining.index(),
        BareState::BothPhotons.index(),
        c.g1,
    );
    DetuningFrameHamiltonian { matrix: m }
}

/// Eigenvalue whose eigenvector has the largest weight on `bare_index`.
/// Fails with [`Error::StrongMixing`] when that weight is below `threshold`.
pub fn dressed_eigenvalue<const N: usize>(
    d: &EigenDecomposition<N>,
    bare_index: usize,
    threshold: f64,
) -> Result<DressedState> {
    let (k, overlap) = d
        .eigenvectors
        .iter()
        .map(|v| v[bare_index] * v[bare_index])
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, w)| {
            if w > best.1 {
                (k, w)
            } else {
                best
            }
        });
    if overlap < threshold {
        return Err(Error::StrongMixing {
            bare_index,
            overlap,
            threshold,
            spectrum: d.eigenvalues.to_vec(),
        });
    }
    Ok(DressedState {
        eigenvalue: d.eigenvalues[k],
        overlap,
    })
}

/// Shift of the uncoupled-photon state in the single-field block
/// [[detuning, G], [G, 0]]: the eigenvalue that tends to 0 as G → 0.
///
/// Uses −2G² / (x + sign(x)·sqrt(x² + 4G²)), which avoids the cancellation in
/// (x − sign(x)·sqrt(x² + 4G²))/2 when G ≪ |x|.
pub fn linear_shift(detuning: f64, coupling: f64) -> f64 {
    if coupling == 0.0 {
        return 0.0;
    }
    if detuning == 0.0 {
        return -coupling.abs();
    }
    let root = detuning.hypot(2.0 * coupling);
    -2.0 * coupling * coupling / (detuning + detuning.signum() * root)
}

pub fn nonlinear_shift(s: &Scenario, overlap_threshold: f64) -> Result<NonlinearShiftResult> {
    let h = build_hamiltonian(s);
    let d = eigensolve_symmetric(&h.matrix)?;
    let dressed = dressed_eigenvalue(&d, BareState::BothPhotons.index(), overlap_threshold)?;
    let c = collective_couplings(&s.couplings, s.collective_atoms);
    let control_linear = linear_shift(s.big_delta, c.g1);
    let signal_linear = linear_shift(s.delta3, c.g3);
    let nonlinear = dressed.eigenvalue - control_linear - signal_linear;
    Ok(NonlinearShiftResult {
        full_shift: dressed.eigenvalue,
        control_linear,
        signal_linear,
        nonlinear,
        dressed_overlap: dressed.overlap,
        phase: -nonlinear * s.interaction_time,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model::xenon_default;
    use crate::perturbation::{e4_shift_per_atom, n1_population, phi_uniform};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn xenon(delta_hz: f64) -> Scenario {
        xenon_default()
            .scenario(2.0 * PI * delta_hz, 2.0 * PI * 10e6)
            .unwrap()
    }

    #[test]
    fn collective_scaling() {
        let c = CouplingSet {
            g1: 1.0,
            g2: 2.0,
            g3: 3.0,
        };
        assert_eq!(collective_couplings(&c, 1.0), c);
        assert_eq!(
            collective_couplings(&c, 4.0),
            CouplingSet {
                g1: 2.0,
                g2: 2.0,
                g3: 6.0
            }
        );
        assert_eq!(
            collective_couplings(&c, 0.0),
            CouplingSet {
                g1: 0.0,
                g2: 2.0,
                g3: 0.0
            }
        );
    }

    #[test]
    fn hamiltonian_structure() {
        let s = xenon(1e9);
        let h = build_hamiltonian(&s).matrix;
        assert_eq!(
            [h[0][0], h[1][1], h[2][2], h[3][3]],
            [s.small_delta, s.delta3, s.big_delta, 0.0]
        );
        let root = s.collective_atoms.sqrt();
        assert_eq!(h[0][2], s.couplings.g2);
        assert_eq!(h[1][3], root * s.couplings.g3);
        assert_eq!(h[2][3], root * s.couplings.g1);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h[i][j], h[j][i]);
                let linked = matches!((i.min(j), i.max(j)), (0, 2) | (1, 3) | (2, 3));
                if i != j && !linked {
                    assert_eq!(h[i][j], 0.0);
                }
            }
        }
        // Δ₃ is dominated by the 823/853 nm splitting
        let split = 2.0 * PI * crate::constants::C * (1.0 / 823e-9 - 1.0 / 853e-9);
        assert!(rel(h[1][1], split) < 1e-3);
        assert!(rel(h[1][1], 8.05e13) < 0.001);
    }

    #[test]
    fn uncoupled_hamiltonian_is_diagonal() {
        let mut s = xenon(1e9);
        s.couplings = CouplingSet::default();
        let h = build_hamiltonian(&s).matrix;
        let mut expected = [[0.0; 4]; 4];
        expected[0][0] = s.small_delta;
        expected[1][1] = s.delta3;
        expected[2][2] = s.big_delta;
        assert_eq!(h, expected);
    }

    #[test]
    fn dressed_examples() {
        let h = [
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 5.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        let d = eigensolve_symmetric(&h).unwrap();
        assert_eq!(
            dressed_eigenvalue(&d, 3, 0.5).unwrap(),
            DressedState {
                eigenvalue: 0.0,
                overlap: 1.0
            }
        );

        // weak mixing: second-order shift −G²/Δ
        let (delta, g) = (1e9, 1e6);
        let d = eigensolve_symmetric(&[[delta, g], [g, 0.0]]).unwrap();
        let r = dressed_eigenvalue(&d, 1, 0.5).unwrap();
        assert!(rel(r.eigenvalue, -g * g / delta) < 1e-5);
        assert!(r.overlap > 1.0 - 1e-5);

        // strong two-level mixing drives the overlap toward 1/2
        let d = eigensolve_symmetric(&[[1.0, 10.0], [10.0, 0.0]]).unwrap();
        let near_half = dressed_eigenvalue(&d, 1, 0.5).unwrap().overlap;
        assert!((0.5..0.53).contains(&near_half));
        assert!(matches!(
            dressed_eigenvalue(&d, 1, 0.6),
            Err(Error::StrongMixing { .. })
        ));
    }

    #[test]
    fn three_level_mixing_raises_error_at_default_threshold() {
        // |4′⟩, |3′⟩ and |1′⟩ all degenerate with g2 = g1/2: the weight of
        // |4′⟩ is 0.4, 0.2 and 0.4 across the three dressed states
        let mut s = xenon(1e9);
        s.couplings = CouplingSet {
            g1: 1e8,
            g2: 5e7,
            g3: 0.0,
        };
        s.collective_atoms = 1.0;
        s.big_delta = 0.0;
        s.small_delta = 0.0;
        let err = nonlinear_shift(&s, 0.5).unwrap_err();
        match err {
            Error::StrongMixing {
                overlap, spectrum, ..
            } => {
                assert!((overlap - 0.4).abs() < 1e-12);
                assert_eq!(spectrum.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn linear_shift_examples() {
        assert_eq!(linear_shift(1e9, 0.0), 0.0);
        assert_eq!(linear_shift(0.0, 3.0), -3.0);
        let v = linear_shift(1e9, 1e7);
        assert!(rel(v, -1e5) < 1e-3, "{v}");
        let exact = (1e9 - (1e18f64 + 4e14).sqrt()) / 2.0;
        assert!(rel(v, exact) < 1e-9);
        // blue detuning pushes the state up
        assert!(linear_shift(-1e9, 1e7) > 0.0);
    }

    #[test]
    fn control_only_problem_has_no_cross_term() {
        let mut s = xenon(1e9);
        s.couplings.g2 = 0.0;
        s.couplings.g3 = 0.0;
        let r = nonlinear_shift(&s, 0.5).unwrap();
        assert!(r.nonlinear.abs() <= 1e-12 * r.full_shift.abs(), "{r:?}");
        assert_eq!(
            r.nonlinear,
            r.full_shift - r.control_linear - r.signal_linear
        );
    }

    #[test]
    fn trace_is_preserved() {
        for delta_hz in [1e6, 1e8, 1e9, 1e10] {
            let h = build_hamiltonian(&xenon(delta_hz)).matrix;
            let d = eigensolve_symmetric(&h).unwrap();
            let trace: f64 = (0..4).map(|i| h[i][i]).sum();
            let sum: f64 = d.eigenvalues.iter().sum();
            assert!(rel(sum, trace) < 1e-12);
        }
    }

    #[test]
    fn frame_shift_invariance() {
        let s = xenon(2e9);
        let h = build_hamiltonian(&s).matrix;
        let base = eigensolve_symmetric(&h).unwrap();
        let shift = 3.3e7;
        let mut shifted = h;
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] += shift;
        }
        let moved = eigensolve_symmetric(&shifted).unwrap();
        for k in 0..4 {
            let expect = base.eigenvalues[k] + shift;
            assert!((moved.eigenvalues[k] - expect).abs() <= 1e-10 * expect.abs().max(h[1][1]));
        }
        // moving every bare level together moves the dressed level and both
        // single-field references alike
        let a = nonlinear_shift(&s, 0.5).unwrap();
        let dressed = dressed_eigenvalue(&moved, 3, 0.5).unwrap().eigenvalue - shift;
        let b = dressed - a.control_linear - a.signal_linear;
        assert!(rel(b, a.nonlinear) < 1e-10 * (a.full_shift / a.nonlinear).abs().max(1.0));
    }

    /// Leading-order shift of the three-state chain |4′⟩–|3′⟩–|1′⟩ with the
    /// collective control light shift folded into the two-photon denominator:
    /// −N g1² g2² / (Δ² (δ + N g1²/Δ)).
    fn stark_renormalized(s: &Scenario) -> f64 {
        let n = s.collective_atoms;
        let (g1, g2) = (s.couplings.g1, s.couplings.g2);
        -n * g1 * g1 * g2 * g2 / (s.big_delta.powi(2) * (s.small_delta + n * g1 * g1 / s.big_delta))
    }

    #[test]
    fn perturbative_limit_agreement() {
        // all small parameters ≪ 1: N g1²/Δ², g2²/δ², N g1²/(Δδ), N g3² δ/(Δ₃ g2²)
        let mut s = xenon(1e9);
        s.couplings = CouplingSet {
            g1: 1e5,
            g2: 1e5,
            g3: 1e5,
        };
        s.collective_atoms = 100.0;
        s.n_eff = 100.0;
        s.big_delta = 1e10;
        s.small_delta = 1e8;
        let r = nonlinear_shift(&s, 0.5).unwrap();
        let pert = s.n_eff
            * e4_shift_per_atom(s.couplings.g1, s.couplings.g2, s.big_delta, s.small_delta)
                .unwrap();
        assert!(rel(-r.nonlinear, pert) < 0.02, "{} vs {pert}", r.nonlinear);
        assert!(rel(r.phase, phi_uniform(&s).unwrap()) < 0.02);
    }

    #[test]
    fn xenon_shift_follows_stark_renormalized_form_without_g3() {
        // default parameters: the control's collective light shift N g1²/Δ is
        // comparable to δ across the GHz range
        for delta_hz in [3e9, 1e10, 3e10, 1e11] {
            let mut s = xenon(delta_hz);
            s.couplings.g3 = 0.0;
            assert!(n1_population(&s).unwrap() < 0.01);
            let r = nonlinear_shift(&s, 0.5).unwrap();
            assert!(
                rel(r.nonlinear, stark_renormalized(&s)) < 0.02,
                "{delta_hz}: {}",
                r.nonlinear
            );
        }
    }

    #[test]
    fn n_scaling_is_linear_in_perturbative_regime() {
        // density reduced so the collective light shifts stay ≪ δ·g2²-scale
        let mut sys = xenon_default();
        sys.medium.density = 1e13;
        let s = sys.scenario(2.0 * PI * 1e10, 2.0 * PI * 10e6).unwrap();
        let mut doubled = s;
        doubled.collective_atoms *= 2.0;
        let a = nonlinear_shift(&s, 0.5).unwrap().nonlinear;
        let b = nonlinear_shift(&doubled, 0.5).unwrap().nonlinear;
        assert!(rel(b, 2.0 * a) < 0.01, "{a} {b}");
    }

    #[test]
    fn g3_cross_term_at_xenon_defaults() {
        // Far-detuned g3 still contributes through the collective light shift
        // N g3²/Δ₃ of |4′⟩. Relative to the g2 channel its weight is about
        // N g3² δ / (Δ₃ g2²) ≈ 0.38 at the defaults, so it is not negligible.
        let s = xenon(1e10);
        let mut no_g3 = s;
        no_g3.couplings.g3 = 0.0;
        let with = nonlinear_shift(&s, 0.5).unwrap().nonlinear;
        let without = nonlinear_shift(&no_g3, 0.5).unwrap().nonlinear;
        assert!(((with - without) / without).abs() > 0.1);

        // at 1/1000 of the density it decouples to well under 0.1 %
        let mut sys = xenon_default();
        sys.medium.density = 1e13;
        let s = sys.scenario(2.0 * PI * 1e10, 2.0 * PI * 10e6).unwrap();
        let mut no_g3 = s;
        no_g3.couplings.g3 = 0.0;
        let with = nonlinear_shift(&s, 0.5).unwrap().nonlinear;
        let without = nonlinear_shift(&no_g3, 0.5).unwrap().nonlinear;
        assert!(((with - without) / without).abs() < 1e-3);
    }
}
