//! Self-checks run by `xpm validate`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::diagonalization::{build_hamiltonian, linear_shift, nonlinear_shift};
use crate::eigen::{eigensolve_symmetric, frobenius};
use crate::model::CavitySystem;
use crate::oracle;
use crate::perturbation::{gaussian_mode_factor, phi_uniform, Scenario};

/// Relative eigenvalue agreement required against the Sturm oracle.
pub const EIGEN_TOLERANCE: f64 = 1e-10;
/// Relative agreement required in the perturbative limit.
pub const LIMIT_TOLERANCE: f64 = 0.02;
const SCALING_TOLERANCE: f64 = 1e-12;
const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every check against the configured model. A configuration that
/// cannot be turned into a model fails the dataset check and skips the rest.
pub fn run_checks(config: &Config) -> ValidationReport {
    let problems = config.medium_data().check();
    let mut checks = vec![CheckResult::new(
        "dataset_integrity",
        problems.is_empty(),
        if problems.is_empty() {
            "all line data in range".to_string()
        } else {
            problems.join("; ")
        },
    )];
    let system = match config.system() {
        Ok(s) => s,
        Err(e) => {
            if problems.is_empty() {
                checks.push(CheckResult::new("model", false, e.to_string()));
            }
            return ValidationReport { checks };
        }
    };
    let small = 2.0 * PI * config.small_delta_mhz * 1e6;
    checks.push(eigensolver_vs_sturm(&system, small));
    checks.push(two_level_closed_form());
    checks.push(scaling_laws(&system, small));
    checks.push(gaussian_ratio(&system, config));
    checks.push(perturbative_limit(&system, small));
    ValidationReport { checks }
}

/// Largest |λ_jacobi − λ_sturm| / max(|λ_sturm|, ‖H‖_F) over the spectrum.
pub fn spectrum_error<const N: usize>(h: &[[f64; N]; N]) -> Result<f64, String> {
    let jacobi = eigensolve_symmetric(h)
        .map_err(|e| e.to_string())?
        .eigenvalues;
    let sturm = oracle::symmetric_eigenvalues(h);
    let norm = frobenius(h);
    Ok(jacobi
        .iter()
        .zip(&sturm)
        .map(|(a, b)| {
            let scale = b.abs().max(norm);
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max))
}

fn random_symmetric<R: Rng>(rng: &mut R) -> [[f64; 4]; 4] {
    let mut h = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let magnitude = 10f64.powf(rng.gen_range(-3.0..14.0));
            let v = if rng.gen_bool(0.2) {
                0.0
            } else {
                magnitude * rng.gen_range(-1.0..1.0)
            };
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    h
}

fn eigensolver_vs_sturm(system: &CavitySystem, small: f64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut matrices: Vec<[[f64; 4]; 4]> = (0..200).map(|_| random_symmetric(&mut rng)).collect();
    if let Ok(d) = system.derive() {
        for hz in [1e6, 1e7, 1e8, 1e9, 1e10] {
            matrices
                .push(build_hamiltonian(&system.scenario_from(&d, 2.0 * PI * hz, small)).matrix);
        }
    }
    let mut worst = 0.0f64;
    for h in &matrices {
        match spectrum_error(h) {
            Ok(e) => worst = worst.max(e),
            Err(e) => return CheckResult::new("eigensolver_vs_sturm", false, e),
        }
    }
    CheckResult::new(
        "eigensolver_vs_sturm",
        worst <= EIGEN_TOLERANCE,
        format!(
            "{} matrices, worst relative error {worst:.2e} (limit {EIGEN_TOLERANCE:e})",
            matrices.len()
        ),
    )
}

fn two_level_closed_form() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let x = 10f64.powf(rng.gen_range(3.0..14.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let g = 10f64.powf(rng.gen_range(0.0..12.0));
        let expected = linear_shift(x, g);
        let h = [[x, g], [g, 0.0]];
        let d = match eigensolve_symmetric(&h) {
            Ok(d) => d,
            Err(e) => return CheckResult::new("two_level_closed_form", false, e.to_string()),
        };
        // the eigenvalue continuously connected to 0 has sign opposite to x
        let jacobi = if x > 0.0 {
            d.eigenvalues[0]
        } else {
            d.eigenvalues[1]
        };
        let (lo, hi) = oracle::two_by_two(x, g, 0.0);
        let closed = if x > 0.0 { lo } else { hi };
        let scale = expected.abs().max(1e-15 * frobenius(&h));
        worst = worst.max((jacobi - expected).abs() / scale);
        worst = worst
            .max(((closed - expected).abs() - 4.0 * f64::EPSILON * frobenius(&h)).max(0.0) / scale);
    }
    CheckResult::new(
        "two_level_closed_form",
        worst <= 1e-12,
        format!("500 blocks, worst relative error {worst:.2e}"),
    )
}

fn scaling_laws(system: &CavitySystem, small: f64) -> CheckResult {
    let name = "perturbative_scaling_laws";
    let base = match system.scenario(2.0 * PI * 1e9, small) {
        Ok(s) => s,
        Err(e) => return CheckResult::new(name, false, e.to_string()),
    };
    let phi = |s: &Scenario| phi_uniform(s).unwrap_or(f64::NAN);
    let p0 = phi(&base);
    let k = 2.0;
    type Tweak = fn(&mut Scenario, f64);
    let laws: [(&str, Tweak, f64); 6] = [
        ("N", |s, k| s.n_eff *= k, k),
        ("t", |s, k| s.interaction_time *= k, k),
        ("g1", |s, k| s.couplings.g1 *= k, k * k),
        ("g2", |s, k| s.couplings.g2 *= k, k * k),
        ("Delta", |s, k| s.big_delta *= k, 1.0 / (k * k)),
        ("delta", |s, k| s.small_delta *= k, 1.0 / k),
    ];
    let mut failed = Vec::new();
    for (label, tweak, factor) in laws {
        let mut s = base;
        tweak(&mut s, k);
        let err = ((phi(&s) - factor * p0) / (factor * p0)).abs();
        if !(err <= SCALING_TOLERANCE) {
            failed.push(format!("{label}: {err:.2e}"));
        }
    }
    CheckResult::new(
        name,
        failed.is_empty(),
        if failed.is_empty() {
            "N, t, g1, g2, Delta, delta exponents hold".into()
        } else {
            failed.join(", ")
        },
    )
}

fn gaussian_ratio(system: &CavitySystem, config: &Config) -> CheckResult {
    let name = "gaussian_vs_cylinder";
    let mode = match system.derive() {
        Ok(d) => d.mode,
        Err(e) => return CheckResult::new(name, false, e.to_string()),
    };
    match gaussian_mode_factor(&mode, &config.quadrature()) {
        Ok(f) => {
            let zr = mode.rayleigh_range;
            let analytic = 2.0 * zr * (mode.length / (2.0 * zr)).atan() / mode.length;
            let err = ((f - analytic) / analytic).abs();
            CheckResult::new(
                name,
                (0.95..=1.0).contains(&f) && err <= 10.0 * config.quadrature_tolerance,
                format!("ratio {f:.6} (closed form {analytic:.6}, relative difference {err:.1e})"),
            )
        }
        Err(e) => CheckResult::new(name, false, e.to_string()),
    }
}

/// Builds a single-atom scenario deep in the perturbative regime from the
/// configured couplings and compares the two methods there.
fn perturbative_limit(system: &CavitySystem, small: f64) -> CheckResult {
    let name = "perturbative_limit";
    let d = match system.derive() {
        Ok(d) => d,
        Err(e) => return CheckResult::new(name, false, e.to_string()),
    };
    let c = d.couplings;
    let big = 100.0 * c.g1.max(c.g2).max(small.abs());
    let mut s = system.scenario_from(&d, big, small);
    s.n_eff = 1.0;
    s.population_atoms = 1.0;
    s.collective_atoms = 1.0;
    let pert = phi_uniform(&s);
    let diag = nonlinear_shift(&s, system.options.overlap_threshold);
    match (pert, diag) {
        (Ok(p), Ok(r)) => {
            let err = ((r.phase - p) / p).abs();
            CheckResult::new(
                name,
                err <= LIMIT_TOLERANCE,
                format!(
                    "Delta/2pi = {:.3e} Hz, N = 1: relative difference {err:.2e}",
                    big / (2.0 * PI)
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => CheckResult::new(name, false, e.to_string()),
    }
}
