//! CODATA 2018 physical constants in SI units.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Vacuum permittivity, F/m.
    pub epsilon0: f64,
    /// Speed of light in vacuum, m/s.
    pub c: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    hbar: 1.054571817e-34,
    epsilon0: 8.8541878128e-12,
    c: 2.99792458e8,
};

pub const HBAR: f64 = CODATA.hbar;
pub const EPSILON0: f64 = CODATA.epsilon0;
pub const C: f64 = CODATA.c;
