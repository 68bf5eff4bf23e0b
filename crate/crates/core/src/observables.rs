//! Polarizer rotations and the phase-space variables built from them.
//!
//! Every observable here is a complex per-sample quantity whose ensemble mean
//! equals the corresponding quantum expectation value. Individual samples are
//! not eigenvalues and routinely fall outside `[-1, 1]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::phase::{PhasePoint, Site};
use crate::stats::CorrelationEstimate;

/// Polarizer angle in radians. Physical settings repeat with period π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizerSetting(pub f64);

impl PolarizerSetting {
    /// Angle reduced to `[0, π)`.
    pub fn reduced(self) -> f64 {
        self.0.rem_euclid(PI)
    }
}

/// Site amplitudes in a rotated polarization basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedSite {
    pub a_par: Complex64,
    pub b_par: Complex64,
    pub a_perp: Complex64,
    pub b_perp: Complex64,
}

pub fn rotate_site(p: &PhasePoint, site: Site, theta: f64) -> RotatedSite {
    let (ip, im) = site.modes();
    let (s, c) = theta.sin_cos();
    RotatedSite {
        a_par: p.alpha[ip] * c + p.alpha[im] * s,
        b_par: p.beta[ip] * c + p.beta[im] * s,
        a_perp: p.alpha[im] * c - p.alpha[ip] * s,
        b_perp: p.beta[im] * c - p.beta[ip] * s,
    }
}

#[inline]
pub fn photon_number(a: Complex64, b: Complex64) -> Complex64 {
    a * b
}

/// Schwinger spin variable `n_∥ - n_⊥` at one site.
pub fn spin_variable(p: &PhasePoint, site: Site, theta: f64) -> Complex64 {
    let r = rotate_site(p, site, theta);
    photon_number(r.a_par, r.b_par) - photon_number(r.a_perp, r.b_perp)
}

/// The four analyzer angles of one CHSH measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

/// How the analyzer angles follow the relative angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AngleConvention {
    /// `A = 0`, `A' = 2θ`, `B = θ`, `B' = -θ`. With `E(x, y) = cos 2(x - y)`
    /// the three positive CHSH terms equal `cos 2θ` and the negative one
    /// `cos 6θ`.
    #[default]
    Symmetric,
}

impl AngleConvention {
    pub fn angles(self, theta: f64) -> AnalyzerAngles {
        match self {
            AngleConvention::Symmetric => AnalyzerAngles {
                a: 0.0,
                a_prime: 2.0 * theta,
                b: theta,
                b_prime: -theta,
            },
        }
    }
}

/// The four spin products `(AB, A'B, AB', A'B')` of one sample.
pub fn chsh_products(p: &PhasePoint, conv: &AnalyzerAngles) -> [Complex64; 4] {
    let a = spin_variable(p, Site::A, conv.a);
    let ap = spin_variable(p, Site::A, conv.a_prime);
    let b = spin_variable(p, Site::B, conv.b);
    let bp = spin_variable(p, Site::B, conv.b_prime);
    [a * b, ap * b, a * bp, ap * bp]
}

/// Combine the four products into the per-sample CHSH deviation
/// `δ = (AB + A'B + AB' - A'B')/2 - 1`.
pub fn chsh_combine(products: &[Complex64; 4]) -> Complex64 {
    (products[0] + products[1] + products[2] - products[3]) * 0.5 - 1.0
}

pub fn chsh_sample(p: &PhasePoint, theta: f64, conv: AngleConvention) -> Complex64 {
    chsh_combine(&chsh_products(p, &conv.angles(theta)))
}

/// Quantum prediction for `Δ(θ)` under [`AngleConvention::Symmetric`].
pub fn theoretical_delta(theta: f64) -> f64 {
    0.5 * (3.0 * (2.0 * theta).cos() - (6.0 * theta).cos()) - 1.0
}

/// One row of a CHSH sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshCurvePoint {
    pub theta: f64,
    pub delta: CorrelationEstimate,
    pub delta_theory: f64,
    /// `AB, A'B, AB', A'B'`
    pub correlations: [CorrelationEstimate; 4],
    /// `⟨n_i⟩` per mode, from the same samples.
    pub numbers: [CorrelationEstimate; 4],
}

impl ChshCurvePoint {
    pub fn delta_mean(&self) -> f64 {
        self.delta.mean.re
    }

    pub fn delta_stderr(&self) -> f64 {
        self.delta.stderr_re()
    }

    pub fn delta_imag_mean(&self) -> f64 {
        self.delta.mean.im
    }
}
