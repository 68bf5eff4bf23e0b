//! Doubled phase-space coordinates for the four polarization modes.
//!
//! A sample lives in `(alpha, beta) ∈ C⁴ × C⁴`. `beta` is an independent
//! variable; it plays the role of `alpha*` inside moments but is never
//! constrained to equal it. The sum/difference coordinates
//! `plus = (alpha + beta*) / 2` and `minus = (alpha - beta*) / 2` are where
//! the Bell-state density factorizes.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const MODES: usize = 4;

pub type ModeVector = [Complex64; MODES];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    Plus,
    Minus,
}

/// One of the four modes. Ordering (and storage index) is
/// `(A,+), (A,-), (B,+), (B,-)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub site: Site,
    pub polarization: Polarization,
}

impl ModeIndex {
    pub const ALL: [ModeIndex; MODES] = [
        ModeIndex::new(Site::A, Polarization::Plus),
        ModeIndex::new(Site::A, Polarization::Minus),
        ModeIndex::new(Site::B, Polarization::Plus),
        ModeIndex::new(Site::B, Polarization::Minus),
    ];

    pub const fn new(site: Site, polarization: Polarization) -> Self {
        ModeIndex { site, polarization }
    }

    pub const fn index(self) -> usize {
        let s = match self.site {
            Site::A => 0,
            Site::B => 2,
        };
        match self.polarization {
            Polarization::Plus => s,
            Polarization::Minus => s + 1,
        }
    }

    pub const fn from_index(i: usize) -> Option<Self> {
        if i < MODES {
            Some(Self::ALL[i])
        } else {
            None
        }
    }

    /// Short label used in column names, e.g. `a_plus`.
    pub fn label(self) -> &'static str {
        match (self.site, self.polarization) {
            (Site::A, Polarization::Plus) => "a_plus",
            (Site::A, Polarization::Minus) => "a_minus",
            (Site::B, Polarization::Plus) => "b_plus",
            (Site::B, Polarization::Minus) => "b_minus",
        }
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.polarization {
            Polarization::Plus => '+',
            Polarization::Minus => '-',
        };
        write!(f, "{:?}{}", self.site, s)
    }
}

impl Site {
    /// Storage indices of the `(+, -)` modes of this site.
    pub const fn modes(self) -> (usize, usize) {
        match self {
            Site::A => (0, 1),
            Site::B => (2, 3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub alpha: ModeVector,
    pub beta: ModeVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SumDiffPoint {
    pub plus: ModeVector,
    pub minus: ModeVector,
}

impl PhasePoint {
    pub fn new(alpha: ModeVector, beta: ModeVector) -> Self {
        PhasePoint { alpha, beta }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha
            .iter()
            .chain(self.beta.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Phase-space photon number `alpha_i * beta_i` of a mode.
    pub fn number(&self, mode: ModeIndex) -> Complex64 {
        let i = mode.index();
        self.alpha[i] * self.beta[i]
    }

    /// The 16 real coordinates: real/imaginary parts of `alpha` in mode
    /// order, then of `beta`.
    pub fn coordinates(&self) -> [f64; 4 * MODES] {
        let mut out = [0.0; 4 * MODES];
        for (i, z) in self.alpha.iter().chain(self.beta.iter()).enumerate() {
            out[2 * i] = z.re;
            out[2 * i + 1] = z.im;
        }
        out
    }

    pub fn to_sum_diff(&self) -> SumDiffPoint {
        to_sum_diff(self)
    }
}

impl SumDiffPoint {
    pub fn new(plus: ModeVector, minus: ModeVector) -> Self {
        SumDiffPoint { plus, minus }
    }

    pub fn is_finite(&self) -> bool {
        self.plus
            .iter()
            .chain(self.minus.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_phase_point(&self) -> PhasePoint {
        from_sum_diff(self)
    }
}

pub fn to_sum_diff(p: &PhasePoint) -> SumDiffPoint {
    let mut s = SumDiffPoint::default();
    for i in 0..MODES {
        let bc = p.beta[i].conj();
        s.plus[i] = (p.alpha[i] + bc) * 0.5;
        s.minus[i] = (p.alpha[i] - bc) * 0.5;
    }
    s
}

pub fn from_sum_diff(s: &SumDiffPoint) -> PhasePoint {
    let mut p = PhasePoint::default();
    for i in 0..MODES {
        p.alpha[i] = s.plus[i] + s.minus[i];
        p.beta[i] = (s.plus[i] - s.minus[i]).conj();
    }
    p
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
