//! Direct sampling of the positive-P density of the N-pair Bell state.
//!
//! In sum/difference coordinates the density is
//!
//! ```text
//! P(plus, minus) = |mu_A · mu_B|^(2N) / (π⁸ (N+1) (N!)²) · exp(-|plus|² - |minus|²)
//! ```
//!
//! where `mu_A`, `mu_B` are the site-A and site-B halves of `plus` and the dot
//! is the unconjugated bilinear product. `minus` is Gaussian. `plus` is drawn
//! by one of two independent algorithms that target the same density:
//!
//! * [`SamplerKind::Exact`] conditions on `mu_A` and rotates `mu_B` into a
//!   basis where the dot product becomes `|mu_A| z`, so every factor is a
//!   gamma radius or a Gaussian.
//! * [`SamplerKind::Rejection`] proposes both halves with gamma radii and
//!   uniform directions and accepts with `|cos ψ|^(2N) ≤ 1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{from_sum_diff, norm_sqr, ModeVector, PhasePoint, SumDiffPoint};
use crate::rng::RandomStream;

pub const MAX_PAIRS: u32 = 8;

/// Number of photon pairs `N`; `N = 1` is the two-photon Bell state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PairNumber(u32);

impl PairNumber {
    pub const ONE: PairNumber = PairNumber(1);

    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_PAIRS).contains(&n) {
            Ok(PairNumber(n))
        } else {
            Err(Error::PairNumber(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `(N+1) (N!)²`, the squared norm of `(a†a† + a†a†)^N |0⟩`.
    pub fn normalization(self) -> f64 {
        let f = factorial(self.0);
        (self.0 as f64 + 1.0) * f * f
    }
}

impl TryFrom<u32> for PairNumber {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        PairNumber::new(n)
    }
}

impl From<PairNumber> for u32 {
    fn from(n: PairNumber) -> u32 {
        n.0
    }
}

impl fmt::Display for PairNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    #[default]
    Exact,
    Rejection,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Exact => "exact",
            SamplerKind::Rejection => "rejection",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_decomposition" => Ok(SamplerKind::Exact),
            "rejection" => Ok(SamplerKind::Rejection),
            other => Err(Error::config(format!("unknown sampler {other:?}"))),
        }
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Unconjugated bilinear product `mu_{A+} mu_{B+} + mu_{A-} mu_{B-}`.
pub fn bilinear(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1]
}

fn halves(plus: &ModeVector) -> ([Complex64; 2], [Complex64; 2]) {
    ([plus[0], plus[1]], [plus[2], plus[3]])
}

fn join(a: [Complex64; 2], b: [Complex64; 2]) -> ModeVector {
    [a[0], a[1], b[0], b[1]]
}

/// Difference coordinates: four independent complex normals, density
/// `exp(-|z|²)/π` each.
pub fn sample_minus(rng: &mut RandomStream) -> ModeVector {
    std::array::from_fn(|_| rng.standard_complex())
}

/// Sum coordinates by exact decomposition.
pub fn sample_plus_exact(rng: &mut RandomStream, n: PairNumber) -> ModeVector {
    let n = n.get();
    // |mu_A| = 0 has probability zero; resample if it ever happens
    let (radius_a, dir_a) = loop {
        let r2 = rng.gamma_int(n + 2);
        if r2 > 0.0 {
            break (r2.sqrt(), rng.unit_c2());
        }
    };
    let mu_a = [dir_a[0] * radius_a, dir_a[1] * radius_a];

    // e* = (p, q) is the direction the dot product projects onto; f = (-q*, p*)
    // spans its complement with Σ e_k f_k = 0.
    let p = dir_a[0].conj();
    let q = dir_a[1].conj();
    let f = [-q.conj(), p.conj()];

    let z = rng.unit_phase() * rng.gamma_int(n + 1).sqrt();
    let w = rng.standard_complex();
    let mu_b = [z * p + w * f[0], z * q + w * f[1]];
    join(mu_a, mu_b)
}

/// One rejection-sampler proposal and its acceptance probability.
pub fn rejection_proposal(rng: &mut RandomStream, n: PairNumber) -> (ModeVector, f64) {
    let n = n.get();
    let ra = rng.gamma_int(n + 2).sqrt();
    let da = rng.unit_c2();
    let rb = rng.gamma_int(n + 2).sqrt();
    let db = rng.unit_c2();
    // |e_A · e_B| ≤ 1 by Cauchy-Schwarz
    let cos2 = bilinear(&da, &db).norm_sqr().min(1.0);
    let accept = cos2.powi(n as i32);
    let mu_a = [da[0] * ra, da[1] * ra];
    let mu_b = [db[0] * rb, db[1] * rb];
    (join(mu_a, mu_b), accept)
}

/// Sum coordinates by von Neumann rejection. Returns the sample and the
/// number of proposals consumed.
pub fn sample_plus_rejection_counted(rng: &mut RandomStream, n: PairNumber) -> (ModeVector, u64) {
    let mut trials = 0u64;
    loop {
        trials += 1;
        let (plus, accept) = rejection_proposal(rng, n);
        if rng.uniform() < accept {
            return (plus, trials);
        }
    }
}

pub fn sample_plus_rejection(rng: &mut RandomStream, n: PairNumber) -> ModeVector {
    sample_plus_rejection_counted(rng, n).0
}

pub fn sample_plus(rng: &mut RandomStream, n: PairNumber, kind: SamplerKind) -> ModeVector {
    match kind {
        SamplerKind::Exact => sample_plus_exact(rng, n),
        SamplerKind::Rejection => sample_plus_rejection(rng, n),
    }
}

/// One unweighted sample of the Bell-state positive-P distribution.
pub fn sample_bell(rng: &mut RandomStream, n: PairNumber, kind: SamplerKind) -> PhasePoint {
    let plus = sample_plus(rng, n, kind);
    let minus = sample_minus(rng);
    from_sum_diff(&SumDiffPoint { plus, minus })
}

/// Normalized density in sum/difference coordinates.
pub fn bell_density(s: &SumDiffPoint, n: PairNumber) -> f64 {
    let (a, b) = halves(&s.plus);
    let dot2 = bilinear(&a, &b).norm_sqr();
    let pi8 = PI.powi(8);
    dot2.powi(n.get() as i32) / (pi8 * n.normalization())
        * (-norm_sqr(&s.plus) - norm_sqr(&s.minus)).exp()
}

/// Normalized density of the rejection proposal: gamma radii with uniform
/// directions on each site, Gaussian difference coordinates.
pub fn proposal_density(s: &SumDiffPoint, n: PairNumber) -> f64 {
    let n = n.get();
    // ∫_{R⁴} r^{2N} e^{-r²} = π² (N+1)!
    let z = PI * PI * factorial(n + 1);
    let (a, b) = halves(&s.plus);
    let site = |v: &[Complex64; 2]| {
        let r2 = norm_sqr(v);
        r2.powi(n as i32) * (-r2).exp() / z
    };
    site(&a) * site(&b) * (-norm_sqr(&s.minus)).exp() / PI.powi(4)
}
