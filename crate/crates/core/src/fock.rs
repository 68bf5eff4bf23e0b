//! Exact Fock-basis oracle for the N-pair Bell state.
//!
//! The state `(a†_{A+} a†_{B+} + a†_{A-} a†_{B-})^N |0⟩` is built by applying
//! creation operators, so its support and normalization come out of the
//! operator algebra rather than a closed form. Everything here is sampler
//! independent.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::phase::{norm_sqr, ModeIndex, PhasePoint, Site, MODES};
use crate::sampler::{factorial, PairNumber};

/// Photon numbers per mode, in `ModeIndex` order.
pub type FockOccupation = [u32; MODES];

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    pub amplitudes: BTreeMap<FockOccupation, Complex64>,
    pub cutoff: u32,
}

impl TruncatedState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for a in self.amplitudes.values_mut() {
            *a /= n;
        }
        self
    }

    /// Amplitude of an occupation, zero outside the support.
    pub fn amplitude(&self, occ: &FockOccupation) -> Complex64 {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    /// Re-express the state in the polarization basis of `site` rotated by
    /// `theta`: the new `+`/`-` modes are `cos θ a₊ + sin θ a₋` and
    /// `-sin θ a₊ + cos θ a₋`.
    pub fn rotate_site(&self, site: Site, theta: f64) -> TruncatedState {
        let (ip, im) = site.modes();
        let (s, c) = theta.sin_cos();
        let mut out: BTreeMap<FockOccupation, Complex64> = BTreeMap::new();
        for (occ, &amp) in &self.amplitudes {
            let (np, nm) = (occ[ip], occ[im]);
            let total = np + nm;
            let pre = amp / (factorial(np) * factorial(nm)).sqrt();
            // a₊† = c P† - s Q†,  a₋† = s P† + c Q†
            for i in 0..=np {
                let ti = binomial(np, i) * c.powi(i as i32) * (-s).powi((np - i) as i32);
                for j in 0..=nm {
                    let tj = binomial(nm, j) * s.powi(j as i32) * c.powi((nm - j) as i32);
                    let k = i + j;
                    let weight = ti * tj * (factorial(k) * factorial(total - k)).sqrt();
                    let mut target = *occ;
                    target[ip] = k;
                    target[im] = total - k;
                    *out.entry(target).or_default() += pre * weight;
                }
            }
        }
        out.retain(|_, a| a.norm_sqr() > 0.0);
        TruncatedState {
            amplitudes: out,
            cutoff: self.cutoff,
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn create(state: &BTreeMap<FockOccupation, Complex64>, mode: usize) -> BTreeMap<FockOccupation, Complex64> {
    let mut out = BTreeMap::new();
    for (occ, &amp) in state {
        let mut next = *occ;
        next[mode] += 1;
        *out.entry(next).or_default() += amp * f64::from(next[mode]).sqrt();
    }
    out
}

/// `(a†_{A+} a†_{B+} + a†_{A-} a†_{B-})^N |0⟩` without normalization.
pub fn unnormalized_bell_state(n: PairNumber) -> TruncatedState {
    let mut state = BTreeMap::from([([0u32; MODES], Complex64::new(1.0, 0.0))]);
    for _ in 0..n.get() {
        let plus = create(&create(&state, 2), 0);
        let minus = create(&create(&state, 3), 1);
        state = plus;
        for (occ, amp) in minus {
            *state.entry(occ).or_default() += amp;
        }
    }
    TruncatedState {
        amplitudes: state,
        cutoff: n.get(),
    }
}

pub fn build_bell_state(n: PairNumber) -> TruncatedState {
    unnormalized_bell_state(n).normalized()
}

pub fn exact_mean_number(state: &TruncatedState, mode: ModeIndex) -> f64 {
    let i = mode.index();
    state
        .amplitudes
        .iter()
        .map(|(occ, a)| f64::from(occ[i]) * a.norm_sqr())
        .sum()
}

fn spin_eigen(occ: &FockOccupation, site: Site) -> f64 {
    let (p, m) = site.modes();
    f64::from(occ[p]) - f64::from(occ[m])
}

/// `⟨n_∥ - n_⊥⟩` at one site for a polarizer at `theta`.
pub fn exact_spin(state: &TruncatedState, site: Site, theta: f64) -> f64 {
    let rotated = state.rotate_site(site, theta);
    rotated
        .amplitudes
        .iter()
        .map(|(occ, a)| spin_eigen(occ, site) * a.norm_sqr())
        .sum()
}

/// `⟨(n_{A∥} - n_{A⊥})(n_{B∥} - n_{B⊥})⟩` with polarizers at `theta_a`, `theta_b`.
pub fn exact_correlation(state: &TruncatedState, theta_a: f64, theta_b: f64) -> f64 {
    let rotated = state
        .rotate_site(Site::A, theta_a)
        .rotate_site(Site::B, theta_b);
    rotated
        .amplitudes
        .iter()
        .map(|(occ, a)| spin_eigen(occ, Site::A) * spin_eigen(occ, Site::B) * a.norm_sqr())
        .sum()
}

/// Coherent-state overlap `⟨mu|Ψ⟩`.
pub fn coherent_overlap(state: &TruncatedState, mu: &[Complex64; MODES]) -> Complex64 {
    let sum: Complex64 = state
        .amplitudes
        .iter()
        .map(|(occ, &a)| {
            let mut term = a;
            for k in 0..MODES {
                term *= mu[k].conj().powu(occ[k]) / factorial(occ[k]).sqrt();
            }
            term
        })
        .sum();
    sum * (-0.5 * norm_sqr(mu)).exp()
}

/// Canonical positive-P function of a pure state, evaluated in `(alpha, beta)`
/// coordinates:
///
/// ```text
/// P = (2π)^(-2M) exp(-|alpha - beta*|²/4) |⟨mu|Ψ⟩|²,   mu = (alpha + beta*)/2
/// ```
pub fn canonical_p(state: &TruncatedState, p: &PhasePoint) -> f64 {
    let mut mu = [Complex64::default(); MODES];
    let mut gap = 0.0;
    for ((m, a), b) in mu.iter_mut().zip(&p.alpha).zip(&p.beta) {
        *m = (a + b.conj()) * 0.5;
        gap += (a - b.conj()).norm_sqr();
    }
    let overlap = coherent_overlap(state, &mu).norm_sqr();
    (2.0 * PI).powi(-2 * MODES as i32) * (-gap / 4.0).exp() * overlap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::to_sum_diff;
    use crate::rng::RandomStream;
    use crate::sampler::bell_density;

    fn pairs(n: u32) -> PairNumber {
        PairNumber::new(n).unwrap()
    }

    #[test]
    fn one_pair_is_the_bell_state() {
        let s = build_bell_state(PairNumber::ONE);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(s.amplitudes.len(), 2);
        assert!((s.amplitude(&[1, 0, 1, 0]).re - h).abs() < 1e-15);
        assert!((s.amplitude(&[0, 1, 0, 1]).re - h).abs() < 1e-15);
    }

    #[test]
    fn two_pairs_support() {
        let s = build_bell_state(pairs(2));
        let a = 1.0 / 3f64.sqrt();
        for occ in [[2, 0, 2, 0], [1, 1, 1, 1], [0, 2, 0, 2]] {
            assert!((s.amplitude(&occ).re - a).abs() < 1e-15, "{occ:?}");
        }
        assert_eq!(s.amplitudes.len(), 3);
    }

    #[test]
    fn unnormalized_norm_matches_density_constant() {
        for n in 1..=4 {
            let n = pairs(n);
            let got = unnormalized_bell_state(n).norm_sqr();
            assert!((got - n.normalization()).abs() < 1e-9 * got, "N={n}");
        }
    }

    #[test]
    fn states_are_normalized_with_exact_support() {
        for n in 1..=8 {
            let s = build_bell_state(pairs(n));
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert_eq!(s.amplitudes.len(), n as usize + 1);
            for occ in s.amplitudes.keys() {
                assert_eq!(occ[0], occ[2]);
                assert_eq!(occ[0] + occ[1], n);
                assert!(occ.iter().all(|&c| c <= s.cutoff));
            }
        }
    }

    #[test]
    fn mean_numbers() {
        for (n, expected) in [(1, 0.5), (2, 1.0)] {
            let s = build_bell_state(pairs(n));
            for m in ModeIndex::ALL {
                assert!((exact_mean_number(&s, m) - expected).abs() < 1e-14);
            }
            let site_a = exact_mean_number(&s, ModeIndex::ALL[0]) + exact_mean_number(&s, ModeIndex::ALL[1]);
            assert!((site_a - n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_preserves_norm_and_site_totals() {
        let s = build_bell_state(pairs(3));
        let r = s.rotate_site(Site::A, 0.37).rotate_site(Site::B, -1.1);
        assert!((r.norm_sqr() - 1.0).abs() < 1e-12);
        for occ in r.amplitudes.keys() {
            assert_eq!(occ[0] + occ[1], 3);
            assert_eq!(occ[2] + occ[3], 3);
        }
    }

    #[test]
    fn quarter_turn_swaps_modes() {
        let s = build_bell_state(PairNumber::ONE);
        let r = s.rotate_site(Site::A, std::f64::consts::FRAC_PI_2);
        // a_par = a₋, a_perp = -a₊
        assert!((r.amplitude(&[0, 1, 1, 0]).re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((r.amplitude(&[1, 0, 0, 1]).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn correlation_special_angles() {
        let s = build_bell_state(PairNumber::ONE);
        let pi = std::f64::consts::PI;
        assert!((exact_correlation(&s, 0.3, 0.3) - 1.0).abs() < 1e-12);
        assert!(exact_correlation(&s, pi / 4.0, 0.0).abs() < 1e-12);
        assert!((exact_correlation(&s, 0.1 + pi / 8.0, 0.1) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn one_pair_correlation_is_cos_two_delta() {
        let s = build_bell_state(PairNumber::ONE);
        let mut rng = RandomStream::new(99, 0);
        for _ in 0..20 {
            let ta = (rng.uniform() - 0.5) * 6.0;
            let tb = (rng.uniform() - 0.5) * 6.0;
            let exact = exact_correlation(&s, ta, tb);
            assert!((exact - (2.0 * (ta - tb)).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_depends_only_on_relative_angle() {
        let mut rng = RandomStream::new(100, 0);
        for n in 1..=3 {
            let s = build_bell_state(pairs(n));
            for _ in 0..20 {
                let ta = (rng.uniform() - 0.5) * 6.0;
                let tb = (rng.uniform() - 0.5) * 6.0;
                let shift = (rng.uniform() - 0.5) * 6.0;
                let a = exact_correlation(&s, ta, tb);
                let b = exact_correlation(&s, ta + shift, tb + shift);
                assert!((a - b).abs() < 1e-10, "N={n}");
            }
        }
    }

    #[test]
    fn single_site_spin_vanishes() {
        let s = build_bell_state(pairs(2));
        for theta in [0.0, 0.4, 1.3] {
            assert!(exact_spin(&s, Site::A, theta).abs() < 1e-12);
            assert!(exact_spin(&s, Site::B, theta).abs() < 1e-12);
        }
    }

    fn random_point(rng: &mut RandomStream, scale: f64) -> PhasePoint {
        let mut p = PhasePoint::default();
        for k in 0..MODES {
            p.alpha[k] = rng.standard_complex() * scale;
            p.beta[k] = rng.standard_complex() * scale;
        }
        p
    }

    #[test]
    fn vanishes_where_sum_coordinate_is_zero() {
        let s = build_bell_state(PairNumber::ONE);
        let mut rng = RandomStream::new(4, 0);
        let mut p = random_point(&mut rng, 1.0);
        for k in 0..MODES {
            p.beta[k] = -p.alpha[k].conj();
        }
        assert_eq!(canonical_p(&s, &p), 0.0);
    }

    #[test]
    fn canonical_construction_matches_closed_form_density() {
        let mut rng = RandomStream::new(8, 0);
        for n in 1..=3 {
            let n = pairs(n);
            let s = build_bell_state(n);
            for _ in 0..100 {
                let p = random_point(&mut rng, 1.5);
                let lhs = 256.0 * canonical_p(&s, &p);
                let rhs = bell_density(&to_sum_diff(&p), n);
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "N={n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn canonical_construction_is_nonnegative() {
        let s = build_bell_state(PairNumber::ONE);
        let mut rng = RandomStream::new(12, 0);
        for _ in 0..1_000_000 {
            let p = random_point(&mut rng, 2.0);
            assert!(canonical_p(&s, &p) >= 0.0);
        }
    }
}
