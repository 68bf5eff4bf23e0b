//! Statistical checks of the sampled estimators against exact values.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

use num_complex::Complex64;
use ppbell::fock::{build_bell_state, exact_correlation, exact_mean_number};
use ppbell::phase::{ModeIndex, Site};
use ppbell::prelude::*;
use ppbell::sim::estimate_many;

fn pool() -> rayon::ThreadPool {
    thread_pool(ppbell::cli::default_workers()).unwrap()
}

fn source(seed: u64, n: u32) -> SampleSource {
    SampleSource::new(seed, PairNumber::new(n).unwrap(), SamplerKind::Exact)
}

#[test]
fn mode_numbers_and_site_totals() {
    let pool = pool();
    for (n, seed) in [(1, 100), (2, 101)] {
        let state = build_bell_state(PairNumber::new(n).unwrap());
        let est = estimate_many(&pool, &source(seed, n), 1_000_000, |p| {
            let m = ModeIndex::ALL.map(|m| p.number(m));
            [m[0], m[1], m[2], m[3], m[0] + m[1]]
        });
        for (m, e) in ModeIndex::ALL.iter().zip(&est) {
            let exact = exact_mean_number(&state, *m);
            assert!(e.z_real(exact) <= 3.0, "N={n} {m}: {e:?}");
            assert!(e.z_imag() <= 3.0, "N={n} {m}: {e:?}");
        }
        assert!(est[4].z_real(n as f64) <= 3.0, "site A total: {:?}", est[4]);
    }
}

#[test]
fn spin_means_vanish_and_samples_leave_bounds() {
    let pool = pool();
    for (k, theta) in [0.0, 0.4, 1.1].into_iter().enumerate() {
        let src = source(200 + k as u64, 1);
        let [sa, sb, out] = estimate_many(&pool, &src, 500_000, |p| {
            let a = spin_variable(p, Site::A, theta);
            let b = spin_variable(p, Site::B, theta);
            let outside = if a.re.abs() > 1.0 { 1.0 } else { 0.0 };
            [a, b, Complex64::new(outside, 0.0)]
        });
        assert!(sa.z_real(0.0) <= 3.0, "{sa:?}");
        assert!(sb.z_real(0.0) <= 3.0, "{sb:?}");
        assert!(out.mean.re > 0.0);
    }
}

#[test]
fn chsh_reference_angles() {
    let pool = pool();
    let cases = [(0.0, 0.0, 1_000_000), (FRAC_PI_8, SQRT_2 - 1.0, 2_000_000), (FRAC_PI_4, -1.0, 1_000_000)];
    for (k, (theta, expected, n)) in cases.into_iter().enumerate() {
        let e = estimate(&pool, &source(300 + k as u64, 1), n, |p| {
            chsh_sample(p, theta, AngleConvention::Symmetric)
        });
        assert!((theoretical_delta(theta) - expected).abs() < 1e-15);
        assert!(e.z_real(expected) <= 3.0, "θ={theta}: {e:?}");
        assert!(e.z_imag() <= 3.0);
    }
}

#[test]
fn correlations_match_oracle_for_one_and_two_pairs() {
    let pool = pool();
    let mut angles = RandomStream::new(400, 0);
    for n in [1, 2] {
        let state = build_bell_state(PairNumber::new(n).unwrap());
        for k in 0..4 {
            let (ta, tb) = (PI * angles.uniform(), PI * angles.uniform());
            let exact = exact_correlation(&state, ta, tb);
            let e = estimate(&pool, &source(410 + 10 * n as u64 + k, n), 500_000, |p| {
                spin_variable(p, Site::A, ta) * spin_variable(p, Site::B, tb)
            });
            assert!(e.z_real(exact) <= 3.0, "N={n} ({ta}, {tb}) exact {exact}: {e:?}");
        }
    }
}

#[test]
fn samplers_agree_for_several_pair_numbers() {
    let pool = pool();
    for n in [1, 2, 4] {
        let n = PairNumber::new(n).unwrap();
        let moments = |kind: SamplerKind, seed: u64| {
            let src = SampleSource::new(seed, n, kind);
            estimate_many::<32, _>(&pool, &src, 100_000, |p| {
                let x = p.coordinates();
                std::array::from_fn(|k| Complex64::new(if k < 16 { x[k] } else { x[k - 16].powi(2) }, 0.0))
            })
        };
        let a = moments(SamplerKind::Exact, 500);
        let b = moments(SamplerKind::Rejection, 501);
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            let z = (x.mean.re - y.mean.re).abs() / x.stderr_re().hypot(y.stderr_re());
            assert!(z <= 4.0, "N={n} moment {k}: {x:?} vs {y:?}");
        }
    }
}

#[test]
fn streams_do_not_depend_on_scheduling() {
    let src = source(7, 1);
    let serial: Vec<_> = (0..64).map(|i| src.sample(i)).collect();
    let reversed: Vec<_> = (0..64).rev().map(|i| src.sample(i)).collect();
    assert!(serial.iter().eq(reversed.iter().rev()));
    let one = chsh_point(&thread_pool(1).unwrap(), &src, 0.3, 30_000);
    let many = chsh_point(&thread_pool(3).unwrap(), &src, 0.3, 30_000);
    assert_eq!(one, many);
}
