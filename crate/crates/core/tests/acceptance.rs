//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI, SQRT_2};
use std::process::ExitCode;

use ppbell::cli::{self, Format, HistConfig, RunConfig};
use ppbell::fock::{build_bell_state, canonical_p, exact_correlation};
use ppbell::phase::{to_sum_diff, ModeIndex, PhasePoint, Site, MODES};
use ppbell::prelude::*;
use ppbell::rng::derive_seed;
use ppbell::sampler::rejection_proposal;
use ppbell::sim::{chunked_fold, estimate_many, theta_grid};
use num_complex::Complex64;

const SEED: u64 = 20_240_917;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// NaN scores count as failures.
fn within(z: f64, limit: f64) -> bool {
    z <= limit
}

fn pool() -> rayon::ThreadPool {
    thread_pool(cli::default_workers()).unwrap()
}

fn pairs(n: u32) -> PairNumber {
    PairNumber::new(n).unwrap()
}

/// Criterion 1: Δ(π/8) with 2×10⁶ samples: within 3σ of √2−1 and above 0 by ≥ 5σ.
fn bell_violation() -> Outcome {
    let src = SampleSource::new(SEED, PairNumber::ONE, SamplerKind::Exact);
    let p = chsh_point(&pool(), &src, FRAC_PI_8, 2_000_000);
    let (m, se) = (p.delta_mean(), p.delta_stderr());
    let target = SQRT_2 - 1.0;
    let z_theory = (m - target).abs() / se;
    let z_zero = m / se;
    outcome(
        z_theory <= 3.0 && z_zero >= 5.0,
        format!("Δ(π/8) = {m:.6} ± {se:.6}; |Δ-(√2-1)|/σ = {z_theory:.2}; Δ/σ = {z_zero:.1}"),
    )
}

/// Criteria 2 and 7: The 25-point sweep on [0, π/2] with 10⁶ samples per point.
fn curve_and_realness() -> (Outcome, Outcome) {
    let grid = theta_grid(0.0, FRAC_PI_2, 25).unwrap();
    let src = SampleSource::new(derive_seed(SEED, 2), PairNumber::ONE, SamplerKind::Exact);
    let points = chsh_sweep(&pool(), &src, &grid, 1_000_000);

    let inside = points
        .iter()
        .filter(|p| (p.delta_mean() - theoretical_delta(p.theta)).abs() <= 3.0 * p.delta_stderr())
        .count();
    let worst = points
        .iter()
        .map(|p| (p.delta_mean() - theoretical_delta(p.theta)).abs() / p.delta_stderr())
        .fold(0.0, f64::max);
    let curve = outcome(inside >= 24, format!("{inside}/25 points within 3σ (max z = {worst:.2})"));

    let mut bad = Vec::new();
    let mut max_z: f64 = 0.0;
    for p in &points {
        let zs = std::iter::once(("delta", p.delta.z_imag()))
            .chain(ModeIndex::ALL.iter().zip(&p.numbers).map(|(m, e)| (m.label(), e.z_imag())));
        for (name, z) in zs {
            max_z = max_z.max(z);
            if !within(z, 3.0) {
                bad.push(format!("{name}@θ={:.4}: z={z:.2}", p.theta));
            }
        }
    }
    let realness = outcome(
        bad.is_empty(),
        format!("125 imaginary-part checks, max z = {max_z:.2}; failures: {bad:?}"),
    );
    (curve, realness)
}

/// Criterion 3: Sampled ⟨AB⟩ vs the Fock oracle at 10 random angle pairs, N = 1, 2.
fn oracle_equivalence() -> Outcome {
    let pool = pool();
    let mut angles = RandomStream::new(derive_seed(SEED, 3), 0);
    let mut fails = Vec::new();
    let mut max_z: f64 = 0.0;
    for n in [1, 2] {
        let state = build_bell_state(pairs(n));
        for k in 0..10 {
            let ta = PI * angles.uniform();
            let tb = PI * angles.uniform();
            let exact = exact_correlation(&state, ta, tb);
            let src = SampleSource::new(derive_seed(SEED, 30 + n as u64), pairs(n), SamplerKind::Exact).fork(k);
            let e = estimate(&pool, &src, 1_000_000, |p| {
                spin_variable(p, Site::A, ta) * spin_variable(p, Site::B, tb)
            });
            let z = e.z_real(exact);
            max_z = max_z.max(z);
            if !within(z, 3.0) {
                fails.push(format!("N={n} ({ta:.3},{tb:.3}) z={z:.2}"));
            }
        }
    }
    outcome(fails.is_empty(), format!("20 pairs, max z = {max_z:.2}; failures: {fails:?}"))
}

/// Criterion 4: ⟨n_i⟩ = N/2 for every mode, N = 1, 2.
fn mode_moments() -> Outcome {
    let pool = pool();
    let mut fails = Vec::new();
    let mut max_z: f64 = 0.0;
    for n in [1, 2] {
        let src = SampleSource::new(derive_seed(SEED, 4), pairs(n), SamplerKind::Exact).fork(n as u64);
        let est = estimate_many(&pool, &src, 1_000_000, |p| ModeIndex::ALL.map(|m| p.number(m)));
        let half = n as f64 / 2.0;
        for (m, e) in ModeIndex::ALL.iter().zip(&est) {
            let z = e.z_real(half);
            max_z = max_z.max(z);
            if !within(z, 3.0) {
                fails.push(format!("N={n} {m}: {:.4} z={z:.2}", e.mean.re));
            }
        }
    }
    outcome(fails.is_empty(), format!("8 mode means, max z = {max_z:.2}; failures: {fails:?}"))
}

/// Criterion 5: 256·P_canonical = P_closed-form at 100 random points, rel. tol 1e-10.
fn construction_consistency() -> Outcome {
    let state = build_bell_state(PairNumber::ONE);
    let mut rng = RandomStream::new(derive_seed(SEED, 5), 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut p = PhasePoint::default();
        for k in 0..MODES {
            p.alpha[k] = rng.standard_complex() * 1.5;
            p.beta[k] = rng.standard_complex() * 1.5;
        }
        let closed = bell_density(&to_sum_diff(&p), PairNumber::ONE);
        let canonical = 256.0 * canonical_p(&state, &p);
        worst = worst.max((canonical - closed).abs() / closed);
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.2e}"))
}

/// Criterion 6: Exact vs rejection samplers on all first and second moments of the
/// 16 real coordinates (4σ), and the N = 1 acceptance rate 0.5 ± 0.01.
fn sampler_cross_validation() -> Outcome {
    let pool = pool();
    let samples = 100_000;
    let moments = |kind: SamplerKind| {
        let src = SampleSource::new(derive_seed(SEED, 6), PairNumber::ONE, kind).fork(kind as u64);
        estimate_many::<32, _>(&pool, &src, samples, |p| {
            let x = p.coordinates();
            std::array::from_fn(|k| Complex64::new(if k < 16 { x[k] } else { x[k - 16] * x[k - 16] }, 0.0))
        })
    };
    let a = moments(SamplerKind::Exact);
    let b = moments(SamplerKind::Rejection);
    let max_z = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x.mean.re - y.mean.re).abs() / x.stderr_re().hypot(y.stderr_re()))
        .fold(0.0, f64::max);

    let seed = derive_seed(SEED, 61);
    let accepted = chunked_fold(
        &pool,
        samples,
        || 0u64,
        |acc, i| {
            let mut rng = RandomStream::new(seed, i);
            let (_, p) = rejection_proposal(&mut rng, PairNumber::ONE);
            if rng.uniform() < p {
                *acc += 1;
            }
        },
        |a, b| *a += b,
    );
    let rate = accepted as f64 / samples as f64;
    outcome(
        max_z <= 4.0 && (rate - 0.5).abs() <= 0.01,
        format!("32 moments, max z = {max_z:.2}; acceptance rate = {rate:.4}"),
    )
}

/// Criterion 8: Re(spin) histogram has mass outside [-1, 1].
fn quantum_bounds_exceeded() -> Outcome {
    let cfg = RunConfig {
        seed: derive_seed(SEED, 8),
        samples: 1_000_000,
        format: Format::Json,
        ..RunConfig::default()
    };
    let hist = HistConfig::default();
    let run = cli::run_hist(&cfg, &hist).unwrap();
    let frac = run.out_of_bounds_fraction(0);
    let (h, edges) = (&run.histogram, run.histogram.x.edges());
    // mass in x-bins lying wholly outside [-1, 1], plus overflow along x
    let ny = h.y.map_or(1, |a| a.bins);
    let outside_bins: u64 = (0..h.x.bins)
        .filter(|&i| edges[i + 1] < -1.0 || edges[i] > 1.0)
        .map(|i| h.counts[i * ny..(i + 1) * ny].iter().sum::<u64>())
        .sum::<u64>()
        + h.below_x
        + h.above_x;
    outcome(
        frac > 0.0 && outside_bins > 0,
        format!(
            "{}: fraction |Re s| > 1 = {frac:.4}; histogram mass outside [-1,1] = {outside_bins}",
            run.variables[0].describe()
        ),
    )
}

/// Criterion 9: cmd_chsh data rows are byte-identical for 1 and 8 workers.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: usize| {
        let path = dir.path().join(format!("chsh_{workers}.csv"));
        let cfg = RunConfig {
            seed: SEED,
            samples: 50_000,
            workers,
            output: Some(path.clone()),
            ..RunConfig::default()
        };
        cli::cmd_chsh(&cfg).unwrap();
        std::fs::read(path).unwrap()
    };
    let one = run(1);
    let eight = run(8);
    let rows = one.iter().filter(|&&b| b == b'\n').count();
    outcome(one == eight && rows == 26, format!("{rows} lines, identical = {}", one == eight))
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("1 bell violation at θ=π/8", bell_violation()));
    let (curve, realness) = curve_and_realness();
    results.push(("2 full Δ(θ) curve", curve));
    results.push(("3 oracle equivalence", oracle_equivalence()));
    results.push(("4 mode moments", mode_moments()));
    results.push(("5 construction consistency", construction_consistency()));
    results.push(("6 sampler cross-validation", sampler_cross_validation()));
    results.push(("7 hermitian realness", realness));
    results.push(("8 quantum bounds exceeded", quantum_bounds_exceeded()));
    results.push(("9 determinism", determinism()));

    let mut ok = true;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        ok &= o.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
