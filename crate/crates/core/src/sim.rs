//! Deterministic parallel Monte Carlo over Bell-state samples.
//!
//! Sample `i` of a run is always drawn from substream `(seed, i)`. Work is
//! split into fixed-size chunks whose boundaries do not depend on the worker
//! count, each chunk is folded serially, and chunk partials are merged in
//! index order on the calling thread. Results are therefore bit-identical for
//! any number of workers.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observables::{chsh_combine, chsh_products, spin_variable, theoretical_delta, AngleConvention, ChshCurvePoint};
use crate::phase::{ModeIndex, PhasePoint, Site};
use crate::rng::{derive_seed, RandomStream};
use crate::sampler::{sample_bell, PairNumber, SamplerKind};
use crate::stats::{Accumulator, Axis, CorrelationEstimate, Histogram};

pub const CHUNK: u64 = 8192;

/// A reproducible source of Bell-state samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSource {
    pub seed: u64,
    pub pairs: PairNumber,
    pub kind: SamplerKind,
}

impl SampleSource {
    pub fn new(seed: u64, pairs: PairNumber, kind: SamplerKind) -> Self {
        SampleSource { seed, pairs, kind }
    }

    pub fn sample(&self, index: u64) -> PhasePoint {
        sample_bell(&mut RandomStream::new(self.seed, index), self.pairs, self.kind)
    }

    /// Source for an independent labelled sub-run (e.g. one sweep point).
    pub fn fork(&self, label: u64) -> Self {
        SampleSource {
            seed: derive_seed(self.seed, label),
            ..*self
        }
    }
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::config("workers must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))
}

/// Fold `samples` items in fixed chunks and merge partials in chunk order.
pub fn chunked_fold<T, I, F, M>(
    pool: &rayon::ThreadPool,
    samples: u64,
    init: I,
    fold: F,
    merge: M,
) -> T
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, u64) + Sync,
    M: Fn(&mut T, T),
{
    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<T> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                let end = ((c + 1) * CHUNK).min(samples);
                for i in c * CHUNK..end {
                    fold(&mut acc, i);
                }
                acc
            })
            .collect()
    });
    let mut total = init();
    for p in partials {
        merge(&mut total, p);
    }
    total
}

/// Accumulate `K` complex estimators per sample.
pub fn estimate_many<const K: usize, G>(
    pool: &rayon::ThreadPool,
    source: &SampleSource,
    samples: u64,
    values: G,
) -> [CorrelationEstimate; K]
where
    G: Fn(&PhasePoint) -> [Complex64; K] + Sync,
{
    let acc = chunked_fold(
        pool,
        samples,
        || [Accumulator::default(); K],
        |acc, i| {
            let p = source.sample(i);
            for (a, v) in acc.iter_mut().zip(values(&p)) {
                a.push(v);
            }
        },
        |total, part| {
            for (t, p) in total.iter_mut().zip(part.iter()) {
                t.merge(p);
            }
        },
    );
    acc.map(|a| a.estimate())
}

pub fn estimate<G>(pool: &rayon::ThreadPool, source: &SampleSource, samples: u64, value: G) -> CorrelationEstimate
where
    G: Fn(&PhasePoint) -> Complex64 + Sync,
{
    let [e] = estimate_many(pool, source, samples, |p| [value(p)]);
    e
}

/// `Δ(θ)`, the four correlations and the four mode numbers from one set of
/// samples.
pub fn chsh_point(
    pool: &rayon::ThreadPool,
    source: &SampleSource,
    theta: f64,
    samples: u64,
) -> ChshCurvePoint {
    let angles = AngleConvention::Symmetric.angles(theta);
    let e = estimate_many(pool, source, samples, |p| {
        let c = chsh_products(p, &angles);
        let n = ModeIndex::ALL.map(|m| p.number(m));
        [chsh_combine(&c), c[0], c[1], c[2], c[3], n[0], n[1], n[2], n[3]]
    });
    ChshCurvePoint {
        theta,
        delta: e[0],
        delta_theory: theoretical_delta(theta),
        correlations: [e[1], e[2], e[3], e[4]],
        numbers: [e[5], e[6], e[7], e[8]],
    }
}

/// `theta_steps` evenly spaced angles from `min` to `max` inclusive.
pub fn theta_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::config("theta_steps must be at least 1"));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(Error::config(format!("invalid theta range [{min}, {max}]")));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if k == steps - 1 { max } else { min + step * k as f64 })
        .collect())
}

/// CHSH sweep; point `k` draws from the source forked with label `k`.
pub fn chsh_sweep(
    pool: &rayon::ThreadPool,
    source: &SampleSource,
    grid: &[f64],
    samples: u64,
) -> Vec<ChshCurvePoint> {
    grid.iter()
        .enumerate()
        .map(|(k, &theta)| chsh_point(pool, &source.fork(k as u64), theta, samples))
        .collect()
}

/// Variables that can be histogrammed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variable {
    /// Spin variable at one site and polarizer angle.
    Spin { site: Site, theta: f64 },
    /// Product of the site-A and site-B spin variables.
    Correlation { theta_a: f64, theta_b: f64 },
    /// Phase-space photon number of one mode.
    Number { mode: ModeIndex },
}

impl Variable {
    pub fn eval(&self, p: &PhasePoint) -> Complex64 {
        match *self {
            Variable::Spin { site, theta } => spin_variable(p, site, theta),
            Variable::Correlation { theta_a, theta_b } => {
                spin_variable(p, Site::A, theta_a) * spin_variable(p, Site::B, theta_b)
            }
            Variable::Number { mode } => p.number(mode),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Variable::Spin { site, theta } => format!("spin:{site:?}:{theta}"),
            Variable::Correlation { theta_a, theta_b } => format!("corr:{theta_a}:{theta_b}"),
            Variable::Number { mode } => format!("number:{mode}"),
        }
    }
}

impl std::str::FromStr for Variable {
    type Err = Error;

    /// `spin:<A|B>:<theta>`, `corr:<theta_a>:<theta_b>` or `number:<A+|A-|B+|B->`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config(format!("cannot parse variable {s:?}"));
        let angle = |t: &str| t.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["spin", site, theta] => {
                let site = match site.trim() {
                    "A" | "a" => Site::A,
                    "B" | "b" => Site::B,
                    _ => return Err(bad()),
                };
                Ok(Variable::Spin { site, theta: angle(theta)? })
            }
            ["corr", ta, tb] => Ok(Variable::Correlation {
                theta_a: angle(ta)?,
                theta_b: angle(tb)?,
            }),
            ["number", m] => ModeIndex::ALL
                .into_iter()
                .find(|mode| mode.to_string() == m.trim())
                .map(|mode| Variable::Number { mode })
                .ok_or_else(bad),
            _ => Err(bad()),
        }
    }
}

/// Histogram of the real parts of one or two variables, plus per-variable
/// mean estimates and the number of samples with `|Re v| > 1`.
#[derive(Debug, Clone)]
pub struct HistogramRun {
    pub variables: Vec<Variable>,
    pub histogram: Histogram,
    pub estimates: Vec<CorrelationEstimate>,
    pub out_of_bounds: Vec<u64>,
    pub samples: u64,
}

impl HistogramRun {
    pub fn out_of_bounds_fraction(&self, k: usize) -> f64 {
        self.out_of_bounds[k] as f64 / self.samples as f64
    }
}

pub fn histogram_run(
    pool: &rayon::ThreadPool,
    source: &SampleSource,
    variables: &[Variable],
    axis: Axis,
    samples: u64,
) -> Result<HistogramRun> {
    if variables.is_empty() || variables.len() > 2 {
        return Err(Error::config("histogram takes one or two variables"));
    }
    let two = variables.len() == 2;
    let empty = || {
        let h = if two { Histogram::new_2d(axis, axis) } else { Histogram::new_1d(axis) };
        (h, vec![Accumulator::default(); variables.len()], vec![0u64; variables.len()])
    };
    let (histogram, accs, out) = chunked_fold(
        pool,
        samples,
        empty,
        |(h, accs, out), i| {
            let p = source.sample(i);
            let v: Vec<Complex64> = variables.iter().map(|var| var.eval(&p)).collect();
            h.push(v[0].re, v.get(1).map(|z| z.re));
            for ((a, o), z) in accs.iter_mut().zip(out.iter_mut()).zip(&v) {
                a.push(*z);
                if z.re.abs() > 1.0 {
                    *o += 1;
                }
            }
        },
        |(h, accs, out), (ph, paccs, pout)| {
            h.merge(&ph);
            for (a, b) in accs.iter_mut().zip(&paccs) {
                a.merge(b);
            }
            for (a, b) in out.iter_mut().zip(&pout) {
                *a += b;
            }
        },
    );
    Ok(HistogramRun {
        variables: variables.to_vec(),
        histogram,
        estimates: accs.iter().map(|a| a.estimate()).collect(),
        out_of_bounds: out,
        samples,
    })
}
