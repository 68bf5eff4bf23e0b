//! Mergeable streaming statistics and fixed-grid histograms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Welford accumulator for a complex-valued stream, tracking the real and
/// imaginary parts separately.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: Complex64,
    m2_re: f64,
    m2_im: f64,
}

impl Accumulator {
    #[inline]
    pub fn push(&mut self, x: Complex64) {
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        self.mean += delta / n;
        self.m2_re += delta.re * (x.re - self.mean.re);
        self.m2_im += delta.im * (x.im - self.mean.im);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * (nb / n);
        self.m2_re += other.m2_re + delta.re * delta.re * na * nb / n;
        self.m2_im += other.m2_im + delta.im * delta.im * na * nb / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    pub fn estimate(&self) -> CorrelationEstimate {
        let se = |m2: f64| {
            (self.count >= 2).then(|| {
                let n = self.count as f64;
                (m2 / (n - 1.0) / n).sqrt()
            })
        };
        CorrelationEstimate {
            count: self.count,
            mean: self.mean,
            stderr_real: se(self.m2_re),
            stderr_imag: se(self.m2_im),
        }
    }
}

impl FromIterator<Complex64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Accumulator::default();
        iter.into_iter().for_each(|x| acc.push(x));
        acc
    }
}

pub fn accumulate<I: IntoIterator<Item = Complex64>>(values: I) -> CorrelationEstimate {
    values.into_iter().collect::<Accumulator>().estimate()
}

/// Sample mean of a complex estimator with standard errors of its real and
/// imaginary parts. Standard errors are absent below two samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub count: u64,
    pub mean: Complex64,
    pub stderr_real: Option<f64>,
    pub stderr_imag: Option<f64>,
}

impl CorrelationEstimate {
    /// Standard error of the real part, NaN when undefined.
    pub fn stderr_re(&self) -> f64 {
        self.stderr_real.unwrap_or(f64::NAN)
    }

    pub fn stderr_im(&self) -> f64 {
        self.stderr_imag.unwrap_or(f64::NAN)
    }

    /// `|Re mean - expected|` in units of the real standard error.
    pub fn z_real(&self, expected: f64) -> f64 {
        (self.mean.re - expected).abs() / self.stderr_re()
    }

    /// `|Im mean|` in units of the imaginary standard error.
    pub fn z_imag(&self) -> f64 {
        if self.stderr_im() == 0.0 && self.mean.im == 0.0 {
            return 0.0;
        }
        self.mean.im.abs() / self.stderr_im()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub bins: usize,
    pub min: f64,
    pub max: f64,
}

impl Axis {
    pub fn new(bins: usize, min: f64, max: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::config("histogram needs at least one bin per axis"));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::config(format!("invalid histogram range [{min}, {max}]")));
        }
        Ok(Axis { bins, min, max })
    }

    /// In-range bin of `x`; the upper edge belongs to the last bin.
    pub fn bin(&self, x: f64) -> Option<usize> {
        if !(x >= self.min && x <= self.max) {
            return None;
        }
        let t = (x - self.min) / (self.max - self.min);
        Some(((t * self.bins as f64) as usize).min(self.bins - 1))
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.max - self.min) / self.bins as f64;
        (0..=self.bins)
            .map(|i| if i == self.bins { self.max } else { self.min + w * i as f64 })
            .collect()
    }
}

/// One- or two-dimensional histogram with explicit out-of-range counts.
///
/// `counts` is row-major with the x index outermost. A point lands in
/// `overflow` when any coordinate is outside its axis range (or NaN), so
/// `counts.sum() + overflow == total`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub x: Axis,
    pub y: Option<Axis>,
    pub counts: Vec<u64>,
    pub overflow: u64,
    pub below_x: u64,
    pub above_x: u64,
    pub below_y: u64,
    pub above_y: u64,
}

impl Histogram {
    pub fn new_1d(x: Axis) -> Self {
        Self::build(x, None)
    }

    pub fn new_2d(x: Axis, y: Axis) -> Self {
        Self::build(x, Some(y))
    }

    fn build(x: Axis, y: Option<Axis>) -> Self {
        let cells = x.bins * y.map_or(1, |a| a.bins);
        Histogram {
            x,
            y,
            counts: vec![0; cells],
            overflow: 0,
            below_x: 0,
            above_x: 0,
            below_y: 0,
            above_y: 0,
        }
    }

    pub fn push(&mut self, x: f64, y: Option<f64>) {
        let ix = self.x.bin(x);
        if ix.is_none() {
            tally_out(x, &self.x, &mut self.below_x, &mut self.above_x);
        }
        let (iy, ny) = match (self.y, y) {
            (Some(ay), Some(y)) => {
                let iy = ay.bin(y);
                if iy.is_none() {
                    tally_out(y, &ay, &mut self.below_y, &mut self.above_y);
                }
                (iy, ay.bins)
            }
            (None, _) => (Some(0), 1),
            (Some(_), None) => (None, 1),
        };
        match (ix, iy) {
            (Some(i), Some(j)) => self.counts[i * ny + j] += 1,
            _ => self.overflow += 1,
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.counts.len(), other.counts.len(), "histogram shapes differ");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        self.below_x += other.below_x;
        self.above_x += other.above_x;
        self.below_y += other.below_y;
        self.above_y += other.above_y;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }
}

fn tally_out(v: f64, axis: &Axis, below: &mut u64, above: &mut u64) {
    if v < axis.min {
        *below += 1;
    } else if v > axis.max {
        *above += 1;
    }
}

pub fn histogram2d<I>(pairs: I, x: Axis, y: Axis) -> Histogram
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut h = Histogram::new_2d(x, y);
    for (a, b) in pairs {
        h.push(a, Some(b));
    }
    h
}
