//! Monte Carlo sampling of the positive-P phase-space distribution of photonic
//! Bell states, with CHSH estimation and an exact Fock-basis oracle.
//!
//! ```no_run
//! use ppbell::prelude::*;
//!
//! let pool = thread_pool(4).unwrap();
//! let source = SampleSource::new(7, PairNumber::ONE, SamplerKind::Exact);
//! let point = chsh_point(&pool, &source, std::f64::consts::FRAC_PI_8, 2_000_000);
//! println!("Δ(π/8) = {} ± {}", point.delta_mean(), point.delta_stderr());
//! ```

pub mod cli;
pub mod error;
pub mod fock;
pub mod observables;
pub mod phase;
pub mod rng;
pub mod sampler;
pub mod sim;
pub mod stats;
pub mod validate;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::fock::{build_bell_state, canonical_p, exact_correlation, exact_mean_number, TruncatedState};
    pub use crate::observables::{
        chsh_sample, photon_number, rotate_site, spin_variable, theoretical_delta, AngleConvention, ChshCurvePoint,
    };
    pub use crate::phase::{from_sum_diff, to_sum_diff, ModeIndex, PhasePoint, Polarization, Site, SumDiffPoint};
    pub use crate::rng::RandomStream;
    pub use crate::sampler::{bell_density, sample_bell, PairNumber, SamplerKind};
    pub use crate::sim::{chsh_point, chsh_sweep, estimate, thread_pool, SampleSource, Variable};
    pub use crate::stats::{accumulate, Accumulator, CorrelationEstimate};
}
