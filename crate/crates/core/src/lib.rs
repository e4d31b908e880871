//! Deterministic random bits and base-10 digits from comparisons of the
//! decimal digits of prime-degree roots of prime numbers, plus the
//! chi-square battery used to check them.
//!
//! ```
//! use mrng::bitgen::{GeneratorConfig, MrngStream};
//!
//! let config = GeneratorConfig { n_pairs: 3, rounds: 2, precision_digits: 200, ..GeneratorConfig::desk() };
//! let bits = MrngStream::new(config).unwrap().take_bits(64);
//! assert_eq!(bits.len(), 64);
//! ```

pub mod bigroot;
pub mod bitgen;
pub mod cli;
pub mod error;
pub mod primes;
pub mod reference;
pub mod stats;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub use bigroot::{int_nth_root, root_fractional_digits, DigitBlock, RootCache};
pub use bitgen::{
    bits_to_decimal, compare_digits, concat, generate_bits, operator_o, pair_stream, schedule,
    BitStream, GeneratorConfig, MrngStream, ScheduleEntry,
};
pub use error::{Error, Result};
pub use primes::{first_n_primes, prime_pair_sets, PrimePairSets, PrimeTable};
pub use stats::{PairTally, TestSelector};

/// Floating-point scalar for the statistics: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

pub type TestReport = stats::TestReport<f64>;
pub type BatchOutcome = stats::BatchOutcome<f64>;
pub type DistributionSummary = stats::DistributionSummary<f64>;
pub type Battery = stats::Battery<f64>;
