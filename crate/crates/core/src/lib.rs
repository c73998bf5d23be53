//! Order-k Poisson distribution: evaluation, summary statistics and mode search.

pub mod error;
pub mod extended;
pub mod fitting;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod search;
pub mod series;
pub mod stats;
pub mod wide;

pub use error::{Error, Result};
pub use params::{kappa, DistParams, Settings};
pub use poly::{h_polynomial, HPolynomial};
pub use stats::{mean, median, mode, mode_bounds, variance, ModeSummary};
pub use series::{h_by_order, h_series, pmf_series, ScaleBlock, ScaledSeries, SeriesKind};
pub use wide::WideFloat;
