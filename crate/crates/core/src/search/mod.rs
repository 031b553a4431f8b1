//! Top-k query strategies over a catalog of tiled images.
//!
//! All three strategies score an alignment by [`dp_max_region`] of its
//! actual score matrix and collect results in a [`ResultQueue`]. With
//! [`BoundMode::SafePositiveSum`] the index-driven strategies return the same
//! score list as [`linear_search`]; with [`BoundMode::PaperDp`] they use the
//! DP score of bound matrices, which is not a proven upper bound.
//!
//! [`dp_max_region`]: crate::mwcs::dp_max_region

mod alignments;
mod linear;
mod queue;
mod spars;
mod stats;
mod tars;

pub use alignments::{align_from_pair, enumerate_alignments, evaluate_alignment, get_max_sub_rg, ExploredSet};
pub use linear::linear_search;
pub use queue::{result_order, rq_insert, ResultQueue};
pub use spars::spars;
pub use stats::{BoundRecord, SearchStats};
pub use tars::tars;

use crate::error::{invalid, Error, Result};
use crate::index::{Catalog, SpatialIndex};
use crate::model::{Metric, QueryImage, RankedMatch, ScoringParams};
use crate::scoring::BoundMode;

/// Parameters shared by every strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub k: usize,
    pub params: ScoringParams,
    pub metric: Metric,
    pub mode: BoundMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k: 10,
            params: ScoringParams::default(),
            metric: Metric::default(),
            mode: BoundMode::default(),
        }
    }
}

/// Ranked matches, best first, and the counters of the run that found them.
#[derive(Debug, Clone, Default)]
pub struct SearchOutcome {
    pub matches: Vec<RankedMatch>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Linear,
    Tars,
    Spars,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Linear, Algorithm::Tars, Algorithm::Spars];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Linear => "linear",
            Algorithm::Tars => "tars",
            Algorithm::Spars => "spars",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Algorithm::Linear),
            "tars" => Ok(Algorithm::Tars),
            "spars" => Ok(Algorithm::Spars),
            other => invalid(format!("unknown algorithm {other:?}")),
        }
    }
}

/// Runs `algorithm`; the index is ignored by linear search.
pub fn run(
    algorithm: Algorithm,
    query: &QueryImage,
    index: &SpatialIndex,
    catalog: &Catalog,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    match algorithm {
        Algorithm::Linear => linear_search(query, catalog, config),
        Algorithm::Tars => tars(query, index, catalog, config),
        Algorithm::Spars => spars(query, index, catalog, config),
    }
}

fn check_config(config: &SearchConfig) -> Result<()> {
    if config.k == 0 {
        return invalid("k must be at least 1");
    }
    if !(config.params.lambda.is_finite() && config.params.lambda > 0.0) {
        return invalid("lambda must be positive");
    }
    Ok(())
}

fn check_index(query: &QueryImage, index: &SpatialIndex, config: &SearchConfig) -> Result<()> {
    check_config(config)?;
    if index.metric() != config.metric {
        return invalid(format!(
            "index uses the {} metric but the query asks for {}",
            index.metric().name(),
            config.metric.name()
        ));
    }
    if query.dim() != index.dim() {
        return Err(Error::DimensionMismatch {
            expected: index.dim(),
            found: query.dim(),
        });
    }
    Ok(())
}
