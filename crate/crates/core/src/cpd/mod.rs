//! Conditional probability distributions.
//!
//! Every CPD kind expands into a tabular [`Cpt`]. Rows are indexed by the
//! parent configuration in mixed radix, first parent most significant; each
//! row is a distribution over the child's states.

pub(crate) mod count;
mod noisy_or;
mod ranked;

pub use count::{expand_arith_subtract, expand_binomial_thinning, expand_poisson_count};
pub use noisy_or::{expand_noisy_or, NoisyOrCpd};
pub use ranked::{expand_ranked, truncated_normal_bins, RankedCpd, RANKED_BIN_EDGES};

use thiserror::Error;

use crate::bn::StateSpace;

/// Tolerance on row sums; rows within it are renormalized, rows outside it
/// are rejected.
pub const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CpdError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("incompatible intervals: {0}")]
    IncompatibleIntervals(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Specification of a node's conditional distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Cpd {
    /// Explicit rows, one per parent configuration.
    Table(Vec<Vec<f64>>),
    NoisyOr(NoisyOrCpd),
    Ranked(RankedCpd),
    /// Poisson count with one rate per parent configuration.
    Poisson { rates: Vec<f64> },
    /// Binomial thinning of the first (count) parent, success probability
    /// indexed by the state of the second parent.
    Binomial { p: Vec<f64> },
    /// Deterministic `max(0, first - second)` over count parents.
    Subtract,
}

impl Cpd {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Cpd::Table(_) => "table",
            Cpd::NoisyOr(_) => "noisy_or",
            Cpd::Ranked(_) => "ranked",
            Cpd::Poisson { .. } => "poisson",
            Cpd::Binomial { .. } => "binomial",
            Cpd::Subtract => "subtract",
        }
    }

    /// Expand to a tabular CPT and validate every row.
    pub fn expand(
        &self,
        child: &StateSpace,
        parents: &[&StateSpace],
        tail_factor: f64,
    ) -> Result<Cpt, CpdError> {
        let cpt = match self {
            Cpd::Table(rows) => Cpt::from_rows(child.len(), parents, rows)?,
            Cpd::NoisyOr(c) => expand_noisy_or(c, child, parents)?,
            Cpd::Ranked(c) => expand_ranked(c, child, parents)?,
            Cpd::Poisson { rates } => expand_poisson_count(rates, child, parents)?,
            Cpd::Binomial { p } => expand_binomial_thinning(p, child, parents, tail_factor)?,
            Cpd::Subtract => expand_arith_subtract(child, parents, tail_factor)?,
        };
        Ok(cpt)
    }
}

/// Row-normalization failure reported by [`Cpt::normalize_rows`].
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub row: usize,
    pub sum: f64,
}

/// Expanded conditional probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    child_card: usize,
    values: Vec<f64>,
}

impl Cpt {
    pub(crate) fn new(child_card: usize, values: Vec<f64>) -> Self {
        debug_assert!(child_card > 0 && values.len().is_multiple_of(child_card));
        Cpt { child_card, values }
    }

    fn from_rows(child_card: usize, parents: &[&StateSpace], rows: &[Vec<f64>]) -> Result<Cpt, CpdError> {
        let expected = parent_configurations(parents);
        if rows.len() != expected {
            return Err(CpdError::ShapeMismatch(format!(
                "expected {expected} rows, got {}",
                rows.len()
            )));
        }
        let mut values = Vec::with_capacity(expected * child_card);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != child_card {
                return Err(CpdError::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {child_card}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Cpt { child_card, values })
    }

    pub fn child_card(&self) -> usize {
        self.child_card
    }

    pub fn num_rows(&self) -> usize {
        self.values.len() / self.child_card
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.child_card..(i + 1) * self.child_card]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.child_card)
    }

    /// Check every row is a probability vector; renormalize small drift.
    pub fn normalize_rows(&mut self) -> Result<(), RowError> {
        let card = self.child_card;
        for (i, row) in self.values.chunks_mut(card).enumerate() {
            let mut sum = 0.0;
            for &v in row.iter() {
                if !v.is_finite() || !(-0.0..=1.0 + ROW_TOLERANCE).contains(&v) {
                    return Err(RowError { row: i, sum: f64::NAN });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(RowError { row: i, sum });
            }
            if sum != 1.0 {
                for v in row.iter_mut() {
                    *v /= sum;
                }
            }
        }
        Ok(())
    }
}

/// Number of parent configurations (1 for a root).
pub fn parent_configurations(parents: &[&StateSpace]) -> usize {
    parents.iter().map(|p| p.len()).product()
}

/// Decode a row index into per-parent state indices.
pub(crate) fn decode_row(mut row: usize, cards: &[usize], out: &mut [usize]) {
    for (slot, &card) in out.iter_mut().zip(cards).rev() {
        *slot = row % card;
        row /= card;
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<(), CpdError> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CpdError::ParameterOutOfRange(format!("{name} = {p} is not in [0, 1]")))
    }
}
