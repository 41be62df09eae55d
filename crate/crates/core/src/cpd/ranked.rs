use serde::{Deserialize, Serialize};
use libm::erfc;

use super::{decode_row, parent_configurations, Cpd, CpdError, Cpt};
use crate::bn::StateSpace;

/// Bin edges of the five-point scale on [0, 1].
pub const RANKED_BIN_EDGES: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

/// Ranked node: a truncated Normal on [0, 1] centred on the weighted mean of
/// the parents' positions, integrated over the five bins.
///
/// A parent with `k` ordered states sits at `(s + 0.5) / k` for state `s`,
/// which for five-state parents is the bin midpoint. Parents listed in
/// `reversed` contribute `1 - position`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCpd {
    pub weights: Vec<f64>,
    pub variance: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reversed: Vec<usize>,
}

impl RankedCpd {
    pub fn new(weights: Vec<f64>, variance: f64) -> Self {
        RankedCpd { weights, variance, reversed: Vec::new() }
    }

    pub fn with_reversed(mut self, reversed: Vec<usize>) -> Self {
        self.reversed = reversed;
        self
    }

    fn validate(&self, parents: usize) -> Result<(), CpdError> {
        if self.weights.len() != parents {
            return Err(CpdError::ShapeMismatch(format!(
                "{} weights for {parents} parents",
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(CpdError::ParameterOutOfRange("weights must be finite and >= 0".into()));
        }
        if parents > 0 && self.weights.iter().all(|w| *w == 0.0) {
            return Err(CpdError::ParameterOutOfRange("weights are all zero".into()));
        }
        if !(self.variance.is_finite() && self.variance > 0.0) {
            return Err(CpdError::ParameterOutOfRange(format!(
                "variance = {} must be > 0",
                self.variance
            )));
        }
        if let Some(&r) = self.reversed.iter().find(|&&r| r >= parents) {
            return Err(CpdError::ShapeMismatch(format!("reversed parent {r} does not exist")));
        }
        Ok(())
    }
}

impl From<RankedCpd> for Cpd {
    fn from(c: RankedCpd) -> Self {
        Cpd::Ranked(c)
    }
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn lower_tail(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal mass on `[a, b]`, evaluated on the tail that avoids
/// cancellation.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        upper_tail(a) - upper_tail(b)
    } else if b <= 0.0 {
        lower_tail(b) - lower_tail(a)
    } else {
        1.0 - lower_tail(a) - upper_tail(b)
    }
}

/// Probabilities of the five bins under Normal(mean, variance) truncated to
/// [0, 1].
pub fn truncated_normal_bins(mean: f64, variance: f64) -> [f64; 5] {
    let sd = variance.sqrt();
    let z = |x: f64| (x - mean) / sd;
    let mut out = [0.0; 5];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = normal_mass(z(RANKED_BIN_EDGES[i]), z(RANKED_BIN_EDGES[i + 1])).max(0.0);
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        for v in &mut out {
            *v /= total;
        }
    } else {
        // mean far outside [0, 1] relative to sd: all mass at the nearest bin
        let i = if mean < 0.5 { 0 } else { 4 };
        out[i] = 1.0;
    }
    out
}

/// Expand a ranked CPD into its tabular CPT over the five child bins.
pub fn expand_ranked(cpd: &RankedCpd, child: &StateSpace, parents: &[&StateSpace]) -> Result<Cpt, CpdError> {
    cpd.validate(parents.len())?;
    if child.len() != 5 {
        return Err(CpdError::ShapeMismatch(format!(
            "ranked child must have 5 states, has {}",
            child.len()
        )));
    }
    let cards: Vec<usize> = parents.iter().map(|p| p.len()).collect();
    let total_weight: f64 = cpd.weights.iter().sum();
    let rows = parent_configurations(parents);
    let mut states = vec![0; parents.len()];
    let mut values = Vec::with_capacity(rows * 5);
    for r in 0..rows {
        decode_row(r, &cards, &mut states);
        let mean = if parents.is_empty() {
            0.5
        } else {
            let mut acc = 0.0;
            for (i, (&s, &k)) in states.iter().zip(&cards).enumerate() {
                let mut pos = (s as f64 + 0.5) / k as f64;
                if cpd.reversed.contains(&i) {
                    pos = 1.0 - pos;
                }
                acc += cpd.weights[i] * pos;
            }
            acc / total_weight
        };
        values.extend_from_slice(&truncated_normal_bins(mean, cpd.variance));
    }
    Ok(Cpt::new(5, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint Riemann sum of the truncated normal density.
    fn riemann_bins(mean: f64, variance: f64, slices: usize) -> [f64; 5] {
        let sd = variance.sqrt();
        let h = 1.0 / slices as f64;
        let mut out = [0.0; 5];
        for i in 0..slices {
            let x = (i as f64 + 0.5) * h;
            let d = (-(x - mean).powi(2) / (2.0 * variance)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
            let bin = ((x * 5.0) as usize).min(4);
            out[bin] += d * h;
        }
        let total: f64 = out.iter().sum();
        out.map(|v| v / total)
    }

    fn one_parent(variance: f64) -> Cpt {
        let r = StateSpace::ranked();
        expand_ranked(&RankedCpd::new(vec![1.0], variance), &r, &[&r]).unwrap()
    }

    #[test]
    fn degenerate_variance_copies_parent() {
        let cpt = one_parent(1e-9);
        let row = cpt.row(2);
        assert!((row[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opposite_parents_are_symmetric() {
        let r = StateSpace::ranked();
        let cpt = expand_ranked(&RankedCpd::new(vec![1.0, 1.0], 0.05), &r, &[&r, &r]).unwrap();
        // parents (VeryLow, VeryHigh) -> row 0 * 5 + 4
        let row = cpt.row(4);
        assert!((row[0] - row[4]).abs() < 1e-9);
        assert!((row[1] - row[3]).abs() < 1e-9);
        let mode = (0..5).max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap()).unwrap();
        assert_eq!(mode, 2);
    }

    #[test]
    fn matches_quadrature_oracle() {
        let cpt = one_parent(0.05);
        let row = cpt.row(3);
        let oracle = riemann_bins(0.7, 0.05, 1_000_000);
        // frozen from an independent CDF evaluation
        let frozen = [
            0.012978636161670005,
            0.08488401334724537,
            0.26120279333950475,
            0.37973176381207546,
            0.26120279333950447,
        ];
        for i in 0..5 {
            assert!((row[i] - oracle[i]).abs() < 1e-8, "bin {i}: {} vs {}", row[i], oracle[i]);
            assert!((row[i] - frozen[i]).abs() < 1e-12, "{} {}", row[i], frozen[i]);
        }
    }

    #[test]
    fn reversed_parent_mirrors() {
        let r = StateSpace::ranked();
        let plain = expand_ranked(&RankedCpd::new(vec![1.0], 0.02), &r, &[&r]).unwrap();
        let rev = expand_ranked(&RankedCpd::new(vec![1.0], 0.02).with_reversed(vec![0]), &r, &[&r]).unwrap();
        for s in 0..5 {
            let a = plain.row(s);
            let b = rev.row(4 - s);
            for i in 0..5 {
                assert!((a[i] - b[i]).abs() < 1e-12, "{} {}", a[i], b[i]);
            }
        }
    }

    #[test]
    fn binary_parent_positions() {
        let r = StateSpace::ranked();
        let b = StateSpace::new(["no", "yes"]).unwrap();
        let cpt = expand_ranked(&RankedCpd::new(vec![1.0], 1e-6), &r, &[&b]).unwrap();
        // positions 0.25 and 0.75
        assert!(cpt.row(0)[1] > 0.999);
        assert!(cpt.row(1)[3] > 0.999);
    }

    #[test]
    fn rejects_bad_parameters() {
        let r = StateSpace::ranked();
        assert!(expand_ranked(&RankedCpd::new(vec![0.0], 0.1), &r, &[&r]).is_err());
        assert!(expand_ranked(&RankedCpd::new(vec![1.0], 0.0), &r, &[&r]).is_err());
        assert!(expand_ranked(&RankedCpd::new(vec![-1.0, 2.0], 0.1), &r, &[&r, &r]).is_err());
        let b = StateSpace::binary();
        assert!(expand_ranked(&RankedCpd::new(vec![1.0], 0.1), &b, &[&r]).is_err());
    }
}
