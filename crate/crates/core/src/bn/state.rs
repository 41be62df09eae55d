//! State spaces for discrete nodes.
//!
//! Count nodes carry integer intervals. An interval `lo..=hi` covers the
//! real range `[lo, hi + 1)` when locating a real value, and its summary
//! representative is the midpoint `(lo + hi) / 2`. The final interval may be
//! unbounded above; its representative is `tail_factor * lo`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BnError;

/// Canonical labels of the five-point ordinal scale, ascending.
pub const RANKED_LABELS: [&str; 5] = ["VeryLow", "Low", "Medium", "High", "VeryHigh"];

/// Default multiplier applied to the lower bound of an unbounded interval.
pub const DEFAULT_TAIL_FACTOR: f64 = 1.5;

/// Inclusive integer interval, optionally unbounded above. Serialized as
/// its label: `"4"`, `"3-5"` or `"501+"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Interval {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl Interval {
    pub fn point(v: u64) -> Self {
        Interval { lo: v, hi: Some(v) }
    }

    pub fn bounded(lo: u64, hi: u64) -> Self {
        Interval { lo, hi: Some(hi) }
    }

    pub fn unbounded(lo: u64) -> Self {
        Interval { lo, hi: None }
    }

    pub fn is_unbounded(&self) -> bool {
        self.hi.is_none()
    }

    /// Whether the integer count `k` lies in the interval.
    pub fn contains_count(&self, k: u64) -> bool {
        k >= self.lo && self.hi.is_none_or(|hi| k <= hi)
    }

    /// Whether the real value `x` lies in `[lo, hi + 1)`.
    pub fn contains_value(&self, x: f64) -> bool {
        x >= self.lo as f64 && self.hi.is_none_or(|hi| x < hi as f64 + 1.0)
    }

    pub fn representative(&self, tail_factor: f64) -> f64 {
        match self.hi {
            Some(hi) => (self.lo as f64 + hi as f64) / 2.0,
            None => tail_factor * self.lo as f64,
        }
    }

    /// Integer count used when an interval stands in for a single count.
    pub fn count_representative(&self, tail_factor: f64) -> u64 {
        self.representative(tail_factor).round() as u64
    }

    pub fn label(&self) -> String {
        match self.hi {
            Some(hi) if hi == self.lo => format!("{}", self.lo),
            Some(hi) => format!("{}-{}", self.lo, hi),
            None => format!("{}+", self.lo),
        }
    }
}

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("invalid interval '{s}'"));
        if let Some(lo) = s.strip_suffix('+') {
            return Ok(Interval::unbounded(num(lo)?));
        }
        match s.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if hi < lo {
                    return Err(format!("invalid interval '{s}': upper bound below lower bound"));
                }
                Ok(Interval::bounded(lo, hi))
            }
            None => Ok(Interval::point(num(s)?)),
        }
    }
}

impl TryFrom<String> for Interval {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Interval> for String {
    fn from(iv: Interval) -> String {
        iv.label()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Ordered state labels, with optional count intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    labels: Vec<String>,
    intervals: Option<Vec<Interval>>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, BnError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(BnError::InvalidStateSpace(format!(
                "need at least 2 states, got {}",
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if l.is_empty() {
                return Err(BnError::InvalidStateSpace("empty state label".into()));
            }
            if !seen.insert(l.as_str()) {
                return Err(BnError::InvalidStateSpace(format!("duplicate state label '{l}'")));
            }
        }
        Ok(StateSpace { labels, intervals: None })
    }

    /// Count state space; labels are derived from the intervals.
    pub fn counts(intervals: Vec<Interval>) -> Result<Self, BnError> {
        if intervals.len() < 2 {
            return Err(BnError::InvalidStateSpace(format!(
                "need at least 2 intervals, got {}",
                intervals.len()
            )));
        }
        for (i, iv) in intervals.iter().enumerate() {
            if let Some(hi) = iv.hi {
                if hi < iv.lo {
                    return Err(BnError::InvalidStateSpace(format!("interval {i} has hi < lo")));
                }
            } else if i + 1 != intervals.len() {
                return Err(BnError::InvalidStateSpace(format!(
                    "only the final interval may be unbounded (interval {i})"
                )));
            }
            if i > 0 {
                let prev_hi = intervals[i - 1].hi.expect("checked above");
                if iv.lo != prev_hi + 1 {
                    return Err(BnError::InvalidStateSpace(format!(
                        "intervals {} and {i} are not contiguous",
                        i - 1
                    )));
                }
            }
        }
        let labels = intervals.iter().map(Interval::label).collect();
        Ok(StateSpace { labels, intervals: Some(intervals) })
    }

    pub fn ranked() -> Self {
        StateSpace::new(RANKED_LABELS).expect("canonical labels are valid")
    }

    pub fn binary() -> Self {
        StateSpace::new(["true", "false"]).expect("binary labels are valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn intervals(&self) -> Option<&[Interval]> {
        self.intervals.as_deref()
    }

    /// Index of the interval containing the count `k`.
    pub fn interval_of_count(&self, k: u64) -> Option<usize> {
        self.intervals.as_ref()?.iter().position(|iv| iv.contains_count(k))
    }

    /// Index of the interval containing the real value `x`.
    pub fn interval_of_value(&self, x: f64) -> Option<usize> {
        self.intervals.as_ref()?.iter().position(|iv| iv.contains_value(x))
    }

    pub fn representatives(&self, tail_factor: f64) -> Option<Vec<f64>> {
        self.intervals
            .as_ref()
            .map(|ivs| ivs.iter().map(|iv| iv.representative(tail_factor)).collect())
    }
}

/// Default count partition for defect-count nodes.
pub fn default_count_intervals() -> Vec<Interval> {
    vec![
        Interval::point(0),
        Interval::point(1),
        Interval::point(2),
        Interval::bounded(3, 5),
        Interval::bounded(6, 10),
        Interval::bounded(11, 20),
        Interval::bounded(21, 50),
        Interval::bounded(51, 100),
        Interval::bounded(101, 200),
        Interval::bounded(201, 500),
        Interval::unbounded(501),
    ]
}
