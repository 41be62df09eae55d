//! Count-node CPDs: Poisson insertion, Binomial thinning and deterministic
//! subtraction. Child and count parents use interval state spaces.

use super::{check_probability, decode_row, parent_configurations, CpdError, Cpt};
use crate::bn::{Interval, StateSpace};

fn count_intervals<'a>(space: &'a StateSpace, what: &str) -> Result<&'a [Interval], CpdError> {
    space
        .intervals()
        .ok_or_else(|| CpdError::IncompatibleIntervals(format!("{what} is not a count node")))
}

fn starts_at_zero(ivs: &[Interval], what: &str) -> Result<(), CpdError> {
    if ivs[0].lo != 0 {
        return Err(CpdError::IncompatibleIntervals(format!("{what} intervals must start at 0")));
    }
    Ok(())
}

/// `ln k!` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson(λ) mass of each interval; the final interval takes the tail.
pub(crate) fn poisson_row(rate: f64, ivs: &[Interval], out: &mut [f64]) {
    let tail_start = ivs[ivs.len() - 1].lo;
    let ln_rate = rate.ln();
    let mut ln_pmf = -rate;
    let mut head = 0.0;
    let mut bin = 0;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..tail_start {
        if k > 0 {
            ln_pmf += ln_rate - (k as f64).ln();
        }
        while !ivs[bin].contains_count(k) {
            bin += 1;
        }
        let p = ln_pmf.exp();
        out[bin] += p;
        head += p;
    }
    let last = out.len() - 1;
    out[last] = if (tail_start as f64) > rate {
        // sum the tail directly; 1 - head would be all round-off here
        let mut k = tail_start;
        let mut ln_p = if k == 0 { -rate } else { ln_pmf + ln_rate - (k as f64).ln() };
        let mut tail = 0.0;
        loop {
            let p = ln_p.exp();
            tail += p;
            if p <= tail * 1e-18 || p == 0.0 {
                break;
            }
            k += 1;
            ln_p += ln_rate - (k as f64).ln();
        }
        tail
    } else {
        (1.0 - head).max(0.0)
    };
    let total: f64 = out.iter().sum();
    for v in out.iter_mut() {
        *v /= total;
    }
}

/// Poisson count CPT with one rate per parent configuration.
pub fn expand_poisson_count(rates: &[f64], child: &StateSpace, parents: &[&StateSpace]) -> Result<Cpt, CpdError> {
    let ivs = count_intervals(child, "poisson child")?;
    starts_at_zero(ivs, "poisson child")?;
    if !ivs[ivs.len() - 1].is_unbounded() {
        return Err(CpdError::IncompatibleIntervals(
            "poisson child needs an unbounded final interval".into(),
        ));
    }
    let rows = parent_configurations(parents);
    if rates.len() != rows {
        return Err(CpdError::ShapeMismatch(format!(
            "{} rates for {rows} parent configurations",
            rates.len()
        )));
    }
    let mut values = vec![0.0; rows * ivs.len()];
    for (r, &rate) in rates.iter().enumerate() {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(CpdError::ParameterOutOfRange(format!("rate[{r}] = {rate} must be > 0")));
        }
        poisson_row(rate, ivs, &mut values[r * ivs.len()..(r + 1) * ivs.len()]);
    }
    Ok(Cpt::new(ivs.len(), values))
}

/// Binomial(n, p) mass of each child interval.
fn binomial_row(n: u64, p: f64, child: &StateSpace, ln_fact: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    if p == 0.0 || n == 0 {
        out[child.interval_of_count(0).expect("coverage checked")] = 1.0;
        return;
    }
    if p == 1.0 {
        out[child.interval_of_count(n).expect("coverage checked")] = 1.0;
        return;
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let nu = n as usize;
    let mut bin = 0;
    for k in 0..=nu {
        let ln_pmf = ln_fact[nu] - ln_fact[k] - ln_fact[nu - k] + k as f64 * ln_p + (nu - k) as f64 * ln_q;
        while !child.intervals().expect("count child")[bin].contains_count(k as u64) {
            bin += 1;
        }
        out[bin] += ln_pmf.exp();
    }
    let total: f64 = out.iter().sum();
    for v in out.iter_mut() {
        *v /= total;
    }
}

/// Binomial thinning: parents are `[count, quality]`, `p` is indexed by the
/// quality state. A count interval stands in for its rounded representative.
pub fn expand_binomial_thinning(
    p: &[f64],
    child: &StateSpace,
    parents: &[&StateSpace],
    tail_factor: f64,
) -> Result<Cpt, CpdError> {
    if parents.len() != 2 {
        return Err(CpdError::ShapeMismatch(format!(
            "binomial thinning needs [count, quality] parents, got {}",
            parents.len()
        )));
    }
    let child_ivs = count_intervals(child, "binomial child")?;
    let parent_ivs = count_intervals(parents[0], "binomial count parent")?;
    let quality = parents[1];
    if p.len() != quality.len() {
        return Err(CpdError::ShapeMismatch(format!(
            "{} probabilities for {} quality states",
            p.len(),
            quality.len()
        )));
    }
    for (i, &v) in p.iter().enumerate() {
        check_probability(&format!("p[{i}]"), v)?;
    }
    starts_at_zero(child_ivs, "binomial child")?;
    let counts: Vec<u64> = parent_ivs.iter().map(|iv| iv.count_representative(tail_factor)).collect();
    let n_max = counts.iter().copied().max().unwrap_or(0);
    if child.interval_of_count(n_max).is_none() {
        return Err(CpdError::IncompatibleIntervals(format!(
            "child intervals do not reach parent count {n_max}"
        )));
    }
    let ln_fact = ln_factorials(n_max as usize);
    let card = child_ivs.len();
    let mut values = vec![0.0; counts.len() * quality.len() * card];
    for (i, &n) in counts.iter().enumerate() {
        for (s, &ps) in p.iter().enumerate() {
            let r = i * quality.len() + s;
            binomial_row(n, ps, child, &ln_fact, &mut values[r * card..(r + 1) * card]);
        }
    }
    Ok(Cpt::new(card, values))
}

/// Deterministic residual: the child interval containing
/// `max(0, rep(first) - rep(second))` gets probability one.
pub fn expand_arith_subtract(child: &StateSpace, parents: &[&StateSpace], tail_factor: f64) -> Result<Cpt, CpdError> {
    if parents.len() != 2 {
        return Err(CpdError::ShapeMismatch(format!(
            "subtract needs exactly 2 parents, got {}",
            parents.len()
        )));
    }
    count_intervals(child, "subtract child")?;
    let a = parents[0]
        .representatives(tail_factor)
        .ok_or_else(|| CpdError::IncompatibleIntervals("subtract minuend is not a count node".into()))?;
    let b = parents[1]
        .representatives(tail_factor)
        .ok_or_else(|| CpdError::IncompatibleIntervals("subtract subtrahend is not a count node".into()))?;
    let card = child.len();
    let cards = [a.len(), b.len()];
    let mut values = vec![0.0; a.len() * b.len() * card];
    let mut states = [0usize; 2];
    for r in 0..a.len() * b.len() {
        decode_row(r, &cards, &mut states);
        let d = (a[states[0]] - b[states[1]]).max(0.0);
        let idx = child.interval_of_value(d).ok_or_else(|| {
            CpdError::IncompatibleIntervals(format!("difference {d} is not covered by the child intervals"))
        })?;
        values[r * card + idx] = 1.0;
    }
    Ok(Cpt::new(card, values))
}
