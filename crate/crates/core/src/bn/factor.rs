//! Dense factors over discrete variables. Values are row-major with the last
//! variable varying fastest.

use crate::cpd::Cpt;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * cards[i + 1];
    }
    out
}

/// Step an odometer over `cards`, moving each tracked offset by its stride.
/// Returns false after the last assignment.
#[inline]
fn advance<const N: usize>(assign: &mut [usize], cards: &[usize], offsets: &mut [usize; N], steps: [&[usize]; N]) -> bool {
    for l in (0..assign.len()).rev() {
        assign[l] += 1;
        for t in 0..N {
            offsets[t] += steps[t][l];
        }
        if assign[l] < cards[l] {
            return true;
        }
        for t in 0..N {
            offsets[t] -= steps[t][l] * cards[l];
        }
        assign[l] = 0;
    }
    false
}

impl Factor {
    pub fn scalar(v: f64) -> Self {
        Factor { vars: Vec::new(), cards: Vec::new(), values: vec![v] }
    }

    pub fn new(vars: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), cards.iter().product::<usize>());
        Factor { vars, cards, values }
    }

    /// CPT of `child` over `[parents..., child]`.
    pub fn from_cpt(child: usize, parents: &[usize], parent_cards: &[usize], cpt: &Cpt) -> Self {
        let mut vars = parents.to_vec();
        vars.push(child);
        let mut cards = parent_cards.to_vec();
        cards.push(cpt.child_card());
        Factor { vars, cards, values: cpt.values().to_vec() }
    }

    pub fn unary(var: usize, values: Vec<f64>) -> Self {
        Factor { vars: vec![var], cards: vec![values.len()], values }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn contains(&self, var: usize) -> bool {
        self.vars.contains(&var)
    }

    fn position(&self, var: usize) -> Option<usize> {
        self.vars.iter().position(|&v| v == var)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn product(&self, other: &Factor) -> Factor {
        if other.vars.is_empty() {
            return Factor { values: self.values.iter().map(|v| v * other.values[0]).collect(), ..self.clone() };
        }
        if self.vars.is_empty() {
            return other.product(self);
        }
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let cards: Vec<usize> = vars
            .iter()
            .map(|v| match self.position(*v) {
                Some(p) => self.cards[p],
                None => other.cards[other.position(*v).expect("var from union")],
            })
            .collect();
        let step_of = |f: &Factor| -> Vec<usize> {
            let st = strides(&f.cards);
            vars.iter().map(|v| f.position(*v).map_or(0, |p| st[p])).collect()
        };
        let (sa, sb) = (step_of(self), step_of(other));
        let total: usize = cards.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut assign = vec![0; vars.len()];
        let mut off = [0usize; 2];
        loop {
            values.push(self.values[off[0]] * other.values[off[1]]);
            if !advance(&mut assign, &cards, &mut off, [&sa, &sb]) {
                break;
            }
        }
        Factor { vars, cards, values }
    }

    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(pos) = self.position(var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let out_strides = strides(&cards);
        let mut step: Vec<usize> = Vec::with_capacity(self.vars.len());
        let mut k = 0;
        for i in 0..self.vars.len() {
            if i == pos {
                step.push(0);
            } else {
                step.push(out_strides[k]);
                k += 1;
            }
        }
        let mut values = vec![0.0; cards.iter().product()];
        let mut assign = vec![0; self.vars.len()];
        let mut off = [0usize; 1];
        for &v in &self.values {
            values[off[0]] += v;
            advance(&mut assign, &self.cards, &mut off, [&step]);
        }
        Factor { vars, cards, values }
    }

    /// Fix `var` to `state` and drop it from the scope.
    pub fn reduce(&self, var: usize, state: usize) -> Factor {
        let Some(pos) = self.position(var) else {
            return self.clone();
        };
        let in_strides = strides(&self.cards);
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let mut step = in_strides.clone();
        step.remove(pos);
        let total: usize = cards.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut assign = vec![0; vars.len()];
        let mut off = [state * in_strides[pos]];
        loop {
            values.push(self.values[off[0]]);
            if vars.is_empty() || !advance(&mut assign, &cards, &mut off, [&step]) {
                break;
            }
        }
        Factor { vars, cards, values }
    }

    /// Reorder the scope to exactly `order` (which must be a permutation of
    /// the current scope).
    pub fn permuted(&self, order: &[usize]) -> Factor {
        debug_assert_eq!(order.len(), self.vars.len());
        let st = strides(&self.cards);
        let step: Vec<usize> = order.iter().map(|v| st[self.position(*v).expect("var in scope")]).collect();
        let cards: Vec<usize> = order.iter().map(|v| self.cards[self.position(*v).unwrap()]).collect();
        let mut values = Vec::with_capacity(self.values.len());
        let mut assign = vec![0; order.len()];
        let mut off = [0usize];
        loop {
            values.push(self.values[off[0]]);
            if order.is_empty() || !advance(&mut assign, &cards, &mut off, [&step]) {
                break;
            }
        }
        Factor { vars: order.to_vec(), cards, values }
    }
}
