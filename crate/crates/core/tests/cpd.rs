use heisenbn::bn::{Interval, StateSpace, DEFAULT_TAIL_FACTOR};
use heisenbn::cpd::{Cpd, Cpt, NoisyOrCpd, RankedCpd, ROW_TOLERANCE};
use proptest::prelude::*;

fn assert_rows(cpt: &Cpt) -> Result<(), TestCaseError> {
    for row in cpt.rows() {
        prop_assert!(row.iter().all(|&x| (0.0..=1.0).contains(&x)), "{row:?}");
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= ROW_TOLERANCE, "{row:?}");
    }
    Ok(())
}

/// Count intervals from 0 with the given widths, the last one unbounded.
fn intervals() -> impl Strategy<Value = StateSpace> {
    (any::<bool>(), prop::collection::vec(1u64..40, 1..8)).prop_map(|(point_zero, widths)| {
        let mut out = Vec::new();
        let mut lo = 0;
        if point_zero {
            out.push(Interval::point(0));
            lo = 1;
        }
        for w in widths {
            out.push(Interval::bounded(lo, lo + w - 1));
            lo += w;
        }
        out.push(Interval::unbounded(lo));
        StateSpace::counts(out).unwrap()
    })
}

proptest! {
    #[test]
    fn ranked_rows(
        weights in prop::collection::vec(0.05f64..5.0, 1..4),
        variance in 1e-4f64..1.0,
        flip in any::<u8>(),
    ) {
        let n = weights.len();
        let reversed: Vec<usize> = (0..n).filter(|i| flip >> i & 1 == 1).collect();
        let ranked = StateSpace::ranked();
        let parents: Vec<&StateSpace> = vec![&ranked; n];
        let cpd = Cpd::Ranked(RankedCpd::new(weights, variance).with_reversed(reversed));
        let cpt = cpd.expand(&ranked, &parents, DEFAULT_TAIL_FACTOR).unwrap();
        prop_assert_eq!(cpt.num_rows(), 5usize.pow(n as u32));
        assert_rows(&cpt)?;
    }

    #[test]
    fn poisson_rows(child in intervals(), rates in prop::collection::vec(0.0f64..300.0, 5)) {
        let ranked = StateSpace::ranked();
        let cpt = Cpd::Poisson { rates }.expand(&child, &[&ranked], DEFAULT_TAIL_FACTOR).unwrap();
        assert_rows(&cpt)?;
    }

    #[test]
    fn binomial_rows(counts in intervals(), p in prop::collection::vec(0.0f64..=1.0, 5)) {
        let ranked = StateSpace::ranked();
        let cpt = Cpd::Binomial { p }.expand(&counts, &[&counts, &ranked], DEFAULT_TAIL_FACTOR).unwrap();
        prop_assert_eq!(cpt.num_rows(), counts.len() * 5);
        assert_rows(&cpt)?;
    }

    #[test]
    fn subtract_rows_are_deterministic(counts in intervals()) {
        let cpt = Cpd::Subtract.expand(&counts, &[&counts, &counts], DEFAULT_TAIL_FACTOR).unwrap();
        assert_rows(&cpt)?;
        for row in cpt.rows() {
            prop_assert_eq!(row.iter().filter(|&&x| x == 1.0).count(), 1);
        }
    }

    #[test]
    fn noisy_or_rows(q in prop::collection::vec(0.0f64..=1.0, 1..7), leak in 0.0f64..=1.0) {
        let binary = StateSpace::binary();
        let parents: Vec<&StateSpace> = vec![&binary; q.len()];
        let cpt = Cpd::NoisyOr(NoisyOrCpd::new(q, leak)).expand(&binary, &parents, DEFAULT_TAIL_FACTOR).unwrap();
        assert_rows(&cpt)?;
    }
}
