use serde::{Deserialize, Serialize};

use super::likelihood::{RecordKernel, SharedTables};
use super::{CalibrationError, Priors, ProjectRecord};
use crate::bn::DEFAULT_TAIL_FACTOR;
use crate::defect::{DefectModelParams, DefectTemplate};

/// Grid search resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitSettings {
    /// Spacing of the coarse probability grid.
    pub probability_step: f64,
    /// Points in the coarse geometric rate grid.
    pub rate_points: usize,
    /// Refinement stages after the coarse grid; each one searches +-1 coarse
    /// step around the incumbent at ten times the resolution.
    pub refinements: usize,
    /// Coordinate sweeps per stage.
    pub sweeps: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings { probability_step: 0.05, rate_points: 25, refinements: 2, sweeps: 2 }
    }
}

impl FitSettings {
    fn validate(&self) -> Result<(), CalibrationError> {
        if !(self.probability_step > 0.0 && self.probability_step < 0.5) {
            return Err(CalibrationError::InvalidSettings(format!(
                "probability_step = {} must be in (0, 0.5)",
                self.probability_step
            )));
        }
        if self.rate_points < 2 {
            return Err(CalibrationError::InvalidSettings("rate_points must be >= 2".into()));
        }
        if self.sweeps == 0 {
            return Err(CalibrationError::InvalidSettings("sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordFit {
    pub name: Option<String>,
    pub log_likelihood_before: f64,
    pub log_likelihood_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterChange {
    pub parameter: String,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub records: Vec<RecordFit>,
    pub log_likelihood_before: f64,
    pub log_likelihood_after: f64,
    pub log_prior_before: f64,
    pub log_prior_after: f64,
    pub objective_before: f64,
    pub objective_after: f64,
    pub improved: bool,
    pub evaluations: usize,
    /// Every fitted parameter, in a fixed order.
    pub changes: Vec<ParameterChange>,
}

const PROB_MIN: f64 = 1e-3;
const PROB_MAX: f64 = 1.0 - 1e-3;

#[derive(Debug, Clone, Copy)]
enum Coord {
    Rate(usize),
    Detection(usize),
    Manifestation(usize),
}

impl Coord {
    fn all() -> Vec<Coord> {
        let mut v: Vec<Coord> = (0..5).map(Coord::Rate).collect();
        v.extend((0..5).map(Coord::Detection));
        // manifestation under usage None is pinned at zero
        v.extend((1..5).map(Coord::Manifestation));
        v
    }

    fn name(self) -> String {
        match self {
            Coord::Rate(i) => format!("insertion_rates[{i}]"),
            Coord::Detection(i) => format!("detection[{i}]"),
            Coord::Manifestation(i) => format!("manifestation[{i}]"),
        }
    }

    fn get(self, p: &DefectModelParams) -> f64 {
        match self {
            Coord::Rate(i) => p.insertion_rates[i],
            Coord::Detection(i) => p.detection[i],
            Coord::Manifestation(i) => p.manifestation[i],
        }
    }
}

struct Search<'a> {
    params: DefectModelParams,
    init: &'a DefectModelParams,
    priors: Priors,
    kernels: Vec<RecordKernel>,
    tables: SharedTables,
    evaluations: usize,
}

impl<'a> Search<'a> {
    fn new(records: &[ProjectRecord], init: &'a DefectModelParams, priors: Priors) -> Result<Self, CalibrationError> {
        let template = DefectTemplate::new(init.clone())?;
        let kernels = records
            .iter()
            .map(|r| RecordKernel::new(&template, r))
            .collect::<Result<Vec<_>, _>>()?;
        let horizons: std::collections::BTreeSet<u32> = kernels.iter().map(|k| k.horizon()).collect();
        let tables = SharedTables::new(init, horizons, DEFAULT_TAIL_FACTOR)?;
        Ok(Search { params: init.clone(), init, priors, kernels, tables, evaluations: 0 })
    }

    fn set(&mut self, c: Coord, v: f64) -> Result<(), CalibrationError> {
        match c {
            Coord::Rate(i) => {
                self.params.insertion_rates[i] = v;
                for k in &mut self.kernels {
                    k.set_rate(i, v, &self.params.count_intervals);
                }
            }
            Coord::Detection(i) => {
                self.params.detection[i] = v;
                self.tables.set_detection(&self.params.detection)?;
            }
            Coord::Manifestation(i) => {
                self.params.manifestation[i] = v;
                self.tables.set_manifestation(&self.params)?;
            }
        }
        Ok(())
    }

    fn record_logliks(&self) -> Vec<f64> {
        self.kernels.iter().map(|k| k.log_likelihood(&self.tables)).collect()
    }

    fn log_prior(&self) -> f64 {
        let s = self.priors.pseudo_count;
        let centered = |p: f64, p0: f64| {
            let mut t = 0.0;
            if p0 > 0.0 {
                t += p0 * p.ln();
            }
            if p0 < 1.0 {
                t += (1.0 - p0) * (-p).ln_1p();
            }
            s * t
        };
        let beta = |p: f64, (a, b): (f64, f64)| (a - 1.0) * p.ln() + (b - 1.0) * (-p).ln_1p();
        let mut total = 0.0;
        for c in Coord::all() {
            let (v, v0) = (c.get(&self.params), c.get(self.init));
            total += match c {
                Coord::Rate(_) => s * (v.ln() - v / v0),
                Coord::Detection(i) => match self.priors.detection_beta {
                    Some(b) => beta(v, b[i]),
                    None => centered(v, v0),
                },
                Coord::Manifestation(i) => match self.priors.manifestation_beta {
                    Some(b) => beta(v, b[i]),
                    None => centered(v, v0),
                },
            };
        }
        total
    }

    fn objective(&mut self) -> f64 {
        self.evaluations += 1;
        let v = self.record_logliks().iter().sum::<f64>() + self.log_prior();
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    /// Move `c` to the best candidate; ties keep the incumbent.
    fn line_search(&mut self, c: Coord, candidates: &[f64], current: f64) -> Result<f64, CalibrationError> {
        let start = c.get(&self.params);
        let (mut best_v, mut best) = (start, current);
        for &v in candidates {
            if v == start {
                continue;
            }
            self.set(c, v)?;
            let obj = self.objective();
            if obj > best {
                best = obj;
                best_v = v;
            }
        }
        self.set(c, best_v)?;
        Ok(best)
    }
}

fn probability_grid(settings: &FitSettings, stage: usize, current: f64) -> Vec<f64> {
    let step = settings.probability_step;
    if stage == 0 {
        let n = (1.0 / step).round() as usize;
        let mut g = vec![0.01];
        g.extend((1..n).map(|i| i as f64 * step));
        g.push(0.99);
        return g;
    }
    let fine = step / 10f64.powi(stage as i32);
    (-10..=10)
        .map(|j| (current + j as f64 * fine).clamp(PROB_MIN, PROB_MAX))
        .collect()
}

fn rate_grid(settings: &FitSettings, (lo, hi): (f64, f64), stage: usize, current: f64) -> Vec<f64> {
    let log_step = (hi / lo).ln() / (settings.rate_points - 1) as f64;
    if stage == 0 {
        return (0..settings.rate_points).map(|i| lo * (i as f64 * log_step).exp()).collect();
    }
    let fine = log_step / 10f64.powi(stage as i32);
    (-10..=10)
        .map(|j| (current * (j as f64 * fine).exp()).clamp(lo, hi))
        .collect()
}

/// Sum of per-record log-likelihoods under `params`.
pub fn log_likelihood(records: &[ProjectRecord], params: &DefectModelParams) -> Result<f64, CalibrationError> {
    let s = Search::new(records, params, Priors::default())?;
    Ok(s.record_logliks().iter().sum())
}

/// Maximum a posteriori fit of the count parameters, starting from `init`.
/// The search is deterministic and only accepts strict improvements, so the
/// objective never decreases.
pub fn fit_parameters(
    records: &[ProjectRecord],
    init: &DefectModelParams,
    priors: &Priors,
    settings: &FitSettings,
) -> Result<(DefectModelParams, FitReport), CalibrationError> {
    if records.is_empty() {
        return Err(CalibrationError::EmptyRecords);
    }
    priors.validate()?;
    settings.validate()?;
    let mut s = Search::new(records, init, *priors)?;
    let before = s.record_logliks();
    let prior_before = s.log_prior();
    let objective_before = s.objective();

    let mut current = objective_before;
    for stage in 0..=settings.refinements {
        for _ in 0..settings.sweeps {
            let start = current;
            for c in Coord::all() {
                let grid = match c {
                    Coord::Rate(i) => rate_grid(settings, priors.rate_bounds[i], stage, c.get(&s.params)),
                    _ => probability_grid(settings, stage, c.get(&s.params)),
                };
                current = s.line_search(c, &grid, current)?;
            }
            if current == start {
                break;
            }
        }
    }

    let after = s.record_logliks();
    let prior_after = s.log_prior();
    let report = FitReport {
        records: records
            .iter()
            .zip(before.iter().zip(&after))
            .map(|(r, (b, a))| RecordFit {
                name: r.scenario.name.clone(),
                log_likelihood_before: *b,
                log_likelihood_after: *a,
            })
            .collect(),
        log_likelihood_before: before.iter().sum(),
        log_likelihood_after: after.iter().sum(),
        log_prior_before: prior_before,
        log_prior_after: prior_after,
        objective_before,
        objective_after: current,
        improved: current > objective_before,
        evaluations: s.evaluations,
        changes: Coord::all()
            .into_iter()
            .map(|c| ParameterChange { parameter: c.name(), before: c.get(init), after: c.get(&s.params) })
            .collect(),
    };
    Ok((s.params, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defect::{Answer, ProjectScenario};

    fn record(level: usize, kloc: f64, found: u64, field: Option<u64>) -> ProjectRecord {
        ProjectRecord {
            scenario: ProjectScenario::uniform(level, kloc, 8000.0, Answer::point(3)),
            observed_found_verification: found,
            observed_field_first_year: field,
        }
    }

    fn quick() -> FitSettings {
        FitSettings { refinements: 1, sweeps: 1, ..FitSettings::default() }
    }

    #[test]
    fn grids() {
        let g = probability_grid(&FitSettings::default(), 0, 0.5);
        assert_eq!(g.len(), 21);
        assert_eq!((g[0], g[20]), (0.01, 0.99));
        let f = probability_grid(&FitSettings::default(), 1, 0.0015);
        assert!(f.iter().all(|p| (PROB_MIN..=PROB_MAX).contains(p)));
        let r = rate_grid(&FitSettings::default(), (0.05, 50.0), 0, 1.0);
        assert_eq!(r.len(), 25);
        assert!((r[0] - 0.05).abs() < 1e-15 && (r[24] - 50.0).abs() < 1e-9);
    }

    #[test]
    fn fit_never_worsens_the_objective() {
        let records = vec![record(2, 20.0, 80, Some(15)), record(3, 10.0, 8, None), record(1, 15.0, 60, Some(40))];
        let (_, report) = fit_parameters(&records, &DefectModelParams::default(), &Priors::default(), &quick()).unwrap();
        assert!(report.objective_after >= report.objective_before);
        assert!(report.improved);
        assert_eq!(report.changes.len(), 14);
    }

    #[test]
    fn fit_is_deterministic() {
        let records = vec![record(2, 20.0, 30, Some(4)), record(4, 40.0, 25, Some(1))];
        let a = fit_parameters(&records, &DefectModelParams::default(), &Priors::default(), &quick()).unwrap();
        let b = fit_parameters(&records, &DefectModelParams::default(), &Priors::default(), &quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strong_prior_pins_parameters() {
        let records = vec![record(2, 20.0, 150, Some(60))];
        let priors = Priors::with_pseudo_count(1e6);
        let init = DefectModelParams::default();
        let (fitted, report) = fit_parameters(&records, &init, &priors, &quick()).unwrap();
        for c in &report.changes {
            let rel = (c.after - c.before).abs() / c.before.max(1e-12);
            assert!(rel < 0.02, "{} moved {} -> {}", c.parameter, c.before, c.after);
        }
        assert_eq!(fitted.manifestation[0], 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let p = DefectModelParams::default();
        assert_eq!(
            fit_parameters(&[], &p, &Priors::default(), &quick()).unwrap_err(),
            CalibrationError::EmptyRecords
        );
        let r = [record(2, 1.0, 1, None)];
        let mut bad = Priors::default();
        bad.rate_bounds[2] = (1.0, 0.5);
        assert!(matches!(fit_parameters(&r, &p, &bad, &quick()), Err(CalibrationError::InvalidPriors(_))));
    }
}
