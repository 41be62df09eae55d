use serde::Serialize;

use super::DefectError;
use crate::bn::RANKED_LABELS;

/// Field-usage levels, ascending. `None` means the product is not used.
pub const USAGE_LABELS: [&str; 5] = ["None", "Low", "Medium", "High", "VeryHigh"];

pub const VERIFICATION_DIMENSIONS: [&str; 3] = ["testing_quality", "review_quality", "verification_type"];
pub const DEVELOPMENT_DIMENSIONS: [&str; 4] =
    ["team_experience", "project_management", "process_maturity", "tool_quality"];
/// Complexity dimensions answered in the questionnaire; the
/// new-functionality rating is carried separately on the scenario.
pub const COMPLEXITY_DIMENSIONS: [&str; 2] = ["requirements_stability", "domain_novelty"];

/// Every dimension a scenario must answer.
pub fn answer_dimensions() -> impl Iterator<Item = &'static str> {
    VERIFICATION_DIMENSIONS
        .into_iter()
        .chain(DEVELOPMENT_DIMENSIONS)
        .chain(COMPLEXITY_DIMENSIONS)
}

/// Soft rating over five ordered levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Answer([f64; 5]);

impl Answer {
    pub fn new(probs: [f64; 5]) -> Result<Self, DefectError> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(DefectError::InvalidAnswer(format!("{probs:?} has a negative or non-finite entry")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DefectError::InvalidAnswer(format!("{probs:?} sums to {sum}, not 1")));
        }
        Ok(Answer(probs))
    }

    /// All weight on level `level` (0 = lowest).
    pub fn point(level: usize) -> Self {
        let mut p = [0.0; 5];
        p[level] = 1.0;
        Answer(p)
    }

    /// Build from `(label, weight)` pairs against `labels`; missing levels
    /// get zero.
    pub fn from_pairs<'a>(labels: &[&str; 5], pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self, DefectError> {
        let mut p = [0.0; 5];
        for (label, w) in pairs {
            let i = labels
                .iter()
                .position(|l| *l == label)
                .ok_or_else(|| DefectError::InvalidAnswer(format!("unknown level '{label}'")))?;
            p[i] += w;
        }
        Answer::new(p)
    }

    pub fn probs(&self) -> &[f64; 5] {
        &self.0
    }

    /// Level index when the answer is a point mass.
    pub fn point_level(&self) -> Option<usize> {
        let mut nz = self.0.iter().enumerate().filter(|(_, p)| **p > 0.0);
        match (nz.next(), nz.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

/// One level of a rating scale with the criteria a rater checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleLevel {
    pub level: &'static str,
    pub criteria: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingScale {
    pub dimension: &'static str,
    pub question: &'static str,
    /// VeryHigh first, as raters read them.
    pub levels: [ScaleLevel; 5],
}

const fn lv(level: &'static str, criteria: &'static str) -> ScaleLevel {
    ScaleLevel { level, criteria }
}

/// Criteria for every questionnaire dimension, plus new-functionality
/// complexity and field usage.
pub fn rating_scales() -> Vec<RatingScale> {
    vec![
        RatingScale {
            dimension: "testing_quality",
            question: "How were dynamic test cases chosen and run?",
            levels: [
                lv("VeryHigh", "Test selection starts from an explicit list of product risks agreed before any test is written; nearly every test runs unattended on each build."),
                lv("High", "Each requirement maps to the tests that cover it and each test names the requirements it covers."),
                lv("Medium", "Tests are derived from requirements, but nobody keeps a record of which test covers which requirement."),
                lv("Low", "Testers pick cases from experience of where bugs usually hide; coverage is not measured."),
                lv("VeryLow", "Testing is improvised by hand with no written cases kept between runs."),
            ],
        },
        RatingScale {
            dimension: "review_quality",
            question: "How were design and code changes reviewed?",
            levels: [
                lv("VeryHigh", "Every change is inspected against a checklist by at least two reviewers independent of the author, and findings are tracked to closure."),
                lv("High", "Every change gets one independent reviewer and review comments are recorded."),
                lv("Medium", "Most changes are reviewed, but reviews are informal and findings are not tracked."),
                lv("Low", "Only selected risky changes are reviewed."),
                lv("VeryLow", "Changes are merged without review."),
            ],
        },
        RatingScale {
            dimension: "verification_type",
            question: "How much of verification relied on analysis rather than execution?",
            levels: [
                lv("VeryHigh", "Critical components are proved against a formal specification and the rest is model-checked or statically analysed with zero open warnings."),
                lv("High", "Static analysis and model checking cover the critical components; testing covers the rest."),
                lv("Medium", "Static analysis runs on all code, with findings triaged; verification is otherwise by testing."),
                lv("Low", "Static analysis is run occasionally and findings are not systematically triaged."),
                lv("VeryLow", "Verification is by testing alone."),
            ],
        },
        RatingScale {
            dimension: "team_experience",
            question: "How familiar was the team with this kind of product?",
            levels: [
                lv("VeryHigh", "Most engineers have shipped several earlier releases of this same product."),
                lv("High", "Most engineers have shipped a comparable product in the same domain."),
                lv("Medium", "About half of the engineers know the domain; the rest are experienced elsewhere."),
                lv("Low", "Few engineers know the domain; most are experienced but new to it."),
                lv("VeryLow", "The team is mostly new to both the domain and the company."),
            ],
        },
        RatingScale {
            dimension: "project_management",
            question: "How was the project planned and tracked?",
            levels: [
                lv("VeryHigh", "A dedicated, professionally qualified project manager estimates effort from historical metrics and reviews progress data every week."),
                lv("High", "A dedicated project manager estimates from historical metrics and reviews progress at each milestone."),
                lv("Medium", "A part-time project manager keeps a schedule, with estimates made by the leads."),
                lv("Low", "Planning is a schedule of milestones with little tracking in between."),
                lv("VeryLow", "No separate project manager; the development manager plans and tracks alongside other duties."),
            ],
        },
        RatingScale {
            dimension: "process_maturity",
            question: "How settled and followed were the development procedures?",
            levels: [
                lv("VeryHigh", "Procedures are documented, audited on this project, and improved from measured results of earlier projects."),
                lv("High", "Procedures are documented and audits confirm they were followed."),
                lv("Medium", "Procedures are documented but compliance is not checked."),
                lv("Low", "Procedures exist only as team habits."),
                lv("VeryLow", "Each engineer works in their own way."),
            ],
        },
        RatingScale {
            dimension: "tool_quality",
            question: "How good were the development and analysis tools?",
            levels: [
                lv("VeryHigh", "Qualified toolchain with integrated static analysis, coverage measurement and automated builds on every change."),
                lv("High", "Mature toolchain with automated builds and coverage measurement."),
                lv("Medium", "Standard toolchain with automated nightly builds."),
                lv("Low", "Builds are partly manual and tooling has known gaps."),
                lv("VeryLow", "Tools are immature or newly adopted for this project."),
            ],
        },
        RatingScale {
            dimension: "requirements_stability",
            question: "How stable and clear were the requirements?",
            levels: [
                lv("VeryHigh", "Requirements come from an external published document and did not change during development."),
                lv("High", "Requirements were baselined early and changed only through a controlled process."),
                lv("Medium", "Requirements were baselined, but a noticeable fraction changed during development."),
                lv("Low", "Requirements changed frequently and were often clarified only during implementation."),
                lv("VeryLow", "There was no agreed requirements baseline."),
            ],
        },
        RatingScale {
            dimension: "domain_novelty",
            question: "How new was the problem domain to the organisation?",
            levels: [
                lv("VeryHigh", "A domain the organisation has never delivered in, with no reusable designs."),
                lv("High", "A new domain, but with related designs to draw on."),
                lv("Medium", "An extension of a domain the organisation already delivers in."),
                lv("Low", "A familiar domain with mostly routine extensions."),
                lv("VeryLow", "A re-release in a domain the organisation has delivered in many times."),
            ],
        },
        RatingScale {
            dimension: "new_functionality_complexity",
            question: "How complex was the new or changed functionality?",
            levels: [
                lv("VeryHigh", "Close interaction with hardware or concurrency at the lowest software levels."),
                lv("High", "System-level code with significant concurrency or timing constraints."),
                lv("Medium", "Application logic with some concurrency."),
                lv("Low", "Mostly sequential application logic."),
                lv("VeryLow", "Configuration, data or interface changes only."),
            ],
        },
        RatingScale {
            dimension: "field_usage",
            question: "How heavily will the release be used in the field during the horizon?",
            levels: [
                lv("VeryHigh", "Deployed at very large volume and exercised continuously."),
                lv("High", "Deployed widely and exercised daily."),
                lv("Medium", "Deployed at moderate volume or used intermittently."),
                lv("Low", "Limited deployment, such as pilot customers."),
                lv("None", "Not deployed at all."),
            ],
        },
    ]
}

/// Labels of a dimension's levels, ascending.
pub fn level_labels(dimension: &str) -> &'static [&'static str; 5] {
    if dimension == "field_usage" {
        &USAGE_LABELS
    } else {
        &RANKED_LABELS
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn scales_cover_every_dimension() {
        let scales = rating_scales();
        let dims: HashSet<&str> = scales.iter().map(|s| s.dimension).collect();
        for d in answer_dimensions().chain(["new_functionality_complexity", "field_usage"]) {
            assert!(dims.contains(d), "{d}");
        }
        for s in &scales {
            let mut labels: Vec<&str> = s.levels.iter().map(|l| l.level).collect();
            labels.reverse();
            assert_eq!(&labels[..], &level_labels(s.dimension)[..], "{}", s.dimension);
            assert!(s.levels.iter().all(|l| !l.criteria.is_empty()));
        }
    }

    #[test]
    fn answers() {
        let a = Answer::from_pairs(&RANKED_LABELS, [("High", 0.8), ("Medium", 0.2)]).unwrap();
        assert_eq!(a.probs(), &[0.0, 0.0, 0.2, 0.8, 0.0]);
        assert_eq!(a.point_level(), None);
        assert_eq!(Answer::point(2).point_level(), Some(2));
        assert!(Answer::new([0.5, 0.4, 0.0, 0.0, 0.0]).is_err());
        assert!(Answer::from_pairs(&RANKED_LABELS, [("Huge", 1.0)]).is_err());
    }
}
