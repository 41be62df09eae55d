use std::sync::Mutex;

use heisenbn::bn::{Evidence, Network};
use heisenbn::defect::{DefectTemplate, ProjectScenario};

pub(crate) enum Subject {
    Model {
        network: Network,
    },
    Scenario {
        template: Box<DefectTemplate>,
        scenario: ProjectScenario,
        network: Network,
        /// Evidence implied by the scenario answers.
        base: Evidence,
    },
}

pub(crate) struct Committed {
    pub evidence: Evidence,
    pub version: u64,
}

pub(crate) struct Session {
    pub id: String,
    pub created_at: u64,
    pub subject: Subject,
    pub committed: Mutex<Committed>,
}

impl Session {
    pub fn network(&self) -> &Network {
        match &self.subject {
            Subject::Model { network } | Subject::Scenario { network, .. } => network,
        }
    }

    /// Committed evidence and its version.
    pub fn snapshot(&self) -> (Evidence, u64) {
        let c = self.committed.lock().expect("session lock");
        (c.evidence.clone(), c.version)
    }

    /// Evidence inference runs against: the scenario evidence, if any, with
    /// `committed` on top.
    pub fn effective(&self, committed: &Evidence) -> Evidence {
        match &self.subject {
            Subject::Model { .. } => committed.clone(),
            Subject::Scenario { base, .. } => base.overlaid(committed),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.subject {
            Subject::Model { .. } => "model",
            Subject::Scenario { .. } => "scenario",
        }
    }
}
