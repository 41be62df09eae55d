//! Bayesian-network toolkit for software defect prediction.
//!
//! The [`bn`] module holds the generic network, inference and oracle code,
//! [`cpd`] the conditional distribution families. The remaining modules
//! build on those.

pub mod bn;
pub mod calibration;
pub mod cpd;
pub mod defect;
pub mod fault_tree;
pub mod io;
pub mod sensitivity;
