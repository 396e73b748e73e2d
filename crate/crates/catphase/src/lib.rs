//! Phase estimation with unbalanced-cat probes.
//!
//! This crate models a single-mode probe prepared in a vacuum/Fock
//! superposition, the two-outcome measurement that reads a phase shift off
//! it, and everything needed to quantify the scheme's precision:
//!
//! - [`model`] — probe state, outcome probabilities, Fisher informations,
//!   and the dimensionless validity conditions;
//! - [`likelihood`] — exact and Gaussian m-shot likelihoods, the
//!   maximum-likelihood inversion, and the estimator's sampling
//!   distribution on a grid;
//! - [`bounds`] — Heisenberg reference scales, Cramer-Rao (classical,
//!   quantum, Bayesian), and the Ziv-Zakai bound in exact-integral and
//!   closed form;
//! - [`montecarlo`] — reproducible simulation campaigns with an exhaustive
//!   small-m oracle;
//! - [`quad`] — the adaptive Simpson quadrature shared by the bounds.

pub mod bounds;
pub mod error;
pub mod likelihood;
pub mod model;
pub mod montecarlo;
pub mod quad;

pub use error::{Error, Result};
pub use model::{Outcome, Phase, PriorWindow, ProbeSpec};
