//! Bayesian learning of concept categories and structured feature types.
//!
//! The crate is organised around the pipeline it supports:
//!
//! - [`corpus`]: turn tokenized documents and a concept lexicon into stimuli.
//! - [`sampler`]: the joint category / feature-type model and its collapsed
//!   Gibbs sampler, plus a forward simulator for synthetic data.
//! - [`baselines`]: co-occurrence + k-means and a BayesCat-style mixture.
//! - [`eval`]: clustering metrics against a gold standard and concept
//!   prediction with ranking metrics.
//! - [`intruder`]: generation and scoring of intrusion tasks for human
//!   evaluation, including Fleiss' kappa.

pub mod baselines;
pub mod categorization;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fsutil;
pub mod intruder;
pub mod math;
pub mod sampler;

pub use categorization::Categorization;
pub use corpus::{Stimulus, StimulusSet, Vocabulary};
pub use error::{Error, Result};
pub use sampler::{Hyperparams, ModelState, Observations};
