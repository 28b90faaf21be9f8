//! Scheduling lab for a drone with a mobile charger: episodic environment,
//! four-case rewards, a latent hybrid-action policy learner with a
//! pre-trained action decoder, baselines, and an experiment harness.

pub mod env;
pub mod error;
pub mod reward;
pub mod scenario;

pub use error::{Error, Result};
