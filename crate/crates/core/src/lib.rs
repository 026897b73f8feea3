//! Scheduling crowdsourced software-development tasks.
//!
//! Tasks of a project are placed on a day grid so that dependencies hold,
//! similar tasks do not compete for the same workers, and the predicted
//! failure risk stays low. A genetic search trades project duration against
//! those two risks.

pub mod model;
pub mod oracle;
pub mod platform;
pub mod predictor;
pub mod scheduler;
pub mod similarity;
