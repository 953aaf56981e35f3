//! Offline simulation of the recommendation feedback loop.
//!
//! Starting from a loaded rating dataset, each iteration splits the
//! data, fits a recommender (`most_popular`, `user_knn` or `bpr`),
//! serves a ranked list to every user, draws item selections with
//! rank-exponential acceptance probabilities, synthesizes ratings for
//! the selected items and feeds them back into the data. Per-iteration
//! reports track popularity bias, catalog coverage and the divergence
//! of user and group genre distributions from their starting points.
//!
//! Runs are deterministic: one master seed derives independent RNG
//! streams per iteration, purpose and user, so results do not depend on
//! thread count.

pub mod dataset;
pub mod error;
pub mod feedback;
pub mod metrics;
pub mod recommenders;
pub mod report;
pub mod rng;

pub use dataset::{density, load_movielens, Dataset, RatingStore};
pub use error::{Error, Result};
pub use feedback::{run_simulation, Simulation, SimulationConfig, SimulationRun};
pub use recommenders::Algorithm;
pub use report::{IterationReport, CSV_HEADER};
