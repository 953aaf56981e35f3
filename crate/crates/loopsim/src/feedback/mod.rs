//! The iterated feedback loop: configuration, selection model, rating
//! synthesis, the engine and checkpointing.

mod acceptance;
mod checkpoint;
mod config;
mod engine;
mod events;
mod rating;

pub use acceptance::{
    acceptance_probabilities, sample_selection, AcceptanceDistribution, AcceptanceEntry,
};
pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointHeader};
pub use config::{ExclusionMode, SimulationConfig};
pub use engine::{
    predict_next_popularity, run_simulation, IterationOutput, Simulation, SimulationRun,
    FEMALE_GROUP, MALE_GROUP,
};
pub use events::{write_events, SelectionEvent};
pub use rating::{synthesize_rating, synthesize_rating_with_noise};
