//! Competitive worm propagation on sensor networks, its exact compilation to a
//! complex-valued layered network, and gradient-based recovery of the model
//! parameters from infection snapshots.

pub mod compiler;
pub mod cvnn;
pub mod datagen;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod learning;
pub mod propagation;
pub mod state;

pub use error::{Error, Result};
pub use graph::{worm_levels, ModelParams, Topology, WormIndex, WsnGraph};
pub use propagation::{
    candidate_worms, exhaustive_oracle, propagate, resolve_infection, step, PropagationTrace,
};
pub use state::{decode_status, encode_status, node_loss, AllInfectionMatrix, InfectionState};
