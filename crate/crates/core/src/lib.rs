//! Core library for decoupled human-object interaction synthesis and
//! risk-aware navigation.
//!
//! The crate splits into two halves that meet in the command-line tools:
//!
//! * Motion synthesis: diffusion schedules and samplers over trajectory
//!   states, objective-guided denoising, kinematic and adversarial training
//!   losses, and evaluation metrics for generated interactions.
//! * Navigation: occupancy grids with exact distance-transform inflation,
//!   risk-weighted A*, and a predictive re-planning loop that trades waiting
//!   against detours around a moving obstacle.
//!
//! Everything is deterministic given explicit seeds; no global RNG state.

pub mod diffusion;
pub mod dynaplan;
mod edt;
pub mod error;
pub mod geometry;
pub mod landscape;
pub mod losses;
pub mod metrics;
pub mod planner;
pub mod scene_grid;

pub use error::{Error, Result};
