//! Test support: independent search oracles, seeded random inputs, and a
//! scripted scenario suite shared by integration tests.
//!
//! Nothing in here is a re-export of production search code; the oracles are
//! written against the same cost conventions but with different algorithms,
//! so agreement between the two is evidence rather than tautology.

pub mod grids;
pub mod oracle;
pub mod scenarios;
