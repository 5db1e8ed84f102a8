//! Exhaustive analysis of Abalone on small hexagonal boards.
//!
//! The crate is split into
//! - [`geometry`]: board shapes, cells, directions and the symmetry group,
//! - [`rules`]: constellations, move generation and terminal detection,
//! - [`canonical`]: symmetry reduction, class enumeration and patterns,
//! - [`store`]: state indexing and the on-disk database format,
//! - [`solver`]: retrograde analysis and queries on solved databases,
//! - [`fixtures`]: named positions used throughout the tests and examples.

pub mod canonical;
pub mod fixtures;
pub mod geometry;
pub mod rules;
pub mod solver;
pub mod store;

pub use geometry::{Board, BoardShape, Cell, Direction};
pub use rules::{Color, Constellation, GameConfig, Move};
pub use solver::{solve, GameValue, Outcome, OutcomeClass, SolveOptions, SolvedDatabase};
pub use store::{StateIndex, StateSpace};
