//! State-robust equilibrium (SRE) diagnostics for finite-strategy population
//! games with affine payoffs.

pub mod cone;
pub mod diagnostics;
pub mod gallery;
pub mod game;
pub mod lp;
pub mod nash;
pub mod oracle;
pub mod structure;
pub mod uncertainty;

pub use game::{
    AffineBlock, Deviation, GameError, GapTable, NashCheck, PopulationGame, PopulationSpec,
    StateVector,
};
