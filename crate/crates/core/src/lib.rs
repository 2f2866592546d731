//! Simulation, shadow-kernel classification and optimization of Floquet
//! quantum circuits: kicked-Ising time crystals, brickwork XYZ circuits and
//! their spectral form factors.

pub mod campaign;
pub mod circuits;
pub mod config;
pub mod error;
pub mod hac;
pub mod interest;
pub mod kernel;
pub mod optimizer;
pub mod seeding;
pub mod selftest;
pub mod shadows;
pub mod spectral;
pub mod statevector;

pub use error::{Error, Result};
