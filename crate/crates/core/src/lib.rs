pub mod bench;
pub mod cli;
pub mod cube;
pub mod error;
pub mod formulas;
pub mod geometry;
pub mod influence;
pub mod oracle;
pub mod solvers;
