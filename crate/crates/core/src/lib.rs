pub mod class;
pub mod cli;
pub mod ensembles;
pub mod error;
pub mod eynard_mehta;
pub mod gc_cones;
pub mod heckman;
pub mod kernels;
pub mod minors;
pub mod numerics;
pub mod rng;
pub mod stats;
pub mod verify;

pub use class::{ClassTag, MatrixClass};
pub use error::{Error, Result};
