pub mod classical;
pub mod coherence;
pub mod engine;
pub mod error;
pub mod harness;
pub mod kb;
pub mod logic;
pub mod preferential;
pub mod lp;
pub mod rational;
pub mod semantics;
pub mod text;

pub use error::{Error, Result};
pub use rational::Rational;
