pub mod cli;
pub mod enumerator;
pub mod error;
pub mod groupring;
pub mod homology;
pub mod presentations;
pub mod series;
pub mod signatures;
pub mod suite;
pub mod zlinalg;

pub use error::{Error, Result};
