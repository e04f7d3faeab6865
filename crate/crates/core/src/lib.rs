//! Exact optimal quantization of the self-similar probability measure
//! supported by the Sierpinski carpet.
//!
//! The carpet here is the attractor of the four corner similitudes of ratio
//! 1/3 on the unit square, each carrying probability 1/4. Everything in
//! `measure`, `geometry`, `distortion` and `optimal` is computed in exact
//! rational arithmetic; floating point only shows up in `asymptotics` and in
//! the f64 pre-filters used to speed up nearest-site decisions.

pub mod asymptotics;
pub mod distortion;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod optimal;
pub mod oracle;
pub mod point;

pub use error::{Error, Result};
pub use geometry::Codebook;
pub use measure::Word;
pub use point::{Point, Rational};
