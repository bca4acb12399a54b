//! The riff-shuffle distribution, also known as the minimum negative binomial
//! distribution: two decks of `m` cards are drawn from with probabilities `p`
//! and `q = 1 - p` until one runs out, and the variate is the number of cards
//! taken from the other deck.
//!
//! The crate provides floating-point evaluation ([`distribution`]), an exact
//! rational oracle ([`exact`]), numerical checks of the shape results
//! ([`analysis`]), the two generative samplers ([`sampler`]) and the full
//! verification suite ([`verify`]).

pub mod analysis;
pub mod distribution;
pub mod error;
pub mod exact;
mod hp;
pub mod sampler;
pub mod shape;
pub mod verify;

pub use distribution::{make_params, ModeResult, Params, PmfTable};
pub use error::{Error, Result};
pub use exact::{ExactParams, ExactPmfTable, Rational};
pub use sampler::{GeneratorState, Mechanism, SampleSummary};
pub use shape::{ShapeReport, ViolationReport};
