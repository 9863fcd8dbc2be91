//! Computational toolkit for the algebra of entire functions under weighted
//! Hadamard multiplication `(f * g)^(n) = p(n) f^(n) g^(n)`.
//!
//! Elements are stored in normalized coordinates `u(n) = p(n) f^(n)` as
//! eventually periodic sequences, which makes the divisibility, ideal, corona
//! and idempotent criteria exactly decidable. Matrices over the algebra are
//! handled one coefficient position at a time.

pub mod algebra;
pub mod coeffseq;
pub mod dense;
pub mod error;
pub mod ideals;
pub mod json;
pub mod matalg;
pub mod weights;

pub use algebra::{Certainty, Certified, Element};
pub use coeffseq::{EpSeq, GenSeq, Layout};
pub use error::{Error, Result, SeqError, WeightError};
pub use weights::{Weight, WeightRegistry};

pub type C64 = num_complex::Complex64;
