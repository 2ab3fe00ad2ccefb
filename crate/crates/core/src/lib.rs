//! State-preparation circuit compiler and branch-enumerating simulator.
//!
//! A non-negative amplitude vector is turned into an [`tree::AmplitudeTree`]
//! of single-qubit rotation angles and compiled into a [`circuit::Circuit`]
//! by one of three synthesizers in [`synth`]: top-down time encoding,
//! divide-and-conquer with controlled swaps and measurement-based
//! disentangling, or a hybrid of the two. The [`sim`] module checks that every
//! measurement branch of a compiled circuit leaves the data register in the
//! target state.

pub mod circuit;
pub mod cli;
pub mod random;
pub mod resources;
pub mod sim;
pub mod synth;
pub mod tree;
pub mod walgate;
