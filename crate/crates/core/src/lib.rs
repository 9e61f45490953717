//! Exact spectral analysis of the discrete Preisach memory model.
//!
//! The state of an `N`-element discrete Preisach model (equivalently, a
//! last-in-first-out storage of `N` slots) is a binary string. Raising the
//! input replaces the rightmost `0` with `1`, lowering it replaces the
//! rightmost `1` with `0`. These two moves define a directed graph on `2^N`
//! vertices whose adjacency matrix has a block-hierarchical structure and a
//! characteristic polynomial that factors into Chebyshev polynomials of the
//! second kind.
//!
//! The crate is organised bottom-up:
//!
//! - [`state`]: states, moves and run decompositions.
//! - [`matrix`]: the adjacency matrices, built recursively and from the rules.
//! - [`poly`] and [`chebyshev`]: exact integer polynomials, `U_k` and the
//!   substituted family `U_k(-λ/2)`, and the exact eigenvalue key
//!   [`AngleFraction`].
//! - [`spectrum`] and [`staircase`]: closed-form spectra, the empirical
//!   eigenvalue distribution and its Devil's-staircase limit.
//! - [`eigenvectors`]: explicit eigenvectors and the stationary distribution.
//! - [`stochastic`]: random walks on the graph.
//! - [`oracle`]: brute-force determinants and the executable lemma suite.
//! - [`cli`]: the `hyspectra` command-line front end.

pub mod budget;
pub mod chebyshev;
pub mod cli;
pub mod eigenvectors;
pub mod error;
pub mod fmt;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod spectrum;
pub mod staircase;
pub mod state;
pub mod stochastic;

pub use budget::Budget;
pub use chebyshev::AngleFraction;
pub use error::{Error, Result};
pub use matrix::AdjacencyMatrix;
pub use poly::IntPolynomial;
pub use state::{MemoryState, RunDecomposition, Variant};
