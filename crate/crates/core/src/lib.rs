//! reliq: reliable computation with noisy gates over q-ary alphabets.
//!
//! The library models computation by k-ary gates whose outputs pass through a
//! q-ary symmetric noise channel. It provides:
//!
//! - probability vectors over the alphabet with exact-rational and f64
//!   arithmetic modes ([`simplex`], [`weight`]);
//! - gate truth tables, structural gate analysis, and exact pushforward of
//!   product distributions through noisy formulas ([`gates`]);
//! - the error coefficients of the plurality gate, computed by two
//!   independent routes ([`coeffs`]);
//! - scalar denoising dynamics and their thresholds: the transcritical point
//!   where the balanced fixed point loses stability, and the saddle-node
//!   point where reliable fixed points disappear ([`thresholds`]);
//! - the two-input denoiser and error-signaling NAND dynamics on the q=3
//!   simplex, their fixed points, a Lyapunov certificate, and vector-field
//!   grids for plotting ([`dynamics`]);
//! - noise propagation through structure-preserving gate families and the
//!   multiplication counterexample ([`snp`]);
//! - seeded Monte Carlo experiments over noisy formulas ([`montecarlo`]);
//! - a programmatic self-test suite backing the CLI ([`selftest`]).

pub mod coeffs;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod montecarlo;
pub mod selftest;
pub mod simplex;
pub mod snp;
pub mod thresholds;
pub mod weight;

pub use error::{Error, Result};
