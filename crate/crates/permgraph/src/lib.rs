//! Simulation and exact combinatorics for sequentially growing random
//! regular graphs in the permutation model.
//!
//! A `2d`-regular multigraph on `n` vertices is built by summing `d`
//! independent uniform permutation matrices and their transposes. Growing
//! each permutation by Chinese-restaurant insertion and Poissonizing the
//! insertion clock yields a graph-valued process whose short-cycle counts
//! converge to a family of Yule processes with Poisson immigration, indexed
//! by cyclically reduced edge-label words. The crate provides:
//!
//! * [`words`] — exact combinatorics of cyclically reduced words modulo the
//!   dihedral action, with the statistics `|w|`, `h(w)`, `c(w)` and the
//!   doubling/halving moves that drive everything else.
//! * [`graph`] — the growing graph itself: permutation towers, the
//!   Poissonized insertion clock, exact short-cycle and nonbacktracking-walk
//!   counts, and the Chebyshev-polynomial eigenvalue layer.
//! * [`limitproc`] — the limiting Markov process: Poisson immigration of
//!   cycles over words, Yule doubling dynamics, stationary initialization,
//!   time reversal, and closed-form moment formulas.
//! * [`stats`] — validation harness: exact brute-force oracles at tiny
//!   sizes, Monte Carlo gates against the limit laws, the size-biased
//!   conditioned-graph coupling, and total-variation scans.

pub mod counts;
pub mod graph;
pub mod limitproc;
pub mod report;
pub mod seed;
pub mod stats;
pub mod words;

mod kahan;

pub use counts::CountVector;
pub use kahan::KahanSum;
