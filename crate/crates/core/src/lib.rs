//! `ptlab` — a laboratory for pair-partition (Weingarten) calculus over the
//! unitary group, partial-transpose limit laws, and their Monte Carlo
//! verification.
//!
//! The crate has two halves that never share code paths:
//!
//! * **Exact side** — permutations, pairings and set partitions
//!   ([`partition`]), Weingarten functions as exact rationals or rational
//!   functions of the dimension ([`weingarten`], [`ratfunc`]), free
//!   moment/cumulant transforms and limit predictions ([`freeprob`]), and the
//!   diagram-weight identities behind them ([`diagram`]). Everything here is
//!   integer/rational arithmetic; no floats enter a prediction.
//! * **Sampling side** — complex matrix kernels ([`matrix`]), random
//!   ensembles ([`ensemble`]), and deterministic Monte Carlo estimation
//!   ([`mc`]).
//!
//! [`experiment`] compares the two sides and renders verdict tables; the
//! `ptlab` binary exposes the same runs on the command line.

pub mod diagram;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod freeprob;
pub mod linalg;
pub mod matrix;
pub mod mc;
pub mod partition;
pub mod ratfunc;
pub mod scalar;
pub mod weingarten;
pub mod word;

pub use error::{Error, Result};
