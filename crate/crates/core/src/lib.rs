//! Colored Jones polynomial of the figure-eight knot, evaluated exactly at
//! `q = exp(ξ/N)`, together with the geometric data of its asymptotic expansion.

pub mod cjones;
pub mod dilog;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod precision;
pub mod qdilog;
pub mod quad;
pub mod saddle;

pub use error::{Error, Result};
pub use precision::{adaptive_eval, rel_dist, BigComplex, EvalRequest};
