//! Hadamard fractional integrals and derivatives of smooth functions through
//! an expansion in integer-order derivatives and log-moments, with explicit
//! truncation bounds, quadrature and closed-form references, and an
//! ODE-based solver for a class of fractional differential equations.

// negated float comparisons reject NaN by design
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coefficients;
pub mod error;
pub mod expansion;
pub mod fde;
pub mod function;
pub mod ode;
pub mod operator;
pub mod quadrature;
pub mod reference;
pub mod special;
pub mod table;

pub use error::{Error, Result};
