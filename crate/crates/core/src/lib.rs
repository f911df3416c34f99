//! Pricing of inhomogeneous Black-Scholes terminal value problems with
//! discontinuous data, higher order binary options, and defaultable discrete
//! coupon bonds under Vasicek rates with endogenous default barriers.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod binaries;
pub mod bs_engine;
pub mod cli;
pub mod coupon_bond;
pub mod error;
pub mod math;
pub mod oracles;
pub mod payoff;
pub mod term_model;

pub use error::{Error, Result};
