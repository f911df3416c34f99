//! Independent oracles.

mod fd;
mod mc;
mod merton;

pub use fd::{fd_solve_reduced, FdConfig, FdSolution};
pub use mc::{mc_bond_price, mc_bond_price_with_rule, DefaultRule, McConfig, McEstimate};
pub use merton::merton_debt;
