//! Numerical building blocks shared by the pricing modules.

pub mod normal;
pub mod quadrature;
pub mod roots;
