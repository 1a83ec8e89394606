//! Explicit six-variable Bellman function for weighted Riesz-transform
//! estimates, numerical certification of its properties, and a desk-scale
//! Gauss-space model of the Poisson-A2 machinery.

pub mod bellman;
pub mod error;
pub mod estimates;
pub mod gauss;
pub mod quadrature;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
