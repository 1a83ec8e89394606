//! The one-dimensional Gauss space: Ornstein–Uhlenbeck operator, Hermite
//! spectral semigroups on functions and one-forms, the Riesz transform,
//! weights, Poisson flows and the Poisson-A2 characteristic.

pub mod flow;
pub mod hermite;
pub mod inequalities;
pub mod inner;
pub mod kernel;
pub mod weight;

pub use flow::{poisson_weight, q2_characteristic, FlowGrid, Q2Estimate};
pub use hermite::{
    hermite_eval, hermite_orthonormal, poisson_time_derivative, riesz_apply, semigroup_apply, HermiteExpansion,
    HermiteFunction, OneForm, Semigroup,
};
pub use inner::{weighted_inner, weighted_inner_with, weighted_norm};
pub use kernel::MehlerKernel;
pub use weight::{truncate_weight, WeightSpec};
