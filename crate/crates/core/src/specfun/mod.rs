//! Special functions and numerical primitives shared by the physics modules.
//!
//! Everything here is pure and reentrant.

mod acceleration;
mod gamma;
mod hypergeometric;
mod laguerre;
mod quadrature;

pub use acceleration::{
    accelerate_alternating, accelerate_unchecked, AccelerationConfig, AccelerationMethod, AccelerationReport,
    TailModel,
};
pub use gamma::{gamma, ln_gamma};
pub use hypergeometric::{hyp2f1_terminating, hyp2f1_terminating_general, BigRational};
pub use laguerre::{laguerre, laguerre_derivative};
pub use quadrature::{
    integrate, integrate_semiinfinite, CompositeRule, GaussLegendre, QuadratureResult,
    QuadratureScheme, QuadratureSpec,
};
