//! Internal numeric kernels: float intrinsics shim, log-gamma, adaptive
//! quadrature, and Chebyshev memoization. Nothing here is part of the public
//! surface; the public modules re-export what callers need.

pub(crate) mod cheb;
pub(crate) mod fmath;
pub(crate) mod gamma;
pub(crate) mod quad;
