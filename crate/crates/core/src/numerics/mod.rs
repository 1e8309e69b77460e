//! Self-contained numerical primitives: bracketed root finding, adaptive
//! Gauss-Legendre quadrature, natural cubic splines, least-squares lines.

pub mod fit;
pub mod quad;
pub mod root;
pub mod spline;
