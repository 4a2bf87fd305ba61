//! Exact dimensions of spaces of theta functions on moduli of vector bundles
//! over a curve of genus `g`.
//!
//! * [`exact_arith`] encloses trigonometric sums in rational intervals and
//!   certifies the integer they equal.
//! * [`verlinde`] computes `s(n,d,k)`, the dimension for the fixed-determinant
//!   moduli space `SM(n,d)`, and `v(n,d,k)`, the dimension for the full moduli
//!   space `M(n,d)`, related by `s * k^g = v * gcd(n,d)^g`.
//! * [`theta_calculus`] is a formal calculus of theta bundles and line-bundle
//!   classes: complementary ranks and degrees, rescaling, translation, and
//!   pullback along tensor-product maps.
//! * [`duality`] checks the dimension identities of level-rank duality over
//!   parameter grids.

#![allow(clippy::result_large_err)]

pub mod duality;
pub mod exact_arith;
pub mod theta_calculus;
pub mod verlinde;
