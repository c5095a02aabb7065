//! Dirichlet L-functions, their first derivatives, and the a-points of
//! `L(s, chi) - a`, together with evaluators for the asymptotic formulas that
//! describe `sum L'(rho_a, chi) X^rho_a` over a-points with `0 < gamma <= T`.
//!
//! Module map:
//!
//! * [`arith`]: smallest-prime-factor sieve, von Mangoldt function, and the
//!   divisor convolutions `(Lambda * log)(X)` with and without a character twist.
//! * [`characters`]: enumeration of the characters mod `q`, conductors,
//!   parity and Gauss sums.
//! * [`special`]: complex log-Gamma, digamma, Hurwitz zeta (value and
//!   `s`-derivative) and the generalized Stieltjes constants of Hurwitz zeta.
//! * [`lfunc`]: `L(s, chi)`, `L'(s, chi)`, the factor `Delta(s, chi)` of the
//!   asymmetric functional equation, the completed function `xi(s, chi)`, and
//!   two approximate functional equations.
//! * [`apoints`]: argument-principle counting and location of a-points.
//! * [`theorem`]: empirical sums over a-points, the right-hand sides they are
//!   compared against, generalized Stieltjes coefficients and residual tables.
//! * [`cache`]: the on-disk a-point cache.
//! * [`calibration`]: frozen envelope constants.

pub mod apoints;
pub mod arith;
pub mod cache;
pub mod calibration;
pub mod characters;
mod error;
pub mod lfunc;
pub mod special;
pub mod theorem;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use apoints::{APoint, CountReport};
pub use arith::FactorSieve;
pub use characters::{enumerate_characters, CharId, DirichletCharacter};
pub use lfunc::{EvalMethod, LEvaluation};
pub use theorem::{StieltjesCoeffs, VerificationRow};
