//! Exceptional X_m Jacobi shape-invariant potentials isospectral to the
//! generalized Pöschl-Teller (GPT) potential.
//!
//! The crate covers the full chain from polynomials to scattering:
//!
//! * [`specfun`]: complex log-gamma, gamma ratios, Pochhammer symbols and the
//!   Gauss hypergeometric function with its large-argument connection formula.
//! * [`poly`] and [`orthopoly`]: dense real polynomials, classical Jacobi
//!   polynomials, the denominator polynomial `xi_m`, the X_m polynomials
//!   (two constructions), weights, norms and quadrature-based orthogonality.
//! * [`potential`]: prepotential, potential family, shape-invariance residual,
//!   bound spectrum and closed-form eigenfunctions.
//! * [`scattering`]: the closed-form s-wave S-matrix, the asymptotic
//!   coefficient routes and phase shifts.
//! * [`radial`]: a Numerov oracle for the radial equation (shooting and
//!   phase-shift extraction) that certifies the closed forms.
//! * [`runner`]: the batch front end behind the `xmjacobi` binary.
//!
//! Two coordinate conventions are used. Polynomials, weights and the
//! prepotential live in `rho` with argument `y = cosh(2 rho)`. Eigenfunctions,
//! the Numerov oracle and the S-matrix use the rescaled coordinate
//! `r = 2 rho`, in which the potential is `V(r/2)/4` and its asymptotic value
//! is `A^2`, so continuum energies are `k^2` above that threshold.

pub mod error;
pub mod orthopoly;
pub mod poly;
pub mod potential;
pub mod quadrature;
pub mod radial;
pub mod runner;
pub mod scattering;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use orthopoly::FamilyParams;
pub use poly::RealPolynomial;
