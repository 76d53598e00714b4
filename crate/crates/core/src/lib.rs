//! Solvers and diagnostics for the two-dimensional Bose-Einstein
//! Fokker-Planck (BEFP) equation
//!
//! ```text
//!     ∂_t f = Δf + div(v f (1 + f)),      t > 0, v ∈ R²,
//! ```
//!
//! whose stationary states are the Bose-Einstein densities
//! `f_∞^β(v) = 1/(β e^{|v|²/2} − 1)`, β > 1.
//!
//! The crate is organised around the change of variables Λ that maps radial
//! solutions of the linear Fokker-Planck (Ornstein-Uhlenbeck) equation
//! `∂_t g = Δg + div(v g)` onto radial solutions of the BEFP equation.
//! Writing `φ(r) = r f(r)` and `ψ(r) = r g(r)`, the map is the Hopf-Cole
//! relation between the cumulatives, `Φ = log(1 + Ψ)`, or pointwise
//!
//! ```text
//!     φ(r) = ψ(r) / (1 + ∫₀^r ψ),        ψ(r) = φ(r) exp(∫₀^r φ).
//! ```
//!
//! Since the linear equation has an explicit Gaussian kernel, radial BEFP
//! solutions can be evaluated exactly: [`radial_solver::solve_radial_exact`]
//! composes Λ⁻¹, the exact kernel propagation, and Λ. A structure-preserving
//! 2D finite-volume solver ([`numeric2d`]) covers non-radial data and is
//! validated against the exact pipeline. [`diagnostics`] provides the entropy
//! functional, its dissipation, weighted norms, the Csiszár-Kullback bound
//! and decay-rate fitting.

pub mod bessel;
pub mod cli;
pub mod diagnostics;
pub mod equilibria;
pub mod error;
pub mod field;
pub mod fp_exact;
pub mod grid;
pub mod numeric2d;
pub mod radial_solver;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{CumulativeProfile, ProfileKind, RadialGrid, RadialProfile};

/// Default truncation radius for radial grids; `e^{-R²/2} ≈ 1e-14` there,
/// below quadrature noise for every Gaussian-type density handled here.
pub const DEFAULT_R_MAX: f64 = 8.0;
/// Default number of radial grid intervals.
pub const DEFAULT_RADIAL_N: usize = 4000;
