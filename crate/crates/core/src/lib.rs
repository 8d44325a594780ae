//! Numerical core for the Dirichlet problem with three competing powers
//!
//! ```text
//! -Δu = |u|^{γ-2}u + μ|u|^{α-2}u - λ|u|^{q-2}u  in Ω,   u = 0 on ∂Ω,
//! 1 < q < α < 2 < γ < 2*.
//! ```
//!
//! The crate is organized around the scalar fiber picture: every field u spans
//! a ray t·u whose energy and quotient profiles are elementary functions of
//! the norm tuple (a, b, c, d). [`fiber`] carries that scalar layer;
//! [`grid`] the finite difference fields and their gradients; [`extremal`]
//! minimizes quotient levels over the unit sphere of the gradient norm;
//! [`branch`] produces the two Nehari branches and classifies solutions;
//! [`oracle`] re-derives the scalar layer the slow way (dense scans, finite
//! differences) for verification.

pub mod artifacts;
pub mod branch;
pub mod config;
pub mod error;
pub mod exponents;
pub mod extremal;
pub mod fiber;
pub mod grid;
pub mod oracle;
mod rootfind;

pub use branch::{classify_solution, coercivity_probe, solve_branch1, solve_branch2};
pub use branch::{Classification, CoercivityReport, NehariSample, Sign, SolveReport};
pub use config::{DescentConfig, ExponentsConfig, GridConfig, GridKind, RunConfig, Tolerances};
pub use error::{Error, Result};
pub use exponents::{Exponents, FiberConstants};
pub use extremal::{
    extremal_curve, minimize_lambda_star, minimize_mu, DescentOpts, ExtremalCurve, ExtremalResult,
    MuKind,
};
pub use fiber::{
    CriticalOutcome, CriticalPair, Fiber, FiberAnalysis, MuQuotients, NehariRoots, NormTuple,
    QuotientFamily,
};
pub use grid::{solve_poisson, DiscreteField, GridSpec, QuotientGradientKind};
pub use oracle::{
    fd_order, grid_scan_roots, scan_stationarity_level, verify_lemma_suite, VerifyFailure,
    VerifyOpts, VerifyReport,
};
