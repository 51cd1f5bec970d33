//! Equilibrium shapes of a two-dimensional void with corners in a biaxially
//! loaded elastic solid.
//!
//! The void boundary minimizes the sum of anisotropic surface energy and
//! elastic potential energy at fixed void area. Corners on the shape generate
//! algebraic stress singularities, which in turn force a matching singularity
//! in the boundary curvature. The crate provides the three coupled solvers:
//!
//! * [`elasticity`] — exterior plane-strain problem for the boundary values of
//!   the Goursat potential, via a singular boundary integro-differential
//!   equation discretized with a Chebyshev basis plus corner terms;
//! * [`equilibrium`] — Euler-Lagrange equation for the shape at fixed corner
//!   angles, with the corner curvature coefficients tied to the elastic
//!   singularity;
//! * [`energy`] — total-energy evaluation and minimization over the two
//!   corner angles.
//!
//! Supporting modules: [`spectral`] (basis functions and graded quadrature),
//! [`geometry`] (polar shapes and differential geometry), [`surface_energy`]
//! (four-fold anisotropy), [`corner_asymptotics`] (wedge singularity exponent
//! and corner coefficient formulas).
//!
//! With the default `parallel` feature, embarrassingly parallel inner loops
//! (system assembly, finite-difference Jacobian columns, angle-grid scans)
//! run on rayon; without it everything falls back to sequential execution.

pub mod corner_asymptotics;
pub mod elasticity;
pub mod energy;
pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod spectral;
pub mod surface_energy;

pub use elasticity::{ElasticitySolution, GoursatCoeffs};
pub use energy::{AngleSearchResult, EnergyReport};
pub use equilibrium::{EquilibriumProblem, EquilibriumSolution, PhysicalParams};
pub use error::{Error, Result};
pub use geometry::{BoundarySample, ShapeSpec, VoidShape};
