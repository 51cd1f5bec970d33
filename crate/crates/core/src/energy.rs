//! Total potential energy of a void shape and its minimization over the two
//! corner angles.
//!
//! The reported energy drops the shape-independent constant of the elastic
//! potential, so values are comparable only within a fixed parameter set:
//!
//! ```text
//! Pi = contour integral of gamma(w) ds
//!    + L * contour integral of n1 [ (1+chi) x / 4 + Re phi ]
//!                            + chi n2 [ (1+chi) y / 4 + Im phi ] ds.
//! ```
//!
//! Both contour integrals run over the full reflected boundary (four times
//! the first-quadrant integral by symmetry) with corner-graded quadrature.

use crate::elasticity::{BoundaryField, ElasticitySolution};
use crate::equilibrium::{
    continuation_in_lambda, solve_equilibrium, EquilibriumProblem, EquilibriumSolution,
    PhysicalParams,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{self, ShapeSpec, VoidShape};
use crate::spectral::gauss_legendre;
use crate::surface_energy::{gamma, wulff_corner_angle};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Energy of one shape/potential pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyReport {
    pub surface: f64,
    pub elastic: f64,
    pub total: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub n: usize,
}

/// Total energy of a shape. The boundary potential is required whenever the
/// elastic strength is nonzero; its least-squares residual is propagated as
/// a convergence guard.
pub fn total_energy(
    shape: &ShapeSpec,
    sol: Option<&ElasticitySolution>,
    params: &PhysicalParams,
) -> Result<EnergyReport> {
    let rule = geometry::corner_rule(30);
    let surface = 4.0
        * rule.integrate(|t| {
            let (r, dr, _) = shape.radial(t);
            let w = geometry::orientation(r, dr, t);
            gamma(w, params.epsilon, 0) * (r * r + dr * dr).sqrt()
        });

    let elastic = if params.lambda == 0.0 {
        0.0
    } else {
        let sol = sol.ok_or_else(|| {
            Error::InvalidParameter("elastic energy requested without a boundary solution".into())
        })?;
        if sol.residual_norm > 1e-2 {
            return Err(Error::InvalidParameter(format!(
                "boundary solution under-resolved (residual {:.3e})",
                sol.residual_norm
            )));
        }
        4.0 * params.lambda
            * rule.integrate(|t| {
                let (r, dr, _) = shape.radial(t);
                let w = geometry::orientation(r, dr, t);
                let (x, y) = (r * t.cos(), r * t.sin());
                let phi = sol.coeffs.phi(t);
                let ds = (r * r + dr * dr).sqrt();
                (w.cos() * (0.25 * (1.0 + params.chi) * x + phi.re)
                    + params.chi * w.sin() * (0.25 * (1.0 + params.chi) * y + phi.im))
                    * ds
            })
    };

    Ok(EnergyReport {
        surface,
        elastic,
        total: surface + elastic,
        alpha1: shape.alpha1,
        alpha2: shape.alpha2,
        n: shape.cheb.len() + 4,
    })
}

/// Reciprocal-work consistency check.
///
/// The boundary form of the elastic potential equals a mixed-work integral
/// on any probe contour enclosing the void:
///
/// ```text
/// Int_boundary (s_inf n) . u ds = Int_probe [ (s n) . u_inf - (s_inf n) . u ] ds.
/// ```
///
/// Both sides are evaluated from the solved boundary values (the probe side
/// through Cauchy continuation into the solid) and the relative mismatch is
/// returned; it is a quality diagnostic of the boundary solution.
pub fn betti_consistency(
    shape: &ShapeSpec,
    sol: &ElasticitySolution,
    params: &PhysicalParams,
    r_probe: f64,
) -> f64 {
    let chi = params.chi;
    let nu = params.nu;
    let kappa_e = 3.0 - 4.0 * nu;

    let rule = geometry::corner_rule(30);
    let boundary_side = 4.0
        * (4.0 * (1.0 - nu))
        * rule.integrate(|t| {
            let (r, dr, _) = shape.radial(t);
            let w = geometry::orientation(r, dr, t);
            let (x, y) = (r * t.cos(), r * t.sin());
            let phi = sol.coeffs.phi(t);
            let ds = (r * r + dr * dr).sqrt();
            (w.cos() * (0.25 * (1.0 + chi) * x + phi.re)
                + chi * w.sin() * (0.25 * (1.0 + chi) * y + phi.im))
                * ds
        });

    let field = BoundaryField::new(sol, shape, &crate::elasticity::SolverOptions::default());
    let exx = 1.0 - nu * (1.0 + chi);
    let eyy = chi - nu * (1.0 + chi);
    let (gx, gw) = gauss_legendre(16);
    let panels = 16;
    let mut probe_side = 0.0;
    for p in 0..panels {
        let lo = TAU * p as f64 / panels as f64;
        let hi = TAU * (p + 1) as f64 / panels as f64;
        let half = 0.5 * (hi - lo);
        let cen = 0.5 * (hi + lo);
        for (&xg, &wg) in gx.iter().zip(&gw) {
            let psi = cen + half * xg;
            let t = Complex64::from_polar(r_probe, psi);
            let phi_full = 0.25 * (1.0 + chi) * t + field.phi_at(t);
            let dphi_full = 0.25 * (1.0 + chi) + field.phi_deriv(t, 1);
            let ddphi = field.phi_deriv(t, 2);
            let psi_full = 0.5 * (chi - 1.0) * t + field.h_at(t);
            let dpsi_full = 0.5 * (chi - 1.0) + field.h_deriv(t);

            let tr = 4.0 * dphi_full.re;
            let dev = 2.0 * (t.conj() * ddphi + dpsi_full);
            let sxx = 0.5 * (tr - dev.re);
            let syy = 0.5 * (tr + dev.re);
            let sxy = 0.5 * dev.im;
            let u = kappa_e * phi_full - t * dphi_full.conj() - psi_full.conj();

            let (n1, n2) = (psi.cos(), psi.sin());
            let traction = (sxx * n1 + sxy * n2, sxy * n1 + syy * n2);
            let u_inf = (exx * t.re, eyy * t.im);
            let integrand = traction.0 * u_inf.0 + traction.1 * u_inf.1
                - (n1 * u.re + chi * n2 * u.im);
            probe_side += half * wg * integrand * r_probe;
        }
    }

    (boundary_side - probe_side).abs() / boundary_side.abs().max(1e-300)
}

/// One evaluated grid point of the angle landscape.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LandscapeSample {
    pub alpha1: f64,
    pub alpha2: f64,
    pub energy: f64,
    pub converged: bool,
}

/// Result of the corner-angle search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleSearchResult {
    pub best_angles: (f64, f64),
    pub best_energy: f64,
    pub landscape: Vec<LandscapeSample>,
    pub failures: usize,
    /// Stress-free reference angle.
    pub alpha0: f64,
}

/// Search configuration: a grid scan over a box centered on the stress-free
/// angle, followed by compass refinement of the best point.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub half_width: f64,
    pub grid: usize,
    /// Refinement terminates when the compass step drops below this.
    pub refine_tol: f64,
    pub continuation_steps: usize,
    /// Override the box center (defaults to the stress-free corner angle).
    pub center: Option<(f64, f64)>,
    pub max_probes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            half_width: 0.15,
            grid: 5,
            refine_tol: 1e-4,
            continuation_steps: 3,
            center: None,
            max_probes: 400,
        }
    }
}

/// Equilibrium solve at given angles followed by an energy evaluation.
pub fn equilibrium_energy(
    params: &PhysicalParams,
    n: usize,
    alpha1: f64,
    alpha2: f64,
    continuation_steps: usize,
    init: Option<&EquilibriumSolution>,
) -> Result<(EnergyReport, EquilibriumSolution)> {
    let mut problem = EquilibriumProblem::new(*params, alpha1, alpha2, n)?;
    let sol = match init {
        Some(warm) => {
            problem.init = Some(warm.shape.clone());
            problem.init_mu = Some(warm.mu);
            let sol = solve_equilibrium(&problem)?;
            if !sol.converged {
                return Err(Error::NonConvergence {
                    iterations: sol.iterations,
                    residual: sol.residual_norm,
                });
            }
            sol
        }
        None => continuation_in_lambda(&problem, params.lambda, continuation_steps)?,
    };
    let report = total_energy(&sol.shape, sol.elasticity.as_ref(), params)?;
    Ok((report, sol))
}

/// Minimize the total energy over the two corner angles.
///
/// Grid samples are independent solves and run in parallel; failed samples
/// are recorded and excluded. Refinement is a compass search from the best
/// grid point, warm-started from the incumbent solution, that halves its
/// step until it drops below `refine_tol`.
pub fn minimize_corner_angles(
    params: &PhysicalParams,
    n: usize,
    opts: &SearchOptions,
) -> Result<AngleSearchResult> {
    params.validate()?;
    let alpha0 = wulff_corner_angle(params.epsilon)?.unwrap_or(PI);
    let center = match opts.center {
        Some(c) => c,
        None => {
            if alpha0 == PI {
                return Err(Error::InvalidParameter(
                    "corner-free regime: provide an explicit search center".into(),
                ));
            }
            (alpha0, alpha0)
        }
    };

    let g = opts.grid.max(1);
    let coords: Vec<f64> = if g == 1 {
        vec![0.0]
    } else {
        (0..g)
            .map(|j| -opts.half_width + 2.0 * opts.half_width * j as f64 / (g - 1) as f64)
            .collect()
    };
    let points: Vec<(f64, f64)> = coords
        .iter()
        .flat_map(|&da| coords.iter().map(move |&db| (center.0 + da, center.1 + db)))
        .collect();

    let evaluated: Vec<(f64, f64, Result<(EnergyReport, EquilibriumSolution)>)> =
        exec::map_indexed(points.len(), |j| {
            let (a1, a2) = points[j];
            (
                a1,
                a2,
                equilibrium_energy(params, n, a1, a2, opts.continuation_steps, None),
            )
        });

    let mut landscape = Vec::with_capacity(evaluated.len());
    let mut failures = 0;
    let mut best: Option<(f64, f64, f64, EquilibriumSolution)> = None;
    for (a1, a2, res) in evaluated {
        match res {
            Ok((report, sol)) => {
                landscape.push(LandscapeSample {
                    alpha1: a1,
                    alpha2: a2,
                    energy: report.total,
                    converged: true,
                });
                if best.as_ref().map(|b| report.total < b.2).unwrap_or(true) {
                    best = Some((a1, a2, report.total, sol));
                }
            }
            Err(_) => {
                failures += 1;
                landscape.push(LandscapeSample {
                    alpha1: a1,
                    alpha2: a2,
                    energy: f64::NAN,
                    converged: false,
                });
            }
        }
    }
    let (mut ba1, mut ba2, mut be, mut bsol) = best.ok_or(Error::AllSamplesFailed)?;

    // Compass refinement.
    let mut step = if g > 1 {
        opts.half_width / (g - 1) as f64
    } else {
        0.5 * opts.half_width.max(0.02)
    };
    let mut probes = 0;
    while step >= opts.refine_tol && probes < opts.max_probes {
        let mut improved = false;
        for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (a1, a2) = (ba1 + da, ba2 + db);
            if !(PI + 1e-6..2.0 * PI - 1e-6).contains(&a1)
                || !(PI + 1e-6..2.0 * PI - 1e-6).contains(&a2)
            {
                continue;
            }
            probes += 1;
            if let Ok((report, sol)) =
                equilibrium_energy(params, n, a1, a2, opts.continuation_steps, Some(&bsol))
            {
                if report.total < be {
                    (ba1, ba2, be, bsol) = (a1, a2, report.total, sol);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(AngleSearchResult {
        best_angles: (ba1, ba2),
        best_energy: be,
        landscape,
        failures,
        alpha0,
    })
}
