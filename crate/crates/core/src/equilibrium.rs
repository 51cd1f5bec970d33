//! Equilibrium shape at fixed corner angles.
//!
//! The surface condition balances weighted curvature against the squared
//! boundary stress trace,
//!
//! ```text
//! [1 - 15 eps cos(4 w)] kappa - (L/4) (4 Re(phi_dot/z_dot) + 1 + chi)^2 = mu,
//! ```
//!
//! subject to the imposed corner angle slopes at both ends and the fixed
//! first-quadrant area `pi/4`, with `mu` the area multiplier (surface
//! chemical potential). The four corner coefficients of the shape expansion
//! are not free: they must equal the values dictated by the elastic corner
//! singularity, which enters through the current boundary potential. The
//! stacked nonlinear system in the `N` shape coefficients and `mu` is solved
//! by damped Newton with a forward-difference Jacobian; every residual
//! evaluation re-solves the boundary elasticity problem for the candidate
//! shape. Jacobian columns are independent elasticity solves and run in
//! parallel.

use crate::corner_asymptotics::{shape_corner_coefficients, williams_lambda, CornerInputs};
use crate::elasticity::{self, ElasticitySolution, SolverOptions};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{self, Corner, ShapeSpec, VoidShape};
use crate::spectral::legendre_nodes;
use crate::surface_energy::stiffness;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Nondimensional problem inputs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Anisotropy strength of the surface energy.
    pub epsilon: f64,
    /// Load ratio `syy / sxx` at infinity.
    pub chi: f64,
    /// Elastic strength (relative stress loading).
    pub lambda: f64,
    /// Poisson ratio; enters only dimensional and diagnostic quantities.
    pub nu: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "anisotropy {} outside (-1, 1)",
                self.epsilon
            )));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "elastic strength {} negative",
                self.lambda
            )));
        }
        if !(-1.0..0.5).contains(&self.nu) {
            return Err(Error::InvalidParameter(format!(
                "Poisson ratio {} outside (-1, 0.5)",
                self.nu
            )));
        }
        Ok(())
    }
}

/// Newton and coupling tolerances.
#[derive(Debug, Clone, Copy)]
pub struct SolveSettings {
    pub tol_residual: f64,
    pub tol_step: f64,
    pub max_iterations: usize,
    pub fd_step: f64,
    pub elasticity: SolverOptions,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            tol_residual: 1e-9,
            tol_step: 1e-10,
            max_iterations: 60,
            fd_step: 1e-7,
            elasticity: SolverOptions::default(),
        }
    }
}

/// Fixed-angle equilibrium problem.
#[derive(Debug, Clone)]
pub struct EquilibriumProblem {
    pub params: PhysicalParams,
    /// Solid corner angle at `theta = 0`, in `[pi, 2 pi)`.
    pub alpha1: f64,
    /// Solid corner angle at `theta = pi/2`.
    pub alpha2: f64,
    /// Shape resolution: `N` coefficients (4 corner + `N - 4` Chebyshev).
    pub n: usize,
    /// Warm-start shape; coefficients are reused, exponents and angles are
    /// replaced by this problem's values.
    pub init: Option<ShapeSpec>,
    pub init_mu: Option<f64>,
    pub settings: SolveSettings,
}

impl EquilibriumProblem {
    pub fn new(params: PhysicalParams, alpha1: f64, alpha2: f64, n: usize) -> Result<Self> {
        params.validate()?;
        if n < 10 {
            return Err(Error::InvalidParameter(format!(
                "resolution {n} below minimum 10"
            )));
        }
        for &a in &[alpha1, alpha2] {
            if !(PI..2.0 * PI).contains(&a) {
                return Err(Error::InvalidParameter(format!(
                    "corner angle {a} outside [pi, 2 pi)"
                )));
            }
        }
        Ok(EquilibriumProblem {
            params,
            alpha1,
            alpha2,
            n,
            init: None,
            init_mu: None,
            settings: SolveSettings::default(),
        })
    }
}

/// Converged (or best-effort) equilibrium state.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub shape: ShapeSpec,
    /// Boundary potential on the final shape; absent when `lambda = 0`.
    pub elasticity: Option<ElasticitySolution>,
    /// Area multiplier (surface chemical potential).
    pub mu: f64,
    /// Per-equation residuals at the final iterate.
    pub residuals: Vec<f64>,
    /// Max-abs residual.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl EquilibriumSolution {
    pub fn goursat(&self) -> Option<&crate::elasticity::GoursatCoeffs> {
        self.elasticity.as_ref().map(|e| &e.coeffs)
    }
}

/// Surface equilibrium residual at one interior angle.
pub fn el_residual(
    shape: &ShapeSpec,
    goursat: Option<&crate::elasticity::GoursatCoeffs>,
    mu: f64,
    theta: f64,
    params: &PhysicalParams,
) -> Result<f64> {
    let (r, dr, ddr) = shape.radial(theta);
    if r <= 0.0 {
        return Err(Error::NonPositiveShape { theta });
    }
    let kappa = geometry::curvature(r, dr, ddr);
    let omega = geometry::orientation(r, dr, theta);
    let trace = match goursat {
        Some(g) => {
            let dz = Complex64::new(dr, r) * Complex64::from_polar(1.0, theta);
            1.0 + params.chi + 4.0 * (g.phi_dot(theta) / dz).re
        }
        None => 1.0 + params.chi,
    };
    Ok(stiffness(omega, params.epsilon) * kappa - 0.25 * params.lambda * trace * trace - mu)
}

/// Imposed-angle boundary condition residuals at the two ends.
pub fn angle_bc_residual(shape: &ShapeSpec, alpha1: f64, alpha2: f64) -> (f64, f64) {
    let (r0, dr0) = shape.eval_end(Corner::A);
    let (r1, dr1) = shape.eval_end(Corner::B);
    (
        dr0 / r0 + (0.5 * (alpha1 - PI)).tan(),
        dr1 / r1 - (0.5 * (alpha2 - PI)).tan(),
    )
}

struct Discretization {
    nodes: Vec<f64>,
    area_rule: crate::spectral::GradedRule,
    lambda1: f64,
    lambda2: f64,
    check_grid: Vec<f64>,
}

impl Discretization {
    fn new(problem: &EquilibriumProblem) -> Self {
        let check_grid = (1..64).map(|j| FRAC_PI_2 * j as f64 / 64.0).collect();
        Discretization {
            nodes: legendre_nodes(problem.n - 6),
            area_rule: geometry::corner_rule(30),
            lambda1: williams_lambda(problem.alpha1),
            lambda2: williams_lambda(problem.alpha2),
            check_grid,
        }
    }

    fn spec_from(&self, problem: &EquilibriumProblem, x: &DVector<f64>) -> ShapeSpec {
        let n = problem.n;
        ShapeSpec {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            corner: [x[0], x[1], x[2], x[3]],
            cheb: (4..n).map(|j| x[j]).collect(),
            alpha1: problem.alpha1,
            alpha2: problem.alpha2,
        }
    }
}

fn corner_targets(
    spec: &ShapeSpec,
    sol: Option<&ElasticitySolution>,
    params: &PhysicalParams,
) -> Result<[f64; 4]> {
    let Some(sol) = sol else {
        return Ok([0.0; 4]);
    };
    let (r0, _) = spec.eval_end(Corner::A);
    let (r1, _) = spec.eval_end(Corner::B);
    let (a1, b1) = sol.coeffs.corner_amplitudes(Corner::A);
    let reg_a = sol.coeffs.phi_dot_regular(Corner::A);
    let (c1, c2) = shape_corner_coefficients(
        &CornerInputs {
            a1,
            b1,
            a_reg: reg_a.re,
            b_reg: reg_a.im,
            alpha: spec.alpha1,
            lambda: spec.lambda1,
            r0,
        },
        params.epsilon,
        params.lambda,
        params.chi,
    )?;
    // Mirrored corner: the reflected local expansion swaps the roles of the
    // real and imaginary coefficient combinations and flips the sign of the
    // regular part (the singular term differentiates in -theta there).
    let (a2, b2) = sol.coeffs.corner_amplitudes(Corner::B);
    let reg_b = sol.coeffs.phi_dot_regular(Corner::B);
    let (c3, c4) = shape_corner_coefficients(
        &CornerInputs {
            a1: b2,
            b1: a2,
            a_reg: -reg_b.im,
            b_reg: -reg_b.re,
            alpha: spec.alpha2,
            lambda: spec.lambda2,
            r0: r1,
        },
        params.epsilon,
        params.lambda,
        params.chi,
    )?;
    Ok([c1, c2, c3, c4])
}

fn residual_vector(
    problem: &EquilibriumProblem,
    disc: &Discretization,
    x: &DVector<f64>,
) -> Result<(DVector<f64>, Option<ElasticitySolution>)> {
    let spec = disc.spec_from(problem, x);
    let mu = x[problem.n];
    for &t in disc.check_grid.iter().chain(disc.nodes.iter()) {
        let (r, _, _) = spec.radial(t);
        if r <= 1e-9 {
            return Err(Error::NonPositiveShape { theta: t });
        }
    }
    let sol = if problem.params.lambda > 0.0 {
        Some(elasticity::solve_with(
            &spec,
            problem.params.chi,
            problem.n,
            &problem.settings.elasticity,
        )?)
    } else {
        None
    };

    let n = problem.n;
    let mut f = DVector::zeros(n + 1);
    let targets = corner_targets(&spec, sol.as_ref(), &problem.params)?;
    for j in 0..4 {
        f[j] = x[j] - targets[j];
    }
    for (j, &t) in disc.nodes.iter().enumerate() {
        f[4 + j] = el_residual(&spec, sol.as_ref().map(|s| &s.coeffs), mu, t, &problem.params)?;
    }
    let (bc1, bc2) = angle_bc_residual(&spec, problem.alpha1, problem.alpha2);
    f[n - 2] = bc1;
    f[n - 1] = bc2;
    f[n] = disc.area_rule.integrate(|t| {
        let (r, _, _) = spec.radial(t);
        0.5 * r * r
    }) - FRAC_PI_4;
    Ok((f, sol))
}

fn default_initial(problem: &EquilibriumProblem) -> Result<(ShapeSpec, f64)> {
    let n_cheb = problem.n - 4;
    let mut spec = if problem.params.epsilon == 0.0 {
        let mut s = ShapeSpec::circle();
        s.cheb.resize(n_cheb, 0.0);
        s
    } else {
        let mut s = geometry::preset_wulff(problem.params.epsilon, n_cheb)?.spec;
        s.cheb.resize(n_cheb, 0.0);
        s
    };
    spec.lambda1 = williams_lambda(problem.alpha1);
    spec.lambda2 = williams_lambda(problem.alpha2);
    spec.alpha1 = problem.alpha1;
    spec.alpha2 = problem.alpha2;
    let (r, dr, ddr) = spec.radial(FRAC_PI_4);
    let mu = stiffness(geometry::orientation(r, dr, FRAC_PI_4), problem.params.epsilon)
        * geometry::curvature(r, dr, ddr);
    Ok((spec, mu))
}

fn pack(problem: &EquilibriumProblem, spec: &ShapeSpec, mu: f64) -> DVector<f64> {
    let n = problem.n;
    let mut x = DVector::zeros(n + 1);
    for j in 0..4 {
        x[j] = spec.corner[j];
    }
    for j in 4..n {
        x[j] = spec.cheb.get(j - 4).copied().unwrap_or(0.0);
    }
    x[n] = mu;
    x
}

/// Damped-Newton solve of the fixed-angle equilibrium system.
///
/// Non-convergence within the iteration budget returns the best iterate with
/// `converged = false`; hard failures (invalid initial data) are errors.
pub fn solve_equilibrium(problem: &EquilibriumProblem) -> Result<EquilibriumSolution> {
    problem.params.validate()?;
    let disc = Discretization::new(problem);
    let (init_spec, herring_mu) = match &problem.init {
        Some(s) => {
            let mut s = s.clone();
            s.lambda1 = disc.lambda1;
            s.lambda2 = disc.lambda2;
            s.alpha1 = problem.alpha1;
            s.alpha2 = problem.alpha2;
            s.cheb.resize(problem.n - 4, 0.0);
            let mu = problem.init_mu.unwrap_or_else(|| {
                let (r, dr, ddr) = s.radial(FRAC_PI_4);
                stiffness(
                    geometry::orientation(r, dr, FRAC_PI_4),
                    problem.params.epsilon,
                ) * geometry::curvature(r, dr, ddr)
            });
            (s, mu)
        }
        None => default_initial(problem)?,
    };
    let mut x = pack(problem, &init_spec, herring_mu);

    let (mut f, mut cached) = residual_vector(problem, &disc, &x)?;
    let mut converged = f.amax() < 1e-12;
    let mut iterations = 0;
    let set = &problem.settings;

    while !converged && iterations < set.max_iterations {
        iterations += 1;
        let n = problem.n;
        // Forward-difference Jacobian over the shape coefficients; the mu
        // column is exact (mu enters the nodal rows linearly).
        let f0 = f.clone();
        let cols: Vec<Result<DVector<f64>>> = exec::map_indexed(n, |j| {
            let mut xp = x.clone();
            let h = set.fd_step * (1.0 + xp[j].abs());
            xp[j] += h;
            match residual_vector(problem, &disc, &xp) {
                Ok((fj, _)) => Ok((fj - &f0) / h),
                Err(_) => {
                    let mut xm = x.clone();
                    xm[j] -= h;
                    residual_vector(problem, &disc, &xm).map(|(fm, _)| (&f0 - fm) / h)
                }
            }
        });
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        for (j, col) in cols.into_iter().enumerate() {
            jac.set_column(j, &col?);
        }
        for (row, _) in disc.nodes.iter().enumerate() {
            jac[(4 + row, n)] = -1.0;
        }

        let delta = jac
            .lu()
            .solve(&(-&f))
            .ok_or_else(|| Error::LinearSolve("singular equilibrium Jacobian".into()))?;

        let mut accepted = false;
        let mut damping = 1.0;
        for _ in 0..=20 {
            let xt = &x + damping * &delta;
            match residual_vector(problem, &disc, &xt) {
                Ok((ft, st)) => {
                    if ft.amax() < f.amax() || ft.amax() < set.tol_residual {
                        let step_norm = (damping * &delta).amax();
                        x = xt;
                        f = ft;
                        cached = st;
                        accepted = true;
                        if f.amax() < set.tol_residual && step_norm < set.tol_step {
                            converged = true;
                        }
                        break;
                    }
                }
                Err(_) => {}
            }
            damping *= 0.5;
        }
        if f.amax() < 1e-12 {
            converged = true;
        }
        if !accepted {
            break;
        }
    }

    let spec = disc.spec_from(problem, &x);
    let elasticity_sol = match cached {
        Some(s) => Some(s),
        None if problem.params.lambda == 0.0 => None,
        None => None,
    };
    Ok(EquilibriumSolution {
        shape: spec,
        elasticity: elasticity_sol,
        mu: x[problem.n],
        residual_norm: f.amax(),
        residuals: f.iter().copied().collect(),
        iterations,
        converged,
    })
}

/// Ramp the elastic strength from zero to `target` in `steps` equal
/// increments, warm-starting each solve from the previous one. Fails with
/// the last successfully solved strength on non-convergence.
pub fn continuation_in_lambda(
    problem: &EquilibriumProblem,
    target: f64,
    steps: usize,
) -> Result<EquilibriumSolution> {
    let mut stage = problem.clone();
    stage.params.lambda = 0.0;
    let mut current = solve_equilibrium(&stage)?;
    if !current.converged {
        return Err(Error::NonConvergence {
            iterations: current.iterations,
            residual: current.residual_norm,
        });
    }
    if target == 0.0 {
        return Ok(current);
    }
    let steps = steps.max(1);
    let mut last_good = 0.0;
    for k in 1..=steps {
        let lam = target * k as f64 / steps as f64;
        stage.params.lambda = lam;
        stage.init = Some(current.shape.clone());
        stage.init_mu = Some(current.mu);
        let next = solve_equilibrium(&stage)?;
        if !next.converged {
            return Err(Error::ContinuationFailed {
                last_good,
                target,
            });
        }
        last_good = lam;
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::area_first_quadrant;
    use crate::surface_energy::wulff_corner_angle;

    fn stress_free(epsilon: f64) -> PhysicalParams {
        PhysicalParams {
            epsilon,
            chi: 0.0,
            lambda: 0.0,
            nu: 1.0 / 3.0,
        }
    }

    #[test]
    fn el_residual_circle_examples() {
        let c = ShapeSpec::circle();
        let p = stress_free(0.0);
        assert!(el_residual(&c, None, 1.0, 0.7, &p).unwrap().abs() < 1e-14);
        assert!((el_residual(&c, None, 0.0, 0.7, &p).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wulff_is_a_herring_solution() {
        // stiffness * curvature is constant along the stress-free shape
        let spec = geometry::preset_wulff(0.08, 36).unwrap().spec;
        let vals: Vec<f64> = [0.2, 0.6, 1.0, 1.35]
            .iter()
            .map(|&t| {
                let (r, dr, ddr) = spec.radial(t);
                stiffness(geometry::orientation(r, dr, t), 0.08)
                    * geometry::curvature(r, dr, ddr)
            })
            .collect();
        let mu = vals[0];
        for v in &vals {
            assert!((v - mu).abs() < 1e-6, "Herring value drifts: {vals:?}");
        }
        let p = stress_free(0.08);
        for &t in &[0.3, 0.9] {
            assert!(el_residual(&spec, None, mu, t, &p).unwrap().abs() < 1e-5);
        }
    }

    #[test]
    fn angle_bc_examples() {
        let c = ShapeSpec::circle();
        let (b1, b2) = angle_bc_residual(&c, PI, PI);
        assert!(b1.abs() < 1e-14 && b2.abs() < 1e-14);

        // slope 1 at theta = 0 corresponds to alpha1 = pi/2 + pi
        let mut tilted = ShapeSpec::circle();
        tilted.cheb = vec![1.0, 1.0 / crate::spectral::MAP_SCALE];
        let (r0, dr0) = tilted.eval_end(Corner::A);
        let alpha1 = PI - 2.0 * (dr0 / r0).atan();
        let (b1, _) = angle_bc_residual(&tilted, alpha1, PI);
        assert!(b1.abs() < 1e-12, "bc residual {b1}");
    }

    #[test]
    fn isotropic_unstressed_equilibrium_is_circle() {
        let problem = EquilibriumProblem::new(stress_free(0.0), PI, PI, 12).unwrap();
        let sol = solve_equilibrium(&problem).unwrap();
        assert!(sol.converged, "residual {}", sol.residual_norm);
        assert!((sol.mu - 1.0).abs() < 1e-9, "mu = {}", sol.mu);
        for &t in &[0.0, 0.5, 1.0, FRAC_PI_2] {
            let (r, _, _) = sol.shape.radial(t);
            assert!((r - 1.0).abs() < 1e-9);
        }
        assert!((area_first_quadrant(&sol.shape) - FRAC_PI_4).abs() < 1e-10);
    }

    #[test]
    fn stress_free_anisotropic_matches_wulff() {
        let a0 = wulff_corner_angle(0.08).unwrap().unwrap();
        let problem = EquilibriumProblem::new(stress_free(0.08), a0, a0, 24).unwrap();
        let sol = solve_equilibrium(&problem).unwrap();
        assert!(sol.converged);
        let exact = geometry::WulffShape::new(0.08).unwrap();
        let rule = geometry::corner_rule(20);
        let err = elasticity::l2_error(
            |t| sol.shape.radial(t).0,
            |t| exact.radius(t),
            &rule,
        );
        assert!(err < 1e-6, "L2 error vs exact shape: {err}");
        // corner columns stay off without stress
        for c in sol.shape.corner {
            assert!(c.abs() < 1e-10);
        }
    }

    #[test]
    fn converged_solution_is_a_fixed_point() {
        let a0 = wulff_corner_angle(0.08).unwrap().unwrap();
        let mut problem = EquilibriumProblem::new(stress_free(0.08), a0, a0, 16).unwrap();
        let sol = solve_equilibrium(&problem).unwrap();
        assert!(sol.converged);
        problem.init = Some(sol.shape.clone());
        problem.init_mu = Some(sol.mu);
        let again = solve_equilibrium(&problem).unwrap();
        assert!(again.converged);
        assert!(again.iterations <= 2, "took {} iterations", again.iterations);
    }

    #[test]
    fn continuation_trivial_and_path_independent() {
        let a0 = wulff_corner_angle(0.08).unwrap().unwrap();
        let params = PhysicalParams {
            lambda: 0.1,
            ..stress_free(0.08)
        };
        let problem = EquilibriumProblem::new(params, a0, a0, 16).unwrap();

        let direct = solve_equilibrium(&{
            let mut p = problem.clone();
            p.params.lambda = 0.0;
            p
        })
        .unwrap();
        let zero = continuation_in_lambda(&problem, 0.0, 3).unwrap();
        for j in 0..direct.shape.cheb.len() {
            assert!((direct.shape.cheb[j] - zero.shape.cheb[j]).abs() < 1e-10);
        }

        let a = continuation_in_lambda(&problem, 0.1, 2).unwrap();
        let b = continuation_in_lambda(&problem, 0.1, 4).unwrap();
        for j in 0..a.shape.cheb.len() {
            assert!(
                (a.shape.cheb[j] - b.shape.cheb[j]).abs() < 1e-8,
                "path dependence in coefficient {j}"
            );
        }
        assert!((a.mu - b.mu).abs() < 1e-8);
    }

    #[test]
    fn stressed_solution_keeps_area_and_symmetry() {
        let a0 = wulff_corner_angle(0.08).unwrap().unwrap();
        let params = PhysicalParams {
            epsilon: 0.08,
            chi: 1.0,
            lambda: 0.1,
            nu: 1.0 / 3.0,
        };
        let problem = EquilibriumProblem::new(params, a0, a0, 16).unwrap();
        let sol = continuation_in_lambda(&problem, 0.1, 2).unwrap();
        assert!((area_first_quadrant(&sol.shape) - FRAC_PI_4).abs() < 1e-9);
        // equibiaxial load on equal angles: shape symmetric about pi/4
        for &t in &[0.2, 0.5] {
            let (ra, _, _) = sol.shape.radial(t);
            let (rb, _, _) = sol.shape.radial(FRAC_PI_2 - t);
            assert!((ra - rb).abs() < 1e-8, "asymmetry at {t}: {ra} vs {rb}");
        }
    }
}
