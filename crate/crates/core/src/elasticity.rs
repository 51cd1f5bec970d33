//! Exterior plane-strain elasticity on a void boundary via a singular
//! boundary integro-differential equation for the Goursat potential.
//!
//! The stress state is carried by the perturbation potential `phi` (the
//! far-field part `(1 + chi) z / 4` is split off), represented on the first
//! quadrant by a Chebyshev series plus corner terms `th^(L-1)` whose
//! exponents come from the wedge analysis. Boundary values on the other
//! quadrants follow from the reflection identities
//!
//! ```text
//! phi(conj z) = conj(phi(z)),   phi(-conj z) = -conj(phi(z)),
//! ```
//!
//! which also encode the endpoint conditions `Im phi = 0` at `theta = 0` and
//! `Re phi = 0` at `theta = pi/2`.
//!
//! Collocating the integral equation and the analyticity constraint at the
//! mapped Legendre nodes gives an overdetermined real system of `4N - 2`
//! equations for the `2N` coefficients, solved by column-scaled SVD least
//! squares. Cauchy principal values are regularized by extracting the
//! half-residue and integrating divided differences over dyadically graded
//! Gauss panels.

use crate::corner_asymptotics::williams_lambda;
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{Corner, VoidShape};
use crate::spectral::{self, graded_rule, BasisGrid, GradedRule};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One basis function of the potential expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisTerm {
    /// `theta^(lambda1 - 1)`, active when the x-axis corner is singular.
    CornerLeft,
    /// `(pi/2 - theta)^(lambda2 - 1)`.
    CornerRight,
    /// Chebyshev polynomial `T_k` on `[0, pi/2]`.
    Cheb(usize),
}

/// Boundary values of the perturbation potential: real and imaginary
/// coefficient vectors over the shared term list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoursatCoeffs {
    pub terms: Vec<BasisTerm>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
}

fn term_value(term: BasisTerm, lambda1: f64, lambda2: f64, theta: f64) -> (f64, f64) {
    match term {
        BasisTerm::CornerLeft => {
            let e = lambda1 - 1.0;
            (theta.powf(e), e * theta.powf(e - 1.0))
        }
        BasisTerm::CornerRight => {
            let u = FRAC_PI_2 - theta;
            let e = lambda2 - 1.0;
            (u.powf(e), -e * u.powf(e - 1.0))
        }
        BasisTerm::Cheb(k) => (
            spectral::chebyshev(k, theta, 0),
            spectral::chebyshev(k, theta, 1),
        ),
    }
}

impl GoursatCoeffs {
    pub fn zero(terms: Vec<BasisTerm>, lambda1: f64, lambda2: f64) -> Self {
        let n = terms.len();
        GoursatCoeffs {
            terms,
            a: vec![0.0; n],
            b: vec![0.0; n],
            lambda1,
            lambda2,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Boundary value of the perturbation potential at a quadrant angle.
    pub fn phi(&self, theta: f64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for (j, &t) in self.terms.iter().enumerate() {
            let (val, _) = term_value(t, self.lambda1, self.lambda2, theta);
            v += Complex64::new(self.a[j], self.b[j]) * val;
        }
        v
    }

    /// Theta-derivative of the boundary value; singular at a cornered end.
    pub fn phi_dot(&self, theta: f64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for (j, &t) in self.terms.iter().enumerate() {
            let (_, dot) = term_value(t, self.lambda1, self.lambda2, theta);
            v += Complex64::new(self.a[j], self.b[j]) * dot;
        }
        v
    }

    /// Coefficients `(a, b)` of the singular term at one corner; zero when
    /// that corner has no singular column.
    pub fn corner_amplitudes(&self, corner: Corner) -> (f64, f64) {
        let want = match corner {
            Corner::A => BasisTerm::CornerLeft,
            Corner::B => BasisTerm::CornerRight,
        };
        self.terms
            .iter()
            .position(|&t| t == want)
            .map(|j| (self.a[j], self.b[j]))
            .unwrap_or((0.0, 0.0))
    }

    /// Regular part of `d phi / d theta` at a corner: the derivative of the
    /// expansion with that corner's own singular term removed. The other
    /// corner's term and the Chebyshev tail are regular there and kept.
    pub fn phi_dot_regular(&self, corner: Corner) -> Complex64 {
        let (theta, skip) = match corner {
            Corner::A => (0.0, BasisTerm::CornerLeft),
            Corner::B => (FRAC_PI_2, BasisTerm::CornerRight),
        };
        let mut v = Complex64::new(0.0, 0.0);
        for (j, &t) in self.terms.iter().enumerate() {
            if t == skip {
                continue;
            }
            let (_, dot) = term_value(t, self.lambda1, self.lambda2, theta);
            v += Complex64::new(self.a[j], self.b[j]) * dot;
        }
        v
    }
}

/// Numerical options of the boundary solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Dyadic grading depth toward each singular corner.
    pub grading_levels: usize,
    /// Gauss order per quadrature panel.
    pub panel_order: usize,
    /// Include the analyticity constraint rows (required for uniqueness).
    pub analyticity: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grading_levels: 40,
            panel_order: 16,
            analyticity: true,
        }
    }
}

/// Assembled least-squares system for one shape and load ratio.
pub struct AssembledSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub terms: Vec<BasisTerm>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub grid: BasisGrid,
}

/// Solved boundary potential with least-squares diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElasticitySolution {
    pub coeffs: GoursatCoeffs,
    pub chi: f64,
    pub n: usize,
    /// Euclidean residual of the overdetermined system.
    pub residual_norm: f64,
    /// Ratio of extreme singular values of the column-scaled matrix.
    pub cond_estimate: f64,
}

impl ElasticitySolution {
    /// Boundary stress trace `sxx + syy = 1 + chi + 4 Re(phi'(z))`.
    ///
    /// At a singular corner endpoint this diverges; the returned value then
    /// carries the sign of the blow-up.
    pub fn trace(&self, shape: &impl VoidShape, theta: f64) -> f64 {
        let (r, dr, _) = shape.radial(theta);
        let dz = Complex64::new(dr, r) * Complex64::from_polar(1.0, theta);
        1.0 + self.chi + 4.0 * (self.coeffs.phi_dot(theta) / dz).re
    }

    /// Boundary value of the auxiliary potential `h`, recovered from the
    /// traction-free condition.
    pub fn h(&self, shape: &impl VoidShape, theta: f64) -> Complex64 {
        let (r, dr, _) = shape.radial(theta);
        let e = Complex64::from_polar(1.0, theta);
        let z = r * e;
        let dz = Complex64::new(dr, r) * e;
        let phi = self.coeffs.phi(theta);
        let dphi = self.coeffs.phi_dot(theta) / dz;
        -phi.conj() - 0.5 * (1.0 + self.chi) * z.conj() - z.conj() * dphi
            - 0.5 * (self.chi - 1.0) * z
    }
}

fn build_terms(n: usize, cornered1: bool, cornered2: bool) -> Vec<BasisTerm> {
    let mut terms = Vec::with_capacity(n);
    if cornered1 {
        terms.push(BasisTerm::CornerLeft);
    }
    if cornered2 {
        terms.push(BasisTerm::CornerRight);
    }
    let tail = n - terms.len();
    terms.extend((0..tail).map(BasisTerm::Cheb));
    terms
}

/// Basis values and theta-derivatives for all terms at one angle.
fn basis_row(terms: &[BasisTerm], l1: f64, l2: f64, theta: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n_cheb = terms
        .iter()
        .filter(|t| matches!(t, BasisTerm::Cheb(_)))
        .count();
    let (tv, td, tdd) = spectral::chebyshev_table(theta, n_cheb);
    let mut val = Vec::with_capacity(terms.len());
    let mut dot = Vec::with_capacity(terms.len());
    let mut ddot = Vec::with_capacity(terms.len());
    for &t in terms {
        match t {
            BasisTerm::Cheb(k) => {
                val.push(tv[k]);
                dot.push(td[k]);
                ddot.push(tdd[k]);
            }
            BasisTerm::CornerLeft => {
                let e = l1 - 1.0;
                val.push(theta.powf(e));
                dot.push(e * theta.powf(e - 1.0));
                ddot.push(e * (e - 1.0) * theta.powf(e - 2.0));
            }
            BasisTerm::CornerRight => {
                let u = FRAC_PI_2 - theta;
                let e = l2 - 1.0;
                val.push(u.powf(e));
                dot.push(-e * u.powf(e - 1.0));
                ddot.push(e * (e - 1.0) * u.powf(e - 2.0));
            }
        }
    }
    (val, dot, ddot)
}

struct MasterGrid {
    theta: Vec<f64>,
    weight: Vec<f64>,
    z: Vec<Complex64>,
    dz: Vec<Complex64>,
    /// `basis[node * n + k]`
    basis: Vec<f64>,
    basis_dot: Vec<f64>,
}

fn build_master_grid(
    shape: &impl VoidShape,
    terms: &[BasisTerm],
    l1: f64,
    l2: f64,
    rule: &GradedRule,
) -> Result<MasterGrid> {
    let n = terms.len();
    let m = rule.nodes.len();
    let mut grid = MasterGrid {
        theta: rule.nodes.clone(),
        weight: rule.weights.clone(),
        z: Vec::with_capacity(m),
        dz: Vec::with_capacity(m),
        basis: Vec::with_capacity(m * n),
        basis_dot: Vec::with_capacity(m * n),
    };
    for &theta in &rule.nodes {
        let (r, dr, _) = shape.radial(theta);
        if r <= 0.0 {
            return Err(Error::NonPositiveShape { theta });
        }
        let e = Complex64::from_polar(1.0, theta);
        grid.z.push(r * e);
        grid.dz.push(Complex64::new(dr, r) * e);
        let (val, dot, _) = basis_row(terms, l1, l2, theta);
        grid.basis.extend_from_slice(&val);
        grid.basis_dot.extend_from_slice(&dot);
    }
    Ok(grid)
}

// Quadrant reflection tables. Index 0 is the first quadrant; 1, 2, 3 follow
// counterclockwise. `sign_e` is the coefficient pattern of the potential's
// real part, `sign_o` of its imaginary part, `sign_d` the extra sign the
// imaginary part picks up in the derivative kernel of the conjugated
// quadrants.
const SIGN_E: [f64; 4] = [1.0, -1.0, -1.0, 1.0];
const SIGN_O: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
const SIGN_D: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

fn quadrant_z(q: usize, z1: Complex64) -> Complex64 {
    match q {
        0 => z1,
        1 => -z1.conj(),
        2 => -z1,
        _ => z1.conj(),
    }
}

fn quadrant_zbar(q: usize, z1: Complex64) -> Complex64 {
    match q {
        0 => z1.conj(),
        1 => -z1,
        2 => -z1.conj(),
        _ => z1,
    }
}

fn quadrant_dz(q: usize, dz1: Complex64) -> Complex64 {
    match q {
        0 => dz1,
        1 => dz1.conj(),
        2 => -dz1,
        _ => -dz1.conj(),
    }
}

/// Discretize the integral equation, the analyticity constraint, and the two
/// endpoint conditions for a given shape and load ratio `chi`.
pub fn assemble_system(
    shape: &impl VoidShape,
    chi: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<AssembledSystem> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "basis size {n} below minimum 8"
        )));
    }
    let (alpha1, alpha2) = shape.corner_angles();
    let cornered1 = alpha1 > PI + 1e-9;
    let cornered2 = alpha2 > PI + 1e-9;
    let l1 = williams_lambda(alpha1);
    let l2 = williams_lambda(alpha2);
    let terms = build_terms(n, cornered1, cornered2);

    let rule = graded_rule(
        0.0,
        FRAC_PI_2,
        opts.panel_order,
        if cornered1 { opts.grading_levels } else { 0 },
        if cornered2 { opts.grading_levels } else { 0 },
    );
    let master = build_master_grid(shape, &terms, l1, l2, &rule)?;
    let grid = BasisGrid::new(n - 1, &rule);
    let nc = grid.n_colloc;
    let m_nodes = master.theta.len();
    let inv_2pii = Complex64::new(0.0, -0.5 / PI);

    // Per collocation point: complex coefficient rows for the integral
    // equation and the analyticity constraint, plus the constant term.
    struct RowSet {
        eq_int_a: Vec<Complex64>,
        eq_int_b: Vec<Complex64>,
        rhs_int: Complex64,
        eq_ana_a: Vec<Complex64>,
        eq_ana_b: Vec<Complex64>,
    }

    let rows: Vec<Result<RowSet>> = exec::map_indexed(nc, |ic| {
        let ti = grid.theta_nodes[ic];
        let (ri, dri, ddri) = shape.radial(ti);
        if ri <= 0.0 {
            return Err(Error::NonPositiveShape { theta: ti });
        }
        let ei = Complex64::from_polar(1.0, ti);
        let zi = ri * ei;
        let dzi = Complex64::new(dri, ri) * ei;
        let ddzi = Complex64::new(ddri - ri, 2.0 * dri) * ei;
        let zbi = zi.conj();
        let (bi, bdi, bddi) = basis_row(&terms, l1, l2, ti);
        let di: Vec<Complex64> = bdi.iter().map(|&d| d / dzi).collect();

        let mut acc_e = vec![Complex64::default(); n];
        let mut acc_o = vec![Complex64::default(); n];
        let mut acc_d = vec![Complex64::default(); n];
        let mut acc_db = vec![Complex64::default(); n];
        let mut s_kern = Complex64::default();
        let mut acc_rhs = Complex64::default();

        for node in 0..m_nodes {
            let z1 = master.z[node];
            let dz1 = master.dz[node];
            let w = master.weight[node];
            let bq = &master.basis[node * n..(node + 1) * n];
            let bdq = &master.basis_dot[node * n..(node + 1) * n];
            let inv_dz1 = 1.0 / dz1;
            for q in 0..4 {
                let zq = quadrant_z(q, z1);
                let dzw = quadrant_dz(q, dz1) * w;
                let zbq = quadrant_zbar(q, z1);
                if q == 0 && (master.theta[node] - ti).abs() < 1e-9 {
                    // Removable point: divided differences replaced by their
                    // limits, and the node is excluded from the extracted
                    // kernel sum.
                    let lim_phi = dzw / dzi;
                    let dd = (bddi
                        .iter()
                        .zip(&bdi)
                        .map(|(&s, &d)| (s * dzi - d * ddzi))
                        .collect::<Vec<_>>(),);
                    for k in 0..n {
                        let p_lim = bdi[k] * lim_phi;
                        acc_e[k] += p_lim;
                        acc_o[k] += p_lim;
                        let f_dot = dzi.conj() * di[k] + zbi * dd.0[k] / (dzi * dzi);
                        let d_lim = f_dot / dzi * dzw;
                        acc_d[k] += d_lim;
                        acc_db[k] += d_lim;
                    }
                    acc_rhs += dzi.conj() / dzi * dzw;
                    continue;
                }
                let kern = dzw / (zq - zi);
                let w1 = if q % 2 == 0 {
                    zbq * kern * inv_dz1
                } else {
                    zbq * kern * inv_dz1.conj()
                };
                s_kern += kern;
                acc_rhs += (zbq - zbi) * kern;
                let (se, so, sd) = (SIGN_E[q], SIGN_O[q], SIGN_D[q]);
                for k in 0..n {
                    let p = bq[k] * kern;
                    acc_e[k] += se * p;
                    acc_o[k] += so * p;
                    let pd = bdq[k] * w1;
                    acc_d[k] += pd;
                    acc_db[k] += sd * pd;
                }
            }
        }

        let mut eq_int_a = Vec::with_capacity(n);
        let mut eq_int_b = Vec::with_capacity(n);
        let mut eq_ana_a = Vec::with_capacity(n);
        let mut eq_ana_b = Vec::with_capacity(n);
        for k in 0..n {
            let hoist_phi = bi[k] * s_kern;
            let hoist_d = zbi * di[k] * s_kern;
            eq_int_a.push(
                bi[k] + zbi * di[k] + inv_2pii * (acc_e[k] - hoist_phi + acc_d[k] - hoist_d),
            );
            eq_int_b.push(
                -I * bi[k]
                    + I * zbi * di[k]
                    + inv_2pii * (-I * acc_o[k] + I * hoist_phi + I * acc_db[k] - I * hoist_d),
            );
            eq_ana_a.push(bi[k] + inv_2pii * (acc_e[k] - hoist_phi));
            eq_ana_b.push(I * bi[k] + inv_2pii * (I * acc_o[k] - I * hoist_phi));
        }
        let rhs_int = -(0.5 * (1.0 + chi) * zbi
            + (1.0 + chi) * 0.5 * inv_2pii * acc_rhs
            + 0.5 * (chi - 1.0) * zi);
        Ok(RowSet {
            eq_int_a,
            eq_int_b,
            rhs_int,
            eq_ana_a,
            eq_ana_b,
        })
    });

    let nrows = if opts.analyticity { 4 * nc + 2 } else { 2 * nc + 2 };
    let mut matrix = DMatrix::zeros(nrows, 2 * n);
    let mut rhs = DVector::zeros(nrows);
    for (ic, row) in rows.into_iter().enumerate() {
        let row = row?;
        let (re_row, im_row) = (2 * ic, 2 * ic + 1);
        for k in 0..n {
            matrix[(re_row, k)] = row.eq_int_a[k].re;
            matrix[(re_row, n + k)] = row.eq_int_b[k].re;
            matrix[(im_row, k)] = row.eq_int_a[k].im;
            matrix[(im_row, n + k)] = row.eq_int_b[k].im;
        }
        rhs[re_row] = row.rhs_int.re;
        rhs[im_row] = row.rhs_int.im;
        if opts.analyticity {
            let (re_row, im_row) = (2 * nc + 2 * ic, 2 * nc + 2 * ic + 1);
            for k in 0..n {
                matrix[(re_row, k)] = row.eq_ana_a[k].re;
                matrix[(re_row, n + k)] = row.eq_ana_b[k].re;
                matrix[(im_row, k)] = row.eq_ana_a[k].im;
                matrix[(im_row, n + k)] = row.eq_ana_b[k].im;
            }
        }
    }
    // Endpoint conditions: Re phi = 0 at pi/2, Im phi = 0 at 0.
    let (b_right, _, _) = basis_row(&terms, l1, l2, FRAC_PI_2);
    let (b_left, _, _) = basis_row(&terms, l1, l2, 0.0);
    let row = nrows - 2;
    for k in 0..n {
        matrix[(row, k)] = b_right[k];
        matrix[(row + 1, n + k)] = b_left[k];
    }

    Ok(AssembledSystem {
        matrix,
        rhs,
        terms,
        lambda1: l1,
        lambda2: l2,
        grid,
    })
}

/// Assemble and solve with explicit options.
pub fn solve_with(
    shape: &impl VoidShape,
    chi: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<ElasticitySolution> {
    let asm = assemble_system(shape, chi, n, opts)?;
    let ncols = asm.matrix.ncols();
    let mut scales = DVector::from_element(ncols, 1.0);
    let mut scaled = asm.matrix.clone();
    for j in 0..ncols {
        let norm = scaled.column(j).norm();
        if norm > 1e-300 {
            scales[j] = norm;
            let mut col = scaled.column_mut(j);
            col /= norm;
        }
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .filter(|&s| s > smax * 1e-14)
        .fold(smax, f64::min);
    let y = svd
        .solve(&asm.rhs, smax * 1e-14)
        .map_err(|e| Error::LinearSolve(e.to_string()))?;
    let u = y.component_div(&scales);
    let residual_norm = (&asm.matrix * &u - &asm.rhs).norm();

    let nu = asm.terms.len();
    let mut coeffs = GoursatCoeffs::zero(asm.terms, asm.lambda1, asm.lambda2);
    for k in 0..nu {
        coeffs.a[k] = u[k];
        coeffs.b[k] = u[nu + k];
    }
    Ok(ElasticitySolution {
        coeffs,
        chi,
        n,
        residual_norm,
        cond_estimate: smax / smin,
    })
}

/// Assemble and solve with default options.
pub fn solve(shape: &impl VoidShape, chi: f64, n: usize) -> Result<ElasticitySolution> {
    solve_with(shape, chi, n, &SolverOptions::default())
}

/// Numerical check of the extracted principal value: the full-contour
/// integral of `dz / (z - z0)` for `z0` on a smooth part of the boundary,
/// which should equal `pi i`.
pub fn pv_identity(shape: &impl VoidShape, theta0: f64, opts: &SolverOptions) -> Complex64 {
    let (alpha1, alpha2) = shape.corner_angles();
    let rule = graded_rule(
        0.0,
        FRAC_PI_2,
        opts.panel_order,
        if alpha1 > PI + 1e-9 { opts.grading_levels } else { 0 },
        if alpha2 > PI + 1e-9 { opts.grading_levels } else { 0 },
    );
    let (r0, dr0, _) = shape.radial(theta0);
    let e0 = Complex64::from_polar(1.0, theta0);
    let z0 = r0 * e0;
    let dz0 = Complex64::new(dr0, r0) * e0;
    let mut total = Complex64::default();
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (r, dr, _) = shape.radial(t);
        let e = Complex64::from_polar(1.0, t);
        let z1 = r * e;
        let dz1 = Complex64::new(dr, r) * e;
        for q in 0..4 {
            let zq = quadrant_z(q, z1);
            let dzw = quadrant_dz(q, dz1) * w;
            if q == 0 && (t - theta0).abs() < 1e-9 {
                // At the removable point the subtracted integrand tends to
                // z''/(2 z'): irrelevant here because the identity only uses
                // the extracted-kernel sum; skip the node.
                continue;
            }
            total += dzw / (zq - z0);
        }
    }
    // Add back the half-residue extracted analytically at z0: the skipped
    // neighborhood integrates to zero in the principal value sense.
    let _ = dz0;
    total
}

/// Relative L2 norm of `f - g` over `[0, pi/2]`:
/// `sqrt( (2/pi) * integral |f - g|^2 )`, with a caller-chosen rule.
pub fn l2_error(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, rule: &GradedRule) -> f64 {
    let v = rule.integrate(|t| {
        let d = f(t) - g(t);
        d * d
    });
    (2.0 / PI * v).sqrt()
}

/// Contour field evaluator: Cauchy integrals of the solved boundary values,
/// giving the potentials and their derivatives anywhere in the solid.
pub struct BoundaryField {
    z: Vec<Complex64>,
    dzw: Vec<Complex64>,
    phi: Vec<Complex64>,
    h: Vec<Complex64>,
}

impl BoundaryField {
    pub fn new(sol: &ElasticitySolution, shape: &impl VoidShape, opts: &SolverOptions) -> Self {
        let (alpha1, alpha2) = shape.corner_angles();
        let rule = graded_rule(
            0.0,
            FRAC_PI_2,
            opts.panel_order,
            if alpha1 > PI + 1e-9 { opts.grading_levels } else { 0 },
            if alpha2 > PI + 1e-9 { opts.grading_levels } else { 0 },
        );
        let m = rule.nodes.len();
        let mut field = BoundaryField {
            z: Vec::with_capacity(4 * m),
            dzw: Vec::with_capacity(4 * m),
            phi: Vec::with_capacity(4 * m),
            h: Vec::with_capacity(4 * m),
        };
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (r, dr, _) = shape.radial(t);
            let e = Complex64::from_polar(1.0, t);
            let z1 = r * e;
            let dz1 = Complex64::new(dr, r) * e;
            let phi1 = sol.coeffs.phi(t);
            let h1 = sol.h(shape, t);
            for q in 0..4 {
                field.z.push(quadrant_z(q, z1));
                field.dzw.push(quadrant_dz(q, dz1) * w);
                let map = |v: Complex64| match q {
                    0 => v,
                    1 => -v.conj(),
                    2 => -v,
                    _ => v.conj(),
                };
                field.phi.push(map(phi1));
                field.h.push(map(h1));
            }
        }
        field
    }

    fn cauchy(&self, values: &[Complex64], t: Complex64, order: u32) -> Complex64 {
        let inv_2pii = Complex64::new(0.0, -0.5 / PI);
        let fact = match order {
            0 => 1.0,
            1 => 1.0,
            _ => 2.0,
        };
        let mut acc = Complex64::default();
        for j in 0..self.z.len() {
            let d = self.z[j] - t;
            let kern = match order {
                0 => 1.0 / d,
                1 => 1.0 / (d * d),
                _ => 1.0 / (d * d * d),
            };
            acc += values[j] * self.dzw[j] * kern;
        }
        -inv_2pii * acc * fact
    }

    /// Perturbation potential at an exterior point.
    pub fn phi_at(&self, t: Complex64) -> Complex64 {
        self.cauchy(&self.phi, t, 0)
    }

    pub fn phi_deriv(&self, t: Complex64, order: u32) -> Complex64 {
        self.cauchy(&self.phi, t, order)
    }

    pub fn h_at(&self, t: Complex64) -> Complex64 {
        self.cauchy(&self.h, t, 0)
    }

    pub fn h_deriv(&self, t: Complex64) -> Complex64 {
        self.cauchy(&self.h, t, 1)
    }
}
