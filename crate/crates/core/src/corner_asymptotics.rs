//! Corner singularity exponent and the induced shape corner coefficients.
//!
//! Near a traction-free wedge vertex of solid angle `beta`, the boundary
//! potential behaves like `s^(lambda-1)` and the stresses like
//! `s^(lambda-2)`, with `lambda` the smallest root above `3/2` of
//!
//! ```text
//! sin((lambda - 1) beta) = -(lambda - 1) sin(beta)
//! ```
//!
//! For the equilibrium shape, the singular stress must be cancelled by a
//! curvature singularity: the shape carries terms `c1 th^(2L-2) + c2 th^L`
//! whose coefficients follow from matching the two singular orders of the
//! surface equilibrium equation. Only the local exponent comes from this
//! analysis; the singular amplitudes `a1, b1` always come from the global
//! elasticity solve.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Wedge singularity exponent for a solid corner angle `beta`.
///
/// `beta = pi` gives `lambda = 2` (constant stresses), `beta = 2 pi` gives
/// `lambda = 3/2`; in between the root is found by bisection on
/// `m = lambda - 1` in `(1/2, 1)`. For `beta < pi` the stresses are regular
/// and the exponent is clamped to 2.
pub fn williams_lambda(beta: f64) -> f64 {
    if beta <= PI {
        return 2.0;
    }
    if (beta - 2.0 * PI).abs() < 1e-14 {
        return 1.5;
    }
    let f = |m: f64| (m * beta).sin() + m * beta.sin();
    let mut lo = 0.5 + 1e-9;
    let mut hi = 1.0 - 1e-9;
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    1.0 + 0.5 * (lo + hi)
}

/// Inputs for the corner coefficient balance at one corner.
///
/// `a1, b1` are the singular potential coefficients, `a_reg, b_reg` the
/// regular parts of the potential's theta-derivative at the corner. For the
/// corner at `theta = pi/2` the caller passes the mirrored combinations (see
/// the equilibrium module).
#[derive(Debug, Clone, Copy)]
pub struct CornerInputs {
    pub a1: f64,
    pub b1: f64,
    pub a_reg: f64,
    pub b_reg: f64,
    /// Solid corner angle.
    pub alpha: f64,
    /// Singularity exponent of this corner.
    pub lambda: f64,
    /// Radius at the corner.
    pub r0: f64,
}

/// Shape corner coefficients `(c1, c2)` that cancel the two singular orders
/// of the surface equilibrium equation at the corner.
pub fn shape_corner_coefficients(
    inp: &CornerInputs,
    eps: f64,
    load: f64,
    chi: f64,
) -> Result<(f64, f64)> {
    if inp.lambda >= 2.0 || load == 0.0 {
        return Ok((0.0, 0.0));
    }
    let two_l3 = 2.0 * inp.lambda - 3.0;
    if two_l3.abs() < 1e-9 {
        return Err(Error::DegenerateCorner(format!(
            "lambda = {} too close to 3/2",
            inp.lambda
        )));
    }
    let g = 1.0 - 15.0 * eps * (2.0 * inp.alpha).cos();
    if g.abs() < 1e-9 {
        return Err(Error::DegenerateCorner(format!(
            "stiffness vanishes at corner angle {}",
            inp.alpha
        )));
    }
    let ct = 1.0 / (0.5 * inp.alpha).tan();
    let m = 1.0 + ct * ct;
    let u = inp.a1 * ct + inp.b1;
    let v = inp.a_reg * ct + inp.b_reg;
    let lam = inp.lambda;

    let c1 = -2.0 * load * (lam - 1.0) * u * u / (g * m.sqrt() * two_l3);
    let c2 = -2.0 * load * u * m.sqrt() * inp.r0 / (g * lam) * ((1.0 + chi) + 4.0 * v / (inp.r0 * m));
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curvature, orientation};
    use crate::surface_energy::stiffness;

    #[test]
    fn lambda_endpoint_values() {
        assert_eq!(williams_lambda(PI), 2.0);
        assert_eq!(williams_lambda(2.0 * PI), 1.5);
    }

    #[test]
    fn lambda_reentrant_right_angle() {
        // frozen from the bisection at beta = 3 pi / 2
        let lam = williams_lambda(1.5 * PI);
        assert!((lam - 1.0 - 0.544483736782464).abs() < 1e-10, "{lam:.15}");
        let m = lam - 1.0;
        let beta = 1.5 * PI;
        assert!(((m * beta).sin() + m * beta.sin()).abs() < 1e-12);
    }

    #[test]
    fn lambda_monotone_with_small_residual() {
        let mut prev = 2.0 + 1e-12;
        for j in 0..=200 {
            let beta = PI + (j as f64 / 200.0) * PI;
            let lam = williams_lambda(beta);
            assert!(lam < prev, "not decreasing at beta = {beta}");
            let m = lam - 1.0;
            assert!(((m * beta).sin() + m * beta.sin()).abs() < 1e-12);
            prev = lam;
        }
    }

    #[test]
    fn coefficients_vanish_without_forcing() {
        let inp = CornerInputs {
            a1: 0.3,
            b1: -0.2,
            a_reg: 0.1,
            b_reg: 0.4,
            alpha: 3.66,
            lambda: 1.75,
            r0: 1.2,
        };
        assert_eq!(
            shape_corner_coefficients(&inp, 0.08, 0.0, 0.0).unwrap(),
            (0.0, 0.0)
        );
        // a1 cot(alpha/2) + b1 = 0 kills both orders
        let ct = 1.0 / (0.5 * 3.66f64).tan();
        let inp = CornerInputs {
            a1: 1.0,
            b1: -ct,
            ..inp
        };
        let (c1, c2) = shape_corner_coefficients(&inp, 0.08, 0.3, 0.0).unwrap();
        assert!(c1.abs() < 1e-14);
        assert!(c2.abs() < 1e-14);
    }

    #[test]
    fn degenerate_parameters_rejected() {
        let inp = CornerInputs {
            a1: 0.3,
            b1: 0.2,
            a_reg: 0.0,
            b_reg: 0.0,
            alpha: 2.0 * PI - 1e-9,
            lambda: 1.5 + 1e-12,
            r0: 1.0,
        };
        assert!(matches!(
            shape_corner_coefficients(&inp, 0.08, 0.3, 0.0),
            Err(Error::DegenerateCorner(_))
        ));
    }

    /// Independent check of the singular balance: build a synthetic shape and
    /// potential with the local asymptotic forms, then evaluate the actual
    /// surface equilibrium expression near the corner. With the computed
    /// `(c1, c2)` the singular parts cancel and the expression approaches a
    /// constant; perturbing `c2` reintroduces the `th^(lambda-2)` blow-up.
    #[test]
    fn singular_balance_cancels() {
        let eps = 0.08;
        let load = 0.3;
        let chi = 0.0;
        let alpha: f64 = 3.66;
        let lambda = williams_lambda(alpha);
        let r0 = 1.1;
        let slope = -((alpha - PI) / 2.0).tan() * r0;
        let inp = CornerInputs {
            a1: 0.21,
            b1: -0.13,
            a_reg: 0.05,
            b_reg: -0.33,
            alpha,
            lambda,
            r0,
        };
        let (c1, c2) = shape_corner_coefficients(&inp, eps, load, chi).unwrap();

        let residual = |c1: f64, c2: f64, th: f64| -> f64 {
            // shape with the prescribed corner behavior
            let r = r0 + slope * th + c1 * th.powf(2.0 * lambda - 2.0) + c2 * th.powf(lambda);
            let dr = slope
                + c1 * (2.0 * lambda - 2.0) * th.powf(2.0 * lambda - 3.0)
                + c2 * lambda * th.powf(lambda - 1.0);
            let ddr = c1 * (2.0 * lambda - 2.0) * (2.0 * lambda - 3.0) * th.powf(2.0 * lambda - 4.0)
                + c2 * lambda * (lambda - 1.0) * th.powf(lambda - 2.0);
            // potential with matching singular/regular derivative parts
            let pd_re = (lambda - 1.0) * inp.a1 * th.powf(lambda - 2.0) + inp.a_reg;
            let pd_im = (lambda - 1.0) * inp.b1 * th.powf(lambda - 2.0) + inp.b_reg;
            let dz = num_complex::Complex64::new(dr, r)
                * num_complex::Complex64::from_polar(1.0, th);
            let trace = 1.0
                + chi
                + 4.0 * (num_complex::Complex64::new(pd_re, pd_im) / dz).re;
            let w = orientation(r, dr, th);
            stiffness(w, eps) * curvature(r, dr, ddr) - 0.25 * load * trace * trace
        };

        let r3 = residual(c1, c2, 1e-3);
        let r4 = residual(c1, c2, 1e-4);
        let r5 = residual(c1, c2, 1e-5);
        // balanced: successive values settle toward a constant
        assert!(
            (r4 - r5).abs() < (r3 - r4).abs(),
            "not settling: {r3} {r4} {r5}"
        );
        assert!((r3 - r5).abs() < 1e-2 * r5.abs().max(1.0), "{r3} vs {r5}");

        // unbalanced subleading coefficient: th^(lambda-2) divergence returns
        let b3 = residual(c1, 1.5 * c2, 1e-3);
        let b5 = residual(c1, 1.5 * c2, 1e-5);
        assert!(
            (b5 - r5).abs() > 10.0 * (b3 - r3).abs(),
            "perturbation did not diverge"
        );
    }
}
