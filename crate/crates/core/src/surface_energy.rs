//! Four-fold anisotropic surface energy `gamma = 1 + eps cos(4 omega)`.
//!
//! The mean interfacial tension is scaled to one. For `eps > 1/15` the
//! surface stiffness `gamma + gamma''` turns negative around the normal
//! directions of the axes; those orientations are excluded from equilibrium
//! shapes by corners whose stress-free angle solves
//! `tan((a - pi)/2) = -gamma'/gamma` at `(a - pi)/2`.

use crate::error::{Error, Result};
use crate::geometry::{Corner, ShapeSpec, VoidShape};
use std::f64::consts::{FRAC_PI_2, PI};

/// Surface energy per length or its orientation derivatives (`deriv` 0..2).
pub fn gamma(omega: f64, eps: f64, deriv: usize) -> f64 {
    match deriv {
        0 => 1.0 + eps * (4.0 * omega).cos(),
        1 => -4.0 * eps * (4.0 * omega).sin(),
        2 => -16.0 * eps * (4.0 * omega).cos(),
        _ => panic!("gamma derivative order {deriv} not supported"),
    }
}

/// Surface stiffness `gamma + gamma'' = 1 - 15 eps cos(4 omega)`.
pub fn stiffness(omega: f64, eps: f64) -> f64 {
    1.0 - 15.0 * eps * (4.0 * omega).cos()
}

/// Stress-free corner angle: the root of
/// `tan((a - pi)/2) + gamma'((a - pi)/2) / gamma((a - pi)/2) = 0`
/// with `a` in `(pi, 2 pi)`. Returns `None` in the corner-free regime.
///
/// The bracket is found by a 0.01 rad scan from `pi` upward and refined by
/// bisection to 1e-12; the root closest to `pi` is taken.
pub fn wulff_corner_angle(eps: f64) -> Result<Option<f64>> {
    if eps.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "anisotropy strength {eps} outside (-1, 1)"
        )));
    }
    let f = |alpha: f64| {
        let half = 0.5 * (alpha - PI);
        half.tan() + gamma(half, eps, 1) / gamma(half, eps, 0)
    };
    let step = 0.01;
    let mut lo = PI + 1e-6;
    let mut flo = f(lo);
    let mut bracket = None;
    let mut alpha = lo + step;
    while alpha < 2.0 * PI - 1e-6 {
        let fa = f(alpha);
        if flo == 0.0 || flo * fa < 0.0 {
            bracket = Some((lo, alpha));
            break;
        }
        lo = alpha;
        flo = fa;
        alpha += step;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(None);
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    if (root - PI).abs() < 1e-10 {
        Ok(None)
    } else {
        Ok(Some(root))
    }
}

/// Natural boundary condition residual `gamma'(omega)/gamma(omega) - r'/r`
/// at one end of the quadrant; zero at equilibrium corner angles.
pub fn corner_bc_residual(spec: &ShapeSpec, corner: Corner, eps: f64) -> Result<f64> {
    let theta = match corner {
        Corner::A => 0.0,
        Corner::B => FRAC_PI_2,
    };
    let (r, dr) = spec.eval_end(corner);
    if r <= 0.0 {
        return Err(Error::NonPositiveShape { theta });
    }
    let omega = crate::geometry::orientation(r, dr, theta);
    Ok(gamma(omega, eps, 1) / gamma(omega, eps, 0) - dr / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::preset_wulff;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn gamma_examples() {
        assert!((gamma(0.0, 0.08, 0) - 1.08).abs() < 1e-15);
        assert!((gamma(FRAC_PI_4, 0.08, 0) - 0.92).abs() < 1e-15);
        let eps = 0.11;
        assert!((gamma(PI / 8.0, eps, 1) + 4.0 * eps).abs() < 1e-14);
    }

    #[test]
    fn stiffness_examples() {
        assert!((stiffness(0.0, 0.08) + 0.2).abs() < 1e-14);
        assert!((stiffness(FRAC_PI_4, 0.08) - 2.2).abs() < 1e-14);
        assert!((stiffness(1.234, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stiffness_is_gamma_plus_second_derivative() {
        for j in 0..200 {
            let w = j as f64 * 0.05;
            let direct = gamma(w, 0.08, 0) + gamma(w, 0.08, 2);
            assert!((stiffness(w, 0.08) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_has_quarter_period() {
        for j in 0..50 {
            let w = j as f64 * 0.13;
            for d in 0..=2 {
                assert!((gamma(w, 0.08, d) - gamma(w + FRAC_PI_2, 0.08, d)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corner_angle_published_and_frozen() {
        let a0 = wulff_corner_angle(0.08).unwrap().unwrap();
        assert!((a0 - 3.66).abs() < 0.01);
        // frozen from a 1e-13 dense-scan + bisection reference
        assert!((a0 - 3.65734062638653366).abs() < 1e-10, "a0 = {a0:.15}");

        // independent check: dense scan of the bracketing function
        let f = |alpha: f64| {
            let half = 0.5 * (alpha - PI);
            half.tan() + gamma(half, 0.08, 1) / gamma(half, 0.08, 0)
        };
        assert!(f(a0 - 1e-7) * f(a0 + 1e-7) < 0.0);
    }

    #[test]
    fn corner_free_when_isotropic() {
        assert!(wulff_corner_angle(0.0).unwrap().is_none());
        // below the 1/16 threshold the only root is the trivial one
        assert!(wulff_corner_angle(0.05).unwrap().is_none());
    }

    #[test]
    fn corner_bc_examples() {
        let circle = ShapeSpec::circle();
        assert!(corner_bc_residual(&circle, Corner::A, 0.0).unwrap().abs() < 1e-14);
        assert!(corner_bc_residual(&circle, Corner::A, 0.08).unwrap().abs() < 1e-12);
        assert!(corner_bc_residual(&circle, Corner::B, 0.08).unwrap().abs() < 1e-12);

        // isotropic shape with slope 0.1 at the x axis: residual is -0.1
        let mut tilted = ShapeSpec::circle();
        tilted.cheb = vec![1.0, 0.1 / crate::spectral::MAP_SCALE];
        let (r, dr) = tilted.eval_end(Corner::A);
        assert!((dr / r - 0.1 / r).abs() < 1e-12);
        let res = corner_bc_residual(&tilted, Corner::A, 0.0).unwrap();
        assert!((res + dr / r).abs() < 1e-14);
    }

    #[test]
    fn wulff_shape_satisfies_corner_bc() {
        let p = preset_wulff(0.08, 40).unwrap();
        let res_a = corner_bc_residual(&p.spec, Corner::A, 0.08).unwrap();
        let res_b = corner_bc_residual(&p.spec, Corner::B, 0.08).unwrap();
        assert!(res_a.abs() < 1e-6, "corner A residual {res_a}");
        assert!(res_b.abs() < 1e-6, "corner B residual {res_b}");
    }
}
