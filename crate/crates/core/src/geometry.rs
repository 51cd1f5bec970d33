//! Polar boundary shapes and their differential geometry.
//!
//! A first-quadrant shape `r(theta)` on `[0, pi/2]` generates the full void
//! boundary by two-fold reflection symmetry. The spectral representation
//! carries two singular corner-term pairs,
//!
//! ```text
//! r = c1 th^(2L1-2) + c2 th^L1 + c3 (pi/2-th)^(2L2-2) + c4 (pi/2-th)^L2
//!     + sum_k c_k T_k(th)
//! ```
//!
//! where `L1, L2` are the elastic singularity exponents of the two corners.
//! The second derivative of the leading corner term diverges like
//! `th^(2L-4)`, which is the curvature singularity that balances the
//! singular elastic stress.

use crate::error::{Error, Result};
use crate::spectral::{self, graded_rule, GradedRule};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// The two corners of the first-quadrant arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    /// Corner on the positive x axis (`theta = 0`).
    A,
    /// Corner on the positive y axis (`theta = pi/2`).
    B,
}

/// Boundary curve of the void, evaluable in polar form.
pub trait VoidShape: Sync {
    /// Radius and its first two theta-derivatives. The second derivative may
    /// be infinite exactly at a cornered endpoint.
    fn radial(&self, theta: f64) -> (f64, f64, f64);

    /// Solid corner angles `(alpha1, alpha2)` at `theta = 0` and `pi/2`;
    /// `pi` means the boundary is smooth across that axis.
    fn corner_angles(&self) -> (f64, f64);
}

/// Spectral shape: corner singularity pairs plus a Chebyshev tail.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeSpec {
    /// Corner exponent at `theta = 0`, in `(3/2, 2]`.
    pub lambda1: f64,
    /// Corner exponent at `theta = pi/2`.
    pub lambda2: f64,
    /// Corner-term coefficients `c1..c4`.
    pub corner: [f64; 4],
    /// Chebyshev coefficients of the tail, `T_0` upward.
    pub cheb: Vec<f64>,
    /// Solid corner angle at `theta = 0` (radians).
    pub alpha1: f64,
    /// Solid corner angle at `theta = pi/2` (radians).
    pub alpha2: f64,
}

/// One evaluated boundary point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
    /// Boundary point `x + i y`.
    pub z: Complex64,
    /// Tangent `dz/dtheta`.
    pub dz: Complex64,
    /// Curvature, positive for a convex void shape.
    pub kappa: f64,
    /// Orientation of the solid-exterior normal.
    pub omega: f64,
    /// Cumulative arc length from `theta = 0`.
    pub s: f64,
}

fn power_terms(c: f64, e: f64, u: f64) -> (f64, f64, f64) {
    if c == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    (
        c * u.powf(e),
        c * e * u.powf(e - 1.0),
        c * e * (e - 1.0) * u.powf(e - 2.0),
    )
}

impl ShapeSpec {
    /// Unit circle: smooth, radius one, correctly normalized area.
    pub fn circle() -> Self {
        ShapeSpec {
            lambda1: 2.0,
            lambda2: 2.0,
            corner: [0.0; 4],
            cheb: vec![1.0],
            alpha1: PI,
            alpha2: PI,
        }
    }

    /// Checked evaluation; rejects the second derivative exactly at a
    /// cornered endpoint where it is singular.
    pub fn eval(&self, theta: f64) -> Result<(f64, f64, f64)> {
        let singular_left =
            theta == 0.0 && (self.corner[0] != 0.0 || self.corner[1] != 0.0) && self.lambda1 < 2.0;
        let singular_right = theta == FRAC_PI_2
            && (self.corner[2] != 0.0 || self.corner[3] != 0.0)
            && self.lambda2 < 2.0;
        if singular_left || singular_right {
            return Err(Error::SingularEndpoint(theta));
        }
        Ok(self.radial(theta))
    }

    /// Radius and slope at an endpoint (both finite even at corners).
    pub fn eval_end(&self, corner: Corner) -> (f64, f64) {
        let theta = match corner {
            Corner::A => 0.0,
            Corner::B => FRAC_PI_2,
        };
        let (r, dr, _) = self.radial(theta);
        (r, dr)
    }

    /// Rescale all coefficients so the first-quadrant area is `pi/4`.
    /// Returns the scale factor applied.
    pub fn normalize_area(&mut self) -> f64 {
        let area = area_first_quadrant(self);
        let scale = (std::f64::consts::FRAC_PI_4 / area).sqrt();
        for c in &mut self.corner {
            *c *= scale;
        }
        for c in &mut self.cheb {
            *c *= scale;
        }
        scale
    }
}

impl VoidShape for ShapeSpec {
    fn radial(&self, theta: f64) -> (f64, f64, f64) {
        let u = FRAC_PI_2 - theta;
        let mut r = 0.0;
        let mut dr = 0.0;
        let mut ddr = 0.0;

        let (v, d, dd) = power_terms(self.corner[0], 2.0 * self.lambda1 - 2.0, theta);
        r += v;
        dr += d;
        ddr += dd;
        let (v, d, dd) = power_terms(self.corner[1], self.lambda1, theta);
        r += v;
        dr += d;
        ddr += dd;
        // Mirrored terms: odd derivative orders flip sign.
        let (v, d, dd) = power_terms(self.corner[2], 2.0 * self.lambda2 - 2.0, u);
        r += v;
        dr -= d;
        ddr += dd;
        let (v, d, dd) = power_terms(self.corner[3], self.lambda2, u);
        r += v;
        dr -= d;
        ddr += dd;

        let (tv, td, tdd) = spectral::chebyshev_table(theta, self.cheb.len());
        for (k, &c) in self.cheb.iter().enumerate() {
            r += c * tv[k];
            dr += c * td[k];
            ddr += c * tdd[k];
        }
        (r, dr, ddr)
    }

    fn corner_angles(&self) -> (f64, f64) {
        (self.alpha1, self.alpha2)
    }
}

/// Surface curvature from the polar derivatives, `kappa > 0` for a convex
/// void shape; the unit circle has `kappa = 1`.
pub fn curvature(r: f64, dr: f64, ddr: f64) -> f64 {
    (2.0 * dr * dr - r * ddr + r * r) / (dr * dr + r * r).powf(1.5)
}

/// Orientation angle of the solid-exterior normal, measured from the
/// positive x axis; on a circle `omega = theta + pi`.
pub fn orientation(r: f64, dr: f64, theta: f64) -> f64 {
    let dz = Complex64::new(dr, r) * Complex64::from_polar(1.0, theta);
    let w = (Complex64::i() * dz).arg();
    if w < 0.0 {
        w + TAU
    } else {
        w
    }
}

/// Full boundary sample at one angle with externally accumulated arc length.
pub fn sample(shape: &impl VoidShape, theta: f64, s: f64) -> BoundarySample {
    let (r, dr, ddr) = shape.radial(theta);
    let e = Complex64::from_polar(1.0, theta);
    BoundarySample {
        theta,
        r,
        dr,
        ddr,
        z: r * e,
        dz: Complex64::new(dr, r) * e,
        kappa: curvature(r, dr, ddr),
        omega: orientation(r, dr, theta),
        s,
    }
}

/// First-quadrant area by corner-graded quadrature of `r^2 / 2`.
pub fn area_first_quadrant(shape: &impl VoidShape) -> f64 {
    let rule = graded_rule(0.0, FRAC_PI_2, 16, 30, 30);
    rule.integrate(|t| {
        let (r, _, _) = shape.radial(t);
        0.5 * r * r
    })
}

/// Arc length of the first-quadrant arc.
pub fn quadrant_arc_length(shape: &impl VoidShape) -> f64 {
    let rule = graded_rule(0.0, FRAC_PI_2, 16, 30, 30);
    rule.integrate(|t| {
        let (r, dr, _) = shape.radial(t);
        (r * r + dr * dr).sqrt()
    })
}

/// Overlapping-circles shape: the `x > 0` part of a unit circle centered at
/// `(cos(alpha0), 0)`, reflected across the y axis. Smooth at `theta = 0`,
/// corner of solid angle `2 alpha0` at `theta = pi/2`.
#[derive(Debug, Clone, Copy)]
pub struct OverlappingCircles {
    pub alpha0: f64,
}

impl OverlappingCircles {
    pub fn new(alpha0: f64) -> Result<Self> {
        if !(FRAC_PI_2..PI).contains(&alpha0) {
            return Err(Error::InvalidParameter(format!(
                "overlap angle {alpha0} outside [pi/2, pi)"
            )));
        }
        Ok(OverlappingCircles { alpha0 })
    }
}

impl VoidShape for OverlappingCircles {
    fn radial(&self, theta: f64) -> (f64, f64, f64) {
        let c0 = self.alpha0.cos();
        let (sin_t, cos_t) = theta.sin_cos();
        let q = 1.0 - c0 * c0 * sin_t * sin_t;
        let w = q.sqrt();
        let dq = -c0 * c0 * (2.0 * theta).sin();
        let ddq = -2.0 * c0 * c0 * (2.0 * theta).cos();
        let r = c0 * cos_t + w;
        let dr = -c0 * sin_t + 0.5 * dq / w;
        let ddr = -c0 * cos_t + 0.5 * ddq / w - 0.25 * dq * dq / (w * q);
        (r, dr, ddr)
    }

    fn corner_angles(&self) -> (f64, f64) {
        (PI, 2.0 * self.alpha0)
    }
}

/// Exact stress-free equilibrium shape for the four-fold surface energy,
/// scaled to void area `pi`. Evaluated by inverting the gamma-plot envelope
/// `x = g cos p - g' sin p`, `y = g sin p + g' cos p` truncated at the corner
/// orientations.
#[derive(Debug, Clone)]
pub struct WulffShape {
    pub epsilon: f64,
    /// Solid corner angle; `pi` when the shape is smooth.
    pub alpha0: f64,
    /// Half-width of the excluded orientation fan, `(alpha0 - pi) / 2`.
    pub phi_c: f64,
    /// Radial scale that normalizes the area.
    pub scale: f64,
}

fn envelope(eps: f64, phi: f64) -> (f64, f64) {
    let g = crate::surface_energy::gamma(phi, eps, 0);
    let dg = crate::surface_energy::gamma(phi, eps, 1);
    let (sin_p, cos_p) = phi.sin_cos();
    (g * cos_p - dg * sin_p, g * sin_p + dg * cos_p)
}

impl WulffShape {
    pub fn new(epsilon: f64) -> Result<Self> {
        let alpha0 = crate::surface_energy::wulff_corner_angle(epsilon)?.unwrap_or(PI);
        let phi_c = 0.5 * (alpha0 - PI);
        let mut shape = WulffShape {
            epsilon,
            alpha0,
            phi_c,
            scale: 1.0,
        };
        let rule = graded_rule(0.0, FRAC_PI_2, 16, 10, 10);
        let area = rule.integrate(|t| {
            let r = shape.radius_unscaled(t);
            0.5 * r * r
        });
        shape.scale = (std::f64::consts::FRAC_PI_4 / area).sqrt();
        Ok(shape)
    }

    fn radius_unscaled(&self, theta: f64) -> f64 {
        let mut lo = self.phi_c;
        let mut hi = FRAC_PI_2 - self.phi_c;
        let polar = |phi: f64| {
            let (x, y) = envelope(self.epsilon, phi);
            y.atan2(x)
        };
        if theta <= polar(lo) {
            let (x, y) = envelope(self.epsilon, lo);
            return x.hypot(y);
        }
        if theta >= polar(hi) {
            let (x, y) = envelope(self.epsilon, hi);
            return x.hypot(y);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if polar(mid) < theta {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let (x, y) = envelope(self.epsilon, 0.5 * (lo + hi));
        x.hypot(y)
    }

    /// Radius of the area-normalized shape.
    pub fn radius(&self, theta: f64) -> f64 {
        self.scale * self.radius_unscaled(theta)
    }
}

/// Wulff shape resampled onto a [`ShapeSpec`].
#[derive(Debug, Clone)]
pub struct WulffPreset {
    pub spec: ShapeSpec,
    pub alpha0: f64,
    /// Max-abs misfit of the Chebyshev fit at the fit nodes.
    pub fit_residual: f64,
}

/// Least-squares Chebyshev fit of the exact Wulff shape, `n_cheb`
/// coefficients fitted at `4 n_cheb` Chebyshev points.
pub fn preset_wulff(epsilon: f64, n_cheb: usize) -> Result<WulffPreset> {
    let exact = WulffShape::new(epsilon)?;
    let m = n_cheb.max(2);
    let n_fit = 4 * m;
    let lambda = crate::corner_asymptotics::williams_lambda(exact.alpha0);

    let mut a = nalgebra::DMatrix::zeros(n_fit, m);
    let mut rhs = nalgebra::DVector::zeros(n_fit);
    let mut thetas = Vec::with_capacity(n_fit);
    for j in 0..n_fit {
        let x = (PI * (j as f64 + 0.5) / n_fit as f64).cos();
        let theta = std::f64::consts::FRAC_PI_4 * (1.0 + x);
        let (tv, _, _) = spectral::chebyshev_table(theta, m);
        for k in 0..m {
            a[(j, k)] = tv[k];
        }
        rhs[j] = exact.radius(theta);
        thetas.push(theta);
    }
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-13)
        .map_err(|e| Error::LinearSolve(e.to_string()))?;
    let fitted = &a * &coeffs;
    let fit_residual = (&fitted - &rhs).amax();

    let mut spec = ShapeSpec {
        lambda1: lambda,
        lambda2: lambda,
        corner: [0.0; 4],
        cheb: coeffs.iter().copied().collect(),
        alpha1: exact.alpha0,
        alpha2: exact.alpha0,
    };
    spec.normalize_area();
    Ok(WulffPreset {
        spec,
        alpha0: exact.alpha0,
        fit_residual,
    })
}

/// One sample of the full-boundary orientation profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileSample {
    /// Global polar angle in `[0, 2 pi)`.
    pub t: f64,
    /// Arc length from the point of maximum x (corner A).
    pub s: f64,
    /// Unwrapped orientation of the solid-exterior normal.
    pub omega: f64,
    pub kappa: f64,
    pub r: f64,
}

/// Orientation versus arc length along the whole (reflected) boundary.
#[derive(Debug, Clone)]
pub struct OrientationProfile {
    pub samples: Vec<ProfileSample>,
    /// Orientation jump at the x-axis corners (exterior turning angle).
    pub corner_jump_a: f64,
    /// Orientation jump at the y-axis corners.
    pub corner_jump_b: f64,
    /// Arc length of one quadrant; corners sit at multiples of this.
    pub quadrant_arc: f64,
}

impl OrientationProfile {
    /// Max `|kappa| = |d omega / d s|` over samples within `window` of arc
    /// position `s_center` (cyclic).
    pub fn max_slope_near(&self, s_center: f64, window: f64) -> f64 {
        let total = 4.0 * self.quadrant_arc;
        self.samples
            .iter()
            .filter(|p| {
                let d = (p.s - s_center).rem_euclid(total);
                d.min(total - d) <= window
            })
            .map(|p| p.kappa.abs())
            .fold(0.0, f64::max)
    }
}

/// Build the orientation profile from graded first-quadrant samples.
pub fn orientation_profile(shape: &impl VoidShape, levels: usize) -> OrientationProfile {
    let rule = graded_rule(0.0, FRAC_PI_2, 6, levels, levels);
    let thetas = &rule.nodes;

    // Cumulative arc length at the sample angles.
    let (gx, gw) = spectral::gauss_legendre(8);
    let seg = |a: f64, b: f64| -> f64 {
        let half = 0.5 * (b - a);
        let cen = 0.5 * (a + b);
        gx.iter()
            .zip(&gw)
            .map(|(&x, &w)| {
                let (r, dr, _) = shape.radial(cen + half * x);
                half * w * (r * r + dr * dr).sqrt()
            })
            .sum()
    };
    let mut s1 = Vec::with_capacity(thetas.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &t in thetas {
        acc += seg(prev, t);
        s1.push(acc);
        prev = t;
    }
    let quadrant_arc = acc + seg(prev, FRAC_PI_2);

    let quad1: Vec<(f64, f64, f64, f64)> = thetas
        .iter()
        .map(|&t| {
            let (r, dr, ddr) = shape.radial(t);
            (orientation(r, dr, t), curvature(r, dr, ddr), r, t)
        })
        .collect();

    let mut samples = Vec::with_capacity(4 * thetas.len());
    // Quadrant maps: (t, s, omega) from the first-quadrant values.
    for j in 0..thetas.len() {
        let (w, k, r, th) = quad1[j];
        samples.push(ProfileSample {
            t: th,
            s: s1[j],
            omega: w,
            kappa: k,
            r,
        });
    }
    for j in (0..thetas.len()).rev() {
        let (w, k, r, th) = quad1[j];
        samples.push(ProfileSample {
            t: PI - th,
            s: 2.0 * quadrant_arc - s1[j],
            omega: 3.0 * PI - w,
            kappa: k,
            r,
        });
    }
    for j in 0..thetas.len() {
        let (w, k, r, th) = quad1[j];
        samples.push(ProfileSample {
            t: PI + th,
            s: 2.0 * quadrant_arc + s1[j],
            omega: PI + w,
            kappa: k,
            r,
        });
    }
    for j in (0..thetas.len()).rev() {
        let (w, k, r, th) = quad1[j];
        samples.push(ProfileSample {
            t: TAU - th,
            s: 4.0 * quadrant_arc - s1[j],
            omega: 4.0 * PI - w,
            kappa: k,
            r,
        });
    }

    let (r0, dr0, _) = shape.radial(0.0);
    let (r1, dr1, _) = shape.radial(FRAC_PI_2);
    let corner_jump_a = 2.0 * (orientation(r0, dr0, 0.0) - PI);
    let corner_jump_b = 2.0 * (1.5 * PI - orientation(r1, dr1, FRAC_PI_2));

    OrientationProfile {
        samples,
        corner_jump_a,
        corner_jump_b,
        quadrant_arc,
    }
}

/// First-quadrant boundary table for export; `n` points including both
/// endpoints, with cumulative arc length.
pub fn boundary_table(shape: &impl VoidShape, n: usize) -> Vec<BoundarySample> {
    let n = n.max(2);
    let (gx, gw) = spectral::gauss_legendre(8);
    let mut out = Vec::with_capacity(n);
    let mut s = 0.0;
    let mut prev = 0.0;
    for j in 0..n {
        let theta = FRAC_PI_2 * j as f64 / (n - 1) as f64;
        if j > 0 {
            let half = 0.5 * (theta - prev);
            let cen = 0.5 * (theta + prev);
            s += gx
                .iter()
                .zip(&gw)
                .map(|(&x, &w)| {
                    let (r, dr, _) = shape.radial(cen + half * x);
                    half * w * (r * r + dr * dr).sqrt()
                })
                .sum::<f64>();
        }
        out.push(sample(shape, theta, s));
        prev = theta;
    }
    out
}

/// Deep graded rule shared by norm computations over `[0, pi/2]`.
pub fn corner_rule(levels: usize) -> GradedRule {
    graded_rule(0.0, FRAC_PI_2, 16, levels, levels)
}
