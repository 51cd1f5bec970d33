//! Basis functions and quadrature on the quarter interval `[0, pi/2]`.
//!
//! Chebyshev polynomials live on the standard interval through the affine map
//! `theta = pi/4 + (pi/4) x`, collocation nodes are Gauss-Legendre points
//! mapped the same way, and integrands with algebraic endpoint behavior are
//! handled by composite Gauss rules on dyadically graded panels.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// Affine map from the standard coordinate `x` in `[-1, 1]` to `[0, pi/2]`.
pub fn map_to_angle(x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "standard coordinate {x} outside [-1, 1]"
        )));
    }
    Ok(FRAC_PI_4 + FRAC_PI_4 * x)
}

/// Inverse of [`map_to_angle`].
pub fn map_from_angle(theta: f64) -> f64 {
    (theta - FRAC_PI_4) / FRAC_PI_4
}

/// Derivative `dx/dtheta` of the affine map, used in chain rules.
pub const MAP_SCALE: f64 = 4.0 / std::f64::consts::PI;

/// Value of `T_k` on `[0, pi/2]`, or its first or second theta-derivative.
pub fn chebyshev(k: usize, theta: f64, deriv: usize) -> f64 {
    let (v, d1, d2) = chebyshev_triplet(k, map_from_angle(theta));
    match deriv {
        0 => v,
        1 => d1 * MAP_SCALE,
        2 => d2 * MAP_SCALE * MAP_SCALE,
        _ => panic!("chebyshev derivative order {deriv} not supported"),
    }
}

fn chebyshev_triplet(k: usize, x: f64) -> (f64, f64, f64) {
    // Recurrences for T, T' and T'' advanced together.
    let (mut v0, mut d0, mut s0) = (1.0, 0.0, 0.0);
    if k == 0 {
        return (v0, d0, s0);
    }
    let (mut v1, mut d1, mut s1) = (x, 1.0, 0.0);
    for _ in 1..k {
        let v2 = 2.0 * x * v1 - v0;
        let d2 = 2.0 * v1 + 2.0 * x * d1 - d0;
        let s2 = 4.0 * d1 + 2.0 * x * s1 - s0;
        (v0, d0, s0) = (v1, d1, s1);
        (v1, d1, s1) = (v2, d2, s2);
    }
    (v1, d1, s1)
}

/// Values and first two theta-derivatives of `T_0..T_{n-1}` at one angle.
pub fn chebyshev_table(theta: f64, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let x = map_from_angle(theta);
    let mut v = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut s = vec![0.0; n];
    for k in 0..n {
        if k == 0 {
            v[0] = 1.0;
        } else if k == 1 {
            v[1] = x;
            d[1] = 1.0;
        } else {
            v[k] = 2.0 * x * v[k - 1] - v[k - 2];
            d[k] = 2.0 * v[k - 1] + 2.0 * x * d[k - 1] - d[k - 2];
            s[k] = 4.0 * d[k - 1] + 2.0 * x * s[k - 1] - s[k - 2];
        }
    }
    for k in 0..n {
        d[k] *= MAP_SCALE;
        s[k] *= MAP_SCALE * MAP_SCALE;
    }
    (v, d, s)
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre_pair(m: usize, x: f64) -> (f64, f64) {
    if m == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..m {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        let sign = if x > 0.0 || m % 2 == 1 { 1.0 } else { -1.0 };
        sign * (m * (m + 1)) as f64 / 2.0
    } else {
        m as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Roots of `P_m` by Newton iteration to 1e-14, mirrored about the origin so
/// the node set is exactly symmetric.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "quadrature order must be positive");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi-style initial guess for the i-th root from the right.
        let mut xi = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(m, xi);
            let dx = p / dp;
            xi -= dx;
            if dx.abs() < 1e-14 {
                break;
            }
        }
        let (_, dp) = legendre_pair(m, xi);
        let wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        x[m - 1 - i] = xi;
        x[i] = -xi;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
        let (_, dp) = legendre_pair(m, 0.0);
        w[m / 2] = 2.0 / (dp * dp);
    }
    (x, w)
}

/// Legendre roots mapped to `(0, pi/2)`, ascending.
pub fn legendre_nodes(m: usize) -> Vec<f64> {
    gauss_legendre(m)
        .0
        .iter()
        .map(|&x| FRAC_PI_4 + FRAC_PI_4 * x)
        .collect()
}

/// Composite quadrature rule: Gauss panels, optionally graded toward an end.
#[derive(Debug, Clone)]
pub struct GradedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub panels: usize,
}

impl GradedRule {
    /// Integrate `f` with the stored nodes and weights.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Panels on `[a, b]`: `levels_a` dyadic panels shrinking toward `a`,
/// `levels_b` toward `b`. A side with zero levels gets four uniform panels
/// so that non-singular integrands are still well resolved.
pub fn graded_rule(a: f64, b: f64, order: usize, levels_a: usize, levels_b: usize) -> GradedRule {
    let mid = 0.5 * (a + b);
    let mut cuts = vec![a];
    if levels_a == 0 {
        for j in 1..4 {
            cuts.push(a + (mid - a) * j as f64 / 4.0);
        }
    } else {
        for j in 0..levels_a {
            cuts.push(a + (mid - a) * (2.0f64).powi(j as i32 - levels_a as i32));
        }
    }
    cuts.push(mid);
    if levels_b == 0 {
        for j in 1..4 {
            cuts.push(mid + (b - mid) * j as f64 / 4.0);
        }
    } else {
        for j in (0..levels_b).rev() {
            cuts.push(b - (b - mid) * (2.0f64).powi(j as i32 - levels_b as i32));
        }
    }
    cuts.push(b);

    let (gx, gw) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity((cuts.len() - 1) * order);
    let mut weights = Vec::with_capacity((cuts.len() - 1) * order);
    for p in cuts.windows(2) {
        let (lo, hi) = (p[0], p[1]);
        let half = 0.5 * (hi - lo);
        let cen = 0.5 * (hi + lo);
        for (&x, &w) in gx.iter().zip(&gw) {
            nodes.push(cen + half * x);
            weights.push(half * w);
        }
    }
    GradedRule {
        nodes,
        weights,
        panels: cuts.len() - 1,
    }
}

/// Gauss-Legendre integral of `f` over `[0, pi/2]` with a single panel.
pub fn quad_smooth(f: impl FnMut(f64) -> f64, order: usize) -> f64 {
    let mut f = f;
    let (gx, gw) = gauss_legendre(order);
    gx.iter()
        .zip(&gw)
        .map(|(&x, &w)| FRAC_PI_4 * w * f(FRAC_PI_4 + FRAC_PI_4 * x))
        .sum()
}

/// Integral over `[a, b]` of an integrand behaving like `(x - a)^p` near `a`.
///
/// Uses `levels` dyadic panels toward the singular end with a fixed Gauss
/// order per panel. Requires `p > -1`.
pub fn quad_endpoint_singular(
    f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    p: f64,
    levels: usize,
    order: usize,
) -> Result<f64> {
    if p <= -1.0 {
        return Err(Error::DivergentIntegrand(p));
    }
    Ok(graded_rule(a, b, order, levels, 0).integrate(f))
}

/// Grading depth so the untreated innermost-panel tail of an `x^p` integrand
/// stays below `tol` relative to the panel scale.
pub fn levels_for_tolerance(p: f64, tol: f64) -> usize {
    let q = 1.0 + p.min(0.0);
    let levels = (tol.log2() / q).abs().ceil() as usize;
    levels.clamp(8, 400)
}

/// Collocation nodes plus the quadrature grid used by the boundary solver.
#[derive(Debug, Clone)]
pub struct BasisGrid {
    /// Number of collocation nodes.
    pub n_colloc: usize,
    /// Collocation angles, strictly inside `(0, pi/2)`, ascending.
    pub theta_nodes: Vec<f64>,
    /// Quadrature angles.
    pub quad_nodes: Vec<f64>,
    /// Quadrature weights.
    pub quad_weights: Vec<f64>,
}

impl BasisGrid {
    pub fn new(n_colloc: usize, rule: &GradedRule) -> Self {
        BasisGrid {
            n_colloc,
            theta_nodes: legendre_nodes(n_colloc),
            quad_nodes: rule.nodes.clone(),
            quad_weights: rule.weights.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_map_endpoints() {
        assert_eq!(map_to_angle(-1.0).unwrap(), 0.0);
        assert!((map_to_angle(0.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((map_to_angle(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(map_to_angle(1.0 + 1e-9).is_err());
        let th = 0.3;
        assert!((map_to_angle(map_from_angle(th)).unwrap() - th).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev(0, 0.7, 0), 1.0);
        assert!(chebyshev(1, FRAC_PI_4, 0).abs() < 1e-15);
        assert!((chebyshev(2, 0.0, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_derivatives_match_finite_differences() {
        let h = 1e-5;
        for k in 0..=32 {
            for &theta in &[0.3, 0.9, 1.3] {
                let d1 = chebyshev(k, theta, 1);
                let fd1 = (chebyshev(k, theta + h, 0) - chebyshev(k, theta - h, 0)) / (2.0 * h);
                let scale = 1.0 + d1.abs();
                assert!(
                    (d1 - fd1).abs() / scale < 1e-4,
                    "k={k} theta={theta} d1={d1} fd={fd1}"
                );
                let d2 = chebyshev(k, theta, 2);
                let fd2 = (chebyshev(k, theta + h, 0) - 2.0 * chebyshev(k, theta, 0)
                    + chebyshev(k, theta - h, 0))
                    / (h * h);
                let scale = 1.0 + d2.abs();
                assert!((d2 - fd2).abs() / scale < 1e-3, "k={k} theta={theta}");
            }
        }
    }

    #[test]
    fn chebyshev_table_consistent() {
        let (v, d, s) = chebyshev_table(0.9, 12);
        for k in 0..12 {
            assert!((v[k] - chebyshev(k, 0.9, 0)).abs() < 1e-13);
            assert!((d[k] - chebyshev(k, 0.9, 1)).abs() < 1e-11);
            assert!((s[k] - chebyshev(k, 0.9, 2)).abs() < 1e-10);
        }
    }

    #[test]
    fn legendre_node_examples() {
        let n1 = legendre_nodes(1);
        assert!((n1[0] - FRAC_PI_4).abs() < 1e-14);

        let n2 = legendre_nodes(2);
        let r = 1.0 / 3.0f64.sqrt();
        assert!((n2[0] - (FRAC_PI_4 - FRAC_PI_4 * r)).abs() < 1e-13);
        assert!((n2[1] - (FRAC_PI_4 + FRAC_PI_4 * r)).abs() < 1e-13);

        let n16 = legendre_nodes(16);
        let sum: f64 = n16.iter().sum();
        assert!((sum - 16.0 * FRAC_PI_4).abs() < 1e-12);
        assert!(n16.windows(2).all(|p| p[0] < p[1]));
        assert!(n16.iter().all(|&t| t > 0.0 && t < FRAC_PI_2));
    }

    #[test]
    fn gauss_exact_for_polynomials() {
        // Order n integrates degree 2n-1 exactly.
        for n in [2usize, 4, 8] {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            let approx: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(deg as i32)).sum();
            assert!(approx.abs() < 1e-13, "odd power exact zero");
            let deg = 2 * n - 2;
            let approx: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(deg as i32)).sum();
            let exact = 2.0 / (deg as f64 + 1.0);
            assert!((approx - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn smooth_quadrature_examples() {
        assert!((quad_smooth(|_| 1.0, 8) - FRAC_PI_2).abs() < 1e-14);
        assert!((quad_smooth(|t| t.sin(), 32) - 1.0).abs() < 1e-13);
        assert!(quad_smooth(|t| (4.0 * t).cos(), 32).abs() < 1e-13);
    }

    #[test]
    fn graded_weights_positive_and_sum() {
        let rule = graded_rule(0.0, FRAC_PI_2, 16, 30, 30);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        let sum: f64 = rule.weights.iter().sum();
        assert!((sum - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singular_examples() {
        let v = quad_endpoint_singular(|x| x.powf(-0.5), 0.0, 1.0, -0.5, 60, 16).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");

        let v = quad_endpoint_singular(|x| x.powf(0.6), 0.0, 1.0, 0.6, 20, 16).unwrap();
        assert!((v - 0.625).abs() < 1e-12);

        assert!(quad_endpoint_singular(|x| 1.0 / x, 0.0, 1.0, -1.0, 10, 16).is_err());
    }

    #[test]
    fn endpoint_singular_reference_value() {
        // integral of theta^{-0.4} cos(theta) over [0, pi/2], frozen from a
        // deep graded reference rule (order 30, 300 levels, stable to 1e-13).
        let reference = 1.63147891864443809;
        let deep = quad_endpoint_singular(|t| t.powf(-0.4) * t.cos(), 0.0, FRAC_PI_2, -0.4, 300, 30)
            .unwrap();
        assert!(
            (deep - reference).abs() < 1e-12,
            "oracle drifted: {deep:.15}"
        );
        let v =
            quad_endpoint_singular(|t| t.powf(-0.4) * t.cos(), 0.0, FRAC_PI_2, -0.4, 80, 16).unwrap();
        assert!((v - reference).abs() < 1e-9, "got {v:.15}");
    }

    #[test]
    fn graded_error_decreases_with_levels() {
        for &p in &[-0.9, -0.5, -0.1] {
            let exact = 1.0 / (1.0 + p);
            let mut last = f64::INFINITY;
            for levels in [4usize, 8, 16, 32] {
                let v = quad_endpoint_singular(|x| x.powf(p), 0.0, 1.0, p, levels, 16).unwrap();
                let err = (v - exact).abs();
                assert!(err < last, "p={p} levels={levels}: {err} !< {last}");
                last = err;
            }
        }
    }

    #[test]
    fn grid_invariants() {
        let rule = graded_rule(0.0, FRAC_PI_2, 16, 20, 20);
        let grid = BasisGrid::new(15, &rule);
        assert_eq!(grid.n_colloc, 15);
        assert!(grid.theta_nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(grid
            .theta_nodes
            .iter()
            .all(|&t| t > 0.0 && t < FRAC_PI_2));
        assert!(grid.quad_weights.iter().all(|&w| w > 0.0));
    }
}
