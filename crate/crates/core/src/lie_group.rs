//! The solvable group underlying κ-Minkowski space, in exponential coordinates
//! `a = (a₀, ā)` with group law `(a₀, ā)·(b₀, b̄) = (a₀ + b₀, ā + e^{-λa₀} b̄)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadSpec};

/// Dimension and deformation length of the group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupConfig {
    n: usize,
    lambda: f64,
}

impl GroupConfig {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 2")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "deformation length lambda = {lambda} must be positive (use GroupConfig::abelian for the limit)"
            )));
        }
        Ok(Self { n, lambda })
    }

    /// The undeformed limit λ = 0, where the group is plain ℝⁿ.
    pub fn abelian(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 2")));
        }
        Ok(Self { n, lambda: 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_abelian(&self) -> bool {
        self.lambda == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub a0: f64,
    pub avec: Vec<f64>,
}

impl GroupElement {
    pub fn new(a0: f64, avec: Vec<f64>) -> Self {
        Self { a0, avec }
    }

    pub fn identity(cfg: &GroupConfig) -> Self {
        Self {
            a0: 0.0,
            avec: vec![0.0; cfg.n - 1],
        }
    }

    /// Reads `(a₀, a₁, …)` from a flat slice.
    pub fn from_coords(coords: &[f64]) -> Self {
        Self {
            a0: coords[0],
            avec: coords[1..].to_vec(),
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        std::iter::once(self.a0).chain(self.avec.iter().copied()).collect()
    }

    fn check(&self, cfg: &GroupConfig) {
        assert_eq!(self.avec.len(), cfg.n - 1, "group element has wrong dimension");
    }
}

pub fn multiply(a: &GroupElement, b: &GroupElement, cfg: &GroupConfig) -> GroupElement {
    a.check(cfg);
    b.check(cfg);
    if cfg.is_abelian() {
        return GroupElement {
            a0: a.a0 + b.a0,
            avec: a.avec.iter().zip(&b.avec).map(|(x, y)| x + y).collect(),
        };
    }
    let scale = (-cfg.lambda * a.a0).exp();
    GroupElement {
        a0: a.a0 + b.a0,
        avec: a.avec.iter().zip(&b.avec).map(|(x, y)| x + scale * y).collect(),
    }
}

pub fn inverse(a: &GroupElement, cfg: &GroupConfig) -> GroupElement {
    a.check(cfg);
    if cfg.is_abelian() {
        return GroupElement {
            a0: -a.a0,
            avec: a.avec.iter().map(|x| -x).collect(),
        };
    }
    let scale = (cfg.lambda * a.a0).exp();
    GroupElement {
        a0: -a.a0,
        avec: a.avec.iter().map(|x| -scale * x).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Density of the invariant measure with respect to Lebesgue measure dⁿa.
pub fn measure_density(side: Side, a: &GroupElement, cfg: &GroupConfig) -> f64 {
    match side {
        Side::Left => (cfg.lambda * (cfg.n as f64 - 1.0) * a.a0).exp(),
        Side::Right => 1.0,
    }
}

/// Box quadrature used for the invariance checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceQuad {
    /// Half-width of the integration box along every axis.
    pub half_width: f64,
    pub tol: f64,
    pub max_intervals: usize,
}

impl Default for InvarianceQuad {
    fn default() -> Self {
        Self {
            half_width: 12.0,
            tol: 1e-10,
            max_intervals: 400,
        }
    }
}

fn integrate_box(f: &dyn Fn(&[f64]) -> f64, dim: usize, half_width: f64, spec: QuadSpec) -> f64 {
    fn level(f: &dyn Fn(&[f64]) -> f64, point: &mut Vec<f64>, dim: usize, hw: f64, spec: QuadSpec) -> f64 {
        let depth = point.len();
        if depth + 1 == dim {
            return quad::integrate(
                |x| {
                    point.push(x);
                    let v = f(point);
                    point.pop();
                    v
                },
                -hw,
                hw,
                spec,
            )
            .value;
        }
        let inner = QuadSpec {
            abs_tol: spec.abs_tol * 1e-2,
            rel_tol: spec.rel_tol * 1e-2,
            ..spec
        };
        let mut pt = point.clone();
        quad::integrate(
            |x| {
                pt.push(x);
                let v = level(f, &mut pt, dim, hw, inner);
                pt.pop();
                v
            },
            -hw,
            hw,
            spec,
        )
        .value
    }
    level(f, &mut Vec::with_capacity(dim), dim, half_width, spec)
}

fn boundary_max(f: &dyn Fn(&[f64]) -> f64, dim: usize, hw: f64) -> f64 {
    const SAMPLES: usize = 33;
    let axis_points: Vec<f64> = (0..SAMPLES)
        .map(|k| -hw + 2.0 * hw * k as f64 / (SAMPLES - 1) as f64)
        .collect();
    let mut worst = 0.0f64;
    let total = SAMPLES.pow(dim as u32 - 1);
    let mut point = vec![0.0; dim];
    for face_axis in 0..dim {
        for face_value in [-hw, hw] {
            for idx in 0..total {
                let mut rem = idx;
                for (axis, p) in point.iter_mut().enumerate() {
                    if axis == face_axis {
                        *p = face_value;
                    } else {
                        *p = axis_points[rem % SAMPLES];
                        rem /= SAMPLES;
                    }
                }
                worst = worst.max(f(&point).abs());
            }
        }
    }
    worst
}

/// `|∫ f(shift·b) dμ(b) − ∫ f(b) dμ(b)|` for the left measure, or the same with
/// `f(b·shift)` for the right measure, over the box `[-w, w]ⁿ`.
pub fn invariance_residual<F>(
    f: F,
    side: Side,
    shift: &GroupElement,
    cfg: &GroupConfig,
    quad: &InvarianceQuad,
) -> Result<f64>
where
    F: Fn(&GroupElement) -> f64,
{
    shift.check(cfg);
    let dim = cfg.n;
    let translated = |coords: &[f64]| {
        let b = GroupElement::from_coords(coords);
        let moved = match side {
            Side::Left => multiply(shift, &b, cfg),
            Side::Right => multiply(&b, shift, cfg),
        };
        f(&moved) * measure_density(side, &b, cfg)
    };
    let plain = |coords: &[f64]| {
        let b = GroupElement::from_coords(coords);
        f(&b) * measure_density(side, &b, cfg)
    };
    let edge = boundary_max(&translated, dim, quad.half_width).max(boundary_max(&plain, dim, quad.half_width));
    if edge > quad.tol {
        return Err(Error::DomainTooSmall {
            boundary: edge,
            tol: quad.tol,
        });
    }
    let spec = QuadSpec {
        abs_tol: quad.tol * 1e-2,
        rel_tol: 1e-13,
        max_intervals: quad.max_intervals,
    };
    let shifted = integrate_box(&translated, dim, quad.half_width, spec);
    let reference = integrate_box(&plain, dim, quad.half_width, spec);
    Ok((shifted - reference).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    /// Matrix form `S(a)`: first row `(e^{-λa₀}, a₁, …)`, identity below.
    fn matrix_of(a: &GroupElement, cfg: &GroupConfig) -> DMatrix<f64> {
        let mut m = DMatrix::identity(cfg.n(), cfg.n());
        m[(0, 0)] = (-cfg.lambda() * a.a0).exp();
        for (j, v) in a.avec.iter().enumerate() {
            m[(0, j + 1)] = *v;
        }
        m
    }

    fn coords_of(m: &DMatrix<f64>, cfg: &GroupConfig) -> GroupElement {
        GroupElement {
            a0: -m[(0, 0)].ln() / cfg.lambda(),
            avec: (1..cfg.n()).map(|j| m[(0, j)]).collect(),
        }
    }

    fn gaussian(b: &GroupElement) -> f64 {
        let r2: f64 = b.a0 * b.a0 + b.avec.iter().map(|x| x * x).sum::<f64>();
        (-r2 / 2.0).exp()
    }

    #[test]
    fn identity_is_neutral() {
        let cfg = GroupConfig::new(3, 0.7).unwrap();
        let e = GroupElement::identity(&cfg);
        let b = GroupElement::new(0.4, vec![1.0, -2.0]);
        assert_eq!(multiply(&e, &b, &cfg), b);
        assert_eq!(multiply(&b, &e, &cfg), b);
        assert_eq!(inverse(&e, &cfg), e);
    }

    #[test]
    fn product_matches_matrix_oracle() {
        let cfg = GroupConfig::new(2, std::f64::consts::LN_2).unwrap();
        let a = GroupElement::new(1.0, vec![1.0]);
        let prod = multiply(&a, &a, &cfg);
        let oracle = coords_of(&(matrix_of(&a, &cfg) * matrix_of(&a, &cfg)), &cfg);
        assert!((prod.a0 - 2.0).abs() < 1e-15);
        assert!((prod.avec[0] - 1.5).abs() < 1e-15);
        assert!((oracle.a0 - 2.0).abs() < 1e-12 && (oracle.avec[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_matches_matrix_oracle() {
        let cfg = GroupConfig::new(2, std::f64::consts::LN_2).unwrap();
        let a = GroupElement::new(1.0, vec![1.0]);
        let inv = inverse(&a, &cfg);
        assert!((inv.a0 + 1.0).abs() < 1e-15 && (inv.avec[0] + 2.0).abs() < 1e-15);
        let oracle = coords_of(&matrix_of(&a, &cfg).try_inverse().unwrap(), &cfg);
        assert!((oracle.a0 + 1.0).abs() < 1e-12 && (oracle.avec[0] + 2.0).abs() < 1e-12);
        let back = inverse(&inv, &cfg);
        assert!((back.a0 - a.a0).abs() < 1e-15 && (back.avec[0] - a.avec[0]).abs() < 1e-15);
    }

    #[test]
    fn measure_densities() {
        let cfg = GroupConfig::new(3, 1.0).unwrap();
        let a = GroupElement::new(2f64.ln(), vec![0.3, 0.1]);
        assert_eq!(measure_density(Side::Right, &a, &cfg), 1.0);
        assert!((measure_density(Side::Left, &a, &cfg) - 4.0).abs() < 1e-14);
        let e = GroupElement::identity(&cfg);
        assert_eq!(measure_density(Side::Left, &e, &cfg), 1.0);
    }

    #[test]
    fn abelian_limit_is_addition() {
        let cfg = GroupConfig::abelian(2).unwrap();
        let a = GroupElement::new(1.0, vec![2.0]);
        let b = GroupElement::new(-0.5, vec![0.25]);
        assert_eq!(multiply(&a, &b, &cfg), GroupElement::new(0.5, vec![2.25]));
        assert_eq!(inverse(&a, &cfg), GroupElement::new(-1.0, vec![-2.0]));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(GroupConfig::new(1, 0.5).is_err());
        assert!(GroupConfig::new(2, 0.0).is_err());
        assert!(GroupConfig::new(2, -1.0).is_err());
    }

    #[test]
    fn left_measure_is_left_invariant() {
        let cfg = GroupConfig::new(2, 0.3).unwrap();
        let q = InvarianceQuad::default();
        let e = GroupElement::identity(&cfg);
        assert!(invariance_residual(gaussian, Side::Left, &e, &cfg, &q).unwrap() < 1e-14);
        let shift = GroupElement::new(1.0, vec![0.0]);
        let r = invariance_residual(gaussian, Side::Left, &shift, &cfg, &q).unwrap();
        assert!(r <= 1e-8, "left residual {r}");
        let shift = GroupElement::new(-0.7, vec![1.3]);
        let r = invariance_residual(gaussian, Side::Left, &shift, &cfg, &q).unwrap();
        assert!(r <= 1e-8, "left residual {r}");
    }

    #[test]
    fn right_measure_is_right_invariant() {
        let cfg = GroupConfig::new(2, 0.3).unwrap();
        let q = InvarianceQuad::default();
        let shift = GroupElement::new(1.0, vec![0.5]);
        let r = invariance_residual(gaussian, Side::Right, &shift, &cfg, &q).unwrap();
        assert!(r <= 1e-8, "right residual {r}");
    }

    #[test]
    fn lebesgue_measure_is_not_left_invariant() {
        let cfg = GroupConfig::new(2, 0.3).unwrap();
        let shift = GroupElement::new(1.0, vec![0.0]);
        let translated = |c: &[f64]| gaussian(&multiply(&shift, &GroupElement::from_coords(c), &cfg));
        let plain = |c: &[f64]| gaussian(&GroupElement::from_coords(c));
        let spec = QuadSpec::with_tol(1e-12, 1e-12);
        let shifted = integrate_box(&translated, 2, 12.0, spec);
        let reference = integrate_box(&plain, 2, 12.0, spec);
        // the spatial rescaling by e^{-λa₀} shows up as the modular factor
        assert!((shifted / reference - 0.3f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn small_domain_is_diagnosed() {
        let cfg = GroupConfig::new(2, 0.3).unwrap();
        let q = InvarianceQuad {
            half_width: 2.0,
            ..InvarianceQuad::default()
        };
        let shift = GroupElement::new(1.0, vec![0.0]);
        assert!(matches!(
            invariance_residual(gaussian, Side::Left, &shift, &cfg, &q),
            Err(Error::DomainTooSmall { .. })
        ));
    }

    fn element(n: usize) -> impl Strategy<Value = GroupElement> {
        (-3.0..3.0f64, proptest::collection::vec(-5.0..5.0f64, n - 1))
            .prop_map(|(a0, avec)| GroupElement { a0, avec })
    }

    proptest! {
        #[test]
        fn associativity(a in element(3), b in element(3), c in element(3), lambda in 0.05..2.0f64) {
            let cfg = GroupConfig::new(3, lambda).unwrap();
            let left = multiply(&multiply(&a, &b, &cfg), &c, &cfg);
            let right = multiply(&a, &multiply(&b, &c, &cfg), &cfg);
            for (x, y) in left.coords().iter().zip(right.coords()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn matrix_faithfulness(a in element(4), b in element(4), lambda in 0.05..1.0f64) {
            let cfg = GroupConfig::new(4, lambda).unwrap();
            let prod = multiply(&a, &b, &cfg);
            let m = matrix_of(&a, &cfg) * matrix_of(&b, &cfg);
            prop_assert!(((-lambda * prod.a0).exp() - m[(0, 0)]).abs() <= 1e-12 * m[(0, 0)]);
            for j in 1..4 {
                prop_assert!((prod.avec[j - 1] - m[(0, j)]).abs() <= 1e-12 * (1.0 + m[(0, j)].abs()));
            }
        }

        #[test]
        fn inverse_axiom(a in element(3), lambda in 0.05..2.0f64) {
            let cfg = GroupConfig::new(3, lambda).unwrap();
            let e = multiply(&a, &inverse(&a, &cfg), &cfg);
            for x in e.coords() {
                prop_assert!(x.abs() <= 1e-12 * (1.0 + a.avec.iter().map(|v| v.abs()).fold(0.0, f64::max) * (lambda * a.a0).exp()));
            }
        }

        #[test]
        fn modular_function(a in element(3), lambda in 0.05..2.0f64) {
            let cfg = GroupConfig::new(3, lambda).unwrap();
            let ratio = measure_density(Side::Left, &a, &cfg) / measure_density(Side::Right, &a, &cfg);
            prop_assert_eq!(ratio, (lambda * 2.0 * a.a0).exp());
        }
    }
}
