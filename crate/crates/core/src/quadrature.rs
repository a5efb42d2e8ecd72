//! Gauss–Hermite rules for integrals over a normal random effect.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{MetaError, Result};

pub const DEFAULT_ORDER: usize = 41;
pub const MAX_ORDER: usize = 201;

/// Random-effect standard deviations below this collapse to a point mass.
pub const TAU_POINT_MASS: f64 = 1e-10;

/// Physicists' Gauss–Hermite rule for the weight `exp(-u^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GhRule {
    pub fn new(order: usize) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(MetaError::QuadratureOrder(order));
        }
        // Golub–Welsch for starting values, then Newton on the orthonormal
        // recurrence for full-precision nodes and weights.
        let jacobi = DMatrix::from_fn(order, order, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        guesses.sort_by(f64::total_cmp);

        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for &x0 in &guesses {
            let mut x = x0;
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = orthonormal_hermite(order, x);
                deriv = dp;
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, dp) = orthonormal_hermite(order, x);
            if dp.is_finite() {
                deriv = dp;
            }
            nodes.push(x);
            weights.push(2.0 / (deriv * deriv));
        }
        // Enforce exact symmetry.
        for i in 0..order / 2 {
            let j = order - 1 - i;
            let u = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -u;
            nodes[j] = u;
            weights[i] = w;
            weights[j] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Ok(GhRule { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes mapped to `theta + sqrt(2) tau u` with weights normalised to sum
    /// to one. A point mass at `theta` when `tau` is negligible.
    pub fn re_nodes(&self, theta: f64, tau: f64) -> Vec<(f64, f64)> {
        let tau = tau.abs();
        if tau < TAU_POINT_MASS {
            return vec![(theta, 1.0)];
        }
        let scale = std::f64::consts::SQRT_2 * tau;
        let norm = PI.sqrt().recip();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| (theta + scale * u, w * norm))
            .collect()
    }

    /// `E[g(X)]` for `X ~ N(theta, tau^2)`.
    pub fn integrate_re<F: FnMut(f64) -> f64>(
        &self,
        mut g: F,
        theta: f64,
        tau: f64,
    ) -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in self.re_nodes(theta, tau) {
            let v = g(x);
            if !v.is_finite() {
                return Err(MetaError::NonFinite(x));
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Free-function form of [`GhRule::new`].
pub fn gh_rule(order: usize) -> Result<GhRule> {
    GhRule::new(order)
}

/// Free-function form of [`GhRule::integrate_re`].
pub fn integrate_re<F: FnMut(f64) -> f64>(
    g: F,
    theta: f64,
    tau: f64,
    rule: &GhRule,
) -> Result<f64> {
    rule.integrate_re(g, theta, tau)
}

/// Orthonormal Hermite polynomial of degree `n` at `x` and its derivative.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 0.0;
    let mut p = PI.powf(-0.25);
    for j in 1..=n {
        let jf = j as f64;
        let next = x * (2.0 / jf).sqrt() * p - ((jf - 1.0) / jf).sqrt() * p_prev;
        p_prev = p;
        p = next;
    }
    (p, (2.0 * n as f64).sqrt() * p_prev)
}
