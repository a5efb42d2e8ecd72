//! Derivative-free minimisation and finite-difference curvature.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Stop when the spread of simplex values falls below this.
    pub ftol: f64,
    /// ... and the simplex diameter below this.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            ftol: 1e-9,
            xtol: 1e-7,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex minimisation of `f` from `x0` with initial edge
/// lengths `steps`. Non-finite values are treated as `+inf`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], steps: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(steps.len(), n);
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iter = 0;
    let mut converged = false;
    while iter < opts.max_iter {
        iter += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= opts.ftol && diameter <= opts.xtol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|x| x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        for i in 1..=n {
            let x: Vec<f64> = simplex[i]
                .iter()
                .zip(&simplex[0])
                .map(|(xi, b)| b + sigma * (xi - b))
                .collect();
            values[i] = eval(&x);
            simplex[i] = x;
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations: iter,
        evaluations: evals,
        converged,
    }
}

/// Central-difference Hessian with steps `h_i = rel * (1 + |x_i|)`.
/// Off-diagonal entries use the symmetric four-point formula, so the
/// result is exactly symmetric.
pub fn hessian<F>(mut f: F, x: &[f64], rel: f64) -> DMatrix<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|v| rel * (1.0 + v.abs())).collect();
    let f0 = f(x);
    let mut at = |d: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in d {
            y[i] += s;
        }
        f(&y)
    };
    let mut hm = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = at(&[(i, h[i])]);
        let fm = at(&[(i, -h[i])]);
        hm[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = at(&[(i, h[i]), (j, h[j])]);
            let fpm = at(&[(i, h[i]), (j, -h[j])]);
            let fmp = at(&[(i, -h[i]), (j, h[j])]);
            let fmm = at(&[(i, -h[i]), (j, -h[j])]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    hm
}

/// Covariance from the Hessian of a log-likelihood: `inv(-H)`. When `-H` is
/// not positive definite the inverse is taken over its positive eigenvalues
/// only (directions of zero or negative curvature get zero variance) and
/// the flag is `true`.
pub fn covariance_from_hessian(h: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let info = -h.clone();
    if let Some(chol) = info.clone().cholesky() {
        return (symmetrize(chol.inverse()), false);
    }
    let n = info.nrows();
    if info.iter().any(|v| !v.is_finite()) {
        return (DMatrix::from_element(n, n, f64::NAN), true);
    }
    let eig = info.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut inv = DMatrix::zeros(n, n);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 1e-10 * top {
            let v = eig.eigenvectors.column(k);
            inv += (v * v.transpose()) / lam;
        }
    }
    (symmetrize(inv), true)
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (m.clone() + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            ftol: 1e-14,
            xtol: 1e-9,
            max_iter: 5000,
        };
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.5, 0.5], &opts);
        assert!(m.converged);
        assert_abs_diff_eq!(m.x[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m.x[1], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn quadratic_bowl_three_dims() {
        let f = |x: &[f64]| {
            (x[0] - 1.0).powi(2)
                + 2.0 * (x[1] + 0.5).powi(2)
                + 0.5 * (x[2] - 3.0).powi(2)
                + 0.3 * x[0] * x[1]
        };
        let m = nelder_mead(
            f,
            &[0.0, 0.0, 0.0],
            &[0.3, 0.3, 0.3],
            &NelderMeadOptions::default(),
        );
        assert!(m.converged);
        assert!(m.value < f(&[1.0, -0.5, 3.0]));
    }

    #[test]
    fn non_finite_treated_as_infinite() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 2.0).powi(2)
            }
        };
        let m = nelder_mead(f, &[1.0], &[0.5], &NelderMeadOptions::default());
        assert_abs_diff_eq!(m.x[0], 2.0, epsilon = 1e-4);
    }

    #[test]
    fn hessian_of_quadratic() {
        let f = |x: &[f64]| -(2.0 * x[0] * x[0] + 3.0 * x[0] * x[1] + 5.0 * x[1] * x[1]);
        let h = hessian(f, &[0.3, -0.7], 1e-4);
        assert_abs_diff_eq!(h[(0, 0)], -4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h[(0, 1)], -3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h[(1, 1)], -10.0, epsilon = 1e-6);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
        let (cov, pinv) = covariance_from_hessian(&h);
        assert!(!pinv);
        let det = 40.0 - 9.0;
        assert_abs_diff_eq!(cov[(0, 0)], 10.0 / det, epsilon = 1e-6);
        assert_abs_diff_eq!(cov[(0, 1)], -3.0 / det, epsilon = 1e-6);
    }

    #[test]
    fn indefinite_falls_back() {
        let h = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let (cov, pinv) = covariance_from_hessian(&h);
        assert!(pinv);
        assert_abs_diff_eq!(cov[(0, 0)], 1.0, epsilon = 1e-12);
        assert_eq!(cov[(1, 1)], 0.0);
    }
}
