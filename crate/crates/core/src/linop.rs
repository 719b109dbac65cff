//! Weighted linearized operator `d_xx + q` about the travelling wave.
//!
//! Conjugating the linearized potential equation `H_t = H_xx - Phi'(f) H_x`
//! by the weight `w` removes the drift and leaves the Schrodinger-type
//! generator `d_xx + q` with `q = -Phi'(f)^2 / 4 + Phi''(f) f' / 2`.
//! The generator is discretized with centered differences and homogeneous
//! Dirichlet ends; kernels come from its eigendecomposition.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, ShockError};
use crate::wave::WaveProfile;

type C = Complex64;

/// Potential of the weighted operator on the profile grid.
pub fn build_potential(profile: &WaveProfile) -> Vec<f64> {
    let flux = &profile.problem.flux;
    profile
        .f_values
        .iter()
        .zip(&profile.fprime_values)
        .map(|(&f, &fp)| -0.25 * flux.derivative(f).powi(2) + 0.5 * flux.second_derivative(f) * fp)
        .collect()
}

/// Potential with the opposite sign on the quadratic term; kept as a control.
pub fn build_potential_flipped(profile: &WaveProfile) -> Vec<f64> {
    let flux = &profile.problem.flux;
    profile
        .f_values
        .iter()
        .zip(&profile.fprime_values)
        .map(|(&f, &fp)| 0.25 * flux.derivative(f).powi(2) + 0.5 * flux.second_derivative(f) * fp)
        .collect()
}

#[derive(Debug, Clone)]
pub struct LinearOperatorModel {
    /// Interior grid points (Dirichlet nodes at `+-L` excluded).
    pub x: Vec<f64>,
    pub dx: f64,
    pub half_width: f64,
    /// Potential at the interior points.
    pub q: Vec<f64>,
    /// Potential at `-L` and `+L`.
    pub q_ends: (f64, f64),
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: DMatrix<f64>,
    /// Accuracy order of the centered stencils (2 or 4).
    pub order: usize,
}

impl LinearOperatorModel {
    pub fn from_profile(profile: &WaveProfile) -> Result<Self> {
        Self::from_profile_with_order(profile, 2)
    }

    pub fn from_profile_with_order(profile: &WaveProfile, order: usize) -> Result<Self> {
        let q = build_potential(profile);
        Self::from_potential_with_order(&profile.x, &q, order)
    }

    /// Model for an arbitrary potential sampled on a uniform grid including both ends.
    pub fn from_potential(grid: &[f64], q: &[f64]) -> Result<Self> {
        Self::from_potential_with_order(grid, q, 2)
    }

    pub fn from_potential_with_order(grid: &[f64], q: &[f64], order: usize) -> Result<Self> {
        let m = grid.len();
        if m < 6 || q.len() != m {
            return Err(ShockError::InvalidInput(format!("grid of {m} points with {} potential values", q.len())));
        }
        let stencil: &[f64] = match order {
            2 => &[-2.0, 1.0],
            4 => &[-30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
            _ => return Err(ShockError::InvalidInput(format!("stencil order {order} not supported"))),
        };
        let dx = grid[1] - grid[0];
        let n = m - 2;
        let inv = 1.0 / (dx * dx);
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = stencil[0] * inv + q[i + 1];
            for (off, c) in stencil.iter().enumerate().skip(1) {
                if i + off < n {
                    a[(i, i + off)] = c * inv;
                    a[(i + off, i)] = c * inv;
                }
            }
        }
        let eig = SymmetricEigen::new(a);
        Ok(Self {
            x: grid[1..m - 1].to_vec(),
            dx,
            half_width: 0.5 * (grid[m - 1] - grid[0]),
            q: q[1..m - 1].to_vec(),
            q_ends: (q[0], q[m - 1]),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.max()
    }

    /// Sorted (descending) eigenvalues for output.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    pub fn is_constant_potential(&self) -> bool {
        let (lo, hi) = self.q.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        hi - lo <= 1e-12 * (1.0 + hi.abs())
    }

    /// `V g(Lambda) V^T` applied to a vector.
    pub fn apply_function<F: Fn(f64) -> f64>(&self, g: F, v: &[f64]) -> Vec<f64> {
        let vt = self.eigenvectors.tr_mul(&DVector::from_column_slice(v));
        let scaled = DVector::from_iterator(vt.len(), vt.iter().zip(self.eigenvalues.iter()).map(|(c, &l)| c * g(l)));
        (&self.eigenvectors * scaled).iter().copied().collect()
    }

    /// Action of `exp(t (d_xx + q))` on grid values.
    pub fn propagate(&self, t: f64, v: &[f64]) -> Vec<f64> {
        self.apply_function(|l| (t * l).exp(), v)
    }

    /// Centered first difference with zero Dirichlet ends.
    pub fn d1(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                (r - l) / (2.0 * self.dx)
            })
            .collect()
    }

    /// First derivative with the model's stencil order.
    pub fn derivative(&self, v: &[f64]) -> Vec<f64> {
        if self.order == 2 {
            return self.d1(v);
        }
        let n = v.len();
        let at = |i: isize| if i < 0 || i >= n as isize { 0.0 } else { v[i as usize] };
        (0..n as isize)
            .map(|i| (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * self.dx))
            .collect()
    }

    pub fn d2(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                (r - 2.0 * v[i] + l) / (self.dx * self.dx)
            })
            .collect()
    }
}

/// Discrete heat kernel `K(x, t; xi)` with `int K(x, xi) g(xi) d xi` as matrix action.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    pub t: f64,
    pub dx: f64,
    pub matrix: DMatrix<f64>,
}

impl HeatKernel {
    /// `||K(., t, xi_j)||_{L^2(dx)}`.
    pub fn column_norm(&self, j: usize) -> f64 {
        (self.matrix.column(j).norm_squared() * self.dx).sqrt()
    }

    /// `||d_x K(., t, xi_j)||_{L^2(dx)}` by centered differences.
    pub fn derivative_column_norm(&self, j: usize) -> f64 {
        let col = self.matrix.column(j);
        let n = col.len();
        let s: f64 = (0..n)
            .map(|i| {
                let l = if i > 0 { col[i - 1] } else { 0.0 };
                let r = if i + 1 < n { col[i + 1] } else { 0.0 };
                ((r - l) / (2.0 * self.dx)).powi(2)
            })
            .sum();
        (s * self.dx).sqrt()
    }
}

pub fn heat_kernel(model: &LinearOperatorModel, t: f64) -> Result<HeatKernel> {
    if !(t > 0.0) {
        return Err(ShockError::InvalidInput(format!("kernel time must be positive, got {t}")));
    }
    let v = &model.eigenvectors;
    let mut scaled = v.clone();
    for (j, &l) in model.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut((t * l).exp() / model.dx);
    }
    Ok(HeatKernel { t, dx: model.dx, matrix: scaled * v.transpose() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGap {
    pub omega: f64,
    pub essential_edge: f64,
    pub max_eigenvalue: f64,
}

pub fn spectral_gap(model: &LinearOperatorModel) -> Result<SpectralGap> {
    let max_eigenvalue = model.max_eigenvalue();
    let essential_edge = model.q_ends.0.max(model.q_ends.1);
    if max_eigenvalue >= 0.0 {
        return Err(ShockError::PositiveEigenvalue {
            max_eigenvalue,
            diagnostic: format!(
                "L = {}, dx = {}, q range [{:.4}, {:.4}], tail values ({:.6}, {:.6})",
                model.half_width,
                model.dx,
                model.q.iter().cloned().fold(f64::INFINITY, f64::min),
                model.q.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                model.q_ends.0,
                model.q_ends.1
            ),
        });
    }
    Ok(SpectralGap { omega: -max_eigenvalue, essential_edge, max_eigenvalue })
}

/// `G(x, t; xi) = (w(xi) / w(x)) K(x, t; xi)` on the interior grid.
pub fn green_function(model: &LinearOperatorModel, w: &[f64], t: f64) -> Result<DMatrix<f64>> {
    if w.len() != model.len() {
        return Err(ShockError::InvalidInput(format!("{} weights for {} grid points", w.len(), model.len())));
    }
    let mut g = heat_kernel(model, t)?.matrix;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            g[(i, j)] *= w[j] / w[i];
        }
    }
    Ok(g)
}

/// `int G(x, t; xi) H0(xi) d xi`, evaluated without forming the kernel.
pub fn apply_green(model: &LinearOperatorModel, w: &[f64], t: f64, h0: &[f64]) -> Vec<f64> {
    let wh: Vec<f64> = w.iter().zip(h0).map(|(a, b)| a * b).collect();
    model.propagate(t, &wh).iter().zip(w).map(|(v, wi)| v / wi).collect()
}

/// Relative discrete residual of `L H = w^{-1} M (w H)` with
/// `L = Phi'(f) d_x - d_xx` and `M = -d_xx - q`.
pub fn similarity_check(model: &LinearOperatorModel, w: &[f64], phi_prime: &[f64], h: &[f64]) -> f64 {
    similarity_residual(model, &model.q, w, phi_prime, h)
}

/// Same residual with an externally supplied potential.
pub fn similarity_residual(model: &LinearOperatorModel, q: &[f64], w: &[f64], phi_prime: &[f64], h: &[f64]) -> f64 {
    let hx = model.d1(h);
    let hxx = model.d2(h);
    let wh: Vec<f64> = w.iter().zip(h).map(|(a, b)| a * b).collect();
    let whxx = model.d2(&wh);
    let n = h.len();
    let (mut num, mut den) = (0.0, 0.0);
    // The outermost nodes see the Dirichlet closure and are excluded.
    for i in 1..n - 1 {
        let lhs = phi_prime[i] * hx[i] - hxx[i];
        let rhs = (-whxx[i] - q[i] * wh[i]) / w[i];
        num += (lhs - rhs).powi(2);
        den += h[i] * h[i];
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Growth of the kernel norm when both arguments move off the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelFactor {
    pub ratio: f64,
    /// True when obtained by continuing discrete eigenfunctions.
    pub approximate: bool,
}

/// `||K(. + iy, t, xi + i eta)|| / ||K(., t, xi)||` with `xi` the grid point nearest `xi`.
pub fn complexified_kernel_factor(model: &LinearOperatorModel, t: f64, y: f64, eta: f64, xi: f64) -> Result<KernelFactor> {
    if !(t > 0.0) {
        return Err(ShockError::InvalidInput(format!("kernel time must be positive, got {t}")));
    }
    let j = model
        .x
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - xi).abs().partial_cmp(&(b.1 - xi).abs()).unwrap())
        .map(|(j, _)| j)
        .unwrap();
    let xi = model.x[j];
    if model.is_constant_potential() {
        let gauss = |s: C| (-(s * s) / (4.0 * t)).exp();
        let shift = C::new(0.0, y - eta);
        let (mut top, mut bottom) = (0.0, 0.0);
        for &x in &model.x {
            top += gauss(C::new(x - xi, 0.0) + shift).norm_sqr();
            bottom += gauss(C::new(x - xi, 0.0)).norm_sqr();
        }
        return Ok(KernelFactor { ratio: (top / bottom).sqrt(), approximate: false });
    }
    // Dirichlet eigenvectors are sine series on [-L, L]; continue each term.
    let n = model.len();
    let span = 2.0 * model.half_width;
    let k: Vec<f64> = (1..=n).map(|m| m as f64 * PI / span).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for m in 0..n {
            s[(i, m)] = (k[m] * (model.x[i] + model.half_width)).sin();
        }
    }
    let coeffs = s.tr_mul(&model.eigenvectors) * (2.0 / (n + 1) as f64);
    let sines = |z: C| -> DVector<C> { DVector::from_iterator(n, k.iter().map(|&km| (km * (z + model.half_width)).sin())) };
    let eval_modes = |z: C| -> DVector<C> {
        let sv = sines(z);
        DVector::from_iterator(n, (0..n).map(|col| (0..n).map(|m| sv[m] * coeffs[(m, col)]).sum::<C>()))
    };
    let decay: Vec<f64> = model.eigenvalues.iter().map(|&l| (t * l).exp() / model.dx).collect();
    let column_norm = |y_off: f64, eta_off: f64| -> f64 {
        let src = eval_modes(C::new(xi, eta_off));
        let weights = DVector::from_iterator(n, (0..n).map(|col| src[col] * decay[col]));
        let mut acc = 0.0;
        for &x in &model.x {
            let v = eval_modes(C::new(x, y_off));
            acc += v.iter().zip(weights.iter()).map(|(a, b)| a * b).sum::<C>().norm_sqr();
        }
        (acc * model.dx).sqrt()
    };
    Ok(KernelFactor { ratio: column_norm(y, eta) / column_norm(0.0, 0.0), approximate: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{PolynomialFlux, ShockProblem};
    use crate::wave::solve_profile;

    fn cubic() -> ShockProblem {
        ShockProblem::new(PolynomialFlux::new(vec![0.0, 0.0, 0.0, -1.0 / 3.0]).unwrap(), 1.0, 2.0, 1.0)
            .unwrap()
            .normalize()
    }

    #[test]
    fn classical_potential_is_constant() {
        let p = solve_profile(&ShockProblem::classical(), 20.0, 0.05, 0.0).unwrap();
        for q in build_potential(&p) {
            assert!((q + 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_potential_oracle() {
        let p = solve_profile(&cubic(), 30.0, 0.05, 1.5).unwrap();
        let q = build_potential(&p);
        let i0 = p.x.iter().position(|x| x.abs() < 1e-12).unwrap();
        // Normalized flux -u^3/3 + 7u/3 expanded by hand at u = 3/2.
        let u = 1.5_f64;
        let dphi = -u * u + 7.0 / 3.0;
        let d2phi = -2.0 * u;
        let fprime = -u * u * u / 3.0 + 7.0 * u / 3.0 - 2.0;
        assert!((q[i0] - (-0.25 * dphi * dphi + 0.5 * d2phi * fprime)).abs() < 1e-10);
        let n = q.len();
        assert!((q[0] + 0.25 * (4.0_f64 / 3.0).powi(2)).abs() < 1e-6);
        assert!((q[n - 1] + 0.25 * (5.0_f64 / 3.0).powi(2)).abs() < 1e-6);
    }

    #[test]
    fn classical_kernel_matches_gaussian() {
        let p = solve_profile(&ShockProblem::classical(), 20.0, 0.05, 0.0).unwrap();
        let m = LinearOperatorModel::from_profile(&p).unwrap();
        let j = m.len() / 2;
        for t in [0.1, 1.0, 5.0] {
            let k = heat_kernel(&m, t).unwrap();
            let mut worst = 0.0_f64;
            for i in 0..m.len() {
                let d = m.x[i] - m.x[j];
                if d.abs() > 4.0 * t.sqrt() {
                    continue;
                }
                let exact = (-t / 4.0).exp() / (4.0 * PI * t).sqrt() * (-d * d / (4.0 * t)).exp();
                worst = worst.max((k.matrix[(i, j)] - exact).abs() / exact);
            }
            assert!(worst < 0.01, "t = {t}: {worst}");
            let want = (-t / 4.0).exp() * 0.5_f64.sqrt() * (2.0 * PI * t).powf(-0.25);
            assert!((k.column_norm(j) / want - 1.0).abs() < 0.01);
        }
        let k1 = heat_kernel(&m, 0.5).unwrap().matrix;
        let k2 = heat_kernel(&m, 1.0).unwrap().matrix;
        let composed = &k1 * &k1 * m.dx;
        assert!((composed - &k2).abs().max() < 1e-8);
        assert!((&k2 - k2.transpose()).abs().max() == 0.0 || (&k2 - k2.transpose()).abs().max() < 1e-15);
        assert!(heat_kernel(&m, 0.0).is_err());
    }

    #[test]
    fn gap_and_edges() {
        let p = solve_profile(&ShockProblem::classical(), 20.0, 0.05, 0.0).unwrap();
        let g = spectral_gap(&LinearOperatorModel::from_profile(&p).unwrap()).unwrap();
        assert!((g.omega - 0.25).abs() < 0.01);
        assert!((g.essential_edge + 0.25).abs() < 1e-12);
        let p = solve_profile(&cubic(), 20.0, 0.05, 1.5).unwrap();
        let g = spectral_gap(&LinearOperatorModel::from_profile(&p).unwrap()).unwrap();
        assert!((g.essential_edge + 4.0 / 9.0).abs() < 1e-6);
        assert!(g.omega > 0.0);
        let grid: Vec<f64> = (0..=100).map(|i| -5.0 + 0.1 * i as f64).collect();
        let bad = LinearOperatorModel::from_potential(&grid, &vec![1.0; grid.len()]).unwrap();
        assert!(matches!(spectral_gap(&bad), Err(ShockError::PositiveEigenvalue { .. })));
    }

    fn similarity_setup(dx: f64) -> (LinearOperatorModel, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let p = solve_profile(&ShockProblem::classical(), 20.0, dx, 0.0).unwrap();
        let m = LinearOperatorModel::from_profile(&p).unwrap();
        let w: Vec<f64> = m.x.iter().map(|x| (x / 2.0).cosh()).collect();
        let n = p.x.len();
        let phi: Vec<f64> = p.f_values[1..n - 1].iter().map(|f| p.problem.flux.derivative(*f)).collect();
        let h: Vec<f64> = m.x.iter().map(|x| 1.0 / x.cosh()).collect();
        let flipped = build_potential_flipped(&p)[1..n - 1].to_vec();
        (m, w, phi, h, flipped)
    }

    #[test]
    fn similarity_converges_at_second_order() {
        let (m1, w1, f1, h1, q1) = similarity_setup(0.05);
        let (m2, w2, f2, h2, _) = similarity_setup(0.025);
        let r1 = similarity_check(&m1, &w1, &f1, &h1);
        let r2 = similarity_check(&m2, &w2, &f2, &h2);
        assert!(r1 < 1e-3, "{r1}");
        assert!((r1 / r2 - 4.0).abs() < 0.4, "{}", r1 / r2);
        assert_eq!(similarity_check(&m1, &w1, &f1, &vec![0.0; h1.len()]), 0.0);
        assert!(similarity_residual(&m1, &q1, &w1, &f1, &h1) > 0.1);
    }

    #[test]
    fn green_function_against_crank_nicolson() {
        let p = solve_profile(&ShockProblem::classical(), 20.0, 0.05, 0.0).unwrap();
        let m = LinearOperatorModel::from_profile(&p).unwrap();
        let w: Vec<f64> = m.x.iter().map(|x| (x / 2.0).cosh()).collect();
        let h0: Vec<f64> = m.x.iter().map(|x| (x / 2.0).cosh().powi(-2)).collect();
        let got = apply_green(&m, &w, 1.0, &h0);
        let g = green_function(&m, &w, 1.0).unwrap();
        let via_matrix = &g * DVector::from_column_slice(&h0) * m.dx;
        for (a, b) in got.iter().zip(via_matrix.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        // H_t = H_xx - Phi'(f) H_x, Phi'(f) = -tanh(x/2), by Crank-Nicolson.
        let n = m.len();
        let steps = 400;
        let dt = 1.0 / steps as f64;
        let mut op = DMatrix::<f64>::zeros(n, n);
        let (a, dx) = (1.0 / (m.dx * m.dx), m.dx);
        for i in 0..n {
            let drift = (m.x[i] / 2.0).tanh();
            op[(i, i)] = -2.0 * a;
            if i > 0 {
                op[(i, i - 1)] = a - drift / (2.0 * dx);
            }
            if i + 1 < n {
                op[(i, i + 1)] = a + drift / (2.0 * dx);
            }
        }
        let id = DMatrix::<f64>::identity(n, n);
        let lhs = (&id - &op * (0.5 * dt)).lu();
        let rhs_m = &id + &op * (0.5 * dt);
        let mut hv = DVector::from_column_slice(&h0);
        for _ in 0..steps {
            hv = lhs.solve(&(&rhs_m * &hv)).unwrap();
        }
        let diff: f64 = got.iter().zip(hv.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(diff / hv.norm() < 1e-3, "{}", diff / hv.norm());
        let hx = m.d1(&got);
        let mass: f64 = hx.iter().sum::<f64>() * m.dx;
        assert!(mass.abs() < 1e-8);
    }

    #[test]
    fn trivial_weight_gives_kernel() {
        let grid: Vec<f64> = (0..=200).map(|i| -10.0 + 0.1 * i as f64).collect();
        let m = LinearOperatorModel::from_potential(&grid, &vec![-0.3; grid.len()]).unwrap();
        let g = green_function(&m, &vec![1.0; m.len()], 0.7).unwrap();
        assert_eq!(g, heat_kernel(&m, 0.7).unwrap().matrix);
    }

    #[test]
    fn complexified_factor_classical() {
        let grid: Vec<f64> = (0..=800).map(|i| -20.0 + 0.05 * i as f64).collect();
        let m = LinearOperatorModel::from_potential(&grid, &vec![-0.25; grid.len()]).unwrap();
        let f = complexified_kernel_factor(&m, 1.0, 0.5, 0.5, 0.0).unwrap();
        assert!((f.ratio - 1.0).abs() < 1e-12 && !f.approximate);
        let f = complexified_kernel_factor(&m, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!((f.ratio - 0.25_f64.exp()).abs() < 0.01 * 0.25_f64.exp());
        let f = complexified_kernel_factor(&m, 2.0, 1.5, -0.5, 0.0).unwrap();
        assert!((f.ratio - 0.5_f64.exp()).abs() < 0.01 * 0.5_f64.exp());
    }

    #[test]
    fn continued_eigenfunctions_reproduce_gaussian_factor() {
        // Nearly constant potential forces the eigenfunction route.
        let grid: Vec<f64> = (0..=300).map(|i| -15.0 + 0.1 * i as f64).collect();
        let q: Vec<f64> = grid.iter().map(|x| -0.25 + 1e-9 * (x / 15.0)).collect();
        let m = LinearOperatorModel::from_potential(&grid, &q).unwrap();
        let f = complexified_kernel_factor(&m, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(f.approximate);
        assert!((f.ratio / 0.25_f64.exp() - 1.0).abs() < 0.02, "{}", f.ratio);
    }
}
