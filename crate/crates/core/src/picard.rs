//! Duhamel form of the perturbation equation and its Picard iteration.
//!
//! Integrating the perturbation equation once in `x` gives, for the potential
//! `H` with `h = H_x`,
//!
//! ```text
//! H_t - H_xx + Phi'(f) H_x = -R(f, h),   R = Phi(f + h) - Phi(f) - Phi'(f) h
//! ```
//!
//! so with the weighted propagator `S(t) = w^{-1} e^{tA} w`,
//! `h = a + B(h)` where `a(t) = d_x S(t) H0` and
//! `B(h)(t) = -d_x int_0^t S(t - tau) R(tau) d tau`.
//!
//! The time integral is done exactly in the eigenbasis of `A` for a
//! piecewise-linear interpolant of `R` in time, so the kernel singularity at
//! `tau = t` needs no special mesh.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, ShockError};
use crate::flux::PolynomialFlux;
use crate::linop::LinearOperatorModel;
use crate::wave::WaveProfile;

/// Contraction threshold defining the operational smallness condition.
pub const SIGMA_MAX: f64 = 0.9;
/// Consecutive expanding iterations that count as divergence.
const DIVERGENCE_RUN: usize = 3;

/// `Phi(f + h) - Phi(f) - Phi'(f) h`.
pub fn remainder(flux: &PolynomialFlux, f: f64, h: f64) -> f64 {
    let t = flux.polynomial().taylor_at(f);
    horner_tail(&t[2.min(t.len())..], h) * h * h
}

/// `sum_j c_j h^j` for ascending `c`.
fn horner_tail(c: &[f64], h: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * h + v)
}

fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// Space-time discretization shared by `a` and `B`. Fields are stored
/// time-major: `field[m * nx + i]` is the value at `t_m`, `x_i`.
#[derive(Debug, Clone)]
pub struct Duhamel {
    pub model: Arc<LinearOperatorModel>,
    /// Real weight at the interior grid points.
    pub w: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Taylor coefficients `Phi^{(j)}(f) / j!` for `j >= 2` at each grid point.
    taylor: Vec<Vec<f64>>,
    step_exp: Vec<f64>,
    step_p1: Vec<f64>,
    step_p2: Vec<f64>,
}

impl Duhamel {
    /// `model` must be built on `profile`'s grid.
    pub fn new(model: Arc<LinearOperatorModel>, profile: &WaveProfile, t_grid: Vec<f64>) -> Result<Self> {
        let nx = model.len();
        if profile.x.len() != nx + 2 || (profile.dx - model.dx).abs() > 1e-12 * model.dx {
            return Err(ShockError::InvalidInput("operator model and profile grids differ".into()));
        }
        if t_grid.len() < 2 || t_grid[0] != 0.0 {
            return Err(ShockError::InvalidInput("time grid must start at 0 with at least two levels".into()));
        }
        let dt = t_grid[1] - t_grid[0];
        if t_grid.windows(2).any(|p| ((p[1] - p[0]) - dt).abs() > 1e-9 * dt) || !(dt > 0.0) {
            return Err(ShockError::InvalidInput("time grid must be uniform and increasing".into()));
        }
        let fprime0 = profile.point_at(0.0)?.fprime;
        let w = profile.fprime_values[1..=nx].iter().map(|fp| (fprime0 / fp).sqrt()).collect();
        let poly = profile.problem.flux.polynomial();
        let taylor = profile.f_values[1..=nx].iter().map(|&f| poly.taylor_at(f)[2..].to_vec()).collect();
        let lam = &model.eigenvalues;
        Ok(Self {
            w,
            t_grid,
            taylor,
            step_exp: lam.iter().map(|l| (l * dt).exp()).collect(),
            step_p1: lam.iter().map(|l| dt * phi1(l * dt)).collect(),
            step_p2: lam.iter().map(|l| dt * phi2(l * dt)).collect(),
            model,
        })
    }

    pub fn nx(&self) -> usize {
        self.model.len()
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    fn weighted_remainder_coeffs(&self, h: &[f64]) -> DMatrix<f64> {
        let (nx, nt) = (self.nx(), self.nt());
        let wr = DMatrix::from_fn(nx, nt, |i, m| {
            let hv = h[m * nx + i];
            self.w[i] * horner_tail(&self.taylor[i], hv) * hv * hv
        });
        self.model.eigenvectors.tr_mul(&wr)
    }

    /// `-d_x w^{-1} V u` per column, flattened time-major.
    fn to_field(&self, coeffs: &DMatrix<f64>, sign: f64) -> Vec<f64> {
        let vals = &self.model.eigenvectors * coeffs;
        let mut out = Vec::with_capacity(self.nx() * self.nt());
        for m in 0..self.nt() {
            let col: Vec<f64> = (0..self.nx()).map(|i| vals[(i, m)] / self.w[i]).collect();
            out.extend(self.model.derivative(&col).into_iter().map(|v| sign * v));
        }
        out
    }

    pub fn apply_b(&self, h: &[f64]) -> Result<Vec<f64>> {
        if h.len() != self.nx() * self.nt() {
            return Err(ShockError::InvalidInput(format!("field of {} values, expected {}", h.len(), self.nx() * self.nt())));
        }
        let r = self.weighted_remainder_coeffs(h);
        let n = self.nx();
        let mut u = DMatrix::<f64>::zeros(n, self.nt());
        for m in 0..self.nt() - 1 {
            for j in 0..n {
                let (r0, r1) = (r[(j, m)], r[(j, m + 1)]);
                u[(j, m + 1)] = self.step_exp[j] * u[(j, m)] + self.step_p1[j] * r0 + self.step_p2[j] * (r1 - r0);
            }
        }
        Ok(self.to_field(&u, -1.0))
    }

    /// `a(t) = d_x w^{-1} e^{tA} w H0` on the time grid.
    pub fn linear_term(&self, h0_potential: &[f64]) -> Result<Vec<f64>> {
        if h0_potential.len() != self.nx() {
            return Err(ShockError::InvalidInput(format!("potential of {} values, expected {}", h0_potential.len(), self.nx())));
        }
        let wh = DVector::from_iterator(self.nx(), self.w.iter().zip(h0_potential).map(|(a, b)| a * b));
        let c0 = self.model.eigenvectors.tr_mul(&wh);
        let lam = &self.model.eigenvalues;
        let coeffs = DMatrix::from_fn(self.nx(), self.nt(), |j, m| (lam[j] * self.t_grid[m]).exp() * c0[j]);
        Ok(self.to_field(&coeffs, 1.0))
    }

    /// `sup_t (int w^2 h^2 dx)^{1/2}`.
    pub fn norm(&self, field: &[f64]) -> f64 {
        let nx = self.nx();
        field
            .chunks(nx)
            .map(|row| (row.iter().zip(&self.w).map(|(h, w)| (w * h).powi(2)).sum::<f64>() * self.model.dx).sqrt())
            .fold(0.0, f64::max)
    }

    /// Slice of a flattened field at time level `m`.
    pub fn level<'a>(&self, field: &'a [f64], m: usize) -> &'a [f64] {
        &field[m * self.nx()..(m + 1) * self.nx()]
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointRun {
    pub a: Vec<f64>,
    /// `h_0 = 0, h_1 = a, ...`.
    pub iterates: Vec<Vec<f64>>,
    /// `||h_{n+1} - h_n||` for `n = 0, 1, ...`.
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
    pub converged: bool,
    pub sigma_hat: f64,
    /// `||h - a - B(h)|| / ||h||` at the last iterate.
    pub final_residual: f64,
}

impl FixedPointRun {
    pub fn solution(&self) -> &[f64] {
        self.iterates.last().expect("at least one iterate")
    }

    /// `picard_run.csv` body.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,residual,ratio\n");
        for (n, inc) in self.increments.iter().enumerate() {
            let ratio = if n == 0 { f64::NAN } else { self.ratios[n - 1] };
            s.push_str(&format!("{n},{inc},{ratio}\n"));
        }
        s
    }
}

fn diff_norm<N: Fn(&[f64]) -> f64>(norm: &N, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d)
}

/// Iterates `h_{n+1} = a + B(h_n)` from `h_0 = 0`.
pub fn picard_solve<B, N>(a: &[f64], apply_b: B, norm: N, max_iter: usize, tol: f64) -> Result<FixedPointRun>
where
    B: Fn(&[f64]) -> Result<Vec<f64>>,
    N: Fn(&[f64]) -> f64,
{
    let zero = vec![0.0; a.len()];
    let mut iterates = vec![zero];
    let mut increments = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut expanding = 0usize;
    let mut h1_norm = 0.0;
    for n in 0..max_iter {
        let bh = apply_b(iterates.last().unwrap())?;
        let next: Vec<f64> = a.iter().zip(&bh).map(|(x, y)| x + y).collect();
        let inc = diff_norm(&norm, &next, iterates.last().unwrap());
        if n == 0 {
            h1_norm = norm(&next);
        }
        iterates.push(next);
        if !inc.is_finite() {
            break;
        }
        if let Some(&prev) = increments.last() {
            let ratio = if prev > 0.0 { inc / prev } else { 0.0 };
            ratios.push(ratio);
            expanding = if ratio > 1.0 { expanding + 1 } else { 0 };
        }
        increments.push(inc);
        if inc <= tol * h1_norm {
            converged = true;
            break;
        }
        if expanding >= DIVERGENCE_RUN {
            break;
        }
    }
    let sigma_hat = ratios.iter().copied().fold(0.0, f64::max);
    let last = iterates.last().unwrap();
    let bh = apply_b(last)?;
    let resid: Vec<f64> = last.iter().zip(a).zip(&bh).map(|((h, a), b)| h - a - b).collect();
    let hn = norm(last);
    let final_residual = if hn > 0.0 { norm(&resid) / hn } else { norm(&resid) };
    Ok(FixedPointRun { a: a.to_vec(), iterates, increments, ratios, converged, sigma_hat, final_residual })
}

#[derive(Debug, Clone)]
pub struct TstarEstimate {
    pub tstar: f64,
    pub sigma_hat: f64,
    /// `(T, sigma_hat, converged)` for every launch performed.
    pub trials: Vec<(f64, f64, bool)>,
}

/// Earliest trial time whose launched Picard run converges with
/// `sigma_hat <= SIGMA_MAX`, by bisection over the sorted trial times.
pub fn estimate_tstar<L>(trial_times: &[f64], launch: L) -> Result<TstarEstimate>
where
    L: Fn(f64) -> Result<FixedPointRun>,
{
    let mut times = trial_times.to_vec();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    if times.is_empty() {
        return Err(ShockError::InvalidInput("no trial times".into()));
    }
    let mut trials = Vec::new();
    let probe = |i: usize, trials: &mut Vec<(f64, f64, bool)>| -> Result<(bool, f64)> {
        let run = launch(times[i])?;
        let ok = run.converged && run.sigma_hat <= SIGMA_MAX;
        trials.push((times[i], run.sigma_hat, run.converged));
        Ok((ok, run.sigma_hat))
    };
    let (last_ok, mut best_sigma) = probe(times.len() - 1, &mut trials)?;
    if !last_ok {
        return Err(ShockError::Fit(format!(
            "no trial time up to {} gives a contraction (sigma_hat = {best_sigma:.3})",
            times[times.len() - 1]
        )));
    }
    let (mut lo, mut hi) = (0usize, times.len() - 1);
    let (first_ok, s0) = probe(0, &mut trials)?;
    if first_ok {
        return Ok(TstarEstimate { tstar: times[0], sigma_hat: s0, trials });
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let (ok, s) = probe(mid, &mut trials)?;
        if ok {
            hi = mid;
            best_sigma = s;
        } else {
            lo = mid;
        }
    }
    Ok(TstarEstimate { tstar: times[hi], sigma_hat: best_sigma, trials })
}
