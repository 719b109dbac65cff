//! Weight function `w(z) = exp(-1/2 int_0^z Phi'(f(eta)) d eta)` and the
//! weighted norms built from it.
//!
//! On the real axis `w(x) = sqrt(f'(0) / f'(x))`, which is evaluated from the
//! end-state gaps of the profile and so stays accurate deep in the tails.
//! Off the axis `(f, ln w)` are carried together along a vertical leg from the
//! origin followed by a horizontal sweep.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, ShockError};
use crate::ode::{self, Tolerances};
use crate::quad;
use crate::wave::WaveProfile;

type C = Complex64;

/// Default number of equispaced lines used for strip suprema.
pub const DEFAULT_LADDER: usize = 32;

#[derive(Debug, Clone)]
pub struct WeightFunction {
    pub profile: Arc<WaveProfile>,
    /// `f'(0)`, the constant linking `w` to `f'^{-1/2}`.
    pub fprime0: f64,
    pub y0: f64,
    pub margin: f64,
}

impl WeightFunction {
    pub fn new(profile: Arc<WaveProfile>) -> Result<Self> {
        let y0 = profile.lattice()?.y0;
        let fprime0 = profile.point_at(0.0)?.fprime;
        Ok(Self { profile, fprime0, y0, margin: 0.05 * y0 })
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    fn check(&self, y: f64) -> Result<()> {
        if y.abs() >= self.y0 - self.margin {
            return Err(ShockError::Refused {
                z: format!("Im z = {y}"),
                reason: format!("path leaves |Im z| < {:.6}", self.y0 - self.margin),
            });
        }
        Ok(())
    }

    /// Real weights at arbitrary sorted abscissae.
    pub fn real_values(&self, xs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.profile.sample(xs)?.iter().map(|p| (self.fprime0 / p.fprime).sqrt()).collect())
    }

    /// `(f, ln w)` at `iy`.
    fn state_at_height(&self, y: f64) -> Result<[C; 2]> {
        if y == 0.0 {
            return Ok([C::new(self.profile.anchor, 0.0), C::new(0.0, 0.0)]);
        }
        let legs = self.profile.continue_along(&[C::new(0.0, 0.0), C::new(0.0, y)], &[vec![1.0]])?;
        Ok(legs[0][0])
    }

    /// `(f, w)` along the horizontal line `Im z = y` at sorted abscissae.
    pub fn line(&self, y: f64, xs: &[f64]) -> Result<Vec<(C, C)>> {
        self.check(y)?;
        if y == 0.0 {
            let pts = self.profile.sample(xs)?;
            return Ok(pts
                .iter()
                .map(|p| (C::new(p.f, 0.0), C::new((self.fprime0 / p.fprime).sqrt(), 0.0)))
                .collect());
        }
        let start = self.state_at_height(y)?;
        let eq = self.profile.equation();
        let rhs = |_: f64, s: &[C]| vec![eq.rhs.eval_c(s[0]), -0.5 * eq.phi_prime(s[0])];
        let split = xs.partition_point(|&x| x < 0.0);
        let mut out = vec![(C::new(0.0, 0.0), C::new(0.0, 0.0)); xs.len()];
        let mut right = vec![0.0];
        right.extend_from_slice(&xs[split..]);
        let r = ode::integrate(rhs, &start, &right, Tolerances::default())?;
        for (i, v) in r[1..].iter().enumerate() {
            out[split + i] = (v[0], v[1].exp());
        }
        let mut left = vec![0.0];
        left.extend(xs[..split].iter().rev());
        let l = ode::integrate(rhs, &start, &left, Tolerances::default())?;
        for (i, v) in l[1..].iter().enumerate() {
            out[split - 1 - i] = (v[0], v[1].exp());
        }
        Ok(out)
    }

    /// Value of the analytic continuation of `w`, normalized by `w(0) = 1`.
    pub fn weight_at(&self, z: C) -> Result<C> {
        self.check(z.im)?;
        if z.im == 0.0 {
            return Ok(C::new(self.real_values(&[z.re])?[0], 0.0));
        }
        Ok(self.line(z.im, &[z.re])?[0].1)
    }
}

/// Result of a truncated weighted energy integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub value: f64,
    /// Set when the integrand at the ends exceeds `1e-10` of its peak.
    pub tail_warning: bool,
}

/// Trapezoidal `int w^2 g^2 dx` on uniformly spaced samples.
pub fn weighted_energy(w: &[f64], g: &[f64], dx: f64) -> Energy {
    assert_eq!(w.len(), g.len(), "weight and field lengths differ");
    let dens: Vec<f64> = w.iter().zip(g).map(|(w, g)| (w * g).powi(2)).collect();
    let peak = dens.iter().fold(0.0_f64, |m, v| m.max(*v));
    let ends = dens.first().copied().unwrap_or(0.0).max(dens.last().copied().unwrap_or(0.0));
    Energy { value: quad::trapezoid(&dens, dx), tail_warning: peak > 0.0 && ends > 1e-10 * peak }
}

/// Exponents `(a_n, b_n)` of the weighted Hardy space for flux degree `n`.
pub fn hardy_exponents(n: usize) -> (f64, f64) {
    let n = n as f64;
    (2.0 / n - 2.5, (n - 2.0) / (n - 1.0))
}

#[derive(Debug, Clone)]
pub struct HardyNormParams {
    pub a: f64,
    pub b: f64,
    pub c_strip: f64,
    pub weight: WeightFunction,
}

impl HardyNormParams {
    pub fn for_degree(weight: WeightFunction, c_strip: f64) -> Self {
        let (a, b) = hardy_exponents(weight.profile.problem.flux.degree());
        Self { a, b, c_strip, weight }
    }
}

/// Samples of a function on the horizontal line `Im z = y`.
#[derive(Debug, Clone)]
pub struct LineSamples {
    pub y: f64,
    pub xi: Vec<f64>,
    pub values: Vec<C>,
}

impl LineSamples {
    pub fn from_fn<F: Fn(C) -> C>(f: F, y: f64, xi: &[f64]) -> Self {
        Self { y, xi: xi.to_vec(), values: xi.iter().map(|&x| f(C::new(x, y))).collect() }
    }
}

/// `y_k = c k / m` for `k = 0..m`.
pub fn ladder(c_strip: f64, lines: usize) -> Vec<f64> {
    (0..lines).map(|k| c_strip * k as f64 / lines as f64).collect()
}

fn line_term(params: &HardyNormParams, line: &LineSamples) -> Result<f64> {
    if line.y.abs() >= params.c_strip {
        return Err(ShockError::InvalidInput(format!("line y = {} outside strip {}", line.y, params.c_strip)));
    }
    let wl = params.weight.line(line.y, &line.xi)?;
    let w_axis = params.weight.weight_at(C::new(0.0, line.y))?.norm();
    let dens: Vec<f64> = wl.iter().zip(&line.values).map(|((_, w), u)| w.norm() * u.norm_sqr()).collect();
    let dx = if line.xi.len() > 1 { line.xi[1] - line.xi[0] } else { 0.0 };
    let integral = quad::trapezoid(&dens, dx);
    Ok(w_axis.powf(params.a) * (params.c_strip - line.y.abs()).powf(-0.5 * params.b) * integral.sqrt())
}

/// Supremum over the supplied lines of the weighted line norms.
pub fn hardy_norm(params: &HardyNormParams, lines: &[LineSamples]) -> Result<f64> {
    if lines.is_empty() {
        return Err(ShockError::InvalidInput("hardy norm needs at least one line".into()));
    }
    lines.iter().try_fold(0.0_f64, |m, l| Ok(m.max(line_term(params, l)?)))
}

/// `sup |u(z)| |w(iy)|^{1/2 + a} (c - |y|)^{(1 - b)/2} / ||u||` over `samples`.
pub fn check_evaluation_lemma<F: Fn(C) -> C>(
    params: &HardyNormParams,
    lines: &[LineSamples],
    u: F,
    samples: &[C],
) -> Result<f64> {
    let norm = hardy_norm(params, lines)?;
    let mut best = 0.0_f64;
    for &z in samples {
        let v = u(z).norm();
        if v == 0.0 {
            continue;
        }
        if norm == 0.0 {
            return Err(ShockError::Internal(format!("zero norm but |u({z})| = {v}")));
        }
        let w = params.weight.weight_at(C::new(0.0, z.im))?.norm();
        let q = v * w.powf(0.5 + params.a) * (params.c_strip - z.im.abs()).powf(0.5 * (1.0 - params.b)) / norm;
        best = best.max(q);
    }
    Ok(best)
}
