//! Pseudo-spectral evolution of the perturbation `h = f - f_wave` in the wave
//! frame:
//!
//! ```text
//! h_t = h_xx - d_x [Phi(f_wave + h) - Phi(f_wave)]
//! ```
//!
//! on the periodic box `[-L, L)`. The heat part is integrated exactly through
//! an integrating factor and the flux difference with classical RK4. The flux
//! difference is expanded in powers of `h` around the sampled wave so that it
//! vanishes identically at `h = 0`.
//!
//! Spectral coefficients are referenced to `x = 0`: `h(x) = sum h_m e^{i k_m x}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, ShockError};
use crate::wave::WaveProfile;

type C = Complex64;

/// Relative spectral floor separating signal from round-off.
pub const SPECTRAL_FLOOR: f64 = 1e-13;
/// Modes above this fraction of the peak are summed directly in complex evaluation.
const DIRECT_SUM_LEVEL: f64 = 1e-9;
/// Amplitude beyond which a run is declared unstable.
const BLOWUP_LEVEL: f64 = 1e8;

#[derive(Clone)]
pub struct Grid {
    pub half_width: f64,
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("half_width", &self.half_width).field("n", &self.n).finish()
    }
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if n < 16 || !n.is_multiple_of(2) || !(half_width > 0.0) {
            return Err(ShockError::InvalidInput(format!("grid needs even N >= 16 and L > 0, got N = {n}, L = {half_width}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { half_width, n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn x(&self) -> Vec<f64> {
        (0..self.n).map(|j| -self.half_width + j as f64 * self.dx()).collect()
    }

    /// Signed mode number of FFT slot `i`.
    pub fn mode_number(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        std::f64::consts::PI * self.mode_number(i) as f64 / self.half_width
    }

    /// Largest retained mode number under 2/3 dealiasing.
    pub fn dealias_cut(&self) -> i64 {
        (self.n / 3) as i64
    }

    pub fn retained(&self, i: usize) -> bool {
        let m = self.mode_number(i);
        m.abs() <= self.dealias_cut() && m != -(self.n as i64 / 2)
    }

    pub fn to_modes(&self, values: &[f64]) -> Vec<C> {
        let mut buf: Vec<C> = values.iter().map(|&v| C::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (i, b) in buf.iter_mut().enumerate() {
            let sign = if self.mode_number(i) % 2 == 0 { 1.0 } else { -1.0 };
            *b *= scale * sign;
        }
        buf
    }

    pub fn to_values(&self, modes: &[C]) -> Vec<f64> {
        let mut buf: Vec<C> = modes
            .iter()
            .enumerate()
            .map(|(i, &c)| if self.mode_number(i) % 2 == 0 { c } else { -c })
            .collect();
        self.inv.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationState {
    pub t: f64,
    pub modes: Vec<C>,
    pub grid: Grid,
}

impl PerturbationState {
    /// Loads grid values as they are (no mean removal, no dealiasing).
    pub fn from_values(grid: &Grid, values: &[f64], t: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(ShockError::InvalidInput(format!("{} values for {} grid points", values.len(), grid.n)));
        }
        Ok(Self { t, modes: grid.to_modes(values), grid: grid.clone() })
    }

    pub fn zero(grid: &Grid) -> Self {
        Self { t: 0.0, modes: vec![C::new(0.0, 0.0); grid.n], grid: grid.clone() }
    }

    pub fn values(&self) -> Vec<f64> {
        self.grid.to_values(&self.modes)
    }

    pub fn mean_mode(&self) -> C {
        self.modes[0]
    }

    /// `(k_m, |h_m|)` for `m = 0 ..= N/2 - 1`.
    pub fn spectrum(&self) -> Vec<(f64, f64)> {
        (0..self.grid.n / 2).map(|i| (self.grid.wavenumber(i), self.modes[i].norm())).collect()
    }

    /// Sets `h_{-m} = conj(h_m)`, zeroes the mean and the dealiased band.
    fn enforce_structure(&mut self) {
        let n = self.grid.n;
        self.modes[0] = C::new(0.0, 0.0);
        for i in 1..n / 2 {
            if self.grid.retained(i) {
                let avg = 0.5 * (self.modes[i] + self.modes[n - i].conj());
                self.modes[i] = avg;
                self.modes[n - i] = avg.conj();
            } else {
                self.modes[i] = C::new(0.0, 0.0);
                self.modes[n - i] = C::new(0.0, 0.0);
            }
        }
        self.modes[n / 2] = C::new(0.0, 0.0);
    }

    pub fn derivative_values(&self) -> Vec<f64> {
        let d: Vec<C> = self.modes.iter().enumerate().map(|(i, &c)| c * C::new(0.0, self.grid.wavenumber(i))).collect();
        self.grid.to_values(&d)
    }
}

/// Kinds of initial perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `A d/dx sech^2((x - x0) / w0)`.
    DerivBump { amplitude: f64, center: f64, width: f64 },
    /// Positive hat left of `x0`, negative hat right of it; continuous, zero mass.
    TrianglePair { amplitude: f64, center: f64, width: f64 },
}

impl InitialData {
    pub fn sample(&self, x: f64) -> f64 {
        match *self {
            InitialData::DerivBump { amplitude, center, width } => {
                let s = (x - center) / width;
                let sech = 1.0 / s.cosh();
                -2.0 * amplitude / width * sech * sech * s.tanh()
            }
            InitialData::TrianglePair { amplitude, center, width } => {
                let hat = |y: f64| (1.0 - y.abs() / width).max(0.0);
                amplitude * (hat(x - center + width) - hat(x - center - width))
            }
        }
    }

    fn width(&self) -> f64 {
        match *self {
            InitialData::DerivBump { width, .. } | InitialData::TrianglePair { width, .. } => width,
        }
    }
}

pub fn make_initial_data(kind: InitialData, grid: &Grid) -> Result<PerturbationState> {
    if kind.width() < 4.0 * grid.dx() {
        return Err(ShockError::InvalidInput(format!(
            "feature width {} below 4 dx = {}",
            kind.width(),
            4.0 * grid.dx()
        )));
    }
    let values: Vec<f64> = grid.x().iter().map(|&x| kind.sample(x)).collect();
    let l1: f64 = values.iter().map(|v| v.abs()).sum::<f64>() * grid.dx();
    let mass: f64 = values.iter().sum::<f64>() * grid.dx();
    if mass.abs() > 1e-14 * grid.n as f64 * l1.max(f64::MIN_POSITIVE) {
        return Err(ShockError::Internal(format!("initial datum carries mass {mass:.3e}")));
    }
    let mut state = PerturbationState::from_values(grid, &values, 0.0)?;
    state.enforce_structure();
    Ok(state)
}

/// Time stepper bound to one travelling wave and one grid.
#[derive(Debug, Clone)]
pub struct Evolver {
    pub grid: Grid,
    pub wave: Vec<f64>,
    /// `Phi^{(j)}(f_wave) / j!` for `j = 1..=deg`, sampled on the grid.
    taylor: Vec<Vec<f64>>,
    k: Vec<f64>,
}

impl Evolver {
    pub fn new(profile: &WaveProfile, grid: &Grid) -> Result<Self> {
        let xs = grid.x();
        let wave: Vec<f64> = profile.sample(&xs)?.iter().map(|p| p.f).collect();
        let poly = profile.problem.flux.polynomial();
        let deg = poly.degree();
        let mut taylor = vec![Vec::with_capacity(grid.n); deg];
        for &f in &wave {
            let t = poly.taylor_at(f);
            for j in 1..=deg {
                taylor[j - 1].push(t[j]);
            }
        }
        let k = (0..grid.n).map(|i| grid.wavenumber(i)).collect();
        Ok(Self { grid: grid.clone(), wave, taylor, k })
    }

    /// Default step `0.25 dx^2`.
    pub fn default_dt(&self) -> f64 {
        0.25 * self.grid.dx().powi(2)
    }

    /// `Phi(f_wave + h) - Phi(f_wave)` on the grid.
    pub fn flux_difference(&self, h: &[f64]) -> Vec<f64> {
        h.iter()
            .enumerate()
            .map(|(i, &hv)| {
                let mut acc = 0.0;
                for c in self.taylor.iter().rev() {
                    acc = (acc + c[i]) * hv;
                }
                acc
            })
            .collect()
    }

    fn nonlinear(&self, modes: &[C], t: f64) -> Result<Vec<C>> {
        let h = self.grid.to_values(modes);
        if h.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP_LEVEL) {
            return Err(ShockError::BlowUp { t, detail: "perturbation non-finite or above 1e8".into() });
        }
        let g = self.grid.to_modes(&self.flux_difference(&h));
        Ok(g.iter()
            .enumerate()
            .map(|(i, &c)| if self.grid.retained(i) { -C::new(0.0, self.k[i]) * c } else { C::new(0.0, 0.0) })
            .collect())
    }

    /// One integrating-factor RK4 step.
    pub fn step(&self, state: &mut PerturbationState, dt: f64) -> Result<()> {
        let n = self.grid.n;
        let e: Vec<f64> = self.k.iter().map(|k| (-k * k * dt).exp()).collect();
        let e2: Vec<f64> = self.k.iter().map(|k| (-k * k * dt * 0.5).exp()).collect();
        let u = &state.modes;
        let a = self.nonlinear(u, state.t)?;
        let u2: Vec<C> = (0..n).map(|i| e2[i] * (u[i] + a[i] * (0.5 * dt))).collect();
        let b = self.nonlinear(&u2, state.t)?;
        let u3: Vec<C> = (0..n).map(|i| e2[i] * u[i] + b[i] * (0.5 * dt)).collect();
        let c = self.nonlinear(&u3, state.t)?;
        let u4: Vec<C> = (0..n).map(|i| e[i] * u[i] + e2[i] * c[i] * dt).collect();
        let d = self.nonlinear(&u4, state.t)?;
        let new: Vec<C> = (0..n)
            .map(|i| e[i] * u[i] + (e[i] * a[i] + 2.0 * e2[i] * (b[i] + c[i]) + d[i]) * (dt / 6.0))
            .collect();
        state.modes = new;
        state.t += dt;
        state.enforce_structure();
        if state.modes.iter().any(|c| !c.is_finite()) {
            return Err(ShockError::BlowUp { t: state.t, detail: "non-finite spectral coefficient".into() });
        }
        Ok(())
    }

    /// Steps with `dt` (last step shortened) until `t_target`.
    pub fn advance(&self, state: &mut PerturbationState, t_target: f64, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(ShockError::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        while state.t < t_target - 1e-12 * dt {
            let h = dt.min(t_target - state.t);
            self.step(state, h)?;
        }
        state.t = t_target.max(state.t);
        Ok(())
    }
}

/// Options for complex evaluation of a spectral field.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Current strip estimate; points at or beyond it are refused.
    pub strip: Option<f64>,
    pub floor: f64,
    /// Adds the geometric continuation of the resolved spectrum beyond the summed modes.
    pub extrapolate_tail: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { strip: None, floor: SPECTRAL_FLOOR, extrapolate_tail: true }
    }
}

/// Largest `|Im z|` for which `floor` round-off stays below unit amplification.
pub fn resolvability_cap(state: &PerturbationState, floor: f64) -> f64 {
    let peak = state.modes.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let last = (1..state.grid.n / 2)
        .rev()
        .find(|&i| state.modes[i].norm() > floor * peak || state.modes[state.grid.n - i].norm() > floor * peak);
    match last {
        Some(i) => (1.0 / floor).ln() / state.grid.wavenumber(i),
        None => f64::INFINITY,
    }
}

/// `sum h_m e^{i k_m z}` with the sign of `k` selecting one half of the spectrum.
fn half_sum(state: &PerturbationState, z: C, positive: bool, level: f64, extrapolate: bool) -> C {
    let n = state.grid.n;
    let slot = |m: usize| if positive { m } else { n - m };
    let coef = |m: usize| state.modes[slot(m)];
    let wave = |m: usize| (C::i() * state.grid.wavenumber(slot(m)) * z).exp();
    let last = (1..n / 2).rev().find(|&m| coef(m).norm() > level).unwrap_or(0);
    let mut sum = C::new(0.0, 0.0);
    for m in 1..=last {
        sum += coef(m) * wave(m);
    }
    if extrapolate && last >= 6 {
        let ratios: Vec<C> = (last - 4..=last).map(|m| coef(m) / coef(m - 1)).collect();
        let rho = ratios.iter().sum::<C>() / ratios.len() as f64;
        let spread = ratios.iter().map(|r| (r - rho).norm()).fold(0.0, f64::max);
        let r = rho * (wave(last + 1) / wave(last));
        if spread < 0.05 * rho.norm() && r.norm() < 1.0 {
            sum += coef(last) * wave(last) * r / (1.0 - r);
        }
    }
    sum
}

/// Analytic continuation of the spectral field to complex `z`.
pub fn evaluate_complex(state: &PerturbationState, z: C, opts: EvalOptions) -> Result<C> {
    let cap = resolvability_cap(state, opts.floor);
    let y = z.im.abs();
    let beyond_strip = opts.strip.is_some_and(|d| y >= d);
    if y > cap || beyond_strip {
        return Err(ShockError::Refused {
            z: format!("{z}"),
            reason: format!("strip estimate {:?}, resolvability cap {cap:.6}", opts.strip),
        });
    }
    let peak = state.modes.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    if peak == 0.0 {
        return Ok(C::new(0.0, 0.0));
    }
    if y == 0.0 {
        let s: C = state.modes.iter().enumerate().map(|(i, &c)| c * (C::i() * state.grid.wavenumber(i) * z).exp()).sum();
        return Ok(s);
    }
    let level = DIRECT_SUM_LEVEL * peak;
    Ok(state.modes[0]
        + half_sum(state, z, true, level, opts.extrapolate_tail)
        + half_sum(state, z, false, level, opts.extrapolate_tail))
}

/// Potential `H(x) = int_{-L}^x h`, via the spectral antiderivative.
pub fn potential_of(state: &PerturbationState) -> Result<Vec<f64>> {
    let anti: Vec<C> = state
        .modes
        .iter()
        .enumerate()
        .map(|(i, &c)| if i == 0 { C::new(0.0, 0.0) } else { c / C::new(0.0, state.grid.wavenumber(i)) })
        .collect();
    let raw = state.grid.to_values(&anti);
    let h0 = raw[0];
    let h: Vec<f64> = raw.iter().map(|v| v - h0).collect();
    let peak = h.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let leak = state.modes[0].norm() * 2.0 * state.grid.half_width;
    if leak > 1e-10 * peak.max(f64::MIN_POSITIVE) && leak > 0.0 {
        return Err(ShockError::Internal(format!("mass leak: H(L) - H(-L) = {leak:.3e}")));
    }
    Ok(h)
}
