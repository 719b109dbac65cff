//! Travelling-wave profiles and their complex singularities.
//!
//! In the normalized frame the wave solves `f' = P(f)` with
//! `P(F) = Phi(F) - Phi(a+)`. Because `P(a-) = P(a+) = 0` we factor
//! `P(F) = (F - a-)(F - a+) Q(F)` and split
//!
//! ```text
//! 1 / P(F) = A / (F - a-) + B / (F - a+) + T(F) / Q(F)
//! ```
//!
//! so that `x(F)` is two logarithms plus the integral of a function that is
//! smooth on `[a-, a+]`. The profile is recovered by Newton inversion in the
//! logit variable `zeta = ln((F - a-) / (a+ - F))`, which keeps both end-state
//! gaps at full relative precision.
//!
//! Singularities sit where the continued profile reaches `F = infinity`; their
//! positions are contour integrals `int_anchor^inf dF / P(F)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Result, ShockError};
use crate::flux::ShockProblem;
use crate::ode::{self, Tolerances};
use crate::poly::Polynomial;
use crate::quad;

type C = Complex64;

/// Tolerance on the end-state gap at `|x| = L`.
pub const ENDPOINT_TOL: f64 = 1e-8;
/// Relative quadrature tolerance for contour integrals.
pub const CONTOUR_TOL: f64 = 1e-12;
/// Number of radii used by the branch-order fit.
pub const BRANCH_FIT_RADII: usize = 40;

/// Algebraic data shared by the real profile and the contour integrals.
#[derive(Debug, Clone)]
pub struct WaveEquation {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    /// `P(F) = Phi(F) - Phi(a+)`.
    pub rhs: Polynomial,
    /// `P / ((F - a-)(F - a+))`.
    quotient: Polynomial,
    /// Smooth remainder numerator: `1/P = A/(F-a-) + B/(F-a+) + T/Q`.
    remainder: Polynomial,
    res_minus: f64,
    res_plus: f64,
    d_phi: Polynomial,
}

impl WaveEquation {
    pub fn new(problem: &ShockProblem) -> Result<Self> {
        if !problem.is_normalized() {
            return Err(ShockError::InvalidInput("wave construction needs a normalized problem".into()));
        }
        problem.ensure_admissible()?;
        let (am, ap) = (problem.alpha_minus, problem.alpha_plus);
        let rhs = problem.wave_rhs();
        let (q1, _) = rhs.div_linear(ap);
        let (quotient, _) = q1.div_linear(am);
        let d_rhs = rhs.derivative();
        let res_minus = 1.0 / d_rhs.eval(am);
        let res_plus = 1.0 / d_rhs.eval(ap);
        // 1 - Q [A (F - a+) + B (F - a-)] = (F - a-)(F - a+) T
        let lin = Polynomial::new(vec![-res_minus * ap - res_plus * am, res_minus + res_plus]);
        let numer = Polynomial::new(vec![1.0]).sub(&quotient.mul(&lin));
        let (t1, _) = numer.div_linear(ap);
        let (remainder, _) = t1.div_linear(am);
        Ok(Self {
            alpha_minus: am,
            alpha_plus: ap,
            rhs,
            quotient,
            remainder,
            res_minus,
            res_plus,
            d_phi: problem.flux.polynomial().derivative(),
        })
    }

    fn jump(&self) -> f64 {
        self.alpha_plus - self.alpha_minus
    }

    /// `P(F)` from the two gaps, exact to relative precision near either end state.
    fn rhs_from_gaps(&self, f: f64, lo: f64, hi: f64) -> f64 {
        -lo * hi * self.quotient.eval(f)
    }

    fn smooth_integral(&self, from: f64, to: f64) -> Result<f64> {
        if self.remainder.is_zero() || from == to {
            return Ok(0.0);
        }
        quad::integrate_real(|g| self.remainder.eval(g) / self.quotient.eval(g), from, to, 1e-15)
    }

    /// Roots of `P` other than the end states.
    pub fn interior_roots(&self) -> Vec<C> {
        self.quotient.roots()
    }

    pub fn phi_prime(&self, f: C) -> C {
        self.d_phi.eval_c(f)
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn ln_logistic(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// Real profile value with its end-state gaps.
#[derive(Debug, Clone, Copy)]
pub struct ProfilePoint {
    pub f: f64,
    pub fprime: f64,
    pub gap_lo: f64,
    pub gap_hi: f64,
    zeta: f64,
}

/// Real-axis profile evaluator, translation fixed by `f(0) = anchor`.
#[derive(Debug, Clone)]
struct Inverter {
    eq: WaveEquation,
    anchor: f64,
    zeta_anchor: f64,
}

impl Inverter {
    fn new(eq: WaveEquation, anchor: f64) -> Result<Self> {
        if !(anchor > eq.alpha_minus && anchor < eq.alpha_plus) {
            return Err(ShockError::InvalidInput(format!(
                "anchor {anchor} outside ({}, {})",
                eq.alpha_minus, eq.alpha_plus
            )));
        }
        let zeta_anchor = ((anchor - eq.alpha_minus) / (eq.alpha_plus - anchor)).ln();
        Ok(Self { eq, anchor, zeta_anchor })
    }

    fn point(&self, zeta: f64) -> ProfilePoint {
        let d = self.eq.jump();
        let lo = d * logistic(zeta);
        let hi = d * logistic(-zeta);
        let f = if zeta < 0.0 { self.eq.alpha_minus + lo } else { self.eq.alpha_plus - hi };
        ProfilePoint { f, fprime: self.eq.rhs_from_gaps(f, lo, hi), gap_lo: lo, gap_hi: hi, zeta }
    }

    fn x_of_zeta(&self, zeta: f64) -> Result<(f64, ProfilePoint)> {
        let p = self.point(zeta);
        let za = self.zeta_anchor;
        let x = self.eq.res_minus * (ln_logistic(zeta) - ln_logistic(za))
            + self.eq.res_plus * (ln_logistic(-zeta) - ln_logistic(-za))
            + self.eq.smooth_integral(self.anchor, p.f)?;
        Ok((x, p))
    }

    fn invert(&self, x_target: f64, mut zeta: f64) -> Result<ProfilePoint> {
        let d = self.eq.jump();
        for _ in 0..100 {
            let (x, p) = self.x_of_zeta(zeta)?;
            let g = x - x_target;
            let slope = -1.0 / (d * self.eq.quotient.eval(p.f));
            let step = (g / slope).clamp(-4.0, 4.0);
            zeta -= step;
            if g.abs() <= 2e-15 * (1.0 + x_target.abs()) || step.abs() < 1e-15 * (1.0 + zeta.abs()) {
                return Ok(self.point(zeta));
            }
        }
        Err(ShockError::Internal(format!("profile inversion stalled at x = {x_target}")))
    }
}

/// Sampled travelling wave on `[-L, L]` in the normalized frame.
#[derive(Debug)]
pub struct WaveProfile {
    pub problem: ShockProblem,
    pub anchor: f64,
    pub half_width: f64,
    pub dx: f64,
    pub x: Vec<f64>,
    pub f_values: Vec<f64>,
    pub fprime_values: Vec<f64>,
    pub gap_lo: Vec<f64>,
    pub gap_hi: Vec<f64>,
    inverter: Inverter,
    lattice: OnceLock<std::result::Result<SingularityLattice, String>>,
}

impl Clone for WaveProfile {
    fn clone(&self) -> Self {
        Self {
            problem: self.problem.clone(),
            anchor: self.anchor,
            half_width: self.half_width,
            dx: self.dx,
            x: self.x.clone(),
            f_values: self.f_values.clone(),
            fprime_values: self.fprime_values.clone(),
            gap_lo: self.gap_lo.clone(),
            gap_hi: self.gap_hi.clone(),
            inverter: self.inverter.clone(),
            lattice: self.lattice.clone(),
        }
    }
}

/// Midpoint anchor `(a- + a+) / 2`.
pub fn default_anchor(problem: &ShockProblem) -> f64 {
    0.5 * (problem.alpha_minus + problem.alpha_plus)
}

/// Solves the wave ODE on a uniform grid over `[-half_width, half_width]`.
pub fn solve_profile(problem: &ShockProblem, half_width: f64, dx: f64, anchor: f64) -> Result<WaveProfile> {
    build_profile(problem, half_width, dx, anchor, true)
}

fn build_profile(problem: &ShockProblem, half_width: f64, dx: f64, anchor: f64, check_gap: bool) -> Result<WaveProfile> {
    if !(half_width > 0.0 && dx > 0.0 && dx < half_width) {
        return Err(ShockError::InvalidInput(format!("bad grid L = {half_width}, dx = {dx}")));
    }
    let eq = WaveEquation::new(problem)?;
    let inverter = Inverter::new(eq, anchor)?;
    let cells = (2.0 * half_width / dx).round() as usize;
    let h = 2.0 * half_width / cells as f64;
    let x: Vec<f64> = (0..=cells).map(|i| -half_width + i as f64 * h).collect();
    let points = sample_points(&inverter, &x)?;
    let gap = points[0].gap_lo.max(points[cells].gap_hi);
    if check_gap && gap > ENDPOINT_TOL {
        return Err(ShockError::DomainTooShort { gap, tol: ENDPOINT_TOL });
    }
    Ok(WaveProfile {
        problem: problem.clone(),
        anchor,
        half_width,
        dx: h,
        f_values: points.iter().map(|p| p.f).collect(),
        fprime_values: points.iter().map(|p| p.fprime).collect(),
        gap_lo: points.iter().map(|p| p.gap_lo).collect(),
        gap_hi: points.iter().map(|p| p.gap_hi).collect(),
        x,
        inverter,
        lattice: OnceLock::new(),
    })
}

/// Evaluates at sorted abscissae, marching outward from the anchor.
fn sample_points(inv: &Inverter, xs: &[f64]) -> Result<Vec<ProfilePoint>> {
    let n = xs.len();
    let mut out: Vec<Option<ProfilePoint>> = vec![None; n];
    let start = xs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let slope0 = -1.0 / (inv.eq.jump() * inv.eq.quotient.eval(inv.anchor));
    let mut zeta = inv.zeta_anchor;
    if n > 0 {
        let p = inv.invert(xs[start], inv.zeta_anchor + xs[start] / slope0)?;
        zeta = p.zeta;
        out[start] = Some(p);
    }
    let mut z = zeta;
    for i in start + 1..n {
        let p = inv.invert(xs[i], z)?;
        z = p.zeta;
        out[i] = Some(p);
    }
    let mut z = zeta;
    for i in (0..start).rev() {
        let p = inv.invert(xs[i], z)?;
        z = p.zeta;
        out[i] = Some(p);
    }
    Ok(out.into_iter().map(|p| p.unwrap()).collect())
}

impl WaveProfile {
    pub fn equation(&self) -> &WaveEquation {
        &self.inverter.eq
    }

    /// Profile at an arbitrary real abscissa.
    pub fn point_at(&self, x: f64) -> Result<ProfilePoint> {
        let slope0 = -1.0 / (self.inverter.eq.jump() * self.inverter.eq.quotient.eval(self.anchor));
        self.inverter.invert(x, self.inverter.zeta_anchor + x / slope0)
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        Ok(self.point_at(x)?.f)
    }

    /// Profile samples at sorted abscissae (not necessarily the stored grid).
    pub fn sample(&self, xs: &[f64]) -> Result<Vec<ProfilePoint>> {
        sample_points(&self.inverter, xs)
    }

    /// Relaxation length `1 / min |P'(a+-)|`.
    pub fn relaxation_length(&self) -> f64 {
        let eq = &self.inverter.eq;
        eq.res_minus.abs().max(eq.res_plus.abs())
    }

    /// Singularity lattice, computed on first use.
    pub fn lattice(&self) -> Result<&SingularityLattice> {
        self.lattice
            .get_or_init(|| locate_singularities(&self.problem, self.anchor).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| ShockError::Quadrature(e.clone()))
    }

    /// Value and log-weight `-1/2 int_0^z Phi'(f)` carried along straight
    /// segments; the first segment starts at the anchor point `x = 0`.
    pub(crate) fn continue_along(&self, waypoints: &[C], outputs_per_leg: &[Vec<f64>]) -> Result<Vec<Vec<[C; 2]>>> {
        let eq = self.equation();
        let mut state = vec![C::new(self.anchor, 0.0), C::new(0.0, 0.0)];
        let mut result = Vec::new();
        for (leg, w) in waypoints.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let dz = b - a;
            let rhs = |_: f64, y: &[C]| vec![eq.rhs.eval_c(y[0]) * dz, -0.5 * eq.phi_prime(y[0]) * dz];
            let mut s_out = vec![0.0];
            s_out.extend(outputs_per_leg[leg].iter().copied());
            if *s_out.last().unwrap() != 1.0 {
                s_out.push(1.0);
            }
            let out = ode::integrate(rhs, &state, &s_out, Tolerances::default())?;
            state = out.last().unwrap().clone();
            result.push(out[1..].iter().map(|v| [v[0], v[1]]).collect());
        }
        Ok(result)
    }

    /// Continuation along the vertical segment from `Re z` with no strip check.
    pub(crate) fn continue_vertical(&self, x: f64, heights: &[f64]) -> Result<Vec<C>> {
        let f0 = self.value_at(x)?;
        let eq = self.equation();
        let rhs = |_: f64, y: &[C]| vec![eq.rhs.eval_c(y[0]) * C::i()];
        let mut s = vec![0.0];
        s.extend_from_slice(heights);
        let out = ode::integrate(rhs, &[C::new(f0, 0.0)], &s, Tolerances { blowup: 1e14, ..Tolerances::default() })?;
        Ok(out[1..].iter().map(|v| v[0]).collect())
    }
}

/// Analytic continuation `f(z)` inside the strip, refusing points closer than
/// `margin` to the strip edge.
pub fn continue_profile(profile: &WaveProfile, z: C, margin: Option<f64>) -> Result<C> {
    let lattice = profile.lattice()?;
    let margin = margin.unwrap_or(0.05 * lattice.y0);
    if z.im.abs() >= lattice.y0 - margin {
        let dist = lattice.distance_to_nearest(z);
        return Err(ShockError::Refused {
            z: format!("{z}"),
            reason: format!(
                "|Im z| = {:.6} not below y0 - margin = {:.6}; nearest singularity at distance {dist:.6}",
                z.im.abs(),
                lattice.y0 - margin
            ),
        });
    }
    if z.im == 0.0 {
        return Ok(C::new(profile.value_at(z.re)?, 0.0));
    }
    Ok(profile.continue_vertical(z.re, &[z.im])?[0])
}

/// One line of singularities `base + m * spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeLine {
    pub root: C,
    pub base_point: C,
    pub spacing: C,
    pub residue: C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityLattice {
    pub lines: Vec<LatticeLine>,
    pub branch_order: usize,
    pub y0: f64,
    /// Singularity realising `y0` (upper half plane).
    pub nearest: C,
    /// Base points confirmed to lie on the sheet reached from the real axis.
    pub principal: Vec<C>,
    /// Physical length per normalized unit (the viscosity of the posed problem).
    pub length_scale: f64,
}

impl SingularityLattice {
    /// Strip half-width in the original physical variables.
    pub fn y0_physical(&self) -> f64 {
        self.length_scale * self.y0
    }

    pub fn residue_sum(&self) -> C {
        self.lines.iter().map(|l| l.residue).sum()
    }

    pub fn distance_to_nearest(&self, z: C) -> f64 {
        self.principal
            .iter()
            .flat_map(|p| [*p, p.conj()])
            .map(|p| (p - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `singularities.csv` body with header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("line_index,re_base,im_base,re_spacing,im_spacing,re_residue,im_residue,branch_order\n");
        for (i, l) in self.lines.iter().enumerate() {
            s.push_str(&format!(
                "{i},{},{},{},{},{},{},{}\n",
                l.base_point.re, l.base_point.im, l.spacing.re, l.spacing.im, l.residue.re, l.residue.im, self.branch_order
            ));
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Segment(C, C),
    Arc { center: C, radius: f64, from: f64, to: f64 },
    Ray { start: C, dir: C },
}

fn integrate_piece(p: &WaveEquation, piece: Piece) -> Result<C> {
    let inv = |z: C| 1.0 / p.rhs.eval_c(z);
    match piece {
        Piece::Segment(a, b) => quad::integrate(|t| inv(a + (b - a) * t) * (b - a), 0.0, 1.0, CONTOUR_TOL),
        Piece::Arc { center, radius, from, to } => quad::integrate(
            |th| {
                let e = C::from_polar(radius, th);
                inv(center + e) * C::i() * e
            },
            from,
            to,
            CONTOUR_TOL,
        ),
        Piece::Ray { start, dir } => quad::integrate(
            |u| {
                let s = u / (1.0 - u);
                let w = 1.0 / ((1.0 - u) * (1.0 - u));
                if !s.is_finite() {
                    return C::new(0.0, 0.0);
                }
                inv(start + dir * s) * dir * w
            },
            0.0,
            1.0,
            CONTOUR_TOL,
        ),
    }
}

/// Ray from `start` in direction `dir`, detouring around roots closer than
/// `radius` along the arc with the larger imaginary part.
fn ray_path(start: C, dir: C, roots: &[C], radius: f64) -> Vec<Piece> {
    let dir = dir / dir.norm();
    let mut hits: Vec<(f64, C, f64)> = roots
        .iter()
        .filter_map(|&r| {
            let rel = (r - start) / dir;
            (rel.re > 0.0 && rel.im.abs() < radius).then(|| (rel.re, r, (radius * radius - rel.im * rel.im).sqrt()))
        })
        .collect();
    hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut pieces = Vec::new();
    let mut cur = start;
    for (t, r, h) in hits {
        let entry = start + dir * (t - h);
        let exit = start + dir * (t + h);
        pieces.push(Piece::Segment(cur, entry));
        let th_in = (entry - r).arg();
        let mut th_ccw = (exit - r).arg();
        while th_ccw <= th_in {
            th_ccw += 2.0 * PI;
        }
        let th_cw = th_ccw - 2.0 * PI;
        let mid_ccw = (r + C::from_polar(radius, 0.5 * (th_in + th_ccw))).im;
        let mid_cw = (r + C::from_polar(radius, 0.5 * (th_in + th_cw))).im;
        let to = if mid_ccw >= mid_cw { th_ccw } else { th_cw };
        pieces.push(Piece::Arc { center: r, radius, from: th_in, to });
        cur = exit;
    }
    pieces.push(Piece::Ray { start: cur, dir });
    pieces
}

fn contour_value(eq: &WaveEquation, pieces: &[Piece]) -> Result<C> {
    pieces.iter().map(|&p| integrate_piece(eq, p)).sum()
}

/// Lattice of complex singularities of the wave with translation fixed by
/// `f(0) = anchor`.
pub fn locate_singularities(problem: &ShockProblem, anchor: f64) -> Result<SingularityLattice> {
    let profile = build_profile(problem, 1.0, 0.5, anchor, false)?;
    let eq = profile.equation().clone();
    let mut roots = vec![C::new(eq.alpha_minus, 0.0), C::new(eq.alpha_plus, 0.0)];
    roots.extend(eq.interior_roots());
    let scale = roots.iter().fold(1.0_f64, |m, r| m.max(r.norm()));
    let mut min_sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let d = (roots[i] - roots[j]).norm();
            if d < 1e-7 * scale {
                return Err(ShockError::Unsupported(format!(
                    "repeated root of Phi(F) - Phi(a+) near F = {}",
                    roots[j]
                )));
            }
            min_sep = min_sep.min(d);
        }
    }
    let anchor_c = C::new(anchor, 0.0);
    let anchor_gap = roots.iter().map(|r| (r - anchor_c).norm()).fold(f64::INFINITY, f64::min);
    let radius = (0.1 * min_sep).min(0.5 * anchor_gap);
    let d_rhs = eq.rhs.derivative();

    let mut lines = Vec::with_capacity(roots.len());
    for &r in &roots {
        let residue = 1.0 / d_rhs.eval_c(r);
        let base_point = contour_value(&eq, &ray_path(anchor_c, r - anchor_c, &roots, radius))?;
        lines.push(LatticeLine { root: r, base_point, spacing: 2.0 * PI * C::i() * residue, residue });
    }

    let mut candidates: Vec<C> = lines.iter().map(|l| l.base_point).collect();
    const SWEEP: usize = 48;
    for m in 0..SWEEP {
        let theta = PI * (m as f64 + 0.5) / SWEEP as f64;
        candidates.push(contour_value(&eq, &ray_path(anchor_c, C::from_polar(1.0, theta), &roots, radius))?);
    }
    let mut unique: Vec<C> = Vec::new();
    for c in candidates {
        let c = if c.im < 0.0 { c.conj() } else { c };
        if c.im > 1e-9 && !unique.iter().any(|u| (u - c).norm() < 1e-6 * (1.0 + c.norm())) {
            unique.push(c);
        }
    }
    unique.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
    let root_radius = roots.iter().fold(0.0_f64, |m, r| m.max(r.norm()));
    let mut principal = Vec::new();
    for c in unique {
        if is_principal(&profile, &eq, c, root_radius) {
            principal.push(c);
        }
    }
    let nearest = *principal.first().ok_or_else(|| {
        ShockError::Quadrature(format!("no candidate singularity confirmed on the principal sheet ({} roots)", roots.len()))
    })?;
    Ok(SingularityLattice {
        lines,
        branch_order: problem.flux.degree() - 1,
        y0: nearest.im,
        nearest,
        principal,
        length_scale: problem.frame.scale,
    })
}

/// Confirms that the straight vertical continuation from `Re c` runs into the
/// candidate singularity `c`.
fn is_principal(profile: &WaveProfile, eq: &WaveEquation, c: C, root_radius: f64) -> bool {
    let s = 1e-6 * c.im;
    let Ok(vals) = profile.continue_vertical(c.re, &[c.im - s]) else {
        return false;
    };
    let f_end = vals[0];
    if f_end.norm() < 2.0 * root_radius + 1.0 {
        return false;
    }
    let z_end = C::new(c.re, c.im - s);
    match integrate_piece(eq, Piece::Ray { start: f_end, dir: f_end / f_end.norm() }) {
        Ok(tail) => (z_end + tail - c).norm() < 1e-6 * (1.0 + c.norm()),
        Err(_) => false,
    }
}

/// Least-squares slope and correlation of `ln|f|` against `ln s`.
pub fn log_log_fit(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|(s, _)| s.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let corr = if syy == 0.0 { 0.0 } else { sxy / (sxx * syy).sqrt() };
    (slope, corr)
}

fn fit_radii(y0: f64) -> Vec<f64> {
    (0..BRANCH_FIT_RADII)
        .map(|k| y0 * 10f64.powf(-4.0 + 3.0 * k as f64 / (BRANCH_FIT_RADII - 1) as f64))
        .collect()
}

fn accept_fit(samples: &[(f64, f64)]) -> Result<f64> {
    let (slope, corr) = log_log_fit(samples);
    if corr.abs() < 0.999 || !slope.is_finite() {
        return Err(ShockError::Fit(format!("branch-order fit correlation {corr:.6} below 0.999")));
    }
    Ok(slope)
}

/// Exponent `p` of `|f(z0 - i s)| ~ s^p` for an arbitrary function.
pub fn fit_exponent_along_ray<F: Fn(C) -> C>(f: F, z0: C, scale: f64) -> Result<f64> {
    let samples: Vec<(f64, f64)> = fit_radii(scale).into_iter().map(|s| (s, f(z0 - C::i() * s).norm())).collect();
    accept_fit(&samples)
}

/// Fitted local exponent at the nearest singularity; expected `-1 / (n - 1)`.
pub fn fit_branch_order(profile: &WaveProfile, lattice: &SingularityLattice) -> Result<f64> {
    let z0 = lattice.nearest;
    let radii = fit_radii(lattice.y0);
    let heights: Vec<f64> = radii.iter().rev().map(|s| z0.im - s).collect();
    let vals = profile.continue_vertical(z0.re, &heights)?;
    let samples: Vec<(f64, f64)> = radii.iter().rev().zip(vals).map(|(s, v)| (*s, v.norm())).collect();
    accept_fit(&samples)
}
