//! Polynomial fluxes, shock admissibility and the moving-frame normalization.
//!
//! A shock problem connects the end states `alpha_minus < alpha_plus` under
//! `f_t + Phi(f)_x = nu f_xx`. The celerity and integration constant of the
//! travelling wave are
//!
//! ```text
//! c = (Phi(a+) - Phi(a-)) / (a+ - a-)
//! k = (a- Phi(a+) - a+ Phi(a-)) / (a+ - a-)
//! ```

use num_complex::Complex64;

use crate::error::{Result, ShockError};
use crate::poly::Polynomial;

/// Number of interior samples used by the entropy sweep.
pub const ENTROPY_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFlux {
    phi: Polynomial,
    dphi: Polynomial,
    d2phi: Polynomial,
}

impl PolynomialFlux {
    /// `coeffs` are ascending: `Phi(u) = sum coeffs[i] u^i`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(ShockError::InvalidInput("flux coefficients must be finite".into()));
        }
        let phi = Polynomial::new(coeffs);
        if phi.degree() < 2 {
            return Err(ShockError::InvalidInput(format!(
                "flux degree must be at least 2, got {}",
                phi.degree()
            )));
        }
        let dphi = phi.derivative();
        let d2phi = dphi.derivative();
        Ok(Self { phi, dphi, d2phi })
    }

    /// The classical Burgers flux `-u^2 / 2`.
    pub fn classical() -> Self {
        Self::new(vec![0.0, 0.0, -0.5]).expect("classical flux is valid")
    }

    pub fn degree(&self) -> usize {
        self.phi.degree()
    }

    pub fn coeffs(&self) -> &[f64] {
        self.phi.coeffs()
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.phi
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.phi.eval(u)
    }

    pub fn eval_c(&self, u: Complex64) -> Complex64 {
        self.phi.eval_c(u)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.dphi.eval(u)
    }

    pub fn derivative_c(&self, u: Complex64) -> Complex64 {
        self.dphi.eval_c(u)
    }

    pub fn second_derivative(&self, u: f64) -> f64 {
        self.d2phi.eval(u)
    }

    /// `Phi(u) - slope * u`.
    pub fn shifted(&self, slope: f64) -> Self {
        let mut c = self.phi.coeffs().to_vec();
        c[1] -= slope;
        Self::new(c).expect("shift keeps degree")
    }
}

/// Affine map from the normalized frame `(x', t')` back to physical `(x, t)`:
/// `x = scale * x' + shift * scale * t'`, `t = scale * t'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTransform {
    pub shift: f64,
    pub scale: f64,
}

impl FrameTransform {
    pub const IDENTITY: Self = Self { shift: 0.0, scale: 1.0 };

    pub fn to_physical(&self, x: f64, t: f64) -> (f64, f64) {
        (self.scale * x + self.shift * self.scale * t, self.scale * t)
    }

    /// Lengths (e.g. strip widths) scale linearly.
    pub fn length_to_physical(&self, len: f64) -> f64 {
        self.scale * len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockProblem {
    pub flux: PolynomialFlux,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub nu: f64,
    pub c: f64,
    pub k: f64,
    /// Accumulated change of variables relative to the problem as first posed.
    pub frame: FrameTransform,
}

pub fn compute_celerity_and_constant(flux: &PolynomialFlux, a_minus: f64, a_plus: f64) -> Result<(f64, f64)> {
    if !(a_plus.is_finite() && a_minus.is_finite()) || a_plus == a_minus {
        return Err(ShockError::InvalidInput(format!(
            "degenerate end states a- = {a_minus}, a+ = {a_plus}"
        )));
    }
    let (pp, pm) = (flux.eval(a_plus), flux.eval(a_minus));
    let d = a_plus - a_minus;
    Ok(((pp - pm) / d, (a_minus * pp - a_plus * pm) / d))
}

impl ShockProblem {
    pub fn new(flux: PolynomialFlux, alpha_minus: f64, alpha_plus: f64, nu: f64) -> Result<Self> {
        if !(alpha_plus > alpha_minus) {
            return Err(ShockError::InvalidInput(format!(
                "need alpha_plus > alpha_minus, got ({alpha_minus}, {alpha_plus})"
            )));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(ShockError::InvalidInput(format!("viscosity must be positive, got {nu}")));
        }
        let (c, k) = compute_celerity_and_constant(&flux, alpha_minus, alpha_plus)?;
        Ok(Self { flux, alpha_minus, alpha_plus, nu, c, k, frame: FrameTransform::IDENTITY })
    }

    pub fn classical() -> Self {
        Self::new(PolynomialFlux::classical(), -1.0, 1.0, 1.0).expect("classical problem is valid")
    }

    /// Overrides the stored celerity; only useful for probing the predicates.
    pub fn with_celerity(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn jump(&self) -> f64 {
        self.alpha_plus - self.alpha_minus
    }

    /// Gelfand–Oleinik chord condition in its standard form:
    /// `(Phi(u) - Phi(a-)) / (u - a-) > c` on the open interval.
    pub fn check_entropy(&self) -> bool {
        let (a, b) = (self.alpha_minus, self.alpha_plus);
        let base = self.flux.polynomial().sub(&Polynomial::new(vec![self.flux.eval(a)]));
        let (chord, _) = base.div_linear(a);
        let margin = |u: f64| chord.eval(u) - self.c;
        let d = b - a;
        let dense_ok = (1..=ENTROPY_SAMPLES).all(|i| margin(a + d * i as f64 / (ENTROPY_SAMPLES + 1) as f64) > 0.0);
        dense_ok
            && chord
                .derivative()
                .real_roots_in(a, b)
                .into_iter()
                .filter(|&u| (u - b).abs() > 1e-12 * (1.0 + b.abs()))
                .all(|u| margin(u) > 0.0)
    }

    /// Strict Lax inequalities `Phi'(a+) < c < Phi'(a-)`.
    pub fn check_lax(&self) -> bool {
        self.flux.derivative(self.alpha_plus) < self.c && self.c < self.flux.derivative(self.alpha_minus)
    }

    /// Fails with the name of the first violated predicate.
    pub fn ensure_admissible(&self) -> Result<()> {
        if !self.check_entropy() {
            return Err(ShockError::Inadmissible { predicate: "entropy" });
        }
        if !self.check_lax() {
            return Err(ShockError::Inadmissible { predicate: "lax" });
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        self.c == 0.0 && self.nu == 1.0
    }

    /// Moving frame with unit viscosity: flux `Phi(u) - c u`, `x' = (x - c t) / nu`,
    /// `t' = t / nu`.
    pub fn normalize(&self) -> Self {
        let flux = if self.c == 0.0 { self.flux.clone() } else { self.flux.shifted(self.c) };
        let (_, k) = compute_celerity_and_constant(&flux, self.alpha_minus, self.alpha_plus)
            .expect("end states already validated");
        let frame = FrameTransform {
            shift: self.frame.shift + self.c,
            scale: self.frame.scale * self.nu,
        };
        Self {
            flux,
            alpha_minus: self.alpha_minus,
            alpha_plus: self.alpha_plus,
            nu: 1.0,
            c: 0.0,
            k,
            frame,
        }
    }

    /// `Phi(F) - Phi(a+)`, the right-hand side of the normalized wave equation.
    pub fn wave_rhs(&self) -> Polynomial {
        self.flux.polynomial().sub(&Polynomial::new(vec![self.flux.eval(self.alpha_plus)]))
    }
}
