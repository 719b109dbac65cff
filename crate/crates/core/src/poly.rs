//! Real polynomials in ascending-power storage.
//!
//! Roots are found with the Aberth–Ehrlich simultaneous iteration followed by
//! Newton polishing on the undeflated polynomial.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative_c(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Symbolic derivative (coefficient shift-and-scale).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).copied().unwrap_or(0.0) + other.coeffs.get(i).copied().unwrap_or(0.0))
            .collect();
        Self::new(c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// Synthetic division by `(x - r)`; returns quotient and remainder.
    pub fn div_linear(&self, r: f64) -> (Self, f64) {
        let n = self.degree();
        if n == 0 {
            return (Self::zero(), self.coeffs[0]);
        }
        let mut q = vec![0.0; n];
        let mut acc = self.coeffs[n];
        for k in (0..n).rev() {
            q[k] = acc;
            acc = acc * r + self.coeffs[k];
        }
        (Self::new(q), acc)
    }

    /// Long division; returns quotient and remainder.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dn = divisor.degree();
        if self.degree() < dn {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let lead = divisor.leading();
        let mut q = vec![0.0; self.degree() - dn + 1];
        for k in (0..q.len()).rev() {
            let coef = rem[k + dn] / lead;
            q[k] = coef;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= coef * d;
            }
        }
        rem.truncate(dn.max(1));
        (Self::new(q), Self::new(rem))
    }

    /// Taylor coefficients `p^{(k)}(x0) / k!` for k = 0..=degree.
    pub fn taylor_at(&self, x0: f64) -> Vec<f64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                c[k] += x0 * c[k + 1];
            }
        }
        c
    }

    /// All complex roots, counted with multiplicity.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        match n {
            0 => Vec::new(),
            1 => vec![Complex64::new(-self.coeffs[0] / self.coeffs[1], 0.0)],
            2 => quadratic_roots(self.coeffs[2], self.coeffs[1], self.coeffs[0]),
            _ => {
                let mut z = aberth(self);
                for r in z.iter_mut() {
                    *r = newton_polish(self, *r);
                }
                z
            }
        }
    }

    /// Real roots inside the open interval `(a, b)`, sorted.
    pub fn real_roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        if self.is_zero() {
            return Vec::new();
        }
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let tol = 1e-9 * (1.0 + a.abs().max(b.abs()));
        let mut out: Vec<f64> = self
            .roots()
            .into_iter()
            .filter(|r| r.im.abs() <= tol.max(1e-7 * r.norm()) && scale > 0.0)
            .map(|r| r.re)
            .filter(|&x| x > a && x < b)
            .collect();
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        let q = if q == 0.0 { -0.5 * s } else { q };
        if q == 0.0 {
            return vec![Complex64::new(0.0, 0.0); 2];
        }
        vec![Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn aberth(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree();
    let lead = p.leading();
    // Cauchy bound on root moduli.
    let bound = 1.0
        + p.coeffs[..n]
            .iter()
            .fold(0.0_f64, |m, c| m.max((c / lead).abs()));
    let radius = 0.5 * bound;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for k in 0..n {
            let (pv, dpv) = p.eval_with_derivative_c(z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dpv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| 1.0 / (z[k] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    z
}

fn newton_polish(p: &Polynomial, mut z: Complex64) -> Complex64 {
    for _ in 0..4 {
        let (pv, dpv) = p.eval_with_derivative_c(z);
        if dpv.norm() == 0.0 {
            break;
        }
        let step = pv / dpv;
        if !step.is_finite() || step.norm() > 1e-6 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.0, 3.0]);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 24.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 0.0, 9.0]);
        assert_eq!(p.derivative().derivative().derivative().derivative(), Polynomial::zero());
    }

    #[test]
    fn cubic_roots_recovered() {
        // -(x-1)(x-2)(x+3)/3
        let p = Polynomial::new(vec![-2.0, 7.0 / 3.0, 0.0, -1.0 / 3.0]);
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn complex_pair_found() {
        // (x^2 + 1)(x - 0.5)(x + 2)
        let p = Polynomial::new(vec![1.0, 0.0, 1.0]).mul(&Polynomial::new(vec![-0.5, 1.0])).mul(&Polynomial::new(vec![2.0, 1.0]));
        let roots = p.roots();
        assert_eq!(roots.len(), 4);
        for r in &roots {
            assert!(p.eval_c(*r).norm() < 1e-13);
        }
        assert!(roots.iter().any(|r| (r - Complex64::new(0.0, 1.0)).norm() < 1e-12));
    }

    #[test]
    fn synthetic_and_long_division() {
        let p = Polynomial::new(vec![-6.0, 11.0, -6.0, 1.0]); // (x-1)(x-2)(x-3)
        let (q, r) = p.div_linear(1.0);
        assert!(r.abs() < 1e-15);
        assert_eq!(q.coeffs(), &[6.0, -5.0, 1.0]);
        let (q2, r2) = p.div_rem(&Polynomial::new(vec![2.0, -3.0, 1.0]));
        assert!(r2.coeffs().iter().all(|c| c.abs() < 1e-14));
        assert!((q2.eval(0.0) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = Polynomial::new(vec![0.3, -1.0, 2.0, 0.5, -0.25]);
        let t = p.taylor_at(1.3);
        let mut d = p.clone();
        let mut fact = 1.0;
        for (k, tk) in t.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((tk - d.eval(1.3) / fact).abs() < 1e-12);
            d = d.derivative();
        }
    }

    #[test]
    fn real_roots_filtering() {
        let p = Polynomial::new(vec![-6.0, 11.0, -6.0, 1.0]);
        assert_eq!(p.real_roots_in(1.5, 3.5).len(), 2);
        assert!(Polynomial::new(vec![1.0, 0.0, 1.0]).real_roots_in(-5.0, 5.0).is_empty());
    }
}
