//! Adaptive Dormand–Prince 5(4) integrator for small complex systems
//! parameterised by a real path variable.

use num_complex::Complex64;

use crate::error::{Result, ShockError};

type C = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// State norm beyond which the solution is declared singular.
    pub blowup: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, blowup: 1e12 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &[C], terms: &[(f64, &[C])], h: f64) -> Vec<C> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += *ki * (c * h);
        }
    }
    out
}

/// Integrates `dy/ds = rhs(s, y)` from `s_out[0]` through the increasing (or
/// decreasing) sequence `s_out`, returning the state at every requested point.
pub fn integrate<F>(rhs: F, y0: &[C], s_out: &[f64], tol: Tolerances) -> Result<Vec<Vec<C>>>
where
    F: Fn(f64, &[C]) -> Vec<C>,
{
    let mut out = Vec::with_capacity(s_out.len());
    if s_out.is_empty() {
        return Ok(out);
    }
    let mut y = y0.to_vec();
    let mut s = s_out[0];
    out.push(y.clone());
    let total = (s_out[s_out.len() - 1] - s).abs().max(1e-300);
    let mut h = 1e-3 * total;
    let mut k1 = rhs(s, &y);
    for &target in &s_out[1..] {
        let dir = (target - s).signum();
        let mut steps = 0usize;
        while (target - s) * dir > 1e-15 * (1.0 + s.abs()) {
            steps += 1;
            if steps > 2_000_000 {
                return Err(ShockError::Integration(format!("step budget exhausted at s = {s}")));
            }
            let mut hh = h.abs().min((target - s).abs()) * dir;
            let last = (s + hh - target) * dir >= 0.0;
            if last {
                hh = target - s;
            }
            let k2 = rhs(s + hh / 5.0, &axpy(&y, &[(A21, &k1)], hh));
            let k3 = rhs(s + 0.3 * hh, &axpy(&y, &[(A31, &k1), (A32, &k2)], hh));
            let k4 = rhs(s + 0.8 * hh, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hh));
            let k5 = rhs(
                s + 8.0 / 9.0 * hh,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hh),
            );
            let k6 = rhs(
                s + hh,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hh),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hh);
            let k7 = rhs(s + hh, &y_new);
            let mut err = 0.0_f64;
            for i in 0..y.len() {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hh;
                let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / sc);
            }
            if !err.is_finite() {
                h = hh.abs() * 0.1;
                if h < 1e-14 * total {
                    return Err(ShockError::Integration(format!("non-finite derivative near s = {s}")));
                }
                continue;
            }
            if err <= 1.0 {
                s = if last { target } else { s + hh };
                y = y_new;
                k1 = k7;
                if y.iter().any(|v| !v.is_finite() || v.norm() > tol.blowup) {
                    return Err(ShockError::Integration(format!("solution blew up near s = {s}")));
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = hh.abs() * factor;
            if h < 1e-15 * total {
                return Err(ShockError::Integration(format!("step size underflow near s = {s}")));
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
