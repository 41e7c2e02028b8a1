//! Dormand–Prince 5(4) integrator with step-size control and cubic Hermite
//! dense output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-9 }
    }
}

impl Tolerances {
    pub fn scaled(self, factor: f64) -> Self {
        Self { abs: self.abs * factor, rel: self.rel * factor }
    }
}

/// A (possibly time-dependent) vector field on `R^n`.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]);
    /// Row-major `n×n` Jacobian with respect to `x`.
    fn jacobian(&self, t: f64, x: &[f64], out: &mut [f64]);

    fn divergence(&self, t: f64, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut j = vec![0.0; n * n];
        self.jacobian(t, x, &mut j);
        (0..n).map(|i| j[i * n + i]).sum()
    }
}

/// `x` augmented with the fundamental matrix `Φ` and `∫ tr DF dt`.
pub struct Variational<'a, F: VectorField + ?Sized> {
    pub field: &'a F,
}

impl<F: VectorField + ?Sized> VectorField for Variational<'_, F> {
    fn dim(&self) -> usize {
        let n = self.field.dim();
        n + n * n + 1
    }

    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let n = self.field.dim();
        self.field.eval(t, &y[..n], &mut out[..n]);
        assert!(n <= 3, "variational equations support n <= 3");
        let mut jbuf = [0.0; 9];
        let j = &mut jbuf[..n * n];
        self.field.jacobian(t, &y[..n], j);
        let phi = &y[n..n + n * n];
        for r in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += j[r * n + k] * phi[k * n + c];
                }
                out[n + r * n + c] = s;
            }
        }
        out[n + n * n] = (0..n).map(|i| j[i * n + i]).sum();
    }

    fn jacobian(&self, _t: f64, _x: &[f64], _out: &mut [f64]) {
        unimplemented!("second variation is not needed")
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
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
// Differences between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 5_000_000;

/// One accepted step, for observers.
pub struct StepView<'a> {
    pub t0: f64,
    pub x0: &'a [f64],
    pub f0: &'a [f64],
    pub t1: f64,
    pub x1: &'a [f64],
    pub f1: &'a [f64],
}

impl StepView<'_> {
    /// Cubic Hermite interpolant at `t` in `[t0, t1]`, component `i`.
    pub fn interpolate(&self, t: f64, i: usize) -> f64 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.x0[i] + h10 * h * self.f0[i] + h01 * self.x1[i] + h11 * h * self.f1[i]
    }
}

/// Integrates from `t0` to `t1` (either direction), calling `observer` after every
/// accepted step. The observer may stop integration early by returning `false`.
pub fn integrate_observed<F, O>(
    field: &F,
    x0: &[f64],
    t0: f64,
    t1: f64,
    tol: Tolerances,
    mut observer: O,
) -> Result<(f64, Vec<f64>)>
where
    F: VectorField + ?Sized,
    O: FnMut(&StepView<'_>) -> bool,
{
    let n = field.dim();
    assert_eq!(x0.len(), n, "state dimension mismatch");
    let mut x = x0.to_vec();
    if t1 == t0 {
        return Ok((t0, x));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut xn = vec![0.0; n];
    field.eval(t, &x, &mut k[0]);

    let mut h = initial_step(field, t, &x, &k[0], dir, tol).min(span);
    let mut steps = 0usize;
    let mut last_reject = false;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepFailure { t, reason: "step budget exhausted".into() });
        }
        let remaining = (t1 - t).abs();
        let mut hs = h.min(remaining);
        if remaining - hs < 1e-12 * span {
            hs = remaining;
        }
        if !(hs > 16.0 * f64::EPSILON * t.abs().max(1.0)) {
            return Err(Error::StepFailure { t, reason: format!("step size underflow (h = {hs:e})") });
        }
        let hd = hs * dir;

        stage(&mut tmp, &x, hd, &[(A21, &k[0])]);
        field.eval(t + C2 * hd, &tmp, &mut k[1]);
        stage(&mut tmp, &x, hd, &[(A31, &k[0]), (A32, &k[1])]);
        field.eval(t + C3 * hd, &tmp, &mut k[2]);
        stage(&mut tmp, &x, hd, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])]);
        field.eval(t + C4 * hd, &tmp, &mut k[3]);
        stage(&mut tmp, &x, hd, &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])]);
        field.eval(t + C5 * hd, &tmp, &mut k[4]);
        stage(&mut tmp, &x, hd, &[(A61, &k[0]), (A62, &k[1]), (A63, &k[2]), (A64, &k[3]), (A65, &k[4])]);
        field.eval(t + hd, &tmp, &mut k[5]);
        stage(&mut xn, &x, hd, &[(B1, &k[0]), (B3, &k[2]), (B4, &k[3]), (B5, &k[4]), (B6, &k[5])]);
        let t_new = if hs == remaining { t1 } else { t + hd };
        field.eval(t_new, &xn, &mut k[6]);

        let mut err = 0.0f64;
        for i in 0..n {
            let e = hd * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let sc = tol.abs + tol.rel * x[i].abs().max(xn[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() || xn.iter().any(|v| !v.is_finite()) {
            h = hs * 0.1;
            last_reject = true;
            continue;
        }
        if err <= 1.0 {
            let keep_going = {
                let view = StepView { t0: t, x0: &x, f0: &k[0], t1: t_new, x1: &xn, f1: &k[6] };
                observer(&view)
            };
            t = t_new;
            std::mem::swap(&mut x, &mut xn);
            k.swap(0, 6);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = if last_reject { hs * fac.min(1.0) } else { hs * fac };
            last_reject = false;
            if !keep_going {
                break;
            }
        } else {
            h = hs * (0.9 * err.powf(-0.2)).max(0.1);
            last_reject = true;
        }
    }
    Ok((t, x))
}

/// State at `t1` starting from `x0` at `t0`.
pub fn integrate<F: VectorField + ?Sized>(field: &F, x0: &[f64], t0: f64, t1: f64, tol: Tolerances) -> Result<Vec<f64>> {
    integrate_observed(field, x0, t0, t1, tol, |_| true).map(|(_, x)| x)
}

fn stage(out: &mut [f64], x: &[f64], h: f64, terms: &[(f64, &Vec<f64>)]) {
    for i in 0..x.len() {
        let mut s = 0.0;
        for (a, k) in terms {
            s += a * k[i];
        }
        out[i] = x[i] + h * s;
    }
}

fn initial_step<F: VectorField + ?Sized>(field: &F, t: f64, x: &[f64], f0: &[f64], dir: f64, tol: Tolerances) -> f64 {
    let n = x.len();
    let sc = |i: usize| tol.abs + tol.rel * x[i].abs();
    let d0 = (0..n).map(|i| (x[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
    let d1 = (0..n).map(|i| (f0[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let x1: Vec<f64> = (0..n).map(|i| x[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    field.eval(t + dir * h0, &x1, &mut f1);
    let d2 = (0..n).map(|i| ((f1[i] - f0[i]) / sc(i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}
