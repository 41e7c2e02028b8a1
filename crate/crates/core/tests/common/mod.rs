//! Independent numerical oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Recursive adaptive Simpson with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫₀^{π/2} g(θ) dθ` for a smooth π-periodic even integrand: the trapezoid rule
/// converges geometrically.
fn periodic_trapezoid<F: Fn(f64) -> f64>(g: F, n: usize) -> f64 {
    let h = FRAC_PI_2 / n as f64;
    let mut s = 0.5 * (g(0.0) + g(FRAC_PI_2));
    for i in 1..n {
        s += g(h * i as f64);
    }
    s * h
}

pub fn complete_k(k: f64) -> f64 {
    periodic_trapezoid(|t| 1.0 / (1.0 - (k * t.sin()).powi(2)).sqrt(), 4000)
}

pub fn complete_e(k: f64) -> f64 {
    periodic_trapezoid(|t| (1.0 - (k * t.sin()).powi(2)).sqrt(), 4000)
}

/// `(sn, cn, dn)(u | k)` by fixed-step RK4 on `sn' = cn dn`, `cn' = −sn dn`, `dn' = −k² sn cn`.
pub fn jacobi_rk4(u: f64, k: f64) -> (f64, f64, f64) {
    let steps = ((u.abs() / 1e-3).ceil() as usize).max(1);
    let h = u / steps as f64;
    let k2 = k * k;
    let f = |y: [f64; 3]| [y[1] * y[2], -y[0] * y[2], -k2 * y[0] * y[1]];
    let mut y = [0.0, 1.0, 1.0];
    for _ in 0..steps {
        let a = f(y);
        let b = f([y[0] + 0.5 * h * a[0], y[1] + 0.5 * h * a[1], y[2] + 0.5 * h * a[2]]);
        let c = f([y[0] + 0.5 * h * b[0], y[1] + 0.5 * h * b[1], y[2] + 0.5 * h * b[2]]);
        let d = f([y[0] + h * c[0], y[1] + h * c[1], y[2] + h * c[2]]);
        for i in 0..3 {
            y[i] += h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
        }
    }
    (y[0], y[1], y[2])
}

/// Fixed-step RK4 for a planar autonomous system.
pub fn rk4_planar<F: Fn([f64; 2]) -> [f64; 2]>(f: F, y0: [f64; 2], t: f64, steps: usize) -> [f64; 2] {
    let h = t / steps as f64;
    let mut y = y0;
    for _ in 0..steps {
        let a = f(y);
        let b = f([y[0] + 0.5 * h * a[0], y[1] + 0.5 * h * a[1]]);
        let c = f([y[0] + 0.5 * h * b[0], y[1] + 0.5 * h * b[1]]);
        let d = f([y[0] + h * c[0], y[1] + h * c[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
        }
    }
    y
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
