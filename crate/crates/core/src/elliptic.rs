//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! `K` and `E` come from the arithmetic-geometric mean; `sn`, `cn`, `dn` from
//! the descending Landen transformation with a trigonometric base case.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest modulus for which `K(k)` is evaluated.
pub const K_CUTOFF: f64 = 1.0 - 1e-12;

const AGM_MAX_ITER: usize = 64;

/// Elliptic modulus `k` in `[0, 1)` together with its complement `k' = sqrt(1 - k^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticModulus {
    k: f64,
    kprime: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return domain(format!("elliptic modulus k = {k} outside [0, 1)"));
        }
        Ok(Self {
            k,
            kprime: ((1.0 - k) * (1.0 + k)).sqrt(),
        })
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    #[inline]
    pub fn kprime(&self) -> f64 {
        self.kprime
    }

    /// The complementary modulus `k'` as a modulus in its own right. Fails for `k = 0`.
    pub fn complementary(&self) -> Result<Self> {
        if self.k == 0.0 {
            return domain("complementary modulus of k = 0 is 1");
        }
        Ok(Self {
            k: self.kprime,
            kprime: self.k,
        })
    }

    /// `K(k)`; see [`complete_k`].
    pub fn big_k(&self) -> Result<f64> {
        complete_k(*self)
    }

    /// `E(k)`.
    pub fn big_e(&self) -> f64 {
        complete_e_of(self.k, self.kprime)
    }

    /// `K(k')`, the complementary complete integral.
    pub fn big_k_prime(&self) -> Result<f64> {
        if self.kprime > K_CUTOFF {
            return domain(format!("K(k') diverges for k = {}", self.k));
        }
        Ok(FRAC_PI_2 / agm(1.0, self.k))
    }
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind.
///
/// Errors for `k > 1 - 1e-12`; the separatrix limit is handled by the closed
/// heteroclinic/homoclinic forms rather than by `k -> 1` orbits.
pub fn complete_k(m: EllipticModulus) -> Result<f64> {
    if m.k > K_CUTOFF {
        return domain(format!("K(k) diverges: k = {} exceeds cutoff {K_CUTOFF}", m.k));
    }
    Ok(FRAC_PI_2 / agm(1.0, m.kprime))
}

/// Complete elliptic integral of the second kind on the closed range `0 <= k <= 1`.
pub fn complete_e(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return domain(format!("E(k) requires 0 <= k <= 1, got {k}"));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    Ok(complete_e_of(k, ((1.0 - k) * (1.0 + k)).sqrt()))
}

fn complete_e_of(k: f64, kprime: f64) -> f64 {
    if k == 0.0 {
        return FRAC_PI_2;
    }
    if kprime == 0.0 {
        return 1.0;
    }
    // E/K = 1 - sum 2^(n-1) c_n^2 with c_0 = k.
    let mut a = 1.0;
    let mut b = kprime;
    let mut c = k;
    let mut pow = 0.5;
    let mut sum = pow * c * c;
    for _ in 0..AGM_MAX_ITER {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        c = 0.5 * (a - b);
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        pow *= 2.0;
        sum += pow * c * c;
    }
    FRAC_PI_2 / a * (1.0 - sum)
}

/// Jacobi elliptic functions `(sn u, cn u, dn u)` for modulus `k`.
pub fn jacobi_sn_cn_dn(u: f64, m: EllipticModulus) -> (f64, f64, f64) {
    let k = m.k;
    if k == 0.0 {
        let (s, c) = u.sin_cos();
        return (s, c, 1.0);
    }
    // Reduce to one real period so the Landen phase stays small.
    let u = match complete_k(m) {
        Ok(big_k) => {
            let period = 4.0 * big_k;
            let r = u - period * (u / period).round();
            r
        }
        Err(_) => u,
    };

    let mut a = [0.0f64; AGM_MAX_ITER + 1];
    let mut c = [0.0f64; AGM_MAX_ITER + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = m.kprime;
    let mut n = 0;
    while n < AGM_MAX_ITER && c[n].abs() > f64::EPSILON * a[n] {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }
    let mut phi = (2.0f64).powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (1.0 - k * k * sn * sn).max(0.0).sqrt();
    (sn, cn, dn)
}

/// `dK/dk = (E - k'^2 K) / (k k'^2)`.
pub fn dk_dk(m: EllipticModulus) -> Result<f64> {
    let k = m.k;
    if k == 0.0 {
        return Ok(0.0);
    }
    let kp2 = m.kprime * m.kprime;
    Ok((m.big_e() - kp2 * complete_k(m)?) / (k * kp2))
}

/// `dE/dk = (E - K) / k`.
pub fn de_dk(m: EllipticModulus) -> Result<f64> {
    let k = m.k;
    if k == 0.0 {
        return Ok(0.0);
    }
    Ok((m.big_e() - complete_k(m)?) / k)
}
