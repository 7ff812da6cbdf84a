//! Spherical Bessel functions `j_l` and associated Legendre functions `P_l^n`
//! for orders up to 8.
//!
//! Sign convention for `P_l^n`: the Ferrers definition including the
//! `(-1)^n` factor, i.e. `P_1^1(u) = -sqrt(1-u^2)` and
//! `P_2^1(u) = -3 u sqrt(1-u^2)`. Negative `n` follows
//! `P_l^{-n} = (-1)^n (l-n)!/(l+n)! P_l^n`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest supported order for both function families.
pub const MAX_ORDER: u32 = 8;

/// Spherical Bessel function of the first kind, `j_l(x)`.
///
/// `j_0(x) = sin(x)/x` with `j_0(0) = 1` by continuity; higher orders by a
/// normalized downward recurrence. Accurate to ~1e-10 relative on |x| <= 100.
pub fn spherical_bessel<T: Real>(l: u32, x: T) -> Result<T> {
    if l > MAX_ORDER {
        return Err(Error::rejected(format!(
            "spherical Bessel order {l} exceeds supported maximum {MAX_ORDER}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::rejected(format!(
            "spherical Bessel argument must be finite, got {x}"
        )));
    }
    // Parity: j_l(-x) = (-1)^l j_l(x).
    let sign = if x < T::zero() && l % 2 == 1 {
        -T::one()
    } else {
        T::one()
    };
    let ax = x.abs();
    Ok(sign * sj_abs(l, ax))
}

fn sj_abs<T: Real>(l: u32, x: T) -> T {
    debug_assert!(x >= T::zero());
    if x < T::of(0.5) {
        return sj_series(l, x);
    }
    let j0 = x.sin() / x;
    if l == 0 {
        return j0;
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if l == 1 {
        return j1;
    }
    if x >= T::of(l as f64) {
        // Oscillatory regime: upward recurrence is forward stable.
        let mut fm = j0;
        let mut fc = j1;
        for k in 1..l {
            let fp = T::of_count(2 * k as usize + 1) / x * fc - fm;
            fm = fc;
            fc = fp;
        }
        return fc;
    }
    // Decay regime (x < l): downward (Miller) recurrence from well above
    // the turning point, normalized against whichever of j0, j1 is better
    // conditioned.
    let start = l + 24;
    let mut fp = T::zero(); // f_{k+1}
    let mut fc = T::one(); // f_k
    let mut f_l = T::zero();
    let mut f1 = T::zero();
    let mut f0 = T::zero();
    for k in (0..=start).rev() {
        // f_{k-1} = (2k+1)/x f_k - f_{k+1}
        let fm = T::of_count(2 * k as usize + 1) / x * fc - fp;
        if k == l {
            f_l = fc;
        }
        if k == 1 {
            f1 = fc;
        }
        if k == 0 {
            f0 = fc;
        }
        fp = fc;
        fc = fm;
    }
    let scale = if j0.abs() >= j1.abs() {
        j0 / f0
    } else {
        j1 / f1
    };
    f_l * scale
}

/// Power series around 0; used only for small arguments where it converges
/// in a handful of terms with no cancellation.
fn sj_series<T: Real>(l: u32, x: T) -> T {
    if x == T::zero() {
        return if l == 0 { T::one() } else { T::zero() };
    }
    // t_0 = x^l / (2l+1)!!, t_{s+1} = t_s * (-x^2/2) / ((s+1)(2l+2s+3))
    let mut term = x.powi(l as i32) / T::of(double_factorial(2 * l + 1));
    let mut sum = term;
    let half_mx2 = -(x * x) / T::of(2.0);
    let mut s = 0u32;
    loop {
        term = term * half_mx2 / (T::of_count(s as usize + 1) * T::of_count((2 * l + 2 * s + 3) as usize));
        let next = sum + term;
        if next == sum || s > 64 {
            return next;
        }
        sum = next;
        s += 1;
    }
}

fn double_factorial(n: u32) -> f64 {
    let mut acc = 1.0f64;
    let mut k = n as i64;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

/// Associated Legendre function `P_l^n(u)` (Ferrers convention, see module
/// docs) for `|n| <= l <= 8` and `u` in `[-1, 1]`.
pub fn assoc_legendre<T: Real>(l: u32, n: i32, u: T) -> Result<T> {
    if l > MAX_ORDER {
        return Err(Error::rejected(format!(
            "Legendre degree {l} exceeds supported maximum {MAX_ORDER}"
        )));
    }
    if n.unsigned_abs() > l {
        return Err(Error::rejected(format!(
            "Legendre order |{n}| exceeds degree {l}"
        )));
    }
    if !(u.is_finite() && u.abs() <= T::one()) {
        return Err(Error::rejected(format!(
            "Legendre argument must satisfy |u| <= 1, got {u}"
        )));
    }
    if n < 0 {
        let m = (-n) as u32;
        // P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m
        let ratio = T::of(factorial(l - m) / factorial(l + m));
        let sign = if m % 2 == 1 { -T::one() } else { T::one() };
        return Ok(sign * ratio * plm(l, m, u));
    }
    Ok(plm(l, n as u32, u))
}

fn plm<T: Real>(l: u32, m: u32, u: T) -> T {
    // P_m^m = (-1)^m (2m-1)!! (1-u^2)^{m/2}
    let mut pmm = T::one();
    if m > 0 {
        let s2 = (T::one() - u) * (T::one() + u);
        let somx = s2.sqrt();
        pmm = T::of(double_factorial(2 * m - 1)) * somx.powi(m as i32);
        if m % 2 == 1 {
            pmm = -pmm;
        }
    }
    if l == m {
        return pmm;
    }
    // P_{m+1}^m = u (2m+1) P_m^m
    let mut pm1 = u * T::of_count(2 * m as usize + 1) * pmm;
    if l == m + 1 {
        return pm1;
    }
    // (l-m) P_l^m = u (2l-1) P_{l-1}^m - (l+m-1) P_{l-2}^m
    let mut pl = T::zero();
    for ll in (m + 2)..=l {
        pl = (u * T::of_count(2 * ll as usize - 1) * pm1
            - T::of_count((ll + m - 1) as usize) * pmm)
            / T::of_count((ll - m) as usize);
        pmm = pm1;
        pm1 = pl;
    }
    pl
}
