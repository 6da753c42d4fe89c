//! Complex dilogarithm `Li₂`, principal branch with the cut on `(1, ∞)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Complex, Float};

use crate::error::{domain, Result};
use crate::precision::{pi, BigComplex};

const GUARD_BITS: u32 = 24;

/// Which branch a value was computed on. Only the principal branch exists here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchNote {
    Principal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Li2Value {
    pub value: BigComplex,
    pub branch_note: BranchNote,
}

fn on_cut(z: &BigComplex) -> bool {
    z.im().is_zero() && *z.re() > 1
}

fn pi_sq_over_6(prec: u32) -> Float {
    let p = pi(prec);
    Float::with_val(prec, &p * &p) / 6u32
}

/// Principal dilogarithm `Li₂(z) = −∫₀^z log(1−x)/x dx`.
///
/// Rejects real `z > 1`; callers must pick a side of the cut themselves.
pub fn li2(z: &BigComplex) -> Result<BigComplex> {
    if on_cut(z) {
        return domain(format!("li2 argument {} lies on the branch cut (1, inf)", z.re_f64()));
    }
    let prec = z.prec();
    let wp = prec + GUARD_BITS;
    let zw = z.with_prec(wp);
    Ok(li2_unchecked(&zw).with_prec(prec))
}

/// [`li2`] wrapped with its branch tag.
pub fn li2_value(z: &BigComplex) -> Result<Li2Value> {
    Ok(Li2Value {
        value: li2(z)?,
        branch_note: BranchNote::Principal,
    })
}

/// `−π²/6 − ½ log²(−z) − Li₂(1/z)`, the inversion identity.
pub fn li2_inverted(z: &BigComplex) -> Result<BigComplex> {
    if z.im().is_zero() && !z.re().is_sign_negative() {
        return domain("li2_inverted requires z outside [0, inf)");
    }
    let prec = z.prec();
    let wp = prec + GUARD_BITS;
    let zw = z.with_prec(wp);
    Ok(inversion(&zw).with_prec(prec))
}

fn inversion(z: &BigComplex) -> BigComplex {
    let wp = z.prec();
    let l = (-z).ln();
    let inner = li2_unchecked(&z.recip());
    let c = BigComplex::from_float(-pi_sq_over_6(wp));
    c - l.square() * 0.5 - inner
}

fn li2_unchecked(z: &BigComplex) -> BigComplex {
    let wp = z.prec();
    if z.is_zero() {
        return BigComplex::zero(wp);
    }
    let az = z.abs();
    if az > 1 {
        return inversion(z);
    }
    if az <= 0.5 {
        return series(z);
    }
    let one_minus = BigComplex::one(wp) - z;
    if one_minus.is_zero() {
        return BigComplex::from_float(pi_sq_over_6(wp));
    }
    if one_minus.abs() <= 0.5 {
        // reflection: π²/6 − log z · log(1−z) − Li₂(1−z)
        let c = BigComplex::from_float(pi_sq_over_6(wp));
        return c - z.ln() * one_minus.ln() - series(&one_minus);
    }
    bernoulli(z)
}

/// `Σ zᵏ/k²`, for `|z| ≤ 1/2`.
fn series(z: &BigComplex) -> BigComplex {
    let wp = z.prec();
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32) - 4));
    let mut zk = z.clone();
    let mut sum = z.clone();
    let mut k: u32 = 1;
    loop {
        k += 1;
        zk = &zk * z;
        let kk = Float::with_val(wp, k) * k;
        let term = BigComplex::from_complex(Complex::with_val(wp, zk.as_complex() / &kk));
        sum = &sum + &term;
        if zk.abs() <= eps || k > 100_000 {
            break;
        }
    }
    sum
}

/// `B_{2k}/(2k+1)!` for `k = 1, 2, …`, cached per precision.
fn bernoulli_coeffs(wp: u32, count: usize) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&wp) {
        if v.len() >= count {
            return Arc::clone(v);
        }
    }
    let two_pi = pi(wp) * 2u32;
    let two_pi_sq = Float::with_val(wp, &two_pi * &two_pi);
    let mut pow = Float::with_val(wp, 1);
    let mut out = Vec::with_capacity(count);
    for k in 1..=count as u32 {
        pow *= &two_pi_sq;
        let zeta = Float::with_val(wp, Float::zeta_u(2 * k));
        let mut c = zeta * 2u32 / (2 * k + 1) / &pow;
        if k % 2 == 0 {
            c = -c;
        }
        out.push(c);
    }
    let arc = Arc::new(out);
    cache.lock().unwrap().insert(wp, Arc::clone(&arc));
    arc
}

/// `Σ Bₙ wⁿ⁺¹/(n+1)!` with `w = −log(1−z)`; used on the ring around `|z| = 1`
/// away from `z = 1`, where `|w| < 1.8`.
fn bernoulli(z: &BigComplex) -> BigComplex {
    let wp = z.prec();
    let w = -(BigComplex::one(wp) - z).ln();
    let w2 = w.square();
    let ratio = (w.abs_f64() / (2.0 * std::f64::consts::PI)).max(1e-3);
    let count = ((wp as f64 + 8.0) * std::f64::consts::LN_2 / (-2.0 * ratio.ln())).ceil() as usize + 2;
    let coeffs = bernoulli_coeffs(wp, count);
    let mut sum = &w - &(&w2 * 0.25);
    let mut wk = w.clone();
    for c in coeffs.iter().take(count) {
        wk = &wk * &w2;
        sum = &sum + &wk.scale_float(c);
    }
    sum
}
