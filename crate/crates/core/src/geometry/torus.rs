use rug::Float;

use crate::error::{arg, Result};
use crate::precision::{pi, BigComplex};

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn check(a: u32, b: u32, k: u32) -> Result<()> {
    if a < 2 || b < 2 {
        return arg(format!("torus knot parameters must be at least 2, got ({a}, {b})"));
    }
    if gcd(a, b) != 1 {
        return arg(format!("gcd({a}, {b}) != 1"));
    }
    if k == 0 || k >= a * b {
        return arg(format!("k = {k} outside 1..{}", a * b - 1));
    }
    Ok(())
}

/// `−(2kπi − ab(2πi + u))²/(4ab)`.
pub fn torus_s_k(a: u32, b: u32, k: u32, u: &BigComplex) -> Result<BigComplex> {
    check(a, b, k)?;
    let prec = u.prec();
    let ab = (a * b) as f64;
    let two_pi_i = BigComplex::two_pi_i(prec);
    let inner = two_pi_i.scale(k as f64) - (two_pi_i + u).scale(ab);
    Ok(-inner.square() / (4.0 * ab))
}

/// `16 sin²(kπ/a) sin²(kπ/b)/(ab)`; exactly zero when `a` or `b` divides `k`.
pub fn torus_t_k(a: u32, b: u32, k: u32, prec: u32) -> Result<Float> {
    check(a, b, k)?;
    if k.is_multiple_of(a) || k.is_multiple_of(b) {
        return Ok(Float::new(prec));
    }
    let p = pi(prec);
    let sa = Float::with_val(prec, &p * k) / a;
    let sb = Float::with_val(prec, &p * k) / b;
    let sa = sa.sin().square();
    let sb = sb.sin().square();
    Ok(sa * sb * 16u32 / (a * b))
}
