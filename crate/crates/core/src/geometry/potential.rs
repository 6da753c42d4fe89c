use crate::cjones::xi;
use crate::dilog::li2;
use crate::error::{domain, Result};
use crate::precision::{pi, BigComplex};

/// Whether `0 < Im(ξw) < 2π`, the strip on which `Φ` is analytic.
pub fn in_phi_strip(w: &BigComplex, u: f64) -> bool {
    let t = (xi(u, w.prec()) * w).im_f64();
    t > 0.0 && t < 2.0 * std::f64::consts::PI
}

fn check(w: &BigComplex, u: f64) -> Result<(BigComplex, BigComplex, BigComplex)> {
    let prec = w.prec();
    let x = xi(u, prec);
    let xw = &x * w;
    let two_pi = pi(prec) * 2u32;
    if !(xw.im().is_sign_positive() && !xw.im().is_zero() && *xw.im() < two_pi) {
        return domain(format!("w = ({}, {}) outside the strip of Phi at u = {u}", w.re_f64(), w.im_f64()));
    }
    let uc = BigComplex::from_real(prec, u);
    let a = (&uc - &xw).exp();
    let b = (&uc + &xw).exp();
    Ok((x, a, b))
}

/// `Φ(w) = (Li₂(e^{u−ξw}) − Li₂(e^{u+ξw}))/ξ − uw`.
pub fn potential(w: &BigComplex, u: f64) -> Result<BigComplex> {
    let (x, a, b) = check(w, u)?;
    Ok((li2(&a)? - li2(&b)?) / x - w.scale(u))
}

/// `Φ'(w) = log(1−e^{u−ξw}) + log(1−e^{u+ξw}) − u`.
pub fn potential_d1(w: &BigComplex, u: f64) -> Result<BigComplex> {
    let (_, a, b) = check(w, u)?;
    let prec = w.prec();
    let one = BigComplex::one(prec);
    Ok((&one - &a).ln() + (&one - &b).ln() - u)
}

/// `Φ''(w) = ξ (X/(1−X) − Y/(1−Y))` with `X = e^{u−ξw}`, `Y = e^{u+ξw}`.
pub fn potential_d2(w: &BigComplex, u: f64) -> Result<BigComplex> {
    let (x, a, b) = check(w, u)?;
    let prec = w.prec();
    let one = BigComplex::one(prec);
    let ta = &a / &(&one - &a);
    let tb = &b / &(&one - &b);
    Ok(x * (ta - tb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{saddle_point, sqrt_disc, volume, xi_phi_w0};
    use crate::precision::rel_dist;
    use rug::Float;

    const P: u32 = 256;

    #[test]
    fn value_at_half_for_zero_u() {
        let v = potential(&BigComplex::from_real(P, 0.5), 0.0).unwrap();
        assert!(v.abs_f64() < 1e-70);
    }

    #[test]
    fn value_at_saddle_for_zero_u() {
        let w0 = BigComplex::from_float(Float::with_val(P, 5) / 6u32);
        let v = potential(&w0, 0.0).unwrap();
        let want = BigComplex::from_float(volume(P) / (pi(P) * 2u32));
        assert!(rel_dist(&v, &want) < 1e-70);
        assert!((v.re_f64() - 0.32306).abs() < 1e-5);
    }

    #[test]
    fn saddle_value_matches_closed_form() {
        for u in [0.3, 0.5, 0.8] {
            let sd = saddle_point(u, P).unwrap();
            let direct = xi(u, P) * potential(&sd.w0, u).unwrap();
            let closed = xi_phi_w0(u, P).unwrap();
            assert!(rel_dist(&direct, &closed) < 1e-70);
        }
    }

    #[test]
    fn derivatives_at_saddle() {
        for u in [0.0, 0.4, 0.7] {
            let sd = saddle_point(u, P).unwrap();
            assert!(potential_d1(&sd.w0, u).unwrap().abs_f64() < 1e-70);
            let d2 = potential_d2(&sd.w0, u).unwrap();
            assert!(rel_dist(&d2, &(xi(u, P) * sqrt_disc(u, P))) < 1e-70);
        }
    }

    #[test]
    fn outside_strip_is_rejected() {
        assert!(potential(&BigComplex::from_real(P, 1.2), 0.0).is_err());
        assert!(potential(&BigComplex::from_real(P, 0.0), 0.0).is_err());
        assert!(potential_d1(&BigComplex::new(P, 1.0, 0.5), 0.5).is_err());
        assert!(in_phi_strip(&BigComplex::new(P, 0.4, -0.05), 0.5));
    }
}
