//! Closed-form geometry attached to the deformation parameter `u`.

mod potential;
mod rep;
mod torus;

pub use potential::{in_phi_strip, potential, potential_d1, potential_d2};
pub use rep::{cs_invariant, rep_data, torsion_lambda, torsion_lambda_from_trace, torsion_mu, Mat2, RepData, RepSign};
pub use torus::{torus_s_k, torus_t_k};

use rug::Float;

use crate::cjones::{xi, U_MAX};
use crate::dilog::li2;
use crate::error::{domain, Result};
use crate::precision::{pi, BigComplex};

/// `log((3+√5)/2) = arccosh(3/2)` at the given precision.
pub fn u_max(prec: u32) -> Float {
    Float::with_val(prec, 1.5).acosh()
}

fn check_closed(u: f64) -> Result<()> {
    if !(0.0..=U_MAX + 1e-15).contains(&u) {
        return domain(format!("u = {u} outside [0, log((3+sqrt5)/2)]"));
    }
    Ok(())
}

fn check_open(u: f64) -> Result<()> {
    if !(u > 0.0 && u < U_MAX) {
        return domain(format!("u = {u} outside (0, log((3+sqrt5)/2))"));
    }
    Ok(())
}

/// `e^u + e^{−u}`.
fn trace_c(u: f64, prec: u32) -> Float {
    let uf = Float::with_val(prec, u);
    Float::with_val(prec, uf.cosh_ref()) * 2u32
}

/// `√((c+1)(c−3))` with `c = e^u + e^{−u}`, taken on the positive imaginary axis.
pub fn sqrt_disc(u: f64, prec: u32) -> BigComplex {
    let c = trace_c(u, prec);
    let neg_p = Float::with_val(prec, &c + 1u32) * Float::with_val(prec, 3u32 - &c);
    let neg_p = if neg_p.is_sign_negative() { Float::new(prec) } else { neg_p };
    BigComplex::from_floats(Float::new(prec), neg_p.sqrt())
}

/// `φ(u) = log((c − 1 − √((c+1)(c−3)))/2)`, the root of `cosh φ = cosh u − 1/2`
/// with `−π/3 ≤ Im φ ≤ 0`.
pub fn phi_of_u(u: f64, prec: u32) -> Result<BigComplex> {
    check_closed(u)?;
    let c = BigComplex::from_float(trace_c(u, prec));
    let root = sqrt_disc(u, prec);
    let phi = ((c - 1.0 - root) * 0.5).ln();
    let im = phi.im_f64();
    if !(-std::f64::consts::FRAC_PI_3 - 1e-12..=0.0).contains(&im) {
        return domain(format!("phi({u}) left its branch: Im = {}", phi.im_f64()));
    }
    Ok(phi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleData {
    pub u: f64,
    pub phi_u: BigComplex,
    pub phi_tilde: BigComplex,
    pub w0: BigComplex,
    pub phi_dd_at_w0: BigComplex,
}

/// `w₀ = (φ(u) + 2πi)/ξ` and `Φ''(w₀) = ξ·√((c+1)(c−3))`.
pub fn saddle_point(u: f64, prec: u32) -> Result<SaddleData> {
    let phi_u = phi_of_u(u, prec)?;
    let phi_tilde = &phi_u + &BigComplex::two_pi_i(prec);
    let x = xi(u, prec);
    let w0 = &phi_tilde / &x;
    let phi_dd_at_w0 = &x * &sqrt_disc(u, prec);
    Ok(SaddleData {
        u,
        phi_u,
        phi_tilde,
        w0,
        phi_dd_at_w0,
    })
}

/// `S(u) = Li₂(e^{u−φ}) − Li₂(e^{u+φ}) − uφ`.
pub fn s_of_u(u: f64, prec: u32) -> Result<BigComplex> {
    let phi = phi_of_u(u, prec)?;
    let uc = BigComplex::from_real(prec, u);
    let a = li2(&(&uc - &phi).exp())?;
    let b = li2(&(&uc + &phi).exp())?;
    Ok(a - b - phi.scale(u))
}

/// `T(u) = 2/√((c+1)(c−3))`.
pub fn t_of_u(u: f64, prec: u32) -> Result<BigComplex> {
    check_closed(u)?;
    let r = sqrt_disc(u, prec);
    if r.is_zero() {
        return domain("T(u) is singular at u = log((3+sqrt5)/2)");
    }
    Ok(BigComplex::from_real(prec, 2.0) / r)
}

/// `ξ·Φ(w₀)` from its closed form `S(u) − 2πiu`.
pub fn xi_phi_w0(u: f64, prec: u32) -> Result<BigComplex> {
    let s = s_of_u(u, prec)?;
    Ok(s - BigComplex::two_pi_i(prec).scale(u))
}

/// `Im(ξΦ(w₀)) = 2 Im Li₂(e^{−u−φ}) + u Im φ`; stays off the cut on the whole
/// closed interval, including `u = log((3+√5)/2)`.
pub fn im_xi_phi_w0(u: f64, prec: u32) -> Result<Float> {
    let phi = phi_of_u(u, prec)?;
    let arg = (-(&BigComplex::from_real(prec, u) + &phi)).exp();
    let l = li2(&arg)?;
    Ok(Float::with_val(prec, l.im() * 2u32) + Float::with_val(prec, phi.im() * u))
}

/// `d/du Im(ξΦ(w₀)) = 2 arg(1 − e^{−u−φ}) + Im φ`.
pub fn im_xi_phi_w0_derivative(u: f64, prec: u32) -> Result<Float> {
    let phi = phi_of_u(u, prec)?;
    let e = (-(&BigComplex::from_real(prec, u) + &phi)).exp();
    let a = (BigComplex::one(prec) - e).arg();
    Ok(a * 2u32 + phi.im())
}

/// `Vol(E) = 2 Im Li₂(e^{iπ/3})`.
pub fn volume(prec: u32) -> Float {
    let z = BigComplex::from_floats(Float::new(prec), pi(prec) / 3u32).exp();
    let l = li2(&z).expect("e^{i pi/3} is off the cut");
    Float::with_val(prec, l.im() * 2u32)
}

/// Right-hand side data of the asymptotic expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticModel {
    pub u: f64,
    pub s_u: BigComplex,
    pub t_u: BigComplex,
    /// Root of `−Φ''(w₀)` in the fourth quadrant.
    pub sqrt_neg_phidd: BigComplex,
}

impl AsymptoticModel {
    pub fn new(u: f64, prec: u32) -> Result<Self> {
        let sd = saddle_point(u, prec)?;
        Ok(AsymptoticModel {
            u,
            s_u: s_of_u(u, prec)?,
            t_u: t_of_u(u, prec)?,
            sqrt_neg_phidd: (-&sd.phi_dd_at_w0).sqrt(),
        })
    }

    fn prec(&self) -> u32 {
        self.s_u.prec()
    }

    fn two_sinh_half_u(&self) -> Result<BigComplex> {
        check_open(self.u)?;
        Ok(BigComplex::from_real(self.prec(), self.u / 2.0).sinh() * 2.0)
    }

    /// `√(2πN) exp(N S(u)/ξ) / (2 sinh(u/2) √(−Φ''(w₀)))`.
    pub fn predicted(&self, n: u32) -> Result<BigComplex> {
        let prec = self.prec();
        let x = xi(self.u, prec);
        let nn = n as f64;
        let two_pi_n = BigComplex::from_float(pi(prec) * 2u32 * n).sqrt();
        let growth = (self.s_u.scale(nn) / &x).exp();
        Ok(two_pi_n * growth / (self.two_sinh_half_u()? * &self.sqrt_neg_phidd))
    }

    /// The same quantity written as `√(−π)/(2 sinh(u/2)) · T^{1/2} (N/ξ)^{1/2} exp((N/ξ) S)`
    /// with principal square roots.
    pub fn predicted_literal(&self, n: u32) -> Result<BigComplex> {
        let prec = self.prec();
        let x = xi(self.u, prec);
        let n_over_xi = BigComplex::from_real(prec, n as f64) / &x;
        let sqrt_neg_pi = BigComplex::from_float(-pi(prec)).sqrt();
        let growth = (&n_over_xi * &self.s_u).exp();
        Ok(sqrt_neg_pi / self.two_sinh_half_u()? * self.t_u.sqrt() * n_over_xi.sqrt() * growth)
    }
}

/// `3^{−1/4} N^{3/2} exp(N Vol(E)/2π)`, the `u = 0` specialization.
pub fn ah_predicted(n: u32, prec: u32) -> BigComplex {
    let nf = Float::with_val(prec, n);
    let vol = volume(prec);
    let growth = Float::with_val(prec, &nf * &vol) / (pi(prec) * 2u32);
    let three = Float::with_val(prec, 3);
    let quarter = Float::with_val(prec, -0.25);
    let pre = Float::with_val(prec, rug::ops::Pow::pow(&three, &quarter));
    let n32 = Float::with_val(prec, rug::ops::Pow::pow(&nf, 1.5f64));
    BigComplex::from_float(pre * n32 * growth.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_dist;

    const P: u32 = 256;

    #[test]
    fn phi_endpoints() {
        let p0 = phi_of_u(0.0, P).unwrap();
        let want = BigComplex::from_floats(Float::new(P), -pi(P) / 3u32);
        assert!(rel_dist(&p0, &want) < 1e-70);
        let pm = phi_of_u(U_MAX, P).unwrap();
        assert!(pm.abs_f64() < 1e-7);
        assert!(phi_of_u(-0.1, P).is_err());
        assert!(phi_of_u(1.0, P).is_err());
    }

    #[test]
    fn phi_solves_cosh_equation() {
        for u in [0.1, 0.5, 0.9] {
            let phi = phi_of_u(u, P).unwrap();
            let lhs = phi.cosh();
            let rhs = BigComplex::from_real(P, u).cosh() - 0.5;
            assert!(rel_dist(&lhs, &rhs) < 1e-70);
            assert!(phi.re_f64().abs() < 1e-70);
        }
    }

    #[test]
    fn saddle_at_zero_is_five_sixths() {
        let sd = saddle_point(0.0, P).unwrap();
        assert!(rel_dist(&sd.w0, &BigComplex::from_real(P, 5.0 / 6.0)) < 1e-15);
        let exact = BigComplex::from_float(Float::with_val(P, 5) / 6u32);
        assert!(rel_dist(&sd.w0, &exact) < 1e-70);
        // −2π√3
        let want = BigComplex::from_float(-(pi(P) * 2u32) * Float::with_val(P, 3).sqrt());
        assert!(rel_dist(&sd.phi_dd_at_w0, &want) < 1e-70);
    }

    #[test]
    fn saddle_at_upper_end() {
        let sd = saddle_point(U_MAX, P).unwrap();
        let want = BigComplex::two_pi_i(P) / xi(U_MAX, P);
        assert!(rel_dist(&sd.w0, &want) < 1e-7);
    }

    #[test]
    fn s_and_t_at_zero() {
        let s = s_of_u(0.0, P).unwrap();
        assert!(s.re_f64().abs() < 1e-70);
        assert!((s.im_f64() - 2.02988).abs() < 1e-5);
        assert!(rel_dist(&s, &BigComplex::from_floats(Float::new(P), volume(P))) < 1e-70);
        let t = t_of_u(0.0, P).unwrap();
        let want = BigComplex::from_floats(Float::new(P), -(Float::with_val(P, 2) / Float::with_val(P, 3).sqrt()));
        assert!(rel_dist(&t, &want) < 1e-70);
    }

    #[test]
    fn volume_constant() {
        let v = volume(P);
        assert!((v.to_f64() - 2.029883212819307).abs() < 1e-14);
    }

    #[test]
    fn imaginary_part_forms_agree() {
        for u in [0.0, 0.2, 0.5, 0.8] {
            let a = xi_phi_w0(u, P).unwrap();
            let b = im_xi_phi_w0(u, P).unwrap();
            assert!(Float::with_val(P, a.im() - &b).to_f64().abs() < 1e-70);
            assert!(a.re_f64().abs() < 1e-70);
        }
        assert!(im_xi_phi_w0(U_MAX, P).unwrap().to_f64().abs() < 1e-7);
    }

    #[test]
    fn fourth_quadrant_root() {
        let m = AsymptoticModel::new(0.5, P).unwrap();
        assert!(m.sqrt_neg_phidd.re_f64() > 0.0 && m.sqrt_neg_phidd.im_f64() < 0.0);
        let lit = m.predicted_literal(100).unwrap();
        let main = m.predicted(100).unwrap();
        assert!(rel_dist(&lit, &main) < 1e-60);
    }
}
