//! Colored Jones polynomial of the figure-eight knot via the Habiro–Le cyclotomic sum.

use crate::error::{arg, Result};
use crate::precision::{adaptive_eval, pi, BigComplex, EvalRequest, DEFAULT_INITIAL_PREC_BITS};

/// Relative tolerance used by [`eval_at_xi`].
pub const DEFAULT_TOL: f64 = 1e-30;

/// `log((3+√5)/2)`, the upper end of the deformation range.
pub const U_MAX: f64 = 0.962_423_650_119_206_9;

/// Deformation parameter `u` and color `N`; `ξ = u + 2πi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnotParam {
    pub u: f64,
    pub n: u32,
}

impl KnotParam {
    pub fn new(u: f64, n: u32) -> Result<Self> {
        if n == 0 {
            return arg("color N must be positive");
        }
        if !u.is_finite() {
            return arg(format!("u must be finite, got {u}"));
        }
        Ok(KnotParam { u, n })
    }

    pub fn xi(&self, prec: u32) -> BigComplex {
        xi(self.u, prec)
    }

    /// `q = exp(ξ/N)`.
    pub fn q(&self, prec: u32) -> BigComplex {
        (self.xi(prec) / self.n as f64).exp()
    }

    /// Whether `u` lies in the range where the asymptotic model applies.
    pub fn in_model_range(&self) -> bool {
        (0.0..U_MAX).contains(&self.u)
    }
}

/// `u + 2πi`.
pub fn xi(u: f64, prec: u32) -> BigComplex {
    BigComplex::from_floats(rug::Float::with_val(prec, u), pi(prec) * 2u32)
}

/// `Σ_{k=0}^{N−1} q^{−kN} Π_{l=1}^{k} (1−q^{N−l})(1−q^{N+l})` with running products.
pub fn colored_jones_fig8(n: u32, q: &BigComplex) -> Result<BigComplex> {
    if n == 0 {
        return arg("color N must be positive");
    }
    if q.is_zero() {
        return arg("q must be nonzero");
    }
    let prec = q.prec();
    let qinv = q.recip();
    let qn = q.powi(n as i32);
    let qn_inv = qn.recip();
    let mut minus = &qn * &qinv; // q^{N−l}
    let mut plus = &qn * q; // q^{N+l}
    let one = BigComplex::one(prec);
    let mut term = one.clone();
    let mut sum = one.clone();
    for _ in 1..n {
        term = &term * &qn_inv;
        term = &term * &(&one - &minus);
        term = &term * &(&one - &plus);
        sum = &sum + &term;
        minus = &minus * &qinv;
        plus = &plus * q;
    }
    Ok(sum)
}

/// `J_N(E; exp(ξ/N))` to [`DEFAULT_TOL`].
pub fn eval_at_xi(p: &KnotParam) -> Result<BigComplex> {
    let req = EvalRequest::for_color(DEFAULT_TOL, DEFAULT_INITIAL_PREC_BITS, p.n)?;
    eval_at_xi_with(p, &req)
}

pub fn eval_at_xi_with(p: &KnotParam, req: &EvalRequest) -> Result<BigComplex> {
    adaptive_eval(req, |prec| colored_jones_fig8(p.n, &p.q(prec)))
}

/// Kashaev invariant `J_N(E; e^{2πi/N})`.
pub fn kashaev(n: u32) -> Result<BigComplex> {
    eval_at_xi(&KnotParam::new(0.0, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_dist;

    #[test]
    fn small_colors() {
        let q = BigComplex::new(128, 0.7, -1.3);
        assert_eq!(colored_jones_fig8(1, &q).unwrap(), BigComplex::one(128));
        let two = BigComplex::from_real(128, 2.0);
        // 1 + q^{-2}(1-q)(1-q^3) = 1 + 7/4
        let v = colored_jones_fig8(2, &two).unwrap();
        assert_eq!(v.re_f64(), 2.75);
        assert!(colored_jones_fig8(0, &two).is_err());
        assert!(colored_jones_fig8(3, &BigComplex::zero(128)).is_err());
    }

    #[test]
    fn kashaev_small() {
        let k1 = kashaev(1).unwrap();
        assert!(rel_dist(&k1, &BigComplex::one(128)) < 1e-30);
        let k2 = kashaev(2).unwrap();
        assert!(rel_dist(&k2, &BigComplex::from_real(128, 5.0)) < 1e-30);
        let k3 = kashaev(3).unwrap();
        assert!(rel_dist(&k3, &BigComplex::from_real(128, 13.0)) < 1e-30);
        let k5 = kashaev(5).unwrap();
        assert!(k5.re_f64() > 5.0);
        assert!(k5.im_f64().abs() < 1e-30 * k5.abs_f64());
    }

    #[test]
    fn first_color_at_nonzero_u() {
        let v = eval_at_xi(&KnotParam::new(0.5, 1).unwrap()).unwrap();
        assert!(rel_dist(&v, &BigComplex::one(128)) < 1e-30);
    }

    #[test]
    fn param_validation() {
        assert!(KnotParam::new(0.5, 0).is_err());
        assert!(KnotParam::new(f64::NAN, 3).is_err());
        assert!(KnotParam::new(0.5, 3).unwrap().in_model_range());
        assert!(!KnotParam::new(1.2, 3).unwrap().in_model_range());
    }
}
