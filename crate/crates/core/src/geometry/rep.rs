use rug::Float;

use super::{check_open, s_of_u, sqrt_disc};
use crate::error::Result;
use crate::precision::BigComplex;

/// 2×2 complex matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2(pub [[BigComplex; 2]; 2]);

impl Mat2 {
    pub fn new(a: BigComplex, b: BigComplex, c: BigComplex, d: BigComplex) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let m = &self.0;
        let n = &o.0;
        Mat2::new(
            &m[0][0] * &n[0][0] + &m[0][1] * &n[1][0],
            &m[0][0] * &n[0][1] + &m[0][1] * &n[1][1],
            &m[1][0] * &n[0][0] + &m[1][1] * &n[1][0],
            &m[1][0] * &n[0][1] + &m[1][1] * &n[1][1],
        )
    }

    pub fn det(&self) -> BigComplex {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> BigComplex {
        &self.0[0][0] + &self.0[1][1]
    }

    /// Inverse assuming unit determinant.
    pub fn inv_sl2(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[1][1].clone(), -&m[0][1], -&m[1][0], m[0][0].clone())
    }

    /// Largest entrywise modulus of `self − o`.
    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((&self.0[i][j] - &o.0[i][j]).abs_f64());
            }
        }
        worst
    }
}

/// Which root enters the Riley parameter `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RepSign {
    #[default]
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepData {
    pub m: BigComplex,
    pub d: BigComplex,
    pub rho_x: Mat2,
    pub rho_y: Mat2,
    /// Upper-left entry of `ρ(λ)`: `ℓ(m)` for [`RepSign::Plus`], `ℓ(m)⁻¹` otherwise.
    pub ell: BigComplex,
    /// `2 log ell`.
    pub v: BigComplex,
    /// `v/i`.
    pub cone_angle: Float,
}

impl RepData {
    /// `ρ(x)ρ(y)⁻¹ρ(x)⁻¹ρ(y)ρ(x)` and `ρ(y)ρ(x)ρ(y)⁻¹ρ(x)⁻¹ρ(y)`.
    pub fn relation_sides(&self) -> (Mat2, Mat2) {
        let (x, y) = (&self.rho_x, &self.rho_y);
        let (xi, yi) = (x.inv_sl2(), y.inv_sl2());
        let lhs = x.mul(&yi).mul(&xi).mul(y).mul(x);
        let rhs = y.mul(x).mul(&yi).mul(&xi).mul(y);
        (lhs, rhs)
    }

    pub fn relation_residual(&self) -> f64 {
        let (l, r) = self.relation_sides();
        l.max_abs_diff(&r)
    }

    /// `ρ(λ)` for the longitude word `x y⁻¹ x y x⁻² y x y⁻¹ x⁻¹`.
    pub fn longitude(&self) -> Mat2 {
        let (x, y) = (&self.rho_x, &self.rho_y);
        let (xi, yi) = (x.inv_sl2(), y.inv_sl2());
        x.mul(&yi)
            .mul(x)
            .mul(y)
            .mul(&xi)
            .mul(&xi)
            .mul(y)
            .mul(x)
            .mul(&yi)
            .mul(&xi)
    }
}

fn ell_of_m(m: &BigComplex, root: &BigComplex) -> BigComplex {
    let mi = m.recip();
    let a = m.square() - m - 2.0 - &mi + mi.square();
    let b = m - &mi;
    (a + b * root) * 0.5
}

/// Riley representation at `m = e^u`.
pub fn rep_data(u: f64, sign: RepSign, prec: u32) -> Result<RepData> {
    check_open(u)?;
    let m = BigComplex::from_real(prec, u).exp();
    let mi = m.recip();
    let c = &m + &mi;
    let root = sqrt_disc(u, prec);
    let d = match sign {
        RepSign::Plus => (&c - 3.0 + &root) * 0.5,
        RepSign::Minus => (&c - 3.0 - &root) * 0.5,
    };
    let sm = m.sqrt();
    let smi = sm.recip();
    let zero = BigComplex::zero(prec);
    let rho_x = Mat2::new(sm.clone(), BigComplex::one(prec), zero.clone(), smi.clone());
    let rho_y = Mat2::new(sm, zero, -&d, smi);
    let l = ell_of_m(&m, &root);
    let ell = match sign {
        RepSign::Plus => l,
        RepSign::Minus => l.recip(),
    };
    let v = ell.ln() * 2.0;
    let cone_angle = v.im().clone();
    Ok(RepData {
        m,
        d,
        rho_x,
        rho_y,
        ell,
        v,
        cone_angle,
    })
}

/// `1/(2m + 2m⁻¹ − 1)`.
pub fn torsion_lambda(u: f64, prec: u32) -> Result<BigComplex> {
    check_open(u)?;
    let m = BigComplex::from_real(prec, u).exp();
    let den = (&m + &m.recip()) * 2.0 - 1.0;
    Ok(den.recip())
}

/// `1/√(17 + 4 Tr ρ(λ))` with the trace read off the longitude word.
pub fn torsion_lambda_from_trace(rep: &RepData) -> BigComplex {
    let tr = rep.longitude().trace();
    (tr * 4.0 + 17.0).sqrt().recip()
}

/// `(∂v/∂u) · T_λ` with `∂v/∂u = 2mℓ'(m)/ℓ(m)` on the geometric branch.
pub fn torsion_mu(u: f64, prec: u32) -> Result<BigComplex> {
    check_open(u)?;
    let m = BigComplex::from_real(prec, u).exp();
    let mi = m.recip();
    let mi2 = mi.square();
    let c = &m + &mi;
    let root = sqrt_disc(u, prec);
    // ℓ = (A + B R)/2
    let da = m.scale(2.0) - 1.0 + &mi2 - (&mi2 * &mi).scale(2.0);
    let b = &m - &mi;
    let db = &mi2 + 1.0;
    let dp = (c.scale(2.0) - 2.0) * (BigComplex::one(prec) - &mi2);
    let dr = dp / root.scale(2.0);
    let dl = (da + &db * &root + &b * &dr) * 0.5;
    let l = ell_of_m(&m, &root);
    let dv = (m * dl / l).scale(2.0);
    Ok(dv * torsion_lambda(u, prec)?)
}

/// `CS_u(E) = S(u) − πiu − uv/4` with `v` from the geometric branch.
pub fn cs_invariant(u: f64, prec: u32) -> Result<BigComplex> {
    let rep = rep_data(u, RepSign::Plus, prec)?;
    let s = s_of_u(u, prec)?;
    let pi_iu = BigComplex::two_pi_i(prec).scale(u / 2.0);
    Ok(s - pi_iu - rep.v.scale(u / 4.0))
}
