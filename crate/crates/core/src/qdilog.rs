//! Faddeev's quantum dilogarithm `S_γ(z)`, the remainder `I_γ(z)`, and `g_N(w)`.
//!
//! Two quadratures are available. [`Method::Contour`] integrates over
//! `C_R = (−∞, −R] ∪ Ω_R ∪ [R, ∞)` with adaptive Gauss–Legendre panels on the two
//! truncated tails and on the semicircle. [`Method::Line`] moves the contour to the
//! horizontal line `Im t = c` between the pole at `0` and the poles at `i` and
//! `πi/γ`, where the trapezoidal rule converges exponentially; node weights are
//! cached per `γ` and exponentials are advanced by recurrence.

use std::collections::HashMap;
use std::f64::consts::{LN_10, PI};
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use crate::cjones::KnotParam;
use crate::dilog::li2;
use crate::error::{arg, domain, Error, Result};
use crate::geometry::potential;
use crate::precision::{pi, BigComplex};
use crate::quad::{integrate, QuadOptions};

const GUARD_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Contour,
    Line,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kernel {
    /// `1/(t sinh πt sinh γt)`
    S,
    /// `(1/sinh γt − 1/(γt))/(t sinh πt)`
    I,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QDilogParams {
    pub gamma: BigComplex,
    /// Semicircle radius, `0 < R < min(π/|γ|, 1)`.
    pub r: f64,
    /// Fixed tail cutoff; `None` derives it from the decay rate at each `z`.
    pub tail_cutoff: Option<f64>,
    pub quad_tol: f64,
    pub method: Method,
}

impl QDilogParams {
    pub fn new(gamma: BigComplex) -> Result<Self> {
        if gamma.re().is_sign_negative() || gamma.re().is_zero() {
            return arg(format!("Re gamma must be positive, got {}", gamma.re_f64()));
        }
        let r = (PI / gamma.abs_f64()).min(1.0) / 2.0;
        Ok(QDilogParams {
            gamma,
            r,
            tail_cutoff: None,
            quad_tol: 1e-20,
            method: Method::default(),
        })
    }

    /// `γ = (2π − iu)/(2N)`.
    pub fn for_knot(p: &KnotParam, prec: u32) -> Result<Self> {
        Self::new(gamma_of(p, prec))
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tol(mut self, quad_tol: f64) -> Self {
        self.quad_tol = quad_tol;
        self
    }

    pub fn with_r(mut self, r: f64) -> Result<Self> {
        let bound = (PI / self.gamma.abs_f64()).min(1.0);
        if !(r > 0.0 && r < bound) {
            return arg(format!("R = {r} outside (0, {bound})"));
        }
        self.r = r;
        Ok(self)
    }

    fn prec(&self) -> u32 {
        self.gamma.prec()
    }

    fn digits(&self) -> f64 {
        (-self.quad_tol.log10()).max(6.0)
    }

    fn cutoff(&self, rate: f64) -> f64 {
        self.tail_cutoff
            .unwrap_or((self.digits() * LN_10 + 10.0) / rate)
    }
}

pub fn gamma_of(p: &KnotParam, prec: u32) -> BigComplex {
    let two_pi = BigComplex::from_float(pi(prec) * 2u32);
    let g = two_pi - BigComplex::i(prec).scale(p.u);
    g / (2.0 * p.n as f64)
}

fn kernel(k: Kernel, t: &BigComplex, gamma: &BigComplex) -> BigComplex {
    let prec = t.prec();
    let pit = t.scale_float(&pi(prec));
    let gt = gamma * t;
    let base = (t * &pit.sinh()).recip();
    match k {
        Kernel::S => base / gt.sinh(),
        Kernel::I => base * (gt.sinh().recip() - gt.recip()),
    }
}

fn decay_rate(k: Kernel, x: f64, gamma_re: f64) -> f64 {
    match k {
        Kernel::S => PI + gamma_re - x.abs(),
        Kernel::I => PI - x.abs(),
    }
}

/// `(1/4)∫_{C_R} e^{zt} K(t) dt`.
fn log_integral(k: Kernel, z: &BigComplex, p: &QDilogParams) -> Result<BigComplex> {
    let rate = decay_rate(k, z.re_f64(), p.gamma.re_f64());
    if rate.is_nan() || rate <= 0.0 {
        return domain(format!(
            "Re z = {} outside the strip of convergence (decay rate {rate:.3e})",
            z.re_f64()
        ));
    }
    let prec = p.prec().min(z.prec());
    let cut = p.cutoff(rate);
    let v = match p.method {
        Method::Contour => contour_integral(k, z, p, cut, prec)?,
        Method::Line => line_integral(k, z, p, cut, prec)?,
    };
    Ok(v * 0.25)
}

fn contour_integral(k: Kernel, z: &BigComplex, p: &QDilogParams, cut: f64, prec: u32) -> Result<BigComplex> {
    let wp = prec + GUARD_BITS;
    let zw = z.with_prec(wp);
    let gw = p.gamma.with_prec(wp);
    if cut <= p.r {
        return arg(format!("tail cutoff {cut} not beyond R = {}", p.r));
    }
    let opts = QuadOptions {
        rel_tol: p.quad_tol * 1e-3,
        initial_panels: ((cut - p.r) / 2.0).ceil().max(4.0) as usize,
        max_panels: 200_000,
        ..QuadOptions::default()
    };
    let f = |t: &BigComplex| (&zw * t).exp() * kernel(k, t, &gw);
    let rf = Float::with_val(wp, p.r);
    let tf = Float::with_val(wp, cut);
    let right = integrate(|s| Ok(f(&BigComplex::from_float(s.clone()))), &rf, &tf, &opts)?;
    let left = integrate(
        |s| Ok(f(&BigComplex::from_float(Float::with_val(wp, -s)))),
        &rf,
        &tf,
        &opts,
    )?;
    // Ω_R from −R to R through iR: t = R e^{iθ}, θ from π down to 0.
    let zero = Float::new(wp);
    let pif = pi(wp);
    let arc_opts = QuadOptions {
        initial_panels: 8,
        ..opts
    };
    let arc = integrate(
        |theta| {
            let e = BigComplex::from_floats(Float::new(wp), theta.clone()).exp();
            let t = e.scale(p.r);
            Ok(-(f(&t) * t.mul_i()))
        },
        &zero,
        &pif,
        &arc_opts,
    )?;
    Ok((right.value + left.value + arc.value).with_prec(prec))
}

/// Trapezoid nodes on `Im t = c`, weights `h·K(t_j)`.
struct LineNodes {
    h: f64,
    c: f64,
    /// `K(t_j)·h` for `j = 0, 1, 2, …`
    pos: Vec<BigComplex>,
    /// `K(t_{−j})·h` for `j = 1, 2, …`
    neg: Vec<BigComplex>,
}

type LineKey = (u64, u64, u32, u64, bool);

fn line_cache() -> &'static Mutex<HashMap<LineKey, Arc<LineNodes>>> {
    static CACHE: OnceLock<Mutex<HashMap<LineKey, Arc<LineNodes>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn line_nodes(k: Kernel, gamma: &BigComplex, h: f64, c: f64, count: usize, wp: u32) -> Arc<LineNodes> {
    let key = (
        gamma.re_f64().to_bits(),
        gamma.im_f64().to_bits(),
        wp,
        h.to_bits(),
        k == Kernel::S,
    );
    if let Some(n) = line_cache().lock().unwrap().get(&key) {
        if n.pos.len() >= count && n.neg.len() + 1 >= count {
            return Arc::clone(n);
        }
    }
    let g = gamma.with_prec(wp);
    let hf = Float::with_val(wp, h);
    let node = |j: i64| {
        let s = Float::with_val(wp, &hf * j);
        let t = BigComplex::from_floats(s, Float::with_val(wp, c));
        kernel(k, &t, &g).scale_float(&hf)
    };
    let pos: Vec<BigComplex> = (0..count as i64).map(node).collect();
    let neg: Vec<BigComplex> = (1..count as i64).map(|j| node(-j)).collect();
    let nodes = Arc::new(LineNodes { h, c, pos, neg });
    line_cache().lock().unwrap().insert(key, Arc::clone(&nodes));
    nodes
}

/// Line height and trapezoid step for the given parameters and `|Im z|`.
fn line_geometry(p: &QDilogParams, im_z: f64) -> (f64, f64) {
    let g = &p.gamma;
    let ga = g.abs_f64();
    // pole πi/γ sits at height π Re γ / |γ|²
    let top = (PI * g.re_f64() / (ga * ga)).min(1.0);
    let c = 0.5 * top;
    let d = 0.8 * c;
    let budget = p.digits() * LN_10 + 3.0 * (5.0 / c).ln() + 10.0;
    // steps on a geometric ladder so node tables are shared between nearby z
    let need = 2.0 * PI * d / (budget + im_z.abs() * d);
    let mut h = 2.0 * PI * d / budget;
    while h > need {
        h *= 0.9;
    }
    (c, h)
}

fn line_integral(k: Kernel, z: &BigComplex, p: &QDilogParams, cut: f64, prec: u32) -> Result<BigComplex> {
    let wp = prec + GUARD_BITS;
    let (c, h) = line_geometry(p, z.im_f64());
    let count = (cut / h).ceil() as usize + 1;
    let nodes = line_nodes(k, &p.gamma, h, c, count, wp);
    debug_assert!(nodes.h == h && nodes.c == c);
    let zw = z.with_prec(wp);
    let t0 = BigComplex::from_floats(Float::new(wp), Float::with_val(wp, c));
    let e0 = (&zw * &t0).exp();
    let step = zw.scale(h).exp();
    let back = step.recip();
    let mut sum = &e0 * &nodes.pos[0];
    let mut e = e0.clone();
    for w in nodes.pos.iter().take(count).skip(1) {
        e = &e * &step;
        sum = &sum + &(&e * w);
    }
    let mut e = e0;
    for w in nodes.neg.iter().take(count - 1) {
        e = &e * &back;
        sum = &sum + &(&e * w);
    }
    if !sum.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "line quadrature overflowed at z = ({}, {})",
            z.re_f64(),
            z.im_f64()
        )));
    }
    Ok(sum.with_prec(prec))
}

/// `log S_γ(z) = (1/4)∫_{C_R} e^{zt}/(t sinh πt sinh γt) dt`, for `|Re z| < π + Re γ`.
pub fn log_s_gamma(z: &BigComplex, p: &QDilogParams) -> Result<BigComplex> {
    log_integral(Kernel::S, z, p)
}

/// `S_γ(z)`.
pub fn s_gamma(z: &BigComplex, p: &QDilogParams) -> Result<BigComplex> {
    Ok(log_s_gamma(z, p)?.exp())
}

/// `I_γ(z) = (1/4)∫_{C_R} e^{zt}/(t sinh πt) (1/sinh γt − 1/(γt)) dt`, for `|Re z| < π`.
pub fn i_gamma(z: &BigComplex, p: &QDilogParams) -> Result<BigComplex> {
    log_integral(Kernel::I, z, p)
}

/// `Li₂(−e^{iz})/(2iγ)`, the leading part of `log S_γ(z)`.
pub fn leading_term(z: &BigComplex, p: &QDilogParams) -> Result<BigComplex> {
    let arg = -(z.mul_i().exp());
    let g2i = p.gamma.mul_i() * 2.0;
    Ok(li2(&arg)? / g2i)
}

/// Whether `−π/N < Im(ξw) < 2π + π/N`, the strip on which `g_N` is defined.
pub fn in_g_strip(w: &BigComplex, p: &KnotParam) -> bool {
    let t = (p.xi(w.prec()) * w).im_f64();
    let pad = PI / p.n as f64;
    t > -pad && t < 2.0 * PI + pad
}

fn g_args(w: &BigComplex, p: &KnotParam) -> (BigComplex, BigComplex) {
    let prec = w.prec();
    let ixw = (p.xi(prec) * w).mul_i();
    let minus_iu = BigComplex::new(prec, 0.0, -p.u);
    let pif = BigComplex::from_float(pi(prec));
    let z1 = &minus_iu + &pif + &ixw;
    let z2 = &minus_iu - &pif - &ixw;
    (z1, z2)
}

/// `log S_γ(z)` after moving `z` into `|Re z| ≤ Re γ` by steps of `2γ`, using
/// `S_γ(z) = S_γ(z − 2γ)/(1 + e^{i(z−γ)})` and `S_γ(z) = (1 + e^{i(z+γ)}) S_γ(z + 2γ)`.
/// The imaginary part is only determined modulo `2πi`.
pub fn log_s_gamma_shifted(z: &BigComplex, p: &QDilogParams) -> Result<BigComplex> {
    let prec = z.prec();
    let g = p.gamma.with_prec(prec);
    let step_re = 2.0 * g.re_f64();
    let x = z.re_f64();
    let steps = (x.abs() / step_re).round() as u32;
    if steps == 0 {
        return log_s_gamma(z, p);
    }
    let two_g = g.scale(2.0);
    let down = x > 0.0;
    let (first, mul) = if down {
        ((z - &g).mul_i().exp(), (-&two_g).mul_i().exp())
    } else {
        ((z + &g).mul_i().exp(), two_g.mul_i().exp())
    };
    let mut e = first;
    let mut prod = BigComplex::one(prec);
    for _ in 0..steps {
        prod = &prod * &e.add_real(1.0);
        e = &e * &mul;
    }
    let shift = two_g.scale(steps as f64);
    if down {
        Ok(log_s_gamma(&(z - &shift), p)? - prod.ln())
    } else {
        Ok(log_s_gamma(&(z + &shift), p)? + prod.ln())
    }
}

/// `log g_N(w) = −Nuw + log S_γ(π − iu + iξw) − log S_γ(−π − iu − iξw)`, modulo `2πi`.
pub fn log_g_n(w: &BigComplex, p: &KnotParam, qp: &QDilogParams) -> Result<BigComplex> {
    if !in_g_strip(w, p) {
        return domain(format!("w = ({}, {}) outside the strip of g_N", w.re_f64(), w.im_f64()));
    }
    let (z1, z2) = g_args(w, p);
    let a = log_s_gamma_shifted(&z1, qp)?;
    let b = log_s_gamma_shifted(&z2, qp)?;
    Ok(a - b - w.scale(p.u * p.n as f64))
}

pub fn g_n(w: &BigComplex, p: &KnotParam, qp: &QDilogParams) -> Result<BigComplex> {
    Ok(log_g_n(w, p, qp)?.exp())
}

/// `g_N(w)` through `exp(NΦ(w) + I_γ(z₁) − I_γ(z₂))`; needs `w` inside the strip of `Φ`.
pub fn g_n_via_phi(w: &BigComplex, p: &KnotParam, qp: &QDilogParams) -> Result<BigComplex> {
    let (z1, z2) = g_args(w, p);
    let phi = potential(w, p.u)?;
    let a = i_gamma(&z1, qp)?;
    let b = i_gamma(&z2, qp)?;
    Ok((phi.scale(p.n as f64) + a - b).exp())
}

/// `S_γ(−π − iu + γ)/S_γ(π − iu − γ) = (e^{πu/γ} − 1)/(e^u − 1)`, and `N` at `u = 0`.
pub fn ratio_closed_form(u: f64, n: u32, prec: u32) -> Result<BigComplex> {
    let p = KnotParam::new(u, n)?;
    if u < 0.0 {
        return arg(format!("u must be non-negative, got {u}"));
    }
    if u == 0.0 {
        return Ok(BigComplex::from_real(prec, n as f64));
    }
    let g = gamma_of(&p, prec);
    let num = (BigComplex::from_float(pi(prec) * Float::with_val(prec, u)) / g).exp() - 1.0;
    let den = BigComplex::from_real(prec, u).exp() - 1.0;
    Ok(num / den)
}

/// The same ratio by quadrature of both boundary values.
pub fn ratio_by_quadrature(u: f64, qp: &QDilogParams) -> Result<BigComplex> {
    let prec = qp.prec();
    let g = &qp.gamma;
    let pif = BigComplex::from_float(pi(prec));
    let iu = BigComplex::new(prec, 0.0, u);
    let za = -&pif - &iu + g;
    let zb = &pif - &iu - g;
    Ok((log_s_gamma(&za, qp)? - log_s_gamma(&zb, qp)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_dist;

    const P: u32 = 128;

    fn params(u: f64, n: u32, m: Method) -> QDilogParams {
        QDilogParams::for_knot(&KnotParam::new(u, n).unwrap(), P)
            .unwrap()
            .with_method(m)
    }

    #[test]
    fn methods_agree() {
        let z = BigComplex::new(P, 0.3, 0.1);
        let a = log_s_gamma(&z, &params(0.5, 8, Method::Contour)).unwrap();
        let b = log_s_gamma(&z, &params(0.5, 8, Method::Line)).unwrap();
        assert!(rel_dist(&a, &b) < 1e-18, "{}", rel_dist(&a, &b));
    }

    #[test]
    fn remark_value_at_zero_u() {
        for n in [5, 10] {
            let q = ratio_by_quadrature(0.0, &params(0.0, n, Method::Line)).unwrap();
            assert!(rel_dist(&q, &BigComplex::from_real(P, n as f64)) < 1e-15);
        }
    }

    #[test]
    fn closed_form_ratio() {
        let c = ratio_closed_form(0.5, 6, P).unwrap();
        let q = ratio_by_quadrature(0.5, &params(0.5, 6, Method::Line)).unwrap();
        assert!(rel_dist(&q, &c) < 1e-15);
        assert_eq!(ratio_closed_form(0.0, 7, P).unwrap(), BigComplex::from_real(P, 7.0));
    }

    #[test]
    fn shifted_evaluation_matches_direct() {
        let p = params(0.5, 8, Method::Line);
        for (re, im) in [(2.9, 0.4), (-3.0, -1.2), (1.7, 2.0), (0.2, 0.1)] {
            let z = BigComplex::new(P, re, im);
            let a = log_s_gamma(&z, &p).unwrap().exp();
            let b = log_s_gamma_shifted(&z, &p).unwrap().exp();
            assert!(rel_dist(&b, &a) < 1e-17, "{re} {im}: {}", rel_dist(&b, &a));
        }
    }

    #[test]
    fn rejects_outside_strip() {
        let p = params(0.5, 8, Method::Line);
        let bad = BigComplex::new(P, PI + 0.5, 0.0);
        assert!(matches!(s_gamma(&bad, &p), Err(Error::Domain(_))));
        let edge = BigComplex::new(P, PI, 0.0);
        assert!(i_gamma(&edge, &p).is_err());
        assert!(QDilogParams::new(BigComplex::new(P, -0.1, 0.0)).is_err());
        assert!(p.clone().with_r(2.0).is_err());
    }
}
