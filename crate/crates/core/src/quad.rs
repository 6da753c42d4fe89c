//! Adaptive Gauss–Legendre quadrature in arbitrary precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::BigComplex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    /// Nodes per panel.
    pub order: usize,
    /// Per-panel acceptance is `|I_panel − I_halves| ≤ rel_tol · L1 · len/total`,
    /// where `L1` estimates `∫|f|`.
    pub rel_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            order: 20,
            rel_tol: 1e-20,
            initial_panels: 4,
            max_panels: 20_000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: BigComplex,
    /// Estimate of `∫|f|` over the same range.
    pub l1: f64,
    pub panels: usize,
}

type Rule = Arc<Vec<(Float, Float)>>;

/// Legendre nodes and weights on `[−1, 1]`, cached per `(n, prec)`.
pub fn gl_rule(n: usize, prec: u32) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(n, prec)) {
        return Arc::clone(r);
    }
    let rule = Arc::new(build_rule(n, prec));
    cache.lock().unwrap().insert((n, prec), Arc::clone(&rule));
    rule
}

fn legendre(n: usize, x: &Float, wp: u32) -> (Float, Float) {
    // returns (P_n(x), P_n'(x))
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let k = k as u32;
        let t = Float::with_val(wp, x * &p1) * (2 * k - 1);
        let p2 = (t - Float::with_val(wp, &p0 * (k - 1))) / k;
        p0 = p1;
        p1 = p2;
    }
    let num = Float::with_val(wp, x * &p1) - &p0;
    let den = Float::with_val(wp, x * x) - 1u32;
    let dp = num * n as u32 / den;
    (p1, dp)
}

fn build_rule(n: usize, prec: u32) -> Vec<(Float, Float)> {
    assert!(n >= 2);
    let wp = prec + 32;
    let tol = Float::with_val(wp, Float::i_exp(1, -(wp as i32) + 8));
    let mut out = Vec::with_capacity(n);
    for i in 1..=n.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(wp, guess);
        for _ in 0..200 {
            let (p, d) = legendre(n, &x, wp);
            let dx = Float::with_val(wp, &p / &d);
            x -= &dx;
            if dx.abs() < tol {
                break;
            }
        }
        let (_, dp) = legendre(n, &x, wp);
        let one_minus = Float::with_val(wp, 1) - Float::with_val(wp, &x * &x);
        let w = Float::with_val(wp, 2) / (one_minus * Float::with_val(wp, &dp * &dp));
        let xs = Float::with_val(prec, &x);
        let ws = Float::with_val(prec, &w);
        if 2 * i - 1 == n {
            out.push((Float::new(prec), ws));
        } else {
            out.push((Float::with_val(prec, -&xs), ws.clone()));
            out.push((xs, ws));
        }
    }
    out
}

fn panel<F>(f: &mut F, a: &Float, b: &Float, rule: &Rule, prec: u32) -> Result<(BigComplex, f64)>
where
    F: FnMut(&Float) -> Result<BigComplex>,
{
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let mut sum = BigComplex::zero(prec);
    let mut l1 = 0.0;
    for (x, w) in rule.iter() {
        let t = Float::with_val(prec, &half * x) + &mid;
        let v = f(&t)?;
        if !v.is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite integrand at t = {}", t.to_f64())));
        }
        l1 += w.to_f64() * v.abs_f64();
        sum = &sum + &v.scale_float(w);
    }
    let hf = half.to_f64().abs();
    Ok((sum.scale_float(&half), l1 * hf))
}

/// Integrates `f` over `[a, b]` with bisection driven by the difference between a
/// panel and its two halves.
pub fn integrate<F>(mut f: F, a: &Float, b: &Float, opts: &QuadOptions) -> Result<QuadResult>
where
    F: FnMut(&Float) -> Result<BigComplex>,
{
    let prec = a.prec().min(b.prec());
    let rule = gl_rule(opts.order, prec);
    let total_len = Float::with_val(prec, b - a).to_f64().abs();
    if total_len == 0.0 {
        return Ok(QuadResult {
            value: BigComplex::zero(prec),
            l1: 0.0,
            panels: 0,
        });
    }
    let k = opts.initial_panels.max(1);
    let step = Float::with_val(prec, b - a) / k as u32;
    let mut work: Vec<(Float, Float, BigComplex)> = Vec::new();
    let mut l1 = 0.0;
    for i in 0..k {
        let lo = Float::with_val(prec, &step * i as u32) + a;
        let hi = if i + 1 == k {
            b.clone()
        } else {
            Float::with_val(prec, &step * (i + 1) as u32) + a
        };
        let (v, m) = panel(&mut f, &lo, &hi, &rule, prec)?;
        l1 += m;
        work.push((lo, hi, v));
    }
    work.reverse();
    let scale = l1.max(f64::MIN_POSITIVE);
    let mut accepted = BigComplex::zero(prec);
    let mut panels = k;
    let mut l1_acc = 0.0;
    while let Some((lo, hi, whole)) = work.pop() {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let (left, ml) = panel(&mut f, &lo, &mid, &rule, prec)?;
        let (right, mr) = panel(&mut f, &mid, &hi, &rule, prec)?;
        panels += 2;
        let both = &left + &right;
        let err = (&whole - &both).abs_f64();
        let len = Float::with_val(prec, &hi - &lo).to_f64().abs();
        if err <= opts.rel_tol * scale * (len / total_len) || err == 0.0 {
            accepted = &accepted + &both;
            l1_acc += ml + mr;
            continue;
        }
        if panels > opts.max_panels {
            return Err(Error::QuadratureFailure(format!(
                "panel limit {} reached near t = {} (panel error {:.3e}, scale {:.3e})",
                opts.max_panels,
                mid.to_f64(),
                err,
                scale
            )));
        }
        work.push((mid.clone(), hi, right));
        work.push((lo, mid, left));
    }
    Ok(QuadResult {
        value: accepted,
        l1: l1_acc,
        panels,
    })
}

/// `∫ f(z) dz` along the straight segment from `z0` to `z1`.
pub fn integrate_segment<F>(mut f: F, z0: &BigComplex, z1: &BigComplex, opts: &QuadOptions) -> Result<QuadResult>
where
    F: FnMut(&BigComplex) -> Result<BigComplex>,
{
    let prec = z0.prec().min(z1.prec());
    let dz = z1 - z0;
    let zero = Float::new(prec);
    let one = Float::with_val(prec, 1);
    let r = integrate(
        |t| {
            let z = z0 + &dz.scale_float(t);
            f(&z)
        },
        &zero,
        &one,
        opts,
    )?;
    let dzabs = dz.abs_f64();
    Ok(QuadResult {
        value: &r.value * &dz,
        l1: r.l1 * dzabs,
        panels: r.panels,
    })
}
