//! Contours in the `w`-plane: the parallelogram `C₊(ε) ∪ C₋(ε)` reproducing `J_N`
//! through residues of `tan(Nπw)`, the steepest-descent path through `w₀`, and the
//! saddle-point approximation of `∫ exp(NΦ)`.

use std::f64::consts::PI;

use rug::Float;

use crate::cjones::KnotParam;
use crate::error::{arg, Error, Result};
use crate::geometry::{in_phi_strip, potential, potential_d1, saddle_point, AsymptoticModel};
use crate::precision::{pi, BigComplex};
use crate::qdilog::{log_g_n, ratio_closed_form, Method, QDilogParams};
use crate::quad::{integrate, integrate_segment, QuadOptions};

/// Largest color accepted by [`reconstruct_jn_via_contour`] unless overridden.
pub const N_MAX_CONTOUR: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Polygonal,
    Steepest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Oriented polyline in the `w`-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourPath {
    pub vertices: Vec<BigComplex>,
    pub kind: PathKind,
}

impl ContourPath {
    pub fn start(&self) -> &BigComplex {
        &self.vertices[0]
    }

    pub fn end(&self) -> &BigComplex {
        self.vertices.last().expect("path has vertices")
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|s| (&s[1] - &s[0]).abs_f64()).sum()
    }

    /// `count` points spaced evenly in arclength, endpoints included.
    pub fn samples(&self, count: usize) -> Vec<BigComplex> {
        let total = self.length();
        let mut out = Vec::with_capacity(count);
        let mut seg = 0;
        let mut acc = 0.0;
        for i in 0..count {
            let target = total * i as f64 / (count - 1).max(1) as f64;
            while seg + 2 < self.vertices.len() {
                let l = (&self.vertices[seg + 1] - &self.vertices[seg]).abs_f64();
                if acc + l >= target {
                    break;
                }
                acc += l;
                seg += 1;
            }
            let a = &self.vertices[seg];
            let b = &self.vertices[seg + 1];
            let l = (b - a).abs_f64();
            let t = if l > 0.0 { ((target - acc) / l).clamp(0.0, 1.0) } else { 0.0 };
            out.push(a + &(b - a).scale(t));
        }
        out
    }
}

/// Integration settings shared by the contour routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourOptions {
    pub prec: u32,
    pub quad_tol: f64,
    pub n_max: u32,
    pub method: Method,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            prec: 256,
            quad_tol: 1e-12,
            n_max: N_MAX_CONTOUR,
            method: Method::Line,
        }
    }
}

/// `C₋(ε)`: `ε → u/2π − i → 1 + u/2π − i → 1 − ε`;
/// `C₊(ε)`: `1 − ε → 1 − u/2π − ε + i → −u/2π + ε + i → ε`.
pub fn contour_c(eps: f64, p: &KnotParam, side: Side, prec: u32) -> Result<ContourPath> {
    let bound = 1.0 / (4.0 * p.n as f64);
    if !(eps > 0.0 && eps < bound) {
        return arg(format!("eps = {eps} outside (0, 1/(4N)) = (0, {bound})"));
    }
    let s = Float::with_val(prec, p.u) / (pi(prec) * 2u32);
    let e = Float::with_val(prec, eps);
    let one = Float::with_val(prec, 1);
    let c = |re: Float, im: f64| BigComplex::from_floats(re, Float::with_val(prec, im));
    let vertices = match side {
        Side::Minus => vec![
            c(e.clone(), 0.0),
            c(s.clone(), -1.0),
            c(Float::with_val(prec, &one + &s), -1.0),
            c(Float::with_val(prec, &one - &e), 0.0),
        ],
        Side::Plus => vec![
            c(Float::with_val(prec, &one - &e), 0.0),
            c(Float::with_val(prec, &one - &s) - &e, 1.0),
            c(Float::with_val(prec, &e - &s), 1.0),
            c(e, 0.0),
        ],
    };
    Ok(ContourPath {
        vertices,
        kind: PathKind::Polygonal,
    })
}

fn tan_n_pi(w: &BigComplex, n: u32) -> BigComplex {
    w.scale_float(&pi(w.prec())).scale(n as f64).tan()
}

fn path_integral<F>(path: &ContourPath, mut f: F, opts: &QuadOptions) -> Result<(BigComplex, f64)>
where
    F: FnMut(&BigComplex) -> Result<BigComplex>,
{
    let prec = path.start().prec();
    let mut total = BigComplex::zero(prec);
    let mut l1 = 0.0;
    for seg in path.vertices.windows(2) {
        let r = integrate_segment(&mut f, &seg[0], &seg[1], opts)?;
        total = total + r.value;
        l1 += r.l1;
    }
    Ok((total, l1))
}

/// `G_±(N, ε) = ∫_{C_±(ε)} tan(Nπw) g_N(w) dw`, with the `L¹` norm of the integrand.
pub fn g_integral(p: &KnotParam, eps: f64, side: Side, opts: &ContourOptions) -> Result<(BigComplex, f64)> {
    let qp = QDilogParams::for_knot(p, opts.prec)?
        .with_method(opts.method)
        .with_tol(opts.quad_tol * 0.1);
    let path = contour_c(eps, p, side, opts.prec)?;
    let qo = QuadOptions {
        rel_tol: opts.quad_tol,
        initial_panels: 2,
        ..QuadOptions::default()
    };
    let n = p.n;
    path_integral(&path, |w| Ok(tan_n_pi(w, n) * log_g_n(w, p, &qp)?.exp()), &qo)
}

/// Relative accuracy aimed at by [`reconstruct_jn_via_contour`].
pub const CONTOUR_TARGET: f64 = 1e-8;

/// Repeats `pass(tol)` (returning a value and the `L¹` norm of its integrand)
/// until `κ·tol ≤ target` with `κ = L¹/|value|`. The first `κ` is the larger of
/// the measured one and `L¹/magnitude`, `magnitude` being an a priori size of the
/// result, so a noise-dominated first pass cannot stop the refinement.
fn refine_against_cancellation<F>(prec: u32, tol0: f64, target: f64, magnitude: f64, mut pass: F) -> Result<BigComplex>
where
    F: FnMut(f64) -> Result<(BigComplex, f64)>,
{
    let floor = 2f64.powi(-(prec as i32) + 24);
    let mut tol = tol0;
    let (mut v, l1) = pass(tol)?;
    let mut kappa = (l1 / v.abs_f64()).max(l1 / magnitude);
    for _ in 0..4 {
        if kappa * tol <= target {
            return Ok(v);
        }
        tol = target / kappa / 10.0;
        if tol < floor {
            return Err(Error::QuadratureFailure(format!(
                "cancellation {kappa:.2e} needs more than {prec} bits"
            )));
        }
        let (nv, l) = pass(tol)?;
        v = nv;
        kappa = l / v.abs_f64();
    }
    if kappa * tol <= target {
        Ok(v)
    } else {
        Err(Error::QuadratureFailure(format!("no convergence against cancellation {kappa:.2e}")))
    }
}

/// `J_N(E; exp(ξ/N))` rebuilt from `(S_γ ratio)(i e^{u/2} N/2)(G₊ + G₋)`.
///
/// `G₊ + G₋` is far smaller than the integrands (the far sides of the
/// parallelogram reach `Re Φ ≈ π`), so the quadrature tolerance is tightened
/// until the measured cancellation times the tolerance is below `CONTOUR_TARGET`,
/// with `2|saddle_approx|` as the a priori size of `G₊ + G₋`.
pub fn reconstruct_jn_via_contour(p: &KnotParam, eps: f64, opts: &ContourOptions) -> Result<BigComplex> {
    if p.n > opts.n_max {
        return arg(format!("N = {} above the contour limit {}", p.n, opts.n_max));
    }
    if !(p.u > 0.0 && p.in_model_range()) {
        return arg(format!("u = {} outside (0, log((3+sqrt5)/2))", p.u));
    }
    let prec = opts.prec;
    let magnitude = 2.0 * saddle_approx(p, 64)?.abs_f64();
    let sum = refine_against_cancellation(prec, opts.quad_tol, CONTOUR_TARGET, magnitude, |tol| {
        let o = ContourOptions { quad_tol: tol, ..*opts };
        let (gp, lp) = g_integral(p, eps, Side::Plus, &o)?;
        let (gm, lm) = g_integral(p, eps, Side::Minus, &o)?;
        Ok((gp + gm, lp + lm))
    })?;
    let ratio = ratio_closed_form(p.u, p.n, prec)?;
    let pref = BigComplex::new(prec, 0.0, (p.u / 2.0).exp() * p.n as f64 / 2.0);
    Ok(ratio * pref * sum)
}

/// `G_± − (±i)∫_{C_±(ε)} exp(NΦ(w)) dw`, integrated as one function to relative
/// accuracy about `1e-6`.
pub fn tan_defect(p: &KnotParam, eps: f64, side: Side, opts: &ContourOptions) -> Result<BigComplex> {
    let prec = opts.prec;
    let path = contour_c(eps, p, side, prec)?;
    let unit = match side {
        Side::Plus => BigComplex::i(prec),
        Side::Minus => -BigComplex::i(prec),
    };
    let n = p.n;
    let magnitude = saddle_approx(p, 64)?.abs_f64() / n as f64;
    refine_against_cancellation(prec, opts.quad_tol, 1e-6, magnitude, |tol| {
        let qp = QDilogParams::for_knot(p, prec)?
            .with_method(opts.method)
            .with_tol(tol * 0.1);
        let qo = QuadOptions {
            rel_tol: tol,
            initial_panels: 2,
            ..QuadOptions::default()
        };
        path_integral(
            &path,
            |w| {
                let g = tan_n_pi(w, n) * log_g_n(w, p, &qp)?.exp();
                Ok(g - &unit * &potential(w, p.u)?.scale(n as f64).exp())
            },
            &qo,
        )
    })
}

/// Default `ε = 1/(8N)`.
pub fn default_eps(n: u32) -> f64 {
    1.0 / (8.0 * n as f64)
}

/// `(1/2πi)∮ tan(Nπw) dw` over the circle `|w − center| = radius`.
pub fn tan_residue(n: u32, center: &BigComplex, radius: f64) -> Result<BigComplex> {
    let prec = center.prec();
    let zero = Float::new(prec);
    let two_pi = pi(prec) * 2u32;
    let r = integrate(
        |theta| {
            let e = BigComplex::from_floats(Float::new(prec), theta.clone()).exp().scale(radius);
            let w = center + &e;
            Ok(tan_n_pi(&w, n) * e.mul_i())
        },
        &zero,
        &two_pi,
        &QuadOptions::with_tol(1e-30),
    )?;
    Ok(r.value / BigComplex::two_pi_i(prec))
}

/// `∫_path exp(NΦ(w)) dw`; `n = 0` integrates `1`.
///
/// The result is returned to relative accuracy about `quad_tol`: when the
/// integrand's `L¹` norm exceeds the result by `κ`, the quadrature is repeated at
/// `quad_tol/κ`, which needs correspondingly more bits in the path vertices.
pub fn integrate_exp_nphi(u: f64, n: u32, path: &ContourPath, quad_tol: f64) -> Result<BigComplex> {
    let prec = path.start().prec();
    let nn = n as f64;
    let run = |tol: f64| {
        let qo = QuadOptions {
            rel_tol: tol,
            initial_panels: if path.kind == PathKind::Steepest { 1 } else { 4 },
            ..QuadOptions::default()
        };
        path_integral(path, |w| Ok(potential(w, u)?.scale(nn).exp()), &qo)
    };
    refine_against_cancellation(prec, quad_tol, quad_tol * 1.000_001, f64::INFINITY, run)
}

/// `√(2π) exp(NΦ(w₀)) / (√N √(−Φ''(w₀)))` with the fourth-quadrant root.
pub fn saddle_approx(p: &KnotParam, prec: u32) -> Result<BigComplex> {
    let sd = saddle_point(p.u, prec)?;
    let root = (-&sd.phi_dd_at_w0).sqrt();
    let phi0 = potential(&sd.w0, p.u)?;
    let two_pi = BigComplex::from_float(pi(prec) * 2u32).sqrt();
    let sn = BigComplex::from_real(prec, p.n as f64).sqrt();
    Ok(two_pi * phi0.scale(p.n as f64).exp() / (sn * root))
}

/// Factor turning [`saddle_approx`] into [`AsymptoticModel::predicted`]:
/// `N exp(2πiuN/ξ) / (2 sinh(u/2))`.
pub fn saddle_to_main_factor(p: &KnotParam, prec: u32) -> BigComplex {
    let x = p.xi(prec);
    let e = (BigComplex::two_pi_i(prec).scale(p.u * p.n as f64) / x).exp();
    let s = BigComplex::from_real(prec, p.u / 2.0).sinh() * 2.0;
    e.scale(p.n as f64) / s
}

/// Sanity link between the two prediction forms, used by tests and the harness.
pub fn main_prediction_via_saddle(p: &KnotParam, prec: u32) -> Result<BigComplex> {
    Ok(saddle_approx(p, prec)? * saddle_to_main_factor(p, prec))
}

/// How a steepest path trace ended on one side of `w₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStop {
    Depth,
    StripEdge,
    NearEndpoint,
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct SteepestPath {
    pub path: ContourPath,
    /// Index range of the traced vertices (joins excluded).
    pub traced: std::ops::Range<usize>,
    pub stops: [TraceStop; 2],
    pub w0: BigComplex,
    /// Set when the traced path failed its checks and `ε → w₀ → 1 − ε` is used.
    pub fallback: bool,
}

const DEPTH: f64 = 40.0;
const STRIP_MARGIN: f64 = 0.02;

fn project(w: BigComplex, u: f64, target_im: &Float) -> Result<BigComplex> {
    let mut w = w;
    let stop = 2f64.powi(-(w.prec() as i32) / 2);
    for _ in 0..12 {
        let phi = potential(&w, u)?;
        let d = potential_d1(&w, u)?;
        let err = Float::with_val(w.prec(), phi.im() - target_im);
        let small = err.to_f64().abs() < stop;
        let corr = BigComplex::from_floats(err, Float::new(w.prec())) / d;
        w = &w - &corr.mul_i();
        if small {
            break;
        }
    }
    Ok(w)
}

fn strip_ok(w: &BigComplex, u: f64) -> bool {
    let t = (crate::cjones::xi(u, w.prec()) * w).im_f64();
    t > STRIP_MARGIN && t < 2.0 * PI - STRIP_MARGIN
}

fn trace_branch(
    u: f64,
    w0: &BigComplex,
    dir: &BigComplex,
    endpoint: &BigComplex,
    ds: f64,
    max_steps: usize,
) -> Result<(Vec<BigComplex>, TraceStop)> {
    let phi0 = potential(w0, u)?;
    let target_im = phi0.im().clone();
    let re0 = phi0.re_f64();
    let descent = |w: &BigComplex| -> Result<BigComplex> {
        let d = potential_d1(w, u)?;
        let c = d.conj();
        let n = c.abs_f64();
        Ok(-(c / n))
    };
    let mut pts = Vec::new();
    let mut w = project(w0 + &dir.scale(ds), u, &target_im)?;
    for _ in 0..max_steps {
        if (&w - endpoint).abs_f64() < 4.0 * ds {
            return Ok((pts, TraceStop::NearEndpoint));
        }
        pts.push(w.clone());
        // RK4 on dw/ds = −conj(Φ')/|Φ'|
        let k1 = descent(&w)?;
        let w2 = &w + &k1.scale(ds / 2.0);
        if !strip_ok(&w2, u) {
            return Ok((pts, TraceStop::StripEdge));
        }
        let k2 = descent(&w2)?;
        let w3 = &w + &k2.scale(ds / 2.0);
        if !strip_ok(&w3, u) {
            return Ok((pts, TraceStop::StripEdge));
        }
        let k3 = descent(&w3)?;
        let w4 = &w + &k3.scale(ds);
        if !strip_ok(&w4, u) {
            return Ok((pts, TraceStop::StripEdge));
        }
        let k4 = descent(&w4)?;
        let inc = (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(ds / 6.0);
        let next = project(&w + &inc, u, &target_im)?;
        if !strip_ok(&next, u) {
            return Ok((pts, TraceStop::StripEdge));
        }
        if potential(&next, u)?.re_f64() <= re0 - DEPTH {
            pts.push(next);
            return Ok((pts, TraceStop::Depth));
        }
        w = next;
    }
    Ok((pts, TraceStop::StepLimit))
}

/// Steepest-descent path from `ε` to `1 − ε` through `w₀`.
///
/// Each side follows `dw/ds = −conj Φ'(w)/|Φ'(w)|` (so `Im Φ` stays at its saddle
/// value) with step `1/n_points`, until `Re Φ` has dropped by 40 below the saddle,
/// the trace comes within a small margin of the strip edge, or it reaches the
/// endpoint; the rest is a straight join. The result is checked to stay in the
/// strip with `Re Φ` maximal at `w₀`; failing that, the polyline
/// `ε → w₀ → 1 − ε` is checked and returned instead.
pub fn steepest_path(u: f64, eps: f64, n_points: usize, prec: u32) -> Result<SteepestPath> {
    if !(u > 0.0 && u < crate::cjones::U_MAX) {
        return arg(format!("u = {u} outside (0, log((3+sqrt5)/2))"));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return arg(format!("eps = {eps} outside (0, 1/4)"));
    }
    let n_points = n_points.max(16);
    let ds = 1.0 / n_points as f64;
    let sd = saddle_point(u, prec)?;
    let w0 = sd.w0.clone();
    let root = (-&sd.phi_dd_at_w0).sqrt();
    let dir = root.recip();
    let dir = dir.scale(1.0 / dir.abs_f64());
    let start = BigComplex::from_real(prec, eps);
    let end = BigComplex::from_real(prec, 1.0 - eps);
    let (right, stop_r) = trace_branch(u, &w0, &dir, &end, ds, 8 * n_points)?;
    let (left, stop_l) = trace_branch(u, &w0, &-&dir, &start, ds, 8 * n_points)?;
    let mut vertices = vec![start];
    vertices.extend(left.into_iter().rev());
    vertices.push(w0.clone());
    vertices.extend(right);
    let last = vertices.len();
    vertices.push(end);
    let path = ContourPath {
        vertices,
        kind: PathKind::Steepest,
    };
    match check_max_at_saddle(&path, &w0, u, 400) {
        Ok(()) => Ok(SteepestPath {
            path,
            traced: 1..last,
            stops: [stop_l, stop_r],
            w0,
            fallback: false,
        }),
        Err(Error::PathFailure(_)) => {
            let path = linear_path_through_saddle(u, eps, prec)?;
            Ok(SteepestPath {
                path,
                traced: 1..2,
                stops: [stop_l, stop_r],
                w0,
                fallback: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Verifies that the path stays in the strip of `Φ` and that `Re Φ` over `count`
/// samples never exceeds its value at `w₀`.
pub fn check_max_at_saddle(path: &ContourPath, w0: &BigComplex, u: f64, count: usize) -> Result<()> {
    let re0 = potential(w0, u)?.re_f64();
    for w in path.samples(count) {
        if !in_phi_strip(&w, u) {
            return Err(Error::PathFailure(format!(
                "sample ({}, {}) left the strip",
                w.re_f64(),
                w.im_f64()
            )));
        }
        let re = potential(&w, u)?.re_f64();
        if re > re0 + 1e-12 * re0.abs().max(1.0) && (&w - w0).abs_f64() > 1e-12 {
            return Err(Error::PathFailure(format!(
                "Re Phi = {re} at ({}, {}) exceeds the saddle value {re0}",
                w.re_f64(),
                w.im_f64()
            )));
        }
    }
    Ok(())
}

/// Piecewise-linear fallback `ε → w₀ → 1 − ε`.
pub fn linear_path_through_saddle(u: f64, eps: f64, prec: u32) -> Result<ContourPath> {
    let sd = saddle_point(u, prec)?;
    let path = ContourPath {
        vertices: vec![
            BigComplex::from_real(prec, eps),
            sd.w0.clone(),
            BigComplex::from_real(prec, 1.0 - eps),
        ],
        kind: PathKind::Polygonal,
    };
    check_max_at_saddle(&path, &sd.w0, u, 200)?;
    Ok(path)
}

/// `(saddle_approx, ∫_{steepest} exp(NΦ))` for one color.
pub fn saddle_vs_integral(p: &KnotParam, eps: f64, prec: u32, quad_tol: f64) -> Result<(BigComplex, BigComplex)> {
    let sp = steepest_path(p.u, eps, 200, prec)?;
    let integral = integrate_exp_nphi(p.u, p.n, &sp.path, quad_tol)?;
    Ok((saddle_approx(p, prec)?, integral))
}

/// The asymptotic model, re-exported for callers that only use this module.
pub fn model(u: f64, prec: u32) -> Result<AsymptoticModel> {
    AsymptoticModel::new(u, prec)
}
