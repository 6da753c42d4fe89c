use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use fig8::cjones::{kashaev, xi, KnotParam, U_MAX};
use fig8::dilog::li2;
use fig8::geometry::{
    in_phi_strip, phi_of_u, potential, potential_d1, potential_d2, rep_data, saddle_point, t_of_u, torsion_mu,
    torus_t_k, xi_phi_w0, RepSign,
};
use fig8::harness::{convergence_failures, phi0_grid, verify_ah, verify_contour, verify_main, verify_phi0};
use fig8::precision::{rel_dist, BigComplex};
use fig8::qdilog::{ratio_by_quadrature, ratio_closed_form, s_gamma, QDilogParams};
use fig8::saddle::saddle_vs_integral;
use fig8::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KASHAEV_TARGET: f64 = 2.02988;

type Check = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn contour_oracle() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for u in [0.2, 0.5, 0.8] {
        for row in verify_contour(u, &[5, 8, 13, 21], 256, false)? {
            let e = row.abs_err();
            worst = worst.max(e);
            if e.is_nan() || e > 1e-6 {
                bad.push(format!("N={} u={u}: {e:.2e}", row.n));
            }
        }
    }
    outcome(bad.is_empty(), format!("max rel {worst:.2e} (tol 1e-6) {}", bad.join("; ")))
}

fn convergence(rows: &[fig8::harness::VerificationRow]) -> String {
    rows.iter().map(|r| format!("N={}: {:.4e}", r.n, r.abs_err())).collect::<Vec<_>>().join(", ")
}

fn main_convergence() -> Result<Outcome> {
    let rows = verify_main(0.5, &[50, 100, 200], 128, false)?;
    let fails = convergence_failures(&rows, 0.1);
    outcome(fails.is_empty(), format!("{} {}", convergence(&rows), fails.join("; ")))
}

fn volume_specialization() -> Result<Outcome> {
    let rows = verify_ah(&[50, 100, 200], 128, false)?;
    let fails = convergence_failures(&rows, 0.1);
    let z = BigComplex::new(128, 0.0, PI / 3.0).exp();
    let cl = li2(&z)?.im_f64();
    let digits_ok = (cl - 1.01494).abs() < 5e-6;
    outcome(
        fails.is_empty() && digits_ok,
        format!("{}; Im Li2(e^(i pi/3)) = {cl:.10} {}", convergence(&rows), fails.join("; ")),
    )
}

fn kashaev_growth() -> Result<Outcome> {
    let n = 400;
    let j = kashaev(n)?;
    let rate = 2.0 * PI / n as f64 * j.abs().ln().to_f64();
    let gap = (rate - KASHAEV_TARGET).abs();
    outcome(gap <= 0.05, format!("N={n}: rate {rate:.5}, target {KASHAEV_TARGET}, gap {gap:.4} (tol 0.05)"))
}

fn shift_residual(z: &BigComplex, p: &QDilogParams) -> Result<f64> {
    let g = &p.gamma;
    let lhs = z.mul_i().exp().add_real(1.0) * s_gamma(&(z + g), p)?;
    Ok(rel_dist(&lhs, &s_gamma(&(z - g), p)?))
}

fn quantum_dilog() -> Result<Outcome> {
    let prec = 128;
    let params = |u: f64, n: u32| QDilogParams::for_knot(&KnotParam::new(u, n)?, prec);
    let mut worst = 0.0f64;
    for (u, n) in [(0.0, 6), (0.2, 9), (0.5, 12), (0.8, 7), (0.35, 20)] {
        let p = params(u, n)?;
        for (re, im) in [(0.0, 0.0), (1.1, 0.4), (-2.0, -0.7), (2.4, 1.5), (-0.6, 2.2)] {
            worst = worst.max(shift_residual(&BigComplex::new(prec, re, im), &p)?);
        }
    }
    let mut closed = 0.0f64;
    for (u, n) in [(0.2, 5), (0.5, 8), (0.8, 13)] {
        let q = ratio_by_quadrature(u, &params(u, n)?)?;
        closed = closed.max(rel_dist(&q, &ratio_closed_form(u, n, prec)?));
    }
    let mut remark = 0.0f64;
    let mut remark_tol = 0.0f64;
    for n in [5, 10] {
        let p = params(0.0, n)?;
        let q = ratio_by_quadrature(0.0, &p)?;
        remark = remark.max(rel_dist(&q, &BigComplex::from_real(prec, n as f64)));
        remark_tol = remark_tol.max(p.quad_tol);
    }
    outcome(
        worst <= 1e-10 && closed <= 1e-8 && remark <= remark_tol,
        format!(
            "shift residual {worst:.2e} (tol 1e-10), closed form {closed:.2e} (tol 1e-8), value N at u=0 {remark:.2e} (tol {remark_tol:.0e})"
        ),
    )
}

fn geometry_suite() -> Result<Outcome> {
    let prec = 128;
    let grid: Vec<f64> = (1..=50).map(|i| U_MAX * i as f64 / 51.0).collect();
    let (mut imag, mut crit, mut tors, mut trace, mut wirt) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &u in &grid {
        let rep = rep_data(u, RepSign::Plus, prec)?;
        let x = xi_phi_w0(u, prec)?;
        imag = imag
            .max(phi_of_u(u, prec)?.re_f64().abs())
            .max(rep.v.re_f64().abs())
            .max(x.re_f64().abs() / x.abs_f64().max(1.0));
        let sd = saddle_point(u, prec)?;
        crit = crit.max(potential_d1(&sd.w0, u)?.abs_f64());
        tors = tors.max(rel_dist(&torsion_mu(u, prec)?.square(), &t_of_u(u, prec)?.square()));
        let lhs = rep.longitude().trace() * 4.0 + 17.0;
        let m = &rep.m;
        let rhs = (m.scale(2.0) + m.recip().scale(2.0) - 1.0).square();
        trace = trace.max(rel_dist(&lhs, &rhs));
        wirt = wirt.max(rep.relation_residual());
    }
    let (_, phi0_fails) = verify_phi0(&phi0_grid(50), prec)?;
    let pass = imag <= 1e-25 && crit <= 1e-30 && tors <= 1e-25 && trace <= 1e-25 && wirt <= 1e-30 && phi0_fails.is_empty();
    outcome(
        pass,
        format!(
            "real parts {imag:.1e}, |Phi'(w0)| {crit:.1e}, torsion {tors:.1e}, trace identity {trace:.1e}, relation {wirt:.1e}, Phi_0 failures {}",
            phi0_fails.len()
        ),
    )
}

fn derivative_checks() -> Result<Outcome> {
    let prec = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = BigComplex::from_real(prec, 1e-10);
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    let mut count = 0;
    while count < 20 {
        let u = rng.random_range(0.0..0.95);
        let w = BigComplex::new(prec, rng.random_range(-0.5..1.5), rng.random_range(-1.0..1.0));
        let t = (xi(u, prec) * &w).im_f64();
        if !in_phi_strip(&w, u) || t <= 0.2 || t >= 2.0 * PI - 0.2 {
            continue;
        }
        count += 1;
        let (wp, wm) = (&w + &h, &w - &h);
        let fd1 = (potential(&wp, u)? - potential(&wm, u)?).scale(0.5e10);
        e1 = e1.max(rel_dist(&fd1, &potential_d1(&w, u)?));
        let fd2 = (potential_d1(&wp, u)? - potential_d1(&wm, u)?).scale(0.5e10);
        e2 = e2.max(rel_dist(&fd2, &potential_d2(&w, u)?));
    }
    outcome(e1 <= 1e-12 && e2 <= 1e-12, format!("20 points: d1 {e1:.2e}, d2 {e2:.2e} (tol 1e-12)"))
}

fn saddle_consistency() -> Result<Outcome> {
    let mut devs = Vec::new();
    for n in [100, 200, 400] {
        let (s, i) = saddle_vs_integral(&KnotParam::new(0.5, n)?, 0.01, 128, 1e-14)?;
        devs.push((n, (&s / &i).add_real(-1.0).abs_f64()));
    }
    let pass = devs[1].1 <= 0.05 && devs.windows(2).all(|w| w[1].1 < w[0].1);
    let text = devs.iter().map(|(n, d)| format!("N={n}: {d:.3e}")).collect::<Vec<_>>().join(", ");
    outcome(pass, format!("{text} (tol 0.05 at N=200)"))
}

fn torus_pattern() -> Result<Outcome> {
    let mut pass = true;
    let mut vals = Vec::new();
    for k in 1..=5u32 {
        let t = torus_t_k(2, 3, k, 128)?.to_f64();
        let expected = if k % 2 == 0 || k % 3 == 0 { 0.0 } else { 2.0 };
        pass &= (t - expected).abs() <= 1e-30;
        vals.push(t);
    }
    outcome(pass, format!("T_k(2,3), k=1..5: {vals:?}"))
}

fn main() -> ExitCode {
    let checks: [Check; 9] = [
        ("contour-oracle identity", contour_oracle),
        ("main convergence at u=0.5", main_convergence),
        ("u=0 volume specialization", volume_specialization),
        ("Kashaev growth at N=400", kashaev_growth),
        ("quantum dilogarithm", quantum_dilog),
        ("geometry suite", geometry_suite),
        ("potential derivatives", derivative_checks),
        ("saddle consistency", saddle_consistency),
        ("torus formulas", torus_pattern),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "[{}] {}. {name}: {} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            detail.trim_end(),
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
