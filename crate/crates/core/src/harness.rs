//! Verification campaigns and their CSV/JSON reports.

use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::cjones::{eval_at_xi_with, KnotParam, U_MAX};
use crate::error::{Error, Result};
use crate::geometry::{ah_predicted, im_xi_phi_w0, im_xi_phi_w0_derivative, torus_s_k, torus_t_k, xi_phi_w0, AsymptoticModel};
use crate::precision::{float_to_decimal, BigComplex, EvalRequest, DEFAULT_INITIAL_PREC_BITS};
use crate::saddle::{default_eps, reconstruct_jn_via_contour, ContourOptions};

/// Significant decimal digits written for every high-precision field.
pub const DIGITS: usize = 40;

/// Environment variable giving the default working precision in bits.
pub const PREC_ENV: &str = "FIG8_PREC_BITS";

pub const CSV_HEADER: [&str; 10] = [
    "n", "u", "exact_re", "exact_im", "pred_re", "pred_im", "ratio_re", "ratio_im", "abs_err", "elapsed_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Main,
    Ah,
    Phi0,
    ContourOracle,
    TorusFormulas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub mode: Mode,
    pub u: f64,
    pub n_list: Vec<u32>,
    /// Mode default when `None`: 0.1 for the asymptotic campaigns, 1e-6 for the contour oracle.
    pub tol: Option<f64>,
    pub out_format: OutFormat,
    pub prec_bits: Option<u32>,
    /// Points of the `u`-grid for [`Mode::Phi0`].
    pub grid: usize,
    /// Torus knot `(a, b)` for [`Mode::TorusFormulas`]; `n_list` holds the `k`.
    pub torus: (u32, u32),
    pub timing: bool,
}

impl CampaignConfig {
    pub fn new(mode: Mode) -> Self {
        CampaignConfig {
            mode,
            u: 0.5,
            n_list: Vec::new(),
            tol: None,
            out_format: OutFormat::Csv,
            prec_bits: None,
            grid: 50,
            torus: (2, 3),
            timing: true,
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(match self.mode {
            Mode::ContourOracle => 1e-6,
            _ => 0.1,
        })
    }

    /// Explicit override, then `FIG8_PREC_BITS`, then the mode default.
    pub fn prec(&self) -> Result<u32> {
        if let Some(p) = self.prec_bits {
            return Ok(p);
        }
        match std::env::var(PREC_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{PREC_ENV}={v:?} is not a bit count"))),
            Err(_) => Ok(match self.mode {
                Mode::ContourOracle => 256,
                _ => DEFAULT_INITIAL_PREC_BITS,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return bad(format!("N list {:?} is not strictly increasing", self.n_list));
        }
        if self.n_list.contains(&0) {
            return bad("N must be positive".into());
        }
        let t = self.tol();
        if !(t > 0.0 && t.is_finite()) {
            return bad(format!("tolerance {t} must be positive"));
        }
        if let Some(p) = self.prec_bits {
            if p < 64 {
                return bad(format!("precision {p} below 64 bits"));
            }
        }
        self.prec()?;
        let open_u = self.u > 0.0 && self.u < U_MAX;
        match self.mode {
            Mode::Main | Mode::ContourOracle if !open_u => {
                bad(format!("u = {} outside (0, log((3+sqrt5)/2))", self.u))
            }
            Mode::Main | Mode::Ah | Mode::ContourOracle if self.n_list.is_empty() => bad("empty N list".into()),
            Mode::ContourOracle if self.n_list.iter().any(|&n| n > crate::saddle::N_MAX_CONTOUR) => bad(format!(
                "contour oracle is limited to N <= {}",
                crate::saddle::N_MAX_CONTOUR
            )),
            Mode::Phi0 if self.grid < 2 => bad("phi0 grid needs at least two points".into()),
            Mode::TorusFormulas => {
                let (a, b) = self.torus;
                if a < 2 || b < 2 || gcd(a, b) != 1 {
                    return bad(format!("({a}, {b}) is not a torus knot type"));
                }
                if self.n_list.iter().any(|&k| k >= a * b) {
                    return bad(format!("k must lie in 1..{}", a * b - 1));
                }
                if !self.u.is_finite() {
                    return bad("u must be finite".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Optional TOML configuration; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub u: Option<f64>,
    pub n_list: Option<Vec<u32>>,
    pub tol: Option<f64>,
    pub format: Option<OutFormat>,
    pub prec_bits: Option<u32>,
    pub grid: Option<usize>,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub timing: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&self, c: &mut CampaignConfig) {
        if let Some(u) = self.u {
            c.u = u;
        }
        if let Some(n) = &self.n_list {
            c.n_list = n.clone();
        }
        if self.tol.is_some() {
            c.tol = self.tol;
        }
        if let Some(f) = self.format {
            c.out_format = f;
        }
        if self.prec_bits.is_some() {
            c.prec_bits = self.prec_bits;
        }
        if let Some(g) = self.grid {
            c.grid = g;
        }
        if let Some(a) = self.a {
            c.torus.0 = a;
        }
        if let Some(b) = self.b {
            c.torus.1 = b;
        }
        if let Some(t) = self.timing {
            c.timing = t;
        }
    }
}

/// One color of a campaign: exact value, prediction, and their ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationRow {
    pub n: u32,
    pub u: f64,
    pub exact: BigComplex,
    pub predicted: BigComplex,
    pub ratio: BigComplex,
    pub abs_ratio_minus_1: Float,
    pub elapsed_ms: u64,
}

impl VerificationRow {
    pub fn new(n: u32, u: f64, exact: BigComplex, predicted: BigComplex, elapsed_ms: u64) -> Self {
        let ratio = &exact / &predicted;
        let abs_ratio_minus_1 = ratio.add_real(-1.0).abs();
        VerificationRow {
            n,
            u,
            exact,
            predicted,
            ratio,
            abs_ratio_minus_1,
            elapsed_ms,
        }
    }

    pub fn abs_err(&self) -> f64 {
        self.abs_ratio_minus_1.to_f64()
    }

    fn record(&self) -> RowRecord {
        let (exact_re, exact_im) = self.exact.to_decimal_strings(DIGITS);
        let (pred_re, pred_im) = self.predicted.to_decimal_strings(DIGITS);
        let (ratio_re, ratio_im) = self.ratio.to_decimal_strings(DIGITS);
        RowRecord {
            n: self.n,
            u: self.u,
            exact_re,
            exact_im,
            pred_re,
            pred_im,
            ratio_re,
            ratio_im,
            abs_err: float_to_decimal(&self.abs_ratio_minus_1, DIGITS),
            elapsed_ms: self.elapsed_ms,
        }
    }

    fn from_record(r: &RowRecord, prec: u32) -> Result<Self> {
        let abs = Float::parse(&r.abs_err).map_err(|e| Error::Arg(format!("bad abs_err {:?}: {e}", r.abs_err)))?;
        Ok(VerificationRow {
            n: r.n,
            u: r.u,
            exact: BigComplex::parse(prec, &r.exact_re, &r.exact_im)?,
            predicted: BigComplex::parse(prec, &r.pred_re, &r.pred_im)?,
            ratio: BigComplex::parse(prec, &r.ratio_re, &r.ratio_im)?,
            abs_ratio_minus_1: Float::with_val(prec, abs),
            elapsed_ms: r.elapsed_ms,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RowRecord {
    n: u32,
    u: f64,
    exact_re: String,
    exact_im: String,
    pred_re: String,
    pred_im: String,
    ratio_re: String,
    ratio_im: String,
    abs_err: String,
    elapsed_ms: u64,
}

/// One point of the `Re Φ(w₀)` / `Im ξΦ(w₀)` survey.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phi0Row {
    pub u: f64,
    pub re_phi_w0: String,
    pub im_xi_phi_w0: String,
    pub derivative: String,
}

/// `S_k(u)` and `T_k` of a torus knot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusRow {
    pub a: u32,
    pub b: u32,
    pub k: u32,
    pub u: f64,
    pub s_k_re: String,
    pub s_k_im: String,
    pub t_k: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Table {
    Rows(Vec<VerificationRow>),
    Phi0(Vec<Phi0Row>),
    Torus(Vec<TorusRow>),
}

/// A finished campaign: its table and the assertions that failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub table: Table,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn write(&self, format: OutFormat, out: &mut dyn Write) -> Result<()> {
        match (&self.table, format) {
            (Table::Rows(rows), OutFormat::Csv) => write_rows_csv(rows, out),
            (Table::Rows(rows), OutFormat::Json) => {
                let recs: Vec<RowRecord> = rows.iter().map(VerificationRow::record).collect();
                write_json(&recs, out)
            }
            (Table::Phi0(rows), OutFormat::Csv) => write_csv(rows, out),
            (Table::Phi0(rows), OutFormat::Json) => write_json(rows, out),
            (Table::Torus(rows), OutFormat::Csv) => write_csv(rows, out),
            (Table::Torus(rows), OutFormat::Json) => write_json(rows, out),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_csv<T: Serialize>(rows: &[T], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(rows: &[T], out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

/// Writes rows under [`CSV_HEADER`], the header alone when there are none.
pub fn write_rows_csv(rows: &[VerificationRow], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.serialize(r.record()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a CSV written by [`write_rows_csv`] at the given precision.
pub fn read_rows_csv(input: impl Read, prec: u32) -> Result<Vec<VerificationRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize::<RowRecord>()
        .map(|rec| VerificationRow::from_record(&rec.map_err(csv_err)?, prec))
        .collect()
}

fn timed<T>(timing: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, u64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, if timing { t.elapsed().as_millis() as u64 } else { 0 }))
}

/// Runs `f` for every `N` on its own scoped thread and returns rows in `N` order.
fn per_color<F>(n_list: &[u32], f: F) -> Result<Vec<VerificationRow>>
where
    F: Fn(u32) -> Result<VerificationRow> + Sync,
{
    std::thread::scope(|s| {
        let handles: Vec<_> = n_list.iter().map(|&n| { let f = &f; s.spawn(move || f(n)) }).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Domain("worker panicked".into()))))
            .collect()
    })
}

fn exact_value(p: &KnotParam, prec: u32) -> Result<BigComplex> {
    let req = EvalRequest::for_color(1e-30, prec, p.n)?;
    eval_at_xi_with(p, &req)
}

/// `J_N` against the asymptotic prediction at a fixed `u`.
pub fn verify_main(u: f64, n_list: &[u32], prec: u32, timing: bool) -> Result<Vec<VerificationRow>> {
    let model = AsymptoticModel::new(u, prec)?;
    per_color(n_list, |n| {
        let p = KnotParam::new(u, n)?;
        let ((exact, pred), ms) = timed(timing, || Ok((exact_value(&p, prec)?, model.predicted(n)?)))?;
        Ok(VerificationRow::new(n, u, exact, pred, ms))
    })
}

/// Kashaev invariant against `3^{−1/4} N^{3/2} exp(N Vol/2π)`.
pub fn verify_ah(n_list: &[u32], prec: u32, timing: bool) -> Result<Vec<VerificationRow>> {
    per_color(n_list, |n| {
        let p = KnotParam::new(0.0, n)?;
        let ((exact, pred), ms) = timed(timing, || Ok((exact_value(&p, prec)?, ah_predicted(n, prec))))?;
        Ok(VerificationRow::new(n, 0.0, exact, pred, ms))
    })
}

/// `J_N` against its contour-integral reconstruction.
pub fn verify_contour(u: f64, n_list: &[u32], prec: u32, timing: bool) -> Result<Vec<VerificationRow>> {
    let opts = ContourOptions {
        prec,
        ..ContourOptions::default()
    };
    per_color(n_list, |n| {
        let p = KnotParam::new(u, n)?;
        let ((exact, rec), ms) = timed(timing, || {
            Ok((exact_value(&p, prec)?, reconstruct_jn_via_contour(&p, default_eps(n), &opts)?))
        })?;
        Ok(VerificationRow::new(n, u, exact, rec, ms))
    })
}

/// Uniform grid on the open interval `(0, u_max)`.
pub fn phi0_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| U_MAX * i as f64 / (points + 1) as f64).collect()
}

/// Positivity of `Re Φ(w₀)` and `Im ξΦ(w₀)`, strict decrease of `Im ξΦ(w₀)` with
/// a negative derivative, and its vanishing at `u_max`.
pub fn verify_phi0(grid: &[f64], prec: u32) -> Result<(Vec<Phi0Row>, Vec<String>)> {
    let mut rows = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    let mut prev: Option<(f64, Float)> = None;
    for &u in grid {
        let xphi = xi_phi_w0(u, prec)?;
        let re_phi = (&xphi / &crate::cjones::xi(u, prec)).re().clone();
        let im = im_xi_phi_w0(u, prec)?;
        let d = im_xi_phi_w0_derivative(u, prec)?;
        if !re_phi.is_sign_positive() || re_phi.is_zero() {
            failures.push(format!("u = {u}: Re Phi(w0) = {} not positive", re_phi.to_f64()));
        }
        if !im.is_sign_positive() || im.is_zero() {
            failures.push(format!("u = {u}: Im(xi Phi(w0)) = {} not positive", im.to_f64()));
        }
        if !d.is_sign_negative() {
            failures.push(format!("u = {u}: derivative {} not negative", d.to_f64()));
        }
        if let Some((pu, pv)) = &prev {
            if im >= *pv {
                failures.push(format!("Im(xi Phi(w0)) not decreasing between u = {pu} and u = {u}"));
            }
        }
        rows.push(Phi0Row {
            u,
            re_phi_w0: float_to_decimal(&re_phi, DIGITS),
            im_xi_phi_w0: float_to_decimal(&im, DIGITS),
            derivative: float_to_decimal(&d, DIGITS),
        });
        prev = Some((u, im));
    }
    let end = im_xi_phi_w0(U_MAX, prec)?;
    let gap = end.to_f64().abs();
    if gap > 1e-12 {
        failures.push(format!("Im(xi Phi(w0)) at u_max is {gap:e}, not 0"));
    }
    Ok((rows, failures))
}

/// `S_k(u)`, `T_k` for the listed `k`, checking that `T_k` vanishes exactly when
/// `a | k` or `b | k`.
pub fn verify_torus(a: u32, b: u32, ks: &[u32], u: f64, prec: u32) -> Result<(Vec<TorusRow>, Vec<String>)> {
    let uc = BigComplex::from_real(prec, u);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &k in ks {
        let s = torus_s_k(a, b, k, &uc)?;
        let t = torus_t_k(a, b, k, prec)?;
        let divides = k % a == 0 || k % b == 0;
        if divides != t.is_zero() {
            failures.push(format!("T_{k} = {} breaks the vanishing pattern", t.to_f64()));
        }
        let (s_k_re, s_k_im) = s.to_decimal_strings(DIGITS);
        rows.push(TorusRow {
            a,
            b,
            k,
            u,
            s_k_re,
            s_k_im,
            t_k: float_to_decimal(&t, DIGITS),
        });
    }
    Ok((rows, failures))
}

/// Strict decrease of `|ratio − 1|` and, for two or more colors, a final value below `cap`.
pub fn convergence_failures(rows: &[VerificationRow], cap: f64) -> Vec<String> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        if w[1].abs_ratio_minus_1 >= w[0].abs_ratio_minus_1 {
            out.push(format!(
                "|ratio-1| did not decrease from N = {} ({:.3e}) to N = {} ({:.3e})",
                w[0].n,
                w[0].abs_err(),
                w[1].n,
                w[1].abs_err()
            ));
        }
    }
    if let (true, Some(last)) = (rows.len() >= 2, rows.last()) {
        if last.abs_err() >= cap {
            out.push(format!("|ratio-1| = {:.3e} at N = {} not below {cap}", last.abs_err(), last.n));
        }
    }
    out
}

/// Executes a validated campaign.
pub fn execute(c: &CampaignConfig) -> Result<Report> {
    c.validate()?;
    let prec = c.prec()?;
    let tol = c.tol();
    Ok(match c.mode {
        Mode::Main => {
            let rows = verify_main(c.u, &c.n_list, prec, c.timing)?;
            let failures = convergence_failures(&rows, tol);
            Report {
                table: Table::Rows(rows),
                failures,
            }
        }
        Mode::Ah => {
            let rows = verify_ah(&c.n_list, prec, c.timing)?;
            let failures = convergence_failures(&rows, tol);
            Report {
                table: Table::Rows(rows),
                failures,
            }
        }
        Mode::ContourOracle => {
            let rows = verify_contour(c.u, &c.n_list, prec, c.timing)?;
            let failures = rows
                .iter()
                .filter(|r| r.abs_err().is_nan() || r.abs_err() > tol)
                .map(|r| format!("N = {}: contour value off by {:.3e}", r.n, r.abs_err()))
                .collect();
            Report {
                table: Table::Rows(rows),
                failures,
            }
        }
        Mode::Phi0 => {
            let (rows, failures) = verify_phi0(&phi0_grid(c.grid), prec)?;
            Report {
                table: Table::Phi0(rows),
                failures,
            }
        }
        Mode::TorusFormulas => {
            let ks: Vec<u32> = if c.n_list.is_empty() {
                (1..c.torus.0 * c.torus.1).collect()
            } else {
                c.n_list.clone()
            };
            let (rows, failures) = verify_torus(c.torus.0, c.torus.1, &ks, c.u, prec)?;
            Report {
                table: Table::Torus(rows),
                failures,
            }
        }
    })
}

/// Runs a campaign, writes its report to `out`, and returns the exit code:
/// 0 when every assertion holds, 1 on assertion or numerical failure, 2 on a
/// configuration error.
pub fn run(c: &CampaignConfig, out: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    match execute(c) {
        Ok(report) => {
            if let Err(e) = report.write(c.out_format, out) {
                let _ = writeln!(diag, "error: {e}");
                return 1;
            }
            for f in &report.failures {
                let _ = writeln!(diag, "FAIL {f}");
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e @ (Error::Config(_) | Error::Arg(_))) => {
            let _ = writeln!(diag, "error: {e}");
            2
        }
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode, u: f64, n: &[u32]) -> CampaignConfig {
        CampaignConfig {
            u,
            n_list: n.to_vec(),
            prec_bits: Some(128),
            timing: false,
            ..CampaignConfig::new(mode)
        }
    }

    #[test]
    fn validation() {
        assert!(cfg(Mode::Main, 0.5, &[5, 10]).validate().is_ok());
        assert!(cfg(Mode::Main, 1.2, &[5]).validate().is_err());
        assert!(cfg(Mode::Main, 0.5, &[10, 5]).validate().is_err());
        assert!(cfg(Mode::Ah, 0.0, &[5, 5]).validate().is_err());
        assert!(cfg(Mode::Ah, 0.0, &[5]).validate().is_ok());
        assert!(cfg(Mode::ContourOracle, 0.5, &[30]).validate().is_err());
        let mut t = cfg(Mode::TorusFormulas, 0.3, &[1, 2]);
        t.torus = (2, 4);
        assert!(t.validate().is_err());
    }

    #[test]
    fn main_first_color_is_one() {
        let rows = verify_main(0.5, &[1], 128, false).unwrap();
        assert!(crate::rel_dist(&rows[0].exact, &BigComplex::one(128)) < 1e-30);
    }

    #[test]
    fn ah_single_row_csv() {
        let mut out = Vec::new();
        let mut diag = Vec::new();
        let code = run(&cfg(Mode::Ah, 0.0, &[10]), &mut out, &mut diag);
        assert_eq!(code, 0);
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[1].starts_with("10,0.0,"), "{}", lines[1]);
    }

    #[test]
    fn config_error_exit_code() {
        let code = run(&cfg(Mode::Main, 1.2, &[10]), &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, 2);
    }

    #[test]
    fn toml_overrides() {
        let f: ConfigFile = toml::from_str("u = 0.3\nn_list = [4, 8]\nformat = \"json\"\n").unwrap();
        let mut c = CampaignConfig::new(Mode::Main);
        f.apply(&mut c);
        assert_eq!((c.u, c.n_list.clone(), c.out_format), (0.3, vec![4, 8], OutFormat::Json));
        assert!(toml::from_str::<ConfigFile>("colour = 3").is_err());
    }
}
