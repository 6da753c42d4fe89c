use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fig8::harness::{run, CampaignConfig, ConfigFile, Mode, OutFormat};

#[derive(Parser)]
#[command(name = "fig8", version, about = "Verification campaigns for the colored Jones polynomial of the figure-eight knot")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact J_N against the asymptotic expansion at fixed u
    VerifyMain(Common),
    /// Kashaev invariant against 3^{-1/4} N^{3/2} exp(N Vol/2pi)
    VerifyAh(Common),
    /// Sign and monotonicity of Phi at its saddle over a u-grid
    VerifyPhi0 {
        #[command(flatten)]
        common: Common,
        /// Number of grid points in (0, u_max)
        #[arg(long)]
        grid: Option<usize>,
    },
    /// J_N against its contour-integral reconstruction
    ContourOracle(Common),
    /// S_k(u) and T_k for the torus knot T(a, b); --n-list gives the k
    Torus {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: Option<u32>,
        #[arg(long)]
        b: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long, allow_negative_numbers = true)]
    u: Option<f64>,
    /// Comma-separated, strictly increasing
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Working precision in bits (default: $FIG8_PREC_BITS, then the mode default)
    #[arg(long)]
    prec_bits: Option<u32>,
    /// TOML file with the same keys; flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write elapsed_ms as 0 so repeated runs are byte-identical
    #[arg(long)]
    no_timing: bool,
}

fn build(mode: Mode, c: &Common) -> Result<CampaignConfig, String> {
    let mut cfg = CampaignConfig::new(mode);
    if mode == Mode::Ah {
        cfg.u = 0.0;
    }
    if let Some(path) = &c.config {
        ConfigFile::load(path).map_err(|e| e.to_string())?.apply(&mut cfg);
    }
    if let Some(u) = c.u {
        cfg.u = u;
    }
    if let Some(n) = &c.n_list {
        cfg.n_list = n.clone();
    }
    if c.tol.is_some() {
        cfg.tol = c.tol;
    }
    if let Some(f) = c.format {
        cfg.out_format = match f {
            Format::Csv => OutFormat::Csv,
            Format::Json => OutFormat::Json,
        };
    }
    if c.prec_bits.is_some() {
        cfg.prec_bits = c.prec_bits;
    }
    if c.no_timing {
        cfg.timing = false;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, common) = match &cli.cmd {
        Cmd::VerifyMain(c) => (build(Mode::Main, c), c),
        Cmd::VerifyAh(c) => (build(Mode::Ah, c), c),
        Cmd::ContourOracle(c) => (build(Mode::ContourOracle, c), c),
        Cmd::VerifyPhi0 { common, grid } => (
            build(Mode::Phi0, common).map(|mut cfg| {
                if let Some(g) = grid {
                    cfg.grid = *g;
                }
                cfg
            }),
            common,
        ),
        Cmd::Torus { common, a, b } => (
            build(Mode::TorusFormulas, common).map(|mut cfg| {
                if let Some(a) = a {
                    cfg.torus.0 = *a;
                }
                if let Some(b) = b {
                    cfg.torus.1 = *b;
                }
                cfg
            }),
            common,
        ),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut out: Box<dyn Write> = match &common.out {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    let code = run(&cfg, &mut out, &mut io::stderr());
    if out.flush().is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}
