//! `sig` — signature tables of axial-linear curves, Beta-kernel inversion,
//! and the experiment harness.
//!
//! Exit codes: 0 success, 1 configuration error (unknown command, malformed
//! config, unreadable file), 2 numerical failure (quadrature
//! non-convergence).

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use sig_cli::config::{self, FileConfig};
use sig_cli::experiments::{self as exp};
use sig_cli::{parallel, CliError};
use sig_core::curve::{self, Curve, ParamValue, Params};
use sig_core::norms::ModContConfig;
use sig_core::quad::QuadConfig;
use sig_core::RationalScheme;

#[derive(Parser)]
#[command(
    name = "sig",
    version,
    about = "Signature coefficients of axial-linear curves and their inversion",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a coefficient table and write it as JSON (or CSV by extension).
    Table(CommonArgs),
    /// Recover a derivative value from a table along a rational scheme.
    Invert(CommonArgs),
    /// Reconstruct the curve trace from table profiles.
    Trace(CommonArgs),
    /// Recover the curve length from a table diagonal.
    Length(CommonArgs),
    /// Error-decay study against the Holder rate bound.
    Rate(CommonArgs),
    /// Asymptotic-norm sequences vs C1/BV distances for a curve pair.
    Norms(CommonArgs),
    /// Shrinking helix loops: projective bound falls, BV distance stays.
    Discont(CommonArgs),
    /// Modulus-of-continuity frontier for perturbed curves.
    Modcont(CommonArgs),
    /// Verify the fast-decay envelope of the Beta kernels.
    Fastdecay(CommonArgs),
    /// Quadrature table vs Chen-product signature of a sampled polyline.
    Crosscheck(CommonArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file; flags win on conflict.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Analytic preset name (linear|monomial|sine|helix|holder_kink|polynomial).
    #[arg(long)]
    preset: Option<String>,
    /// Second preset (curve B) for pair experiments.
    #[arg(long)]
    preset_b: Option<String>,
    /// Monomial exponent m.
    #[arg(long)]
    m: Option<u32>,
    /// Linear preset slope.
    #[arg(long)]
    slope: Option<f64>,
    /// Sine preset frequency.
    #[arg(long)]
    freq: Option<f64>,
    /// Helix turn count (also the modcont perturbation frequency).
    #[arg(long)]
    turns: Option<u32>,
    /// Holder exponent (holder_kink preset and rate bound).
    #[arg(long)]
    alpha: Option<f64>,
    /// Kink location of the holder_kink preset.
    #[arg(long)]
    x0: Option<f64>,
    /// Polynomial derivative coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<f64>>,
    /// Polyline CSV (s,x1,...,xd) to reparameterize into a curve.
    #[arg(long)]
    polyline: Option<PathBuf>,
    /// Axial index for --polyline ingestion (1-based).
    #[arg(long)]
    i: Option<usize>,
    /// Coefficient table JSON to load instead of building one.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot output.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Table truncation level.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Scheme denominator cap / sequence length.
    #[arg(long)]
    nmax: Option<usize>,
    /// Recovery target x in [0,1].
    #[arg(long)]
    x: Option<f64>,
    /// Component index j (1-based, non-axial).
    #[arg(long)]
    j: Option<usize>,
    /// Rational scheme: naive|decimal|cf.
    #[arg(long)]
    scheme: Option<String>,
    /// Fast-decay exponent in (0, 1/2).
    #[arg(long)]
    eps0: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long)]
    seed: Option<u64>,
    /// Extra random evaluation points in rate sweeps.
    #[arg(long)]
    samples: Option<usize>,
    /// Slack added to the rate bound for the slope comparison.
    #[arg(long)]
    slack: Option<f64>,
    /// Quadrature relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Gauss-Legendre nodes per panel.
    #[arg(long)]
    points: Option<usize>,
    /// Emit the raw (sign/log) table variant instead of scaled cells.
    #[arg(long)]
    raw: bool,
    /// Polyline vertices for Chen signatures.
    #[arg(long)]
    vertices: Option<usize>,
    /// Highest signature level for cross-checks.
    #[arg(long)]
    maxlevel: Option<usize>,
    /// Helix winding counts for the discontinuity demo, comma separated.
    #[arg(long, value_delimiter = ',')]
    ms: Option<Vec<u32>>,
    /// Levels n for the fast-decay sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    /// Grid size of the fast-decay s-scan.
    #[arg(long)]
    sgrid: Option<usize>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    parallel::configure_threads();
    let started = Instant::now();
    match dispatch(cli) {
        Ok(summary) => {
            println!("{summary}");
            println!("wall time: {} ms", started.elapsed().as_millis());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}

struct Resolved {
    args: CommonArgs,
    file: FileConfig,
}

impl Resolved {
    fn new(args: CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(Self { args, file })
    }

    fn quad(&self) -> QuadConfig {
        let mut cfg = QuadConfig::default();
        if let Some(tol) = self.args.tol.or(self.file.tol) {
            cfg.rel_tol = tol;
        }
        if let Some(points) = self.args.points.or(self.file.points) {
            cfg.points = points;
        }
        cfg
    }

    fn out(&self) -> Option<PathBuf> {
        self.args
            .out
            .clone()
            .or_else(|| self.file.out.as_ref().map(PathBuf::from))
    }

    fn plot(&self) -> Option<PathBuf> {
        self.args
            .plot
            .clone()
            .or_else(|| self.file.plot.as_ref().map(PathBuf::from))
    }

    fn scheme(&self) -> Result<RationalScheme, CliError> {
        match self.args.scheme.as_deref().or(self.file.scheme.as_deref()) {
            Some(name) => config::parse_scheme(name),
            None => Ok(RationalScheme::Naive),
        }
    }

    /// Preset params assembled from flags (flags win over the config curve).
    fn flag_params(&self) -> Params {
        let mut params = Params::new();
        let mut put = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                params.insert(key.to_string(), ParamValue::Number(v));
            }
        };
        put("m", self.args.m.map(f64::from));
        put("slope", self.args.slope);
        put("freq", self.args.freq);
        put("n", self.args.turns.map(f64::from));
        put("alpha", self.args.alpha);
        put("x0", self.args.x0);
        if let Some(coeffs) = &self.args.coeffs {
            params.insert("coeffs".to_string(), ParamValue::List(coeffs.clone()));
        }
        params
    }

    /// Primary curve from flags, config, or polyline (in that order).
    fn curve(&self) -> Result<Option<Curve>, CliError> {
        if let Some(preset) = &self.args.preset {
            return Ok(Some(
                curve::make_preset(preset, &self.flag_params())
                    .map_err(|e| CliError::config(e.to_string()))?,
            ));
        }
        if let Some(spec) = &self.file.curve {
            return Ok(Some(config::curve_from_json(spec)?));
        }
        let polyline = self
            .args
            .polyline
            .clone()
            .or_else(|| self.file.polyline.as_ref().map(PathBuf::from));
        if let Some(path) = polyline {
            let poly = config::polyline_from_csv(&path)?;
            let axis = self.args.i.or(self.file.i).unwrap_or(1);
            return Ok(Some(
                curve::reparameterize_to_axial_linear(&poly, axis)
                    .map_err(|e| CliError::config(e.to_string()))?,
            ));
        }
        Ok(None)
    }

    fn require_curve(&self) -> Result<Curve, CliError> {
        self.curve()?.ok_or_else(|| {
            CliError::config("no curve given: use --preset, --polyline, or a config `curve`")
        })
    }

    /// Secondary curve for pair experiments: `--preset-b` (sharing the same
    /// param flags) or the config's `curve_b`.
    fn curve_b(&self) -> Result<Option<Curve>, CliError> {
        if let Some(preset) = &self.args.preset_b {
            return Ok(Some(
                curve::make_preset(preset, &self.flag_params())
                    .map_err(|e| CliError::config(e.to_string()))?,
            ));
        }
        if let Some(spec) = &self.file.curve_b {
            return Ok(Some(config::curve_from_json(spec)?));
        }
        Ok(None)
    }

    fn table_path(&self) -> Option<PathBuf> {
        self.args
            .table
            .clone()
            .or_else(|| self.file.table.as_ref().map(PathBuf::from))
    }

    fn n(&self, default: usize) -> usize {
        self.args.n.or(self.file.n).unwrap_or(default)
    }

    fn nmax(&self, default: usize) -> usize {
        self.args.nmax.or(self.file.nmax).unwrap_or(default)
    }

    fn x(&self, default: f64) -> f64 {
        self.args.x.or(self.file.x).unwrap_or(default)
    }

    fn eps0(&self, default: f64) -> f64 {
        self.args.eps0.or(self.file.eps0).unwrap_or(default)
    }

    fn seed(&self) -> u64 {
        self.args.seed.or(self.file.seed).unwrap_or(0)
    }

    fn require_out(&self) -> Result<PathBuf, CliError> {
        self.out()
            .ok_or_else(|| CliError::config("this command needs --out <file>"))
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.cmd {
        Cmd::Table(args) => {
            let r = Resolved::new(args)?;
            let curve = r.require_curve()?;
            let cmd = exp::TableCmd {
                n: r.n(64),
                raw: r.args.raw || r.file.raw.unwrap_or(false),
                out: r.require_out()?,
                quad: r.quad(),
                curve,
            };
            exp::run_table(&cmd)
        }
        Cmd::Invert(args) => {
            let r = Resolved::new(args)?;
            let oracle = r.curve()?;
            let quad = r.quad();
            let n_build = r.n(r.nmax(64));
            let table =
                exp::table_from_source(r.table_path().as_deref(), oracle.as_ref(), n_build, &quad)?;
            let n_max = r.nmax(table.n_max());
            let cmd = exp::InvertCmd {
                j: r.args.j.or(r.file.j).unwrap_or(exp::first_non_axial(&table)),
                x: r.x(0.5),
                scheme: r.scheme()?,
                n_max,
                out: r.out(),
                plot: r.plot(),
                oracle,
                table,
            };
            exp::run_invert(&cmd)
        }
        Cmd::Trace(args) => {
            let r = Resolved::new(args)?;
            let oracle = r.curve()?;
            let quad = r.quad();
            let n_build = r.n(128);
            let table =
                exp::table_from_source(r.table_path().as_deref(), oracle.as_ref(), n_build, &quad)?;
            let cmd = exp::TraceCmd {
                n: r.n(table.n_max()).min(table.n_max()),
                out: r.require_out()?,
                plot: r.plot(),
                oracle,
                table,
            };
            exp::run_trace(&cmd)
        }
        Cmd::Length(args) => {
            let r = Resolved::new(args)?;
            let oracle = r.curve()?;
            let quad = r.quad();
            let n_build = r.n(128);
            let table =
                exp::table_from_source(r.table_path().as_deref(), oracle.as_ref(), n_build, &quad)?;
            let cmd = exp::LengthCmd {
                n: r.n(table.n_max()).min(table.n_max()),
                out: r.out(),
                table,
            };
            exp::run_length(&cmd)
        }
        Cmd::Rate(args) => {
            let r = Resolved::new(args)?;
            let curve = r.require_curve()?;
            // Default evaluation point: the kink location if one is known.
            let default_x = curve.breakpoints().first().copied().unwrap_or(0.5);
            let mut quad = r.quad();
            if r.args.tol.or(r.file.tol).is_none() {
                // Error values are O(q^{-1/4}); certifying 1e-11 across a
                // Holder kink would burn panels for nothing.
                quad.rel_tol = 1e-7;
            }
            let cmd = exp::RateCmd {
                j: 2,
                x: r.x(default_x),
                scheme: r.scheme()?,
                eps0: r.eps0(0.1),
                q_max: r.nmax(256),
                slack: r.args.slack.or(r.file.slack).unwrap_or(0.15),
                samples: r.args.samples.or(r.file.samples).unwrap_or(0),
                seed: r.seed(),
                quad,
                out: r.out(),
                plot: r.plot(),
                curve,
            };
            exp::run_rate(&cmd).map(|(summary, _)| summary)
        }
        Cmd::Norms(args) => {
            let r = Resolved::new(args)?;
            let curve_a = r.require_curve()?;
            let curve_b = r.curve_b()?.ok_or_else(|| {
                CliError::config("norms needs a second curve: --preset-b or config `curve_b`")
            })?;
            let cmd = exp::NormsCmd {
                n: r.n(64),
                quad: r.quad(),
                out: r.out(),
                plot: r.plot(),
                curve_a,
                curve_b,
            };
            exp::run_norms(&cmd)
        }
        Cmd::Discont(args) => {
            let r = Resolved::new(args)?;
            let cmd = exp::DiscontCmd {
                ms: r
                    .args
                    .ms
                    .clone()
                    .or_else(|| r.file.ms.clone())
                    .unwrap_or_else(|| vec![1, 2, 4, 8, 16]),
                n: r.n(10),
                vertices: r.args.vertices.or(r.file.vertices).unwrap_or(2048),
                quad: r.quad(),
                out: r.out(),
                plot: r.plot(),
            };
            exp::run_discont(&cmd)
        }
        Cmd::Modcont(args) => {
            let r = Resolved::new(args)?;
            let base = r.curve()?.unwrap_or_else(|| Curve::monomial(1));
            let defaults = ModContConfig::default();
            let config = ModContConfig {
                eps_grid: r.file.epsgrid.clone().unwrap_or(defaults.eps_grid),
                alpha: r.args.alpha.or(r.file.alpha).unwrap_or(defaults.alpha),
                eps0: r.eps0(defaults.eps0),
                k_bound: r.file.kbound.unwrap_or(defaults.k_bound),
                cbar1: r.file.cbar1.unwrap_or(defaults.cbar1),
                cbar2: r.file.cbar2.unwrap_or(defaults.cbar2),
                n_max: r.n(defaults.n_max),
                vertices: r.args.vertices.or(r.file.vertices).unwrap_or(defaults.vertices),
                scales: r.file.scales.clone().unwrap_or(defaults.scales),
                frequency: r.args.turns.or(r.file.frequency).unwrap_or(defaults.frequency),
                check_grid: defaults.check_grid,
            };
            let cmd = exp::ModContCmd {
                base,
                config,
                out: r.out(),
                plot: r.plot(),
            };
            exp::run_modcont(&cmd)
        }
        Cmd::Fastdecay(args) => {
            let r = Resolved::new(args)?;
            let cmd = exp::FastDecayCmd {
                ns: r
                    .args
                    .ns
                    .clone()
                    .or_else(|| r.file.ns.clone())
                    .unwrap_or_else(|| vec![1000]),
                eps0: r.eps0(0.25),
                s_grid: r.args.sgrid.or(r.file.sgrid).unwrap_or(10_000),
                out: r.out(),
            };
            exp::run_fastdecay(&cmd)
        }
        Cmd::Crosscheck(args) => {
            let r = Resolved::new(args)?;
            let curve = match r.curve()? {
                Some(c) => c,
                None => Curve::monomial(1),
            };
            let cmd = exp::CrossCheckCmd {
                vertices: r.args.vertices.or(r.file.vertices).unwrap_or(10_000),
                max_level: r.args.maxlevel.or(r.file.maxlevel).unwrap_or(8),
                quad: r.quad(),
                out: r.out(),
                curve,
            };
            exp::run_crosscheck(&cmd)
        }
    }
}
