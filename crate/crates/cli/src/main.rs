//! `rbm`: command-line front end for the half-plane reflected Brownian motion toolkit.
//!
//! Every subcommand writes a table to standard output (CSV with a header row by
//! default, or one JSON object per line), and diagnostics to standard error.
//! Exit codes: 0 success, 2 invalid parameters, 3 numerical failure, 4 a
//! failing verification criterion.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rbm_halfplane::asympt::{classify, law, RegimeTag, DEFAULT_TOL_COINCIDE};
use rbm_halfplane::boundary::{g_eval, nu_tail, Direction, TailObject};
use rbm_halfplane::green::{density_with, f_transform, DensityOptions};
use rbm_halfplane::martin::{check_harmonicity, harmonic, martin_limit, Family};
use rbm_halfplane::mc::{simulate_paths, Coordinates, Functional, Rect, SimConfig};
use rbm_halfplane::model::{apply, validate_and_normalize, ModelParams};
use rbm_halfplane::num_complex::Complex64;
use rbm_halfplane::verify::{run_suite, VerifyConfig};
use rbm_halfplane::{Error, NormalizedModel};

#[derive(Parser)]
#[command(
    name = "rbm",
    version,
    about = "Occupancy measures of obliquely reflected Brownian motion in a half-plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq, Eq)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu1: f64,
    #[arg(long, allow_hyphen_values = true)]
    mu2: f64,
    #[arg(long, allow_hyphen_values = true)]
    r: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    sigma11: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    sigma12: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    sigma22: f64,
    /// Starting point (raw coordinates).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x2: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl ModelArgs {
    fn model(&self) -> Result<NormalizedModel, Error> {
        let params = ModelParams::new([self.mu1, self.mu2], self.r)
            .with_sigma([[self.sigma11, self.sigma12], [self.sigma12, self.sigma22]])
            .with_start([self.x1, self.x2]);
        validate_and_normalize(&params)
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum MgfArg {
    F,
    G,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel geometry, poles and angle thresholds.
    Inspect {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Boundary transform g at a complex theta1.
    G {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta1_im: f64,
    },
    /// Interior transform f at a complex pair (theta1, theta2).
    F {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta1_im: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta2: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta2_im: f64,
    },
    /// Occupancy density at a point (--z1 --z2) or along a ray (--alpha --rho).
    Density {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        z1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        z2: Option<f64>,
        /// Ray direction in radians, in (0, pi).
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Comma-separated radii along the ray.
        #[arg(long, value_delimiter = ',')]
        rho: Vec<f64>,
        /// Absolute tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Relative tolerance; useful far from the start where the density is tiny.
        #[arg(long, default_value_t = 0.0)]
        rel_tol: f64,
    },
    /// Regime and far-field law (a, b, c) over a grid of directions.
    Law {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated directions in radians; defaults to an even grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        /// Number of interior grid points when --alpha is absent.
        #[arg(long, default_value_t = 99)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_TOL_COINCIDE)]
        tol_coincide: f64,
    },
    /// Tail laws of the boundary occupancy measure in both directions.
    Tail {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Martin kernel limit at a point and harmonicity residuals of its family.
    Martin {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        /// Evaluation point (defaults to the starting point flags).
        #[arg(long, allow_hyphen_values = true)]
        at1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        at2: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        fd_step: f64,
    },
    /// Monte Carlo estimates with standard errors.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200_000)]
        paths: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 30.0)]
        stop_left: f64,
        #[arg(long, default_value_t = 1e4)]
        tmax: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_antithetic: bool,
        /// Simulate in raw coordinates with correlated increments.
        #[arg(long)]
        raw: bool,
        /// Box z1lo,z1hi,z2lo,z2hi (repeatable).
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true, action = clap::ArgAction::Append)]
        boxes: Vec<f64>,
        /// Boundary interval a,b (repeatable; b may be inf).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, action = clap::ArgAction::Append)]
        interval: Vec<f64>,
        /// Transform to estimate at (--theta1, --theta2).
        #[arg(long, value_enum)]
        mgf: Option<MgfArg>,
        #[arg(long, allow_hyphen_values = true)]
        theta1: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta2: f64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Run the acceptance suite and print one line per criterion.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        paths: usize,
        #[arg(long, default_value_t = 100_000)]
        covariance_paths: usize,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Format::Json => {
                for row in &self.rows {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| format!("{}:{}", serde_json::Value::from(*k), json_cell(v)))
                        .collect();
                    let _ = writeln!(out, "{{{}}}", fields.join(","));
                }
            }
        }
        out
    }
}

/// Shortest representation that parses back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => num(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) if v.is_finite() => num(*v),
        Cell::Num(_) | Cell::Missing => "null".to_string(),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => serde_json::Value::from(s.as_str()).to_string(),
    }
}

enum Failure {
    Invalid(String),
    Numerical(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } | Error::BudgetExceeded { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Failure::Invalid(format!(
            "--alpha {alpha} is outside (0, pi); angles are in radians"
        )));
    }
    Ok(())
}

fn inspect(args: &ModelArgs) -> Result<String, Failure> {
    let m = args.model()?;
    let g = m.geometry();
    let mut t = Table::new(&[
        "mu1",
        "mu2",
        "r",
        "drift_sign",
        "theta1_minus",
        "theta1_plus",
        "theta1p",
        "pole_zero",
        "r_dot_theta_plus",
        "r_dot_theta_minus",
        "alpha_mu",
        "alpha_r",
        "alpha0",
        "alpha1",
        "strip_lo",
        "strip_hi",
        "det_t",
    ]);
    t.push(vec![
        m.mu[0].into(),
        m.mu[1].into(),
        m.r.into(),
        m.drift_sign.as_str().into(),
        g.theta1_minus.into(),
        g.theta1_plus.into(),
        g.pole_p.into(),
        g.pole_zero.into(),
        g.r_dot_theta_plus.into(),
        g.r_dot_theta_minus.into(),
        g.alpha_mu.into(),
        g.alpha_r.into(),
        g.alpha0.into(),
        g.alpha1.into(),
        g.strip.0.into(),
        g.strip.1.into(),
        m.det_t.into(),
    ]);
    Ok(t.render(args.format))
}

fn density_cmd(
    args: &ModelArgs,
    z: (Option<f64>, Option<f64>),
    alpha: Option<f64>,
    rho: &[f64],
    tol: f64,
    rel_tol: f64,
) -> Result<String, Failure> {
    let m = args.model()?;
    if !(tol >= 0.0 && rel_tol >= 0.0 && (tol > 0.0 || rel_tol > 0.0)) {
        return Err(Failure::Invalid(
            "tolerances must be nonnegative and not both zero".into(),
        ));
    }
    let opts = DensityOptions {
        abs_tol: tol,
        rel_tol,
        ..DensityOptions::default()
    };
    match (z, alpha) {
        ((Some(z1), Some(z2)), None) => {
            let d = density_with(&m, [z1, z2], &opts)?;
            let mut t = Table::new(&[
                "z1",
                "z2",
                "value",
                "abs_err",
                "nodes",
                "abscissa",
                "truncation_height",
            ]);
            t.push(vec![
                z1.into(),
                z2.into(),
                d.value.into(),
                d.abs_error_estimate.into(),
                d.nodes_used.into(),
                d.contour_abscissa.into(),
                d.truncation_height.into(),
            ]);
            Ok(t.render(args.format))
        }
        ((None, None), Some(a)) if !rho.is_empty() => {
            check_alpha(a)?;
            // the law lives in normalized coordinates: follow the ray there and scale by |det T|
            let dir = apply(&m.t, [a.cos(), a.sin()]);
            let stretch = dir[0].hypot(dir[1]);
            let l = law(&m, dir[1].atan2(dir[0]), DEFAULT_TOL_COINCIDE)?;
            let mut t = Table::new(&[
                "rho",
                "alpha",
                "value",
                "abs_err",
                "regime",
                "law_value",
                "ratio",
            ]);
            for &r in rho {
                let d = density_with(&m, [r * a.cos(), r * a.sin()], &opts)?;
                let lv = m.det_t.abs() * l.eval(stretch * r);
                t.push(vec![
                    r.into(),
                    a.into(),
                    d.value.into(),
                    d.abs_error_estimate.into(),
                    l.regime.tag.as_str().into(),
                    lv.into(),
                    (d.value / lv).into(),
                ]);
            }
            Ok(t.render(args.format))
        }
        _ => Err(Failure::Invalid(
            "density needs either --z1 and --z2, or --alpha with --rho".into(),
        )),
    }
}

fn law_cmd(args: &ModelArgs, alphas: &[f64], grid: usize, tol: f64) -> Result<String, Failure> {
    let m = args.model()?;
    let alphas: Vec<f64> = if alphas.is_empty() {
        (1..=grid)
            .map(|k| PI * k as f64 / (grid + 1) as f64)
            .collect()
    } else {
        alphas.to_vec()
    };
    let mut t = Table::new(&[
        "alpha",
        "regime",
        "prefactor",
        "power",
        "rate",
        "theta1_alpha",
    ]);
    for a in alphas {
        check_alpha(a)?;
        let l = law(&m, a, tol)?;
        t.push(vec![
            a.into(),
            l.regime.tag.as_str().into(),
            l.prefactor.into(),
            l.power.into(),
            l.rate.into(),
            l.regime.theta1_alpha.into(),
        ]);
    }
    Ok(t.render(args.format))
}

fn tail_cmd(args: &ModelArgs) -> Result<String, Failure> {
    let m = args.model()?;
    let mut t = Table::new(&[
        "direction",
        "object",
        "prefactor",
        "power",
        "rate",
        "derived_by_symmetry",
        "status",
    ]);
    for (dname, d) in [
        ("plus", Direction::PlusInfinity),
        ("minus", Direction::MinusInfinity),
    ] {
        for (oname, o) in [("density", TailObject::Density), ("tail", TailObject::Tail)] {
            match nu_tail(&m, d, o) {
                Ok(l) => t.push(vec![
                    dname.into(),
                    oname.into(),
                    l.prefactor.into(),
                    l.power.into(),
                    l.rate.into(),
                    l.derived_by_symmetry.into(),
                    "ok".into(),
                ]),
                Err(e @ (Error::ZeroDriftUnsupportedDirection | Error::InfiniteTailMass)) => t
                    .push(vec![
                        dname.into(),
                        oname.into(),
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Text(e.to_string()),
                    ]),
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(t.render(args.format))
}

fn martin_cmd(
    args: &ModelArgs,
    alphas: &[f64],
    at: (Option<f64>, Option<f64>),
    step: f64,
) -> Result<String, Failure> {
    let m = args.model()?;
    if alphas.is_empty() {
        return Err(Failure::Invalid("martin needs --alpha".into()));
    }
    if step.is_nan() || step <= 0.0 {
        return Err(Failure::Invalid("--fd-step must be positive".into()));
    }
    let x = [at.0.unwrap_or(args.x1), at.1.unwrap_or(args.x2)];
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for i in 0..10 {
        for j in 0..10 {
            let p = [3.0 * i as f64 / 9.0, 3.0 * j as f64 / 9.0];
            interior.push(p);
            if j == 0 {
                boundary.push(p);
            }
        }
    }
    let mut t = Table::new(&[
        "alpha",
        "x1",
        "x2",
        "family",
        "limit",
        "interior_residual",
        "boundary_residual",
        "max_abs",
    ]);
    for &a in alphas {
        check_alpha(a)?;
        let limit = martin_limit(&m, a, x)?;
        let (fam, name) = match classify(&m, a, DEFAULT_TOL_COINCIDE)?.tag {
            RegimeTag::PoleP | RegimeTag::CoincidenceP | RegimeTag::A3Pole => {
                (Family::Pole, "pole")
            }
            RegimeTag::PoleZero | RegimeTag::CoincidenceZero => (Family::Constant, "constant"),
            RegimeTag::Saddle | RegimeTag::A3Saddle => (Family::Saddle(a), "saddle"),
        };
        let h = harmonic(&m, fam)?;
        let rep = check_harmonicity(&h, &interior, &boundary, step);
        t.push(vec![
            a.into(),
            x[0].into(),
            x[1].into(),
            name.into(),
            limit.into(),
            rep.interior_residual.into(),
            rep.boundary_residual.into(),
            rep.max_abs.into(),
        ]);
    }
    Ok(t.render(args.format))
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    args: &ModelArgs,
    config: SimConfig,
    boxes: &[f64],
    intervals: &[f64],
    mgf: Option<MgfArg>,
    theta: (Option<f64>, f64),
) -> Result<String, Failure> {
    let m = args.model()?;
    if !boxes.len().is_multiple_of(4) || !intervals.len().is_multiple_of(2) {
        return Err(Failure::Invalid(
            "--box takes z1lo,z1hi,z2lo,z2hi and --interval takes a,b".into(),
        ));
    }
    let mut funcs = Vec::new();
    let mut names = Vec::new();
    for b in boxes.chunks(4) {
        funcs.push(Functional::Occupancy(Rect {
            z1: (b[0], b[1]),
            z2: (b[2], b[3]),
        }));
        names.push(format!(
            "box[{}:{}]x[{}:{}]",
            num(b[0]),
            num(b[1]),
            num(b[2]),
            num(b[3])
        ));
    }
    for iv in intervals.chunks(2) {
        funcs.push(Functional::Boundary(iv[0], iv[1]));
        names.push(format!("interval({}:{})", num(iv[0]), num(iv[1])));
    }
    match (mgf, theta.0) {
        (Some(kind), Some(t1)) => {
            let th = [t1, theta.1];
            let (f, n) = match kind {
                MgfArg::F => (Functional::TimeMgf(th), "f"),
                MgfArg::G => (Functional::LocalMgf(th), "g"),
            };
            funcs.push(f);
            names.push(format!("{n}({};{})", num(th[0]), num(th[1])));
        }
        (None, None) => {}
        _ => return Err(Failure::Invalid("--mgf and --theta1 go together".into())),
    }
    if funcs.is_empty() {
        return Err(Failure::Invalid(
            "simulate needs at least one --box, --interval or --mgf".into(),
        ));
    }
    let acc = simulate_paths(&m, &config, &funcs)?;
    let mut t = Table::new(&[
        "functional",
        "value",
        "std_error",
        "paths",
        "truncation_fraction",
        "flagged",
    ]);
    for (name, e) in names.iter().zip(acc.estimates()) {
        t.push(vec![
            Cell::Text(name.clone()),
            e.value.into(),
            e.std_error.into(),
            e.paths.into(),
            e.truncation_fraction.into(),
            e.flagged.into(),
        ]);
    }
    Ok(t.render(args.format))
}

fn verify_cmd(cfg: VerifyConfig) -> Result<String, Failure> {
    let mut all = true;
    let results = run_suite(&cfg, |r| {
        // timings are nondeterministic, so they go to standard error only
        eprintln!(
            "criterion {} took {:.2} s (limit {} s)",
            r.id,
            r.elapsed.as_secs_f64(),
            r.time_limit.as_secs()
        );
        println!(
            "criterion {}: {} {}: {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.title,
            r.detail
        );
    })?;
    for r in &results {
        all &= r.passed;
    }
    if all {
        Ok(String::new())
    } else {
        Err(Failure::Verify)
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Inspect { model } => inspect(&model),
        Command::G {
            model,
            theta1,
            theta1_im,
        } => {
            let m = model.model()?;
            let v = g_eval(&m, Complex64::new(theta1, theta1_im))?;
            let mut t = Table::new(&["theta1_re", "theta1_im", "g_re", "g_im"]);
            t.push(vec![
                theta1.into(),
                theta1_im.into(),
                v.re.into(),
                v.im.into(),
            ]);
            Ok(t.render(model.format))
        }
        Command::F {
            model,
            theta1,
            theta1_im,
            theta2,
            theta2_im,
        } => {
            let m = model.model()?;
            let th = [
                Complex64::new(theta1, theta1_im),
                Complex64::new(theta2, theta2_im),
            ];
            let v = f_transform(&m, th)?;
            let mut t = Table::new(&[
                "theta1_re",
                "theta1_im",
                "theta2_re",
                "theta2_im",
                "value",
                "value_im",
            ]);
            t.push(vec![
                theta1.into(),
                theta1_im.into(),
                theta2.into(),
                theta2_im.into(),
                v.re.into(),
                v.im.into(),
            ]);
            Ok(t.render(model.format))
        }
        Command::Density {
            model,
            z1,
            z2,
            alpha,
            rho,
            tol,
            rel_tol,
        } => density_cmd(&model, (z1, z2), alpha, &rho, tol, rel_tol),
        Command::Law {
            model,
            alpha,
            grid,
            tol_coincide,
        } => law_cmd(&model, &alpha, grid, tol_coincide),
        Command::Tail { model } => tail_cmd(&model),
        Command::Martin {
            model,
            alpha,
            at1,
            at2,
            fd_step,
        } => martin_cmd(&model, &alpha, (at1, at2), fd_step),
        Command::Simulate {
            model,
            paths,
            step,
            stop_left,
            tmax,
            seed,
            no_antithetic,
            raw,
            boxes,
            interval,
            mgf,
            theta1,
            theta2,
            threads,
        } => {
            let config = SimConfig {
                step,
                stop_left,
                t_max: tmax,
                paths,
                seed,
                antithetic: !no_antithetic,
                coordinates: if raw {
                    Coordinates::Raw
                } else {
                    Coordinates::Normalized
                },
                threads,
            };
            simulate_cmd(&model, config, &boxes, &interval, mgf, (theta1, theta2))
        }
        Command::Verify {
            seed,
            paths,
            covariance_paths,
            threads,
        } => verify_cmd(VerifyConfig {
            seed,
            paths,
            covariance_paths,
            threads,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Verify) => {
            eprintln!("verification failed");
            ExitCode::from(4)
        }
    }
}
