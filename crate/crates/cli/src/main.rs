//! Command-line front end for the cavity STA toolkit.
//!
//! Four subcommands cover the pipeline: `sta-compute` tabulates a
//! reference drive against its effective shortcut, `energy` samples the
//! stress tensor and adiabaticity curves, `certify` checks residuals,
//! and `otto` sweeps engine cycles over stroke times. Output is CSV or
//! JSON with a commented metadata header; identical invocations produce
//! bit-identical files. Exit codes: 0 on success, 2 for configuration
//! errors, 3 for numerical failures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use cavity_sta::numerics::quad::QuadCfg;
use cavity_sta::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cavity-sta", version, about = "Moving-mirror cavity simulator", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the reference trajectory and its effective shortcut.
    StaCompute(StaComputeArgs),
    /// Sample energy density maps and adiabaticity curves.
    Energy(EnergyArgs),
    /// Certify residuals for a drive and its shortcut partner.
    Certify(CertifyArgs),
    /// Sweep Otto cycles over stroke times and fit the friction decay.
    Otto(OttoArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Trajectory: inline JSON or a path to a JSON file.
    #[arg(long)]
    traj: String,
    /// Output file; companion files reuse its stem.
    #[arg(long)]
    out: PathBuf,
    /// Table format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct StaComputeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Time grid `a:b:n`; defaults to the padded motion window.
    #[arg(long)]
    t_grid: Option<String>,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Preparation temperatures, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    temps: Vec<f64>,
    /// Time grid `a:b:n`; defaults to the padded motion window.
    #[arg(long)]
    t_grid: Option<String>,
    /// Space grid `a:b:n`; defaults to the full cavity.
    #[arg(long)]
    x_grid: Option<String>,
    /// Absolute tolerance for energy quadrature.
    #[arg(long, default_value_t = 1e-11)]
    tol_quad: f64,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Residual sup-deviation below which a drive passes.
    #[arg(long, default_value_t = 1e-8)]
    tol_moore: f64,
}

#[derive(Args)]
struct OttoArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Bath temperatures at the long and short lengths: `T0,T1`.
    #[arg(long, value_delimiter = ',')]
    temps: Vec<f64>,
    /// Stroke-time grid `log:a:b:n` or `lin:a:b:n`.
    #[arg(long, default_value = "log:0.1:10:25")]
    tau_grid: String,
    /// Window `lo:hi` of stroke times used by the decay fit.
    #[arg(long)]
    fit_window: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    fn label(self) -> &'static str {
        self.extension()
    }
}

enum CliError {
    Config(String),
    Failure(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::StaCompute(args) => run_sta_compute(args),
        Command::Energy(args) => run_energy(args),
        Command::Certify(args) => run_certify(args),
        Command::Otto(args) => run_otto(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Shortest representation that round-trips; exponent form for extremes.
fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-4 && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Accept inline JSON (starts with `{`) or a path to a JSON file.
fn load_trajectory(input: &str) -> CliResult<(Trajectory, Value)> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        fs::read_to_string(input)
            .map_err(|e| CliError::Config(format!("cannot read trajectory file {input}: {e}")))?
    };
    let traj = Trajectory::from_json(&text)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let echo: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("trajectory is not valid JSON: {e}")))?;
    Ok((traj, echo))
}

struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    fn parse(text: &str, what: &str) -> CliResult<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("{what} grid must be a:b:n, got {text}")));
        }
        let a: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::Config(format!("{what} grid start {} is not a number", parts[0])))?;
        let b: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::Config(format!("{what} grid end {} is not a number", parts[1])))?;
        let n: usize = parts[2]
            .parse()
            .map_err(|_| CliError::Config(format!("{what} grid count {} is not an integer", parts[2])))?;
        Self::new(a, b, n, what)
    }

    fn new(a: f64, b: f64, n: usize, what: &str) -> CliResult<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(CliError::Config(format!("{what} grid needs finite end > start, got {a}:{b}")));
        }
        if n < 2 {
            return Err(CliError::Config(format!("{what} grid needs at least 2 points, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    fn points(&self) -> Vec<f64> {
        let step = (self.b - self.a) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.a + step * i as f64).collect()
    }

    fn echo(&self) -> String {
        format!("{}:{}:{}", fmt_f64(self.a), fmt_f64(self.b), self.n)
    }
}

/// `log:a:b:n` or `lin:a:b:n` (bare `a:b:n` means log spacing).
fn parse_tau_grid(text: &str) -> CliResult<(Vec<f64>, String)> {
    let (log, rest) = match text.split_once(':') {
        Some(("log", rest)) => (true, rest),
        Some(("lin", rest)) => (false, rest),
        _ => (true, text),
    };
    let grid = Grid::parse(rest, "tau")?;
    if log && grid.a <= 0.0 {
        return Err(CliError::Config(format!("log tau grid needs a positive start, got {}", grid.a)));
    }
    let points = if log {
        let ratio = grid.b / grid.a;
        (0..grid.n)
            .map(|i| grid.a * ratio.powf(i as f64 / (grid.n - 1) as f64))
            .collect()
    } else {
        grid.points()
    };
    let echo = format!("{}:{}", if log { "log" } else { "lin" }, grid.echo());
    Ok((points, echo))
}

fn parse_pair(text: &str, what: &str) -> CliResult<(f64, f64)> {
    let Some((lo, hi)) = text.split_once(':') else {
        return Err(CliError::Config(format!("{what} must be lo:hi, got {text}")));
    };
    let lo: f64 = lo
        .parse()
        .map_err(|_| CliError::Config(format!("{what} bound {lo} is not a number")))?;
    let hi: f64 = hi
        .parse()
        .map_err(|_| CliError::Config(format!("{what} bound {hi} is not a number")))?;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(CliError::Config(format!("{what} needs finite hi > lo, got {lo}:{hi}")));
    }
    Ok((lo, hi))
}

/// Commented key/value block echoed at the top of every table.
struct Meta {
    command: &'static str,
    entries: Vec<(&'static str, Value)>,
}

impl Meta {
    fn new(command: &'static str) -> Self {
        Self { command, entries: Vec::new() }
    }

    fn push(&mut self, key: &'static str, value: Value) -> &mut Self {
        self.entries.push((key, value));
        self
    }

    fn csv_header(&self, columns: &[&str]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# cavity-sta {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (key, value) in &self.entries {
            let rendered = match value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "# {key}: {rendered}");
        }
        let _ = writeln!(out, "{}", columns.join(","));
        out
    }

    fn json_value(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("tool".into(), json!("cavity-sta"));
        map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        map.insert("command".into(), json!(self.command));
        for (key, value) in &self.entries {
            map.insert((*key).into(), value.clone());
        }
        Value::Object(map)
    }
}

/// Write one table in the chosen format. `extra` is merged into the JSON
/// document next to `meta` and `rows` (CSV callers emit it separately).
fn write_table<T: Serialize>(
    path: &Path,
    format: Format,
    meta: &Meta,
    columns: &[&str],
    csv_rows: &[String],
    json_rows: &[T],
    extra: Option<(&'static str, Value)>,
) -> CliResult<()> {
    let body = match format {
        Format::Csv => {
            let mut out = meta.csv_header(columns);
            for row in csv_rows {
                let _ = writeln!(out, "{row}");
            }
            out
        }
        Format::Json => {
            let mut map = serde_json::Map::new();
            map.insert("meta".into(), meta.json_value());
            map.insert(
                "rows".into(),
                serde_json::to_value(json_rows).map_err(|e| CliError::Failure(e.to_string()))?,
            );
            if let Some((key, value)) = extra {
                map.insert(key.into(), value);
            }
            let mut text = serde_json::to_string_pretty(&Value::Object(map))
                .map_err(|e| CliError::Failure(e.to_string()))?;
            text.push('\n');
            text
        }
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, body)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sibling(out: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    out.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn default_time_grid(w: &dyn Worldline, n: usize) -> Grid {
    let (start, end) = w.motion_window();
    let a = start - 0.5 * w.in_length();
    let b = end + 0.5 * w.out_length();
    if b > a {
        Grid { a, b, n }
    } else {
        // static drive: frame one light-crossing time
        Grid { a: a - w.in_length(), b: b + w.in_length(), n }
    }
}

#[derive(Serialize)]
struct StaRow {
    t: f64,
    l_ref: f64,
    l_eff: f64,
    v_eff: f64,
}

fn run_sta_compute(args: StaComputeArgs) -> CliResult<()> {
    let (traj, echo) = load_trajectory(&args.io.traj)?;
    let effective = EffectiveTrajectory::from_trajectory(traj.clone())?;
    let grid = match &args.t_grid {
        Some(text) => Grid::parse(text, "time")?,
        None => default_time_grid(&effective, 1000),
    };

    let ts = grid.points();
    let rows: Vec<StaRow> = ts
        .iter()
        .map(|&t| -> Result<StaRow> {
            Ok(StaRow {
                t,
                l_ref: traj.length(t),
                l_eff: effective.length(t),
                v_eff: effective.derivs(t)?.speed,
            })
        })
        .collect::<Result<_>>()?;

    let mut meta = Meta::new("sta-compute");
    meta.push("traj", echo)
        .push("t-grid", json!(grid.echo()))
        .push("format", json!(args.io.format.label()));

    let columns = ["t", "L_ref", "L_eff", "v_eff"];
    let csv_rows: Vec<String> = rows
        .iter()
        .map(|r| {
            format!("{},{},{},{}", fmt_f64(r.t), fmt_f64(r.l_ref), fmt_f64(r.l_eff), fmt_f64(r.v_eff))
        })
        .collect();
    write_table(&args.io.out, args.io.format, &meta, &columns, &csv_rows, &rows, None)
}

#[derive(Serialize)]
struct DensityOut {
    t: f64,
    x: f64,
    ttt: Option<f64>,
    ttx: Option<f64>,
}

#[derive(Serialize)]
struct QstarRow {
    t: f64,
    e: f64,
    e_ad: f64,
    q_star: Option<f64>,
}

fn run_energy(args: EnergyArgs) -> CliResult<()> {
    let (traj, echo) = load_trajectory(&args.io.traj)?;
    if args.temps.is_empty() {
        return Err(CliError::Config("need at least one temperature".into()));
    }
    if args.temps.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(CliError::Config(format!("temperatures must be non-negative, got {:?}", args.temps)));
    }
    if !(args.tol_quad.is_finite() && args.tol_quad > 0.0) {
        return Err(CliError::Config(format!("quadrature tolerance must be positive, got {}", args.tol_quad)));
    }

    let sta = MooreFunction::wkb_from(traj.clone())?;
    let reference = MooreFunction::recursion_from(traj.clone())?;
    let quad = QuadCfg::with_abs_tol(args.tol_quad);

    let t_grid = match &args.t_grid {
        Some(text) => Grid::parse(text, "time")?,
        None => default_time_grid(sta.worldline(), 60),
    };
    let x_grid = match &args.x_grid {
        Some(text) => Grid::parse(text, "space")?,
        None => {
            let (_, l_max) = traj.length_bounds();
            Grid::new(0.0, l_max, 40, "space")?
        }
    };
    let ts = t_grid.points();
    let xs = x_grid.points();
    let ext = args.io.format.extension();

    for &temp in &args.temps {
        let state = ThermalState::new(temp, traj.in_length())?;

        let mut meta = Meta::new("energy");
        meta.push("traj", echo.clone())
            .push("temperature", json!(temp))
            .push("t-grid", json!(t_grid.echo()))
            .push("x-grid", json!(x_grid.echo()))
            .push("tol-quad", json!(args.tol_quad))
            .push("format", json!(args.io.format.label()));

        let density = sample_density(&sta, &state, &ts, &xs)?;
        let rows: Vec<DensityOut> =
            density.iter().map(|r| DensityOut { t: r.t, x: r.x, ttt: r.ttt, ttx: r.ttx }).collect();
        let csv_rows: Vec<String> = rows
            .iter()
            .map(|r| format!("{},{},{},{}", fmt_f64(r.t), fmt_f64(r.x), fmt_opt(r.ttt), fmt_opt(r.ttx)))
            .collect();
        let path = sibling(&args.io.out, &format!("_density_T{temp}"), ext);
        write_table(&path, args.io.format, &meta, &["t", "x", "Ttt", "Ttx"], &csv_rows, &rows, None)?;

        for (label, moore) in [("sta", &sta), ("reference", &reference)] {
            let c = state.energy_coefficient();
            let singular = state.is_singular();
            let rows: Vec<QstarRow> = exec::map(&ts, |&t| -> Result<QstarRow> {
                let e = total_energy_with(moore, &state, t, quad)?;
                let e_ad = c / moore.boundary_length(t);
                let q_star = if singular { None } else { Some(e / e_ad) };
                Ok(QstarRow { t, e, e_ad, q_star })
            })
            .into_iter()
            .collect::<Result<_>>()?;

            let mut meta = Meta::new("energy");
            meta.push("traj", echo.clone())
                .push("solver", json!(label))
                .push("temperature", json!(temp))
                .push("t-grid", json!(t_grid.echo()))
                .push("tol-quad", json!(args.tol_quad))
                .push("format", json!(args.io.format.label()));

            let csv_rows: Vec<String> = rows
                .iter()
                .map(|r| format!("{},{},{},{}", fmt_f64(r.t), fmt_f64(r.e), fmt_f64(r.e_ad), fmt_opt(r.q_star)))
                .collect();
            let path = sibling(&args.io.out, &format!("_qstar_{label}_T{temp}"), ext);
            write_table(&path, args.io.format, &meta, &["t", "E", "E_ad", "Qstar"], &csv_rows, &rows, None)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CertifyRow {
    source: &'static str,
    sup_deviation: f64,
    l2_deviation: f64,
    periodicity_gap: f64,
    period: f64,
    verdict: &'static str,
}

fn run_certify(args: CertifyArgs) -> CliResult<()> {
    if !(args.tol_moore.is_finite() && args.tol_moore > 0.0) {
        return Err(CliError::Config(format!("residual tolerance must be positive, got {}", args.tol_moore)));
    }
    let (traj, echo) = load_trajectory(&args.io.traj)?;

    let raw = MooreFunction::recursion_from(traj.clone())?;
    let raw_res = extract_residual(&raw, RESIDUAL_SAMPLES)?;
    let effective = EffectiveTrajectory::from_trajectory(traj)?;
    let sta = MooreFunction::recursion(Arc::new(effective))?;
    let sta_res = extract_residual(&sta, RESIDUAL_SAMPLES)?;

    let verdict = |sup: f64| if sup < args.tol_moore { "PASS" } else { "FAIL" };
    let rows = vec![
        CertifyRow {
            source: "reference",
            sup_deviation: raw_res.sup_deviation,
            l2_deviation: raw_res.l2_deviation,
            periodicity_gap: raw_res.periodicity_gap,
            period: raw_res.period,
            verdict: verdict(raw_res.sup_deviation),
        },
        CertifyRow {
            source: "sta",
            sup_deviation: sta_res.sup_deviation,
            l2_deviation: sta_res.l2_deviation,
            periodicity_gap: sta_res.periodicity_gap,
            period: sta_res.period,
            verdict: verdict(sta_res.sup_deviation),
        },
    ];
    for row in &rows {
        println!("{}: sup deviation {} -> {}", row.source, fmt_f64(row.sup_deviation), row.verdict);
    }

    let mut meta = Meta::new("certify");
    meta.push("traj", echo)
        .push("tol-moore", json!(args.tol_moore))
        .push("samples", json!(RESIDUAL_SAMPLES))
        .push("format", json!(args.io.format.label()));

    let columns = ["source", "sup_deviation", "l2_deviation", "periodicity_gap", "period", "verdict"];
    let csv_rows: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.source,
                fmt_f64(r.sup_deviation),
                fmt_f64(r.l2_deviation),
                fmt_f64(r.periodicity_gap),
                fmt_f64(r.period),
                r.verdict
            )
        })
        .collect();
    write_table(&args.io.out, args.io.format, &meta, &columns, &csv_rows, &rows, None)
}

#[derive(Serialize)]
struct OttoRow {
    tau: f64,
    stroke_kind: &'static str,
    w: Option<f64>,
    w_ad: f64,
    q: Option<f64>,
    eta: Option<f64>,
    eta_ad: f64,
    p: Option<f64>,
    error: Option<String>,
}

fn decay_fit_value(taus: &[f64], frictions: &[f64], window: (f64, f64)) -> Value {
    let mut ts = Vec::new();
    let mut fs = Vec::new();
    for (&tau, &fric) in taus.iter().zip(frictions) {
        if tau >= window.0 && tau <= window.1 {
            ts.push(tau);
            fs.push(fric);
        }
    }
    match power_decay_fit(&ts, &fs, DECAY_NOISE_FLOOR) {
        Ok(fit) => json!({
            "status": "ok",
            "exponent": fit.exponent,
            "std_error": fit.std_error,
            "ci": [fit.ci.0, fit.ci.1],
            "points": fit.points,
        }),
        Err(e) => json!({
            "status": "not applicable",
            "reason": e.to_string(),
        }),
    }
}

fn run_otto(args: OttoArgs) -> CliResult<()> {
    let (traj, echo) = load_trajectory(&args.io.traj)?;
    let l0 = traj.in_length();
    let l1 = traj.out_length();
    if args.temps.len() != 2 {
        return Err(CliError::Config(format!(
            "otto needs exactly two temperatures T0,T1, got {:?}",
            args.temps
        )));
    }
    let (taus, tau_echo) = parse_tau_grid(&args.tau_grid)?;
    let window = match &args.fit_window {
        Some(text) => parse_pair(text, "fit window")?,
        None => DECAY_FIT_WINDOW,
    };
    let base = OttoCycleSpec::new(l0, l1, args.temps[0], args.temps[1], taus[0], StrokeKind::Reference)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let adiabatic = cycle_adiabatic(&base)?;

    let sweep_rows = sweep(&base, &taus);
    let mut rows = Vec::with_capacity(sweep_rows.len());
    let mut fit_taus = Vec::new();
    let mut fit_frictions = Vec::new();
    for row in &sweep_rows {
        match (&row.result, &row.error) {
            (Some(res), _) => {
                if row.kind == StrokeKind::Reference {
                    fit_taus.push(row.tau);
                    fit_frictions.push(res.w_ad - res.w);
                }
                rows.push(OttoRow {
                    tau: row.tau,
                    stroke_kind: row.kind.label(),
                    w: Some(res.w),
                    w_ad: res.w_ad,
                    q: Some(res.q),
                    eta: res.eta,
                    eta_ad: res.eta_ad,
                    p: Some(res.power),
                    error: None,
                });
            }
            (None, err) => {
                let msg = err.clone().unwrap_or_else(|| "cycle failed".into());
                eprintln!("note: tau = {}, {}: {msg}", fmt_f64(row.tau), row.kind.label());
                rows.push(OttoRow {
                    tau: row.tau,
                    stroke_kind: row.kind.label(),
                    w: None,
                    w_ad: adiabatic.w_ad,
                    q: None,
                    eta: None,
                    eta_ad: adiabatic.eta_ad,
                    p: None,
                    error: Some(msg),
                });
            }
        }
    }

    let fit = json!({
        "window": [window.0, window.1],
        "noise_floor": DECAY_NOISE_FLOOR,
        "reference": decay_fit_value(&fit_taus, &fit_frictions, window),
        "sta": {
            "status": "not applicable",
            "reason": "sta strokes are frictionless by construction",
        },
    });

    let mut meta = Meta::new("otto");
    meta.push("traj", echo)
        .push("L0", json!(l0))
        .push("L1", json!(l1))
        .push("temps", json!(args.temps))
        .push("tau-grid", json!(tau_echo))
        .push("fit-window", json!(format!("{}:{}", fmt_f64(window.0), fmt_f64(window.1))))
        .push("format", json!(args.io.format.label()));

    let columns = ["tau", "stroke_kind", "W", "W_ad", "Q", "eta", "eta_ad", "P"];
    let csv_rows: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{}",
                fmt_f64(r.tau),
                r.stroke_kind,
                fmt_opt(r.w),
                fmt_f64(r.w_ad),
                fmt_opt(r.q),
                fmt_opt(r.eta),
                fmt_f64(r.eta_ad),
                fmt_opt(r.p)
            )
        })
        .collect();
    write_table(
        &args.io.out,
        args.io.format,
        &meta,
        &columns,
        &csv_rows,
        &rows,
        Some(("decay_fit", fit.clone())),
    )?;

    if args.io.format == Format::Csv {
        let side = sibling(&args.io.out, "_fit", "json");
        let doc = json!({ "meta": meta.json_value(), "decay_fit": fit });
        let mut text =
            serde_json::to_string_pretty(&doc).map_err(|e| CliError::Failure(e.to_string()))?;
        text.push('\n');
        fs::write(&side, text)?;
        println!("wrote {}", side.display());
    }
    Ok(())
}
