//! Command-line orchestration for `echlab`: argument parsing, run
//! configuration files, report bundles and CSV/JSON/SVG output.

pub mod args;
pub mod cache;
pub mod commands;
pub mod gen;
pub mod num;
pub mod orbit_io;
pub mod profile_io;
pub mod report;
pub mod selftest;
pub mod svg;

use std::fmt;
use std::path::PathBuf;

use clap::Parser;
use serde::Deserialize;
use serde_json::{Map, Value as Json};

use args::{Cli, Command, Format};
use echlab_core::ellipsoid::RationalityGuard;
use echlab_core::twist::spectral::COMPLEX_DEGREE_MAX;
use echlab_core::twist::CALIBRATION;
use report::{Bundle, Calibration, Manifest, Plot, Table, Verdict};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum RunError {
    /// Bad arguments or a document that violates its schema. Exit code 2.
    Usage(String),
    /// A module refused the request (caps, unbounded profiles, calibration). Exit code 1.
    Module(String),
    /// `--help` or `--version` text. Exit code 0.
    Info(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) if m.starts_with("error:") => write!(f, "{}", m.trim_end()),
            RunError::Usage(m) => write!(f, "error: {m}"),
            RunError::Module(m) => write!(f, "error: {m}"),
            RunError::Info(m) => write!(f, "{m}"),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Module(_) => 1,
            RunError::Info(_) => 0,
        }
    }
}

pub(crate) fn usage(m: impl fmt::Display) -> RunError {
    RunError::Usage(m.to_string())
}

pub(crate) fn module(m: impl fmt::Display) -> RunError {
    RunError::Module(m.to_string())
}

/// Per-run settings shared by every handler.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub tol: Option<f64>,
    pub cap: Option<usize>,
}

impl Ctx {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn cap_or(&self, default: usize) -> usize {
        self.cap.unwrap_or(default)
    }
}

/// Collects tables, verdicts, plots and data, prefixing names inside selftest sections.
pub struct Out {
    prefix: String,
    pub data: Map<String, Json>,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    pub plots: Vec<Plot>,
}

impl Out {
    pub fn new() -> Self {
        Out { prefix: String::new(), data: Map::new(), tables: Vec::new(), verdicts: Vec::new(), plots: Vec::new() }
    }

    pub fn set_prefix(&mut self, p: &str) {
        self.prefix = p.to_string();
    }

    fn name(&self, n: &str) -> String {
        if self.prefix.is_empty() {
            n.to_string()
        } else {
            format!("{}.{n}", self.prefix)
        }
    }

    pub fn put(&mut self, key: &str, v: Json) {
        let k = self.name(key);
        self.data.insert(k, v);
    }

    pub fn table(&mut self, mut t: Table) {
        t.name = self.name(&t.name).replace('.', "_");
        self.tables.push(t);
    }

    pub fn verdict(&mut self, name: &str, pass: bool, margin: Option<f64>, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: self.name(name), pass, margin, detail: detail.into() });
    }

    /// Plots the most recently added table.
    pub fn plot(&mut self, spec: &svg::PlotSpec) -> Result<(), RunError> {
        let t = self.tables.last().ok_or_else(|| usage("no table to plot"))?;
        let svg = svg::emit_svg(t, spec).map_err(usage)?;
        self.plots.push(Plot { name: t.name.clone(), svg });
        Ok(())
    }
}

impl Default for Out {
    fn default() -> Self {
        Out::new()
    }
}

/// Output directory and format of a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<String>,
}

/// A run configuration file, equivalent to a command line.
///
/// ```json
/// {"command": "ellipsoid weyl", "params": {"a": "1", "b": "sqrt2", "kmax": 1000},
///  "seed": 7, "output": {"dir": "out", "format": "csv"}}
/// ```
/// Parameter keys are flag names; `true` adds a bare flag, `false` omits it,
/// arrays become comma-separated lists.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub params: Map<String, Json>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn scalar(v: &Json) -> Result<String, RunError> {
    match v {
        Json::String(s) => Ok(s.clone()),
        Json::Number(n) => Ok(n.to_string()),
        other => Err(usage(format!("unsupported parameter value {other}"))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, RunError> {
        serde_json::from_str(text).map_err(|e| usage(format!("config schema: {e}")))
    }

    pub fn to_argv(&self) -> Result<Vec<String>, RunError> {
        let mut argv = vec!["echlab".to_string()];
        argv.extend(self.command.split_whitespace().map(String::from));
        for (k, v) in &self.params {
            let flag = format!("--{}", k.replace('_', "-"));
            match v {
                Json::Bool(true) => argv.push(flag),
                Json::Bool(false) | Json::Null => {}
                Json::Array(items) => {
                    let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                    argv.push(flag);
                    argv.push(parts.join(","));
                }
                Json::Object(_) => {
                    argv.push(flag);
                    argv.push(v.to_string());
                }
                other => {
                    argv.push(flag);
                    argv.push(scalar(other)?);
                }
            }
        }
        if let Some(s) = self.seed {
            argv.extend(["--seed".into(), s.to_string()]);
        }
        if let Some(t) = self.tol {
            argv.extend(["--tol".into(), t.to_string()]);
        }
        if let Some(c) = self.cap {
            argv.extend(["--cap".into(), c.to_string()]);
        }
        if let Some(d) = &self.output.dir {
            argv.extend(["--out".into(), d.display().to_string()]);
        }
        if let Some(f) = &self.output.format {
            argv.extend(["--format".into(), f.clone()]);
        }
        Ok(argv)
    }
}

/// A finished run: the bundle plus where and how to emit it.
pub struct Run {
    pub bundle: Bundle,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Run {
    pub fn exit_code(&self) -> i32 {
        if self.bundle.all_pass() {
            0
        } else {
            1
        }
    }

    /// What goes to stdout for the selected format.
    pub fn render(&self) -> String {
        match self.format {
            Format::Json => self.bundle.to_json(),
            Format::Csv => self.bundle.to_csv(),
            Format::Svg => match self.bundle.plots.first() {
                Some(p) => p.svg.clone(),
                None => svg::EMPTY.to_string(),
            },
        }
    }
}

fn parse_cli(argv: &[String]) -> Result<Cli, RunError> {
    use clap::error::ErrorKind;
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            RunError::Info(e.render().to_string())
        }
        _ => RunError::Usage(e.render().to_string()),
    })
}

/// Flags that affect only where output goes are left out of the manifest,
/// so the same computation always yields the same bundle.
fn manifest_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--format" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--format=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn command_name(c: &Command) -> String {
    use args::{EllipsoidCmd as E, TwistCmd as T};
    match c {
        Command::Ellipsoid(e) => format!(
            "ellipsoid {}",
            match e {
                E::Census { .. } => "census",
                E::Spectrum { .. } => "spectrum",
                E::Weyl { .. } => "weyl",
                E::ReturnMap { .. } => "return-map",
                E::IdentityCheck { .. } => "identity-check",
            }
        ),
        Command::Twist(t) => format!(
            "twist {}",
            match t {
                T::Calabi { .. } => "calabi",
                T::Census { .. } => "census",
                T::Complex { .. } => "complex",
                T::Cd { .. } => "cd",
                T::Axioms { .. } => "axioms",
                T::Infinite { .. } => "infinite",
            }
        ),
        Command::Partitions(_) => "partitions".into(),
        Command::Score(_) => "score".into(),
        Command::Tower(_) => "tower".into(),
        Command::Selftest => "selftest".into(),
    }
}

/// Parses `argv` (including the program name), runs the command and builds its bundle.
pub fn run(argv: &[String]) -> Result<Run, RunError> {
    let cli = parse_cli(argv)?;
    if let Some(path) = &cli.config {
        if cli.command.is_some() {
            return Err(usage("--config replaces the command line; give no subcommand"));
        }
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let argv = RunConfig::parse(&text)?.to_argv()?;
        if parse_cli(&argv)?.config.is_some() {
            return Err(usage("config files cannot nest"));
        }
        return run(&argv);
    }
    let command = cli.command.ok_or_else(|| usage("missing subcommand; see --help"))?;
    let ctx = Ctx { seed: cli.seed, tol: cli.tol, cap: cli.cap };
    let mut out = Out::new();
    commands::dispatch(&command, &ctx, &mut out)?;

    let guard = RationalityGuard::default();
    let manifest = Manifest {
        tool: "echlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        manifest_version: MANIFEST_VERSION,
        command: command_name(&command),
        args: manifest_args(argv),
        seed: cli.seed,
        tol: cli.tol,
        cap: cli.cap,
        calibration: Calibration {
            kappa: CALIBRATION.kappa,
            reference_action: CALIBRATION.reference_action,
            offset_per_height: CALIBRATION.offset_per_height,
            epsilon: CALIBRATION.epsilon,
        },
        rationality_tol: guard.tol,
        rationality_max_den: guard.max_den,
        complex_degree_max: COMPLEX_DEGREE_MAX,
    };
    let mut bundle = Bundle::new(manifest);
    bundle.data = Json::Object(out.data);
    bundle.tables = out.tables;
    bundle.verdicts = out.verdicts;
    bundle.plots = out.plots;
    let run = Run { bundle, out: cli.out, format: cli.format };
    if let Some(dir) = &run.out {
        run.bundle.write_dir(dir).map_err(|e| module(format!("{}: {e}", dir.display())))?;
    }
    Ok(run)
}
