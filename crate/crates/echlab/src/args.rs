//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "echlab", version, about = "Reeb dynamics, ECH combinatorics and PFH twist experiments")]
pub struct Cli {
    /// Seed for every randomized sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override for the command's numeric verdicts.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Resource cap (spectrum entries or complex generators).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Directory for bundle.json, manifest.json and per-table CSV/SVG files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run configuration file; replaces the command line.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reeb flow and spectra of ellipsoids E(a, b).
    #[command(subcommand)]
    Ellipsoid(EllipsoidCmd),
    /// Monotone radial twists and the lattice-path complex.
    #[command(subcommand)]
    Twist(TwistCmd),
    /// Partitions p±_θ(m) and their lemma checks.
    Partitions(PartitionsArgs),
    /// Search low-action non-cylinders for negative total score.
    Score(ScoreArgs),
    /// Telescoping audit of a tower of curves.
    Tower(TowerArgs),
    /// Fixed battery of small checks across all modules.
    Selftest,
}

#[derive(Debug, Args, Clone)]
pub struct AB {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Debug, Subcommand)]
pub enum EllipsoidCmd {
    /// Simple periodic orbits with action at most L.
    Census {
        #[command(flatten)]
        ab: AB,
        /// Action bound.
        #[arg(long)]
        l: f64,
    },
    /// Action spectrum up to L, or its first COUNT entries.
    Spectrum {
        #[command(flatten)]
        ab: AB,
        #[arg(long, conflicts_with = "count")]
        l: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Allow rational a/b.
        #[arg(long)]
        formal: bool,
    },
    /// Weyl table c_k²/(2k) against the volume.
    Weyl {
        #[command(flatten)]
        ab: AB,
        #[arg(long, default_value_t = 100_000)]
        kmax: u64,
        #[arg(long)]
        formal: bool,
        /// Pass when the last row deviates from the volume by at most this fraction.
        #[arg(long, default_value_t = 0.02)]
        max_rel_dev: f64,
    },
    /// First-return map on the disk spanning γ₂.
    ReturnMap {
        #[command(flatten)]
        ab: AB,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Product of the two periods against the volume.
    IdentityCheck {
        #[command(flatten)]
        ab: AB,
    },
}

#[derive(Debug, Subcommand)]
pub enum TwistCmd {
    /// Calabi invariant and Hofer bound of a profile.
    Calabi {
        /// Profile JSON file, or inline JSON starting with '{'.
        #[arg(long)]
        profile: String,
    },
    /// Rational level circles of denominator at most d.
    Census {
        #[arg(long)]
        profile: String,
        #[arg(long)]
        d: u32,
    },
    /// Build the degree-d complex and check it.
    Complex {
        #[arg(long)]
        profile: String,
        #[arg(long)]
        d: u32,
        /// Inclusive grading window LO,HI.
        #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
        window: Option<Vec<i64>>,
    },
    /// Spectral invariants c_d and the Calabi deviation table.
    Cd {
        #[arg(long)]
        profile: String,
        /// Degrees, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u32>,
    },
    /// Identity, monotonicity and Hofer-Lipschitz checks for a pair.
    Axioms {
        #[arg(long)]
        profile: String,
        #[arg(long)]
        other: String,
        #[arg(long, default_value_t = 6)]
        dmax: u32,
    },
    /// Truncation sequence f_i of an unbounded profile.
    Infinite {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 20)]
        imax: u32,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        d: Vec<u32>,
        /// Calabi level the truncations are expected to exceed.
        #[arg(long, default_value_t = 50.0)]
        target: f64,
    },
}

#[derive(Debug, Args)]
pub struct PartitionsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    #[arg(long)]
    pub m: u64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Orbit document; seeded random elliptic orbits when absent.
    #[arg(long)]
    pub orbits: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub max_mult: u32,
    #[arg(long, default_value_t = 3)]
    pub max_genus: u32,
    #[arg(long, default_value_t = 0.5)]
    pub low_action: f64,
    /// "few-ends", "none" or a fixed multiplicity.
    #[arg(long, default_value = "few-ends")]
    pub floor: String,
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    /// Tower document; seeded random towers when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Curves per random tower.
    #[arg(long, default_value_t = 1000)]
    pub random: usize,
    #[arg(long, default_value_t = 1)]
    pub towers: usize,
    #[arg(long, default_value_t = 1.0)]
    pub high_action: f64,
    #[arg(long, default_value_t = 0.5)]
    pub low_action: f64,
    /// Allowed |Σ I − 2N| as a multiple of √N.
    #[arg(long, default_value_t = 4.0)]
    pub index_budget: f64,
    /// Include the first tower as an orbit document in the output data.
    #[arg(long)]
    pub emit: bool,
}
