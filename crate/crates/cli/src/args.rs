use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hypersaw",
    version,
    about = "Self-avoiding walks and polygons on regular hyperbolic tessellations H(d,k)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every connective-constant bound available for H(d,k).
    Bounds {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        out: Output,
    },
    /// Exact walk or polygon counts through the origin.
    Enumerate {
        #[command(flatten)]
        shape: Shape,
        /// Largest length to count.
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Walks)]
        kind: Kind,
        #[command(flatten)]
        limits: Limits,
        #[command(flatten)]
        out: Output,
    },
    /// Isoperimetric checks on every polygon through the origin.
    Geometry {
        #[command(flatten)]
        shape: Shape,
        #[arg(short = 'n')]
        n: usize,
        #[command(flatten)]
        limits: Limits,
        #[command(flatten)]
        out: Output,
    },
    /// Distribution of the endpoint distance of n-step walks.
    Displacement {
        #[command(flatten)]
        shape: Shape,
        #[arg(short = 'n')]
        n: usize,
        /// Report the fraction of walks ending at distance >= epsilon * n.
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[command(flatten)]
        limits: Limits,
        #[command(flatten)]
        out: Output,
    },
    /// Dominant eigenvalues of the layered-walk recurrence systems.
    Eigen {
        /// One system (h73, h45, h37, h38 or param(d)); all built-ins when omitted.
        #[arg(long)]
        system: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Sign check bracketing the root of g_d over a range of d.
    Asymptotics {
        /// Inclusive range `start:end`.
        #[arg(long = "d-range", value_parser = parse_range, default_value = "7:100")]
        d_range: (u64, u64),
        #[command(flatten)]
        out: Output,
    },
    /// The ball of the given radius as a rotation system.
    DumpMap {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        vertex_budget: usize,
        #[command(flatten)]
        out: Output,
    },
}

pub const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, Copy, Args)]
pub struct Shape {
    /// Faces meeting at each vertex.
    #[arg(short = 'd')]
    pub d: u32,
    /// Sides of each face.
    #[arg(short = 'k')]
    pub k: u32,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Limits {
    /// Build radius; defaults to the smallest radius the computation needs.
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub vertex_budget: usize,
    /// Run past the enumeration horizon.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads for enumeration; never changes the numbers.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Walks,
    Polygons,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected start:end, got `{s}`"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("bad start: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad end: {e}"))?;
    if a > b {
        return Err(format!("start {a} exceeds end {b}"));
    }
    Ok((a, b))
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::Bounds { out, .. }
            | Command::Enumerate { out, .. }
            | Command::Geometry { out, .. }
            | Command::Displacement { out, .. }
            | Command::Eigen { out, .. }
            | Command::Asymptotics { out, .. }
            | Command::DumpMap { out, .. } => out,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds { .. } => "bounds",
            Command::Enumerate { .. } => "enumerate",
            Command::Geometry { .. } => "geometry",
            Command::Displacement { .. } => "displacement",
            Command::Eigen { .. } => "eigen",
            Command::Asymptotics { .. } => "asymptotics",
            Command::DumpMap { .. } => "dump-map",
        }
    }
}
