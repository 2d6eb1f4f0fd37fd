use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use durrmeyer_core::{registry, FunctionSpec, OperatorKind, OperatorSpec, SequencePair, Theorem};

/// A bad flag value that the core library never sees.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Parser, Debug)]
#[command(
    name = "durrmeyer",
    version,
    about = "Modified Bernstein–Durrmeyer operator laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an operator at one point, or over the grid when --x is absent.
    Eval {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long)]
        function: String,
        #[arg(long)]
        x: Option<f64>,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact images of the monomials t^0..t^max-power (or central moments).
    Moments {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 6)]
        max_power: usize,
        /// Emit D((t − x)^m; x) instead of D(t^m; x).
        #[arg(long)]
        central: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sup-norm errors over a list of degrees with the fitted log-log slope.
    Converge {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long)]
        function: String,
        #[command(flatten)]
        list: NListArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scaled error (n+2)(n+3)(D f − f)(x) of the second-order operator.
    Voronovskaya {
        #[arg(long)]
        function: String,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        list: NListArgs,
        #[arg(long)]
        nodes: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Pointwise check of an error bound over the grid.
    Bounds {
        #[arg(long)]
        theorem: String,
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long)]
        function: String,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the exact identity checks and write the verdicts as JSON.
    Errata {
        #[arg(long, short, default_value = "errata.json")]
        output: PathBuf,
    },
    /// Render a CSV or JSON table written by this tool as an SVG chart.
    Plot {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        /// Column for the horizontal axis (default: the first numeric column).
        #[arg(long)]
        x_column: Option<String>,
        /// Columns to draw (default: every other numeric column).
        #[arg(long = "y-column")]
        y_columns: Vec<String>,
        /// Logarithmic scale on both axes.
        #[arg(long)]
        log_log: bool,
        #[arg(long)]
        title: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct OperatorArgs {
    /// bernstein, durrmeyer, m1, m2 or bezier.
    #[arg(long, default_value = "m2")]
    pub operator: String,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// a0(n) as "p/q" or "p/q + r/s / n".
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub a0: String,
    /// a1(n) as "p/q" or "p/q + r/s / n".
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub a1: String,
    /// Bézier exponent.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
}

impl OperatorArgs {
    pub fn spec(&self) -> anyhow::Result<OperatorSpec> {
        let kind: OperatorKind = self.operator.parse()?;
        // The constraint is checked even when the operator ignores the pair.
        let seq = SequencePair::parse(&self.a0, &self.a1)?;
        Ok(OperatorSpec::new(kind, self.n, Some(seq), self.mu)?)
    }
}

#[derive(Args, Debug)]
pub struct NumericArgs {
    /// Number of grid intervals on [0, 1].
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Gauss–Legendre nodes per coefficient (default n + 16).
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Args, Debug)]
pub struct NListArgs {
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
    pub n_list: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

pub fn function(name: &str) -> anyhow::Result<FunctionSpec> {
    Ok(registry::lookup(name)?)
}

pub fn theorem(name: &str) -> anyhow::Result<Theorem> {
    Ok(name.parse()?)
}
