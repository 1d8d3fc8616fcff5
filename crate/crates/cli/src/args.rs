use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "numradius", version, about = "Numerical radii, Lipschitz norms and numerical-index estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certified numerical-radius bracket of a matrix or CPWL operator.
    Radius(OperatorArgs),
    /// Operator-norm (or Lipschitz-norm) bracket.
    Norm(OperatorArgs),
    /// Upper estimate of the numerical index of a space.
    Index(IndexArgs),
    /// Runs a verification suite: bk, rnp, sums, known or ck.
    Verify(VerifyArgs),
    /// Runs one construction and re-checks its guarantees.
    Construct(ConstructArgs),
    /// Prints what the library knows about a space.
    Describe(DescribeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Linear,
    Lipschitz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionArg {
    Extend,
    Join,
    Lush,
    Boost,
    Compress,
    Lift,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Embed witnesses (points, functionals, construction outputs) in JSON output.
    #[arg(long)]
    pub emit_witnesses: bool,
}

#[derive(Args, Debug)]
pub struct OperatorArgs {
    /// Space spec, e.g. l2:2, cl1:3, linf:4, poly:file.json, sum:l1(l2:2,l1:1).
    #[arg(long)]
    pub space: Option<String>,
    /// Matrix JSON file.
    #[arg(long, conflicts_with = "pwl", required_unless_present = "pwl")]
    pub matrix: Option<PathBuf>,
    /// CPWL operator JSON file (it names its own space).
    #[arg(long)]
    pub pwl: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Linear)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = numradius::index::DEFAULT_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// bk | rnp | sums | known | ck
    #[arg(long)]
    pub suite: String,
    /// bk and rnp: the space; sums: a two-summand sum such as sum:linf(l2:2,l2:1).
    #[arg(long)]
    pub space: Option<String>,
    /// Operators per suite (bk, ck) or search budget (rnp, sums). Defaults: 200, 100, 10000.
    #[arg(long)]
    pub budget: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub construction: ConstructionArg,
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, conflicts_with = "pwl")]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub pwl: Option<PathBuf>,
    /// Points as JSON arrays, e.g. --x '[1,0]'.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// Images of x and y (extend).
    #[arg(long)]
    pub fx: Option<String>,
    #[arg(long)]
    pub fy: Option<String>,
    /// Lipschitz constant of the extension.
    #[arg(long, default_value_t = 1.0)]
    pub lipschitz: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    /// Number of blocks (lift).
    #[arg(long, default_value_t = 2)]
    pub blocks: usize,
    /// Samples for pair checks and searches.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DescribeArgs {
    #[arg(long)]
    pub space: String,
    #[command(flatten)]
    pub common: Common,
}

/// Everything needed to rerun a command; embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub space: Option<String>,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub budget: Option<usize>,
    pub tol: Option<f64>,
    pub format: Format,
    pub emit_witnesses: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<serde_json::Value>,
}

impl RunConfig {
    pub fn new(command: &str, space: Option<&str>, common: &Common) -> Self {
        Self {
            command: command.into(),
            space: space.map(str::to_string),
            inputs: Vec::new(),
            seed: common.seed,
            budget: None,
            tol: None,
            format: common.format,
            emit_witnesses: common.emit_witnesses,
            suite: None,
            mode: None,
            construction: None,
            parameters: None,
        }
    }
}
