//! Command-line surface. Every parsed invocation is also the serializable
//! run configuration echoed at the top of each report.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "mollifier", version, about = "Mollified moments and central values of Dirichlet L-functions")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Report format; csv applies to tabular commands only.
    #[arg(long, global = true, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// ϑ₁ = ϑ₂ = 1/2, P = [21/20, -1/20], Q = [9/10].
    Paper,
    /// ϑ₁ = ϑ₂ = 1/2, P = [1], Q = [].
    IsBaseline,
}

/// Mollifier parameters. Rationals are "n/d" strings; coefficient lists
/// are comma-separated and start at x¹ unless --from-constant is given.
#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SpecArgs {
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<String>,
    /// P coefficients, e.g. "21/20,-1/20".
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_coeffs: Option<String>,
    /// Q coefficients, e.g. "9/10"; an empty string means Q = 0.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_coeffs: Option<String>,
    /// Coefficient lists start at the constant term.
    #[arg(long)]
    #[serde(default)]
    pub from_constant: bool,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Exact s₁, λ and the proportion s₁²/λ.
    Proportion {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Term-by-term breakdown of the main terms.
    Moments {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Optimal P, Q of the given degrees.
    Optimize {
        #[arg(long)]
        dp: usize,
        #[arg(long)]
        dq: usize,
        /// Also print the linear and quadratic forms.
        #[arg(long)]
        #[serde(default)]
        show_model: bool,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Optimal proportion over a grid of degrees.
    Scan {
        #[arg(long, default_value_t = 3)]
        max_dp: usize,
        #[arg(long, default_value_t = 3)]
        max_dq: usize,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Shifted moments I(α), J₁(α, β), J₂(α, β).
    Shifted {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = DerivativeChoice::Jet)]
        method: DerivativeChoice,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        low_nodes: Option<usize>,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        high_nodes: Option<usize>,
        /// Skip the node-doubling convergence check.
        #[arg(long)]
        #[serde(default)]
        no_convergence_check: bool,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Empirical moments against the predicted main terms.
    Empirical {
        /// Comma-separated moduli.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, default_value_t = mollifier_core::empirical::DEFAULT_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Count characters with L(1/2, χ) away from zero.
    Census {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, default_value_t = mollifier_core::empirical::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Include the empirical moments of the mollifier.
        #[arg(long)]
        #[serde(default)]
        with_moments: bool,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Smoothing kernels V, W± and the Mellin profiles.
    Kernels {
        #[arg(long, value_enum, default_value_t = KernelChoice::V)]
        kind: KernelChoice,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
        /// Comma-separated arguments x > 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.01,0.1,1,10")]
        x: Vec<f64>,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        contour: Option<f64>,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncation: Option<f64>,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
        /// Also evaluate the Mellin profile of this order at each h in --h.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile_order: Option<u32>,
        #[arg(long, default_value_t = 100.0)]
        profile_y: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,10")]
        h: Vec<f64>,
    },
    /// Independent cross-checks.
    Oracles {
        #[arg(long, value_enum, default_value_t = OracleChoice::All)]
        which: OracleChoice,
        /// Moduli for the character and central-value checks.
        #[arg(long, value_delimiter = ',', default_value = "5,13,101")]
        q: Vec<u64>,
        /// Random specs for the λ quadrature cross-check.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeChoice {
    Jet,
    Richardson,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    V,
    WPlus,
    WMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    All,
    Lambda,
    Orthogonality,
    Central,
    /// Twisted first moment against its diagonal main term.
    TwistedMoment,
    /// Divisor sums against their integral main term.
    DivisorSum,
    /// Divisor sums against the min(1/|σ|, log y) shape.
    DivisorBound,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Proportion { .. } => "proportion",
            Command::Moments { .. } => "moments",
            Command::Optimize { .. } => "optimize",
            Command::Scan { .. } => "scan",
            Command::Shifted { .. } => "shifted",
            Command::Empirical { .. } => "empirical",
            Command::Census { .. } => "census",
            Command::Kernels { .. } => "kernels",
            Command::Oracles { .. } => "oracles",
        }
    }

    /// Format used when --format is absent.
    pub fn default_format(&self) -> Format {
        match self {
            Command::Census { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}
