//! Flat experiment parameters shared by every subcommand.
//!
//! Precedence, highest first: command-line flag, environment variable (seed
//! and threads only), config file, built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Temporal,
    SpaceTime,
    Ohmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Kondo,
    LeadingOrder,
    Frustrated,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Self::Kondo => "kondo",
            Self::LeadingOrder => "leading-order",
            Self::Frustrated => "frustrated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every field is optional so that unset flags fall through to the config file.
/// Config-file keys are the flag names with `-` replaced by `_`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Subcommand to run when none is given on the command line (config file only).
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    /// Ultraviolet cutoff Λ (1/time).
    #[arg(long, global = true, help_heading = "Environment")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    /// Excitation velocity v.
    #[arg(long, global = true, help_heading = "Environment")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity: Option<f64>,
    /// Dynamical exponent z.
    #[arg(long, global = true, help_heading = "Environment")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    /// Scaling dimension δ.
    #[arg(long, global = true, help_heading = "Environment")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling_dim: Option<f64>,
    /// Spatial dimension D of the qubit array.
    #[arg(long, global = true, help_heading = "Environment")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spatial_dim: Option<u32>,
    /// Correlator time constant τ₀.
    #[arg(long, global = true, help_heading = "Environment")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
    #[arg(long, global = true, value_enum, help_heading = "Environment")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,

    /// QEC cycle period Δ.
    #[arg(long, global = true, help_heading = "Schedule")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Number of QEC cycles N.
    #[arg(long, global = true, help_heading = "Schedule")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<u64>,
    /// Number of logical qubits M.
    #[arg(long, global = true, help_heading = "Schedule")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logical: Option<u32>,

    /// Renormalised coupling λ*; otherwise the norm of the per-axis couplings.
    #[arg(long, global = true, help_heading = "Coupling")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
    #[arg(long, global = true, help_heading = "Coupling")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_x: Option<f64>,
    #[arg(long, global = true, help_heading = "Coupling")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_y: Option<f64>,
    #[arg(long, global = true, help_heading = "Coupling")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_z: Option<f64>,
    /// Per-qubit per-cycle error probability ε; computed from the environment when omitted.
    #[arg(long, global = true, help_heading = "Coupling")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dz_min: Option<f64>,
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dz_max: Option<f64>,
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<f64>,
    /// Scan D and z separately (requires --z-min/--z-max as well).
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_min: Option<f64>,
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<f64>,
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_min: Option<f64>,
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    /// Points per axis.
    #[arg(long, global = true, help_heading = "Phase scan")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub res: Option<usize>,

    #[arg(long, global = true, value_enum, help_heading = "RG flow")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[arg(long, global = true, help_heading = "RG flow")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    /// Flow length ℓ; defaults to ln(ΛΔ).
    #[arg(long, global = true, help_heading = "RG flow")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    /// Number of Kondo channels k.
    #[arg(long, global = true, help_heading = "RG flow")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channels: Option<u32>,

    /// Largest eigenvalue Λ_V of the perturbation.
    #[arg(long, global = true, help_heading = "Dyson bound")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_v: Option<f64>,
    #[arg(long, global = true, help_heading = "Dyson bound")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[arg(long, global = true, help_heading = "Dyson bound")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    /// Monte Carlo trials.
    #[arg(long, global = true, help_heading = "Monte Carlo")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long, global = true, env = "QECNOISE_SEED", help_heading = "Monte Carlo")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "QECNOISE_THREADS", help_heading = "Monte Carlo")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,

    /// Artifact path; without it only the summary line is printed.
    #[arg(long, short, global = true, help_heading = "Output")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Artifact format (default: from the output extension, else csv).
    #[arg(long, global = true, value_enum, help_heading = "Output")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl Params {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Values set in `self` win over those in `base`.
    pub fn over(&self, base: &Self) -> Self {
        let mut merged: Map<String, Value> = as_map(base);
        merged.extend(as_map(self));
        serde_json::from_value(Value::Object(merged)).expect("merged parameters deserialise")
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match self.output.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

fn as_map(p: &Params) -> Map<String, Value> {
    match serde_json::to_value(p).expect("parameters serialise") {
        Value::Object(m) => m,
        _ => unreachable!("Params serialises to an object"),
    }
}
