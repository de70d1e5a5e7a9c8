//! Command-line flags resolved into a run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_cells::cells::manifest_weights;
use hecke_cells::conjectures::Conjecture;
use hecke_cells::coxeter::GroupType;
use hecke_cells::hecke::Weights;
use serde::Serialize;

use crate::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "hecke-cells",
    version,
    about = "Kazhdan-Lusztig bases and cells of affine Hecke algebras of types C2 and G2"
)]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Group type, C2 or G2. Taken from --region when that is given.
    #[arg(long = "type", global = true)]
    pub ty: Option<String>,
    /// Weights such as a=5,b=1,c=2 (C2) or a=2,b=1 (G2). Defaults to the
    /// manifest weights of --region, else to equal parameters.
    #[arg(long, global = true)]
    pub weights: Option<String>,
    /// Ball or table radius; each command has its own default.
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// Radius of the ball on which computed cells are compared.
    #[arg(long, global = true)]
    pub inner_radius: Option<usize>,
    /// Region or cell label such as C2:1:i.
    #[arg(long, global = true)]
    pub region: Option<String>,
    /// Largest length of the products checked.
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    /// Comma-separated conjecture ids, e.g. P1,P6,P14.
    #[arg(long, global = true)]
    pub set: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Basis of the inputs and output of `mult`.
    #[arg(long, global = true, value_enum, default_value_t = BasisArg::T)]
    pub basis: BasisArg,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Number of elements of each length up to the radius.
    Ball,
    /// T-expansion of C_w.
    Kl { w: String },
    /// Product of two basis elements.
    Mult { x: String, y: String },
    /// Encoded cells for the weights and the computed partitions.
    Cells,
    /// Empirical a-value of w.
    Avalue { w: String },
    /// Runs a family of checks and prints one report line per statement.
    Verify {
        #[arg(value_enum)]
        what: Check,
    },
    /// Writes a region by statement matrix and per-cell a-value tables.
    Report,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Decomposition,
    Assumptions,
    Corollary,
    Forms,
    Identities,
    Conjectures,
    Involutions,
    Bimodule,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisArg {
    #[value(name = "T", alias = "t")]
    T,
    #[value(name = "C", alias = "c")]
    C,
}

/// Flags after defaults and consistency checks.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub group_type: String,
    pub weights: String,
    pub radius: Option<usize>,
    pub inner_radius: Option<usize>,
    pub region: Option<String>,
    pub max_len: Option<usize>,
    pub set: Vec<String>,
    pub format: Format,
    pub command: String,
    #[serde(skip)]
    pub ty: GroupType,
    #[serde(skip)]
    pub w: Weights,
    /// True when --weights was given rather than defaulted.
    #[serde(skip)]
    pub explicit_weights: bool,
    #[serde(skip)]
    pub conjectures: Vec<Conjecture>,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    #[serde(skip)]
    pub basis: BasisArg,
}

fn type_of_label(label: &str) -> Option<GroupType> {
    label.split(':').next()?.parse().ok()
}

impl RunConfig {
    pub fn resolve(flags: &Flags, command: &Command) -> Result<Self, Failure> {
        let from_region = flags.region.as_deref().and_then(type_of_label);
        let ty = match (&flags.ty, from_region) {
            (Some(t), Some(r)) => {
                let t: GroupType = t.parse().map_err(|e| Failure::config(format!("{e}")))?;
                if t != r {
                    return Err(Failure::config(format!(
                        "--type {t} does not match region {}",
                        flags.region.as_deref().unwrap_or("")
                    )));
                }
                t
            }
            (Some(t), None) => t.parse().map_err(|e| Failure::config(format!("{e}")))?,
            (None, Some(r)) => r,
            (None, None) => GroupType::C2,
        };
        let explicit_weights = flags.weights.is_some();
        let w = match (&flags.weights, &flags.region) {
            (Some(text), _) => {
                Weights::parse(ty, text).map_err(|e| Failure::config(e.to_string()))?
            }
            (None, Some(label)) => match manifest_weights(label) {
                Some(w) => w,
                None => equal(ty),
            },
            (None, None) => equal(ty),
        };
        let conjectures = match &flags.set {
            Some(s) => s
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse::<Conjecture>()
                        .map_err(|e| Failure::config(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => Conjecture::ALL.to_vec(),
        };
        if conjectures.is_empty() {
            return Err(Failure::config("--set selects no conjecture".into()));
        }
        Ok(Self {
            group_type: ty.to_string(),
            weights: w.to_string(),
            radius: flags.radius,
            inner_radius: flags.inner_radius,
            region: flags.region.clone(),
            max_len: flags.max_len,
            set: conjectures.iter().map(|c| c.to_string()).collect(),
            format: flags.format,
            command: command_name(command),
            ty,
            w,
            explicit_weights,
            conjectures,
            out_dir: flags.out_dir.clone(),
            basis: flags.basis,
        })
    }
}

fn equal(ty: GroupType) -> Weights {
    match ty {
        GroupType::C2 => Weights::c2(1, 1, 1),
        GroupType::G2 => Weights::g2(1, 1),
    }
    .expect("equal weights are valid")
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Ball => "ball".into(),
        Command::Kl { w } => format!("kl {w}"),
        Command::Mult { x, y } => format!("mult {x} {y}"),
        Command::Cells => "cells".into(),
        Command::Avalue { w } => format!("avalue {w}"),
        Command::Verify { what } => format!(
            "verify {}",
            what.to_possible_value().expect("named").get_name()
        ),
        Command::Report => "report".into(),
    }
}
