//! Run configuration: command-line flags over an optional TOML file over built-in defaults.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use iesplan::inner::{InnerMethod, InnerOptions};
use iesplan::model::UncertaintyBudgets;
use iesplan::reliability::McsOptions;
use iesplan::robust::RobustOptions;
use iesplan::solver::SolveOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Deterministic,
    Robust,
    N1,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Deterministic => "deterministic",
            Mode::Robust => "robust",
            Mode::N1 => "n1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inner {
    Sd,
    Kkt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    GammaN,
    GammaI,
    GammaD,
    GammaL,
}

impl Parameter {
    pub fn as_str(self) -> &'static str {
        match self {
            Parameter::GammaN => "gamma_n",
            Parameter::GammaI => "gamma_i",
            Parameter::GammaD => "gamma_d",
            Parameter::GammaL => "gamma_l",
        }
    }

    pub fn set(self, b: &mut UncertaintyBudgets, v: usize) {
        match self {
            Parameter::GammaN => b.gamma_n = v,
            Parameter::GammaI => b.gamma_i = v,
            Parameter::GammaD => b.gamma_d = v,
            Parameter::GammaL => b.gamma_l = v,
        }
    }
}

/// Flags shared by every subcommand. All are optional so the config file can fill them in.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Planning instance (TOML)
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Inner reformulation; robust mode only
    #[arg(long, value_enum)]
    pub inner: Option<Inner>,
    #[arg(long)]
    pub gamma_n: Option<usize>,
    #[arg(long)]
    pub gamma_d: Option<usize>,
    #[arg(long)]
    pub gamma_i: Option<usize>,
    #[arg(long)]
    pub gamma_l: Option<usize>,
    /// Simulated years for reliability assessment
    #[arg(long)]
    pub years: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Outer convergence tolerance
    #[arg(long)]
    pub eps: Option<f64>,
    /// Wall-clock limit for the outer loop, in seconds
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Write every solved model in LP format to this directory
    #[arg(long)]
    pub dump_models: Option<PathBuf>,
    /// Existing plan file to assess instead of planning first
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Planners to compare
    #[arg(long, value_enum, value_delimiter = ',')]
    pub modes: Option<Vec<Mode>>,
    /// Budget swept by `sweep`
    #[arg(long, value_enum)]
    pub parameter: Option<Parameter>,
    /// Sorted values for the swept budget
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<usize>>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        Settings { $($f: $hi.$f.or($lo.$f),)* }
    };
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        overlay!(
            self, lower, instance, mode, inner, gamma_n, gamma_d, gamma_i, gamma_l, years, seed, out, eps, time_limit,
            dump_models, plan, modes, parameter, values
        )
    }
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub instance: PathBuf,
    pub mode: Mode,
    pub inner: Inner,
    pub gamma_n: Option<usize>,
    pub gamma_d: Option<usize>,
    pub gamma_i: Option<usize>,
    pub gamma_l: Option<usize>,
    pub years: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub eps: f64,
    pub time_limit: Option<f64>,
    pub dump_models: Option<PathBuf>,
    pub plan: Option<PathBuf>,
    pub modes: Vec<Mode>,
    pub parameter: Parameter,
    pub values: Vec<usize>,
}

pub const DEFAULT_YEARS: usize = 200;
pub const DEFAULT_EPS: f64 = 1e-4;

impl RunConfig {
    pub fn resolve(command: &str, s: Settings) -> Result<Self> {
        let Some(instance) = s.instance else { bail!("no instance given (--instance or `instance` in the config file)") };
        if !instance.exists() {
            bail!("instance file {} does not exist", instance.display());
        }
        let mode = s.mode.unwrap_or(Mode::Robust);
        if s.inner.is_some() && mode != Mode::Robust && command == "plan" {
            bail!("--inner only applies to robust mode, got mode {}", mode.as_str());
        }
        if let Some(p) = &s.plan {
            if !p.exists() {
                bail!("plan file {} does not exist", p.display());
            }
        }
        let eps = s.eps.unwrap_or(DEFAULT_EPS);
        if !(eps > 0.0) {
            bail!("--eps must be positive, got {eps}");
        }
        if let Some(t) = s.time_limit {
            if !(t > 0.0) || !t.is_finite() {
                bail!("--time-limit must be a positive number of seconds, got {t}");
            }
        }
        let years = s.years.unwrap_or(DEFAULT_YEARS);
        if years == 0 {
            bail!("--years must be at least 1");
        }
        let values = s.values.unwrap_or_default();
        if values.windows(2).any(|w| w[0] > w[1]) {
            bail!("--values must be sorted, got {values:?}");
        }
        Ok(RunConfig {
            command: command.into(),
            instance,
            mode,
            inner: s.inner.unwrap_or(Inner::Sd),
            gamma_n: s.gamma_n,
            gamma_d: s.gamma_d,
            gamma_i: s.gamma_i,
            gamma_l: s.gamma_l,
            years,
            seed: s.seed.unwrap_or(0),
            out: s.out.unwrap_or_else(|| PathBuf::from("out")),
            eps,
            time_limit: s.time_limit,
            dump_models: s.dump_models,
            plan: s.plan,
            modes: s.modes.unwrap_or_else(|| vec![Mode::Deterministic, Mode::Robust]),
            parameter: s.parameter.unwrap_or(Parameter::GammaD),
            values,
        })
    }

    /// Instance budgets with any flag overrides applied.
    pub fn budgets(&self, base: UncertaintyBudgets) -> UncertaintyBudgets {
        UncertaintyBudgets {
            gamma_n: self.gamma_n.unwrap_or(base.gamma_n),
            gamma_d: self.gamma_d.unwrap_or(base.gamma_d),
            gamma_i: self.gamma_i.unwrap_or(base.gamma_i),
            gamma_l: self.gamma_l.unwrap_or(base.gamma_l),
            ..base
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { dump_dir: self.dump_models.clone(), seed: self.seed, ..SolveOptions::exact() }
    }

    pub fn robust_options(&self) -> RobustOptions {
        let solve = self.solve_options();
        let base = RobustOptions::default().with_eps(self.eps);
        RobustOptions {
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            inner: InnerOptions {
                method: match self.inner {
                    Inner::Sd => InnerMethod::Sd,
                    Inner::Kkt => InnerMethod::Kkt,
                },
                solve: solve.clone(),
                ..base.inner.clone()
            },
            master: solve,
            ..base
        }
    }

    pub fn mcs_options(&self) -> McsOptions {
        McsOptions { years: self.years, seed: self.seed, solve: self.solve_options(), prefilter: true }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}
