//! Command-line flags, the optional TOML config file, and the validated
//! [`RunConfig`] both resolve to.
//!
//! Config file keys are the long flag names (`c-high-margin = 2.0`); flags
//! given on the command line win over the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use stackelberg::{CorrelationMode, DuopolyParams};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "stackelberg",
    version,
    about = "Stackelberg duopoly equilibria with an uncertain follower cost"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Closed-form solution of one market
    Solve,
    /// Closed-form solutions over a range of theta or gamma
    Sweep,
    /// Certify the closed-form solution with the grid oracle
    Verify,
    /// Grid equilibria of the finite-entanglement game for a list of gammas
    Explore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Classical,
    LokiangClassical,
    LokiangQuantum,
    Entangled,
    /// Symmetric quantum Cournot output (solve and gamma sweeps only).
    Cournot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Raw,
    Normalized,
}

impl From<Mode> for CorrelationMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Raw => CorrelationMode::Raw,
            Mode::Normalized => CorrelationMode::Normalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Theta,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every option, as given on the command line or in the config file. Unset
/// fields fall through to the next source.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    #[arg(long, global = true, value_enum)]
    pub model: Option<Model>,
    /// Price intercept
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Cost of the follower type with the HIGHER margin (the cheaper type)
    #[arg(
        long,
        visible_alias = "c-high",
        global = true,
        allow_negative_numbers = true
    )]
    #[serde(alias = "c-high")]
    pub c_high_margin: Option<f64>,
    /// Cost of the follower type with the LOWER margin
    #[arg(
        long,
        visible_alias = "c-low",
        global = true,
        allow_negative_numbers = true
    )]
    #[serde(alias = "c-low")]
    pub c_low_margin: Option<f64>,
    /// Probability of the high-margin follower type
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Entanglement parameter
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Common marginal cost for the cournot model [default: --c-high-margin]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cost: Option<f64>,
    /// Sweep variable
    #[arg(long, global = true, value_enum)]
    pub var: Option<SweepVar>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub step: Option<f64>,
    /// Oracle grid spacing [default: a / 10000]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid_step: Option<f64>,
    /// Certification tolerance
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Comma-separated gammas for explore
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file with defaults for any of the options above
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Options {
    /// `self` where set, `fallback` elsewhere.
    fn or(self, fallback: Options) -> Options {
        Options {
            model: self.model.or(fallback.model),
            a: self.a.or(fallback.a),
            c_high_margin: self.c_high_margin.or(fallback.c_high_margin),
            c_low_margin: self.c_low_margin.or(fallback.c_low_margin),
            theta: self.theta.or(fallback.theta),
            gamma: self.gamma.or(fallback.gamma),
            mode: self.mode.or(fallback.mode),
            cost: self.cost.or(fallback.cost),
            var: self.var.or(fallback.var),
            from: self.from.or(fallback.from),
            to: self.to.or(fallback.to),
            step: self.step.or(fallback.step),
            grid_step: self.grid_step.or(fallback.grid_step),
            epsilon: self.epsilon.or(fallback.epsilon),
            gammas: self.gammas.or(fallback.gammas),
            format: self.format.or(fallback.format),
            output: self.output.or(fallback.output),
            config: self.config.or(fallback.config),
        }
    }

    pub fn from_file(path: &Path) -> Result<Options> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: display.clone(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: display,
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Sweep {
    /// `from, from + step, ...` up to `to`; `to` itself is included when the
    /// range is a whole number of steps (up to rounding).
    pub fn points(&self) -> Vec<f64> {
        let span = (self.to - self.from) / self.step;
        let n = (span + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                if i == n && (span - n as f64).abs() < 1e-9 {
                    self.to
                } else {
                    self.from + i as f64 * self.step
                }
            })
            .collect()
    }
}

/// A fully resolved and validated run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub model: Model,
    pub params: DuopolyParams,
    pub gamma: f64,
    pub mode: Mode,
    /// Common cost of the cournot model.
    pub cost: f64,
    pub sweep: Option<Sweep>,
    pub gammas: Vec<f64>,
    /// Oracle grid spacing; `None` means `a / 10000`.
    pub grid_step: Option<f64>,
    pub epsilon: f64,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_A: f64 = 10.0;
pub const DEFAULT_C_HIGH_MARGIN: f64 = 2.0;
pub const DEFAULT_C_LOW_MARGIN: f64 = 4.0;
pub const DEFAULT_THETA: f64 = 0.5;
/// Points per unit of the sweep variable when `--step` is not given.
const DEFAULT_SWEEP_STEPS: f64 = 100.0;

fn require(ok: bool, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::invalid(message()))
    }
}

impl RunConfig {
    /// Merges the command line over the config file (if any) and validates
    /// the result.
    pub fn resolve(cli: Cli) -> Result<RunConfig> {
        let file = match &cli.options.config {
            Some(path) => Options::from_file(path)?,
            None => Options::default(),
        };
        Self::from_options(cli.command, cli.options.or(file))
    }

    pub fn from_options(command: Command, options: Options) -> Result<RunConfig> {
        let default_model = match command {
            Command::Explore => Model::LokiangQuantum,
            _ => Model::Classical,
        };
        let model = options.model.unwrap_or(default_model);
        let params = DuopolyParams::new(
            options.a.unwrap_or(DEFAULT_A),
            options.c_high_margin.unwrap_or(DEFAULT_C_HIGH_MARGIN),
            options.c_low_margin.unwrap_or(DEFAULT_C_LOW_MARGIN),
            options.theta.unwrap_or(DEFAULT_THETA),
        );
        let mode = options.mode.unwrap_or(Mode::Raw);
        let config = RunConfig {
            command,
            model,
            params,
            gamma: options.gamma.unwrap_or(0.0),
            mode,
            cost: options.cost.unwrap_or(params.c_high_margin),
            sweep: match command {
                Command::Sweep => Some(Self::sweep(&options, model)?),
                _ => None,
            },
            gammas: options.gammas.unwrap_or_default(),
            grid_step: options.grid_step,
            epsilon: options
                .epsilon
                .unwrap_or(stackelberg::oracle::DEFAULT_EPSILON),
            format: options.format.unwrap_or(Format::Json),
            output: options.output,
        };
        config.validate()?;
        Ok(config)
    }

    fn sweep(options: &Options, model: Model) -> Result<Sweep> {
        let var = options.var.unwrap_or(match model {
            Model::Cournot => SweepVar::Gamma,
            _ => SweepVar::Theta,
        });
        let (from, to) = match var {
            SweepVar::Theta => (0.0, 1.0),
            SweepVar::Gamma => (0.0, 5.0),
        };
        let from = options.from.unwrap_or(from);
        let to = options.to.unwrap_or(to);
        let step = options.step.unwrap_or((to - from) / DEFAULT_SWEEP_STEPS);
        Ok(Sweep {
            var,
            from,
            to,
            step,
        })
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("cost", self.cost),
            ("epsilon", self.epsilon),
        ] {
            require(v.is_finite(), || format!("{name} must be finite, got {v}"))?;
        }
        require(self.gamma >= 0.0, || {
            format!("gamma >= 0 violated: gamma = {}", self.gamma)
        })?;
        require(self.epsilon >= 0.0, || {
            format!("epsilon >= 0 violated: epsilon = {}", self.epsilon)
        })?;
        if let Some(h) = self.grid_step {
            require(h.is_finite() && h > 0.0, || {
                format!("grid-step > 0 violated: grid-step = {h}")
            })?;
        }
        if self.model != Model::Cournot {
            self.params.validate()?;
        }
        let first_order = self.model == Model::LokiangQuantum && self.command != Command::Explore;
        if first_order && self.mode != Mode::Raw {
            return Err(CliError::invalid(
                "lokiang-quantum is defined for raw correlation only; drop --mode normalized",
            ));
        }
        match self.command {
            Command::Solve => {}
            Command::Sweep => {
                let sweep = self.sweep.expect("sweep resolved for the sweep command");
                require(sweep.from.is_finite() && sweep.to.is_finite(), || {
                    "sweep bounds must be finite".into()
                })?;
                require(sweep.from <= sweep.to, || {
                    format!("from <= to violated: {} > {}", sweep.from, sweep.to)
                })?;
                require(sweep.step.is_finite() && sweep.step > 0.0, || {
                    format!("step > 0 violated: step = {}", sweep.step)
                })?;
                require((sweep.to - sweep.from) / sweep.step <= 1e7, || {
                    "sweep has more than 10^7 points".into()
                })?;
                let gamma_models = [Model::LokiangQuantum, Model::Cournot];
                let ok = match sweep.var {
                    SweepVar::Theta => self.model != Model::Cournot,
                    SweepVar::Gamma => gamma_models.contains(&self.model),
                };
                require(ok, || {
                    format!(
                        "model {} does not depend on {}",
                        self.model.name(),
                        sweep.var.name()
                    )
                })?;
            }
            Command::Verify => {
                require(self.model != Model::Cournot, || {
                    "verify does not support the cournot model".into()
                })?;
            }
            Command::Explore => {
                require(self.model == Model::LokiangQuantum, || {
                    "explore compares against lokiang-quantum; other models are not supported"
                        .into()
                })?;
                require(!self.gammas.is_empty(), || {
                    "explore requires --gammas".into()
                })?;
                for &g in &self.gammas {
                    require(g.is_finite() && g >= 0.0, || {
                        format!("gamma >= 0 violated in --gammas: {g}")
                    })?;
                }
            }
        }
        Ok(())
    }
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Classical => "classical",
            Model::LokiangClassical => "lokiang-classical",
            Model::LokiangQuantum => "lokiang-quantum",
            Model::Entangled => "entangled",
            Model::Cournot => "cournot",
        }
    }
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Theta => "theta",
            SweepVar::Gamma => "gamma",
        }
    }
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Raw => "raw",
            Mode::Normalized => "normalized",
        }
    }
}
