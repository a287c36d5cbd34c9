//! The four commands. Each returns rows; rendering is left to the caller.

use rayon::prelude::*;
use stackelberg::{
    certify_epsilon_spe, cournot_reference, explore_gamma, lo_kiang_classical, lo_kiang_quantum,
    solve_spe, solve_spe_entangled, Certification, Duopoly, DuopolyParams, EntanglementConfig,
    EquilibriumProfile, Game, GridSpec, MoverAdvantage,
};

use crate::config::{Command, Mode, Model, RunConfig, SweepVar};
use crate::error::Result;
use crate::record::Record;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub records: Vec<Record>,
    /// Grid the oracle ran on, if it ran.
    pub grid: Option<GridSpec>,
    /// False only when a certification failed.
    pub passed: bool,
}

impl Outcome {
    fn rows(records: Vec<Record>) -> Self {
        Outcome {
            records,
            grid: None,
            passed: true,
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    match config.command {
        Command::Solve => run_solve(config),
        Command::Sweep => run_sweep(config),
        Command::Verify => run_verify(config),
        Command::Explore => run_explore(config),
    }
}

pub fn run_solve(config: &RunConfig) -> Result<Outcome> {
    Ok(Outcome::rows(vec![solve_record(config)?]))
}

/// One row per sweep point, in sweep order.
pub fn run_sweep(config: &RunConfig) -> Result<Outcome> {
    let sweep = config.sweep.expect("sweep command carries a sweep");
    let records = sweep
        .points()
        .into_par_iter()
        .map(|x| {
            let mut point = config.clone();
            match sweep.var {
                SweepVar::Theta => point.params.theta = x,
                SweepVar::Gamma => point.gamma = x,
            }
            if sweep.var == SweepVar::Theta {
                point.params.validate()?;
            }
            solve_record(&point)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::rows(records))
}

pub fn run_verify(config: &RunConfig) -> Result<Outcome> {
    let duopoly = Duopoly::new(config.params)?;
    let grid = grid(config, &duopoly)?;
    let (game, profile) = match config.model {
        Model::Classical => (Game::classical(duopoly), solve_spe(&duopoly).profile),
        Model::LokiangClassical => (
            Game::classical(duopoly),
            lo_kiang_classical(&duopoly).profile,
        ),
        Model::LokiangQuantum => (
            Game::quantum(duopoly, EntanglementConfig::raw(config.gamma)?)?,
            lo_kiang_quantum(&duopoly, config.gamma)?.profile,
        ),
        Model::Entangled => (
            Game::entangled(duopoly),
            solve_spe_entangled(&duopoly).profile,
        ),
        Model::Cournot => unreachable!("rejected by RunConfig validation"),
    };
    let cert = certify_epsilon_spe(&game, &profile, &grid, config.epsilon)?;
    let record = certificate_columns(solve_record(config)?, &cert, &grid);
    Ok(Outcome {
        records: vec![record],
        grid: Some(grid),
        passed: cert.passed,
    })
}

/// Grid equilibria for each gamma, next to the first-order solution where
/// it applies (raw correlation).
pub fn run_explore(config: &RunConfig) -> Result<Outcome> {
    let duopoly = Duopoly::new(config.params)?;
    let grid = grid(config, &duopoly)?;
    let points = explore_gamma(&duopoly, &config.gammas, config.mode.into(), &grid)?;
    let records = points
        .iter()
        .map(|point| {
            let oracle = &point.result;
            let mut record = Record::new()
                .num("gamma", point.gamma)
                .text("mode", config.mode.name())
                .profile(&oracle.profile)
                .num("leader_value", oracle.leader_value);
            if config.mode == Mode::Raw {
                let lk = lo_kiang_quantum(&duopoly, point.gamma)?;
                record = record
                    .flag("lokiang_valid", lk.valid)
                    .num("lokiang_x_a", lk.profile.x_a)
                    .num("lokiang_x_bh", lk.profile.x_bh)
                    .num("lokiang_x_bl", lk.profile.x_bl)
                    .num("distance", oracle.profile.max_distance(&lk.profile));
            }
            Ok(record)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        records,
        grid: Some(grid),
        passed: true,
    })
}

fn grid(config: &RunConfig, duopoly: &Duopoly) -> Result<GridSpec> {
    Ok(match config.grid_step {
        Some(step) => GridSpec::new(step, duopoly.a())?,
        None => GridSpec::for_market(duopoly),
    })
}

fn market_columns(params: &DuopolyParams) -> Record {
    Record::new()
        .num("theta", params.theta)
        .num("a", params.a)
        .num("c_high_margin", params.c_high_margin)
        .num("c_low_margin", params.c_low_margin)
}

/// The closed-form solution of `config.model` at `config`'s market.
pub fn solve_record(config: &RunConfig) -> Result<Record> {
    if config.model == Model::Cournot {
        let output = cournot_reference(
            config.params.a,
            config.cost,
            config.gamma,
            config.mode.into(),
        )?;
        return Ok(Record::new()
            .num("gamma", config.gamma)
            .text("mode", config.mode.name())
            .num("a", config.params.a)
            .num("cost", config.cost)
            .num("output", output));
    }
    let duopoly = Duopoly::new(config.params)?;
    let market = market_columns(&config.params);
    Ok(match config.model {
        Model::Classical => {
            let s = solve_spe(&duopoly);
            market
                .text("regime", s.regime)
                .profile(&s.profile)
                .payoffs(&s.payoffs)
                .num("mover_advantage", s.mover_advantage)
                .text("mover", MoverAdvantage::from_gap(s.mover_advantage))
        }
        Model::LokiangClassical => {
            let s = lo_kiang_classical(&duopoly);
            market
                .flag("valid", s.valid)
                .profile(&s.profile)
                .payoffs(&s.payoffs)
        }
        Model::LokiangQuantum => {
            let s = lo_kiang_quantum(&duopoly, config.gamma)?;
            market
                .num("gamma", config.gamma)
                .flag("valid", s.valid)
                .profile(&s.profile)
                .payoffs(&s.payoffs)
        }
        Model::Entangled => {
            let s = solve_spe_entangled(&duopoly);
            market
                .profile(&s.profile)
                .payoffs(&s.payoffs)
                .num("advantage", s.advantage)
        }
        Model::Cournot => unreachable!("handled above"),
    })
}

fn certificate_columns(record: Record, cert: &Certification, grid: &GridSpec) -> Record {
    record
        .flag("passed", cert.passed)
        .num("worst_deviation", cert.worst_deviation)
        .num("leader_gain", cert.gains.leader)
        .num("follower_high_gain", cert.gains.follower_high)
        .num("follower_low_gain", cert.gains.follower_low)
        .flag("in_bounds", cert.in_bounds)
        .num("epsilon", cert.epsilon)
        .num("grid_step", grid.step())
}

/// Profile columns of a row, for tests and callers comparing runs.
pub fn profile_of(record: &Record) -> Option<EquilibriumProfile> {
    use crate::record::Value::Num;
    match (record.get("x_a")?, record.get("x_bh")?, record.get("x_bl")?) {
        (Num(a), Num(h), Num(l)) => Some(EquilibriumProfile::new(*a, *h, *l)),
        _ => None,
    }
}
