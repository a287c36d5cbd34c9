//! Brute-force backward induction on a discretized action grid.
//!
//! The game tree is chance (follower type) -> leader -> follower. For every
//! grid output of the leader both follower types best-reply by grid search,
//! and the leader then picks the grid output with the best expected payoff.
//! Nothing here uses derivatives or the closed forms, so it is an
//! independent check on the calculus behind them.
//!
//! Follower replies are found with a Lipschitz branch-and-bound over the
//! grid. A subinterval is skipped only when the Lipschitz bound proves no
//! interior point can tie with the best point seen so far, so the result is
//! exactly the exhaustive argmax (ties go to the smallest point).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entangled;
use crate::error::{Error, Result};
use crate::model::{mixture, Duopoly, EquilibriumProfile, FollowerType, Player};
use crate::quantum::{self, CorrelationMode, EntanglementConfig, Gamma};

/// Grid intervals per unit of price ceiling used by [`GridSpec::for_market`].
pub const DEFAULT_GRID_INTERVALS: usize = 10_000;

/// Deviation gain tolerated by certification at the default resolution.
pub const DEFAULT_EPSILON: f64 = 5e-3;

/// The action grid `{0, h, 2h, ..., n h}` with `n h <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    step: f64,
    upper: f64,
}

impl GridSpec {
    pub fn new(step: f64, upper: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        if !(upper.is_finite() && upper >= step) {
            return Err(Error::InvalidGrid(format!(
                "upper bound {upper} must be at least the step {step}"
            )));
        }
        if upper / step > 1e9 {
            return Err(Error::InvalidGrid(format!(
                "{} points is too many",
                upper / step
            )));
        }
        Ok(Self { step, upper })
    }

    /// `h = a / 10000` over `[0, a]`.
    pub fn for_market(duopoly: &Duopoly) -> Self {
        let a = duopoly.a();
        Self {
            step: a / DEFAULT_GRID_INTERVALS as f64,
            upper: a,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Same range, half the step.
    pub fn refined(&self) -> Self {
        Self {
            step: 0.5 * self.step,
            upper: self.upper,
        }
    }

    /// Index of the largest grid point.
    pub fn last_index(&self) -> usize {
        // Tolerate upper being a multiple of step up to rounding.
        (self.upper / self.step * (1.0 + 1e-12)).floor() as usize
    }

    pub fn len(&self) -> usize {
        self.last_index() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, index: usize) -> f64 {
        (index as f64 * self.step).min(self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        (0.0..=self.upper).contains(&x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridArgmax {
    pub index: usize,
    pub point: f64,
    pub value: f64,
}

/// Relative gap below which two objective values count as tied.
///
/// Exact ties (a concave objective peaking halfway between grid points)
/// otherwise get resolved by rounding noise.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Values at or above this floor tie with `max`.
fn tie_floor(max: f64) -> f64 {
    max - TIE_TOLERANCE * max.abs()
}

/// Smallest grid index whose value ties with the maximum.
fn select(grid: &GridSpec, evaluated: &[(usize, f64)]) -> Result<GridArgmax> {
    if let Some(&(i, _)) = evaluated.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteObjective(grid.point(i)));
    }
    let max = evaluated
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = tie_floor(max);
    let (index, value) = evaluated
        .iter()
        .filter(|(_, v)| *v >= floor)
        .min_by_key(|(i, _)| *i)
        .copied()
        .expect("grid holds at least one point");
    Ok(GridArgmax {
        index,
        point: grid.point(index),
        value,
    })
}

/// Exhaustive grid argmax of `objective`. Among values tied with the
/// maximum (see [`TIE_TOLERANCE`]) the smallest point wins.
///
/// Fails if the objective is not finite at some grid point. A [`GridSpec`]
/// always holds at least one point, so there is no empty-grid case.
pub fn grid_best_reply(objective: impl Fn(f64) -> f64, grid: &GridSpec) -> Result<GridArgmax> {
    let evaluated: Vec<_> = (0..grid.len())
        .map(|i| (i, objective(grid.point(i))))
        .collect();
    select(grid, &evaluated)
}

/// Same result as [`grid_best_reply`], usually after far fewer evaluations.
///
/// `ceiling(lo, hi, f_lo, f_hi)` must bound the objective from above on
/// `[lo, hi]` given its values at both ends; see [`lipschitz_ceiling`] and
/// [`concave_ceiling`].
pub fn grid_best_reply_bounded(
    objective: impl Fn(f64) -> f64,
    grid: &GridSpec,
    ceiling: impl Fn(f64, f64, f64, f64) -> f64,
) -> Result<GridArgmax> {
    let last = grid.last_index();
    let mut evaluated = Vec::with_capacity(256);
    let mut eval = |i: usize| -> Result<f64> {
        let v = objective(grid.point(i));
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective(grid.point(i)));
        }
        evaluated.push((i, v));
        Ok(v)
    };
    let (f_first, f_last) = (eval(0)?, eval(last)?);
    let mut best = f_first.max(f_last);

    let mut stack = vec![(0usize, last, f_first, f_last)];
    while let Some((lo, hi, f_lo, f_hi)) = stack.pop() {
        if hi - lo < 2 {
            continue;
        }
        let bound = ceiling(grid.point(lo), grid.point(hi), f_lo, f_hi);
        let slack = 1e-12 * (f_lo.abs() + f_hi.abs() + bound.abs()) + 1e-300;
        // Every interior point is strictly below anything that could tie.
        if bound + slack < tie_floor(best) {
            continue;
        }
        let mid = lo + (hi - lo) / 2;
        let f_mid = eval(mid)?;
        best = best.max(f_mid);
        // Explore the more promising half first.
        if f_lo > f_hi {
            stack.push((mid, hi, f_mid, f_hi));
            stack.push((lo, mid, f_lo, f_mid));
        } else {
            stack.push((lo, mid, f_lo, f_mid));
            stack.push((mid, hi, f_mid, f_hi));
        }
    }
    select(grid, &evaluated)
}

/// Ceiling on `[lo, hi]` for a function whose slope is bounded by
/// `lipschitz` in absolute value.
pub fn lipschitz_ceiling(lo: f64, hi: f64, f_lo: f64, f_hi: f64, lipschitz: f64) -> f64 {
    0.5 * (f_lo + f_hi) + 0.5 * lipschitz * (hi - lo)
}

/// Exact maximum on `[lo, hi]` of the quadratic through both end values
/// with second derivative `-2 curvature` (`curvature >= 0`).
pub fn concave_ceiling(lo: f64, hi: f64, f_lo: f64, f_hi: f64, curvature: f64) -> f64 {
    let width = hi - lo;
    let chord = (f_hi - f_lo) / width;
    if curvature <= 0.0 {
        return f_lo.max(f_hi);
    }
    let t = (0.5 * (width + chord / curvature)).clamp(0.0, width);
    f_lo + chord * t + curvature * t * (width - t)
}

/// Which payoff functions the oracle plays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffFamily {
    Classical,
    /// Finite entanglement, raw or normalized.
    Quantum(EntanglementConfig),
    /// Maximal correlation: both players receive `(x_A + x_B) / 2`.
    Entangled,
}

/// A market together with the payoff family played on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Game {
    duopoly: Duopoly,
    family: PayoffFamily,
    /// `(own, other, total)` correlation coefficients.
    #[serde(skip)]
    coefficients: (f64, f64, f64),
}

impl Game {
    pub fn new(duopoly: Duopoly, family: PayoffFamily) -> Result<Self> {
        let coefficients = match family {
            PayoffFamily::Classical => (1.0, 0.0, 1.0),
            PayoffFamily::Entangled => (0.5, 0.5, 1.0),
            PayoffFamily::Quantum(config) => {
                if config.gamma() == Gamma::Infinite {
                    return Err(Error::InfiniteGamma);
                }
                let (q_a, q_b) = quantum::correlate(1.0, 0.0, &config)?;
                let total = match (config.gamma(), config.mode()) {
                    (Gamma::Finite(g), CorrelationMode::Raw) => g.exp(),
                    _ => 1.0,
                };
                (q_a, q_b, total)
            }
        };
        Ok(Self {
            duopoly,
            family,
            coefficients,
        })
    }

    pub fn classical(duopoly: Duopoly) -> Self {
        Self::new(duopoly, PayoffFamily::Classical).expect("classical game is always valid")
    }

    pub fn entangled(duopoly: Duopoly) -> Self {
        Self::new(duopoly, PayoffFamily::Entangled).expect("entangled game is always valid")
    }

    pub fn quantum(duopoly: Duopoly, config: EntanglementConfig) -> Result<Self> {
        Self::new(duopoly, PayoffFamily::Quantum(config))
    }

    pub fn duopoly(&self) -> &Duopoly {
        &self.duopoly
    }

    pub fn family(&self) -> PayoffFamily {
        self.family
    }

    fn payoff(&self, player: Player, x_a: f64, x_b: f64) -> f64 {
        match self.family {
            PayoffFamily::Classical => match player {
                Player::Leader => self.duopoly.leader_payoff(x_a, x_b),
                Player::Follower(ty) => self.duopoly.follower_payoff(ty, x_a, x_b),
            },
            PayoffFamily::Entangled => entangled::entangled_payoff(&self.duopoly, player, x_a, x_b),
            PayoffFamily::Quantum(_) => {
                quantum::payoff_unchecked(&self.duopoly, self.coefficients, player, x_a, x_b)
            }
        }
    }

    pub fn leader_payoff(&self, x_a: f64, x_b: f64) -> f64 {
        self.payoff(Player::Leader, x_a, x_b)
    }

    pub fn follower_payoff(&self, ty: FollowerType, x_a: f64, x_b: f64) -> f64 {
        self.payoff(Player::Follower(ty), x_a, x_b)
    }

    /// Leader's expected payoff against per-type follower outputs.
    pub fn leader_expected(&self, x_a: f64, x_bh: f64, x_bl: f64) -> f64 {
        mixture(
            self.duopoly.theta(),
            self.leader_payoff(x_a, x_bh),
            self.leader_payoff(x_a, x_bl),
        )
    }

    /// Ceiling of `follower_payoff(ty, x_a, .)` on `[lo, hi]`.
    ///
    /// With delivered quantity `q = own x_b + other x_a` and total supply
    /// `T = total (x_a + x_b)`, the payoff is the concave quadratic
    /// `q (m - T)` while `T <= a` and linear once the market floods. An
    /// interval straddling the kink falls back to a slope bound: the slope
    /// `own (m - T) - total q` is affine, so extreme at an end.
    fn follower_ceiling(
        &self,
        ty: FollowerType,
        x_a: f64,
        (lo, hi): (f64, f64),
        (f_lo, f_hi): (f64, f64),
    ) -> f64 {
        let (own, other, total) = self.coefficients;
        let player = Player::Follower(ty);
        let a = self.duopoly.a();
        if total * (x_a + hi) <= a {
            return concave_ceiling(lo, hi, f_lo, f_hi, own * total);
        }
        if total * (x_a + lo) > a {
            return f_lo.max(f_hi);
        }
        let margin = self.duopoly.margin(player);
        let cost = self.duopoly.cost(player);
        let slope = |y: f64| own * (margin - total * (x_a + y)) - total * (own * y + other * x_a);
        let lipschitz = slope(lo).abs().max(slope(hi).abs()).max((cost * own).abs());
        lipschitz_ceiling(lo, hi, f_lo, f_hi, lipschitz)
    }
}

/// The follower type's grid best reply to `x_a`.
pub fn follower_grid_reply(
    game: &Game,
    ty: FollowerType,
    x_a: f64,
    grid: &GridSpec,
) -> Result<GridArgmax> {
    grid_best_reply_bounded(
        |y| game.follower_payoff(ty, x_a, y),
        grid,
        |lo, hi, f_lo, f_hi| game.follower_ceiling(ty, x_a, (lo, hi), (f_lo, f_hi)),
    )
}

/// Per-mover gain from the best single grid deviation. Never negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationGains {
    pub leader: f64,
    pub follower_high: f64,
    pub follower_low: f64,
}

impl DeviationGains {
    pub fn worst(&self) -> f64 {
        self.leader.max(self.follower_high).max(self.follower_low)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Grid equilibrium; every coordinate is a grid point.
    pub profile: EquilibriumProfile,
    /// Leader's expected payoff at the grid equilibrium.
    pub leader_value: f64,
    pub certificate: DeviationGains,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub passed: bool,
    pub worst_deviation: f64,
    pub gains: DeviationGains,
    /// All profile coordinates lie in `[0, upper]`.
    pub in_bounds: bool,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy)]
struct LeaderNode {
    value: f64,
    x_bh: f64,
    x_bl: f64,
}

/// Leader's induced payoff at `x_a` when both follower types best-reply on
/// the grid.
fn leader_node(game: &Game, x_a: f64, grid: &GridSpec) -> Result<LeaderNode> {
    let high = follower_grid_reply(game, FollowerType::High, x_a, grid)?;
    let low = follower_grid_reply(game, FollowerType::Low, x_a, grid)?;
    Ok(LeaderNode {
        value: game.leader_expected(x_a, high.point, low.point),
        x_bh: high.point,
        x_bl: low.point,
    })
}

/// Grid argmax of the leader's induced payoff, with its node.
fn leader_sweep(game: &Game, grid: &GridSpec) -> Result<(GridArgmax, LeaderNode)> {
    let nodes = (0..grid.len())
        .into_par_iter()
        .map(|i| leader_node(game, grid.point(i), grid))
        .collect::<Result<Vec<_>>>()?;
    // Sequential reduction keeps the smallest-point tie rule.
    let values: Vec<_> = nodes.iter().map(|n| n.value).enumerate().collect();
    let best = select(grid, &values)?;
    Ok((best, nodes[best.index]))
}

fn certify_against(
    game: &Game,
    profile: &EquilibriumProfile,
    grid: &GridSpec,
    epsilon: f64,
    leader_best: f64,
) -> Result<Certification> {
    let x_a = profile.x_a;
    let node = leader_node(game, x_a, grid)?;
    let follower_gain = |ty: FollowerType| -> Result<f64> {
        let reply = follower_grid_reply(game, ty, x_a, grid)?;
        Ok((reply.value - game.follower_payoff(ty, x_a, profile.follower(ty))).max(0.0))
    };
    let gains = DeviationGains {
        leader: (leader_best - node.value).max(0.0),
        follower_high: follower_gain(FollowerType::High)?,
        follower_low: follower_gain(FollowerType::Low)?,
    };
    let in_bounds = [profile.x_a, profile.x_bh, profile.x_bl]
        .iter()
        .all(|&x| grid.contains(x));
    let worst_deviation = gains.worst();
    Ok(Certification {
        passed: in_bounds && worst_deviation <= epsilon,
        worst_deviation,
        gains,
        in_bounds,
        epsilon,
    })
}

pub fn solve_backward_induction(game: &Game, grid: &GridSpec) -> Result<OracleResult> {
    let (best, node) = leader_sweep(game, grid)?;
    let profile = EquilibriumProfile::new(best.point, node.x_bh, node.x_bl);
    let certificate = certify_against(game, &profile, grid, 0.0, best.value)?.gains;
    Ok(OracleResult {
        profile,
        leader_value: best.value,
        certificate,
        grid: *grid,
    })
}

/// Checks that no single mover gains more than `epsilon` by a grid
/// deviation from `profile`:
///
/// * each follower type, facing the profile's `x_A`, against every grid
///   output;
/// * the leader, against every grid output, with the follower re-solving
///   its grid best reply to whatever the leader plays (the profile's own
///   `x_A` included).
///
/// Profiles with coordinates outside the grid range never pass.
pub fn certify_epsilon_spe(
    game: &Game,
    profile: &EquilibriumProfile,
    grid: &GridSpec,
    epsilon: f64,
) -> Result<Certification> {
    let (best, _) = leader_sweep(game, grid)?;
    certify_against(game, profile, grid, epsilon, best.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub gamma: f64,
    pub result: OracleResult,
}

/// Grid equilibria of the finite-entanglement game for each `gamma`.
pub fn explore_gamma(
    duopoly: &Duopoly,
    gammas: &[f64],
    mode: CorrelationMode,
    grid: &GridSpec,
) -> Result<Vec<GammaPoint>> {
    gammas
        .iter()
        .map(|&gamma| {
            let config = EntanglementConfig::new(Gamma::Finite(gamma), mode)?;
            let game = Game::quantum(*duopoly, config)?;
            Ok(GammaPoint {
                gamma,
                result: solve_backward_induction(&game, grid)?,
            })
        })
        .collect()
}
