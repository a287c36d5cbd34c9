//! Market parameters, derived margins and the piecewise payoffs shared by
//! every solver.
//!
//! The market has inverse demand `P = a - Q` floored at zero. The follower
//! (player B) privately knows its marginal cost, which is `c_high_margin`
//! with probability `theta` and `c_low_margin` otherwise. Note the naming:
//! the *high-margin* type is the *low-cost* one, so `k_high = a -
//! c_high_margin > k_low = a - c_low_margin`.
//!
//! The leader's cost is not a free parameter. Every closed form in this
//! crate assumes the leader's margin equals the expected follower margin
//! `k`, so the leader cost is fixed at `a - k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw model inputs, as read from a user or a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuopolyParams {
    /// Price ceiling: the price when nothing is supplied.
    pub a: f64,
    /// Marginal cost of the follower type with the larger margin.
    pub c_high_margin: f64,
    /// Marginal cost of the follower type with the smaller margin.
    pub c_low_margin: f64,
    /// Probability that the follower is the high-margin type.
    pub theta: f64,
}

impl DuopolyParams {
    pub fn new(a: f64, c_high_margin: f64, c_low_margin: f64, theta: f64) -> Self {
        Self {
            a,
            c_high_margin,
            c_low_margin,
            theta,
        }
    }

    /// Checks the standing assumptions `a > 0`, `0 <= c_H < c_L < a` and
    /// `0 <= theta <= 1`.
    pub fn validate(&self) -> Result<()> {
        let Self {
            a,
            c_high_margin: c_h,
            c_low_margin: c_l,
            theta,
        } = *self;
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::params("a > 0", format!("a = {a}")));
        }
        if !(c_h.is_finite() && c_h >= 0.0) {
            return Err(Error::params(
                "0 <= c_high_margin",
                format!("c_high_margin = {c_h}"),
            ));
        }
        if !(c_l.is_finite() && c_h < c_l) {
            return Err(Error::params(
                "c_high_margin < c_low_margin",
                format!("c_high_margin = {c_h}, c_low_margin = {c_l}"),
            ));
        }
        if c_l >= a {
            return Err(Error::params(
                "c_low_margin < a",
                format!("c_low_margin = {c_l}, a = {a}"),
            ));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::params("0 <= theta <= 1", format!("theta = {theta}")));
        }
        Ok(())
    }

    /// Same market with a different type probability.
    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }
}

/// Follower margins `(k_H, k_L)` and the leader's margin, their
/// `theta`-mixture `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub k_high: f64,
    pub k_low: f64,
    pub k: f64,
}

impl Margins {
    /// Builds margins directly. Callers are responsible for `k_high > k_low > 0`.
    pub fn from_follower_margins(k_high: f64, k_low: f64, theta: f64) -> Self {
        Self {
            k_high,
            k_low,
            k: mixture(theta, k_high, k_low),
        }
    }

    pub fn of(&self, ty: FollowerType) -> f64 {
        match ty {
            FollowerType::High => self.k_high,
            FollowerType::Low => self.k_low,
        }
    }
}

pub fn derive_margins(params: &DuopolyParams) -> Result<Margins> {
    params.validate()?;
    Ok(Margins::from_follower_margins(
        params.a - params.c_high_margin,
        params.a - params.c_low_margin,
        params.theta,
    ))
}

/// Which branch of the classical equilibrium applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `k_L > theta k_H / (1 + theta)`: both follower types produce.
    Interior,
    /// `theta k_H / 2 <= k_L <= theta k_H / (1 + theta)`: the leader sits on
    /// the low type's shutdown point.
    Boundary,
    /// `k_L < theta k_H / 2`: the low type is shut out entirely.
    Corner,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Interior => "interior",
            Regime::Boundary => "boundary",
            Regime::Corner => "corner",
        })
    }
}

/// Threshold equalities resolve to `Boundary`.
pub fn classify_regime(margins: &Margins, theta: f64) -> Regime {
    let upper = theta * margins.k_high / (1.0 + theta);
    let lower = theta * margins.k_high / 2.0;
    if margins.k_low > upper {
        Regime::Interior
    } else if margins.k_low < lower {
        Regime::Corner
    } else {
        Regime::Boundary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FollowerType {
    /// Occurs with probability `theta`.
    High,
    Low,
}

impl FollowerType {
    pub const BOTH: [FollowerType; 2] = [FollowerType::High, FollowerType::Low];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    Leader,
    Follower(FollowerType),
}

/// Quantities `(x_A, x_BH, x_BL)`: the leader's output and the follower's
/// output for each of its types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    pub x_a: f64,
    pub x_bh: f64,
    pub x_bl: f64,
}

impl EquilibriumProfile {
    pub fn new(x_a: f64, x_bh: f64, x_bl: f64) -> Self {
        Self { x_a, x_bh, x_bl }
    }

    pub fn follower(&self, ty: FollowerType) -> f64 {
        match ty {
            FollowerType::High => self.x_bh,
            FollowerType::Low => self.x_bl,
        }
    }

    /// Largest coordinate-wise distance to `other`.
    pub fn max_distance(&self, other: &Self) -> f64 {
        (self.x_a - other.x_a)
            .abs()
            .max((self.x_bh - other.x_bh).abs())
            .max((self.x_bl - other.x_bl).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffReport {
    /// Leader's expected payoff.
    pub u_a: f64,
    pub u_bh: f64,
    pub u_bl: f64,
    /// Follower's ex-ante expected payoff `theta u_BH + (1 - theta) u_BL`.
    pub u_b: f64,
}

impl PayoffReport {
    pub fn new(theta: f64, u_a: f64, u_bh: f64, u_bl: f64) -> Self {
        Self {
            u_a,
            u_bh,
            u_bl,
            u_b: mixture(theta, u_bh, u_bl),
        }
    }

    pub fn follower(&self, ty: FollowerType) -> f64 {
        match ty {
            FollowerType::High => self.u_bh,
            FollowerType::Low => self.u_bl,
        }
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        [
            self.u_a - other.u_a,
            self.u_bh - other.u_bh,
            self.u_bl - other.u_bl,
            self.u_b - other.u_b,
        ]
        .iter()
        .fold(0.0_f64, |acc, d| acc.max(d.abs()))
    }
}

/// `theta * high + (1 - theta) * low`
#[inline]
pub fn mixture(theta: f64, high: f64, low: f64) -> f64 {
    theta * high + (1.0 - theta) * low
}

/// Profit `own * (margin - total)` while the price `a - total` is
/// non-negative, and `-cost * own` once the market is flooded.
///
/// The branches agree at `total = a` because `margin = a - cost`.
#[inline]
pub fn floored_price_payoff(own: f64, margin: f64, cost: f64, total: f64, a: f64) -> f64 {
    if total <= a {
        own * (margin - total)
    } else {
        -cost * own
    }
}

/// A validated market: parameters plus everything derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Duopoly {
    params: DuopolyParams,
    margins: Margins,
}

impl Duopoly {
    pub fn new(params: DuopolyParams) -> Result<Self> {
        let margins = derive_margins(&params)?;
        Ok(Self { params, margins })
    }

    pub fn params(&self) -> &DuopolyParams {
        &self.params
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    pub fn theta(&self) -> f64 {
        self.params.theta
    }

    pub fn a(&self) -> f64 {
        self.params.a
    }

    /// `a - k`, the cost that gives the leader the expected follower margin.
    pub fn leader_cost(&self) -> f64 {
        self.params.a - self.margins.k
    }

    pub fn follower_cost(&self, ty: FollowerType) -> f64 {
        match ty {
            FollowerType::High => self.params.c_high_margin,
            FollowerType::Low => self.params.c_low_margin,
        }
    }

    pub fn margin(&self, player: Player) -> f64 {
        match player {
            Player::Leader => self.margins.k,
            Player::Follower(ty) => self.margins.of(ty),
        }
    }

    pub fn cost(&self, player: Player) -> f64 {
        match player {
            Player::Leader => self.leader_cost(),
            Player::Follower(ty) => self.follower_cost(ty),
        }
    }

    pub fn regime(&self) -> Regime {
        classify_regime(&self.margins, self.params.theta)
    }

    pub fn leader_payoff(&self, x_a: f64, x_b: f64) -> f64 {
        floored_price_payoff(
            x_a,
            self.margins.k,
            self.leader_cost(),
            x_a + x_b,
            self.params.a,
        )
    }

    pub fn follower_payoff(&self, ty: FollowerType, x_a: f64, x_b: f64) -> f64 {
        floored_price_payoff(
            x_b,
            self.margins.of(ty),
            self.follower_cost(ty),
            x_a + x_b,
            self.params.a,
        )
    }

    /// Ex-ante payoffs of a profile under the classical payoffs.
    pub fn expected_payoffs(&self, profile: &EquilibriumProfile) -> PayoffReport {
        let theta = self.params.theta;
        let u_a = mixture(
            theta,
            self.leader_payoff(profile.x_a, profile.x_bh),
            self.leader_payoff(profile.x_a, profile.x_bl),
        );
        PayoffReport::new(
            theta,
            u_a,
            self.follower_payoff(FollowerType::High, profile.x_a, profile.x_bh),
            self.follower_payoff(FollowerType::Low, profile.x_a, profile.x_bl),
        )
    }
}
