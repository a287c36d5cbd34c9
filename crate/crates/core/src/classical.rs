//! Closed-form subgame perfect equilibrium of the classical Stackelberg
//! duopoly where the leader is unsure of the follower's cost.
//!
//! The follower best-replies type by type; the leader maximizes the induced
//! expected payoff, a three-piece concave-by-parts function of its output
//! with kinks where each follower type shuts down.

use serde::{Deserialize, Serialize};

use crate::model::{classify_regime, Duopoly, EquilibriumProfile, Margins, PayoffReport, Regime};

/// Tolerance below which the payoff gap is reported as a tie.
pub const ADVANTAGE_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSolution {
    pub profile: EquilibriumProfile,
    pub payoffs: PayoffReport,
    pub regime: Regime,
    /// `u_A - u_B`: positive means the leader is better off.
    pub mover_advantage: f64,
}

/// A published closed form that is only an equilibrium under a side
/// condition. The profile is reported either way; `valid` says whether the
/// condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedSolution {
    pub profile: EquilibriumProfile,
    pub payoffs: PayoffReport,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoverAdvantage {
    First,
    Second,
    Tie,
}

impl MoverAdvantage {
    pub fn from_gap(leader_minus_follower: f64) -> Self {
        if leader_minus_follower > ADVANTAGE_TIE_TOLERANCE {
            MoverAdvantage::First
        } else if leader_minus_follower < -ADVANTAGE_TIE_TOLERANCE {
            MoverAdvantage::Second
        } else {
            MoverAdvantage::Tie
        }
    }
}

impl std::fmt::Display for MoverAdvantage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MoverAdvantage::First => "first",
            MoverAdvantage::Second => "second",
            MoverAdvantage::Tie => "tie",
        })
    }
}

/// Follower output per type, `(x_BH, x_BL)`. Each type produces half its
/// residual margin and shuts down once the leader covers the whole margin.
pub fn follower_best_reply(margins: &Margins, x_a: f64) -> (f64, f64) {
    let reply = |k: f64| if x_a <= k { 0.5 * (k - x_a) } else { 0.0 };
    (reply(margins.k_high), reply(margins.k_low))
}

/// Leader's expected payoff when the follower best-replies, as a function of
/// the leader's output alone.
pub fn leader_induced_payoff(margins: &Margins, theta: f64, x_a: f64) -> f64 {
    let Margins { k_high, k_low, k } = *margins;
    if x_a <= k_low {
        0.5 * (k - x_a) * x_a
    } else if x_a <= k_high {
        0.5 * x_a * (2.0 * k - theta * k_high + (theta - 2.0) * x_a)
    } else {
        x_a * (k - x_a)
    }
}

pub fn leader_best_reply(margins: &Margins, theta: f64) -> f64 {
    leader_output(margins, theta, classify_regime(margins, theta))
}

fn leader_output(margins: &Margins, theta: f64, regime: Regime) -> f64 {
    let Margins { k_high, k_low, k } = *margins;
    match regime {
        Regime::Interior => 0.5 * k,
        Regime::Boundary => k_low,
        Regime::Corner => (2.0 * k_low * (1.0 - theta) + theta * k_high) / (2.0 * (2.0 - theta)),
    }
}

/// Equilibrium payoffs from the per-regime closed forms.
fn closed_form_payoffs(margins: &Margins, theta: f64, regime: Regime) -> PayoffReport {
    let Margins { k_high, k_low, k } = *margins;
    match regime {
        Regime::Interior => PayoffReport::new(
            theta,
            k * k / 8.0,
            (k - 2.0 * k_high).powi(2) / 16.0,
            (k - 2.0 * k_low).powi(2) / 16.0,
        ),
        Regime::Boundary => PayoffReport::new(
            theta,
            0.5 * theta * (k_high - k_low) * k_low,
            0.25 * (k_high - k_low).powi(2),
            0.0,
        ),
        Regime::Corner => {
            let lead = 2.0 * k_low * (1.0 - theta) + theta * k_high;
            let follow = k + k_low + 2.0 * k_high * (theta - 2.0) - theta * k_low;
            PayoffReport::new(
                theta,
                lead * lead / (8.0 * (2.0 - theta)),
                follow * follow / (16.0 * (theta - 2.0).powi(2)),
                0.0,
            )
        }
    }
}

/// Profile of the regime's case formula, regardless of which regime the
/// margins actually fall in. Used to check continuity across thresholds.
pub fn regime_profile(margins: &Margins, theta: f64, regime: Regime) -> EquilibriumProfile {
    let x_a = leader_output(margins, theta, regime);
    let (x_bh, x_bl) = follower_best_reply(margins, x_a);
    EquilibriumProfile::new(x_a, x_bh, x_bl)
}

pub fn solve_spe(duopoly: &Duopoly) -> ClassicalSolution {
    let margins = duopoly.margins();
    let theta = duopoly.theta();
    let regime = duopoly.regime();
    let profile = regime_profile(margins, theta, regime);
    let payoffs = closed_form_payoffs(margins, theta, regime);
    ClassicalSolution {
        profile,
        payoffs,
        regime,
        mover_advantage: payoffs.u_a - payoffs.u_b,
    }
}

/// The unrestricted-looking first-order solution `(k/2, (k_H - k/2)/2,
/// (k_L - k/2)/2)`, an equilibrium only when `k_L >= k/2`.
pub fn lo_kiang_classical(duopoly: &Duopoly) -> RestrictedSolution {
    let Margins { k_high, k_low, k } = *duopoly.margins();
    let theta = duopoly.theta();
    let half = 0.5 * k;
    let profile = EquilibriumProfile::new(half, 0.5 * (k_high - half), 0.5 * (k_low - half));
    let payoffs = PayoffReport::new(
        theta,
        k * k / 8.0,
        0.25 * (k_high - half).powi(2),
        0.25 * (k_low - half).powi(2),
    );
    RestrictedSolution {
        profile,
        payoffs,
        valid: k_low >= half,
    }
}

pub fn mover_advantage_sign(duopoly: &Duopoly) -> MoverAdvantage {
    MoverAdvantage::from_gap(solve_spe(duopoly).mover_advantage)
}
