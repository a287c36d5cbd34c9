//! The maximally correlated game: normalized Li-Du-Massar quantities in the
//! limit of infinite entanglement, where both players receive
//! `(x_A + x_B) / 2`.
//!
//! Here the follower ends up strictly better off than the leader whenever
//! the leader is genuinely uncertain (`0 < theta < 1`).

use serde::{Deserialize, Serialize};

use crate::model::{
    floored_price_payoff, mixture, Duopoly, EquilibriumProfile, FollowerType, Margins,
    PayoffReport, Player,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntangledSolution {
    pub profile: EquilibriumProfile,
    pub payoffs: PayoffReport,
    /// `u_B - u_A`, never negative.
    pub advantage: f64,
}

/// Payoff when both players receive half the total supply.
pub fn entangled_payoff(duopoly: &Duopoly, player: Player, x_a: f64, x_b: f64) -> f64 {
    let total = x_a + x_b;
    floored_price_payoff(
        0.5 * total,
        duopoly.margin(player),
        duopoly.cost(player),
        total,
        duopoly.a(),
    )
}

/// `(x_BH, x_BL)`: each type tops total supply up to half its margin.
pub fn follower_best_reply_entangled(margins: &Margins, x_a: f64) -> (f64, f64) {
    let reply = |k: f64| {
        let target = 0.5 * k;
        if x_a <= target {
            target - x_a
        } else {
            0.0
        }
    };
    (reply(margins.k_high), reply(margins.k_low))
}

/// Leader's expected entangled payoff when the follower best-replies.
pub fn leader_induced_payoff_entangled(duopoly: &Duopoly, x_a: f64) -> f64 {
    let (x_bh, x_bl) = follower_best_reply_entangled(duopoly.margins(), x_a);
    mixture(
        duopoly.theta(),
        entangled_payoff(duopoly, Player::Leader, x_a, x_bh),
        entangled_payoff(duopoly, Player::Leader, x_a, x_bl),
    )
}

/// Subgame perfect equilibrium `(k/2, (k_H - k)/2, 0)` with its closed-form
/// payoffs.
///
/// At `theta` in `{0, 1}` the leader is indifferent over a whole segment;
/// `k/2` is still returned there.
pub fn solve_spe_entangled(duopoly: &Duopoly) -> EntangledSolution {
    let Margins { k_high, k_low, k } = *duopoly.margins();
    let theta = duopoly.theta();
    let profile = EquilibriumProfile::new(0.5 * k, 0.5 * (k_high - k), 0.0);
    let payoffs = PayoffReport {
        u_a: (k * k - (k - k_high).powi(2) * theta) / 8.0,
        u_bh: k_high * k_high / 8.0,
        u_bl: (k_low * k_low - (k_high - k_low).powi(2) * theta * theta) / 8.0,
        u_b: (k * k + (k - k_high).powi(2) * theta) / 8.0,
    };
    EntangledSolution {
        profile,
        payoffs,
        advantage: payoffs.u_b - payoffs.u_a,
    }
}

/// `(k_H - k_L)^2 (1 - theta)^2 theta / 4`
pub fn second_mover_advantage(duopoly: &Duopoly) -> f64 {
    let m = duopoly.margins();
    let theta = duopoly.theta();
    0.25 * (m.k_high - m.k_low).powi(2) * (1.0 - theta).powi(2) * theta
}

/// Ex-ante entangled payoffs of an arbitrary profile.
pub fn entangled_expected_payoffs(duopoly: &Duopoly, profile: &EquilibriumProfile) -> PayoffReport {
    let theta = duopoly.theta();
    let pay = |player, x_b| entangled_payoff(duopoly, player, profile.x_a, x_b);
    PayoffReport::new(
        theta,
        mixture(
            theta,
            pay(Player::Leader, profile.x_bh),
            pay(Player::Leader, profile.x_bl),
        ),
        pay(Player::Follower(FollowerType::High), profile.x_bh),
        pay(Player::Follower(FollowerType::Low), profile.x_bl),
    )
}
