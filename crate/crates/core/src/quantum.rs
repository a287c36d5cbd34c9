//! Li-Du-Massar correlated quantities and the finite-entanglement duopoly.
//!
//! Players choose `x_A, x_B >= 0`; the entangling scheme turns them into the
//! delivered quantities
//!
//! ```text
//! q_A = x_A cosh(g) + x_B sinh(g)      q_B = x_B cosh(g) + x_A sinh(g)
//! ```
//!
//! ("raw" mode). Dividing both by `e^g` gives the "normalized" mode, which
//! keeps quantities in the units of the `x_i` and tends to `(x_A + x_B) / 2`
//! as `g` grows. Only these expectation values are modelled; there is no
//! operator-level simulation.

use serde::{Deserialize, Serialize};

use crate::classical::RestrictedSolution;
use crate::error::{Error, Result};
use crate::model::{
    floored_price_payoff, mixture, Duopoly, EquilibriumProfile, FollowerType, PayoffReport, Player,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    Raw,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamma {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementConfig {
    gamma: Gamma,
    mode: CorrelationMode,
}

impl EntanglementConfig {
    pub fn new(gamma: Gamma, mode: CorrelationMode) -> Result<Self> {
        match gamma {
            Gamma::Finite(g) if !(g.is_finite() && g >= 0.0) => Err(Error::InvalidGamma(g)),
            Gamma::Infinite if mode == CorrelationMode::Raw => Err(Error::DivergentRawCorrelation),
            _ => Ok(Self { gamma, mode }),
        }
    }

    pub fn raw(gamma: f64) -> Result<Self> {
        Self::new(Gamma::Finite(gamma), CorrelationMode::Raw)
    }

    pub fn normalized(gamma: f64) -> Result<Self> {
        Self::new(Gamma::Finite(gamma), CorrelationMode::Normalized)
    }

    pub fn maximal() -> Self {
        Self {
            gamma: Gamma::Infinite,
            mode: CorrelationMode::Normalized,
        }
    }

    pub fn gamma(&self) -> Gamma {
        self.gamma
    }

    pub fn mode(&self) -> CorrelationMode {
        self.mode
    }

    /// `(own, other, total)`: `q_i = own * x_i + other * x_j` and
    /// `q_A + q_B = total * (x_A + x_B)`.
    fn coefficients(&self) -> (f64, f64, f64) {
        match (self.gamma, self.mode) {
            (Gamma::Finite(g), CorrelationMode::Raw) => (g.cosh(), g.sinh(), g.exp()),
            (Gamma::Finite(g), CorrelationMode::Normalized) => {
                // cosh(g)/e^g and sinh(g)/e^g without overflow for large g.
                let decay = (-2.0 * g).exp();
                (0.5 * (1.0 + decay), 0.5 * (1.0 - decay), 1.0)
            }
            (Gamma::Infinite, _) => (0.5, 0.5, 1.0),
        }
    }
}

/// Delivered quantities `(q_A, q_B)` for chosen quantities `(x_A, x_B)`.
pub fn correlate(x_a: f64, x_b: f64, config: &EntanglementConfig) -> Result<(f64, f64)> {
    if config.gamma == Gamma::Infinite && config.mode == CorrelationMode::Raw {
        return Err(Error::DivergentRawCorrelation);
    }
    let (own, other, _) = config.coefficients();
    Ok((own * x_a + other * x_b, own * x_b + other * x_a))
}

/// Payoff of `player` when the classical floored-price payoff is evaluated
/// at the delivered quantities. The price falls with the total delivered
/// quantity, `e^g (x_A + x_B)` in raw mode.
pub fn quantum_payoff(
    duopoly: &Duopoly,
    config: &EntanglementConfig,
    player: Player,
    x_a: f64,
    x_b: f64,
) -> Result<f64> {
    if config.gamma == Gamma::Infinite {
        return Err(Error::InfiniteGamma);
    }
    Ok(payoff_unchecked(
        duopoly,
        config.coefficients(),
        player,
        x_a,
        x_b,
    ))
}

#[inline]
pub(crate) fn payoff_unchecked(
    duopoly: &Duopoly,
    (own, other, total): (f64, f64, f64),
    player: Player,
    x_a: f64,
    x_b: f64,
) -> f64 {
    let q = match player {
        Player::Leader => own * x_a + other * x_b,
        Player::Follower(_) => own * x_b + other * x_a,
    };
    floored_price_payoff(
        q,
        duopoly.margin(player),
        duopoly.cost(player),
        total * (x_a + x_b),
        duopoly.a(),
    )
}

/// Largest entanglement for which the first-order quantum solution can
/// keep both follower outputs non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBound {
    pub gamma_max: f64,
}

/// `ln(1 + sqrt 2) / 2`, equivalently `asinh(1) / 2`.
pub fn gamma_max() -> GammaBound {
    GammaBound {
        gamma_max: 0.5 * (1.0 + std::f64::consts::SQRT_2).ln(),
    }
}

/// `(1 + e^{2g}) / (3 + e^{-2g})`: the low follower type keeps a
/// non-negative first-order output iff `k_L` is at least this multiple of `k`.
pub fn validity_factor(gamma: f64) -> f64 {
    (1.0 + (2.0 * gamma).exp()) / (3.0 + (-2.0 * gamma).exp())
}

/// First-order solution of the raw-mode quantum game:
///
/// ```text
/// x_A = cosh^2(g) e^{-g} / (1 + cosh(g) e^{-g}) * k
/// x_Bi = e^{-g} / 2 * (k_i - cosh(g) e^{g} / (1 + cosh(g) e^{-g}) * k)
/// ```
///
/// Valid iff `k_L >= k (1 + e^{2g}) / (3 + e^{-2g})`, which cannot hold for
/// any market once `g > gamma_max()` (except at `theta = 0`, where it holds
/// with equality at the bound). Payoffs are the raw-mode quantum payoffs at
/// the profile.
pub fn lo_kiang_quantum(duopoly: &Duopoly, gamma: f64) -> Result<RestrictedSolution> {
    let config = EntanglementConfig::raw(gamma)?;
    let m = duopoly.margins();
    let (c, e) = (gamma.cosh(), gamma.exp());
    let denom = 1.0 + c / e;
    let x_a = c * c / e / denom * m.k;
    let pressure = c * e / denom * m.k;
    let follower = |k_i: f64| 0.5 / e * (k_i - pressure);
    let profile = EquilibriumProfile::new(x_a, follower(m.k_high), follower(m.k_low));
    let payoffs = quantum_expected_payoffs(duopoly, &config, &profile)?;
    Ok(RestrictedSolution {
        profile,
        payoffs,
        valid: m.k_low >= validity_factor(gamma) * m.k,
    })
}

/// Ex-ante payoffs of a profile under finite-entanglement payoffs.
pub fn quantum_expected_payoffs(
    duopoly: &Duopoly,
    config: &EntanglementConfig,
    profile: &EquilibriumProfile,
) -> Result<PayoffReport> {
    let pay = |player, x_b| quantum_payoff(duopoly, config, player, profile.x_a, x_b);
    let theta = duopoly.theta();
    let u_a = mixture(
        theta,
        pay(Player::Leader, profile.x_bh)?,
        pay(Player::Leader, profile.x_bl)?,
    );
    Ok(PayoffReport::new(
        theta,
        u_a,
        pay(Player::Follower(FollowerType::High), profile.x_bh)?,
        pay(Player::Follower(FollowerType::Low), profile.x_bl)?,
    ))
}

/// Symmetric Cournot equilibrium output of the quantum duopoly with common
/// cost `c`: `(a - c) / (3 + tanh g)` normalized, `(a - c) cosh g / (1 + 2
/// e^{2g})` raw.
pub fn cournot_reference(a: f64, c: f64, gamma: f64, mode: CorrelationMode) -> Result<f64> {
    if !(a.is_finite() && c.is_finite() && c >= 0.0 && a > c) {
        return Err(Error::params("a > c >= 0", format!("a = {a}, c = {c}")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidGamma(gamma));
    }
    Ok(match mode {
        CorrelationMode::Normalized => (a - c) / (3.0 + gamma.tanh()),
        CorrelationMode::Raw => (a - c) * gamma.cosh() / (1.0 + 2.0 * (2.0 * gamma).exp()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::lo_kiang_classical;
    use crate::model::DuopolyParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn reference() -> Duopoly {
        Duopoly::new(DuopolyParams::new(10.0, 2.0, 4.0, 0.5)).unwrap()
    }

    #[test]
    fn identity_at_zero_gamma() {
        for config in [
            EntanglementConfig::raw(0.0).unwrap(),
            EntanglementConfig::normalized(0.0).unwrap(),
        ] {
            assert_eq!(correlate(3.0, 1.5, &config).unwrap(), (3.0, 1.5));
        }
    }

    #[test]
    fn maximal_correlation_averages() {
        let q = correlate(3.0, 1.0, &EntanglementConfig::maximal()).unwrap();
        assert_eq!(q, (2.0, 2.0));
    }

    #[test]
    fn raw_at_gamma_one() {
        let (qa, qb) = correlate(1.0, 0.0, &EntanglementConfig::raw(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(qa, 1.0_f64.cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(qb, 1.0_f64.sinh(), epsilon = 1e-15);
        assert_abs_diff_eq!(qa, 1.5431, epsilon = 1e-4);
        assert_abs_diff_eq!(qb, 1.1752, epsilon = 1e-4);
        assert_abs_diff_eq!(qa + qb, 1.0_f64.exp(), epsilon = 1e-14);
    }

    #[test]
    fn infinite_raw_rejected() {
        assert_eq!(
            EntanglementConfig::new(Gamma::Infinite, CorrelationMode::Raw),
            Err(Error::DivergentRawCorrelation)
        );
        assert_eq!(
            EntanglementConfig::raw(-0.1),
            Err(Error::InvalidGamma(-0.1))
        );
        let d = reference();
        assert_eq!(
            quantum_payoff(&d, &EntanglementConfig::maximal(), Player::Leader, 1.0, 1.0),
            Err(Error::InfiniteGamma)
        );
    }

    #[test]
    fn payoff_reduces_to_classical_at_zero_gamma() {
        let d = reference();
        let config = EntanglementConfig::raw(0.0).unwrap();
        for x_a in [0.0, 1.0, 3.5, 7.0, 9.5] {
            for x_b in [0.0, 0.5, 2.25, 4.0, 8.0] {
                let q = |p| quantum_payoff(&d, &config, p, x_a, x_b).unwrap();
                assert_eq!(q(Player::Leader), d.leader_payoff(x_a, x_b));
                for ty in FollowerType::BOTH {
                    assert_eq!(q(Player::Follower(ty)), d.follower_payoff(ty, x_a, x_b));
                }
            }
        }
    }

    #[test]
    fn payoff_examples() {
        let d = reference();
        let config = EntanglementConfig::raw(0.3).unwrap();
        let u = quantum_payoff(&d, &config, Player::Leader, 1.0, 1.0).unwrap();
        let e = 0.3_f64.exp();
        assert_abs_diff_eq!(u, e * (7.0 - 2.0 * e), epsilon = 1e-12);
        assert_abs_diff_eq!(u, 5.805, epsilon = 1e-3);

        // Flooded market: e^g (x_A + x_B) > a.
        let u = quantum_payoff(&d, &config, Player::Follower(FollowerType::Low), 5.0, 4.0).unwrap();
        let (_, q_b) = correlate(5.0, 4.0, &config).unwrap();
        assert_abs_diff_eq!(u, -4.0 * q_b, epsilon = 1e-12);
    }

    #[test]
    fn gamma_max_value() {
        let g = gamma_max().gamma_max;
        assert!(g > 0.44068 && g < 0.44069);
        assert_abs_diff_eq!(g, 0.440687, epsilon = 1e-6);
        assert_abs_diff_eq!((2.0 * g).sinh(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g, 0.5 * 1.0_f64.asinh(), epsilon = 1e-15);
        assert_abs_diff_eq!(validity_factor(g), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn validity_factor_crosses_one_at_gamma_max() {
        // Bisection on factor(g) - 1, which is increasing in g.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if validity_factor(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g0 = gamma_max().gamma_max;
        assert!((lo - g0).abs() < 1e-10);
        assert!(validity_factor(g0 - 1e-9) < 1.0);
        assert!(validity_factor(g0 + 1e-9) > 1.0);
    }

    #[test]
    fn lo_kiang_quantum_reduces_at_zero_gamma() {
        let d = reference();
        let q = lo_kiang_quantum(&d, 0.0).unwrap();
        let c = lo_kiang_classical(&d);
        assert!(q.profile.max_distance(&c.profile) < 1e-12);
        assert!(q.payoffs.max_distance(&c.payoffs) < 1e-12);
        assert_eq!(q.valid, c.valid);
    }

    #[test]
    fn lo_kiang_quantum_example() {
        let d = Duopoly::new(DuopolyParams::new(10.0, 2.0, 4.0, 0.1)).unwrap();
        let s = lo_kiang_quantum(&d, 0.2).unwrap();
        let threshold = 6.2 * (1.0 + 0.4_f64.exp()) / (3.0 + (-0.4_f64).exp());
        assert_abs_diff_eq!(threshold, 4.209, epsilon = 1e-3);
        assert!(s.valid);
        assert!(s.profile.x_bl >= 0.0);
    }

    #[test]
    fn lo_kiang_quantum_invalid_past_bound() {
        for theta in [0.0, 0.3, 1.0] {
            let d = Duopoly::new(DuopolyParams::new(10.0, 2.0, 4.0, theta)).unwrap();
            for g in [0.45, 0.5, 1.0, 3.0] {
                let s = lo_kiang_quantum(&d, g).unwrap();
                assert!(!s.valid);
                assert!(s.profile.x_bl < 0.0);
            }
        }
    }

    /// The threshold as it appears in the earlier literature, with `e^{-2g}`
    /// in the numerator. Kept only to show it differs from the corrected one.
    fn published_factor(gamma: f64) -> f64 {
        (1.0 + (-2.0 * gamma).exp()) / (3.0 + (-2.0 * gamma).exp())
    }

    #[test]
    fn published_threshold_differs_from_corrected() {
        assert_eq!(published_factor(0.0), validity_factor(0.0));
        for g in [0.1, 0.3, gamma_max().gamma_max, 0.7, 2.0] {
            assert!(validity_factor(g) > published_factor(g) + 1e-3);
        }
        // Under the published threshold this market looks valid at g = 0.6,
        // yet the low type's first-order output is negative.
        let d = Duopoly::new(DuopolyParams::new(10.0, 2.0, 4.0, 0.1)).unwrap();
        let m = d.margins();
        assert!(m.k_low >= published_factor(0.6) * m.k);
        let s = lo_kiang_quantum(&d, 0.6).unwrap();
        assert!(!s.valid && s.profile.x_bl < 0.0);
    }

    #[test]
    fn cournot_examples() {
        let n = |g| cournot_reference(10.0, 1.0, g, CorrelationMode::Normalized).unwrap();
        let r = |g| cournot_reference(10.0, 1.0, g, CorrelationMode::Raw).unwrap();
        assert_abs_diff_eq!(n(0.0), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r(0.0), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n(1.0), 9.0 / (3.0 + 1.0_f64.tanh()), epsilon = 1e-15);
        assert_abs_diff_eq!(n(1.0), 2.3926, epsilon = 1e-4);
        assert_relative_eq!(r(1.0) * 1.0_f64.exp(), n(1.0), max_relative = 1e-14);
        assert_abs_diff_eq!(n(20.0), 9.0 / 4.0, epsilon = 1e-6);
        assert!(cournot_reference(1.0, 1.0, 0.0, CorrelationMode::Raw).is_err());
    }

    proptest! {
        #[test]
        fn sum_and_difference_rules(x_a in 0.0f64..100.0, x_b in 0.0f64..100.0, g in 0.0f64..5.0) {
            let raw = correlate(x_a, x_b, &EntanglementConfig::raw(g).unwrap()).unwrap();
            let norm = correlate(x_a, x_b, &EntanglementConfig::normalized(g).unwrap()).unwrap();
            let scale = 1.0 + x_a + x_b;
            prop_assert!((raw.0 + raw.1 - g.exp() * (x_a + x_b)).abs() < 1e-12 * scale * g.exp());
            prop_assert!((norm.0 + norm.1 - (x_a + x_b)).abs() < 1e-12 * scale);
            prop_assert!((norm.0 - norm.1 - (x_a - x_b) * (-2.0 * g).exp()).abs() < 1e-12 * scale);
            // Normalized is raw scaled down by e^g.
            prop_assert!((norm.0 * g.exp() - raw.0).abs() < 1e-12 * scale * g.exp());
        }

        #[test]
        fn normalized_quantity_moves_monotonically_to_the_mean(
            x_a in 0.0f64..10.0, x_b in 0.0f64..10.0, g in 0.0f64..5.0, dg in 0.0f64..1.0,
        ) {
            let q = |g| correlate(x_a, x_b, &EntanglementConfig::normalized(g).unwrap()).unwrap().0;
            let mean = 0.5 * (x_a + x_b);
            let (near, far) = (q(g + dg), q(g));
            prop_assert!((near - mean).abs() <= (far - mean).abs() + 1e-12);
            prop_assert!((near - mean) * (far - mean) >= 0.0);
        }

        #[test]
        fn validity_matches_sign_of_low_output(
            a in 1.0f64..50.0, low in 0.0f64..0.98, gap in 0.02f64..0.98,
            theta in 0.0f64..=1.0, g in 0.0f64..0.44,
        ) {
            let c_h = low * a;
            let c_l = c_h + gap * (a - c_h) * 0.999;
            let d = Duopoly::new(DuopolyParams::new(a, c_h, c_l, theta)).unwrap();
            let s = lo_kiang_quantum(&d, g).unwrap();
            // Skip draws where x_BL is within rounding of zero.
            prop_assume!(s.profile.x_bl.abs() > 1e-9 * a);
            prop_assert_eq!(s.valid, s.profile.x_bl >= 0.0);
        }
    }
}
