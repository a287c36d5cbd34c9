#![allow(dead_code)]

use rand::Rng;
use stackelberg::{Duopoly, DuopolyParams, Regime};

/// Price ceiling for random draws; the oracle tolerances are pinned at this
/// scale (h = 1e-3, epsilon = 5e-3).
pub const A: f64 = 10.0;

pub fn market(k_high: f64, k_low: f64, theta: f64) -> Duopoly {
    Duopoly::new(DuopolyParams::new(A, A - k_high, A - k_low, theta)).unwrap()
}

/// Random market whose classical equilibrium falls in `regime`, with
/// `theta` in `[0.05, 0.95]`.
pub fn draw_in_regime(rng: &mut impl Rng, regime: Regime) -> Duopoly {
    loop {
        let theta = rng.gen_range(0.05..0.95);
        let k_high = rng.gen_range(1.0..A);
        let lower = theta * k_high / 2.0;
        let upper = theta * k_high / (1.0 + theta);
        let k_low = match regime {
            Regime::Interior => rng.gen_range(upper..k_high),
            Regime::Boundary => rng.gen_range(lower..=upper),
            Regime::Corner => rng.gen_range(0.0..lower),
        };
        if k_low <= 1e-3 || k_low >= k_high {
            continue;
        }
        let d = market(k_high, k_low, theta);
        if d.regime() == regime {
            return d;
        }
    }
}

/// Any market on the reference ceiling with `theta` in `[0.05, 0.95]`.
///
/// Near `theta = 0` or `1` the leader's optimum in the entangled game beats
/// its runner-up by less than the grid resolution, so location checks stay
/// away from the endpoints.
pub fn draw_any(rng: &mut impl Rng) -> Duopoly {
    let theta = rng.gen_range(0.05..=0.95);
    let k_high = rng.gen_range(0.5..A);
    let k_low = rng.gen_range(0.01..0.999) * k_high;
    market(k_high, k_low, theta)
}

pub fn check(name: &str, ok: bool, detail: impl std::fmt::Display) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

/// Any market on the reference ceiling, `theta` anywhere in `[0, 1]`.
pub fn draw_full(rng: &mut impl Rng) -> Duopoly {
    let theta = rng.gen_range(0.0..=1.0);
    let k_high = rng.gen_range(0.5..A);
    let k_low = rng.gen_range(0.01..0.999) * k_high;
    market(k_high, k_low, theta)
}
