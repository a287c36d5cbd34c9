//! Subgame perfect equilibria of the Stackelberg duopoly in which the leader
//! does not know the follower's marginal cost, played classically and with
//! Li-Du-Massar entangled quantities.
//!
//! * [`classical`]: closed-form equilibrium over all three regimes, and the
//!   restricted first-order solution with its validity flag.
//! * [`quantum`]: correlated quantities for finite entanglement, the
//!   first-order quantum solution and the entanglement bound beyond which it
//!   stops being well defined, and the quantum Cournot reference output.
//! * [`entangled`]: closed-form equilibrium of the maximally correlated game.
//! * [`oracle`]: grid backward induction and epsilon-equilibrium certificates
//!   for any of the above payoff families.

pub mod classical;
pub mod entangled;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quantum;

pub use classical::{
    follower_best_reply, leader_best_reply, leader_induced_payoff, lo_kiang_classical,
    mover_advantage_sign, solve_spe, ClassicalSolution, MoverAdvantage, RestrictedSolution,
};
pub use entangled::{
    entangled_payoff, follower_best_reply_entangled, second_mover_advantage, solve_spe_entangled,
    EntangledSolution,
};
pub use error::{Error, Result};
pub use model::{
    classify_regime, derive_margins, Duopoly, DuopolyParams, EquilibriumProfile, FollowerType,
    Margins, PayoffReport, Player, Regime,
};
pub use oracle::{
    certify_epsilon_spe, explore_gamma, grid_best_reply, solve_backward_induction, Certification,
    Game, GridSpec, OracleResult, PayoffFamily,
};
pub use quantum::{
    correlate, cournot_reference, gamma_max, lo_kiang_quantum, quantum_payoff, CorrelationMode,
    EntanglementConfig, Gamma, GammaBound,
};
