//! Collusion-deterrence economics for K-of-n threshold custody systems.
//!
//! A system event (say, threshold decryption of a secured stock) fires when
//! K of n providers cooperate. A collusive coalition that fires it captures
//! a one-window flow prize but risks layered detection and sanctions. This
//! crate computes the resulting payoffs and equilibria:
//!
//! - [`model`]: primitives, detection technology, sanction profiles, and
//!   coalition selection.
//! - [`equilibrium`]: complete-information payoffs, corner-equilibrium
//!   tests, closed-form deterrence thresholds, and the safe-stock bound.
//! - [`global_game`]: dispersed-information cutoff equilibria when the
//!   prize fundamental is observed through noisy private signals.
//! - [`sim`]: a seeded Monte Carlo harness that replays the game event by
//!   event and cross-checks the analytic quantities.
//! - [`sensitivity`]: calibration reports, one-at-a-time tornado sweeps,
//!   and iso-contours of the safe-stock bound.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature only toggles `std::error::Error` impls. All floating-point
//! kernels route through `libm`, so results match across feature sets.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

mod numeric;

pub mod equilibrium;
pub mod global_game;
pub mod model;
pub mod sensitivity;
pub mod sim;

pub use equilibrium::{
    corner_test, deterrence_k_threshold, deterrence_q_threshold, equilibrium_report,
    group_rationality, joiner_payoff, q_from_coalition_detection, success_prob, v_safe,
    zipf_corner_value, CornerTest, EquilibriumReport, KStarMethod, PayoffBreakdown,
    PayoffKernel,
};
pub use global_game::{
    belief_given_cutoff, conditional_payoff_at_signal, solve_cutoff, theta_star,
    CrossingDirection, CutoffOutcome, CutoffSolution, GlobalGameSpec, NoiseFamily, PrizeMap,
    SolveError, SolverSettings, ThetaPrior,
};
pub use model::{
    detection_prob, effective_sanction, flow_prize, majority_threshold, select_coalition,
    Coalition, ModelParams, ParamError, SanctionProfile, MAX_PROVIDERS,
};
pub use sensitivity::{
    calibration_report, iso_curves, tornado, BetaPoint, CalibrationReport, IsoCurve, IsoPoint,
    SweepError, SweepMetric, SweepRanges, SweepSpec, SweepResult, TornadoRow,
};
pub use sim::{
    estimate_deviation_gain, simulate, Estimate, SimConfig, SimEnvironment, SimError, SimResult,
    Strategy,
};
