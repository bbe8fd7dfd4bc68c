//! Monte Carlo harness that replays the one-shot joining game draw by draw
//! and reports empirical rates alongside their analytic counterparts.
//!
//! Per replication: the fundamental is drawn (or fixed), each provider
//! decides to join, an attempt occurs when at least one joins, execution
//! succeeds when at least `k` join, and each joiner is detected with the
//! layer probability (coalition-scale on success, pre-coordination scale
//! otherwise). Realized payoffs follow the prize-split rule: the `k`
//! lowest-sanction providers are the designated coalition, each designated
//! joiner receives the full prize over `k` when execution succeeds and they
//! escape detection, and every detected joiner pays the binding sanction.
//! Extra joiners outside the designated pool receive no share and are
//! tallied separately, so the per-joiner payoff average is taken over
//! designated joiners, the population the analytic payoff describes.
//!
//! Randomness is counter-based: replication `r` runs on stream `r` of a
//! ChaCha8 generator seeded from the master seed, and deviation estimates
//! use streams offset by 2^32, so results are independent of evaluation
//! order and reproducible bit for bit.

use alloc::vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::equilibrium::PayoffKernel;
use crate::global_game::{normal_mass_between, normal_posterior, GlobalGameSpec, ThetaPrior};
use crate::model::ModelParams;
use crate::numeric::{fmax, inverse_normal_cdf, normal_cdf, sqrt};

/// Joining rule every provider follows.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Strategy {
    JoinNever,
    JoinAlways,
    /// Independent join probability, the randomized test mode that the
    /// analytic payoff at belief alpha describes.
    JoinProb(f64),
    /// Join iff the private signal reaches the cutoff. Requires a
    /// dispersed-information environment.
    Cutoff(f64),
}

/// Information structure the simulation runs under.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SimEnvironment {
    /// Everyone knows the parameters; the prize is the base flow prize.
    Complete { params: ModelParams },
    /// Signal-driven play. `theta` pins the fundamental while signals stay
    /// noisy; `None` draws the fundamental from the prior each replication.
    Dispersed { spec: GlobalGameSpec, theta: Option<f64> },
}

/// One simulation request.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimConfig {
    pub environment: SimEnvironment,
    pub strategy: Strategy,
    pub replications: u64,
    pub seed: u64,
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Empirical summary of a simulation run.
///
/// Rate estimates over joiners (success, detection) are ratio estimators
/// clustered by replication; their standard errors use the linearized
/// cluster variance. Degenerate strategies can make an error exactly zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimResult {
    pub replications: u64,
    /// Joiners over all provider-replications.
    pub empirical_join_rate: f64,
    /// Replications with at least one joiner.
    pub attempt_rate: f64,
    /// Fraction of joiners whose replication reached `k` joiners; the
    /// per-joiner view matches the analytic success probability.
    pub empirical_success_rate: Estimate,
    /// Detected joiners over all joiners.
    pub empirical_detection_rate: Estimate,
    /// Detection rate among joiners in successful attempts.
    pub detection_rate_successful_attempts: Estimate,
    /// Detection rate among joiners in failed attempts.
    pub detection_rate_failed_attempts: Estimate,
    /// Mean realized payoff per designated joiner.
    pub mean_realized_payoff: f64,
    pub payoff_std_error: f64,
    /// Joiners outside the designated coalition pool, summed over
    /// replications. They receive no prize share.
    pub total_extra_joiners: u64,
    /// Joining-minus-staying-out payoff for an agent whose signal sits
    /// exactly at the cutoff; filled only for cutoff strategies.
    pub deviation_gain: Option<Estimate>,
}

/// Validation failures for simulation requests.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    ReplicationsRange { replications: u64 },
    JoinProbRange { p: f64 },
    CutoffNotFinite { tau: f64 },
    /// Cutoff play needs signals; the complete-information environment has
    /// none.
    CutoffRequiresDispersed,
    /// Deviation gains are defined at a cutoff only.
    DeviationRequiresCutoff,
    ThetaNotFinite { theta: f64 },
    /// The signal sits so far outside the bounded prior that the posterior
    /// carries no representable mass.
    DegeneratePosterior { tau: f64 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::ReplicationsRange { replications } => {
                write!(f, "replications = {replications} out of range; need 1..=u32::MAX")
            }
            SimError::JoinProbRange { p } => {
                write!(f, "join probability {p} out of range; need [0, 1]")
            }
            SimError::CutoffNotFinite { tau } => write!(f, "cutoff {tau} must be finite"),
            SimError::CutoffRequiresDispersed => {
                write!(f, "cutoff strategies need a dispersed-information environment")
            }
            SimError::DeviationRequiresCutoff => {
                write!(f, "deviation gain is only defined for cutoff strategies")
            }
            SimError::ThetaNotFinite { theta } => {
                write!(f, "fixed theta {theta} must be finite")
            }
            SimError::DegeneratePosterior { tau } => {
                write!(f, "posterior at signal {tau} has no representable mass")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

/// Uniform in (0, 1), strictly exclusive so it can feed the normal inverse.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Ratio estimator with replication-level clusters: value = sum(y)/sum(n),
/// standard error from the linearized cluster variance.
#[derive(Debug, Default, Clone, Copy)]
struct RatioAcc {
    sum_y: f64,
    sum_n: f64,
    sum_yy: f64,
    sum_yn: f64,
    sum_nn: f64,
}

impl RatioAcc {
    fn push(&mut self, y: f64, n: f64) {
        self.sum_y += y;
        self.sum_n += n;
        self.sum_yy += y * y;
        self.sum_yn += y * n;
        self.sum_nn += n * n;
    }

    fn estimate(&self) -> Estimate {
        if self.sum_n <= 0.0 {
            return Estimate { value: 0.0, std_error: 0.0 };
        }
        let mu = self.sum_y / self.sum_n;
        let ss = self.sum_yy - 2.0 * mu * self.sum_yn + mu * mu * self.sum_nn;
        Estimate { value: mu, std_error: sqrt(fmax(ss, 0.0)) / self.sum_n }
    }
}

/// Welford accumulator for i.i.d. per-replication observations.
#[derive(Debug, Default, Clone, Copy)]
struct MeanAcc {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanAcc {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn estimate(&self) -> Estimate {
        let se = if self.count >= 2 {
            sqrt(self.m2 / (self.count - 1) as f64 / self.count as f64)
        } else {
            0.0
        };
        Estimate { value: self.mean, std_error: se }
    }
}

/// Environment facts shared by the main loop and the deviation estimator.
struct EnvView<'a> {
    kernel: PayoffKernel,
    n: usize,
    k: usize,
    /// Bit i set when provider rank i+1 is in the designated coalition.
    coalition_mask: u64,
    dispersed: Option<&'a GlobalGameSpec>,
    fixed_theta: Option<f64>,
    complete_omega: f64,
}

impl<'a> EnvView<'a> {
    fn new(environment: &'a SimEnvironment) -> Result<Self, SimError> {
        let (params, dispersed, fixed_theta) = match environment {
            SimEnvironment::Complete { params } => (params, None, None),
            SimEnvironment::Dispersed { spec, theta } => {
                if let Some(t) = theta {
                    if !t.is_finite() {
                        return Err(SimError::ThetaNotFinite { theta: *t });
                    }
                }
                (spec.base(), Some(spec), *theta)
            }
        };
        let coalition = params.select_coalition();
        let mut mask = 0u64;
        for &rank in &coalition.member_indices {
            mask |= 1u64 << (rank - 1);
        }
        Ok(EnvView {
            kernel: PayoffKernel::from_params(params),
            n: params.n() as usize,
            k: params.k() as usize,
            coalition_mask: mask,
            dispersed,
            fixed_theta,
            complete_omega: params.omega(),
        })
    }

    fn is_designated(&self, agent: usize) -> bool {
        self.coalition_mask & (1u64 << agent) != 0
    }

    /// Draws the fundamental for one replication; fixed values and the
    /// complete-information mode consume no randomness.
    fn draw_theta(&self, rng: &mut ChaCha8Rng) -> f64 {
        if let Some(t) = self.fixed_theta {
            return t;
        }
        match self.dispersed.map(|s| s.theta_prior()) {
            Some(ThetaPrior::Normal { mean, std }) => mean + std * inverse_normal_cdf(unit(rng)),
            Some(ThetaPrior::Uniform { lo, hi }) => lo + (hi - lo) * unit(rng),
            None => 0.0,
        }
    }

    fn omega_at(&self, theta: f64) -> f64 {
        match self.dispersed {
            Some(spec) => spec.prize(theta),
            None => self.complete_omega,
        }
    }

    /// Probability one provider joins at fundamental `theta`.
    fn join_prob(&self, strategy: Strategy, theta: f64) -> f64 {
        match strategy {
            Strategy::JoinNever => 0.0,
            Strategy::JoinAlways => 1.0,
            Strategy::JoinProb(p) => p,
            Strategy::Cutoff(tau) => {
                let spec = self.dispersed.expect("validated: cutoff needs dispersed");
                normal_cdf((theta - tau) / spec.sigma())
            }
        }
    }
}

fn validate(config: &SimConfig) -> Result<(), SimError> {
    if config.replications == 0 || config.replications > u32::MAX as u64 {
        return Err(SimError::ReplicationsRange { replications: config.replications });
    }
    match config.strategy {
        Strategy::JoinProb(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::JoinProbRange { p });
            }
        }
        Strategy::Cutoff(tau) => {
            if !tau.is_finite() {
                return Err(SimError::CutoffNotFinite { tau });
            }
            if matches!(config.environment, SimEnvironment::Complete { .. }) {
                return Err(SimError::CutoffRequiresDispersed);
            }
        }
        Strategy::JoinNever | Strategy::JoinAlways => {}
    }
    Ok(())
}

/// Runs the replications and aggregates empirical rates and payoffs.
///
/// Draw order inside a replication stream: the fundamental (when random),
/// one join uniform per provider in rank order, then one detection uniform
/// per joiner in rank order.
pub fn simulate(config: &SimConfig) -> Result<SimResult, SimError> {
    validate(config)?;
    let view = EnvView::new(&config.environment)?;
    let base = ChaCha8Rng::seed_from_u64(config.seed);

    let mut joins_total = 0u64;
    let mut attempts = 0u64;
    let mut extra_joiners = 0u64;
    let mut success_acc = RatioAcc::default();
    let mut detect_acc = RatioAcc::default();
    let mut detect_success_acc = RatioAcc::default();
    let mut detect_fail_acc = RatioAcc::default();
    let mut payoff_acc = RatioAcc::default();

    let mut joined = vec![false; view.n];
    for r in 0..config.replications {
        let mut rng = base.clone();
        rng.set_stream(r);

        let theta = view.draw_theta(&mut rng);
        let omega = view.omega_at(theta);
        let p_join = view.join_prob(config.strategy, theta);

        let mut joiners = 0u32;
        for slot in joined.iter_mut() {
            *slot = unit(&mut rng) < p_join;
            joiners += *slot as u32;
        }
        joins_total += joiners as u64;
        if joiners == 0 {
            continue;
        }
        attempts += 1;
        let success = joiners as usize >= view.k;
        let layer = if success { view.kernel.p_k() } else { view.kernel.p_tilde() };

        let mut detected = 0u32;
        let mut designated_joiners = 0u32;
        let mut payoff_sum = 0.0;
        let share = omega / view.k as f64;
        for agent in 0..view.n {
            if !joined[agent] {
                continue;
            }
            let det = unit(&mut rng) < layer;
            detected += det as u32;
            if view.is_designated(agent) {
                designated_joiners += 1;
                let prize = if success && !det { share } else { 0.0 };
                let sanction = if det { view.kernel.f_eff() } else { 0.0 };
                payoff_sum += prize - sanction;
            } else {
                extra_joiners += 1;
            }
        }

        let nj = joiners as f64;
        success_acc.push(if success { nj } else { 0.0 }, nj);
        detect_acc.push(detected as f64, nj);
        if success {
            detect_success_acc.push(detected as f64, nj);
        } else {
            detect_fail_acc.push(detected as f64, nj);
        }
        payoff_acc.push(payoff_sum, designated_joiners as f64);
    }

    let deviation_gain = match config.strategy {
        Strategy::Cutoff(_) => Some(estimate_deviation_gain(config)?),
        _ => None,
    };

    let payoff = payoff_acc.estimate();
    Ok(SimResult {
        replications: config.replications,
        empirical_join_rate: joins_total as f64 / (config.replications * view.n as u64) as f64,
        attempt_rate: attempts as f64 / config.replications as f64,
        empirical_success_rate: success_acc.estimate(),
        empirical_detection_rate: detect_acc.estimate(),
        detection_rate_successful_attempts: detect_success_acc.estimate(),
        detection_rate_failed_attempts: detect_fail_acc.estimate(),
        mean_realized_payoff: payoff.value,
        payoff_std_error: payoff.std_error,
        total_extra_joiners: extra_joiners,
        deviation_gain,
    })
}

/// Estimates the payoff difference between joining and staying out for an
/// agent whose signal equals the cutoff, with everyone else playing the
/// cutoff. Staying out pays exactly zero, so under common random numbers
/// the difference is the realized joining payoff; near an equilibrium
/// cutoff the estimate is near zero.
///
/// The fundamental is drawn from the posterior given the pinned signal
/// (point mass when the environment fixes it), and the agent occupies a
/// designated coalition slot.
pub fn estimate_deviation_gain(config: &SimConfig) -> Result<Estimate, SimError> {
    validate(config)?;
    let tau = match config.strategy {
        Strategy::Cutoff(tau) => tau,
        _ => return Err(SimError::DeviationRequiresCutoff),
    };
    let view = EnvView::new(&config.environment)?;
    let spec = view.dispersed.ok_or(SimError::CutoffRequiresDispersed)?;
    let sigma = spec.sigma();

    // Posterior for theta given a signal exactly at the cutoff.
    enum Posterior {
        Point(f64),
        Normal { mean: f64, sd: f64 },
        TruncatedNormal { p_lo: f64, span: f64 },
    }
    let posterior = match (view.fixed_theta, spec.theta_prior()) {
        (Some(t), _) => Posterior::Point(t),
        (None, ThetaPrior::Normal { mean, std }) => {
            let (m, v) = normal_posterior(mean, std, sigma, tau);
            Posterior::Normal { mean: m, sd: sqrt(v) }
        }
        (None, ThetaPrior::Uniform { lo, hi }) => {
            if lo == hi {
                Posterior::Point(lo)
            } else {
                let z_lo = (lo - tau) / sigma;
                let z_hi = (hi - tau) / sigma;
                if normal_mass_between(z_lo, z_hi) < 1e-290 {
                    return Err(SimError::DegeneratePosterior { tau });
                }
                let p_lo = normal_cdf(z_lo);
                Posterior::TruncatedNormal { p_lo, span: normal_cdf(z_hi) - p_lo }
            }
        }
    };

    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let mut acc = MeanAcc::default();
    for r in 0..config.replications {
        let mut rng = base.clone();
        // Streams disjoint from the main loop so the two estimators stay
        // independent under a shared seed.
        rng.set_stream((1u64 << 32) + r);

        let theta = match posterior {
            Posterior::Point(t) => t,
            Posterior::Normal { mean, sd } => mean + sd * inverse_normal_cdf(unit(&mut rng)),
            Posterior::TruncatedNormal { p_lo, span } => {
                tau + sigma * inverse_normal_cdf(p_lo + span * unit(&mut rng))
            }
        };
        let p_join = normal_cdf((theta - tau) / sigma);
        let mut others = 0u32;
        for _ in 0..view.n - 1 {
            others += (unit(&mut rng) < p_join) as u32;
        }
        let success = (others + 1) as usize >= view.k;
        let layer = if success { view.kernel.p_k() } else { view.kernel.p_tilde() };
        let det = unit(&mut rng) < layer;

        let share = view.omega_at(theta) / view.k as f64;
        let prize = if success && !det { share } else { 0.0 };
        let sanction = if det { view.kernel.f_eff() } else { 0.0 };
        acc.push(prize - sanction);
    }
    Ok(acc.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{joiner_payoff, q_from_coalition_detection, success_prob};
    use crate::global_game::{solve_cutoff, CutoffOutcome};
    use crate::model::SanctionProfile;

    fn flat_params(p_k: f64, v: f64) -> ModelParams {
        let q = q_from_coalition_detection(p_k, 3).unwrap();
        ModelParams::new(5, 3, q, 0.06, v, SanctionProfile::explicit(vec![135.0; 5]).unwrap())
            .unwrap()
    }

    /// Break-even stock for the flat baseline: the alpha=1 payoff is zero.
    const V_BREAK_EVEN: f64 = 1191.1764705882354;

    #[test]
    fn join_never_is_all_zero() {
        let config = SimConfig {
            environment: SimEnvironment::Complete { params: flat_params(0.15, V_BREAK_EVEN) },
            strategy: Strategy::JoinNever,
            replications: 500,
            seed: 7,
        };
        let result = simulate(&config).unwrap();
        assert_eq!(result.empirical_join_rate, 0.0);
        assert_eq!(result.attempt_rate, 0.0);
        assert_eq!(result.empirical_success_rate.value, 0.0);
        assert_eq!(result.empirical_detection_rate.value, 0.0);
        assert_eq!(result.mean_realized_payoff, 0.0);
        assert_eq!(result.payoff_std_error, 0.0);
        assert_eq!(result.total_extra_joiners, 0);
        assert!(result.deviation_gain.is_none());
    }

    #[test]
    fn join_always_at_break_even_stock_nets_zero() {
        let params = flat_params(0.15, V_BREAK_EVEN);
        let expect = joiner_payoff(&params, 1.0).unwrap().u_join;
        let config = SimConfig {
            environment: SimEnvironment::Complete { params },
            strategy: Strategy::JoinAlways,
            replications: 200_000,
            seed: 11,
        };
        let result = simulate(&config).unwrap();
        assert_eq!(result.empirical_join_rate, 1.0);
        assert_eq!(result.attempt_rate, 1.0);
        assert_eq!(result.empirical_success_rate.value, 1.0);
        assert!(result.payoff_std_error > 0.0);
        assert!(
            (result.mean_realized_payoff - expect).abs() <= 3.0 * result.payoff_std_error,
            "payoff {} vs analytic {expect}",
            result.mean_realized_payoff
        );
        // Everyone joins in a successful attempt: detection concentrates at
        // the coalition-scale rate.
        let det = result.detection_rate_successful_attempts;
        assert!((det.value - 0.15).abs() <= 3.0 * det.std_error);
        assert_eq!(result.total_extra_joiners, 2 * result.replications);
    }

    #[test]
    fn join_always_with_no_prize_loses_the_expected_sanction() {
        let params = flat_params(0.15, 0.0);
        let config = SimConfig {
            environment: SimEnvironment::Complete { params },
            strategy: Strategy::JoinAlways,
            replications: 200_000,
            seed: 13,
        };
        let result = simulate(&config).unwrap();
        let expect = -0.15 * 135.0;
        assert!(
            (result.mean_realized_payoff - expect).abs() <= 3.0 * result.payoff_std_error,
            "payoff {} vs {expect}",
            result.mean_realized_payoff
        );
    }

    #[test]
    fn identical_seeds_reproduce_bit_identical_results() {
        let params = flat_params(0.2, 900.0);
        let config = SimConfig {
            environment: SimEnvironment::Complete { params },
            strategy: Strategy::JoinProb(0.6),
            replications: 20_000,
            seed: 99,
        };
        let a = simulate(&config).unwrap();
        let b = simulate(&config).unwrap();
        assert_eq!(a, b);
        let shifted = SimConfig { seed: 100, ..config };
        let c = simulate(&shifted).unwrap();
        assert_ne!(a.mean_realized_payoff, c.mean_realized_payoff);
    }

    #[test]
    fn randomized_strategy_matches_analytic_rates_and_payoff() {
        // Heterogeneous sanctions exercise the designated-pool split.
        let profile = SanctionProfile::explicit(vec![200.0, 170.0, 150.0, 120.0, 100.0, 90.0, 80.0])
            .unwrap();
        let params = ModelParams::new(7, 3, 0.2, 0.06, 800.0, profile).unwrap();
        let alpha = 0.55;
        let expect_payoff = joiner_payoff(&params, alpha).unwrap().u_join;
        let expect_success = success_prob(7, 3, alpha).unwrap();
        let config = SimConfig {
            environment: SimEnvironment::Complete { params: params.clone() },
            strategy: Strategy::JoinProb(alpha),
            replications: 300_000,
            seed: 17,
        };
        let result = simulate(&config).unwrap();

        let s = result.empirical_success_rate;
        assert!(s.std_error > 0.0);
        assert!((s.value - expect_success).abs() <= 3.0 * s.std_error);

        assert!(
            (result.mean_realized_payoff - expect_payoff).abs() <= 3.0 * result.payoff_std_error
        );

        let ds = result.detection_rate_successful_attempts;
        assert!((ds.value - params.p_k()).abs() <= 3.0 * ds.std_error);
        let df = result.detection_rate_failed_attempts;
        assert!((df.value - params.p_tilde()).abs() <= 3.0 * df.std_error);

        // Marginal detection blends the layers with the per-joiner success
        // weight.
        let blended = params.p_tilde() + expect_success * (params.p_k() - params.p_tilde());
        let d = result.empirical_detection_rate;
        assert!((d.value - blended).abs() <= 3.0 * d.std_error);
    }

    fn dispersed_spec(pre_coordination: u32) -> GlobalGameSpec {
        let q = q_from_coalition_detection(0.15, 3).unwrap();
        let params = ModelParams::new(
            5,
            3,
            q,
            0.06,
            V_BREAK_EVEN,
            SanctionProfile::explicit(vec![135.0; 5]).unwrap(),
        )
        .unwrap()
        .with_pre_coordination_size(pre_coordination)
        .unwrap();
        GlobalGameSpec::new(
            params,
            ThetaPrior::Normal { mean: 71.470588235294116, std: 20.0 },
            5.0,
        )
        .unwrap()
    }

    #[test]
    fn fixed_theta_cutoff_matches_conditional_join_law() {
        let spec = dispersed_spec(0);
        let theta = 80.0;
        let tau = 75.0;
        let alpha = normal_cdf((theta - tau) / 5.0);
        let config = SimConfig {
            environment: SimEnvironment::Dispersed { spec, theta: Some(theta) },
            strategy: Strategy::Cutoff(tau),
            replications: 200_000,
            seed: 23,
        };
        let result = simulate(&config).unwrap();
        let se_join =
            sqrt(alpha * (1.0 - alpha) / (result.replications as f64 * 5.0));
        assert!((result.empirical_join_rate - alpha).abs() <= 4.0 * se_join);

        let s = result.empirical_success_rate;
        let expect = success_prob(5, 3, alpha).unwrap();
        assert!((s.value - expect).abs() <= 3.0 * s.std_error);
        assert!(result.deviation_gain.is_some());
    }

    #[test]
    fn deviation_gain_vanishes_at_the_solved_cutoff() {
        let spec = dispersed_spec(0);
        let solution = match solve_cutoff(&spec).unwrap() {
            CutoffOutcome::Solved(s) => s,
            other => panic!("expected cutoff, got {other:?}"),
        };
        let config = SimConfig {
            environment: SimEnvironment::Dispersed { spec, theta: None },
            strategy: Strategy::Cutoff(solution.tau),
            replications: 200_000,
            seed: 29,
        };
        let gain = estimate_deviation_gain(&config).unwrap();
        assert!(gain.std_error > 0.0);
        assert!(gain.value.abs() <= 3.0 * gain.std_error, "gain {} se {}", gain.value, gain.std_error);
    }

    #[test]
    fn deviation_gain_signs_flip_across_the_break_even_anchor() {
        let spec = dispersed_spec(0);
        let anchor = 71.470588235294116;
        let sigma = 5.0;
        let strict = SimConfig {
            environment: SimEnvironment::Dispersed { spec: spec.clone(), theta: None },
            strategy: Strategy::Cutoff(anchor + 10.0 * sigma),
            replications: 100_000,
            seed: 31,
        };
        let gain = estimate_deviation_gain(&strict).unwrap();
        assert!(gain.value > 3.0 * gain.std_error, "strict cutoff gain {}", gain.value);

        let lax = SimConfig {
            environment: SimEnvironment::Dispersed { spec, theta: None },
            strategy: Strategy::Cutoff(anchor - 10.0 * sigma),
            replications: 100_000,
            seed: 37,
        };
        let gain = estimate_deviation_gain(&lax).unwrap();
        assert!(gain.value < -3.0 * gain.std_error, "lax cutoff gain {}", gain.value);
    }

    #[test]
    fn validation_rejects_malformed_requests() {
        let params = flat_params(0.15, V_BREAK_EVEN);
        let complete = SimEnvironment::Complete { params };
        let base = SimConfig {
            environment: complete.clone(),
            strategy: Strategy::JoinAlways,
            replications: 10,
            seed: 1,
        };
        assert!(matches!(
            simulate(&SimConfig { replications: 0, ..base.clone() }),
            Err(SimError::ReplicationsRange { .. })
        ));
        assert!(matches!(
            simulate(&SimConfig { replications: (u32::MAX as u64) + 1, ..base.clone() }),
            Err(SimError::ReplicationsRange { .. })
        ));
        assert!(matches!(
            simulate(&SimConfig { strategy: Strategy::JoinProb(1.2), ..base.clone() }),
            Err(SimError::JoinProbRange { .. })
        ));
        assert!(matches!(
            simulate(&SimConfig { strategy: Strategy::Cutoff(50.0), ..base.clone() }),
            Err(SimError::CutoffRequiresDispersed)
        ));
        assert!(matches!(
            simulate(&SimConfig {
                environment: SimEnvironment::Dispersed {
                    spec: dispersed_spec(2),
                    theta: Some(f64::NAN)
                },
                strategy: Strategy::Cutoff(50.0),
                ..base.clone()
            }),
            Err(SimError::ThetaNotFinite { .. })
        ));
        assert!(matches!(
            estimate_deviation_gain(&base),
            Err(SimError::DeviationRequiresCutoff)
        ));

        // Single replication: estimates exist with zero standard error.
        let one = simulate(&SimConfig { replications: 1, ..base }).unwrap();
        assert_eq!(one.payoff_std_error, 0.0);
    }

    #[test]
    fn extra_joiners_receive_no_share_and_are_tallied() {
        // Two designated members (the two smallest sanctions), three extras.
        let profile = SanctionProfile::explicit(vec![10.0, 9.0, 3.0, 2.0, 1.0]).unwrap();
        let params = ModelParams::new(5, 2, 0.3, 0.06, 100.0, profile).unwrap();
        let expect = joiner_payoff(&params, 1.0).unwrap().u_join;
        let config = SimConfig {
            environment: SimEnvironment::Complete { params },
            strategy: Strategy::JoinAlways,
            replications: 150_000,
            seed: 41,
        };
        let result = simulate(&config).unwrap();
        assert_eq!(result.total_extra_joiners, 3 * result.replications);
        assert!(
            (result.mean_realized_payoff - expect).abs() <= 3.0 * result.payoff_std_error,
            "payoff {} vs {expect}",
            result.mean_realized_payoff
        );
    }
}
