//! Complete-information analysis: coalition success odds, the joiner's
//! payoff and its attempt-cost/success-bonus decomposition, corner
//! equilibria, closed-form deterrence thresholds under rank-size sanctions,
//! and the safe-stock design bound.

use core::fmt;

use crate::model::{
    majority_threshold, ModelParams, ParamError, SanctionProfile,
};
use crate::numeric::{binomial_tail, ceil, ln, pow, powi};

/// One evaluation of the joiner's problem at belief `alpha`.
///
/// Two algebraically identical decompositions are reported: prize minus
/// sanction (`expected_prize - expected_sanction`) and attempt cost plus
/// success bonus (`-attempt_cost + pi * success_bonus`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PayoffBreakdown {
    /// Belief that each other provider joins.
    pub alpha: f64,
    /// Success probability: at least k-1 of the other n-1 join.
    pub pi: f64,
    /// Unconditional detection probability p_tilde + pi * (p_k - p_tilde).
    pub p_bar: f64,
    /// pi * (1 - p_k) * omega / k.
    pub expected_prize: f64,
    /// p_bar * f_eff.
    pub expected_sanction: f64,
    /// expected_prize - expected_sanction.
    pub u_join: f64,
    /// p_tilde * f_eff, paid in expectation whenever an attempt is made.
    pub attempt_cost: f64,
    /// (1 - p_k) * omega / k - (p_k - p_tilde) * f_eff, earned on success.
    pub success_bonus: f64,
}

/// Precomputed scalar pieces of the joiner's payoff, for hot loops that
/// re-evaluate it across beliefs and prize levels.
#[derive(Debug, Clone, Copy)]
pub struct PayoffKernel {
    n: u32,
    k: u32,
    p_k: f64,
    p_tilde: f64,
    f_eff: f64,
}

impl PayoffKernel {
    pub fn from_params(params: &ModelParams) -> Self {
        PayoffKernel {
            n: params.n(),
            k: params.k(),
            p_k: params.p_k(),
            p_tilde: params.p_tilde(),
            f_eff: params.effective_sanction(),
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p_k(&self) -> f64 {
        self.p_k
    }

    pub fn p_tilde(&self) -> f64 {
        self.p_tilde
    }

    pub fn f_eff(&self) -> f64 {
        self.f_eff
    }

    /// Success probability at belief `alpha` (no validation).
    pub fn success_prob(&self, alpha: f64) -> f64 {
        binomial_tail(self.n - 1, self.k - 1, alpha)
    }

    /// Success bonus for prize level `omega`.
    pub fn success_bonus(&self, omega: f64) -> f64 {
        (1.0 - self.p_k) * omega / self.k as f64 - (self.p_k - self.p_tilde) * self.f_eff
    }

    /// Joiner payoff at a known success probability `pi`.
    pub fn u_join_at_pi(&self, pi: f64, omega: f64) -> f64 {
        let p_bar = self.p_tilde + pi * (self.p_k - self.p_tilde);
        pi * (1.0 - self.p_k) * omega / self.k as f64 - p_bar * self.f_eff
    }

    /// Joiner payoff at belief `alpha`.
    pub fn u_join(&self, alpha: f64, omega: f64) -> f64 {
        self.u_join_at_pi(self.success_prob(alpha), omega)
    }

    /// Full breakdown at belief `alpha`.
    pub fn breakdown(&self, alpha: f64, omega: f64) -> PayoffBreakdown {
        let pi = self.success_prob(alpha);
        let p_bar = self.p_tilde + pi * (self.p_k - self.p_tilde);
        let expected_prize = pi * (1.0 - self.p_k) * omega / self.k as f64;
        let expected_sanction = p_bar * self.f_eff;
        PayoffBreakdown {
            alpha,
            pi,
            p_bar,
            expected_prize,
            expected_sanction,
            u_join: expected_prize - expected_sanction,
            attempt_cost: self.p_tilde * self.f_eff,
            success_bonus: self.success_bonus(omega),
        }
    }
}

/// Probability that at least k-1 of the other n-1 providers join when each
/// joins independently with probability `alpha`. Exact at alpha in {0, 1}.
pub fn success_prob(n: u32, k: u32, alpha: f64) -> Result<f64, ParamError> {
    if n < 2 {
        return Err(ParamError::ProviderCount { n });
    }
    if k < 1 || k > n {
        return Err(ParamError::Threshold { n, k });
    }
    if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
        return Err(ParamError::BeliefRange { alpha });
    }
    Ok(binomial_tail(n - 1, k - 1, alpha))
}

/// Evaluates the joiner's expected payoff at belief `alpha`.
pub fn joiner_payoff(params: &ModelParams, alpha: f64) -> Result<PayoffBreakdown, ParamError> {
    if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
        return Err(ParamError::BeliefRange { alpha });
    }
    Ok(PayoffKernel::from_params(params).breakdown(alpha, params.omega()))
}

/// Group-rationality odds condition: omega / (k * f_eff) > q / (1 - q).
/// When it holds (with the default pre-coordination size k-1), the joiner's
/// payoff is strictly increasing in the belief alpha.
pub fn group_rationality(params: &ModelParams) -> Result<bool, ParamError> {
    let f_eff = params.effective_sanction();
    let q = params.q();
    Ok(params.omega() / (params.k() as f64 * f_eff) > q / (1.0 - q))
}

/// Corner-profile verdicts for the symmetric pure strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CornerTest {
    /// Joining against no other joiners never pays, so this holds whenever
    /// the attempt cost is nonnegative (always, for k >= 2).
    pub no_join_is_equilibrium: bool,
    /// Weak inequality: u_join(1) >= 0 keeps all-join an equilibrium.
    pub all_join_is_equilibrium: bool,
    pub u_join_at_one: f64,
}

/// Tests both corner profiles.
pub fn corner_test(params: &ModelParams) -> Result<CornerTest, ParamError> {
    let kernel = PayoffKernel::from_params(params);
    let omega = params.omega();
    let u_zero = kernel.u_join(0.0, omega);
    let u_one = kernel.u_join(1.0, omega);
    Ok(CornerTest {
        no_join_is_equilibrium: u_zero <= 0.0,
        all_join_is_equilibrium: u_one >= 0.0,
        u_join_at_one: u_one,
    })
}

/// All-join payoff under a rank-size profile in the odd-n majority regime
/// (f_eff = scale / k): ((omega + scale) * (1-q)^k - scale) / k.
pub fn zipf_corner_value(omega: f64, scale: f64, q: f64, k: u32) -> Result<f64, ParamError> {
    if k < 1 {
        return Err(ParamError::Threshold { n: 0, k });
    }
    if !scale.is_finite() || scale <= 0.0 {
        return Err(ParamError::NonPositiveZipfScale { scale });
    }
    if !q.is_finite() || q <= 0.0 || q >= 1.0 {
        return Err(ParamError::DetectionUnit { q });
    }
    if !omega.is_finite() || omega < 0.0 {
        return Err(ParamError::CurrencyRange { field: "omega", value: omega });
    }
    Ok(((omega + scale) * powi(1.0 - q, k) - scale) / k as f64)
}

/// Smallest real k at which the odd-majority rank-size corner value reaches
/// zero: log(scale / (omega + scale)) / log(1 - q). All-join is deterred for
/// every integer threshold at or above this value.
pub fn deterrence_k_threshold(omega: f64, scale: f64, q: f64) -> Result<f64, ParamError> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(ParamError::CurrencyRange { field: "omega", value: omega });
    }
    if !scale.is_finite() || scale <= 0.0 {
        return Err(ParamError::NonPositiveZipfScale { scale });
    }
    if !q.is_finite() || q <= 0.0 || q >= 1.0 {
        return Err(ParamError::DetectionUnit { q });
    }
    Ok(ln(scale / (omega + scale)) / ln(1.0 - q))
}

/// Smallest q at which the odd-majority rank-size corner value reaches zero
/// for fixed k: 1 - (scale / (omega + scale))^(1/k).
pub fn deterrence_q_threshold(omega: f64, scale: f64, k: u32) -> Result<f64, ParamError> {
    if k < 1 {
        return Err(ParamError::Threshold { n: 0, k });
    }
    if !omega.is_finite() || omega < 0.0 {
        return Err(ParamError::CurrencyRange { field: "omega", value: omega });
    }
    if !scale.is_finite() || scale <= 0.0 {
        return Err(ParamError::NonPositiveZipfScale { scale });
    }
    Ok(1.0 - pow(scale / (omega + scale), 1.0 / k as f64))
}

/// Largest securable stock keeping all-join unprofitable even with assured
/// success: (k / ((1 - p_k) * beta)) * p_k * f_eff. At v = v_safe the
/// all-join payoff is exactly zero.
pub fn v_safe(params: &ModelParams) -> Result<f64, ParamError> {
    let p_k = params.p_k();
    if p_k >= 1.0 {
        return Err(ParamError::DetectionSaturated { p_k });
    }
    let f_eff = params.effective_sanction();
    Ok(params.k() as f64 * p_k * f_eff / ((1.0 - p_k) * params.beta()))
}

/// Per-member detection rate that yields coalition detection `p_k` at size
/// k: 1 - (1 - p_k)^(1/k).
pub fn q_from_coalition_detection(p_k: f64, k: u32) -> Result<f64, ParamError> {
    if k < 1 {
        return Err(ParamError::Threshold { n: 0, k });
    }
    if !p_k.is_finite() || p_k <= 0.0 || p_k >= 1.0 {
        return Err(ParamError::ProbabilityRange { field: "p_k", value: p_k });
    }
    Ok(1.0 - pow(1.0 - p_k, 1.0 / k as f64))
}

/// How the smallest deterring threshold was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KStarMethod {
    /// Odd majority family n = 2k-1 under a rank-size profile: closed form
    /// verified by integer evaluation.
    ClosedFormOddMajority,
    /// Even majority family n = 2k-2 under a rank-size profile: direct
    /// integer search (no closed form exists in this regime).
    EvenMajoritySearch,
    /// The profile or threshold is outside both majority families.
    NotApplicable,
}

/// Summary verdicts of the complete-information game.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EquilibriumReport {
    pub no_join_is_equilibrium: bool,
    pub all_join_is_equilibrium: bool,
    pub u_join_at_one: f64,
    pub group_rationality_holds: bool,
    /// Smallest majority threshold deterring all-join within the matching
    /// rank-size majority family, scanning n along with k.
    pub k_star: Option<u32>,
    pub k_star_method: KStarMethod,
    /// Real-valued threshold before integer rounding (odd family only).
    pub k_threshold_real: Option<f64>,
    /// Smallest q deterring all-join at the given (n, k) and profile;
    /// exact inversion of the all-join payoff.
    pub q_star: Option<f64>,
    pub v_safe: f64,
}

fn odd_family_deterred(omega: f64, scale: f64, a: f64, k: u32) -> bool {
    (omega + scale) * powi(a, k) - scale <= 0.0
}

fn even_family_deterred(omega: f64, scale: f64, a: f64, k: u32) -> bool {
    let ak = powi(a, k);
    ak * omega / k as f64 - (1.0 - ak) * scale / (k - 1) as f64 <= 0.0
}

const K_SEARCH_CAP: u32 = 10_000;

fn k_star_for(params: &ModelParams) -> (Option<u32>, KStarMethod, Option<f64>) {
    let scale = match params.sanctions() {
        SanctionProfile::Zipf { scale } => *scale,
        SanctionProfile::Explicit { .. } => return (None, KStarMethod::NotApplicable, None),
    };
    let majority = majority_threshold(params.n()).expect("params validated");
    if params.k() != majority {
        return (None, KStarMethod::NotApplicable, None);
    }
    let omega = params.omega();
    let a = 1.0 - params.q();
    if params.n() % 2 == 1 {
        if omega <= 0.0 {
            // Nothing to capture: the smallest admissible threshold deters.
            return (Some(1), KStarMethod::ClosedFormOddMajority, Some(0.0));
        }
        let real = ln(scale / (omega + scale)) / ln(a);
        let mut guess = ceil(real - 1e-9) as u32;
        guess = guess.max(1);
        while guess > 1 && odd_family_deterred(omega, scale, a, guess - 1) {
            guess -= 1;
        }
        while guess < K_SEARCH_CAP && !odd_family_deterred(omega, scale, a, guess) {
            guess += 1;
        }
        if odd_family_deterred(omega, scale, a, guess) {
            (Some(guess), KStarMethod::ClosedFormOddMajority, Some(real))
        } else {
            (None, KStarMethod::ClosedFormOddMajority, Some(real))
        }
    } else {
        for k in 2..=K_SEARCH_CAP {
            if even_family_deterred(omega, scale, a, k) {
                return (Some(k), KStarMethod::EvenMajoritySearch, None);
            }
        }
        (None, KStarMethod::EvenMajoritySearch, None)
    }
}

/// Builds the full equilibrium summary: corner verdicts, group rationality,
/// deterrence thresholds, and the safe-stock bound.
pub fn equilibrium_report(params: &ModelParams) -> Result<EquilibriumReport, ParamError> {
    let corner = corner_test(params)?;
    let gr = group_rationality(params)?;
    let v_safe_value = v_safe(params)?;
    let omega = params.omega();
    let k = params.k();
    let f_eff = params.effective_sanction();
    // Invert the all-join payoff in q: deterred iff (1-q)^k <= k*f_eff / (omega + k*f_eff).
    let target = k as f64 * f_eff / (omega + k as f64 * f_eff);
    let q_star = Some(1.0 - pow(target, 1.0 / k as f64));
    let (k_star, k_star_method, k_threshold_real) = k_star_for(params);
    Ok(EquilibriumReport {
        no_join_is_equilibrium: corner.no_join_is_equilibrium,
        all_join_is_equilibrium: corner.all_join_is_equilibrium,
        u_join_at_one: corner.u_join_at_one,
        group_rationality_holds: gr,
        k_star,
        k_star_method,
        k_threshold_real,
        q_star,
        v_safe: v_safe_value,
    })
}

impl fmt::Display for KStarMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KStarMethod::ClosedFormOddMajority => write!(f, "closed_form_odd_majority"),
            KStarMethod::EvenMajoritySearch => write!(f, "even_majority_search"),
            KStarMethod::NotApplicable => write!(f, "not_applicable"),
        }
    }
}
