//! Game primitives: provider count and threshold, the per-member detection
//! technology, the capturable prize flow, and sanction profiles with
//! coalition selection.

use alloc::vec::Vec;
use core::fmt;

use crate::numeric::powi;

/// Hard cap on the provider count. Binomial coefficients stay exactly
/// representable in f64 through this size, so tail sums need no rescaling.
pub const MAX_PROVIDERS: u32 = 64;

/// Validation failure for model primitives; each variant names the offending
/// field so front ends can report it precisely.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    ProviderCount { n: u32 },
    Threshold { n: u32, k: u32 },
    DetectionUnit { q: f64 },
    DetectionSaturated { p_k: f64 },
    PreCoordinationSize { k: u32, size: u32 },
    FlowFraction { beta: f64 },
    StockValue { v: f64 },
    EmptySanctions,
    NonPositiveSanction { value: f64 },
    NonPositiveZipfScale { scale: f64 },
    ProfileLength { expected: u32, actual: usize },
    BeliefRange { alpha: f64 },
    ProbabilityRange { field: &'static str, value: f64 },
    CurrencyRange { field: &'static str, value: f64 },
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::ProviderCount { n } => {
                write!(f, "n = {n} is out of range; need 2 <= n <= {MAX_PROVIDERS}")
            }
            ParamError::Threshold { n, k } => {
                write!(f, "k = {k} is out of range; need 1 <= k <= n (n = {n})")
            }
            ParamError::DetectionUnit { q } => {
                write!(f, "q = {q} is out of range; need 0 < q < 1")
            }
            ParamError::DetectionSaturated { p_k } => {
                write!(f, "coalition detection p_k = {p_k} saturates at 1; no finite safe stock")
            }
            ParamError::PreCoordinationSize { k, size } => {
                write!(f, "pre_coordination_size = {size} exceeds k = {k}")
            }
            ParamError::FlowFraction { beta } => {
                write!(f, "beta = {beta} is out of range; need 0 < beta <= 1")
            }
            ParamError::StockValue { v } => {
                write!(f, "v = {v} is invalid; need a finite value >= 0")
            }
            ParamError::EmptySanctions => write!(f, "sanctions list is empty"),
            ParamError::NonPositiveSanction { value } => {
                write!(f, "sanction value {value} is invalid; all entries must be finite and > 0")
            }
            ParamError::NonPositiveZipfScale { scale } => {
                write!(f, "zipf scale = {scale} is invalid; need a finite value > 0")
            }
            ParamError::ProfileLength { expected, actual } => {
                write!(f, "sanctions list has {actual} entries but n = {expected}")
            }
            ParamError::BeliefRange { alpha } => {
                write!(f, "alpha = {alpha} is out of range; need 0 <= alpha <= 1")
            }
            ParamError::ProbabilityRange { field, value } => {
                write!(f, "{field} = {value} is out of range; need 0 < {field} < 1")
            }
            ParamError::CurrencyRange { field, value } => {
                write!(f, "{field} = {value} is invalid; need a finite value >= 0")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParamError {}

/// Sanction scales of the n providers, kept in order-statistics form
/// F_(1) >= F_(2) >= ... >= F_(n).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SanctionProfile {
    /// One sanction per provider; stored descending regardless of input order.
    Explicit { values: Vec<f64> },
    /// Rank-size law F_(r) = scale / r, defined for every rank.
    Zipf { scale: f64 },
}

impl SanctionProfile {
    /// Builds an explicit profile, sorting the values descending.
    pub fn explicit(values: Vec<f64>) -> Result<Self, ParamError> {
        if values.is_empty() {
            return Err(ParamError::EmptySanctions);
        }
        for &value in &values {
            if !value.is_finite() || value <= 0.0 {
                return Err(ParamError::NonPositiveSanction { value });
            }
        }
        let mut values = values;
        values.sort_unstable_by(|a, b| b.partial_cmp(a).expect("validated finite"));
        Ok(SanctionProfile::Explicit { values })
    }

    /// Builds a rank-size profile with the given scale.
    pub fn zipf(scale: f64) -> Result<Self, ParamError> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(ParamError::NonPositiveZipfScale { scale });
        }
        Ok(SanctionProfile::Zipf { scale })
    }

    /// Sanction of the provider at 1-based `rank` (rank 1 is the largest).
    pub fn value_at_rank(&self, rank: u32) -> f64 {
        debug_assert!(rank >= 1);
        match self {
            SanctionProfile::Explicit { values } => values[(rank - 1) as usize],
            SanctionProfile::Zipf { scale } => scale / rank as f64,
        }
    }

    fn ensure_supports(&self, n: u32) -> Result<(), ParamError> {
        match self {
            SanctionProfile::Explicit { values } if values.len() != n as usize => {
                Err(ParamError::ProfileLength { expected: n, actual: values.len() })
            }
            _ => Ok(()),
        }
    }
}

/// The cheapest executing coalition: the k providers with the smallest
/// sanctions, identified by their 1-based ranks in descending sanction order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Coalition {
    /// Member ranks, ascending. |member_indices| = k.
    pub member_indices: Vec<u32>,
    /// Largest sanction among members; the coalition's binding exposure.
    pub binding_f: f64,
}

/// The game's primitives. Immutable after construction; every accessor is a
/// pure function, so values are safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModelParams {
    n: u32,
    k: u32,
    q: f64,
    pre_coordination_size: u32,
    beta: f64,
    v: f64,
    sanctions: SanctionProfile,
}

impl ModelParams {
    /// Validates and builds the primitives. `pre_coordination_size` defaults
    /// to `k - 1` (everyone recruited before execution is exposed); override
    /// it with [`ModelParams::with_pre_coordination_size`].
    pub fn new(
        n: u32,
        k: u32,
        q: f64,
        beta: f64,
        v: f64,
        sanctions: SanctionProfile,
    ) -> Result<Self, ParamError> {
        if !(2..=MAX_PROVIDERS).contains(&n) {
            return Err(ParamError::ProviderCount { n });
        }
        if k < 1 || k > n {
            return Err(ParamError::Threshold { n, k });
        }
        if !q.is_finite() || q <= 0.0 || q >= 1.0 {
            return Err(ParamError::DetectionUnit { q });
        }
        if !beta.is_finite() || beta <= 0.0 || beta > 1.0 {
            return Err(ParamError::FlowFraction { beta });
        }
        if !v.is_finite() || v < 0.0 {
            return Err(ParamError::StockValue { v });
        }
        sanctions.ensure_supports(n)?;
        Ok(ModelParams { n, k, q, pre_coordination_size: k - 1, beta, v, sanctions })
    }

    /// Overrides the exposed pre-coordination group size m, with p(m) the
    /// attempt-stage detection probability. Must not exceed k.
    pub fn with_pre_coordination_size(mut self, size: u32) -> Result<Self, ParamError> {
        if size > self.k {
            return Err(ParamError::PreCoordinationSize { k: self.k, size });
        }
        self.pre_coordination_size = size;
        Ok(self)
    }

    /// Replaces the secured stock value.
    pub fn with_v(mut self, v: f64) -> Result<Self, ParamError> {
        if !v.is_finite() || v < 0.0 {
            return Err(ParamError::StockValue { v });
        }
        self.v = v;
        Ok(self)
    }

    /// Replaces the flow fraction.
    pub fn with_beta(mut self, beta: f64) -> Result<Self, ParamError> {
        if !beta.is_finite() || beta <= 0.0 || beta > 1.0 {
            return Err(ParamError::FlowFraction { beta });
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn pre_coordination_size(&self) -> u32 {
        self.pre_coordination_size
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn sanctions(&self) -> &SanctionProfile {
        &self.sanctions
    }

    /// Capturable flow prize, beta * v.
    pub fn omega(&self) -> f64 {
        self.beta * self.v
    }

    /// Detection probability of the full executing coalition, p(k).
    pub fn p_k(&self) -> f64 {
        detection_prob_raw(self.q, self.k)
    }

    /// Attempt-stage detection probability, p(pre_coordination_size).
    pub fn p_tilde(&self) -> f64 {
        detection_prob_raw(self.q, self.pre_coordination_size)
    }

    /// Binding sanction of the cheapest executing coalition.
    pub fn effective_sanction(&self) -> f64 {
        effective_sanction_raw(&self.sanctions, self.n, self.k)
    }

    /// The cheapest executing coalition itself.
    pub fn select_coalition(&self) -> Coalition {
        select_coalition_raw(&self.sanctions, self.n, self.k)
    }
}

/// Smallest threshold that requires a strict majority: floor(n/2) + 1.
pub fn majority_threshold(n: u32) -> Result<u32, ParamError> {
    if n < 2 {
        return Err(ParamError::ProviderCount { n });
    }
    Ok(n / 2 + 1)
}

pub(crate) fn detection_prob_raw(q: f64, m: u32) -> f64 {
    // Complement form: exact 0 at m = 0, no log-space needed at these sizes.
    1.0 - powi(1.0 - q, m)
}

/// Probability that a coordinating group of m members is detected within one
/// window: 1 - (1-q)^m. Strictly increasing in both m and q.
pub fn detection_prob(q: f64, m: u32) -> Result<f64, ParamError> {
    if !q.is_finite() || q <= 0.0 || q >= 1.0 {
        return Err(ParamError::DetectionUnit { q });
    }
    Ok(detection_prob_raw(q, m))
}

/// Value extractable during one exploitation window: omega = beta * v.
pub fn flow_prize(beta: f64, v: f64) -> Result<f64, ParamError> {
    if !beta.is_finite() || beta <= 0.0 || beta > 1.0 {
        return Err(ParamError::FlowFraction { beta });
    }
    if !v.is_finite() || v < 0.0 {
        return Err(ParamError::StockValue { v });
    }
    Ok(beta * v)
}

fn validate_profile_args(
    profile: &SanctionProfile,
    n: u32,
    k: u32,
) -> Result<(), ParamError> {
    if n < 2 {
        return Err(ParamError::ProviderCount { n });
    }
    if k < 1 || k > n {
        return Err(ParamError::Threshold { n, k });
    }
    profile.ensure_supports(n)
}

pub(crate) fn effective_sanction_raw(profile: &SanctionProfile, n: u32, k: u32) -> f64 {
    // The cheapest k members are the k smallest sanctions; the binding one is
    // the largest of those, the (n-k+1)-th order statistic overall.
    profile.value_at_rank(n - k + 1)
}

/// Binding sanction F_(n-k+1) of the cheapest executing coalition. For a
/// rank-size profile this is scale/(n-k+1).
pub fn effective_sanction(profile: &SanctionProfile, n: u32, k: u32) -> Result<f64, ParamError> {
    validate_profile_args(profile, n, k)?;
    Ok(effective_sanction_raw(profile, n, k))
}

pub(crate) fn select_coalition_raw(profile: &SanctionProfile, n: u32, k: u32) -> Coalition {
    let mut ranked: Vec<(f64, u32)> = (1..=n).map(|r| (profile.value_at_rank(r), r)).collect();
    // Smallest sanctions first; equal sanctions resolved toward the lowest
    // rank so selection is deterministic.
    ranked.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0).expect("validated finite").then(a.1.cmp(&b.1))
    });
    let mut member_indices: Vec<u32> = ranked[..k as usize].iter().map(|&(_, r)| r).collect();
    let binding_f = ranked[..k as usize]
        .iter()
        .map(|&(value, _)| value)
        .fold(f64::NEG_INFINITY, crate::numeric::fmax);
    member_indices.sort_unstable();
    Coalition { member_indices, binding_f }
}

/// Picks the k providers with the smallest sanctions (ties to the lowest
/// rank) and reports the coalition's binding sanction.
pub fn select_coalition(profile: &SanctionProfile, n: u32, k: u32) -> Result<Coalition, ParamError> {
    validate_profile_args(profile, n, k)?;
    Ok(select_coalition_raw(profile, n, k))
}
