//! Calibration study around a baseline: one-at-a-time tornado bands,
//! iso-value curves of the safe stock bound over the (beta, p_k) plane, and
//! a summary report.
//!
//! Sweeps are stated on the quantities a policy designer reads directly:
//! the binding sanction, the coalition-scale detection probability (with
//! the per-member rate back-solved each time), the flow fraction, and the
//! threshold. Sweeping the threshold rebuilds a bare-majority family
//! (n = 2k - 1) with the profile rescaled so the binding sanction and the
//! coalition detection probability stay at their baseline values; that
//! isolates the pure threshold effect and makes the safe-stock bound
//! exactly linear in k.
//!
//! Currency is carried in billions throughout this module so grid math
//! stays far from the magnitude extremes of f64.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::equilibrium::{
    corner_test, equilibrium_report, joiner_payoff, q_from_coalition_detection, v_safe,
    CornerTest, EquilibriumReport,
};
use crate::model::{ModelParams, ParamError, SanctionProfile};
use crate::numeric::abs;

/// Quantity a sweep reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SweepMetric {
    /// Safe stock bound: the largest custodied value the corner test
    /// tolerates.
    VSafe,
    /// Joiner payoff when everyone joins.
    UJoinAtOne,
    /// Detection rate that would make the all-join corner break even.
    QStar,
    /// Smallest deterring threshold within the profile's majority family;
    /// defined for scale-law profiles only.
    KStar,
}

/// Endpoint pairs for the four swept parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepRanges {
    /// Binding sanction, in billions.
    pub f_eff: (f64, f64),
    /// Coalition-scale detection probability.
    pub p_k: (f64, f64),
    /// Flow fraction.
    pub beta: (f64, f64),
    /// Threshold; swept along the bare-majority family.
    pub k: (u32, u32),
}

impl Default for SweepRanges {
    fn default() -> Self {
        SweepRanges {
            f_eff: (100.0, 135.0),
            p_k: (0.05, 0.20),
            beta: (0.03, 0.10),
            k: (3, 7),
        }
    }
}

/// Sweep request: a baseline, endpoint ranges, and the reported metric.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepSpec {
    pub baseline: ModelParams,
    pub ranges: SweepRanges,
    /// Grid points per axis for iso-curve extraction.
    pub grid_resolution: usize,
    pub metric: SweepMetric,
}

impl SweepSpec {
    /// Default study: safe-stock metric, standard ranges, 101-point grid.
    pub fn new(baseline: ModelParams) -> Self {
        SweepSpec {
            baseline,
            ranges: SweepRanges::default(),
            grid_resolution: 101,
            metric: SweepMetric::VSafe,
        }
    }
}

/// One tornado bar: the metric at both endpoints of a single parameter.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TornadoRow {
    pub parameter: String,
    pub low_value: f64,
    pub low_metric: f64,
    pub high_value: f64,
    pub high_metric: f64,
    pub baseline_metric: f64,
}

/// Point on an iso-value contour in the (beta, p_k) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IsoPoint {
    pub beta: f64,
    pub p_k: f64,
}

/// Contour polyline at one metric level. Empty when the level never enters
/// the grid's metric range.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IsoCurve {
    pub level: f64,
    pub points: Vec<IsoPoint>,
}

/// Safe stock at one flow fraction, for the calibration table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BetaPoint {
    pub beta: f64,
    pub v_safe: f64,
}

/// Output of a sweep, echoing the request it answers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepResult {
    pub tornado_rows: Vec<TornadoRow>,
    pub iso_curves: Vec<IsoCurve>,
    pub spec_echo: SweepSpec,
}

/// Baseline summary: headline quantities, the safe-stock table across flow
/// fractions, corner diagnostics at the baseline stock and at the safe
/// stock, and the threshold report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CalibrationReport {
    pub n: u32,
    pub k: u32,
    pub q: f64,
    pub p_k: f64,
    pub p_tilde: f64,
    /// Binding sanction, in billions.
    pub f_eff: f64,
    /// Flow prize, in billions.
    pub omega: f64,
    /// Safe stock at the baseline flow fraction, in billions.
    pub v_safe: f64,
    pub v_safe_by_beta: Vec<BetaPoint>,
    pub corner_at_baseline: CornerTest,
    /// Corner test with the stock moved to the safe bound: the all-join
    /// payoff sits at zero by construction.
    pub corner_at_safe_stock: CornerTest,
    pub equilibrium: EquilibriumReport,
}

/// Sweep request failures.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepError {
    Param(ParamError),
    /// A range does not bracket the baseline value.
    RangeOrder { parameter: &'static str },
    GridResolution { resolution: usize },
    LevelRange { level: f64 },
    /// The requested metric is undefined for the baseline profile.
    MetricUndefined { metric: SweepMetric },
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepError::Param(e) => write!(f, "{e}"),
            SweepError::RangeOrder { parameter } => {
                write!(f, "range for {parameter} must satisfy low <= baseline <= high")
            }
            SweepError::GridResolution { resolution } => {
                write!(f, "grid resolution {resolution} too small; need at least 2 per axis")
            }
            SweepError::LevelRange { level } => {
                write!(f, "iso level {level} out of range; need a positive finite level")
            }
            SweepError::MetricUndefined { metric } => {
                write!(f, "metric {metric:?} is undefined for the baseline profile")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SweepError {}

impl From<ParamError> for SweepError {
    fn from(e: ParamError) -> Self {
        SweepError::Param(e)
    }
}

/// Rebuilds the baseline with the binding sanction moved to `f_eff`:
/// a flat profile at that value, or a rescaled scale-law profile.
fn with_effective_sanction(base: &ModelParams, f_eff: f64) -> Result<ModelParams, ParamError> {
    let profile = match base.sanctions() {
        SanctionProfile::Explicit { .. } => {
            SanctionProfile::explicit(vec![f_eff; base.n() as usize])?
        }
        SanctionProfile::Zipf { .. } => {
            SanctionProfile::zipf(f_eff * (base.n() - base.k() + 1) as f64)?
        }
    };
    ModelParams::new(base.n(), base.k(), base.q(), base.beta(), base.v(), profile)?
        .with_pre_coordination_size(base.pre_coordination_size())
}

/// Rebuilds the baseline with the coalition detection probability moved to
/// `p_k`, back-solving the per-member rate.
fn with_coalition_detection(base: &ModelParams, p_k: f64) -> Result<ModelParams, ParamError> {
    let q = q_from_coalition_detection(p_k, base.k())?;
    ModelParams::new(base.n(), base.k(), q, base.beta(), base.v(), base.sanctions().clone())?
        .with_pre_coordination_size(base.pre_coordination_size())
}

/// Rebuilds a bare-majority family member at threshold `k`, holding the
/// binding sanction and the coalition detection probability at baseline.
fn with_majority_threshold(base: &ModelParams, k: u32) -> Result<ModelParams, ParamError> {
    let n = 2 * k - 1;
    let f_eff = base.effective_sanction();
    let profile = match base.sanctions() {
        SanctionProfile::Explicit { .. } => SanctionProfile::explicit(vec![f_eff; n as usize])?,
        // n - k + 1 = k for a bare majority, so the binding rank is k.
        SanctionProfile::Zipf { .. } => SanctionProfile::zipf(f_eff * k as f64)?,
    };
    let q = q_from_coalition_detection(base.p_k(), k)?;
    ModelParams::new(n, k, q, base.beta(), base.v(), profile)
}

fn metric_value(params: &ModelParams, metric: SweepMetric) -> Result<f64, SweepError> {
    match metric {
        SweepMetric::VSafe => Ok(v_safe(params)?),
        SweepMetric::UJoinAtOne => Ok(joiner_payoff(params, 1.0)?.u_join),
        SweepMetric::QStar => {
            let report = equilibrium_report(params)?;
            report.q_star.ok_or(SweepError::MetricUndefined { metric })
        }
        SweepMetric::KStar => {
            let report = equilibrium_report(params)?;
            report
                .k_star
                .map(|k| k as f64)
                .ok_or(SweepError::MetricUndefined { metric })
        }
    }
}

fn check_ranges(spec: &SweepSpec) -> Result<(), SweepError> {
    let base = &spec.baseline;
    let r = &spec.ranges;
    let f = base.effective_sanction();
    if !(r.f_eff.0 <= f && f <= r.f_eff.1) {
        return Err(SweepError::RangeOrder { parameter: "f_eff" });
    }
    let p = base.p_k();
    if !(r.p_k.0 <= p && p <= r.p_k.1) {
        return Err(SweepError::RangeOrder { parameter: "p_k" });
    }
    let b = base.beta();
    if !(r.beta.0 <= b && b <= r.beta.1) {
        return Err(SweepError::RangeOrder { parameter: "beta" });
    }
    if !(r.k.0 <= base.k() && base.k() <= r.k.1) || r.k.0 == 0 {
        return Err(SweepError::RangeOrder { parameter: "k" });
    }
    Ok(())
}

/// One-at-a-time endpoint study: each row evaluates the metric with one
/// parameter at its range ends and everything else at baseline. Rows come
/// back sorted by bar width, widest first.
pub fn tornado(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    check_ranges(spec)?;
    let base = &spec.baseline;
    let metric = spec.metric;
    let baseline_metric = metric_value(base, metric)?;

    let mut rows = Vec::with_capacity(4);
    {
        let (lo, hi) = spec.ranges.f_eff;
        rows.push(TornadoRow {
            parameter: String::from("f_eff"),
            low_value: lo,
            low_metric: metric_value(&with_effective_sanction(base, lo)?, metric)?,
            high_value: hi,
            high_metric: metric_value(&with_effective_sanction(base, hi)?, metric)?,
            baseline_metric,
        });
    }
    {
        let (lo, hi) = spec.ranges.p_k;
        rows.push(TornadoRow {
            parameter: String::from("p_k"),
            low_value: lo,
            low_metric: metric_value(&with_coalition_detection(base, lo)?, metric)?,
            high_value: hi,
            high_metric: metric_value(&with_coalition_detection(base, hi)?, metric)?,
            baseline_metric,
        });
    }
    {
        let (lo, hi) = spec.ranges.beta;
        rows.push(TornadoRow {
            parameter: String::from("beta"),
            low_value: lo,
            low_metric: metric_value(&base.clone().with_beta(lo)?, metric)?,
            high_value: hi,
            high_metric: metric_value(&base.clone().with_beta(hi)?, metric)?,
            baseline_metric,
        });
    }
    {
        let (lo, hi) = spec.ranges.k;
        rows.push(TornadoRow {
            parameter: String::from("k"),
            low_value: lo as f64,
            low_metric: metric_value(&with_majority_threshold(base, lo)?, metric)?,
            high_value: hi as f64,
            high_metric: metric_value(&with_majority_threshold(base, hi)?, metric)?,
            baseline_metric,
        });
    }
    rows.sort_by(|a, b| {
        let wa = abs(a.high_metric - a.low_metric);
        let wb = abs(b.high_metric - b.low_metric);
        wb.partial_cmp(&wa).unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(SweepResult { tornado_rows: rows, iso_curves: Vec::new(), spec_echo: spec.clone() })
}

/// Extracts metric contours over the (beta, p_k) grid. Each row of constant
/// p_k is scanned along beta; the metric is monotone in beta for every
/// supported metric, so linear interpolation between the straddling grid
/// points places the contour. A level the grid never reaches yields an
/// empty polyline.
pub fn iso_curves(spec: &SweepSpec, levels: &[f64]) -> Result<SweepResult, SweepError> {
    check_ranges(spec)?;
    let res = spec.grid_resolution;
    if res < 2 {
        return Err(SweepError::GridResolution { resolution: res });
    }
    for &level in levels {
        if !level.is_finite() || level <= 0.0 {
            return Err(SweepError::LevelRange { level });
        }
    }
    let (p_lo, p_hi) = spec.ranges.p_k;
    let (b_lo, b_hi) = spec.ranges.beta;

    // Metric values on the full grid, row by row in ascending p_k.
    let mut grid: Vec<Vec<f64>> = Vec::with_capacity(res);
    let mut p_axis = Vec::with_capacity(res);
    let mut b_axis = Vec::with_capacity(res);
    for j in 0..res {
        b_axis.push(b_lo + (b_hi - b_lo) * j as f64 / (res - 1) as f64);
    }
    for i in 0..res {
        let p = p_lo + (p_hi - p_lo) * i as f64 / (res - 1) as f64;
        p_axis.push(p);
        let row_params = with_coalition_detection(&spec.baseline, p)?;
        let mut row = Vec::with_capacity(res);
        for &beta in &b_axis {
            row.push(metric_value(&row_params.clone().with_beta(beta)?, spec.metric)?);
        }
        grid.push(row);
    }

    let mut curves = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut points = Vec::new();
        for (i, row) in grid.iter().enumerate() {
            for j in 0..res - 1 {
                let (m0, m1) = (row[j], row[j + 1]);
                let hit = if m0 == level {
                    Some(b_axis[j])
                } else if (m0 - level) * (m1 - level) < 0.0 {
                    let t = (level - m0) / (m1 - m0);
                    Some(b_axis[j] + t * (b_axis[j + 1] - b_axis[j]))
                } else if j == res - 2 && m1 == level {
                    Some(b_axis[j + 1])
                } else {
                    None
                };
                if let Some(beta) = hit {
                    points.push(IsoPoint { beta, p_k: p_axis[i] });
                    break;
                }
            }
        }
        curves.push(IsoCurve { level, points });
    }
    Ok(SweepResult { tornado_rows: Vec::new(), iso_curves: curves, spec_echo: spec.clone() })
}

/// Headline summary at a baseline: detection rates, the binding sanction,
/// the safe-stock table across nearby flow fractions, corner diagnostics,
/// and the threshold report.
pub fn calibration_report(baseline: &ModelParams) -> Result<CalibrationReport, ParamError> {
    let safe = v_safe(baseline)?;
    let mut by_beta = Vec::with_capacity(3);
    for beta in [0.055, 0.060, 0.065] {
        by_beta.push(BetaPoint { beta, v_safe: v_safe(&baseline.clone().with_beta(beta)?)? });
    }
    let at_safe = baseline.clone().with_v(safe)?;
    Ok(CalibrationReport {
        n: baseline.n(),
        k: baseline.k(),
        q: baseline.q(),
        p_k: baseline.p_k(),
        p_tilde: baseline.p_tilde(),
        f_eff: baseline.effective_sanction(),
        omega: baseline.omega(),
        v_safe: safe,
        v_safe_by_beta: by_beta,
        corner_at_baseline: corner_test(baseline)?,
        corner_at_safe_stock: corner_test(&at_safe)?,
        equilibrium: equilibrium_report(baseline)?,
    })
}
