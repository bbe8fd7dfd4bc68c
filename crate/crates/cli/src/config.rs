//! JSON experiment configuration.
//!
//! One document, four optional sections (`model`, `global_game`, `sim`,
//! `sweep`) plus an optional top-level `seed`. Every field is optional;
//! resolution fills in the documented baseline defaults and returns both the
//! core objects and a fully populated echo of the configuration that was
//! actually used. Reports embed that echo, so any report's `config` object
//! can be fed back in as a config file to reproduce the run.

use deterrence_core::{
    majority_threshold, q_from_coalition_detection, theta_star, v_safe, GlobalGameSpec,
    ModelParams, ParamError, PrizeMap, SanctionProfile, SimError, SolveError, SolverSettings,
    Strategy, SweepError, SweepMetric, SweepSpec, ThetaPrior,
};
use serde::{Deserialize, Serialize};

/// Failures split by exit code: validation problems (bad input, exit 1)
/// versus solver failures (well-posed input the numerics cannot answer,
/// exit 2).
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Solver(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Solver(m) => m,
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::QuadratureNonConvergence { .. }
            | SolveError::DegeneratePosterior { .. }
            | SolveError::NoRoot
            | SolveError::ResidualTolerance { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::DegeneratePosterior { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Master seed for simulation commands; `--seed` overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_game: Option<GlobalGameSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

/// Base-model primitives. Defaults: n = 5, k = majority, p_k = 0.15 (q is
/// back-solved), beta = 0.06, flat explicit sanctions of 135 per provider,
/// pre_coordination_size = k - 1, and v = the safe-stock bound for the
/// resolved parameters. `q` and `p_k` are mutually exclusive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Per-member detection rate, in (0, 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Coalition-scale detection probability; q is back-solved from it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Custodied stock, in billions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sanctions: Option<SanctionsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_coordination_size: Option<u32>,
}

/// Sanction schedule: `{"explicit": [..]}` lists one value per provider,
/// `{"zipf": c}` is the rank-size law c / rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SanctionsSection {
    Explicit(Vec<f64>),
    Zipf(f64),
}

/// Signal-game overlay. Defaults: normal prior centered on the break-even
/// fundamental with std 20, sigma = 5, identity prize map, solver defaults,
/// and pre_coordination_size = 0 (recruitment is covert until execution).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalGameSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSection>,
    /// Signal noise scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prize_map: Option<PrizeMapSection>,
    /// Overrides the base model's exposure size inside the signal game.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_coordination_size: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSection {
    Normal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrizeMapSection {
    Identity,
    Exponential,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bracket_doublings: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotonicity_grid: Option<usize>,
}

/// Simulation settings. Defaults: 100_000 replications, join_always, the
/// complete-information environment, and no pinned fundamental.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvironmentSection>,
    /// Pins the fundamental in the dispersed environment; when absent the
    /// fundamental is drawn from the prior each replication.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySection {
    JoinNever,
    JoinAlways,
    JoinProb(f64),
    Cutoff(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentSection {
    Complete,
    Dispersed,
}

/// Sweep settings for `tornado` and `iso`. Defaults: f_eff in [100, 135],
/// p_k in [0.05, 0.20], beta in [0.03, 0.10], k in [3, 7], 101 grid points,
/// the safe-stock metric, and one iso level at the baseline metric value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_eff: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_k: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSection>,
    /// Iso-curve levels in metric units; ignored by `tornado`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSection {
    VSafe,
    UJoinAtOne,
    QStar,
    KStar,
}

impl From<MetricSection> for SweepMetric {
    fn from(m: MetricSection) -> Self {
        match m {
            MetricSection::VSafe => SweepMetric::VSafe,
            MetricSection::UJoinAtOne => SweepMetric::UJoinAtOne,
            MetricSection::QStar => SweepMetric::QStar,
            MetricSection::KStar => SweepMetric::KStar,
        }
    }
}

pub struct ResolvedModel {
    pub params: ModelParams,
    pub echo: ModelSection,
}

/// Fills model defaults and validates. The echo carries `q` (never `p_k`)
/// so it resolves identically when fed back in.
pub fn resolve_model(cfg: &RawConfig) -> Result<ResolvedModel, CliError> {
    let m = cfg.model.clone().unwrap_or_default();
    let n = m.n.unwrap_or(5);
    let k = match m.k {
        Some(k) => k,
        None => majority_threshold(n)?,
    };
    let q = match (m.q, m.p_k) {
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(String::from(
                "model.q and model.p_k are mutually exclusive; set at most one",
            )))
        }
        (Some(q), None) => q,
        (None, Some(p_k)) => q_from_coalition_detection(p_k, k)?,
        (None, None) => q_from_coalition_detection(0.15, k)?,
    };
    let beta = m.beta.unwrap_or(0.06);
    let sanctions = match &m.sanctions {
        Some(SanctionsSection::Explicit(values)) => SanctionProfile::explicit(values.clone())?,
        Some(SanctionsSection::Zipf(scale)) => SanctionProfile::zipf(*scale)?,
        None => SanctionProfile::explicit(vec![135.0; n as usize])?,
    };

    let mut params = ModelParams::new(n, k, q, beta, 0.0, sanctions)?;
    if let Some(size) = m.pre_coordination_size {
        params = params.with_pre_coordination_size(size)?;
    }
    let v = match m.v {
        Some(v) => v,
        None => v_safe(&params)?,
    };
    let params = params.with_v(v)?;

    let sanctions_echo = match params.sanctions() {
        SanctionProfile::Explicit { values } => SanctionsSection::Explicit(values.clone()),
        SanctionProfile::Zipf { scale } => SanctionsSection::Zipf(*scale),
    };
    let echo = ModelSection {
        n: Some(params.n()),
        k: Some(params.k()),
        q: Some(params.q()),
        p_k: None,
        beta: Some(params.beta()),
        v: Some(params.v()),
        sanctions: Some(sanctions_echo),
        pre_coordination_size: Some(params.pre_coordination_size()),
    };
    Ok(ResolvedModel { params, echo })
}

pub struct ResolvedGame {
    pub spec: GlobalGameSpec,
    pub echo: GlobalGameSection,
}

/// Builds the signal game on top of resolved base parameters. The default
/// prior centers on the break-even fundamental of the configured prize map.
pub fn resolve_game(cfg: &RawConfig, params: &ModelParams) -> Result<ResolvedGame, CliError> {
    let g = cfg.global_game.clone().unwrap_or_default();
    let pre = g.pre_coordination_size.unwrap_or(0);
    let base = params.clone().with_pre_coordination_size(pre)?;
    let sigma = g.sigma.unwrap_or(5.0);
    let prize_map = match g.prize_map.unwrap_or(PrizeMapSection::Identity) {
        PrizeMapSection::Identity => PrizeMap::Identity,
        PrizeMapSection::Exponential => PrizeMap::Exponential,
    };
    let defaults = SolverSettings::default();
    let s = g.solver.clone().unwrap_or_default();
    let solver = SolverSettings {
        root_tol: s.root_tol.unwrap_or(defaults.root_tol),
        quadrature_nodes: s.quadrature_nodes.unwrap_or(defaults.quadrature_nodes),
        max_bracket_doublings: s
            .max_bracket_doublings
            .unwrap_or(defaults.max_bracket_doublings),
        monotonicity_grid: s.monotonicity_grid.unwrap_or(defaults.monotonicity_grid),
    };

    let prior = match g.prior {
        Some(PriorSection::Normal { mean, std }) => ThetaPrior::Normal { mean, std },
        Some(PriorSection::Uniform { lo, hi }) => ThetaPrior::Uniform { lo, hi },
        None => {
            // Prior placement needs the break-even fundamental, which depends
            // only on the base parameters and the prize map.
            let probe = GlobalGameSpec::new(
                base.clone(),
                ThetaPrior::Normal { mean: 0.0, std: 1.0 },
                sigma,
            )?
            .with_prize_map(prize_map)?;
            ThetaPrior::Normal { mean: theta_star(&probe)?, std: 20.0 }
        }
    };

    let spec = GlobalGameSpec::new(base, prior, sigma)?
        .with_prize_map(prize_map)?
        .with_solver(solver)?;

    let prior_echo = match spec.theta_prior() {
        ThetaPrior::Normal { mean, std } => PriorSection::Normal { mean, std },
        ThetaPrior::Uniform { lo, hi } => PriorSection::Uniform { lo, hi },
    };
    let echo = GlobalGameSection {
        prior: Some(prior_echo),
        sigma: Some(spec.sigma()),
        prize_map: Some(match spec.prize_map() {
            PrizeMap::Identity => PrizeMapSection::Identity,
            PrizeMap::Exponential => PrizeMapSection::Exponential,
        }),
        pre_coordination_size: Some(spec.base().pre_coordination_size()),
        solver: Some(SolverSection {
            root_tol: Some(spec.solver().root_tol),
            quadrature_nodes: Some(spec.solver().quadrature_nodes),
            max_bracket_doublings: Some(spec.solver().max_bracket_doublings),
            monotonicity_grid: Some(spec.solver().monotonicity_grid),
        }),
    };
    Ok(ResolvedGame { spec, echo })
}

pub struct ResolvedSim {
    pub replications: u64,
    pub strategy: Strategy,
    pub environment: EnvironmentSection,
    pub theta: Option<f64>,
    pub echo: SimSection,
}

/// Fills simulation defaults. Environment construction happens at the call
/// site because the dispersed case needs the resolved signal game.
pub fn resolve_sim(cfg: &RawConfig) -> Result<ResolvedSim, CliError> {
    let s = cfg.sim.clone().unwrap_or_default();
    let replications = s.replications.unwrap_or(100_000);
    let strategy_section = s.strategy.unwrap_or(StrategySection::JoinAlways);
    let environment = s.environment.unwrap_or(EnvironmentSection::Complete);
    if s.theta.is_some() && environment == EnvironmentSection::Complete {
        return Err(CliError::Validation(String::from(
            "sim.theta requires sim.environment = \"dispersed\"",
        )));
    }
    let strategy = match strategy_section {
        StrategySection::JoinNever => Strategy::JoinNever,
        StrategySection::JoinAlways => Strategy::JoinAlways,
        StrategySection::JoinProb(p) => Strategy::JoinProb(p),
        StrategySection::Cutoff(tau) => Strategy::Cutoff(tau),
    };
    let echo = SimSection {
        replications: Some(replications),
        strategy: Some(strategy_section),
        environment: Some(environment),
        theta: s.theta,
    };
    Ok(ResolvedSim { replications, strategy, environment, theta: s.theta, echo })
}

pub struct ResolvedSweep {
    pub spec: SweepSpec,
    pub levels: Option<Vec<f64>>,
    pub echo: SweepSection,
}

/// Fills sweep defaults around the resolved baseline.
pub fn resolve_sweep(cfg: &RawConfig, params: &ModelParams) -> Result<ResolvedSweep, CliError> {
    let w = cfg.sweep.clone().unwrap_or_default();
    let mut spec = SweepSpec::new(params.clone());
    if let Some([lo, hi]) = w.f_eff {
        spec.ranges.f_eff = (lo, hi);
    }
    if let Some([lo, hi]) = w.p_k {
        spec.ranges.p_k = (lo, hi);
    }
    if let Some([lo, hi]) = w.beta {
        spec.ranges.beta = (lo, hi);
    }
    if let Some([lo, hi]) = w.k {
        spec.ranges.k = (lo, hi);
    }
    if let Some(res) = w.grid_resolution {
        spec.grid_resolution = res;
    }
    if let Some(metric) = w.metric {
        spec.metric = metric.into();
    }
    let echo = SweepSection {
        f_eff: Some([spec.ranges.f_eff.0, spec.ranges.f_eff.1]),
        p_k: Some([spec.ranges.p_k.0, spec.ranges.p_k.1]),
        beta: Some([spec.ranges.beta.0, spec.ranges.beta.1]),
        k: Some([spec.ranges.k.0, spec.ranges.k.1]),
        grid_resolution: Some(spec.grid_resolution),
        metric: Some(w.metric.unwrap_or(MetricSection::VSafe)),
        levels: w.levels.clone(),
    };
    Ok(ResolvedSweep { spec, levels: w.levels, echo })
}
