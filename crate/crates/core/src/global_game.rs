//! Dispersed-information play. The prize fundamental theta is drawn from a
//! prior, each provider sees a private signal s_i = theta + sigma * eps_i
//! with standard normal noise, and symmetric play is a cutoff rule: join
//! iff the signal reaches tau. The solver locates the cutoff at which a
//! provider whose signal equals tau is exactly indifferent, and reports the
//! vanishing-noise anchor theta_star where assured-success joining breaks
//! even.

use alloc::vec::Vec;
use core::fmt;

use crate::equilibrium::PayoffKernel;
use crate::model::{ModelParams, ParamError};
use crate::numeric::{
    abs, adaptive_simpson, exp, fmax, fmin, ln, normal_cdf, normal_pdf, GaussHermite,
};

/// Prior over the fundamental.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThetaPrior {
    /// Full-support prior; the posterior after a normal signal is normal,
    /// so expectations use Gauss-Hermite quadrature.
    Normal { mean: f64, std: f64 },
    /// Bounded prior for test harnesses (full support is deliberately
    /// violated). `lo == hi` degenerates to a point mass, evaluated exactly.
    Uniform { lo: f64, hi: f64 },
}

impl ThetaPrior {
    fn validate(&self) -> Result<(), SolveError> {
        match *self {
            ThetaPrior::Normal { mean, std } => {
                if !mean.is_finite() || !std.is_finite() || std <= 0.0 {
                    return Err(SolveError::PriorShape { detail: "normal prior needs finite mean and std > 0" });
                }
            }
            ThetaPrior::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(SolveError::PriorShape { detail: "uniform prior needs finite lo <= hi" });
                }
            }
        }
        Ok(())
    }

    /// Range the solver and prize-map validation consider relevant.
    fn core_range(&self) -> (f64, f64) {
        match *self {
            ThetaPrior::Normal { mean, std } => (mean - 8.0 * std, mean + 8.0 * std),
            ThetaPrior::Uniform { lo, hi } => (lo, hi),
        }
    }
}

/// Signal-noise family. Standard normal noise scaled by sigma: strictly
/// log-concave with full support, as the cutoff analysis assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NoiseFamily {
    #[default]
    Normal,
}

/// How the fundamental maps into the capturable prize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PrizeMap {
    /// omega(theta) = theta: the fundamental is the extractable flow, which
    /// makes the vanishing-noise anchor available in closed form.
    #[default]
    Identity,
    /// omega(theta) = base_omega * e^theta, with base_omega = beta * v from
    /// the base parameters.
    Exponential,
}

/// Numerical policy for the cutoff solver.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolverSettings {
    /// Residual tolerance, relative to max(|omega(tau)|, f_eff).
    pub root_tol: f64,
    /// Gauss-Hermite node count for normal-prior posteriors.
    pub quadrature_nodes: usize,
    /// Cap on bracket expansion steps away from theta_star.
    pub max_bracket_doublings: u32,
    /// Grid size for the monotonicity diagnostic on the solved bracket.
    pub monotonicity_grid: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            root_tol: 1e-8,
            quadrature_nodes: 64,
            max_bracket_doublings: 48,
            monotonicity_grid: 50,
        }
    }
}

impl SolverSettings {
    fn validate(&self) -> Result<(), SolveError> {
        if !self.root_tol.is_finite() || self.root_tol <= 0.0 {
            return Err(SolveError::SolverSetting { field: "root_tol" });
        }
        if self.quadrature_nodes < 4 || self.quadrature_nodes > 512 {
            return Err(SolveError::SolverSetting { field: "quadrature_nodes" });
        }
        if self.max_bracket_doublings < 1 || self.max_bracket_doublings > 64 {
            return Err(SolveError::SolverSetting { field: "max_bracket_doublings" });
        }
        if self.monotonicity_grid < 2 || self.monotonicity_grid > 100_000 {
            return Err(SolveError::SolverSetting { field: "monotonicity_grid" });
        }
        Ok(())
    }
}

/// Full description of the dispersed-information game.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GlobalGameSpec {
    base: ModelParams,
    theta_prior: ThetaPrior,
    sigma: f64,
    noise_family: NoiseFamily,
    prize_map: PrizeMap,
    solver: SolverSettings,
}

impl GlobalGameSpec {
    /// Builds a spec with normal noise, the identity prize map, and default
    /// solver settings.
    pub fn new(base: ModelParams, theta_prior: ThetaPrior, sigma: f64) -> Result<Self, SolveError> {
        theta_prior.validate()?;
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(SolveError::SigmaRange { sigma });
        }
        let spec = GlobalGameSpec {
            base,
            theta_prior,
            sigma,
            noise_family: NoiseFamily::Normal,
            prize_map: PrizeMap::Identity,
            solver: SolverSettings::default(),
        };
        spec.ensure_prize_map_increasing()?;
        Ok(spec)
    }

    pub fn with_prize_map(mut self, prize_map: PrizeMap) -> Result<Self, SolveError> {
        self.prize_map = prize_map;
        self.ensure_prize_map_increasing()?;
        Ok(self)
    }

    pub fn with_solver(mut self, solver: SolverSettings) -> Result<Self, SolveError> {
        solver.validate()?;
        self.solver = solver;
        Ok(self)
    }

    pub fn base(&self) -> &ModelParams {
        &self.base
    }

    pub fn theta_prior(&self) -> ThetaPrior {
        self.theta_prior
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn noise_family(&self) -> NoiseFamily {
        self.noise_family
    }

    pub fn prize_map(&self) -> PrizeMap {
        self.prize_map
    }

    pub fn solver(&self) -> SolverSettings {
        self.solver
    }

    /// Prize flow at fundamental `theta`.
    pub fn prize(&self, theta: f64) -> f64 {
        match self.prize_map {
            PrizeMap::Identity => theta,
            PrizeMap::Exponential => self.base.omega() * exp(theta),
        }
    }

    fn ensure_prize_map_increasing(&self) -> Result<(), SolveError> {
        let (lo, hi) = self.theta_prior.core_range();
        let (lo, hi) = if lo == hi { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
        let mut prev = self.prize(lo);
        for i in 1..=16 {
            let theta = lo + (hi - lo) * i as f64 / 16.0;
            let cur = self.prize(theta);
            if !(cur > prev) {
                return Err(SolveError::PrizeMapNotIncreasing);
            }
            prev = cur;
        }
        Ok(())
    }

    /// Search window for the cutoff: the prior's effective support padded by
    /// several noise scales.
    fn search_window(&self) -> (f64, f64) {
        match self.theta_prior {
            ThetaPrior::Normal { mean, std } => {
                (mean - 8.0 * std - 10.0 * self.sigma, mean + 8.0 * std + 10.0 * self.sigma)
            }
            ThetaPrior::Uniform { lo, hi } => (lo - 5.0 * self.sigma, hi + 5.0 * self.sigma),
        }
    }
}

/// Errors from the dispersed-information solver.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Param(ParamError),
    SigmaRange { sigma: f64 },
    PriorShape { detail: &'static str },
    PrizeMapNotIncreasing,
    SolverSetting { field: &'static str },
    /// Adaptive quadrature hit its depth cap; reports how many integrand
    /// evaluations were spent and the offending panel.
    QuadratureNonConvergence { evaluations: usize, lo: f64, hi: f64 },
    /// The posterior given the signal carries no representable mass.
    DegeneratePosterior { tau: f64 },
    /// The assured-success break-even equation has no root in range.
    NoRoot,
    /// Bisection converged but the residual exceeds the requested bound.
    ResidualTolerance { residual: f64, bound: f64 },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Param(e) => write!(f, "{e}"),
            SolveError::SigmaRange { sigma } => {
                write!(f, "sigma = {sigma} is out of range; need sigma > 0")
            }
            SolveError::PriorShape { detail } => write!(f, "theta_prior is invalid: {detail}"),
            SolveError::PrizeMapNotIncreasing => {
                write!(f, "prize_map is not strictly increasing over the prior range")
            }
            SolveError::SolverSetting { field } => {
                write!(f, "solver setting {field} is out of range")
            }
            SolveError::QuadratureNonConvergence { evaluations, lo, hi } => write!(
                f,
                "posterior quadrature did not converge after {evaluations} evaluations on [{lo}, {hi}]"
            ),
            SolveError::DegeneratePosterior { tau } => {
                write!(f, "posterior at signal {tau} has no representable mass")
            }
            SolveError::NoRoot => write!(f, "break-even equation has no root in range"),
            SolveError::ResidualTolerance { residual, bound } => {
                write!(f, "cutoff residual {residual} exceeds bound {bound}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolveError {}

impl From<ParamError> for SolveError {
    fn from(e: ParamError) -> Self {
        SolveError::Param(e)
    }
}

/// Which way the conditional payoff crosses zero at the solved cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CrossingDirection {
    /// Payoff falls through zero as tau rises: the uniqueness regime.
    Decreasing,
    /// Payoff rises through zero; reported honestly when the game's
    /// attempt-stage exposure reshapes the conditional payoff.
    Increasing,
}

/// A solved cutoff equilibrium candidate with diagnostics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CutoffSolution {
    /// Signal cutoff: join iff the private signal is at least this.
    pub tau: f64,
    /// Conditional expected payoff at the cutoff signal (target: 0).
    pub residual: f64,
    /// Vanishing-noise anchor: assured-success break-even fundamental.
    pub theta_star: f64,
    /// Sign-change interval the bisection started from.
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub crossing: CrossingDirection,
    /// True when the conditional payoff strictly decreases across the
    /// bracket on the diagnostic grid.
    pub payoff_strictly_decreasing_on_bracket: bool,
}

/// Classified solver result: either a cutoff, or proof that the conditional
/// payoff never changes sign over the search window.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CutoffOutcome {
    Solved(CutoffSolution),
    /// Joining is unprofitable at every candidate cutoff: collusion is
    /// deterred regardless of signals.
    AlwaysDeterred { max_conditional_payoff: f64 },
    /// Joining is profitable at every candidate cutoff.
    NeverDeterred { min_conditional_payoff: f64 },
}

/// Probability a provider assigns to any one opponent joining, when the
/// fundamental is `theta` and opponents use cutoff `tau`: the chance the
/// opponent's signal clears the cutoff.
pub fn belief_given_cutoff(theta: f64, tau: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    normal_cdf((theta - tau) / sigma)
}

/// Posterior moments of theta given one signal `tau`, for a Normal(mean,
/// std^2) prior and Normal(0, sigma^2) noise.
pub(crate) fn normal_posterior(mean: f64, std: f64, sigma: f64, tau: f64) -> (f64, f64) {
    let s2 = std * std;
    let n2 = sigma * sigma;
    let precision_sum = s2 + n2;
    let post_mean = (n2 * mean + s2 * tau) / precision_sum;
    let post_var = s2 * n2 / precision_sum;
    (post_mean, post_var)
}

/// Normal CDF difference Phi(hi) - Phi(lo), computed from the matching tail
/// so nearby large arguments do not cancel.
pub(crate) fn normal_mass_between(lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    if lo >= 0.0 {
        fmax(0.0, (1.0 - normal_cdf(lo)) - (1.0 - normal_cdf(hi)))
    } else if hi <= 0.0 {
        fmax(0.0, normal_cdf(hi) - normal_cdf(lo))
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    }
}

struct Evaluator<'a> {
    spec: &'a GlobalGameSpec,
    kernel: PayoffKernel,
    gh: Option<GaussHermite>,
}

impl<'a> Evaluator<'a> {
    fn new(spec: &'a GlobalGameSpec) -> Self {
        let gh = match spec.theta_prior {
            ThetaPrior::Normal { .. } => Some(GaussHermite::new(spec.solver.quadrature_nodes)),
            ThetaPrior::Uniform { .. } => None,
        };
        Evaluator { spec, kernel: PayoffKernel::from_params(&spec.base), gh }
    }

    /// Joiner payoff at fundamental `theta` when everyone else cuts at `tau`.
    fn u_at(&self, theta: f64, tau: f64) -> f64 {
        let alpha = normal_cdf((theta - tau) / self.spec.sigma);
        self.kernel.u_join(alpha, self.spec.prize(theta))
    }

    /// Magnitude scale of the payoff over [lo, hi], for tolerances.
    fn payoff_scale(&self, lo: f64, hi: f64) -> f64 {
        let k = self.kernel.k() as f64;
        let prize = fmax(abs(self.spec.prize(lo)), abs(self.spec.prize(hi)));
        fmax(self.kernel.f_eff(), prize / k).max(1e-300)
    }

    /// E[u | signal = tau] when play follows cutoff tau: the root function.
    fn conditional_payoff(&self, tau: f64) -> Result<f64, SolveError> {
        match self.spec.theta_prior {
            ThetaPrior::Normal { mean, std } => {
                let (m, v) = normal_posterior(mean, std, self.spec.sigma, tau);
                let gh = self.gh.as_ref().expect("normal prior builds quadrature");
                Ok(gh.normal_expectation(m, v, |theta| self.u_at(theta, tau)))
            }
            ThetaPrior::Uniform { lo, hi } => {
                if lo == hi {
                    return Ok(self.u_at(lo, tau));
                }
                let sigma = self.spec.sigma;
                let z_lo = (lo - tau) / sigma;
                let z_hi = (hi - tau) / sigma;
                let mass = normal_mass_between(z_lo, z_hi);
                if mass < 1e-290 {
                    return Err(SolveError::DegeneratePosterior { tau });
                }
                // Panels split where the posterior density changes scale.
                let mut cuts = Vec::with_capacity(9);
                cuts.push(z_lo);
                for c in [-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0] {
                    if c > z_lo && c < z_hi {
                        cuts.push(c);
                    }
                }
                cuts.push(z_hi);
                let tol = 1e-13 * self.payoff_scale(lo, hi) * mass;
                let mut total = 0.0;
                for pair in cuts.windows(2) {
                    let mut integrand = |z: f64| {
                        let theta = tau + sigma * z;
                        self.u_at(theta, tau) * normal_pdf(z)
                    };
                    match adaptive_simpson(&mut integrand, pair[0], pair[1], tol, 48) {
                        Ok(piece) => total += piece,
                        Err(evaluations) => {
                            return Err(SolveError::QuadratureNonConvergence {
                                evaluations,
                                lo: tau + sigma * pair[0],
                                hi: tau + sigma * pair[1],
                            })
                        }
                    }
                }
                Ok(total / mass)
            }
        }
    }
}

/// Expected joiner payoff conditional on observing signal `tau` while all
/// opponents play the cutoff `tau`: the quantity whose root is the
/// equilibrium cutoff.
pub fn conditional_payoff_at_signal(spec: &GlobalGameSpec, tau: f64) -> Result<f64, SolveError> {
    if !tau.is_finite() {
        return Err(SolveError::PriorShape { detail: "signal tau must be finite" });
    }
    Evaluator::new(spec).conditional_payoff(tau)
}

/// Fundamental at which joining breaks even under assured success:
/// (1 - p_k) * omega(theta) / k = p_k * f_eff. Solved by bisection seeded
/// with the identity-map closed form.
pub fn theta_star(spec: &GlobalGameSpec) -> Result<f64, SolveError> {
    let kernel = PayoffKernel::from_params(&spec.base);
    let k = kernel.k() as f64;
    let target = kernel.p_k() * kernel.f_eff();
    let g = |theta: f64| (1.0 - kernel.p_k()) * spec.prize(theta) / k - target;

    let guess = match spec.prize_map {
        PrizeMap::Identity => k * target / (1.0 - kernel.p_k()),
        PrizeMap::Exponential => {
            let base = spec.base.omega();
            if base <= 0.0 || target <= 0.0 {
                return Err(SolveError::NoRoot);
            }
            ln(k * target / ((1.0 - kernel.p_k()) * base))
        }
    };

    // Expand a bracket around the seed until the increasing map straddles 0.
    let mut step = fmax(1.0, abs(guess)) * 1e-3;
    let (mut lo, mut hi) = (guess - step, guess + step);
    for _ in 0..200 {
        if g(lo) <= 0.0 && g(hi) >= 0.0 {
            break;
        }
        step *= 2.0;
        lo = guess - step;
        hi = guess + step;
    }
    let (mut f_lo, f_hi) = (g(lo), g(hi));
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(SolveError::NoRoot);
    }
    let mut mid = guess;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f_mid = g(mid);
        if f_mid == 0.0 || hi - lo <= 1e-14 * fmax(1.0, abs(mid)) {
            break;
        }
        if (f_mid > 0.0) == (f_lo <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(mid)
}

/// Locates the symmetric cutoff equilibrium, preferring a bracket where the
/// conditional payoff falls through zero; when no sign change exists over
/// the search window the outcome is classified instead of failing.
pub fn solve_cutoff(spec: &GlobalGameSpec) -> Result<CutoffOutcome, SolveError> {
    let ev = Evaluator::new(spec);
    let anchor = theta_star(spec)?;
    let (w_lo, w_hi) = spec.search_window();
    let clamp = |x: f64| fmin(fmax(x, w_lo), w_hi);

    let mut taus: Vec<f64> = Vec::new();
    taus.push(clamp(anchor));
    let mut step = spec.sigma;
    for _ in 0..spec.solver.max_bracket_doublings {
        let (lo, hi) = (clamp(anchor - step), clamp(anchor + step));
        taus.push(lo);
        taus.push(hi);
        if lo == w_lo && hi == w_hi {
            break;
        }
        step *= 2.0;
    }
    taus.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    taus.dedup();

    let mut evals: Vec<(f64, f64)> = Vec::with_capacity(taus.len() + 65);
    for &tau in &taus {
        evals.push((tau, ev.conditional_payoff(tau)?));
    }

    let pick_bracket = |evals: &[(f64, f64)]| -> Option<((f64, f64), (f64, f64))> {
        let mut increasing = None;
        for pair in evals.windows(2) {
            let (t0, f0) = pair[0];
            let (t1, f1) = pair[1];
            if f0 > 0.0 && f1 < 0.0 {
                return Some(((t0, f0), (t1, f1)));
            }
            if increasing.is_none() && f0 < 0.0 && f1 > 0.0 {
                increasing = Some(((t0, f0), (t1, f1)));
            }
        }
        increasing
    };

    // An exact zero short-circuits the search.
    if let Some(&(tau, _)) = evals.iter().find(|&&(_, f)| f == 0.0) {
        let b_lo = clamp(tau - spec.sigma);
        let b_hi = clamp(tau + spec.sigma);
        let decreasing = grid_strictly_decreasing(&ev, b_lo, b_hi, spec.solver.monotonicity_grid)?;
        return Ok(CutoffOutcome::Solved(CutoffSolution {
            tau,
            residual: 0.0,
            theta_star: anchor,
            bracket: (b_lo, b_hi),
            iterations: 0,
            crossing: if decreasing {
                CrossingDirection::Decreasing
            } else {
                CrossingDirection::Increasing
            },
            payoff_strictly_decreasing_on_bracket: decreasing,
        }));
    }

    let mut bracket = pick_bracket(&evals);
    if bracket.is_none() {
        // Refine with a uniform sweep before classifying.
        for i in 0..=64 {
            let tau = w_lo + (w_hi - w_lo) * i as f64 / 64.0;
            evals.push((tau, ev.conditional_payoff(tau)?));
        }
        evals.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        evals.dedup_by(|a, b| a.0 == b.0);
        if let Some(&(tau, _)) = evals.iter().find(|&&(_, f)| f == 0.0) {
            let b_lo = clamp(tau - spec.sigma);
            let b_hi = clamp(tau + spec.sigma);
            let decreasing =
                grid_strictly_decreasing(&ev, b_lo, b_hi, spec.solver.monotonicity_grid)?;
            return Ok(CutoffOutcome::Solved(CutoffSolution {
                tau,
                residual: 0.0,
                theta_star: anchor,
                bracket: (b_lo, b_hi),
                iterations: 0,
                crossing: if decreasing {
                    CrossingDirection::Decreasing
                } else {
                    CrossingDirection::Increasing
                },
                payoff_strictly_decreasing_on_bracket: decreasing,
            }));
        }
        bracket = pick_bracket(&evals);
        if bracket.is_none() {
            let mut max_f = f64::NEG_INFINITY;
            let mut min_f = f64::INFINITY;
            for &(_, f) in &evals {
                max_f = fmax(max_f, f);
                min_f = fmin(min_f, f);
            }
            return Ok(if max_f < 0.0 {
                CutoffOutcome::AlwaysDeterred { max_conditional_payoff: max_f }
            } else {
                CutoffOutcome::NeverDeterred { min_conditional_payoff: min_f }
            });
        }
    }

    let ((b_lo, f_lo), (b_hi, _f_hi)) = bracket.expect("checked above");
    let crossing =
        if f_lo > 0.0 { CrossingDirection::Decreasing } else { CrossingDirection::Increasing };

    let (mut lo, mut hi) = (b_lo, b_hi);
    let mut iterations = 0u32;
    let mut tau = 0.5 * (lo + hi);
    while iterations < 250 {
        tau = 0.5 * (lo + hi);
        let f_mid = ev.conditional_payoff(tau)?;
        iterations += 1;
        if f_mid == 0.0 {
            break;
        }
        let mid_on_lo_side = match crossing {
            CrossingDirection::Decreasing => f_mid > 0.0,
            CrossingDirection::Increasing => f_mid < 0.0,
        };
        if mid_on_lo_side {
            lo = tau;
        } else {
            hi = tau;
        }
        if hi - lo <= 1e-13 * fmax(1.0, abs(tau)) {
            break;
        }
    }
    let residual = ev.conditional_payoff(tau)?;
    let bound = spec.solver.root_tol * ev.payoff_scale(tau, tau);
    if abs(residual) > bound {
        return Err(SolveError::ResidualTolerance { residual, bound });
    }
    let decreasing = grid_strictly_decreasing(&ev, b_lo, b_hi, spec.solver.monotonicity_grid)?;
    Ok(CutoffOutcome::Solved(CutoffSolution {
        tau,
        residual,
        theta_star: anchor,
        bracket: (b_lo, b_hi),
        iterations,
        crossing,
        payoff_strictly_decreasing_on_bracket: decreasing,
    }))
}

fn grid_strictly_decreasing(
    ev: &Evaluator<'_>,
    lo: f64,
    hi: f64,
    grid: usize,
) -> Result<bool, SolveError> {
    if lo >= hi {
        return Ok(true);
    }
    let mut prev = ev.conditional_payoff(lo)?;
    for i in 1..grid {
        let tau = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
        let cur = ev.conditional_payoff(tau)?;
        if cur >= prev {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(true)
}
