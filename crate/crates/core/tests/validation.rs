//! Cross-module validation: the simulation harness, the posterior
//! quadrature, and the closed forms must tell one consistent story.

use deterrence_core::{
    conditional_payoff_at_signal, estimate_deviation_gain, joiner_payoff,
    q_from_coalition_detection, simulate, solve_cutoff, CrossingDirection, CutoffOutcome,
    GlobalGameSpec, ModelParams, SanctionProfile, SimConfig, SimEnvironment, Strategy,
    ThetaPrior,
};

/// Assured-success break-even fundamental for the baseline coalition.
const THETA_STAR: f64 = 71.47058823529412;

/// Baseline in billions with a chosen pre-coordination exposure.
fn baseline(pre_coordination: u32) -> ModelParams {
    let q = q_from_coalition_detection(0.15, 3).unwrap();
    ModelParams::new(
        5,
        3,
        q,
        0.06,
        1191.1764705882354,
        SanctionProfile::explicit(vec![135.0; 5]).unwrap(),
    )
    .unwrap()
    .with_pre_coordination_size(pre_coordination)
    .unwrap()
}

fn solved(spec: &GlobalGameSpec) -> deterrence_core::CutoffSolution {
    match solve_cutoff(spec).unwrap() {
        CutoffOutcome::Solved(s) => s,
        other => panic!("expected a solved cutoff, got {other:?}"),
    }
}

#[test]
fn small_noise_cutoffs_walk_into_the_break_even_anchor() {
    let base = baseline(0);
    let prior = ThetaPrior::Normal { mean: THETA_STAR, std: 20.0 };
    let expected_tau = [68.7303, 70.0919, 70.7801, 71.1252];
    let mut gaps = Vec::new();
    for (&sigma, expect) in [5.0, 2.5, 1.25, 0.625].iter().zip(expected_tau) {
        let spec = GlobalGameSpec::new(base.clone(), prior, sigma).unwrap();
        let solution = solved(&spec);
        assert!(
            (solution.tau - expect).abs() < 5e-3,
            "sigma={sigma}: tau={} expected near {expect}",
            solution.tau
        );
        assert!((solution.theta_star - THETA_STAR).abs() <= 1e-9 * THETA_STAR);
        assert!(solution.residual.abs() <= 1e-8 * 135.0);
        gaps.push((solution.tau - THETA_STAR).abs());
    }
    for pair in gaps.windows(2) {
        assert!(pair[1] < pair[0], "gaps must shrink: {gaps:?}");
    }
    assert!(gaps[3] < 0.01 * THETA_STAR, "final gap {} too wide", gaps[3]);
}

#[test]
fn deviation_gain_vanishes_at_the_solved_cutoff_and_tracks_quadrature_nearby() {
    let base = baseline(0);
    let spec =
        GlobalGameSpec::new(base, ThetaPrior::Normal { mean: THETA_STAR, std: 20.0 }, 5.0)
            .unwrap();
    let solution = solved(&spec);

    let at = |tau: f64, seed: u64| {
        let config = SimConfig {
            environment: SimEnvironment::Dispersed { spec: spec.clone(), theta: None },
            strategy: Strategy::Cutoff(tau),
            replications: 200_000,
            seed,
        };
        estimate_deviation_gain(&config).unwrap()
    };

    let gain = at(solution.tau, 101);
    assert!(gain.std_error > 0.0);
    assert!(
        gain.value.abs() <= 3.0 * gain.std_error,
        "gain at cutoff {} +- {}",
        gain.value,
        gain.std_error
    );

    for (tau, seed) in [(solution.tau - 4.0, 103), (solution.tau + 4.0, 107)] {
        let quad = conditional_payoff_at_signal(&spec, tau).unwrap();
        let mc = at(tau, seed);
        assert!(
            (mc.value - quad).abs() <= 3.0 * mc.std_error + 1e-3,
            "tau={tau}: quadrature {quad} vs simulation {} +- {}",
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn quadrature_matches_monte_carlo_with_attempt_stage_exposure() {
    // Default pre-coordination exposure and an optimistic tight prior: the
    // regime where the payoff falls through zero.
    let base = baseline(2);
    let spec =
        GlobalGameSpec::new(base, ThetaPrior::Normal { mean: 110.0, std: 8.0 }, 4.0).unwrap();
    let solution = solved(&spec);
    assert_eq!(solution.crossing, CrossingDirection::Decreasing);

    for (tau, seed) in [(95.0, 211), (105.0, 223), (solution.tau, 227), (125.0, 229)] {
        let quad = conditional_payoff_at_signal(&spec, tau).unwrap();
        let config = SimConfig {
            environment: SimEnvironment::Dispersed { spec: spec.clone(), theta: None },
            strategy: Strategy::Cutoff(tau),
            replications: 200_000,
            seed,
        };
        let mc = estimate_deviation_gain(&config).unwrap();
        assert!(
            (mc.value - quad).abs() <= 3.0 * mc.std_error + 1e-3,
            "tau={tau}: quadrature {quad} vs simulation {} +- {}",
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn uniform_prior_pipeline_solves_and_agrees_with_simulation() {
    let base = baseline(0);
    let spec = GlobalGameSpec::new(
        base,
        ThetaPrior::Uniform { lo: THETA_STAR - 30.0, hi: THETA_STAR + 30.0 },
        2.0,
    )
    .unwrap();
    let solution = solved(&spec);
    assert!(solution.residual.abs() <= 1e-8 * 135.0);
    assert!(
        (solution.tau - THETA_STAR).abs() < 5.0,
        "uniform-prior cutoff {} should sit near the anchor",
        solution.tau
    );

    // The truncated-posterior sampler feeds the estimator here.
    for (tau, seed) in [(solution.tau, 307), (solution.tau - 5.0, 311), (solution.tau + 5.0, 313)]
    {
        let quad = conditional_payoff_at_signal(&spec, tau).unwrap();
        let config = SimConfig {
            environment: SimEnvironment::Dispersed { spec: spec.clone(), theta: None },
            strategy: Strategy::Cutoff(tau),
            replications: 200_000,
            seed,
        };
        let mc = estimate_deviation_gain(&config).unwrap();
        assert!(
            (mc.value - quad).abs() <= 3.0 * mc.std_error + 1e-3,
            "tau={tau}: quadrature {quad} vs simulation {} +- {}",
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn complete_information_simulation_matches_analytics_on_mixed_profiles() {
    let cases: [(u32, u32, f64, f64, f64); 3] = [
        (5, 3, 0.10, 0.45, 600.0),
        (9, 4, 0.05, 0.70, 900.0),
        (6, 2, 0.25, 0.30, 150.0),
    ];
    for (i, &(n, k, q, alpha, v)) in cases.iter().enumerate() {
        let values: Vec<f64> = (0..n).map(|r| 40.0 + 17.0 * ((r * 7 + 3) % 11) as f64).collect();
        let params =
            ModelParams::new(n, k, q, 0.06, v, SanctionProfile::explicit(values).unwrap())
                .unwrap();
        let expect = joiner_payoff(&params, alpha).unwrap();
        let config = SimConfig {
            environment: SimEnvironment::Complete { params: params.clone() },
            strategy: Strategy::JoinProb(alpha),
            replications: 200_000,
            seed: 400 + i as u64,
        };
        let result = simulate(&config).unwrap();

        assert!(
            (result.mean_realized_payoff - expect.u_join).abs() <= 3.0 * result.payoff_std_error,
            "case {i}: payoff {} vs {}",
            result.mean_realized_payoff,
            expect.u_join
        );
        let s = result.empirical_success_rate;
        assert!((s.value - expect.pi).abs() <= 3.0 * s.std_error);
        let ds = result.detection_rate_successful_attempts;
        assert!((ds.value - params.p_k()).abs() <= 3.0 * ds.std_error);
        let df = result.detection_rate_failed_attempts;
        assert!((df.value - params.p_tilde()).abs() <= 3.0 * df.std_error);
        let d = result.empirical_detection_rate;
        assert!((d.value - expect.p_bar).abs() <= 3.0 * d.std_error);
    }
}

#[test]
fn attempt_stage_exposure_deters_across_the_whole_signal_range() {
    // Diffuse prior centered on the anchor with the default exposure: no
    // cutoff exists, and simulation confirms joining loses at any plausible
    // cutoff.
    let base = baseline(2);
    let spec =
        GlobalGameSpec::new(base, ThetaPrior::Normal { mean: THETA_STAR, std: 20.0 }, 5.0)
            .unwrap();
    match solve_cutoff(&spec).unwrap() {
        CutoffOutcome::AlwaysDeterred { max_conditional_payoff } => {
            assert!(max_conditional_payoff < 0.0);
        }
        other => panic!("expected always-deterred, got {other:?}"),
    }
    let config = SimConfig {
        environment: SimEnvironment::Dispersed { spec, theta: None },
        strategy: Strategy::Cutoff(THETA_STAR),
        replications: 150_000,
        seed: 509,
    };
    let gain = estimate_deviation_gain(&config).unwrap();
    assert!(
        gain.value < -3.0 * gain.std_error,
        "joining at the anchor should lose: {} +- {}",
        gain.value,
        gain.std_error
    );
}
