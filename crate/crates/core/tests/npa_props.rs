//! Moment-matrix relaxation properties: sound bounds, label-order
//! invariance, and the headline deviation values on the shipped games.

use advice_games::catalog;
use advice_games::equilibrium::exact_best_response_value;
use advice_games::npa::{npa_deviation_bound, solve_sdp, DeviationSdp, MomentMatrix};
use advice_games::quantum::{
    behavior_of_quantum, bloch_measurement, ghz_game_strategy, ghz_state, seesaw_optimize,
    BinaryMeasurement, QuantumStrategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_strategy(rng: &mut ChaCha8Rng) -> QuantumStrategy {
    let measurements: Vec<Vec<BinaryMeasurement>> = (0..3)
        .map(|_| {
            (0..2)
                .map(|_| {
                    bloch_measurement(
                        rng.gen_range(0.0..std::f64::consts::PI),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect()
        })
        .collect();
    QuantumStrategy::new(ghz_state(), measurements).unwrap()
}

#[test]
fn honest_moment_matrices_stay_feasible_for_random_strategies() {
    let game = catalog::game_full();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..10 {
        let qs = random_strategy(&mut rng);
        for player in 0..3 {
            let mm = MomentMatrix::build(&game, &qs, player).unwrap();
            assert!(mm.honest_min_eigenvalue() >= -1e-8);
            assert!(mm.honest_constraint_residual() <= 1e-10);
            assert!(mm.honest_nonnegativity_violation() <= 1e-10);
            assert!(mm.honest_dependency_residual() <= 1e-10);
        }
    }
}

/// The SDP optimum can never undercut the honest point (relaxation
/// soundness) nor the exact POVM best response (relaxation dominance).
#[test]
fn npa_bound_dominates_the_exact_best_response() {
    let game = catalog::game_full();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for case in 0..20 {
        let qs = random_strategy(&mut rng);
        let player = case % 3;
        let npa = npa_deviation_bound(&game, &qs, player, 1e-7).unwrap();
        let exact = exact_best_response_value(&game, &qs, player).unwrap();
        assert!(
            npa.best_response_value >= exact.best_response_value - 1e-6,
            "case {case}: npa {} vs exact {}",
            npa.best_response_value,
            exact.best_response_value
        );
        assert!(npa.best_response_value >= npa.current_payoff - 1e-6);
        assert!(npa.diagnostics.unwrap().duality_gap <= 1e-7);
    }
}

#[test]
fn label_reordering_leaves_the_optimum_unchanged() {
    let game = catalog::game_full();
    let qs = ghz_game_strategy();
    let baseline = {
        let built = DeviationSdp::build(&game, &qs, 0).unwrap();
        solve_sdp(&built.problem, 1e-7).unwrap().optimum
    };
    // A fixed nontrivial shuffle of both label sequences.
    let dev_order = [2usize, 0, 3, 1];
    let pair_order = [5usize, 0, 11, 3, 15, 8, 1, 14, 2, 9, 7, 12, 4, 13, 10, 6];
    let permuted = {
        let built =
            DeviationSdp::build_with_orders(&game, &qs, 0, &dev_order, &pair_order).unwrap();
        solve_sdp(&built.problem, 1e-7).unwrap().optimum
    };
    assert!(
        (baseline - permuted).abs() <= 1e-6,
        "baseline {baseline} vs permuted {permuted}"
    );
}

#[test]
fn promised_game_bound_matches_the_analytic_four_thirds() {
    let game = catalog::game_promised();
    let qs = ghz_game_strategy();
    for player in 0..3 {
        let report = npa_deviation_bound(&game, &qs, player, 1e-7).unwrap();
        assert!(
            (report.best_response_value - 4.0 / 3.0).abs() <= 2e-3,
            "player {player}: {}",
            report.best_response_value
        );
    }
}

#[test]
fn full_game_bound_reproduces_the_svetlichny_equilibrium_value() {
    let game = catalog::game_full();
    let outcome = seesaw_optimize(&game, 20, 99).unwrap();
    let payoffs = game
        .average_payoffs(&behavior_of_quantum(&outcome.strategy).unwrap())
        .unwrap();
    for player in 0..3 {
        let report = npa_deviation_bound(&game, &outcome.strategy, player, 1e-7).unwrap();
        assert!(
            report.best_response_value >= 1.136 && report.best_response_value <= 1.141,
            "player {player}: {}",
            report.best_response_value
        );
        let gain = report.best_response_value - payoffs.get_f64(player);
        assert!(gain <= 2e-3, "player {player}: gain {gain}");
    }
}

/// The outcome-correlation bound is too loose to certify the Svetlichny
/// equilibrium; only the moment-matrix bound closes the gap.
#[test]
fn outcome_correlation_is_too_loose_on_the_full_game() {
    let game = catalog::game_full();
    let outcome = seesaw_optimize(&game, 20, 99).unwrap();
    let oc =
        advice_games::equilibrium::outcome_correlation_bound(&game, &outcome.strategy, 0).unwrap();
    assert!(
        oc.best_response_value > 1.139,
        "outcome-correlation bound {} unexpectedly certifies the equilibrium",
        oc.best_response_value
    );
}

/// Strong oracle: the deviator holds the purifying qubit of the fixed
/// pair's state, so the relaxation is tight and its optimum must coincide
/// with the closed-form eigenvalue best response — on any game, any
/// strategy.
#[test]
fn sdp_bound_matches_the_eigenvalue_best_response_on_random_games() {
    use advice_games::game_model::{rat, Game};
    use advice_games::linalg::C64;
    use advice_games::quantum::StateVector;

    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let bits = || vec![vec!["0".to_string(), "1".to_string()]; 3];
    for case in 0..8 {
        let payoffs: Vec<Vec<Vec<_>>> = (0..8)
            .map(|_| {
                (0..8)
                    .map(|_| (0..3).map(|_| rat(rng.gen_range(0..12), 4)).collect())
                    .collect()
            })
            .collect();
        let mut weights: Vec<i64> = (0..8).map(|_| rng.gen_range(0..5)).collect();
        if weights.iter().all(|&w| w == 0) {
            weights[0] = 1;
        }
        let total: i64 = weights.iter().sum();
        let prior = weights.iter().map(|&w| rat(w, total)).collect();
        let game = Game::new(
            vec!["A".into(), "B".into(), "C".into()],
            bits(),
            bits(),
            prior,
            payoffs,
        )
        .unwrap();

        let state = if case % 3 == 0 {
            ghz_state()
        } else {
            let mut amps: Vec<C64> = (0..8)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in amps.iter_mut() {
                *a /= norm;
            }
            StateVector::new(amps).unwrap()
        };
        let measurements: Vec<Vec<BinaryMeasurement>> = (0..3)
            .map(|_| {
                (0..2)
                    .map(|_| {
                        bloch_measurement(
                            rng.gen_range(0.0..std::f64::consts::PI),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect()
            })
            .collect();
        let qs = QuantumStrategy::new(state, measurements).unwrap();

        for player in 0..3 {
            let npa = npa_deviation_bound(&game, &qs, player, 1e-7).unwrap();
            let exact = exact_best_response_value(&game, &qs, player).unwrap();
            let diff = npa.best_response_value - exact.best_response_value;
            assert!(
                diff.abs() <= 5e-6,
                "case {case} player {player}: npa {} vs exact {}",
                npa.best_response_value,
                exact.best_response_value
            );
        }
    }
}

#[test]
fn reconstructed_moment_matrix_is_consistent() {
    let game = catalog::game_promised();
    let qs = ghz_game_strategy();
    let built = DeviationSdp::build(&game, &qs, 0).unwrap();
    let solution = solve_sdp(&built.problem, 1e-7).unwrap();
    let gamma = built.reconstruct_moments(&solution);
    // Hermitian, unit normalization, fixed pair block intact.
    assert!((gamma[0].re - 1.0).abs() < 1e-9);
    let mm = MomentMatrix::build(&game, &qs, 0).unwrap();
    for l in 0..16 {
        for m in 0..16 {
            let fixed = mm.honest_entry(4 + l, 4 + m);
            let got = gamma[(5 + l) * 21 + (5 + m)];
            assert!((fixed - got).norm() < 1e-9);
        }
    }
    for i in 0..21 {
        for j in 0..21 {
            let defect = (gamma[i * 21 + j] - gamma[j * 21 + i].conj()).norm();
            assert!(defect < 1e-7, "hermitian defect {defect} at ({i},{j})");
        }
    }
}
