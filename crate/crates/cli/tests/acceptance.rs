//! Acceptance suite: the headline results the toolkit must reproduce, one
//! test per criterion, each printing a pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use advice_games::catalog;
use advice_games::classical::{
    behavior_of_pure, classical_social_optimum, enumerate_pure_profiles, pure_nash_equilibria,
};
use advice_games::equilibrium::{
    exact_best_response_value, outcome_correlation_bound, verify_quantum_equilibrium, BoundMethod,
};
use advice_games::game_model::{
    check_no_signalling, ghz_winning_probability, rat, svetlichny_value, Behavior, Num,
    PayoffVector, Rational,
};
use advice_games::npa::npa_deviation_bound;
use advice_games::quantum::{
    behavior_of_quantum, bloch_measurement, ghz_game_strategy, ghz_state, seesaw_optimize,
    BinaryMeasurement, QuantumStrategy,
};
use advice_games_cli::gamefile;
use advice_games_cli::sim::simulate_behavior;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn criterion(number: u32, description: &str, check: impl FnOnce() + std::panic::UnwindSafe) {
    match std::panic::catch_unwind(check) {
        Ok(()) => println!("acceptance {number:02} PASS: {description}"),
        Err(cause) => {
            println!("acceptance {number:02} FAIL: {description}");
            std::panic::resume_unwind(cause);
        }
    }
}

fn ghz_win_probability_of_profile(
    game: &advice_games::game_model::Game,
    profile: &advice_games::classical::PureProfile,
) -> Rational {
    let behavior = behavior_of_pure(game, profile).unwrap();
    match ghz_winning_probability(&behavior).unwrap() {
        Num::Exact(p) => p,
        Num::Real(_) => unreachable!(),
    }
}

#[test]
fn acceptance_01_ghz_game_values() {
    criterion(
        1,
        "GHZ game: quantum strategy wins with certainty, best classical profile wins 3/4",
        || {
            let game = catalog::ghz_game();
            let quantum = behavior_of_quantum(&ghz_game_strategy()).unwrap();
            let win = ghz_winning_probability(&quantum).unwrap().to_f64();
            assert!((win - 1.0).abs() <= 1e-9, "quantum win {win}");

            let profiles = enumerate_pure_profiles(&game);
            assert_eq!(profiles.len(), 64);
            let best = profiles
                .iter()
                .map(|p| ghz_win_probability_of_profile(&game, p))
                .max()
                .unwrap();
            assert_eq!(best, rat(3, 4), "best classical profile");
        },
    );
}

#[test]
fn acceptance_02_promised_game_classical_structure() {
    criterion(
        2,
        "promised game: social optimum 3, the three conflicting equilibrium triples, no common favorite",
        || {
            let game = catalog::game_promised();
            let (optimum, _) = classical_social_optimum(&game);
            assert_eq!(optimum, rat(3, 1));

            let triples: Vec<Vec<Rational>> = pure_nash_equilibria(&game)
                .into_iter()
                .map(|(_, p)| match p {
                    PayoffVector::Exact(v) => v,
                    _ => unreachable!(),
                })
                .collect();
            let expected = [
                vec![rat(13, 12), rat(5, 6), rat(13, 12)],
                vec![rat(13, 12), rat(13, 12), rat(5, 6)],
                vec![rat(5, 6), rat(13, 12), rat(13, 12)],
            ];
            for want in &expected {
                assert!(triples.contains(want), "missing {want:?}");
            }
            for triple in &triples {
                let dominates_all = expected
                    .iter()
                    .all(|want| triple.iter().zip(want).all(|(have, min)| have >= min));
                assert!(!dominates_all, "{triple:?} is weakly preferred by everyone");
            }
        },
    );
}

#[test]
fn acceptance_03_promised_game_ghz_strategy_payoffs() {
    criterion(
        3,
        "promised game: GHZ strategy earns (4/3, 4/3, 4/3), total 4, quarter masses on odd outputs",
        || {
            let game = catalog::game_promised();
            let behavior = behavior_of_quantum(&ghz_game_strategy()).unwrap();
            let payoffs = game.average_payoffs(&behavior).unwrap().to_f64_vec();
            for p in &payoffs {
                assert!((p - 4.0 / 3.0).abs() <= 1e-9, "payoff {p}");
            }
            let total = game.total_average_payoff(&behavior).unwrap().to_f64();
            assert!((total - 4.0).abs() <= 1e-9);

            // Promised inputs 011, 101, 110 are joint indices 3, 5, 6; the
            // mass sits on outputs 100, 010, 001, 111 (indices 4, 2, 1, 7).
            for x in [3usize, 5, 6] {
                let row = behavior.row_f64(x).unwrap();
                for (y, &p) in row.iter().enumerate() {
                    let expected = if [4usize, 2, 1, 7].contains(&y) {
                        0.25
                    } else {
                        0.0
                    };
                    assert!((p - expected).abs() <= 1e-9, "x={x} y={y} p={p}");
                }
            }
        },
    );
}

#[test]
fn acceptance_04_promised_game_equilibrium_bounds() {
    criterion(
        4,
        "promised game: outcome-correlation bound and exact best response are both 4/3 per player",
        || {
            let game = catalog::game_promised();
            let qs = ghz_game_strategy();
            for player in 0..3 {
                let oc = outcome_correlation_bound(&game, &qs, player).unwrap();
                assert!(
                    (oc.best_response_value - 4.0 / 3.0).abs() <= 1e-9,
                    "player {player} oc {}",
                    oc.best_response_value
                );
                let exact = exact_best_response_value(&game, &qs, player).unwrap();
                assert!(
                    (exact.best_response_value - 4.0 / 3.0).abs() <= 1e-9,
                    "player {player} exact {}",
                    exact.best_response_value
                );
                assert!(exact.gain().abs() <= 1e-9, "player {player} gain");
            }
        },
    );
}

#[test]
fn acceptance_05_full_game_classical_structure() {
    criterion(
        5,
        "full game: social optimum 3, |S| <= 4 on all 64 pure profiles, the (7/6, 11/12, 11/12) triples",
        || {
            let game = catalog::game_full();
            let (optimum, _) = classical_social_optimum(&game);
            assert_eq!(optimum, rat(3, 1));

            for profile in enumerate_pure_profiles(&game) {
                let behavior = behavior_of_pure(&game, &profile).unwrap();
                let s = match svetlichny_value(&behavior).unwrap() {
                    Num::Exact(s) => s,
                    _ => unreachable!(),
                };
                assert!(s >= rat(-4, 1) && s <= rat(4, 1), "profile with S = {s}");
            }

            let triples: Vec<Vec<Rational>> = pure_nash_equilibria(&game)
                .into_iter()
                .map(|(_, p)| match p {
                    PayoffVector::Exact(v) => v,
                    _ => unreachable!(),
                })
                .collect();
            for want in [
                vec![rat(7, 6), rat(11, 12), rat(11, 12)],
                vec![rat(11, 12), rat(7, 6), rat(11, 12)],
                vec![rat(11, 12), rat(11, 12), rat(7, 6)],
            ] {
                assert!(triples.contains(&want), "missing {want:?}");
            }
        },
    );
}

#[test]
fn acceptance_06_full_game_seesaw_reaches_svetlichny_optimum() {
    criterion(
        6,
        "full game: seesaw (50 restarts) reaches 2+sqrt(2) with fair payoffs and S = 4 sqrt(2)",
        || {
            let game = catalog::game_full();
            let outcome = seesaw_optimize(&game, 50, 2024).unwrap();
            assert!(
                outcome.total_payoff >= 2.0 + SQRT_2 - 1e-4,
                "total {}",
                outcome.total_payoff
            );
            let behavior = behavior_of_quantum(&outcome.strategy).unwrap();
            let payoffs = game.average_payoffs(&behavior).unwrap().to_f64_vec();
            for p in &payoffs {
                assert!((p - (2.0 + SQRT_2) / 3.0).abs() <= 1e-3, "payoff {p}");
            }
            let s = svetlichny_value(&behavior).unwrap().to_f64();
            assert!((s - 4.0 * SQRT_2).abs() <= 1e-3, "svetlichny {s}");
        },
    );
}

#[test]
fn acceptance_07_full_game_npa_equilibrium() {
    criterion(
        7,
        "full game: moment-matrix bound in [1.136, 1.141] at gap 1e-7; equilibrium at tol 2e-3",
        || {
            let game = catalog::game_full();
            let outcome = seesaw_optimize(&game, 50, 2024).unwrap();
            let qs = outcome.strategy;
            let behavior = behavior_of_quantum(&qs).unwrap();
            let payoffs = game.average_payoffs(&behavior).unwrap().to_f64_vec();

            for (player, payoff) in payoffs.iter().enumerate() {
                let npa = npa_deviation_bound(&game, &qs, player, 1e-7).unwrap();
                let bound = npa.best_response_value;
                assert!(
                    (1.136..=1.141).contains(&bound),
                    "player {player} bound {bound}"
                );
                assert!(npa.diagnostics.unwrap().duality_gap <= 1e-7);

                let exact = exact_best_response_value(&game, &qs, player).unwrap();
                assert!(
                    (exact.best_response_value - payoff).abs() <= 1e-6,
                    "player {player}: best response {} vs payoff {payoff}",
                    exact.best_response_value,
                );
            }

            let verdict =
                verify_quantum_equilibrium(&game, &qs, BoundMethod::NpaSdp, 2e-3).unwrap();
            assert!(verdict.is_equilibrium);
        },
    );
}

fn random_exact_behavior(rng: &mut ChaCha8Rng) -> Behavior {
    let rows: Vec<Vec<Rational>> = (0..8)
        .map(|_| {
            let weights: Vec<i64> = (0..8).map(|_| rng.gen_range(0..7)).collect();
            let total: i64 = weights.iter().sum::<i64>().max(1);
            let mut row: Vec<Rational> = weights.iter().map(|&w| rat(w, total)).collect();
            let missing = rat(1, 1) - row.iter().sum::<Rational>();
            row[0] += missing;
            row
        })
        .collect();
    Behavior::from_exact(vec![2; 3], vec![2; 3], rows).unwrap()
}

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
fn acceptance_08_total_payoff_svetlichny_identity() {
    criterion(
        8,
        "full game: F_total = 2 + S/4 over 100 random behaviors",
        || {
            let game = catalog::game_full();
            let mut rng = ChaCha8Rng::seed_from_u64(808);
            for _ in 0..100 {
                let behavior = random_exact_behavior(&mut rng);
                let total = game.total_average_payoff(&behavior).unwrap().to_f64();
                let s = svetlichny_value(&behavior).unwrap().to_f64();
                assert!((total - (2.0 + s / 4.0)).abs() <= 1e-9);
            }
        },
    );
}

#[test]
fn acceptance_09_property_suites() {
    criterion(
        9,
        "no-signalling fuzz, bound dominance, rational/real agreement, game-file round trips",
        || {
            // No-signalling for 100 random quantum strategies.
            let mut rng = ChaCha8Rng::seed_from_u64(909);
            for _ in 0..100 {
                let qs = random_strategy(&mut rng);
                let behavior = behavior_of_quantum(&qs).unwrap();
                assert!(check_no_signalling(&behavior, 1e-9).pass);
            }

            // Relaxation dominance on 20 random strategies.
            let game = catalog::game_full();
            for case in 0..20 {
                let qs = random_strategy(&mut rng);
                let player = case % 3;
                let exact = exact_best_response_value(&game, &qs, player).unwrap();
                let oc = outcome_correlation_bound(&game, &qs, player).unwrap();
                assert!(exact.best_response_value >= exact.current_payoff - 1e-9);
                assert!(oc.best_response_value >= exact.best_response_value - 1e-9);
            }

            // Rational vs real evaluation.
            for _ in 0..50 {
                let behavior = random_exact_behavior(&mut rng);
                let exact = game.average_payoffs(&behavior).unwrap().to_f64_vec();
                let real = game
                    .average_payoffs(&behavior.to_real())
                    .unwrap()
                    .to_f64_vec();
                for (e, r) in exact.iter().zip(&real) {
                    assert!((e - r).abs() <= 1e-12);
                }
            }

            // Game files round trip on the catalog.
            for entry in catalog::entries() {
                let text = gamefile::game_to_string(&entry.game);
                let reparsed = gamefile::parse_game_str(&text).unwrap();
                assert_eq!(reparsed, entry.game);
                assert_eq!(gamefile::game_to_string(&reparsed), text);
            }
        },
    );
}

#[test]
fn acceptance_10_simulation_statistics() {
    criterion(
        10,
        "promised game: 10^6 simulated rounds match 4/3 within four standard errors, ten seeds",
        || {
            let game = catalog::game_promised();
            let behavior = behavior_of_quantum(&ghz_game_strategy()).unwrap();
            for seed in 0..10u64 {
                let summary = simulate_behavior(&game, &behavior, 1_000_000, seed).unwrap();
                for (player, (&mean, &se)) in summary
                    .means
                    .iter()
                    .zip(&summary.standard_errors)
                    .enumerate()
                {
                    let gap = (mean - 4.0 / 3.0).abs();
                    assert!(
                        gap <= 4.0 * se,
                        "seed {seed} player {player}: mean {mean}, se {se}"
                    );
                }
            }
        },
    );
}
