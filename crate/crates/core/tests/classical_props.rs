//! Classical-path properties: exhaustive oracles, equilibrium re-checks, and
//! exact-arithmetic invariants.

use advice_games::catalog;
use advice_games::classical::{
    behavior_of_correlated, behavior_of_mixed, classical_social_optimum, is_correlated_equilibrium,
    payoff_polytope_vertices, pure_nash_equilibria, pure_profile_payoffs, CorrelatedStrategy,
    MixedStrategy, PureProfile,
};
use advice_games::game_model::{
    joint_index, joint_tuple, rat, svetlichny_value, Behavior, Game, PayoffVector, Rational,
};
use num_traits::Zero;
use proptest::prelude::*;

/// Independent oracle: loops over every deterministic assignment
/// `y_i = f_i(x_i)` without going through the library's profile enumeration,
/// and evaluates the GHZ win condition directly.
fn ghz_best_classical_win_probability_oracle() -> Rational {
    let mut best = Rational::zero();
    // Each player's strategy is two output bits (for inputs 0 and 1).
    for a in 0..4u32 {
        for b in 0..4u32 {
            for c in 0..4u32 {
                let mut wins = 0u32;
                for (xa, xb, xc) in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)] {
                    let ya = a >> xa & 1;
                    let yb = b >> xb & 1;
                    let yc = c >> xc & 1;
                    let want = u32::from((xa, xb, xc) != (0, 0, 0));
                    if ya ^ yb ^ yc == want {
                        wins += 1;
                    }
                }
                let p = rat(wins as i64, 4);
                if p > best {
                    best = p;
                }
            }
        }
    }
    best
}

#[test]
fn ghz_game_classical_value_is_three_quarters() {
    // Frozen from the independent enumeration oracle above.
    let oracle = ghz_best_classical_win_probability_oracle();
    assert_eq!(oracle, rat(3, 4));

    // The library's social optimum sees the same number through payoffs:
    // all three players earn the win probability.
    let (optimum, _) = classical_social_optimum(&catalog::ghz_game());
    assert_eq!(optimum, rat(9, 4));
}

#[test]
fn social_optima_of_the_conflicting_games_are_three() {
    for game in [catalog::game_promised(), catalog::game_full()] {
        let (optimum, argmax) = classical_social_optimum(&game);
        assert_eq!(optimum, rat(3, 1));
        assert!(!argmax.is_empty());
        for profile in &argmax {
            let total: Rational = pure_profile_payoffs(&game, profile).iter().sum();
            assert_eq!(total, rat(3, 1));
        }
    }
}

fn equilibrium_payoff_triples(game: &Game) -> Vec<Vec<Rational>> {
    pure_nash_equilibria(game)
        .into_iter()
        .map(|(_, p)| match p {
            PayoffVector::Exact(v) => v,
            PayoffVector::Real(_) => unreachable!("classical path is exact"),
        })
        .collect()
}

#[test]
fn promised_game_equilibria_include_the_conflicting_triples() {
    let game = catalog::game_promised();
    let triples = equilibrium_payoff_triples(&game);
    let expected = [
        vec![rat(13, 12), rat(5, 6), rat(13, 12)],
        vec![rat(13, 12), rat(13, 12), rat(5, 6)],
        vec![rat(5, 6), rat(13, 12), rat(13, 12)],
    ];
    for want in &expected {
        assert!(triples.contains(want), "missing {want:?}");
    }
    // Conflicting interests: no equilibrium weakly dominates all three
    // listed triples (componentwise it would need every payoff >= 13/12).
    for triple in &triples {
        let dominates_all = expected
            .iter()
            .all(|want| triple.iter().zip(want).all(|(have, min)| have >= min));
        assert!(!dominates_all, "{triple:?} dominates every preference");
    }
}

#[test]
fn full_game_equilibria_include_the_conflicting_triples() {
    let game = catalog::game_full();
    let triples = equilibrium_payoff_triples(&game);
    let expected = [
        vec![rat(7, 6), rat(11, 12), rat(11, 12)],
        vec![rat(11, 12), rat(7, 6), rat(11, 12)],
        vec![rat(11, 12), rat(11, 12), rat(7, 6)],
    ];
    for want in &expected {
        assert!(triples.contains(want), "missing {want:?}");
    }
    for triple in &triples {
        let dominates_all = expected
            .iter()
            .all(|want| triple.iter().zip(want).all(|(have, min)| have >= min));
        assert!(!dominates_all, "{triple:?} dominates every preference");
    }
}

/// Oracle re-check: every reported equilibrium withstands an independent
/// deviation loop that swaps single outputs rather than whole strategies.
#[test]
fn reported_equilibria_survive_pointwise_re_verification() {
    for game in [
        catalog::ghz_game(),
        catalog::game_promised(),
        catalog::game_full(),
    ] {
        let equilibria = pure_nash_equilibria(&game);
        assert!(!equilibria.is_empty());
        for (profile, payoffs) in &equilibria {
            let payoffs = match payoffs {
                PayoffVector::Exact(v) => v.clone(),
                PayoffVector::Real(_) => unreachable!(),
            };
            for player in 0..3 {
                for input in 0..2 {
                    for new_output in 0..2 {
                        let mut maps: Vec<Vec<usize>> =
                            profile.players().iter().map(|s| s.map().to_vec()).collect();
                        if maps[player][input] == new_output {
                            continue;
                        }
                        maps[player][input] = new_output;
                        let deviated = PureProfile::new(
                            maps.into_iter()
                                .map(advice_games::classical::PureStrategy::new)
                                .collect(),
                        );
                        let new_payoffs = pure_profile_payoffs(&game, &deviated);
                        assert!(
                            new_payoffs[player] <= payoffs[player],
                            "profitable deviation for player {player}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn social_optimum_equals_max_vertex_sum() {
    for game in [
        catalog::ghz_game(),
        catalog::game_promised(),
        catalog::game_full(),
    ] {
        let (optimum, _) = classical_social_optimum(&game);
        let best_vertex_sum = payoff_polytope_vertices(&game)
            .into_iter()
            .map(|v| match v {
                PayoffVector::Exact(v) => v.iter().sum::<Rational>(),
                PayoffVector::Real(_) => unreachable!(),
            })
            .max()
            .unwrap();
        assert_eq!(optimum, best_vertex_sum);
    }
}

#[test]
fn promised_game_polytope_facts() {
    let game = catalog::game_promised();
    let vertices = payoff_polytope_vertices(&game);
    let all_zero_point = vec![rat(1, 3), rat(1, 3), rat(1, 3)];
    let mut found = false;
    for v in &vertices {
        let PayoffVector::Exact(v) = v else {
            unreachable!()
        };
        if *v == all_zero_point {
            found = true;
        }
        assert!(v.iter().sum::<Rational>() <= rat(3, 1));
    }
    assert!(found, "all-zero-outputs payoff point missing");
}

/// Mixes the social-optimal profiles with uniform shared advice; the total
/// payoff stays at the optimum because it is linear over the hull.
#[test]
fn correlated_mixture_of_maximizers_reaches_total_three() {
    let game = catalog::game_promised();
    let (_, argmax) = classical_social_optimum(&game);
    let picks: Vec<&PureProfile> = argmax.iter().cycle().take(4).collect();
    let advice = vec![vec!["0".into(), "1".into(), "2".into(), "3".into()]; 3];
    // Advice is a shared symbol in {0..4}: mass 1/4 on each aligned triple.
    let mut dist = vec![rat(0, 1); 64];
    for k in 0..4 {
        dist[joint_index(&[4, 4, 4], &[k, k, k])] = rat(1, 4);
    }
    let responses: Vec<Vec<Vec<usize>>> = (0..3)
        .map(|player| {
            (0..2)
                .map(|input| {
                    (0..4)
                        .map(|k| picks[k].player(player).output(input))
                        .collect()
                })
                .collect()
        })
        .collect();
    let cs = CorrelatedStrategy::new(advice, dist, responses).unwrap();
    let behavior = behavior_of_correlated(&game, &cs).unwrap();
    let total = game.total_average_payoff(&behavior).unwrap();
    assert_eq!(total, advice_games::game_model::Num::Exact(rat(3, 1)));
}

/// Independent oracle for the correlated-equilibrium check: enumerate every
/// full alternative response map of each player and compare against the
/// pointwise-swap report.
#[test]
fn shared_bit_copycat_check_matches_full_map_oracle() {
    let game = catalog::game_promised();
    let advice = vec![vec!["0".to_string(), "1".to_string()]; 3];
    let mut dist = vec![rat(0, 1); 8];
    dist[0] = rat(1, 2);
    dist[7] = rat(1, 2);
    let responses = vec![vec![vec![0, 1], vec![0, 1]]; 3];
    let cs = CorrelatedStrategy::new(advice.clone(), dist.clone(), responses.clone()).unwrap();

    let report = is_correlated_equilibrium(&game, &cs).unwrap();

    // Full-map oracle for one player: every map (input, advice) -> output.
    let mut oracle_best = rat(0, 1) - rat(1, 1); // sentinel below any gain
    let base_payoffs = {
        let b = behavior_of_correlated(&game, &cs).unwrap();
        match game.average_payoffs(&b).unwrap() {
            PayoffVector::Exact(v) => v,
            _ => unreachable!(),
        }
    };
    for player in 0..3 {
        for code in 0..16u32 {
            // Bits of `code` pick the output for each (input, advice) cell.
            let alt: Vec<Vec<usize>> = (0..2)
                .map(|input| {
                    (0..2)
                        .map(|advice_sym| (code >> (2 * input + advice_sym) & 1) as usize)
                        .collect()
                })
                .collect();
            let mut responses_alt = responses.clone();
            responses_alt[player] = alt;
            let cs_alt =
                CorrelatedStrategy::new(advice.clone(), dist.clone(), responses_alt).unwrap();
            let b = behavior_of_correlated(&game, &cs_alt).unwrap();
            let payoffs = match game.average_payoffs(&b).unwrap() {
                PayoffVector::Exact(v) => v,
                _ => unreachable!(),
            };
            let gain = &payoffs[player] - &base_payoffs[player];
            if gain > oracle_best {
                oracle_best = gain;
            }
        }
    }

    // The copycat strategy is not an equilibrium of this game, and both
    // routes must agree on the verdict. A full map can stack several
    // profitable swaps, so its best gain weakly dominates the single-swap
    // maximum the report carries.
    assert!(oracle_best > rat(0, 1));
    assert!(!report.is_equilibrium);
    assert!(report.max_gain > rat(0, 1));
    assert!(oracle_best >= report.max_gain);

    // Replaying the witness as a one-cell swap reproduces the reported gain.
    let witness = report.witness.clone().expect("positive gain has a witness");
    let mut responses_w = responses.clone();
    responses_w[witness.player][witness.input][witness.advice] = witness.new_output;
    let cs_w = CorrelatedStrategy::new(advice, dist, responses_w).unwrap();
    let b = behavior_of_correlated(&game, &cs_w).unwrap();
    let payoffs = match game.average_payoffs(&b).unwrap() {
        PayoffVector::Exact(v) => v,
        _ => unreachable!(),
    };
    let achieved = &payoffs[witness.player] - &base_payoffs[witness.player];
    assert_eq!(achieved, report.max_gain);
}

// ---------------------------------------------------------------------------
// Property tests
// ---------------------------------------------------------------------------

fn arb_rational_row(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0u32..6, len).prop_map(move |weights| {
        let mut weights = weights;
        if weights.iter().all(|&w| w == 0) {
            weights[0] = 1;
        }
        let total: u32 = weights.iter().sum();
        weights
            .into_iter()
            .map(|w| rat(w as i64, total as i64))
            .collect()
    })
}

fn arb_behavior() -> impl Strategy<Value = Behavior> {
    prop::collection::vec(arb_rational_row(8), 8)
        .prop_map(|rows| Behavior::from_exact(vec![2; 3], vec![2; 3], rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Payoffs are linear in the behavior: mixing behaviors mixes payoffs.
    #[test]
    fn average_payoffs_is_linear_at_one_third(a in arb_behavior(), b in arb_behavior()) {
        let game = catalog::game_full();
        let lambda = rat(1, 3);
        let mixed = Behavior::mix(&lambda, &a, &b).unwrap();
        let fa = match game.average_payoffs(&a).unwrap() {
            PayoffVector::Exact(v) => v,
            _ => unreachable!(),
        };
        let fb = match game.average_payoffs(&b).unwrap() {
            PayoffVector::Exact(v) => v,
            _ => unreachable!(),
        };
        let fm = match game.average_payoffs(&mixed).unwrap() {
            PayoffVector::Exact(v) => v,
            _ => unreachable!(),
        };
        for i in 0..3 {
            let expected = &lambda * &fa[i] + (rat(1, 1) - &lambda) * &fb[i];
            prop_assert_eq!(&fm[i], &expected);
        }
    }

    /// Correlators stay in [-1, 1] and the Svetlichny expression in [-8, 8]
    /// for every normalized behavior.
    #[test]
    fn bell_functionals_respect_their_ranges(b in arb_behavior()) {
        for x in 0..8 {
            let e = advice_games::game_model::correlator(&b, x).unwrap().to_f64();
            prop_assert!((-1.0..=1.0).contains(&e));
        }
        let s = svetlichny_value(&b).unwrap().to_f64();
        prop_assert!((-8.0..=8.0).contains(&s));
    }

    /// The total payoff of the full game is an affine function of the
    /// Svetlichny expression: F_total = 2 + S/4, exactly.
    #[test]
    fn full_game_total_is_two_plus_quarter_svetlichny(b in arb_behavior()) {
        let game = catalog::game_full();
        let total = match game.total_average_payoff(&b).unwrap() {
            advice_games::game_model::Num::Exact(v) => v,
            _ => unreachable!(),
        };
        let s = match svetlichny_value(&b).unwrap() {
            advice_games::game_model::Num::Exact(v) => v,
            _ => unreachable!(),
        };
        prop_assert_eq!(total, rat(2, 1) + rat(1, 4) * s);
    }

    /// Exact evaluation agrees with double-precision evaluation.
    #[test]
    fn rational_and_real_paths_agree(b in arb_behavior()) {
        for game in [catalog::game_promised(), catalog::game_full()] {
            let exact = game.average_payoffs(&b).unwrap().to_f64_vec();
            let real = game.average_payoffs(&b.to_real()).unwrap().to_f64_vec();
            for (e, r) in exact.iter().zip(&real) {
                prop_assert!((e - r).abs() <= 1e-12);
            }
        }
    }

    /// Mixed-strategy behaviors factorize into their own single-player
    /// marginals, exactly, and therefore pass the no-signalling check with a
    /// violation of exactly zero.
    #[test]
    fn mixed_behaviors_equal_their_marginal_products(
        tables in prop::collection::vec(prop::collection::vec(arb_rational_row(2), 2), 3)
    ) {
        let game = catalog::game_full();
        let profile: Vec<MixedStrategy> = tables
            .into_iter()
            .map(|t| MixedStrategy::new(t).unwrap())
            .collect();
        let behavior = behavior_of_mixed(&game, &profile).unwrap();
        let ns = advice_games::game_model::check_no_signalling(&behavior, 0.0);
        prop_assert!(ns.pass && ns.worst_violation == 0.0);
        for x in 0..8 {
            let xt = joint_tuple(&[2, 2, 2], x);
            let row = behavior.row_exact(x).unwrap();
            // Single-player marginals of the row itself.
            let mut marginals = vec![[Rational::zero(), Rational::zero()]; 3];
            for (y, p) in row.iter().enumerate() {
                let yt = joint_tuple(&[2, 2, 2], y);
                for i in 0..3 {
                    marginals[i][yt[i]] += p;
                }
            }
            for (y, p) in row.iter().enumerate() {
                let yt = joint_tuple(&[2, 2, 2], y);
                let product = (0..3).map(|i| marginals[i][yt[i]].clone())
                    .fold(rat(1, 1), |acc, m| acc * m);
                prop_assert_eq!(p.clone(), product, "x={} y={}", xt.iter().map(|v| v.to_string()).collect::<String>(), y);
            }
        }
    }
}
