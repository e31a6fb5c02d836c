//! Bell functionals over behavior tables: parity correlators, the Svetlichny
//! expression, and the GHZ winning probability.

use num_traits::Zero;

use super::{joint_index, joint_tuple, rat, Behavior, Num, Rational};
use crate::{Error, Result};

fn require_binary_outputs(behavior: &Behavior) -> Result<()> {
    if behavior.output_sizes().iter().any(|&s| s != 2) {
        return Err(Error::Domain(
            "correlators require binary outputs for every player".into(),
        ));
    }
    Ok(())
}

fn parity(tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &b| acc ^ (b & 1))
}

/// Parity correlator `E(x) = 2·Σ_{⊕y=0} P(y|x) − 1` of one joint input.
///
/// Requires binary outputs; the value lies in `[-1, 1]`.
pub fn correlator(behavior: &Behavior, joint_input: usize) -> Result<Num> {
    require_binary_outputs(behavior)?;
    let out_sizes = behavior.output_sizes().to_vec();
    match behavior.representation() {
        super::Representation::Exact => {
            let row = behavior.row_exact(joint_input)?;
            let mut even = Rational::zero();
            for (y, p) in row.iter().enumerate() {
                if parity(&joint_tuple(&out_sizes, y)) == 0 {
                    even += p;
                }
            }
            Ok(Num::Exact(rat(2, 1) * even - rat(1, 1)))
        }
        super::Representation::Real => {
            let row = behavior.row_f64(joint_input)?;
            let even: f64 = row
                .iter()
                .enumerate()
                .filter(|(y, _)| parity(&joint_tuple(&out_sizes, *y)) == 0)
                .map(|(_, p)| p)
                .sum();
            Ok(Num::Real(2.0 * even - 1.0))
        }
    }
}

/// The Svetlichny expression
/// `S = E(000)+E(100)+E(010)+E(001) − E(111)−E(011)−E(101)−E(110)`.
///
/// Requires three players with binary inputs and outputs. Local models give
/// `|S| ≤ 4`; quantum strategies reach `4√2 ≈ 5.657`.
pub fn svetlichny_value(behavior: &Behavior) -> Result<Num> {
    if behavior.player_count() != 3 || behavior.input_sizes().iter().any(|&s| s != 2) {
        return Err(Error::Domain(
            "the Svetlichny expression needs three players with binary inputs".into(),
        ));
    }
    require_binary_outputs(behavior)?;
    let input_sizes = behavior.input_sizes().to_vec();
    let mut exact_total: Option<Rational> = Some(Rational::zero());
    let mut real_total = 0.0_f64;
    for x in 0..behavior.joint_input_count() {
        let tuple = joint_tuple(&input_sizes, x);
        // Inputs of Hamming weight 0 or 1 enter positively, the rest negatively.
        let weight: usize = tuple.iter().sum();
        let sign = if weight <= 1 { 1 } else { -1 };
        match correlator(behavior, x)? {
            Num::Exact(e) => {
                if let Some(total) = exact_total.as_mut() {
                    *total += rat(sign, 1) * e;
                }
            }
            Num::Real(e) => {
                exact_total = None;
                real_total += sign as f64 * e;
            }
        }
    }
    Ok(match exact_total {
        Some(total) => Num::Exact(total),
        None => Num::Real(real_total),
    })
}

/// Winning probability of the GHZ game: the promise is `⊕x = 0`, the prior is
/// uniform on `{000, 011, 101, 110}`, and a round is won when
/// `⊕y = x_A ∨ x_B ∨ x_C`.
pub fn ghz_winning_probability(behavior: &Behavior) -> Result<Num> {
    if behavior.player_count() != 3 || behavior.input_sizes().iter().any(|&s| s != 2) {
        return Err(Error::Domain(
            "the GHZ game needs three players with binary inputs".into(),
        ));
    }
    require_binary_outputs(behavior)?;
    let input_sizes = behavior.input_sizes().to_vec();
    let out_sizes = behavior.output_sizes().to_vec();
    let support: [[usize; 3]; 4] = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]];

    let mut exact_total: Option<Rational> = Some(Rational::zero());
    let mut real_total = 0.0_f64;
    for tuple in support {
        let x = joint_index(&input_sizes, &tuple);
        if !behavior.has_row(x) {
            return Err(Error::MissingBehaviorEntry {
                input: format!("{}{}{}", tuple[0], tuple[1], tuple[2]),
            });
        }
        let winning_parity = usize::from(tuple != [0, 0, 0]);
        match behavior.representation() {
            super::Representation::Exact => {
                let row = behavior.row_exact(x)?;
                let mut win = Rational::zero();
                for (y, p) in row.iter().enumerate() {
                    if parity(&joint_tuple(&out_sizes, y)) == winning_parity {
                        win += p;
                    }
                }
                if let Some(total) = exact_total.as_mut() {
                    *total += rat(1, 4) * win;
                }
            }
            super::Representation::Real => {
                let row = behavior.row_f64(x)?;
                let win: f64 = row
                    .iter()
                    .enumerate()
                    .filter(|(y, _)| parity(&joint_tuple(&out_sizes, *y)) == winning_parity)
                    .map(|(_, p)| p)
                    .sum();
                exact_total = None;
                real_total += 0.25 * win;
            }
        }
    }
    Ok(match exact_total {
        Some(total) => Num::Exact(total),
        None => Num::Real(real_total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_model::Behavior;

    fn point_mass_behavior(output: usize) -> Behavior {
        let mut rows = Vec::new();
        for _ in 0..8 {
            let mut row = vec![rat(0, 1); 8];
            row[output] = rat(1, 1);
            rows.push(row);
        }
        Behavior::from_exact(vec![2; 3], vec![2; 3], rows).unwrap()
    }

    #[test]
    fn all_zero_outputs_have_unit_correlator() {
        let b = point_mass_behavior(0);
        for x in 0..8 {
            assert_eq!(correlator(&b, x).unwrap(), Num::Exact(rat(1, 1)));
        }
    }

    #[test]
    fn uniform_behavior_has_zero_correlator_and_svetlichny() {
        let b = Behavior::uniform(vec![2; 3], vec![2; 3]);
        for x in 0..8 {
            assert_eq!(correlator(&b, x).unwrap(), Num::Exact(rat(0, 1)));
        }
        assert_eq!(svetlichny_value(&b).unwrap(), Num::Exact(rat(0, 1)));
        assert_eq!(ghz_winning_probability(&b).unwrap(), Num::Exact(rat(1, 2)));
    }

    #[test]
    fn deterministic_behaviors_respect_classical_svetlichny_bound() {
        for output in 0..8 {
            let s = svetlichny_value(&point_mass_behavior(output)).unwrap();
            assert!(s.to_f64().abs() <= 4.0 + 1e-12);
        }
    }

    #[test]
    fn non_binary_outputs_are_rejected() {
        let b = Behavior::uniform(vec![2, 2], vec![2, 3]);
        assert!(correlator(&b, 0).is_err());
    }

    #[test]
    fn ghz_strategy_correlator_is_minus_one_on_conflict_inputs() {
        let b = crate::quantum::behavior_of_quantum(&crate::quantum::ghz_game_strategy()).unwrap();
        // x = 011: all mass on odd parity.
        match correlator(&b, 3).unwrap() {
            Num::Real(e) => assert!((e + 1.0).abs() < 1e-12),
            Num::Exact(_) => unreachable!("quantum behaviors are real-valued"),
        }
        // x = 000: all mass on even parity.
        assert!((correlator(&b, 0).unwrap().to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_behavior_earns_total_two_on_the_full_game() {
        let game = crate::catalog::game_full();
        let b = Behavior::uniform(vec![2; 3], vec![2; 3]);
        assert_eq!(
            game.total_average_payoff(&b).unwrap(),
            Num::Exact(rat(2, 1))
        );
    }
}
