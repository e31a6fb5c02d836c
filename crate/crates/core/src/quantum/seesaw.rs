//! Seesaw optimization of the total payoff.
//!
//! Starting from random projective measurements, players take turns replacing
//! their measurement family with the exact best response to the sum of all
//! payoffs, holding the shared state and everyone else fixed. Each update is
//! an eigenvalue problem, so the total payoff never decreases; the sweep
//! stops once the improvement falls below the tolerance. Random restarts
//! guard against local optima, and restart `k` draws from a generator seeded
//! with `seed + k`, so runs are reproducible and restarts are independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{best_response_from_operators, local_operators_weighted, PayoffSelector};
use crate::game_model::{rational_to_f64, Game};
use crate::linalg::{CMat, C64};
use crate::quantum::{
    behavior_of_quantum, bell_phi_plus, bloch_measurement, ghz_state, BinaryMeasurement,
    QuantumStrategy, StateVector,
};
use crate::{Error, Result};

/// Knobs for [`seesaw_optimize_with`].
#[derive(Debug, Clone)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Also re-optimize the shared state by power iteration on the total
    /// payoff operator after each measurement sweep. Off by default: the
    /// shipped games have their optima on the fixed advice state.
    pub optimize_state: bool,
    pub max_sweeps: usize,
    /// Stop a restart once one full sweep improves the total by less than
    /// this.
    pub improvement_tol: f64,
}

impl SeesawOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        SeesawOptions {
            restarts,
            seed,
            optimize_state: false,
            max_sweeps: 500,
            improvement_tol: 1e-10,
        }
    }
}

/// Result of a seesaw run: the best strategy over all restarts.
#[derive(Debug, Clone)]
pub struct SeesawOutcome {
    pub strategy: QuantumStrategy,
    pub total_payoff: f64,
    /// Index of the restart that produced the winner (ties keep the earliest).
    pub best_restart: usize,
    /// Sweeps the winning restart used.
    pub sweeps: usize,
}

/// Seesaw with default options; see [`seesaw_optimize_with`].
pub fn seesaw_optimize(game: &Game, restarts: usize, seed: u64) -> Result<SeesawOutcome> {
    seesaw_optimize_with(game, &SeesawOptions::new(restarts, seed))
}

/// Finds a total-payoff-maximizing quantum strategy by alternating exact
/// single-player best responses.
///
/// Supports binary inputs/outputs with one qubit per player (two or three
/// players). The shared state starts at the GHZ state (three players) or the
/// maximally entangled pair (two players).
pub fn seesaw_optimize_with(game: &Game, options: &SeesawOptions) -> Result<SeesawOutcome> {
    if options.restarts < 1 {
        return Err(Error::Domain("seesaw needs at least one restart".into()));
    }
    if !game.is_binary() {
        return Err(Error::Unsupported(
            "seesaw covers binary inputs and outputs only".into(),
        ));
    }
    let n = game.player_count();
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(
            "seesaw covers two- or three-player games".into(),
        ));
    }

    let mut best: Option<SeesawOutcome> = None;
    for restart in 0..options.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(restart as u64));
        let state = if n == 3 { ghz_state() } else { bell_phi_plus() };
        let measurements: Vec<Vec<BinaryMeasurement>> = (0..n)
            .map(|_| {
                (0..2)
                    .map(|_| {
                        let phi = rng.gen_range(0.0..std::f64::consts::PI);
                        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                        bloch_measurement(phi, theta)
                    })
                    .collect()
            })
            .collect();
        let mut qs = QuantumStrategy::new(state, measurements)?;
        let mut total = total_payoff(game, &qs)?;
        let mut sweeps = 0;

        for _ in 0..options.max_sweeps {
            sweeps += 1;
            for player in 0..n {
                let ops = local_operators_weighted(game, &qs, player, PayoffSelector::Total)?;
                let (_, family) = best_response_from_operators(&ops);
                qs = qs.with_player_measurements(player, family)?;
            }
            if options.optimize_state {
                qs = optimize_state(game, &qs)?;
            }
            let new_total = total_payoff(game, &qs)?;
            let improvement = new_total - total;
            total = new_total;
            if improvement < options.improvement_tol {
                break;
            }
        }

        let better = match &best {
            None => true,
            Some(b) => total > b.total_payoff,
        };
        if better {
            best = Some(SeesawOutcome {
                strategy: qs,
                total_payoff: total,
                best_restart: restart,
                sweeps,
            });
        }
    }
    Ok(best.expect("at least one restart ran"))
}

fn total_payoff(game: &Game, qs: &QuantumStrategy) -> Result<f64> {
    let behavior = behavior_of_quantum(qs)?;
    Ok(game.total_average_payoff(&behavior)?.to_f64())
}

/// Replaces the shared state with the dominant eigenvector of the total
/// payoff operator, found by shifted power iteration.
fn optimize_state(game: &Game, qs: &QuantumStrategy) -> Result<QuantumStrategy> {
    let n = game.player_count();
    let dim = 1usize << n;
    let in_sizes = game.input_sizes();
    let mut payoff_op = CMat::zeros(dim);
    for x in game.support() {
        let px = rational_to_f64(game.prior(x));
        let xt = crate::game_model::joint_tuple(&in_sizes, x);
        for y in 0..dim {
            let value = rational_to_f64(&game.total_payoff(x, y));
            if value == 0.0 {
                continue;
            }
            let mut op = qs.measurement(0, xt[0]).outcome(y >> (n - 1) & 1).clone();
            for player in 1..n {
                let bit = y >> (n - 1 - player) & 1;
                op = op.kron(qs.measurement(player, xt[player]).outcome(bit));
            }
            payoff_op = payoff_op.add(&op.scale(C64::new(px * value, 0.0)));
        }
    }
    // Shift so the dominant eigenvalue is the largest one even if payoffs can
    // be negative.
    let shift: f64 = (0..dim).map(|i| payoff_op[(i, i)].norm()).sum::<f64>() + 1.0;
    let shifted = payoff_op.add(&CMat::identity(dim).scale(C64::new(shift, 0.0)));

    let mut v: Vec<C64> = qs.state().amplitudes().to_vec();
    for _ in 0..200 {
        let w = shifted.mul_vec(&v);
        let norm = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v = w.into_iter().map(|a| a / norm).collect();
    }
    QuantumStrategy::new(StateVector::new(v)?, qs.measurements().to_vec())
}
