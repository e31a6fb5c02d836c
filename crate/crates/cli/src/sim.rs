//! Monte Carlo round simulation: sample inputs from the prior, outputs from
//! the behavior, and accumulate empirical payoffs.

use advice_games::game_model::{rational_to_f64, Behavior, Game};
use advice_games::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Empirical payoff statistics of a simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub rounds: u64,
    pub seed: u64,
    /// Per-player empirical mean payoff.
    pub means: Vec<f64>,
    /// Per-player standard error of the mean.
    pub standard_errors: Vec<f64>,
    pub total_mean: f64,
}

/// Runs `rounds` independent rounds, deterministic given the seed.
pub fn simulate_behavior(
    game: &Game,
    behavior: &Behavior,
    rounds: u64,
    seed: u64,
) -> Result<SimulationSummary> {
    if rounds < 1 {
        return Err(Error::Domain("simulation needs at least one round".into()));
    }
    let n = game.player_count();
    let support = game.support();
    let prior_cdf: Vec<f64> = {
        let mut acc = 0.0;
        support
            .iter()
            .map(|&x| {
                acc += rational_to_f64(game.prior(x));
                acc
            })
            .collect()
    };
    // Per supported input: cumulative output distribution and payoff rows.
    let mut row_cdfs = Vec::with_capacity(support.len());
    for &x in &support {
        let row = behavior
            .row_f64(x)
            .map_err(|_| Error::MissingBehaviorEntry {
                input: game.input_label(x),
            })?;
        let mut acc = 0.0;
        let cdf: Vec<f64> = row
            .iter()
            .map(|p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        row_cdfs.push(cdf);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = vec![0.0f64; n];
    let mut sq_sums = vec![0.0f64; n];
    for _ in 0..rounds {
        let ux: f64 = rng.gen();
        let k = prior_cdf
            .partition_point(|&c| c < ux)
            .min(support.len() - 1);
        let x = support[k];
        let uy: f64 = rng.gen();
        let cdf = &row_cdfs[k];
        let y = cdf.partition_point(|&c| c < uy).min(cdf.len() - 1);
        for (i, payoff) in game.payoff(x, y).iter().enumerate() {
            let v = rational_to_f64(payoff);
            sums[i] += v;
            sq_sums[i] += v * v;
        }
    }

    let r = rounds as f64;
    let means: Vec<f64> = sums.iter().map(|s| s / r).collect();
    let standard_errors: Vec<f64> = means
        .iter()
        .zip(&sq_sums)
        .map(|(&mean, &sq)| {
            if rounds < 2 {
                return 0.0;
            }
            let variance = ((sq / r) - mean * mean).max(0.0) * r / (r - 1.0);
            (variance / r).sqrt()
        })
        .collect();
    let total_mean = means.iter().sum();
    Ok(SimulationSummary {
        rounds,
        seed,
        means,
        standard_errors,
        total_mean,
    })
}
