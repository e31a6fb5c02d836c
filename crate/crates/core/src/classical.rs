//! Classical strategies and exhaustive equilibrium analysis.
//!
//! Pure and mixed strategies act without advice and always produce
//! factorizable behaviors. Correlated strategies consult a shared advice
//! source drawn before the inputs are known and can correlate outputs across
//! players. All arithmetic on this path is exact: equilibrium checks compare
//! rationals, so "strictly improves" means a strict rational inequality with
//! no epsilon.
//!
//! Deviations are checked against pure alternatives only. Expected payoff is
//! linear in any one player's mixed strategy with the others fixed, so a
//! profitable mixed deviation exists only if some pure one does; the repo
//! docs state this lemma once and the checkers rely on it.

use num_traits::Zero;

use crate::game_model::{
    joint_count, joint_index, joint_tuple, Behavior, Game, PayoffVector, Rational,
};
use crate::{Error, Result};

/// Default cap on the joint advice space of a correlated strategy.
pub const DEFAULT_MAX_ADVICE: usize = 64;

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

/// A single player's pure strategy: one output per own input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PureStrategy {
    map: Vec<usize>,
}

impl PureStrategy {
    pub fn new(map: Vec<usize>) -> Self {
        PureStrategy { map }
    }

    pub fn output(&self, input: usize) -> usize {
        self.map[input]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}

/// One pure strategy per player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PureProfile {
    strategies: Vec<PureStrategy>,
}

impl PureProfile {
    pub fn new(strategies: Vec<PureStrategy>) -> Self {
        PureProfile { strategies }
    }

    pub fn player(&self, player: usize) -> &PureStrategy {
        &self.strategies[player]
    }

    pub fn players(&self) -> &[PureStrategy] {
        &self.strategies
    }

    /// The joint output index the profile produces on a joint input.
    pub fn joint_output(&self, game: &Game, joint_input: usize) -> usize {
        let x = game.input_tuple(joint_input);
        let y: Vec<usize> = self
            .strategies
            .iter()
            .zip(&x)
            .map(|(s, &xi)| s.output(xi))
            .collect();
        joint_index(&game.output_sizes(), &y)
    }

    /// Compact text form like `01|10|00`: each player's output map over
    /// inputs in order, players separated by `|`.
    pub fn describe(&self, game: &Game) -> String {
        self.strategies
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.map()
                    .iter()
                    .map(|&y| game.output_symbols(i)[y].clone())
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// A single player's mixed strategy `Pr(y_i | x_i)` with exact entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    /// Indexed `[input][output]`.
    table: Vec<Vec<Rational>>,
}

impl MixedStrategy {
    pub fn new(table: Vec<Vec<Rational>>) -> Result<Self> {
        for (x, row) in table.iter().enumerate() {
            let mut sum = Rational::zero();
            for p in row {
                if p < &Rational::zero() {
                    return Err(Error::Strategy(format!(
                        "negative probability {p} at input {x}"
                    )));
                }
                sum += p;
            }
            if sum != Rational::from_integer(1.into()) {
                return Err(Error::Strategy(format!(
                    "column for input {x} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(MixedStrategy { table })
    }

    pub fn from_pure(pure: &PureStrategy, output_count: usize) -> Self {
        let table = pure
            .map()
            .iter()
            .map(|&y| {
                let mut row = vec![Rational::zero(); output_count];
                row[y] = Rational::from_integer(1.into());
                row
            })
            .collect();
        MixedStrategy { table }
    }

    pub fn prob(&self, input: usize, output: usize) -> &Rational {
        &self.table[input][output]
    }

    pub fn input_count(&self) -> usize {
        self.table.len()
    }

    pub fn output_count(&self) -> usize {
        self.table.first().map_or(0, Vec::len)
    }
}

/// A correlated strategy: a finite advice distribution plus deterministic
/// response maps `s_i(x_i, r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedStrategy {
    /// Per-player advice alphabets `Ω_i`.
    advice_sets: Vec<Vec<String>>,
    /// Distribution over joint advice, indexed lexicographically.
    distribution: Vec<Rational>,
    /// Per player: `[input][advice] -> output`.
    responses: Vec<Vec<Vec<usize>>>,
}

impl CorrelatedStrategy {
    pub fn new(
        advice_sets: Vec<Vec<String>>,
        distribution: Vec<Rational>,
        responses: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        Self::with_advice_limit(advice_sets, distribution, responses, DEFAULT_MAX_ADVICE)
    }

    /// Like [`CorrelatedStrategy::new`] with an explicit cap on the joint
    /// advice space.
    pub fn with_advice_limit(
        advice_sets: Vec<Vec<String>>,
        distribution: Vec<Rational>,
        responses: Vec<Vec<Vec<usize>>>,
        max_advice: usize,
    ) -> Result<Self> {
        let sizes: Vec<usize> = advice_sets.iter().map(Vec::len).collect();
        if sizes.contains(&0) {
            return Err(Error::Strategy("advice alphabets must be nonempty".into()));
        }
        let joint = joint_count(&sizes);
        if joint > max_advice {
            return Err(Error::Strategy(format!(
                "joint advice space has {joint} symbols, limit is {max_advice}"
            )));
        }
        if distribution.len() != joint {
            return Err(Error::Strategy(format!(
                "advice distribution has {} entries, expected {joint}",
                distribution.len()
            )));
        }
        let mut sum = Rational::zero();
        for q in &distribution {
            if q < &Rational::zero() {
                return Err(Error::Strategy(format!("negative advice probability {q}")));
            }
            sum += q;
        }
        if sum != Rational::from_integer(1.into()) {
            return Err(Error::Strategy(format!(
                "advice distribution sums to {sum}, expected 1"
            )));
        }
        if responses.len() != advice_sets.len() {
            return Err(Error::Strategy("need one response map per player".into()));
        }
        for (i, map) in responses.iter().enumerate() {
            for row in map {
                if row.len() != sizes[i] {
                    return Err(Error::Strategy(format!(
                        "player {i} response map does not cover all advice symbols"
                    )));
                }
            }
        }
        Ok(CorrelatedStrategy {
            advice_sets,
            distribution,
            responses,
        })
    }

    pub fn advice_sizes(&self) -> Vec<usize> {
        self.advice_sets.iter().map(Vec::len).collect()
    }

    pub fn advice_sets(&self) -> &[Vec<String>] {
        &self.advice_sets
    }

    pub fn distribution(&self) -> &[Rational] {
        &self.distribution
    }

    pub fn response(&self, player: usize, input: usize, advice: usize) -> usize {
        self.responses[player][input][advice]
    }
}

// ---------------------------------------------------------------------------
// Behavior construction
// ---------------------------------------------------------------------------

/// Behavior of independent mixed strategies: `P(y|x) = Π_i Pr(y_i|x_i)`.
pub fn behavior_of_mixed(game: &Game, profile: &[MixedStrategy]) -> Result<Behavior> {
    let n = game.player_count();
    if profile.len() != n {
        return Err(Error::Strategy(format!(
            "profile has {} strategies for a {n}-player game",
            profile.len()
        )));
    }
    let in_sizes = game.input_sizes();
    let out_sizes = game.output_sizes();
    for (i, s) in profile.iter().enumerate() {
        if s.input_count() != in_sizes[i] || s.output_count() != out_sizes[i] {
            return Err(Error::Strategy(format!(
                "player {i} strategy shape {}x{} does not match game {}x{}",
                s.input_count(),
                s.output_count(),
                in_sizes[i],
                out_sizes[i]
            )));
        }
    }
    let nx = game.joint_input_count();
    let ny = game.joint_output_count();
    let mut rows = Vec::with_capacity(nx);
    for x in 0..nx {
        let xt = joint_tuple(&in_sizes, x);
        let mut row = Vec::with_capacity(ny);
        for y in 0..ny {
            let yt = joint_tuple(&out_sizes, y);
            let mut p = Rational::from_integer(1.into());
            for i in 0..n {
                p *= profile[i].prob(xt[i], yt[i]);
                if p.is_zero() {
                    break;
                }
            }
            row.push(p);
        }
        rows.push(row);
    }
    Behavior::from_exact(in_sizes, out_sizes, rows)
}

/// Behavior of a pure profile: a point mass per joint input.
pub fn behavior_of_pure(game: &Game, profile: &PureProfile) -> Result<Behavior> {
    let mixed: Vec<MixedStrategy> = profile
        .players()
        .iter()
        .enumerate()
        .map(|(i, s)| MixedStrategy::from_pure(s, game.output_sizes()[i]))
        .collect();
    behavior_of_mixed(game, &mixed)
}

/// Behavior of a correlated strategy:
/// `P(y|x) = Σ_r Q(r) · [y_i = s_i(x_i, r_i) for all i]`.
pub fn behavior_of_correlated(game: &Game, cs: &CorrelatedStrategy) -> Result<Behavior> {
    let n = game.player_count();
    if cs.advice_sets().len() != n {
        return Err(Error::Strategy(format!(
            "correlated strategy has {} advice sets for a {n}-player game",
            cs.advice_sets().len()
        )));
    }
    let in_sizes = game.input_sizes();
    let out_sizes = game.output_sizes();
    for i in 0..n {
        if cs.responses[i].len() != in_sizes[i] {
            return Err(Error::Strategy(format!(
                "player {i} response map does not cover all inputs"
            )));
        }
        for row in &cs.responses[i] {
            for &y in row {
                if y >= out_sizes[i] {
                    return Err(Error::Strategy(format!(
                        "player {i} response map uses output {y} outside the alphabet"
                    )));
                }
            }
        }
    }
    let advice_sizes = cs.advice_sizes();
    let nx = game.joint_input_count();
    let ny = game.joint_output_count();
    let mut rows = vec![vec![Rational::zero(); ny]; nx];
    for (r, q) in cs.distribution().iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let rt = joint_tuple(&advice_sizes, r);
        for (x, row) in rows.iter_mut().enumerate() {
            let xt = joint_tuple(&in_sizes, x);
            let yt: Vec<usize> = (0..n).map(|i| cs.response(i, xt[i], rt[i])).collect();
            row[joint_index(&out_sizes, &yt)] += q;
        }
    }
    Behavior::from_exact(in_sizes, out_sizes, rows)
}

// ---------------------------------------------------------------------------
// Enumeration and equilibria
// ---------------------------------------------------------------------------

/// Every pure strategy of one player, in lexicographic order.
pub fn enumerate_player_strategies(input_count: usize, output_count: usize) -> Vec<PureStrategy> {
    let total = output_count.pow(input_count as u32);
    (0..total)
        .map(|code| {
            // Input 0 is the most significant digit.
            let mut map = vec![0; input_count];
            let mut rest = code;
            for slot in (0..input_count).rev() {
                map[slot] = rest % output_count;
                rest /= output_count;
            }
            PureStrategy::new(map)
        })
        .collect()
}

/// All pure profiles of a game in lexicographic order; the first is the
/// all-constant-first-output profile.
pub fn enumerate_pure_profiles(game: &Game) -> Vec<PureProfile> {
    let per_player: Vec<Vec<PureStrategy>> = (0..game.player_count())
        .map(|i| enumerate_player_strategies(game.input_sizes()[i], game.output_sizes()[i]))
        .collect();
    let counts: Vec<usize> = per_player.iter().map(Vec::len).collect();
    (0..joint_count(&counts))
        .map(|idx| {
            let picks = joint_tuple(&counts, idx);
            PureProfile::new(
                picks
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| per_player[i][k].clone())
                    .collect(),
            )
        })
        .collect()
}

/// Exact average payoffs of a pure profile.
pub fn pure_profile_payoffs(game: &Game, profile: &PureProfile) -> Vec<Rational> {
    let n = game.player_count();
    let mut acc = vec![Rational::zero(); n];
    for x in game.support() {
        let y = profile.joint_output(game, x);
        for (i, f) in acc.iter_mut().enumerate() {
            *f += game.prior(x) * &game.payoff(x, y)[i];
        }
    }
    acc
}

fn payoff_of_player_with_swap(
    game: &Game,
    profile: &PureProfile,
    player: usize,
    alternative: &PureStrategy,
) -> Rational {
    let in_sizes = game.input_sizes();
    let out_sizes = game.output_sizes();
    let mut acc = Rational::zero();
    for x in game.support() {
        let xt = joint_tuple(&in_sizes, x);
        let yt: Vec<usize> = (0..game.player_count())
            .map(|i| {
                if i == player {
                    alternative.output(xt[i])
                } else {
                    profile.player(i).output(xt[i])
                }
            })
            .collect();
        let y = joint_index(&out_sizes, &yt);
        acc += game.prior(x) * &game.payoff(x, y)[player];
    }
    acc
}

/// All pure Nash equilibria with their exact payoff vectors, in lexicographic
/// profile order.
///
/// A profile qualifies when no player has a pure deviation that strictly
/// increases their own average payoff; by linearity this also rules out mixed
/// deviations.
pub fn pure_nash_equilibria(game: &Game) -> Vec<(PureProfile, PayoffVector)> {
    let alternatives: Vec<Vec<PureStrategy>> = (0..game.player_count())
        .map(|i| enumerate_player_strategies(game.input_sizes()[i], game.output_sizes()[i]))
        .collect();
    enumerate_pure_profiles(game)
        .into_iter()
        .filter_map(|profile| {
            let payoffs = pure_profile_payoffs(game, &profile);
            let stable = (0..game.player_count()).all(|player| {
                alternatives[player].iter().all(|alt| {
                    payoff_of_player_with_swap(game, &profile, player, alt) <= payoffs[player]
                })
            });
            stable.then_some((profile, PayoffVector::Exact(payoffs)))
        })
        .collect()
}

/// Verdict of a correlated-equilibrium check.
#[derive(Debug, Clone)]
pub struct CorrelatedEquilibriumReport {
    pub is_equilibrium: bool,
    /// Largest payoff gain any single pointwise deviation achieves (zero or
    /// negative at an equilibrium).
    pub max_gain: Rational,
    /// A deviation realizing a positive gain, if one exists.
    pub witness: Option<PointwiseDeviation>,
}

/// Replace one player's response at a single (input, advice) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointwiseDeviation {
    pub player: usize,
    pub input: usize,
    pub advice: usize,
    pub new_output: usize,
}

/// Checks whether a correlated strategy is a correlated equilibrium.
///
/// Full alternative response maps decompose into independent pointwise swaps
/// because the events (x_i, r_i) are disjoint, so only swaps are enumerated.
pub fn is_correlated_equilibrium(
    game: &Game,
    cs: &CorrelatedStrategy,
) -> Result<CorrelatedEquilibriumReport> {
    // Validates shapes as a side effect.
    behavior_of_correlated(game, cs)?;

    let n = game.player_count();
    let in_sizes = game.input_sizes();
    let out_sizes = game.output_sizes();
    let advice_sizes = cs.advice_sizes();
    let mut max_gain: Option<Rational> = None;
    let mut witness = None;

    for player in 0..n {
        for own_input in 0..in_sizes[player] {
            for own_advice in 0..advice_sizes[player] {
                let current_output = cs.response(player, own_input, own_advice);
                for new_output in 0..out_sizes[player] {
                    if new_output == current_output {
                        continue;
                    }
                    let mut gain = Rational::zero();
                    for x in game.support() {
                        let xt = joint_tuple(&in_sizes, x);
                        if xt[player] != own_input {
                            continue;
                        }
                        for (r, q) in cs.distribution().iter().enumerate() {
                            if q.is_zero() {
                                continue;
                            }
                            let rt = joint_tuple(&advice_sizes, r);
                            if rt[player] != own_advice {
                                continue;
                            }
                            let mut yt: Vec<usize> =
                                (0..n).map(|i| cs.response(i, xt[i], rt[i])).collect();
                            let y_old = joint_index(&out_sizes, &yt);
                            yt[player] = new_output;
                            let y_new = joint_index(&out_sizes, &yt);
                            let weight = game.prior(x) * q;
                            gain += &weight
                                * (&game.payoff(x, y_new)[player] - &game.payoff(x, y_old)[player]);
                        }
                    }
                    if max_gain.as_ref().is_none_or(|g| gain > *g) {
                        if gain > Rational::zero() {
                            witness = Some(PointwiseDeviation {
                                player,
                                input: own_input,
                                advice: own_advice,
                                new_output,
                            });
                        }
                        max_gain = Some(gain);
                    }
                }
            }
        }
    }

    let max_gain = max_gain.unwrap_or_else(Rational::zero);
    Ok(CorrelatedEquilibriumReport {
        is_equilibrium: max_gain <= Rational::zero(),
        max_gain,
        witness,
    })
}

/// Maximum total payoff over pure profiles, with the argmax set.
///
/// The total is linear over the convex hull of the pure-profile payoff
/// points, so this also equals the optimum over all correlated strategies.
pub fn classical_social_optimum(game: &Game) -> (Rational, Vec<PureProfile>) {
    let mut best: Option<Rational> = None;
    let mut argmax = Vec::new();
    for profile in enumerate_pure_profiles(game) {
        let total: Rational = pure_profile_payoffs(game, &profile).iter().sum();
        match &best {
            Some(b) if total < *b => {}
            Some(b) if total == *b => argmax.push(profile),
            _ => {
                best = Some(total);
                argmax = vec![profile];
            }
        }
    }
    (best.expect("game has at least one profile"), argmax)
}

/// Distinct payoff points of all pure profiles, sorted lexicographically.
///
/// The feasible set of average payoff vectors under classical advice is the
/// convex hull of these points; computing the hull itself is out of scope.
pub fn payoff_polytope_vertices(game: &Game) -> Vec<PayoffVector> {
    let mut points: Vec<Vec<Rational>> = enumerate_pure_profiles(game)
        .iter()
        .map(|p| pure_profile_payoffs(game, p))
        .collect();
    points.sort();
    points.dedup();
    points.into_iter().map(PayoffVector::Exact).collect()
}
