//! Quantum-equilibrium verification: exact single-player best responses over
//! POVM deviations, and the no-signalling outcome-correlation upper bound.
//!
//! Deviations keep the shared state fixed — the advice is handed out by the
//! source — and range over arbitrary POVMs on the deviator's own qubit. For a
//! fixed deviator, the average payoff is linear in that player's measurement
//! operators:
//!
//! ```text
//! F_i = Σ_{x_i, y_i} Tr( A_{x_i}^{y_i} · M_{x_i, y_i} )
//! ```
//!
//! where the local payoff operators `M` absorb the prior, the payoff tensor,
//! the shared state, and the other players' fixed measurements. The exact
//! best response then decomposes per input into a largest-positive-part
//! eigenvalue problem in dimension two.

use crate::game_model::{joint_index, joint_tuple, rational_to_f64, Game};
use crate::linalg::{outer, CMat, C64};
use crate::quantum::{behavior_of_quantum, BinaryMeasurement, QuantumStrategy};
use crate::{Error, Result};

/// How a deviation bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    /// Exact maximum over POVM deviations on the deviator's qubit.
    ExactPovm,
    /// Upper bound granting the deviator perfect correlation with the other
    /// players' outcomes.
    OutcomeCorrelation,
    /// Moment-matrix semidefinite relaxation.
    NpaSdp,
}

impl BoundMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::ExactPovm => "exact_povm",
            BoundMethod::OutcomeCorrelation => "outcome_correlation",
            BoundMethod::NpaSdp => "npa_sdp",
        }
    }
}

/// Iteration count and final duality gap of an SDP solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    pub duality_gap: f64,
}

/// One player's deviation analysis.
#[derive(Debug, Clone)]
pub struct DeviationReport {
    pub player: usize,
    /// The player's payoff under the unmodified strategy.
    pub current_payoff: f64,
    /// Value (or upper bound) of the best unilateral deviation.
    pub best_response_value: f64,
    pub bound_method: BoundMethod,
    /// Best deviating measurement family, one per input, when the method
    /// produces one.
    pub witness: Option<Vec<BinaryMeasurement>>,
    /// Solver diagnostics for SDP-backed bounds.
    pub diagnostics: Option<SolverDiagnostics>,
}

impl DeviationReport {
    /// How much the deviation gains over the current payoff.
    pub fn gain(&self) -> f64 {
        self.best_response_value - self.current_payoff
    }
}

/// Verdict of a quantum-equilibrium check across all players.
#[derive(Debug, Clone)]
pub struct EquilibriumVerdict {
    pub is_equilibrium: bool,
    pub method: BoundMethod,
    pub tolerance: f64,
    pub reports: Vec<DeviationReport>,
}

/// Which payoff the local operators aggregate.
#[derive(Debug, Clone, Copy)]
pub(crate) enum PayoffSelector {
    Player(usize),
    Total,
}

fn check_strategy_against_game(game: &Game, qs: &QuantumStrategy) -> Result<()> {
    if qs.player_count() != game.player_count() {
        return Err(Error::Strategy(format!(
            "strategy has {} players, game has {}",
            qs.player_count(),
            game.player_count()
        )));
    }
    if !game.is_binary() {
        return Err(Error::Unsupported(
            "quantum analysis covers binary inputs and outputs only".into(),
        ));
    }
    if qs.input_counts() != game.input_sizes() {
        return Err(Error::Strategy(
            "strategy measurement counts do not match the game's input alphabets".into(),
        ));
    }
    Ok(())
}

/// Tensor product of the non-deviating players' outcome operators, in player
/// order.
fn fixed_operator(
    qs: &QuantumStrategy,
    deviator: usize,
    other_inputs: &[usize],
    other_outputs: &[usize],
) -> CMat {
    let mut op: Option<CMat> = None;
    let mut k = 0;
    for player in 0..qs.player_count() {
        if player == deviator {
            continue;
        }
        let m = qs
            .measurement(player, other_inputs[k])
            .outcome(other_outputs[k]);
        op = Some(match op {
            None => m.clone(),
            Some(acc) => acc.kron(m),
        });
        k += 1;
    }
    op.expect("at least one fixed player")
}

/// `Tr_rest[(I_deviator ⊗ F)|Ψ⟩⟨Ψ|]` as an operator on the deviator's qubit,
/// so that `Tr[(A ⊗ F)|Ψ⟩⟨Ψ|] = Tr(A · R)`.
fn conditional_operator(qs: &QuantumStrategy, deviator: usize, fixed: &CMat) -> CMat {
    let n = qs.player_count();
    let psi = qs.state().amplitudes();
    let rest_dim = 1usize << (n - 1);
    // Global basis index from the deviator's bit and the other players' bits
    // (player order preserved).
    let merge = |a: usize, b: usize| -> usize {
        let low_count = n - 1 - deviator;
        let high = b >> low_count;
        let low = b & ((1 << low_count) - 1);
        (high << (low_count + 1)) | (a << low_count) | low
    };
    // (F ψ)_{a,b} = Σ_{b'} F[b,b'] ψ_{a,b'}
    let mut f_psi = vec![C64::new(0.0, 0.0); 2 * rest_dim];
    for a in 0..2 {
        for b in 0..rest_dim {
            let mut acc = C64::new(0.0, 0.0);
            for bp in 0..rest_dim {
                let f = fixed[(b, bp)];
                if f != C64::new(0.0, 0.0) {
                    acc += f * psi[merge(a, bp)];
                }
            }
            f_psi[a * rest_dim + b] = acc;
        }
    }
    let mut r = CMat::zeros(2);
    for a in 0..2 {
        for ap in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..rest_dim {
                acc += f_psi[a * rest_dim + b] * psi[merge(ap, b)].conj();
            }
            r[(a, ap)] = acc;
        }
    }
    // Hermitian up to roundoff; symmetrize so eigensolvers stay happy.
    r.add(&r.adjoint()).scale(C64::new(0.5, 0.0))
}

pub(crate) fn local_operators_weighted(
    game: &Game,
    qs: &QuantumStrategy,
    player: usize,
    selector: PayoffSelector,
) -> Result<Vec<[CMat; 2]>> {
    check_strategy_against_game(game, qs)?;
    let n = game.player_count();
    let in_sizes = game.input_sizes();
    let out_sizes = game.output_sizes();
    let other_in_sizes: Vec<usize> = (0..n)
        .filter(|&i| i != player)
        .map(|i| in_sizes[i])
        .collect();
    let other_out_count = 1usize << (n - 1);

    let mut operators: Vec<[CMat; 2]> = (0..in_sizes[player])
        .map(|_| [CMat::zeros(2), CMat::zeros(2)])
        .collect();

    let other_input_count: usize = other_in_sizes.iter().product();
    for own_input in 0..in_sizes[player] {
        for rest_x in 0..other_input_count {
            let rest_xt = joint_tuple(&other_in_sizes, rest_x);
            // Reassemble the joint input in player order.
            let mut xt = Vec::with_capacity(n);
            let mut k = 0;
            for i in 0..n {
                if i == player {
                    xt.push(own_input);
                } else {
                    xt.push(rest_xt[k]);
                    k += 1;
                }
            }
            let x = joint_index(&in_sizes, &xt);
            let px = rational_to_f64(game.prior(x));
            if px == 0.0 {
                continue;
            }
            for rest_y in 0..other_out_count {
                let rest_yt: Vec<usize> =
                    (0..n - 1).map(|pos| rest_y >> (n - 2 - pos) & 1).collect();
                let fixed = fixed_operator(qs, player, &rest_xt, &rest_yt);
                let r = conditional_operator(qs, player, &fixed);
                for own_output in 0..2 {
                    let mut yt = Vec::with_capacity(n);
                    let mut k = 0;
                    for i in 0..n {
                        if i == player {
                            yt.push(own_output);
                        } else {
                            yt.push(rest_yt[k]);
                            k += 1;
                        }
                    }
                    let y = joint_index(&out_sizes, &yt);
                    let value = match selector {
                        PayoffSelector::Player(p) => rational_to_f64(&game.payoff(x, y)[p]),
                        PayoffSelector::Total => rational_to_f64(&game.total_payoff(x, y)),
                    };
                    if value == 0.0 {
                        continue;
                    }
                    let weighted = r.scale(C64::new(px * value, 0.0));
                    operators[own_input][own_output] =
                        operators[own_input][own_output].add(&weighted);
                }
            }
        }
    }
    Ok(operators)
}

/// Local payoff operators of one player: Hermitian `M_{x_i, y_i}` on the
/// player's qubit such that any deviation `A` earns
/// `Σ_{x_i,y_i} Tr(A_{x_i}^{y_i} M_{x_i,y_i})`.
pub fn local_payoff_operators(
    game: &Game,
    qs: &QuantumStrategy,
    player: usize,
) -> Result<Vec<[CMat; 2]>> {
    local_operators_weighted(game, qs, player, PayoffSelector::Player(player))
}

/// Best-response value and witness measurements for a set of local payoff
/// operators: per input, `Tr(M_1) + Σ λ₊(M_0 − M_1)`, attained by projecting
/// onto the positive eigenspace of the difference.
pub(crate) fn best_response_from_operators(
    operators: &[[CMat; 2]],
) -> (f64, Vec<BinaryMeasurement>) {
    let mut value = 0.0;
    let mut witness = Vec::with_capacity(operators.len());
    for pair in operators {
        let diff = pair[0].sub(&pair[1]);
        let (vals, vecs) = diff.hermitian_eigen();
        value += pair[1].trace().re;
        let mut projector = CMat::zeros(2);
        for (k, &lambda) in vals.iter().enumerate() {
            if lambda > 0.0 {
                value += lambda;
                let col: Vec<C64> = (0..2).map(|i| vecs[(i, k)]).collect();
                projector = projector.add(&outer(&col, &col));
            }
        }
        let complement = CMat::identity(2).sub(&projector);
        witness.push(
            BinaryMeasurement::new(projector, complement)
                .expect("spectral projectors form a valid measurement"),
        );
    }
    (value, witness)
}

/// Exact maximum payoff the player can reach by swapping in any POVM family,
/// with the witness measurements attaining it.
pub fn exact_best_response_value(
    game: &Game,
    qs: &QuantumStrategy,
    player: usize,
) -> Result<DeviationReport> {
    let operators = local_payoff_operators(game, qs, player)?;
    let (value, witness) = best_response_from_operators(&operators);
    let current = current_payoff(game, qs, player)?;
    Ok(DeviationReport {
        player,
        current_payoff: current,
        best_response_value: value,
        bound_method: BoundMethod::ExactPovm,
        witness: Some(witness),
        diagnostics: None,
    })
}

/// The no-signalling outcome-correlation bound:
/// `Σ_x P(x) Σ_{y_rest} P(y_rest | x_rest) · max_{y_i} $_i(x, y)`.
///
/// The other players' outcome distribution cannot depend on the deviator's
/// measurement choice, so granting the deviator a perfectly correlated
/// oracle for `y_rest` bounds every deviation. Always at least as large as
/// the exact best response.
pub fn outcome_correlation_bound(
    game: &Game,
    qs: &QuantumStrategy,
    player: usize,
) -> Result<DeviationReport> {
    check_strategy_against_game(game, qs)?;
    let n = game.player_count();
    let in_sizes = game.input_sizes();
    let out_sizes = game.output_sizes();
    let others: Vec<usize> = (0..n).filter(|&i| i != player).collect();
    let rho_rest = qs.state().reduced_state(&others);

    let mut bound = 0.0;
    for x in game.support() {
        let px = rational_to_f64(game.prior(x));
        let xt = joint_tuple(&in_sizes, x);
        for rest_y in 0..(1usize << (n - 1)) {
            let rest_yt: Vec<usize> = (0..n - 1).map(|pos| rest_y >> (n - 2 - pos) & 1).collect();
            let mut op: Option<CMat> = None;
            for (pos, &other) in others.iter().enumerate() {
                let m = qs.measurement(other, xt[other]).outcome(rest_yt[pos]);
                op = Some(match op {
                    None => m.clone(),
                    Some(acc) => acc.kron(m),
                });
            }
            let prob = op.unwrap().matmul(&rho_rest).trace().re;
            if prob <= 0.0 {
                continue;
            }
            let best_cell = (0..out_sizes[player])
                .map(|own_output| {
                    let mut yt = Vec::with_capacity(n);
                    let mut k = 0;
                    for i in 0..n {
                        if i == player {
                            yt.push(own_output);
                        } else {
                            yt.push(rest_yt[k]);
                            k += 1;
                        }
                    }
                    rational_to_f64(&game.payoff(x, joint_index(&out_sizes, &yt))[player])
                })
                .fold(f64::NEG_INFINITY, f64::max);
            bound += px * prob * best_cell;
        }
    }

    Ok(DeviationReport {
        player,
        current_payoff: current_payoff(game, qs, player)?,
        best_response_value: bound,
        bound_method: BoundMethod::OutcomeCorrelation,
        witness: None,
        diagnostics: None,
    })
}

fn current_payoff(game: &Game, qs: &QuantumStrategy, player: usize) -> Result<f64> {
    let behavior = behavior_of_quantum(qs)?;
    Ok(game.average_payoffs(&behavior)?.get_f64(player))
}

/// Checks whether a strategy is a quantum equilibrium: for every player the
/// chosen bound on unilateral deviations must not exceed the current payoff
/// by more than `tol`.
pub fn verify_quantum_equilibrium(
    game: &Game,
    qs: &QuantumStrategy,
    method: BoundMethod,
    tol: f64,
) -> Result<EquilibriumVerdict> {
    check_strategy_against_game(game, qs)?;
    if method == BoundMethod::NpaSdp && game.player_count() != 3 {
        return Err(Error::Unsupported(
            "the moment-matrix bound is implemented for three-party games only".into(),
        ));
    }
    let mut reports = Vec::with_capacity(game.player_count());
    for player in 0..game.player_count() {
        let report = match method {
            BoundMethod::ExactPovm => exact_best_response_value(game, qs, player)?,
            BoundMethod::OutcomeCorrelation => outcome_correlation_bound(game, qs, player)?,
            BoundMethod::NpaSdp => crate::npa::npa_deviation_bound(
                game,
                qs,
                player,
                crate::npa::DEFAULT_SDP_TOLERANCE,
            )?,
        };
        reports.push(report);
    }
    let is_equilibrium = reports.iter().all(|r| r.gain() <= tol);
    Ok(EquilibriumVerdict {
        is_equilibrium,
        method,
        tolerance: tol,
        reports,
    })
}
