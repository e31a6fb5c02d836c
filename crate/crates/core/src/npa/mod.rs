//! Moment-matrix relaxation of single-player deviations.
//!
//! To bound what a deviator can earn against two fixed players, the two fixed
//! players are treated as one party with four inputs and four outputs. The
//! operator set contains the deviator's four outcome projectors and the
//! pair's sixteen, and the moment matrix `Γ_ij = Tr(S_i† S_j ρ)` over these
//! twenty labels must be positive semidefinite. Entries between fixed-pair
//! operators are determined by the shared state and the fixed measurements;
//! entries involving the deviator are unknowns, constrained to behave like
//! probabilities (nonnegative, real, normalized, no-signalling) and to
//! respect the algebra of projective measurements (diagonal moments equal
//! marginals, outcomes of one input are orthogonal). Maximizing the
//! deviator's average payoff over this set is a semidefinite program whose
//! optimum upper-bounds every quantum deviation — POVM deviations included,
//! since a POVM dilates to a projective measurement without changing any
//! joint statistics or the fixed entries.
//!
//! Internally the twenty labels are augmented with the identity operator so
//! normalization and marginal constraints become linear equalities against
//! the identity row. The fully fixed (identity + pair) corner is rank
//! deficient — its Gram vectors live in the eight-dimensional state space —
//! so rather than carrying the singular corner into the solver, the problem
//! is posed on the reduced face: the variable matrix is
//! `[[P, K], [K†, I]]` where `K` holds the deviator rows written in state
//! coordinates and the fixed corner is recovered as `V†V` from the known
//! Gram vectors `V`. This restores strict feasibility for the
//! interior-point solver without changing the optimum.
//!
//! Level-one moments alone leave slack against the true deviation optimum,
//! because the pair's operators do not span the full operator space and so
//! do not pin the deviator's steered states. The deviator holds the
//! purifying system of the pair's reduced state, so the steered assemblage
//! `σ_{a|x} = Tr_dev[(A_x^a ⊗ I)ρ]` characterizes deviations exactly: every
//! PSD assemblage summing to the pair state is realizable by some POVM.
//! With deviator rows in state coordinates, `σ` is a linear function of the
//! moments, and imposing its Hermiticity and positivity (compressed to the
//! pair state's range) closes the gap — the bound coincides with the exact
//! best response while every constraint remains valid for arbitrary
//! deviations. The complex matrices are embedded as `[[Re, −Im], [Im, Re]]`
//! so the solver stays real-symmetric.

pub mod sdp;

pub use sdp::{solve_sdp, SdpConstraint, SdpProblem, SdpSolution, Triplet};

use std::collections::BTreeMap;

use crate::equilibrium::{BoundMethod, DeviationReport, SolverDiagnostics};
use crate::game_model::{joint_index, rational_to_f64, Game};
use crate::linalg::{CMat, C64};
use crate::quantum::{behavior_of_quantum, QuantumStrategy};
use crate::{Error, Result};

/// Default duality-gap target for deviation bounds.
pub const DEFAULT_SDP_TOLERANCE: f64 = 1e-7;

/// Relative eigenvalue cutoff when factoring the fixed pair's reduced state.
const RANK_TOLERANCE: f64 = 1e-10;

/// Which side of the bipartition an operator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Deviator,
    FixedPair,
}

/// One projection operator in the moment-matrix label set.
///
/// Deviator labels use the player's own binary input and output; fixed-pair
/// labels use the joint input `2·x_j + x_k` and joint output `2·y_j + y_k`
/// of the two fixed players in player order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorLabel {
    pub side: Side,
    pub input: u8,
    pub output: u8,
}

/// An affine expression over moment-matrix variables.
#[derive(Debug, Clone)]
pub struct LinearExpr {
    pub constant: C64,
    pub terms: Vec<(usize, C64)>,
}

impl LinearExpr {
    fn evaluate(&self, vars: &[C64]) -> C64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(id, coef)| acc + coef * vars[id])
    }
}

/// Status of one moment-matrix cell.
#[derive(Debug, Clone)]
pub enum EntryStatus {
    /// Determined by the shared state and the fixed measurements.
    Fixed(C64),
    /// A free scalar of the relaxation.
    Variable(usize),
    /// Determined by completeness relations from other variables.
    Dependent(LinearExpr),
}

/// Joint variable id: deviator row `d` (0..4) against pair column `l`
/// (0..16).
fn joint_var(d: usize, l: usize) -> usize {
    d * 16 + l
}

/// Id 64: the one deviator-block moment left free by the projective
/// relations, `Γ(D(0,0), D(1,0))`.
const VAR_CROSS: usize = 64;
const VAR_COUNT: usize = 65;

/// The labeled moment matrix of one deviation scenario.
///
/// `labels` lists the deviator block first, lexicographic by (input, output),
/// then the sixteen pair labels lexicographic by (joint input, joint output).
/// The matrix is Hermitian by construction, so statuses describe the upper
/// triangle and mirror by conjugation.
///
/// The free variables are the 64 deviator–pair joint probabilities and one
/// deviator-block moment between the two inputs; every other deviator entry
/// follows from the completeness relations
/// `Σ_a Γ(D(x,a), j) = Γ(identity, j)` together with the projective
/// relations of the deviator's operators, recorded as
/// [`EntryStatus::Dependent`] expressions (or fixed zeros for orthogonal
/// outcome pairs). The honest strategy's own moments are kept alongside for
/// feasibility checks.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    deviator: usize,
    labels: Vec<OperatorLabel>,
    /// Statuses of the 20×20 upper triangle, row major over the full square.
    status: Vec<EntryStatus>,
    /// Honest moments over the identity-augmented 21×21 label set, identity
    /// first.
    honest: Vec<C64>,
}

impl MomentMatrix {
    /// Builds the moment matrix of a deviation by `player` from `qs`.
    pub fn build(game: &Game, qs: &QuantumStrategy, player: usize) -> Result<Self> {
        check_scenario(game, qs, player)?;
        let labels = default_labels();
        let honest = honest_moments(qs, player, &labels);

        // Pair marginals against the identity row, used by dependent cells;
        // pair-block values are fixed data.
        let pair_marg = |l: usize| honest[l + 5]; // honest[0][1 + 4 + l]
        let fixed_value = |i: usize, j: usize| honest[(i + 1) * 21 + (j + 1)];

        let mut status: Vec<EntryStatus> = (0..400)
            .map(|_| EntryStatus::Fixed(C64::new(0.0, 0.0)))
            .collect();
        for i in 0..20 {
            for j in i..20 {
                status[i * 20 + j] = cell_status(i, j, &pair_marg, &fixed_value);
            }
        }
        // Mirror: the lower triangle is the conjugate of the upper.
        for i in 0..20 {
            for j in 0..i {
                status[i * 20 + j] = conjugate_status(&status[j * 20 + i]);
            }
        }

        Ok(MomentMatrix {
            deviator: player,
            labels,
            status,
            honest,
        })
    }

    pub fn deviator(&self) -> usize {
        self.deviator
    }

    pub fn labels(&self) -> &[OperatorLabel] {
        &self.labels
    }

    pub fn status(&self, row: usize, col: usize) -> &EntryStatus {
        &self.status[row * 20 + col]
    }

    /// Honest moment of the 20×20 matrix (identity augmentation excluded).
    pub fn honest_entry(&self, row: usize, col: usize) -> C64 {
        self.honest[(row + 1) * 21 + (col + 1)]
    }

    /// Honest moments over the augmented 21-label set, identity first.
    pub fn honest_augmented(&self) -> &[C64] {
        &self.honest
    }

    /// Smallest eigenvalue of the honest augmented moment matrix; should be
    /// nonnegative up to roundoff.
    pub fn honest_min_eigenvalue(&self) -> f64 {
        let mut m = CMat::zeros(21);
        for i in 0..21 {
            for j in 0..21 {
                m[(i, j)] = self.honest[i * 21 + j];
            }
        }
        m.min_eigenvalue()
    }

    /// Worst residual of the linear relations (completeness rows on both
    /// sides, plus realness of probability entries) evaluated at the honest
    /// moments.
    pub fn honest_constraint_residual(&self) -> f64 {
        let g = |i: usize, j: usize| self.honest[i * 21 + j];
        let mut worst = 0.0_f64;
        // Deviator completeness: rows of (x,0) and (x,1) sum to the identity
        // row.
        for x in 0..2 {
            for j in 0..21 {
                let sum = g(1 + 2 * x, j) + g(1 + 2 * x + 1, j);
                worst = worst.max((sum - g(0, j)).norm());
            }
        }
        // Pair completeness: the four outputs of each pair input sum to the
        // identity column.
        for px in 0..4 {
            for i in 0..21 {
                let mut sum = C64::new(0.0, 0.0);
                for py in 0..4 {
                    sum += g(i, 5 + 4 * px + py);
                }
                worst = worst.max((sum - g(i, 0)).norm());
            }
        }
        // Probability-interpreted entries are real.
        for d in 0..4 {
            for l in 0..16 {
                worst = worst.max(g(1 + d, 5 + l).im.abs());
            }
            worst = worst.max(g(1 + d, 0).im.abs());
        }
        worst
    }

    /// Worst violation of entry nonnegativity at the honest moments.
    pub fn honest_nonnegativity_violation(&self) -> f64 {
        let g = |i: usize, j: usize| self.honest[i * 21 + j];
        let mut worst = 0.0_f64;
        for d in 0..4 {
            for l in 0..16 {
                worst = worst.max(-g(1 + d, 5 + l).re);
            }
            worst = worst.max(-g(1 + d, 0).re);
        }
        worst
    }

    /// Checks that each dependent cell's expression reproduces the honest
    /// moment; returns the worst mismatch.
    pub fn honest_dependency_residual(&self) -> f64 {
        let vars = self.honest_variables();
        let mut worst = 0.0_f64;
        for i in 0..20 {
            for j in 0..20 {
                if let EntryStatus::Dependent(expr) = self.status(i, j) {
                    let predicted = expr.evaluate(&vars);
                    worst = worst.max((predicted - self.honest_entry(i, j)).norm());
                }
            }
        }
        worst
    }

    /// Honest values of the free variables, in variable-id order.
    pub fn honest_variables(&self) -> Vec<C64> {
        let mut vars = vec![C64::new(0.0, 0.0); VAR_COUNT];
        for d in 0..4 {
            for l in 0..16 {
                vars[joint_var(d, l)] = self.honest_entry(d, 4 + l);
            }
        }
        vars[VAR_CROSS] = self.honest_entry(0, 2);
        vars
    }
}

/// Labels in the fixed order: deviator block first.
fn default_labels() -> Vec<OperatorLabel> {
    let mut labels = Vec::with_capacity(20);
    for input in 0..2u8 {
        for output in 0..2u8 {
            labels.push(OperatorLabel {
                side: Side::Deviator,
                input,
                output,
            });
        }
    }
    for input in 0..4u8 {
        for output in 0..4u8 {
            labels.push(OperatorLabel {
                side: Side::FixedPair,
                input,
                output,
            });
        }
    }
    labels
}

/// Marginal of one deviator operator as an expression over joint variables,
/// summing the pair outputs of pair input 0.
fn marginal_expr(dev_row: usize) -> LinearExpr {
    let (x, a) = (dev_row / 2, dev_row % 2);
    if a == 0 {
        LinearExpr {
            constant: C64::new(0.0, 0.0),
            terms: (0..4)
                .map(|py| (joint_var(2 * x, py), C64::new(1.0, 0.0)))
                .collect(),
        }
    } else {
        // m(x,1) = 1 - m(x,0)
        LinearExpr {
            constant: C64::new(1.0, 0.0),
            terms: (0..4)
                .map(|py| (joint_var(2 * x, py), C64::new(-1.0, 0.0)))
                .collect(),
        }
    }
}

fn add_expr(mut a: LinearExpr, scale: f64, b: &LinearExpr) -> LinearExpr {
    let s = C64::new(scale, 0.0);
    a.constant += s * b.constant;
    for &(id, coef) in &b.terms {
        a.terms.push((id, s * coef));
    }
    // Merge duplicate ids.
    let mut merged: BTreeMap<usize, C64> = BTreeMap::new();
    for (id, coef) in a.terms {
        *merged.entry(id).or_insert(C64::new(0.0, 0.0)) += coef;
    }
    a.terms = merged.into_iter().filter(|(_, c)| c.norm() > 0.0).collect();
    a
}

/// Status of one upper-triangle cell (row <= col) of the 20×20 matrix.
fn cell_status(
    row: usize,
    col: usize,
    pair_marg: &dyn Fn(usize) -> C64,
    fixed_value: &dyn Fn(usize, usize) -> C64,
) -> EntryStatus {
    let dev = |i: usize| i < 4;
    match (dev(row), dev(col)) {
        (false, false) => EntryStatus::Fixed(fixed_value(row, col)),
        (true, false) => {
            let l = col - 4;
            let (x, a) = (row / 2, row % 2);
            if a == 0 {
                EntryStatus::Variable(joint_var(row, l))
            } else {
                // Σ_a Γ(D(x,a), F_l) equals the fixed pair marginal.
                EntryStatus::Dependent(LinearExpr {
                    constant: pair_marg(l),
                    terms: vec![(joint_var(2 * x, l), C64::new(-1.0, 0.0))],
                })
            }
        }
        (true, true) => dev_block_status(row, col),
        (false, true) => unreachable!("row <= col puts pair rows after dev columns"),
    }
}

/// Status of a deviator-block cell (row <= col, both < 4).
///
/// The deviator's operators are projectors, so diagonal moments equal the
/// marginals and the two outcomes of one input are orthogonal. Output-1 rows
/// and columns then reduce through `Σ_a A_x^a = 1`, leaving a single free
/// moment `Γ(D(0,0), D(1,0))` between the two inputs.
fn dev_block_status(row: usize, col: usize) -> EntryStatus {
    let (xr, ar) = (row / 2, row % 2);
    let (xc, ac) = (col / 2, col % 2);
    if row == col {
        return EntryStatus::Dependent(marginal_expr(row));
    }
    if xr == xc {
        // Orthogonal outcomes of one input.
        return EntryStatus::Fixed(C64::new(0.0, 0.0));
    }
    let cross = LinearExpr {
        constant: C64::new(0.0, 0.0),
        terms: vec![(VAR_CROSS, C64::new(1.0, 0.0))],
    };
    match (ar, ac) {
        (0, 0) => EntryStatus::Variable(VAR_CROSS),
        (0, 1) => {
            // Γ(D(0,0), D(1,1)) = m(0,0) - Γ(D(0,0), D(1,0))
            EntryStatus::Dependent(add_expr(marginal_expr(2 * xr), -1.0, &cross))
        }
        (1, 0) => {
            // Γ(D(0,1), D(1,0)) = conj(m(1,0)) - Γ(D(0,0), D(1,0)), and
            // marginals are real.
            EntryStatus::Dependent(add_expr(marginal_expr(2 * xc), -1.0, &cross))
        }
        (1, 1) => {
            // Γ(D(0,1), D(1,1)) = 1 - m(0,0) - m(1,0) + Γ(D(0,0), D(1,0))
            let mut expr = LinearExpr {
                constant: C64::new(1.0, 0.0),
                terms: vec![(VAR_CROSS, C64::new(1.0, 0.0))],
            };
            expr = add_expr(expr, -1.0, &marginal_expr(2 * xr));
            expr = add_expr(expr, -1.0, &marginal_expr(2 * xc));
            EntryStatus::Dependent(expr)
        }
        _ => unreachable!(),
    }
}

fn conjugate_status(status: &EntryStatus) -> EntryStatus {
    match status {
        EntryStatus::Fixed(v) => EntryStatus::Fixed(v.conj()),
        // Variables denote the upper-triangle cell; the mirror references the
        // same id, understood as conjugated. Probability-valued variables are
        // real, deviator-block ones are genuinely complex; the distinction
        // only matters to consumers reconstructing the full matrix, which go
        // through the Hermitian mirror anyway.
        EntryStatus::Variable(id) => EntryStatus::Variable(*id),
        EntryStatus::Dependent(expr) => EntryStatus::Dependent(LinearExpr {
            constant: expr.constant.conj(),
            terms: expr.terms.iter().map(|&(id, c)| (id, c.conj())).collect(),
        }),
    }
}

fn check_scenario(game: &Game, qs: &QuantumStrategy, player: usize) -> Result<()> {
    if game.player_count() != 3 {
        return Err(Error::Unsupported(
            "the moment-matrix bound needs exactly three players".into(),
        ));
    }
    if !game.is_binary() {
        return Err(Error::Unsupported(
            "the moment-matrix bound needs binary inputs and outputs".into(),
        ));
    }
    if player >= 3 {
        return Err(Error::Domain(format!(
            "no player {player} in a 3-player game"
        )));
    }
    if qs.player_count() != 3 || qs.input_counts() != vec![2, 2, 2] {
        return Err(Error::Unsupported(
            "strategy must give three players two binary measurements each".into(),
        ));
    }
    if qs.state().dim() != 8 {
        return Err(Error::Unsupported(
            "fixed players must hold one qubit each".into(),
        ));
    }
    Ok(())
}

/// The 8×8 operator of one label, identity on the remaining factor(s).
fn label_operator(qs: &QuantumStrategy, deviator: usize, label: &OperatorLabel) -> CMat {
    let fixed: Vec<usize> = (0..3).filter(|&i| i != deviator).collect();
    let mut per_player: Vec<CMat> = (0..3).map(|_| CMat::identity(2)).collect();
    match label.side {
        Side::Deviator => {
            per_player[deviator] = qs
                .measurement(deviator, label.input as usize)
                .outcome(label.output as usize)
                .clone();
        }
        Side::FixedPair => {
            let (xj, xk) = ((label.input >> 1 & 1) as usize, (label.input & 1) as usize);
            let (yj, yk) = (
                (label.output >> 1 & 1) as usize,
                (label.output & 1) as usize,
            );
            per_player[fixed[0]] = qs.measurement(fixed[0], xj).outcome(yj).clone();
            per_player[fixed[1]] = qs.measurement(fixed[1], xk).outcome(yk).clone();
        }
    }
    per_player[0].kron(&per_player[1]).kron(&per_player[2])
}

/// Gram matrix `⟨S_i Ψ | S_j Ψ⟩` over identity + the 20 labels.
fn honest_moments(qs: &QuantumStrategy, deviator: usize, labels: &[OperatorLabel]) -> Vec<C64> {
    let psi = qs.state().amplitudes();
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(21);
    vectors.push(psi.to_vec());
    for label in labels {
        vectors.push(label_operator(qs, deviator, label).mul_vec(psi));
    }
    let mut gram = vec![C64::new(0.0, 0.0); 21 * 21];
    for i in 0..21 {
        for j in 0..21 {
            gram[i * 21 + j] = crate::linalg::inner(&vectors[i], &vectors[j]);
        }
    }
    gram
}

// ---------------------------------------------------------------------------
// SDP construction
// ---------------------------------------------------------------------------

/// Rectangular complex matrix, row major.
struct Rect {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Rect {
    fn get(&self, i: usize, j: usize) -> C64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }
}

/// A built deviation SDP plus the data needed to interpret its solution.
pub struct DeviationSdp {
    pub problem: SdpProblem,
    deviator: usize,
    /// Coordinates (8 × 17) of the identity and pair Gram vectors in the
    /// shared state space; column 0 is `|Ψ⟩` itself, column `1+l` is
    /// `F_l |Ψ⟩`. The fixed corner equals `V† V`.
    coords: Rect,
    /// Label sequences actually used (supports reordered builds).
    dev_labels: Vec<(usize, usize)>,
    pair_labels: Vec<(usize, usize)>,
}

/// Builds the deviation SDP for `player` with labels in the default order.
pub fn build_deviation_sdp(game: &Game, qs: &QuantumStrategy, player: usize) -> Result<SdpProblem> {
    Ok(DeviationSdp::build(game, qs, player)?.problem)
}

impl DeviationSdp {
    pub fn build(game: &Game, qs: &QuantumStrategy, player: usize) -> Result<Self> {
        let dev_order: Vec<usize> = (0..4).collect();
        let pair_order: Vec<usize> = (0..16).collect();
        Self::build_with_orders(game, qs, player, &dev_order, &pair_order)
    }

    /// Like [`DeviationSdp::build`] with permuted label sequences; the
    /// optimum must not depend on the order. Exposed for validation.
    pub fn build_with_orders(
        game: &Game,
        qs: &QuantumStrategy,
        player: usize,
        dev_order: &[usize],
        pair_order: &[usize],
    ) -> Result<Self> {
        check_scenario(game, qs, player)?;
        let dev_labels: Vec<(usize, usize)> = dev_order.iter().map(|&p| (p / 2, p % 2)).collect();
        let pair_labels: Vec<(usize, usize)> = pair_order.iter().map(|&p| (p / 4, p % 4)).collect();
        if dev_labels.len() != 4 || pair_labels.len() != 16 {
            return Err(Error::Domain(
                "label orders must cover 4 and 16 labels".into(),
            ));
        }

        // Gram vectors of the fixed side, written out in state coordinates:
        // the corner never needs factoring because V itself is the factor.
        let fixed: Vec<usize> = (0..3).filter(|&i| i != player).collect();
        let psi = qs.state().amplitudes();
        let mut coords = Rect {
            rows: 8,
            cols: 17,
            data: vec![C64::new(0.0, 0.0); 8 * 17],
        };
        for (s, &amp) in psi.iter().enumerate() {
            coords.data[s * 17] = amp;
        }
        for (l, &(px, py)) in pair_labels.iter().enumerate() {
            let mut per_player: Vec<CMat> = (0..3).map(|_| CMat::identity(2)).collect();
            per_player[fixed[0]] = qs
                .measurement(fixed[0], px >> 1 & 1)
                .outcome(py >> 1 & 1)
                .clone();
            per_player[fixed[1]] = qs.measurement(fixed[1], px & 1).outcome(py & 1).clone();
            let op = per_player[0].kron(&per_player[1]).kron(&per_player[2]);
            for (s, &v) in op.mul_vec(psi).iter().enumerate() {
                coords.data[s * 17 + 1 + l] = v;
            }
        }

        // Orthonormal basis of the fixed pair's reduced state range; the
        // steered assemblage lives on it, so positivity is imposed on the
        // compressed blocks to keep the problem strictly feasible.
        let rho_pair = qs.state().reduced_state(&fixed);
        let (vals, vecs) = rho_pair.hermitian_eigen();
        let max_eig = vals.last().copied().unwrap_or(0.0).max(0.0);
        let kept: Vec<usize> = (0..4)
            .filter(|&k| vals[k] > RANK_TOLERANCE * max_eig.max(1.0))
            .collect();
        if kept.is_empty() {
            return Err(Error::Numerical("fixed pair state has rank zero".into()));
        }
        let mut range_basis = Rect {
            rows: 4,
            cols: kept.len(),
            data: vec![C64::new(0.0, 0.0); 4 * kept.len()],
        };
        for (u, &k) in kept.iter().enumerate() {
            for b in 0..4 {
                range_basis.data[b * kept.len() + u] = vecs[(b, k)];
            }
        }

        let built = DeviationSdpBuilder {
            game,
            player,
            coords,
            range_basis,
            dev_labels,
            pair_labels,
        };
        built.assemble()
    }

    /// Dimension of the complex variable matrix `[[P, K], [K†, I]]`.
    pub fn reduced_dim(&self) -> usize {
        4 + self.coords.rows
    }

    pub fn deviator(&self) -> usize {
        self.deviator
    }

    /// Deviator labels as (input, output), in build order.
    pub fn deviator_labels(&self) -> &[(usize, usize)] {
        &self.dev_labels
    }

    /// Pair labels as (joint input, joint output), in build order.
    pub fn pair_labels(&self) -> &[(usize, usize)] {
        &self.pair_labels
    }

    /// Reconstructs the 21×21 moment matrix (identity + the 20 labels, in
    /// this build's label order) from a solver solution.
    pub fn reconstruct_moments(&self, solution: &SdpSolution) -> Vec<C64> {
        let w = self.coords.rows;
        let q = 4 + w;
        let two_q = 2 * q;
        let x = &solution.blocks[0];
        // Average with the swapped-conjugate copy, then read P + iQ.
        let entry = |i: usize, j: usize| -> C64 {
            let re = 0.5 * (x[i * two_q + j] + x[(q + i) * two_q + (q + j)]);
            let im = 0.5 * (x[(q + i) * two_q + j] - x[i * two_q + (q + j)]);
            C64::new(re, im)
        };
        let mut gamma = vec![C64::new(0.0, 0.0); 21 * 21];
        // Corner block (identity + pair labels) is fixed data.
        let corner_pos = |l: usize| if l == 0 { 0 } else { 4 + l };
        for l in 0..17 {
            for m in 0..17 {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..w {
                    acc += self.coords.get(s, l).conj() * self.coords.get(s, m);
                }
                gamma[corner_pos(l) * 21 + corner_pos(m)] = acc;
            }
        }
        // Deviator rows: K V against the corner, P against the block.
        for d in 0..4 {
            for l in 0..17 {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..w {
                    acc += entry(d, 4 + s) * self.coords.get(s, l);
                }
                gamma[(1 + d) * 21 + corner_pos(l)] = acc;
                gamma[corner_pos(l) * 21 + (1 + d)] = acc.conj();
            }
            for d2 in 0..4 {
                gamma[(1 + d) * 21 + (1 + d2)] = entry(d, d2);
            }
        }
        gamma
    }
}

struct DeviationSdpBuilder<'a> {
    game: &'a Game,
    player: usize,
    /// 8 × 17 Gram-vector coordinates (identity, then pair labels).
    coords: Rect,
    /// 4 × rank orthonormal basis of the pair state's range.
    range_basis: Rect,
    dev_labels: Vec<(usize, usize)>,
    pair_labels: Vec<(usize, usize)>,
}

/// Linear form over the deviator entries `K[d, s]` with complex
/// coefficients.
type KExpr = BTreeMap<(usize, usize), C64>;

impl<'a> DeviationSdpBuilder<'a> {
    fn assemble(self) -> Result<DeviationSdp> {
        let w = self.coords.rows; // K has 4 rows and w columns
        let q = 4 + w;
        let rk = self.range_basis.cols;

        // Block 0: the embedded variable matrix. Then one scalar slack per
        // joint nonnegativity (64) and per marginal nonnegativity (4), and
        // one embedded assemblage block per deviator operator.
        let mut block_dims = vec![2 * q];
        block_dims.extend(std::iter::repeat_n(1, 64 + 4));
        block_dims.extend(std::iter::repeat_n(2 * rk, 4));
        let joint_slack_block = |d: usize, l: usize| 1 + d * 16 + l;
        let marg_slack_block = |d: usize| 1 + 64 + d;
        let sigma_block = |d: usize| 1 + 64 + 4 + d;

        let mut constraints: Vec<SdpConstraint> = Vec::new();

        // Helpers producing embedded-entry coefficients for a block holding
        // a complex Hermitian matrix of order `half`. `re` yields triplets
        // whose inner product with a structured embedding equals
        // coef·Re M[i, j]; `im` likewise for the imaginary part (i ≠ j).
        let re_in = |block: usize, half: usize, i: usize, j: usize, coef: f64| -> Vec<Triplet> {
            if i == j {
                vec![
                    Triplet::new(block, i, i, 0.5 * coef),
                    Triplet::new(block, half + i, half + i, 0.5 * coef),
                ]
            } else {
                let (i, j) = (i.min(j), i.max(j));
                vec![
                    Triplet::new(block, i, j, 0.25 * coef),
                    Triplet::new(block, half + i, half + j, 0.25 * coef),
                ]
            }
        };
        let im_in = |block: usize, half: usize, i: usize, j: usize, coef: f64| -> Vec<Triplet> {
            assert!(i != j, "diagonal imaginary parts are structurally zero");
            // Im M[j, i] = -Im M[i, j]
            let (i, j, coef) = if i < j { (i, j, coef) } else { (j, i, -coef) };
            vec![
                Triplet::new(block, j, half + i, 0.25 * coef),
                Triplet::new(block, i, half + j, -0.25 * coef),
            ]
        };
        let re = |i: usize, j: usize, coef: f64| re_in(0, q, i, j, coef);
        let im = |i: usize, j: usize, coef: f64| im_in(0, q, i, j, coef);

        // Expansions of Re/Im of a K-linear form into block-0 triplets.
        let expr_re = |expr: &KExpr| -> Vec<Triplet> {
            let mut terms = Vec::new();
            for (&(d, s), &c) in expr {
                if c.re != 0.0 {
                    terms.extend(re(d, 4 + s, c.re));
                }
                if c.im != 0.0 {
                    terms.extend(im(d, 4 + s, -c.im));
                }
            }
            terms
        };
        let expr_im = |expr: &KExpr| -> Vec<Triplet> {
            let mut terms = Vec::new();
            for (&(d, s), &c) in expr {
                if c.im != 0.0 {
                    terms.extend(re(d, 4 + s, c.im));
                }
                if c.re != 0.0 {
                    terms.extend(im(d, 4 + s, c.re));
                }
            }
            terms
        };

        // Identity corner of the reduced matrix.
        for s in 0..w {
            for t in s..w {
                let rhs = if s == t { 1.0 } else { 0.0 };
                constraints.push(SdpConstraint {
                    name: format!("corner_re({s},{t})"),
                    terms: re(4 + s, 4 + t, 1.0),
                    rhs,
                });
                if s != t {
                    constraints.push(SdpConstraint {
                        name: format!("corner_im({s},{t})"),
                        terms: im(4 + s, 4 + t, 1.0),
                        rhs: 0.0,
                    });
                }
            }
        }

        // Completeness: the two outputs of each deviator input sum to the
        // identity Gram vector (the state's own coordinates).
        for x in 0..2 {
            let rows: Vec<usize> = self
                .dev_labels
                .iter()
                .enumerate()
                .filter(|(_, &(xx, _))| xx == x)
                .map(|(pos, _)| pos)
                .collect();
            debug_assert_eq!(rows.len(), 2);
            for s in 0..w {
                let k_id = self.coords.get(s, 0);
                let mut terms_re = Vec::new();
                let mut terms_im = Vec::new();
                for &row in &rows {
                    terms_re.extend(re(row, 4 + s, 1.0));
                    terms_im.extend(im(row, 4 + s, 1.0));
                }
                constraints.push(SdpConstraint {
                    name: format!("complete_re({x},{s})"),
                    terms: terms_re,
                    rhs: k_id.re,
                });
                constraints.push(SdpConstraint {
                    name: format!("complete_im({x},{s})"),
                    terms: terms_im,
                    rhs: -k_id.im,
                });
            }
        }

        // Joint probabilities J(d, l) = Σ_s K[d, s] V[s, 1+l]: real and
        // nonnegative. Marginals m(d) use column 0 the same way.
        let column_expr = |d: usize, col: usize| -> KExpr {
            let mut expr = KExpr::new();
            for s in 0..w {
                let v = self.coords.get(s, col);
                if v != C64::new(0.0, 0.0) {
                    expr.insert((d, s), v);
                }
            }
            expr
        };
        for d in 0..4 {
            for l in 0..16 {
                let expr = column_expr(d, 1 + l);
                constraints.push(SdpConstraint {
                    name: format!("joint_im({d},{l})"),
                    terms: expr_im(&expr),
                    rhs: 0.0,
                });
                let mut terms = expr_re(&expr);
                terms.push(Triplet::new(joint_slack_block(d, l), 0, 0, -1.0));
                constraints.push(SdpConstraint {
                    name: format!("joint_nonneg({d},{l})"),
                    terms,
                    rhs: 0.0,
                });
            }
        }

        // Marginal nonnegativity, and the projective relations of the
        // deviator's operators: each diagonal moment equals the marginal
        // (Tr(A²ρ) = Tr(Aρ)) and the two outcomes of one input are
        // orthogonal (Tr(A_x^0 A_x^1 ρ) = 0).
        for d in 0..4 {
            let marg = column_expr(d, 0);
            let mut terms = expr_re(&marg);
            terms.push(Triplet::new(marg_slack_block(d), 0, 0, -1.0));
            constraints.push(SdpConstraint {
                name: format!("marg_nonneg({d})"),
                terms,
                rhs: 0.0,
            });

            let mut terms = expr_re(&marg);
            terms.extend(re(d, d, -1.0));
            constraints.push(SdpConstraint {
                name: format!("projective_diag({d})"),
                terms,
                rhs: 0.0,
            });
        }
        for x in 0..2 {
            let pos: Vec<usize> = (0..2)
                .map(|a| {
                    self.dev_labels
                        .iter()
                        .position(|&(xx, aa)| (xx, aa) == (x, a))
                        .expect("label orders cover every deviator label")
                })
                .collect();
            constraints.push(SdpConstraint {
                name: format!("orthogonal_re({x})"),
                terms: re(pos[0], pos[1], 1.0),
                rhs: 0.0,
            });
            constraints.push(SdpConstraint {
                name: format!("orthogonal_im({x})"),
                terms: im(pos[0], pos[1], 1.0),
                rhs: 0.0,
            });
        }

        // Steered assemblage of each deviator operator:
        // σ_d = Tr_dev |w_d⟩⟨Ψ| must be Hermitian and positive semidefinite.
        // With L_d[b, b'] := Σ_α K[d, merge(α, b)] Ψ[merge(α, b')] one has
        // σ_d[b, b'] = conj(L_d[b, b']); Hermiticity is linear in K, and
        // positivity is imposed on the compression to the pair state's
        // range, tied entry by entry to its own PSD block.
        let low = 2 - self.player; // non-deviator players after the deviator
        let merge = |alpha: usize, b: usize| -> usize {
            let high = b >> low;
            let lowbits = b & ((1 << low) - 1);
            (high << (low + 1)) | (alpha << low) | lowbits
        };
        let psi = |s: usize| self.coords.get(s, 0);
        let l_expr = |d: usize, b: usize, bp: usize| -> KExpr {
            let mut expr = KExpr::new();
            for alpha in 0..2 {
                let coef = psi(merge(alpha, bp));
                if coef != C64::new(0.0, 0.0) {
                    let key = (d, merge(alpha, b));
                    *expr.entry(key).or_insert(C64::new(0.0, 0.0)) += coef;
                }
            }
            expr
        };
        let expr_sub = |a: &KExpr, b: &KExpr| -> KExpr {
            let mut out = a.clone();
            for (&k, &c) in b {
                *out.entry(k).or_insert(C64::new(0.0, 0.0)) -= c;
            }
            out
        };
        let expr_add = |a: &KExpr, b: &KExpr| -> KExpr {
            let mut out = a.clone();
            for (&k, &c) in b {
                *out.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
            }
            out
        };
        let expr_scale =
            |a: &KExpr, c: C64| -> KExpr { a.iter().map(|(&k, &v)| (k, v * c)).collect() };

        for d in 0..4 {
            // Hermiticity: conj(L[b, b']) = L[b', b].
            for b in 0..4 {
                constraints.push(SdpConstraint {
                    name: format!("sigma_herm_diag({d},{b})"),
                    terms: expr_im(&l_expr(d, b, b)),
                    rhs: 0.0,
                });
                for bp in (b + 1)..4 {
                    let fwd = l_expr(d, b, bp);
                    let bwd = l_expr(d, bp, b);
                    constraints.push(SdpConstraint {
                        name: format!("sigma_herm_re({d},{b},{bp})"),
                        terms: expr_re(&expr_sub(&bwd, &fwd)),
                        rhs: 0.0,
                    });
                    constraints.push(SdpConstraint {
                        name: format!("sigma_herm_im({d},{b},{bp})"),
                        terms: expr_im(&expr_add(&bwd, &fwd)),
                        rhs: 0.0,
                    });
                }
            }
            // Compressed positivity: τ_d[u, v] = conj(T_d[u, v]) with
            // T_d[u, v] = Σ_{b,b'} U[b, u] conj(U[b', v]) L_d[b, b'].
            for u in 0..rk {
                for v in u..rk {
                    let mut t_expr = KExpr::new();
                    for b in 0..4 {
                        for bp in 0..4 {
                            let coef =
                                self.range_basis.get(b, u) * self.range_basis.get(bp, v).conj();
                            if coef != C64::new(0.0, 0.0) {
                                t_expr = expr_add(&t_expr, &expr_scale(&l_expr(d, b, bp), coef));
                            }
                        }
                    }
                    // Re τ[u,v] = Re T[u,v]
                    let mut terms = expr_re(&t_expr);
                    terms.extend(re_in(sigma_block(d), rk, u, v, -1.0));
                    constraints.push(SdpConstraint {
                        name: format!("sigma_tie_re({d},{u},{v})"),
                        terms,
                        rhs: 0.0,
                    });
                    if u != v {
                        // Im τ[u,v] = -Im T[u,v]
                        let mut terms = expr_im(&t_expr);
                        terms.extend(im_in(sigma_block(d), rk, u, v, 1.0));
                        constraints.push(SdpConstraint {
                            name: format!("sigma_tie_im({d},{u},{v})"),
                            terms,
                            rhs: 0.0,
                        });
                    }
                }
            }
        }

        // Objective: the deviator's average payoff, linear in the joints.
        let fixed: Vec<usize> = (0..3).filter(|&i| i != self.player).collect();
        let in_sizes = self.game.input_sizes();
        let out_sizes = self.game.output_sizes();
        let mut objective_map: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for (d, &(x_dev, a)) in self.dev_labels.iter().enumerate() {
            for (l, &(px, py)) in self.pair_labels.iter().enumerate() {
                let mut xt = [0usize; 3];
                xt[self.player] = x_dev;
                xt[fixed[0]] = px >> 1 & 1;
                xt[fixed[1]] = px & 1;
                let mut yt = [0usize; 3];
                yt[self.player] = a;
                yt[fixed[0]] = py >> 1 & 1;
                yt[fixed[1]] = py & 1;
                let x = joint_index(&in_sizes, &xt);
                let y = joint_index(&out_sizes, &yt);
                let weight = rational_to_f64(self.game.prior(x))
                    * rational_to_f64(&self.game.payoff(x, y)[self.player]);
                if weight == 0.0 {
                    continue;
                }
                let expr = column_expr(d, 1 + l);
                for t in expr_re(&expr) {
                    *objective_map.entry((t.block, t.row, t.col)).or_insert(0.0) +=
                        weight * t.value;
                }
            }
        }
        let objective: Vec<Triplet> = objective_map
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((b, i, j), v)| Triplet::new(b, i, j, v))
            .collect();

        let problem = SdpProblem {
            block_dims,
            objective,
            constraints,
        };
        Ok(DeviationSdp {
            problem,
            deviator: self.player,
            coords: self.coords,
            dev_labels: self.dev_labels,
            pair_labels: self.pair_labels,
        })
    }
}

/// Upper-bounds the deviator's payoff by solving the moment-matrix SDP.
pub fn npa_deviation_bound(
    game: &Game,
    qs: &QuantumStrategy,
    player: usize,
    tol: f64,
) -> Result<DeviationReport> {
    let built = DeviationSdp::build(game, qs, player)?;
    let solution = solve_sdp(&built.problem, tol)?;
    let behavior = behavior_of_quantum(qs)?;
    let current = game.average_payoffs(&behavior)?.get_f64(player);
    Ok(DeviationReport {
        player,
        current_payoff: current,
        best_response_value: solution.optimum,
        bound_method: BoundMethod::NpaSdp,
        witness: None,
        diagnostics: Some(SolverDiagnostics {
            iterations: solution.iterations,
            duality_gap: solution.gap,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::quantum::ghz_game_strategy;

    #[test]
    fn moment_matrix_labels_follow_the_fixed_order() {
        let game = catalog::game_promised();
        let qs = ghz_game_strategy();
        let mm = MomentMatrix::build(&game, &qs, 0).unwrap();
        assert_eq!(mm.labels().len(), 20);
        assert_eq!(mm.labels()[0].side, Side::Deviator);
        assert_eq!((mm.labels()[3].input, mm.labels()[3].output), (1, 1));
        assert_eq!(mm.labels()[4].side, Side::FixedPair);
        assert_eq!((mm.labels()[19].input, mm.labels()[19].output), (3, 3));
    }

    #[test]
    fn honest_moment_matrix_is_feasible() {
        let game = catalog::game_promised();
        let qs = ghz_game_strategy();
        for player in 0..3 {
            let mm = MomentMatrix::build(&game, &qs, player).unwrap();
            assert!(mm.honest_min_eigenvalue() >= -1e-8);
            assert!(mm.honest_constraint_residual() <= 1e-10);
            assert!(mm.honest_nonnegativity_violation() <= 1e-10);
            assert!(mm.honest_dependency_residual() <= 1e-10);
        }
    }

    #[test]
    fn pair_block_diagonal_is_a_distribution_per_input() {
        let game = catalog::game_full();
        let qs = ghz_game_strategy();
        let mm = MomentMatrix::build(&game, &qs, 0).unwrap();
        for px in 0..4 {
            let mut total = 0.0;
            for py in 0..4 {
                let idx = 4 + 4 * px + py;
                let v = mm.honest_entry(idx, idx);
                assert!(v.re >= -1e-12 && v.im.abs() < 1e-12);
                total += v.re;
            }
            assert!(
                (total - 1.0).abs() < 1e-9,
                "pair input {px} sums to {total}"
            );
        }
    }

    #[test]
    fn constant_payoff_game_bound_is_the_constant() {
        use crate::game_model::rat;
        let bits = || vec![vec!["0".to_string(), "1".to_string()]; 3];
        let game = Game::new(
            vec!["A".into(), "B".into(), "C".into()],
            bits(),
            bits(),
            vec![rat(1, 8); 8],
            vec![vec![vec![rat(3, 5); 3]; 8]; 8],
        )
        .unwrap();
        let qs = ghz_game_strategy();
        let report = npa_deviation_bound(&game, &qs, 0, 1e-7).unwrap();
        assert!(
            (report.best_response_value - 0.6).abs() < 1e-5,
            "bound {}",
            report.best_response_value
        );
    }
}
