//! Core game representation: games, behavior tables, payoff evaluation,
//! no-signalling checks, and three-party Bell functionals.
//!
//! A [`Game`] is a finite multiparty Bayesian game: per-player input and
//! output alphabets, an exact rational prior over joint inputs, and an exact
//! rational payoff vector for every (joint input, joint output) pair. A
//! [`Behavior`] is the conditional table `P(y|x)`; it is the common currency
//! between classical, correlated, and quantum strategies. Average payoffs are
//! `F_i = Σ_x P(x) Σ_y P(y|x) $_i(x,y)`.
//!
//! Joint symbols are ordered lexicographically by (player index, symbol order
//! declared in the game); all iteration and reporting follow this order.

mod bell;

pub use bell::{correlator, ghz_winning_probability, svetlichny_value};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational scalar used on every classical path.
pub type Rational = num_rational::BigRational;

/// Shorthand for a small rational literal.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Lossy conversion to double precision.
pub fn rational_to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// A scalar that is either exact or double precision, depending on which
/// representation produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Exact(Rational),
    Real(f64),
}

impl Num {
    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(r) => rational_to_f64(r),
            Num::Real(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Num::Exact(_))
    }
}

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Num::Exact(r) => write!(f, "{r}"),
            Num::Real(x) => write!(f, "{}", format_real(*x)),
        }
    }
}

/// Formats a real with six significant digits, as used in human-readable
/// reports. Exact rationals are always printed as reduced fractions instead.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

// ---------------------------------------------------------------------------
// Mixed-radix indexing over per-player alphabets
// ---------------------------------------------------------------------------

/// Number of joint symbols over the given per-player alphabet sizes.
pub fn joint_count(sizes: &[usize]) -> usize {
    sizes.iter().product()
}

/// Index of a joint symbol tuple, player 0 most significant.
pub fn joint_index(sizes: &[usize], tuple: &[usize]) -> usize {
    debug_assert_eq!(sizes.len(), tuple.len());
    let mut idx = 0;
    for (size, &symbol) in sizes.iter().zip(tuple) {
        debug_assert!(symbol < *size);
        idx = idx * size + symbol;
    }
    idx
}

/// Inverse of [`joint_index`].
pub fn joint_tuple(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut tuple = vec![0; sizes.len()];
    for pos in (0..sizes.len()).rev() {
        tuple[pos] = idx % sizes[pos];
        idx /= sizes[pos];
    }
    tuple
}

// ---------------------------------------------------------------------------
// Game
// ---------------------------------------------------------------------------

/// A finite multiparty Bayesian game with exact rational prior and payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    players: Vec<String>,
    inputs: Vec<Vec<String>>,
    outputs: Vec<Vec<String>>,
    /// Prior over joint inputs, indexed lexicographically.
    prior: Vec<Rational>,
    /// Payoff vectors, indexed `[joint input][joint output][player]`.
    payoffs: Vec<Vec<Vec<Rational>>>,
}

impl Game {
    /// Builds and validates a game from dense tables.
    ///
    /// The prior must be nonnegative and sum exactly to one; alphabets must be
    /// nonempty; payoff tables must cover every (x, y) cell with one entry per
    /// player.
    pub fn new(
        players: Vec<String>,
        inputs: Vec<Vec<String>>,
        outputs: Vec<Vec<String>>,
        prior: Vec<Rational>,
        payoffs: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        let n = players.len();
        if n < 2 {
            return Err(Error::Game(format!("need at least 2 players, got {n}")));
        }
        if inputs.len() != n || outputs.len() != n {
            return Err(Error::Game(
                "alphabet lists must have one entry per player".into(),
            ));
        }
        for (i, alphabet) in inputs.iter().chain(outputs.iter()).enumerate() {
            if alphabet.is_empty() {
                return Err(Error::Game(format!(
                    "alphabet {} is empty; alphabets must be nonempty",
                    i % n
                )));
            }
        }
        let game = Game {
            players,
            inputs,
            outputs,
            prior,
            payoffs,
        };
        let nx = game.joint_input_count();
        let ny = game.joint_output_count();
        if game.prior.len() != nx {
            return Err(Error::Game(format!(
                "prior has {} entries, expected {nx}",
                game.prior.len()
            )));
        }
        for (x, p) in game.prior.iter().enumerate() {
            if p.is_negative() {
                return Err(Error::Game(format!(
                    "prior of joint input {} is negative: {p}",
                    game.input_label(x)
                )));
            }
        }
        let total: Rational = game.prior.iter().sum();
        if total != Rational::from_integer(1.into()) {
            return Err(Error::Game(format!("prior sums to {total}, expected 1")));
        }
        if game.payoffs.len() != nx {
            return Err(Error::Game(format!(
                "payoff table has {} input rows, expected {nx}",
                game.payoffs.len()
            )));
        }
        for (x, row) in game.payoffs.iter().enumerate() {
            if row.len() != ny {
                return Err(Error::Game(format!(
                    "payoff row for input {} has {} output cells, expected {ny}",
                    game.input_label(x),
                    row.len()
                )));
            }
            for (y, cell) in row.iter().enumerate() {
                if cell.len() != n {
                    return Err(Error::Game(format!(
                        "payoff cell ({}, {}) has {} entries, expected {n}",
                        game.input_label(x),
                        game.output_label(y),
                        cell.len()
                    )));
                }
            }
        }
        Ok(game)
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    pub fn input_symbols(&self, player: usize) -> &[String] {
        &self.inputs[player]
    }

    pub fn output_symbols(&self, player: usize) -> &[String] {
        &self.outputs[player]
    }

    pub fn input_sizes(&self) -> Vec<usize> {
        self.inputs.iter().map(Vec::len).collect()
    }

    pub fn output_sizes(&self) -> Vec<usize> {
        self.outputs.iter().map(Vec::len).collect()
    }

    pub fn joint_input_count(&self) -> usize {
        joint_count(&self.input_sizes())
    }

    pub fn joint_output_count(&self) -> usize {
        joint_count(&self.output_sizes())
    }

    /// True when every player has binary inputs and outputs.
    pub fn is_binary(&self) -> bool {
        self.inputs.iter().all(|a| a.len() == 2) && self.outputs.iter().all(|a| a.len() == 2)
    }

    pub fn prior(&self, joint_input: usize) -> &Rational {
        &self.prior[joint_input]
    }

    /// Joint inputs with nonzero prior, in lexicographic order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.joint_input_count())
            .filter(|&x| !self.prior[x].is_zero())
            .collect()
    }

    /// Per-player payoffs at one (joint input, joint output) cell.
    pub fn payoff(&self, joint_input: usize, joint_output: usize) -> &[Rational] {
        &self.payoffs[joint_input][joint_output]
    }

    /// Sum of all players' payoffs at one cell.
    pub fn total_payoff(&self, joint_input: usize, joint_output: usize) -> Rational {
        self.payoffs[joint_input][joint_output].iter().sum()
    }

    pub fn input_tuple(&self, joint_input: usize) -> Vec<usize> {
        joint_tuple(&self.input_sizes(), joint_input)
    }

    pub fn output_tuple(&self, joint_output: usize) -> Vec<usize> {
        joint_tuple(&self.output_sizes(), joint_output)
    }

    /// Human-readable label of a joint input, e.g. `011`.
    pub fn input_label(&self, joint_input: usize) -> String {
        label(&self.inputs, &self.input_tuple(joint_input))
    }

    /// Human-readable label of a joint output.
    pub fn output_label(&self, joint_output: usize) -> String {
        label(&self.outputs, &self.output_tuple(joint_output))
    }

    /// Average payoff of every player under a behavior.
    ///
    /// Exact when the behavior is exact; double precision otherwise. Fails if
    /// the behavior is missing a row for an input with nonzero prior.
    pub fn average_payoffs(&self, behavior: &Behavior) -> Result<PayoffVector> {
        self.check_behavior_shape(behavior)?;
        let n = self.player_count();
        match &behavior.table {
            Table::Exact(rows) => {
                let mut acc = vec![Rational::zero(); n];
                for x in self.support() {
                    let row = rows[x].as_ref().ok_or_else(|| self.missing_entry(x))?;
                    for (y, prob) in row.iter().enumerate() {
                        if prob.is_zero() {
                            continue;
                        }
                        let weight = &self.prior[x] * prob;
                        for (i, f) in acc.iter_mut().enumerate() {
                            *f += &weight * &self.payoffs[x][y][i];
                        }
                    }
                }
                Ok(PayoffVector::Exact(acc))
            }
            Table::Real(rows) => {
                let mut acc = vec![0.0; n];
                for x in self.support() {
                    let row = rows[x].as_ref().ok_or_else(|| self.missing_entry(x))?;
                    let px = rational_to_f64(&self.prior[x]);
                    for (y, prob) in row.iter().enumerate() {
                        let weight = px * prob;
                        for (i, f) in acc.iter_mut().enumerate() {
                            *f += weight * rational_to_f64(&self.payoffs[x][y][i]);
                        }
                    }
                }
                Ok(PayoffVector::Real(acc))
            }
        }
    }

    /// Sum of all players' average payoffs under a behavior.
    pub fn total_average_payoff(&self, behavior: &Behavior) -> Result<Num> {
        Ok(self.average_payoffs(behavior)?.total())
    }

    fn check_behavior_shape(&self, behavior: &Behavior) -> Result<()> {
        if behavior.input_sizes != self.input_sizes()
            || behavior.output_sizes != self.output_sizes()
        {
            return Err(Error::Behavior(format!(
                "behavior shape {:?}->{:?} does not match game shape {:?}->{:?}",
                behavior.input_sizes,
                behavior.output_sizes,
                self.input_sizes(),
                self.output_sizes()
            )));
        }
        Ok(())
    }

    fn missing_entry(&self, joint_input: usize) -> Error {
        Error::MissingBehaviorEntry {
            input: self.input_label(joint_input),
        }
    }
}

fn label(alphabets: &[Vec<String>], tuple: &[usize]) -> String {
    let single_char = alphabets
        .iter()
        .all(|a| a.iter().all(|s| s.chars().count() == 1));
    let parts: Vec<&str> = tuple
        .iter()
        .enumerate()
        .map(|(i, &s)| alphabets[i][s].as_str())
        .collect();
    if single_char {
        parts.concat()
    } else {
        parts.join(",")
    }
}

// ---------------------------------------------------------------------------
// PayoffVector
// ---------------------------------------------------------------------------

/// Per-player average payoffs, exact or double precision.
#[derive(Debug, Clone, PartialEq)]
pub enum PayoffVector {
    Exact(Vec<Rational>),
    Real(Vec<f64>),
}

impl PayoffVector {
    pub fn len(&self) -> usize {
        match self {
            PayoffVector::Exact(v) => v.len(),
            PayoffVector::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_f64(&self, player: usize) -> f64 {
        match self {
            PayoffVector::Exact(v) => rational_to_f64(&v[player]),
            PayoffVector::Real(v) => v[player],
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.get_f64(i)).collect()
    }

    /// Social payoff `F_total = Σ_i F_i`.
    pub fn total(&self) -> Num {
        match self {
            PayoffVector::Exact(v) => Num::Exact(v.iter().sum()),
            PayoffVector::Real(v) => Num::Real(v.iter().sum()),
        }
    }
}

// ---------------------------------------------------------------------------
// Behavior
// ---------------------------------------------------------------------------

/// Which arithmetic the behavior table carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Exact,
    Real,
}

#[derive(Debug, Clone, PartialEq)]
enum Table {
    Exact(Vec<Option<Vec<Rational>>>),
    Real(Vec<Option<Vec<f64>>>),
}

/// Conditional distribution table `P(y|x)` over joint outputs given joint
/// inputs.
///
/// Rows may be absent for inputs a game never draws; payoff evaluation only
/// requires rows on the prior support. Exact tables are validated to sum to
/// one exactly per row; real tables within `1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    input_sizes: Vec<usize>,
    output_sizes: Vec<usize>,
    table: Table,
}

/// Row-sum tolerance for real-valued behaviors.
pub const REAL_ROW_TOLERANCE: f64 = 1e-9;

impl Behavior {
    /// Exact behavior from one distribution per joint input.
    pub fn from_exact(
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        Self::from_exact_rows(
            input_sizes,
            output_sizes,
            rows.into_iter().map(Some).collect(),
        )
    }

    /// Exact behavior allowing missing rows.
    pub fn from_exact_rows(
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        rows: Vec<Option<Vec<Rational>>>,
    ) -> Result<Self> {
        let behavior = Behavior {
            input_sizes,
            output_sizes,
            table: Table::Exact(rows),
        };
        behavior.validate()?;
        Ok(behavior)
    }

    /// Real-valued behavior from one distribution per joint input.
    pub fn from_real(
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::from_real_rows(
            input_sizes,
            output_sizes,
            rows.into_iter().map(Some).collect(),
        )
    }

    /// Real-valued behavior allowing missing rows.
    pub fn from_real_rows(
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        rows: Vec<Option<Vec<f64>>>,
    ) -> Result<Self> {
        let behavior = Behavior {
            input_sizes,
            output_sizes,
            table: Table::Real(rows),
        };
        behavior.validate()?;
        Ok(behavior)
    }

    /// The uniform behavior: every joint output equally likely for every input.
    pub fn uniform(input_sizes: Vec<usize>, output_sizes: Vec<usize>) -> Self {
        let ny = joint_count(&output_sizes);
        let nx = joint_count(&input_sizes);
        let p = Rational::new(1.into(), (ny as i64).into());
        let rows = vec![Some(vec![p; ny]); nx];
        Behavior {
            input_sizes,
            output_sizes,
            table: Table::Exact(rows),
        }
    }

    fn validate(&self) -> Result<()> {
        let nx = joint_count(&self.input_sizes);
        let ny = joint_count(&self.output_sizes);
        let row_len = |x: usize, len: usize| -> Result<()> {
            if len != ny {
                return Err(Error::Behavior(format!(
                    "row for joint input {x} has {len} entries, expected {ny}"
                )));
            }
            Ok(())
        };
        match &self.table {
            Table::Exact(rows) => {
                if rows.len() != nx {
                    return Err(Error::Behavior(format!(
                        "table has {} rows, expected {nx}",
                        rows.len()
                    )));
                }
                for (x, row) in rows.iter().enumerate() {
                    let Some(row) = row else { continue };
                    row_len(x, row.len())?;
                    let mut sum = Rational::zero();
                    for p in row {
                        if p.is_negative() {
                            return Err(Error::Behavior(format!(
                                "negative probability {p} in row {x}"
                            )));
                        }
                        sum += p;
                    }
                    if sum != Rational::from_integer(1.into()) {
                        return Err(Error::Behavior(format!(
                            "row {x} sums to {sum}, expected 1"
                        )));
                    }
                }
            }
            Table::Real(rows) => {
                if rows.len() != nx {
                    return Err(Error::Behavior(format!(
                        "table has {} rows, expected {nx}",
                        rows.len()
                    )));
                }
                for (x, row) in rows.iter().enumerate() {
                    let Some(row) = row else { continue };
                    row_len(x, row.len())?;
                    let mut sum = 0.0;
                    for &p in row {
                        if p < -REAL_ROW_TOLERANCE {
                            return Err(Error::Behavior(format!(
                                "negative probability {p} in row {x}"
                            )));
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > REAL_ROW_TOLERANCE {
                        return Err(Error::Behavior(format!(
                            "row {x} sums to {sum}, expected 1 within {REAL_ROW_TOLERANCE}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn representation(&self) -> Representation {
        match self.table {
            Table::Exact(_) => Representation::Exact,
            Table::Real(_) => Representation::Real,
        }
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_sizes(&self) -> &[usize] {
        &self.output_sizes
    }

    pub fn player_count(&self) -> usize {
        self.input_sizes.len()
    }

    pub fn joint_input_count(&self) -> usize {
        joint_count(&self.input_sizes)
    }

    pub fn joint_output_count(&self) -> usize {
        joint_count(&self.output_sizes)
    }

    pub fn has_row(&self, joint_input: usize) -> bool {
        match &self.table {
            Table::Exact(rows) => rows[joint_input].is_some(),
            Table::Real(rows) => rows[joint_input].is_some(),
        }
    }

    /// A row as doubles, regardless of representation.
    pub fn row_f64(&self, joint_input: usize) -> Result<Vec<f64>> {
        match &self.table {
            Table::Exact(rows) => rows[joint_input]
                .as_ref()
                .map(|r| r.iter().map(rational_to_f64).collect()),
            Table::Real(rows) => rows[joint_input].clone(),
        }
        .ok_or(Error::MissingBehaviorEntry {
            input: format!("#{joint_input}"),
        })
    }

    /// A row of an exact behavior.
    pub fn row_exact(&self, joint_input: usize) -> Result<&[Rational]> {
        match &self.table {
            Table::Exact(rows) => rows[joint_input]
                .as_deref()
                .ok_or(Error::MissingBehaviorEntry {
                    input: format!("#{joint_input}"),
                }),
            Table::Real(_) => Err(Error::Behavior(
                "behavior is real-valued, no exact rows available".into(),
            )),
        }
    }

    pub fn prob_f64(&self, joint_input: usize, joint_output: usize) -> Result<f64> {
        Ok(self.row_f64(joint_input)?[joint_output])
    }

    /// Converts to the double-precision representation.
    pub fn to_real(&self) -> Behavior {
        let rows = match &self.table {
            Table::Exact(rows) => rows
                .iter()
                .map(|row| {
                    row.as_ref()
                        .map(|r| r.iter().map(rational_to_f64).collect())
                })
                .collect(),
            Table::Real(rows) => rows.clone(),
        };
        Behavior {
            input_sizes: self.input_sizes.clone(),
            output_sizes: self.output_sizes.clone(),
            table: Table::Real(rows),
        }
    }

    /// Convex mixture `λ a + (1−λ) b` of two exact behaviors.
    pub fn mix(lambda: &Rational, a: &Behavior, b: &Behavior) -> Result<Behavior> {
        if a.input_sizes != b.input_sizes || a.output_sizes != b.output_sizes {
            return Err(Error::Behavior(
                "mixing behaviors of different shapes".into(),
            ));
        }
        let (Table::Exact(rows_a), Table::Exact(rows_b)) = (&a.table, &b.table) else {
            return Err(Error::Behavior("mix requires exact behaviors".into()));
        };
        let one = Rational::from_integer(1.into());
        let mu = &one - lambda;
        let rows = rows_a
            .iter()
            .zip(rows_b)
            .map(|(ra, rb)| match (ra, rb) {
                (Some(ra), Some(rb)) => Some(
                    ra.iter()
                        .zip(rb)
                        .map(|(pa, pb)| lambda * pa + &mu * pb)
                        .collect(),
                ),
                _ => None,
            })
            .collect();
        Behavior::from_exact_rows(a.input_sizes.clone(), a.output_sizes.clone(), rows)
    }
}

// ---------------------------------------------------------------------------
// No-signalling
// ---------------------------------------------------------------------------

/// Outcome of a no-signalling check.
///
/// No-signalling: for every proper nonempty player subset, the marginal
/// distribution of the subset's outputs depends only on the subset's own
/// inputs.
#[derive(Debug, Clone)]
pub struct NoSignallingReport {
    pub pass: bool,
    pub tolerance: f64,
    /// Largest absolute marginal discrepancy found.
    pub worst_violation: f64,
    /// Where the worst discrepancy occurred, if any discrepancy was nonzero.
    pub worst_case: Option<NoSignallingViolation>,
}

/// A witness that some subset's output marginal moved when only the
/// complementary players' inputs changed.
#[derive(Debug, Clone)]
pub struct NoSignallingViolation {
    /// Players whose output marginal was compared.
    pub subset: Vec<usize>,
    /// The two full joint inputs that agree on the subset but disagree
    /// elsewhere.
    pub inputs_a: Vec<usize>,
    pub inputs_b: Vec<usize>,
    /// The subset output cell with the largest gap.
    pub subset_outputs: Vec<usize>,
}

/// Checks the no-signalling condition on every proper nonempty player subset.
///
/// Missing rows are skipped. Exact behaviors are compared in exact
/// arithmetic, so exactly no-signalling tables report a violation of zero
/// even at tolerance zero.
pub fn check_no_signalling(behavior: &Behavior, tol: f64) -> NoSignallingReport {
    let n = behavior.player_count();
    let input_sizes = behavior.input_sizes().to_vec();
    let nx = behavior.joint_input_count();

    let mut worst = 0.0_f64;
    let mut worst_case = None;

    // Subsets as bitmasks over players; skip empty and full sets.
    for mask in 1..(1usize << n) - 1 {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub_out_sizes: Vec<usize> =
            subset.iter().map(|&i| behavior.output_sizes()[i]).collect();

        // Group joint inputs by the subset's own inputs.
        let mut groups: std::collections::BTreeMap<Vec<usize>, Vec<usize>> =
            std::collections::BTreeMap::new();
        for x in 0..nx {
            if !behavior.has_row(x) {
                continue;
            }
            let tuple = joint_tuple(&input_sizes, x);
            let key: Vec<usize> = subset.iter().map(|&i| tuple[i]).collect();
            groups.entry(key).or_default().push(x);
        }

        for xs in groups.values() {
            if xs.len() < 2 {
                continue;
            }
            let reference = marginal(behavior, &subset, &sub_out_sizes, xs[0]);
            for &x in &xs[1..] {
                let other = marginal(behavior, &subset, &sub_out_sizes, x);
                for (cell, gap) in reference.gaps(&other).into_iter().enumerate() {
                    if gap > worst {
                        worst = gap;
                        worst_case = Some(NoSignallingViolation {
                            subset: subset.clone(),
                            inputs_a: joint_tuple(&input_sizes, xs[0]),
                            inputs_b: joint_tuple(&input_sizes, x),
                            subset_outputs: joint_tuple(&sub_out_sizes, cell),
                        });
                    }
                }
            }
        }
    }

    NoSignallingReport {
        pass: worst <= tol,
        tolerance: tol,
        worst_violation: worst,
        worst_case,
    }
}

enum MarginalTable {
    Exact(Vec<Rational>),
    Real(Vec<f64>),
}

impl MarginalTable {
    /// Absolute cell gaps against another table of the same representation;
    /// exact differences convert to doubles only after subtracting.
    fn gaps(&self, other: &MarginalTable) -> Vec<f64> {
        match (self, other) {
            (MarginalTable::Exact(a), MarginalTable::Exact(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let diff = x - y;
                    if diff.is_zero() {
                        0.0
                    } else {
                        rational_to_f64(&diff).abs()
                    }
                })
                .collect(),
            (MarginalTable::Real(a), MarginalTable::Real(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect()
            }
            _ => unreachable!("one behavior has one representation"),
        }
    }
}

/// Marginal of the subset's outputs for one joint input.
fn marginal(
    behavior: &Behavior,
    subset: &[usize],
    sub_out_sizes: &[usize],
    x: usize,
) -> MarginalTable {
    let out_sizes = behavior.output_sizes().to_vec();
    let cells = joint_count(sub_out_sizes);
    let cell_of = |y: usize| {
        let tuple = joint_tuple(&out_sizes, y);
        let key: Vec<usize> = subset.iter().map(|&i| tuple[i]).collect();
        joint_index(sub_out_sizes, &key)
    };
    match behavior.representation() {
        Representation::Exact => {
            let row = behavior.row_exact(x).expect("caller checked row presence");
            let mut marg = vec![Rational::zero(); cells];
            for (y, p) in row.iter().enumerate() {
                marg[cell_of(y)] += p;
            }
            MarginalTable::Exact(marg)
        }
        Representation::Real => {
            let row = behavior.row_f64(x).expect("caller checked row presence");
            let mut marg = vec![0.0; cells];
            for (y, p) in row.iter().enumerate() {
                marg[cell_of(y)] += p;
            }
            MarginalTable::Real(marg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_shape(n: usize) -> (Vec<usize>, Vec<usize>) {
        (vec![2; n], vec![2; n])
    }

    #[test]
    fn joint_indexing_round_trips() {
        let sizes = vec![2, 3, 2];
        for idx in 0..joint_count(&sizes) {
            let tuple = joint_tuple(&sizes, idx);
            assert_eq!(joint_index(&sizes, &tuple), idx);
        }
        // player 0 is most significant
        assert_eq!(joint_index(&sizes, &[1, 0, 0]), 6);
        assert_eq!(joint_index(&sizes, &[0, 0, 1]), 1);
    }

    #[test]
    fn uniform_behavior_is_normalized() {
        let (i, o) = binary_shape(3);
        let b = Behavior::uniform(i, o);
        assert_eq!(b.representation(), Representation::Exact);
        for x in 0..8 {
            let row = b.row_exact(x).unwrap();
            assert_eq!(row.iter().sum::<Rational>(), rat(1, 1));
        }
    }

    #[test]
    fn rejects_unnormalized_rows() {
        let (i, o) = binary_shape(2);
        let mut rows = vec![vec![rat(1, 4); 4]; 4];
        rows[2][0] = rat(1, 2);
        let err = Behavior::from_exact(i, o, rows).unwrap_err();
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn missing_row_is_reported_with_input_label() {
        let game = crate::catalog::ghz_game();
        let (i, o) = binary_shape(3);
        let mut rows: Vec<Option<Vec<Rational>>> = vec![Some(vec![rat(1, 8); 8]); 8];
        rows[3] = None; // joint input 011, which the GHZ prior supports
        let b = Behavior::from_exact_rows(i, o, rows).unwrap();
        let err = game.average_payoffs(&b).unwrap_err();
        assert!(err.to_string().contains("011"), "got: {err}");
    }

    #[test]
    fn no_signalling_flags_dependent_marginal() {
        // Bob copies Alice's input; Alice and Charlie output uniformly.
        let (i, o) = binary_shape(3);
        let mut rows = Vec::new();
        for x in 0..8 {
            let xa = x >> 2 & 1;
            let mut row = vec![rat(0, 1); 8];
            for y in 0..8usize {
                let yb = y >> 1 & 1;
                if yb == xa {
                    row[y] = rat(1, 4);
                }
            }
            rows.push(row);
        }
        let b = Behavior::from_exact(i, o, rows).unwrap();
        let report = check_no_signalling(&b, 1e-12);
        assert!(!report.pass);
        assert!((report.worst_violation - 1.0).abs() < 1e-12);
        let case = report.worst_case.unwrap();
        assert_eq!(case.subset, vec![1], "Bob's marginal is the one that moves");
        assert_ne!(case.inputs_a[0], case.inputs_b[0], "Alice's input differs");
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Game>();
        assert_send_sync::<Behavior>();
        assert_send_sync::<PayoffVector>();
        assert_send_sync::<crate::quantum::QuantumStrategy>();
        assert_send_sync::<crate::classical::CorrelatedStrategy>();
    }

    #[test]
    fn format_real_uses_six_significant_digits() {
        assert_eq!(format_real(1.1380711874576983), "1.13807");
        assert_eq!(format_real(3.414213562), "3.41421");
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(4.0), "4");
        assert_eq!(format_real(-0.25), "-0.25");
    }
}
