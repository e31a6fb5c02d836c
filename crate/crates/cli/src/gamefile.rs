//! The game file format: a JSON document describing players, alphabets, the
//! prior, and the payoff table.
//!
//! ```json
//! {
//!   "players": ["Alice", "Bob", "Charlie"],
//!   "inputs":  [["0", "1"], ["0", "1"], ["0", "1"]],
//!   "outputs": [["0", "1"], ["0", "1"], ["0", "1"]],
//!   "prior":   [ { "x": ["0", "0", "0"], "p": "1/4" }, ... ],
//!   "payoffs": [ { "x": ["0", "1", "1"], "y": ["1", "0", "0"],
//!                  "pay": ["2", "1", "1"] }, ... ]
//! }
//! ```
//!
//! Rationals are written as `"num/den"` or plain integer strings. Joint
//! inputs absent from `prior` have probability zero; `(x, y)` rows absent
//! from `payoffs` pay zero to everyone. Serialization is canonical: only
//! nonzero prior entries and payoff rows appear, in lexicographic symbol
//! order, with reduced fractions — so `serialize ∘ parse` is the identity on
//! canonical files.

use std::str::FromStr;

use advice_games::game_model::{joint_index, Game, Rational};
use advice_games::Error;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameFile {
    pub players: Vec<String>,
    pub inputs: Vec<Vec<String>>,
    pub outputs: Vec<Vec<String>>,
    pub prior: Vec<PriorEntry>,
    pub payoffs: Vec<PayoffEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorEntry {
    pub x: Vec<String>,
    pub p: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PayoffEntry {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub pay: Vec<String>,
}

/// Parses a rational in `"num/den"` or integer form.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    Rational::from_str(text.trim()).map_err(|e| Error::Game(format!("bad rational `{text}`: {e}")))
}

/// Renders a rational in the file format (reduced, `/1` omitted).
pub fn rational_to_string(value: &Rational) -> String {
    value.to_string()
}

fn symbol_indices(
    alphabets: &[Vec<String>],
    symbols: &[String],
    what: &str,
) -> Result<Vec<usize>, Error> {
    if symbols.len() != alphabets.len() {
        return Err(Error::Game(format!(
            "{what} lists {} symbols for {} players",
            symbols.len(),
            alphabets.len()
        )));
    }
    symbols
        .iter()
        .zip(alphabets)
        .enumerate()
        .map(|(i, (sym, alphabet))| {
            alphabet.iter().position(|s| s == sym).ok_or_else(|| {
                Error::Game(format!(
                    "{what}: symbol `{sym}` not in player {i}'s alphabet"
                ))
            })
        })
        .collect()
}

impl GameFile {
    /// Converts the document into a validated [`Game`].
    pub fn to_game(&self) -> Result<Game, Error> {
        let in_sizes: Vec<usize> = self.inputs.iter().map(Vec::len).collect();
        let out_sizes: Vec<usize> = self.outputs.iter().map(Vec::len).collect();
        let nx: usize = in_sizes.iter().product();
        let ny: usize = out_sizes.iter().product();
        let n = self.players.len();

        let mut prior = vec![Rational::zero(); nx.max(1)];
        let mut sum = Rational::zero();
        for entry in &self.prior {
            let idx = joint_index(&in_sizes, &symbol_indices(&self.inputs, &entry.x, "prior")?);
            let p = parse_rational(&entry.p)?;
            sum += &p;
            prior[idx] += p;
        }
        if sum != Rational::from_integer(1.into()) {
            return Err(Error::Game(format!("prior sums to {sum}, expected 1")));
        }

        let mut payoffs = vec![vec![vec![Rational::zero(); n]; ny.max(1)]; nx.max(1)];
        for entry in &self.payoffs {
            let x = joint_index(
                &in_sizes,
                &symbol_indices(&self.inputs, &entry.x, "payoff x")?,
            );
            let y = joint_index(
                &out_sizes,
                &symbol_indices(&self.outputs, &entry.y, "payoff y")?,
            );
            if entry.pay.len() != n {
                return Err(Error::Game(format!(
                    "payoff row for x={:?} y={:?} lists {} values for {n} players",
                    entry.x,
                    entry.y,
                    entry.pay.len()
                )));
            }
            for (i, text) in entry.pay.iter().enumerate() {
                payoffs[x][y][i] = parse_rational(text)?;
            }
        }

        Game::new(
            self.players.clone(),
            self.inputs.clone(),
            self.outputs.clone(),
            prior,
            payoffs,
        )
    }

    /// Canonical document of a game: nonzero rows only, lexicographic order.
    pub fn from_game(game: &Game) -> GameFile {
        let n = game.player_count();
        let inputs: Vec<Vec<String>> = (0..n).map(|i| game.input_symbols(i).to_vec()).collect();
        let outputs: Vec<Vec<String>> = (0..n).map(|i| game.output_symbols(i).to_vec()).collect();

        let mut prior = Vec::new();
        for x in 0..game.joint_input_count() {
            let p = game.prior(x);
            if p.is_zero() {
                continue;
            }
            let tuple = game.input_tuple(x);
            prior.push(PriorEntry {
                x: tuple
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| inputs[i][s].clone())
                    .collect(),
                p: rational_to_string(p),
            });
        }

        let mut payoffs = Vec::new();
        for x in 0..game.joint_input_count() {
            let xt = game.input_tuple(x);
            for y in 0..game.joint_output_count() {
                let cell = game.payoff(x, y);
                if cell.iter().all(Rational::is_zero) {
                    continue;
                }
                let yt = game.output_tuple(y);
                payoffs.push(PayoffEntry {
                    x: xt
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| inputs[i][s].clone())
                        .collect(),
                    y: yt
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| outputs[i][s].clone())
                        .collect(),
                    pay: cell.iter().map(rational_to_string).collect(),
                });
            }
        }

        GameFile {
            players: game.player_names().to_vec(),
            inputs,
            outputs,
            prior,
            payoffs,
        }
    }
}

/// Parses a game file, reporting the line and column on syntax errors.
pub fn parse_game_str(text: &str) -> Result<Game, Error> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| {
        Error::Game(format!(
            "malformed game file at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    file.to_game()
}

/// Reads and parses a game file from disk.
pub fn parse_game_file(path: &std::path::Path) -> Result<Game, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Game(format!("cannot read {}: {e}", path.display())))?;
    parse_game_str(&text)
}

/// Canonical serialization of a game.
pub fn game_to_string(game: &Game) -> String {
    serde_json::to_string_pretty(&GameFile::from_game(game)).expect("game file serializes")
}
