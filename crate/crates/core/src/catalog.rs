//! Built-in three-player games with exact rational priors and payoff tables.
//!
//! Three games ship with the crate:
//!
//! * `ghz` — the common-interest GHZ game. Inputs are promised to satisfy
//!   `⊕x = 0`; every player wins 1 when the outputs hit the target parity.
//! * `promised` — a conflicting-interest variant of the GHZ game on the same
//!   promised inputs. On the all-zero input every player earns `4/3` at even
//!   output parity; on the other promised inputs the odd-parity outcomes pay
//!   `(2,1,1)`, `(1,2,1)`, `(1,1,2)` or `(4/3,4/3,4/3)` depending on who
//!   outputs the lone `1` (or nobody does).
//! * `full` — a conflicting-interest game on all eight inputs with a uniform
//!   prior. Inputs of Hamming weight 0 or 1 reward even output parity, the
//!   rest reward odd parity; the asymmetric payoffs rotate with the input.
//!
//! Payoff tables are stored as explicit literal data rather than generated
//! from the parity rules; a unit test regenerates them from the rules and
//! compares, so a transcription slip in either direction fails loudly.
//!
//! Joint symbols are indexed lexicographically: `x = 4·x_A + 2·x_B + x_C` and
//! likewise for outputs.

use crate::game_model::{rat, Game, Rational};

/// Identifies a built-in game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogName {
    Ghz,
    Promised,
    Full,
}

impl CatalogName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CatalogName::Ghz => "ghz",
            CatalogName::Promised => "promised",
            CatalogName::Full => "full",
        }
    }

    pub fn parse(name: &str) -> Option<CatalogName> {
        match name {
            "ghz" => Some(CatalogName::Ghz),
            "promised" => Some(CatalogName::Promised),
            "full" => Some(CatalogName::Full),
            _ => None,
        }
    }
}

impl std::fmt::Display for CatalogName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A built-in game together with a short description.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: CatalogName,
    pub game: Game,
    pub notes: &'static str,
}

/// All built-in games, in catalog order.
pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: CatalogName::Ghz,
            game: ghz_game(),
            notes: "common-interest GHZ game on promised inputs (xA^xB^xC = 0); \
                    quantum advice wins with certainty, classical tops out at 3/4",
        },
        CatalogEntry {
            name: CatalogName::Promised,
            game: game_promised(),
            notes: "conflicting-interest game on the GHZ promise; classical social \
                    optimum 3, GHZ-state strategies reach total 4 at (4/3, 4/3, 4/3)",
        },
        CatalogEntry {
            name: CatalogName::Full,
            game: game_full(),
            notes: "conflicting-interest game on all eight inputs; total payoff obeys \
                    2 + S/4 for the Svetlichny expression S, so quantum advice lifts \
                    the social optimum from 3 to 2+sqrt(2)",
        },
    ]
}

/// Looks a built-in game up by name (`ghz`, `promised`, `full`).
pub fn by_name(name: &str) -> Option<Game> {
    CatalogName::parse(name).map(|n| match n {
        CatalogName::Ghz => ghz_game(),
        CatalogName::Promised => game_promised(),
        CatalogName::Full => game_full(),
    })
}

const Z: (i64, i64) = (0, 1);
const ONE: (i64, i64) = (1, 1);
const FT: (i64, i64) = (4, 3); // 4/3, the fair share of a total payoff of 4

/// Prior weight 1/4 on the promise set {000, 011, 101, 110}.
const PROMISE_PRIOR: [(i64, i64); 8] = [(1, 4), Z, Z, (1, 4), Z, (1, 4), (1, 4), Z];

type Row = [[(i64, i64); 3]; 8];

/// GHZ game: everyone earns 1 on the winning parity. Rows for inputs outside
/// the promise never occur and pay zero.
const GHZ_PAYOFFS: [Row; 8] = [
    // x = 000: win on even parity (outputs 000, 011, 101, 110)
    [
        [ONE; 3], [Z; 3], [Z; 3], [ONE; 3], [Z; 3], [ONE; 3], [ONE; 3], [Z; 3],
    ],
    [[Z; 3]; 8], // x = 001 (off promise)
    [[Z; 3]; 8], // x = 010 (off promise)
    // x = 011: win on odd parity (outputs 001, 010, 100, 111)
    [
        [Z; 3], [ONE; 3], [ONE; 3], [Z; 3], [ONE; 3], [Z; 3], [Z; 3], [ONE; 3],
    ],
    [[Z; 3]; 8], // x = 100 (off promise)
    // x = 101
    [
        [Z; 3], [ONE; 3], [ONE; 3], [Z; 3], [ONE; 3], [Z; 3], [Z; 3], [ONE; 3],
    ],
    // x = 110
    [
        [Z; 3], [ONE; 3], [ONE; 3], [Z; 3], [ONE; 3], [Z; 3], [Z; 3], [ONE; 3],
    ],
    [[Z; 3]; 8], // x = 111 (off promise)
];

/// The conflicting-interest row used on inputs that reward odd output parity:
/// (2,1,1) at y=100, (1,2,1) at y=010, (1,1,2) at y=001, (4/3,4/3,4/3) at
/// y=111, zero on even parity.
const ODD_CONFLICT_ROW: Row = [
    [Z; 3],             // y = 000
    [ONE, ONE, (2, 1)], // y = 001
    [ONE, (2, 1), ONE], // y = 010
    [Z; 3],             // y = 011
    [(2, 1), ONE, ONE], // y = 100
    [Z; 3],             // y = 101
    [Z; 3],             // y = 110
    [FT, FT, FT],       // y = 111
];

/// Mirror image used on inputs that reward even output parity: (2,1,1) at
/// y=011, (1,2,1) at y=101, (1,1,2) at y=110, (4/3,4/3,4/3) at y=000.
const EVEN_CONFLICT_ROW: Row = [
    [FT, FT, FT],       // y = 000
    [Z; 3],             // y = 001
    [Z; 3],             // y = 010
    [(2, 1), ONE, ONE], // y = 011
    [Z; 3],             // y = 100
    [ONE, (2, 1), ONE], // y = 101
    [ONE, ONE, (2, 1)], // y = 110
    [Z; 3],             // y = 111
];

/// Common-payoff row 4/3 each on even output parity.
const EVEN_FAIR_ROW: Row = [
    [FT, FT, FT],
    [Z; 3],
    [Z; 3],
    [FT, FT, FT],
    [Z; 3],
    [FT, FT, FT],
    [FT, FT, FT],
    [Z; 3],
];

/// Common-payoff row 4/3 each on odd output parity.
const ODD_FAIR_ROW: Row = [
    [Z; 3],
    [FT, FT, FT],
    [FT, FT, FT],
    [Z; 3],
    [FT, FT, FT],
    [Z; 3],
    [Z; 3],
    [FT, FT, FT],
];

const PROMISED_PAYOFFS: [Row; 8] = [
    EVEN_FAIR_ROW,    // x = 000
    [[Z; 3]; 8],      // x = 001 (off promise)
    [[Z; 3]; 8],      // x = 010 (off promise)
    ODD_CONFLICT_ROW, // x = 011
    [[Z; 3]; 8],      // x = 100 (off promise)
    ODD_CONFLICT_ROW, // x = 101
    ODD_CONFLICT_ROW, // x = 110
    [[Z; 3]; 8],      // x = 111 (off promise)
];

const FULL_PAYOFFS: [Row; 8] = [
    EVEN_FAIR_ROW,     // x = 000
    EVEN_CONFLICT_ROW, // x = 001
    EVEN_CONFLICT_ROW, // x = 010
    ODD_CONFLICT_ROW,  // x = 011
    EVEN_CONFLICT_ROW, // x = 100
    ODD_CONFLICT_ROW,  // x = 101
    ODD_CONFLICT_ROW,  // x = 110
    ODD_FAIR_ROW,      // x = 111
];

fn build(prior: &[(i64, i64); 8], payoffs: &[Row; 8]) -> Game {
    let players = vec!["Alice".into(), "Bob".into(), "Charlie".into()];
    let bits = || vec![vec!["0".to_string(), "1".to_string()]; 3];
    let prior: Vec<Rational> = prior.iter().map(|&(n, d)| rat(n, d)).collect();
    let payoffs: Vec<Vec<Vec<Rational>>> = payoffs
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| cell.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect()
        })
        .collect();
    Game::new(players, bits(), bits(), prior, payoffs).expect("catalog game is valid")
}

/// The common-interest GHZ game.
pub fn ghz_game() -> Game {
    build(&PROMISE_PRIOR, &GHZ_PAYOFFS)
}

/// The conflicting-interest game on the GHZ promise.
pub fn game_promised() -> Game {
    build(&PROMISE_PRIOR, &PROMISED_PAYOFFS)
}

/// The conflicting-interest game on all eight inputs.
pub fn game_full() -> Game {
    build(&[(1, 8); 8], &FULL_PAYOFFS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn parity(mut v: usize) -> usize {
        v ^= v >> 2;
        v ^= v >> 1;
        v & 1
    }

    /// Regenerates each payoff table from the parity rules and compares it
    /// against the stored literals, entry by entry.
    #[test]
    fn literal_tables_match_generated_tables() {
        let ghz = ghz_game();
        for x in [0usize, 3, 5, 6] {
            let winning = usize::from(x != 0);
            for y in 0..8 {
                let expected = if parity(y) == winning {
                    rat(1, 1)
                } else {
                    rat(0, 1)
                };
                for i in 0..3 {
                    assert_eq!(ghz.payoff(x, y)[i], expected, "ghz x={x} y={y} i={i}");
                }
            }
        }

        // The conflicting rows: who outputs against the crowd determines who
        // earns 2; the all-alike outcome pays 4/3 each.
        let conflict_cell = |lone: Option<usize>| -> Vec<Rational> {
            match lone {
                Some(player) => (0..3)
                    .map(|i| if i == player { rat(2, 1) } else { rat(1, 1) })
                    .collect(),
                None => vec![rat(4, 3); 3],
            }
        };

        let check_conflict_row = |game: &Game, x: usize, winning: usize| {
            for y in 0..8usize {
                let bits = [y >> 2 & 1, y >> 1 & 1, y & 1];
                let expected: Vec<Rational> = if parity(y) != winning {
                    vec![rat(0, 1); 3]
                } else {
                    // On the winning parity, exactly one player disagrees with
                    // the other two unless all three agree.
                    let lone = (0..3)
                        .find(|&i| bits[i] != bits[(i + 1) % 3] && bits[i] != bits[(i + 2) % 3]);
                    conflict_cell(lone)
                };
                for i in 0..3 {
                    assert_eq!(game.payoff(x, y)[i], expected[i], "x={x} y={y} i={i}");
                }
            }
        };

        let promised = game_promised();
        for y in 0..8usize {
            let expected = if parity(y) == 0 { rat(4, 3) } else { rat(0, 1) };
            for i in 0..3 {
                assert_eq!(promised.payoff(0, y)[i], expected);
            }
        }
        for x in [3, 5, 6] {
            check_conflict_row(&promised, x, 1);
        }

        let full = game_full();
        for x in 0..8usize {
            let winning = if x.count_ones() <= 1 { 0 } else { 1 };
            match x {
                0 | 7 => {
                    for y in 0..8usize {
                        let expected = if parity(y) == winning {
                            rat(4, 3)
                        } else {
                            rat(0, 1)
                        };
                        for i in 0..3 {
                            assert_eq!(full.payoff(x, y)[i], expected);
                        }
                    }
                }
                _ => check_conflict_row(&full, x, winning),
            }
        }
    }

    #[test]
    fn totals_are_zero_or_four_on_the_support() {
        for game in [game_promised(), game_full()] {
            for x in game.support() {
                for y in 0..8 {
                    let total = game.total_payoff(x, y);
                    assert!(
                        total.is_zero() || total == rat(4, 1),
                        "total at x={x} y={y} is {total}"
                    );
                }
            }
        }
    }

    #[test]
    fn spot_checks_against_known_cells() {
        let promised = game_promised();
        // x = 011, y = 100 pays (2, 1, 1)
        assert_eq!(promised.payoff(3, 4), &[rat(2, 1), rat(1, 1), rat(1, 1)]);
        // x = 000, y = 110 has even parity -> pays 4/3
        assert_eq!(promised.payoff(0, 6), &[rat(4, 3), rat(4, 3), rat(4, 3)]);
        // x = 000, y = 100 has odd parity -> zero
        assert_eq!(promised.payoff(0, 4), &[rat(0, 1), rat(0, 1), rat(0, 1)]);

        let full = game_full();
        // x = 111 pays 4/3 on odd parity
        assert_eq!(full.payoff(7, 1), &[rat(4, 3), rat(4, 3), rat(4, 3)]);
        assert_eq!(full.payoff(7, 0), &[rat(0, 1), rat(0, 1), rat(0, 1)]);
        // x = 100, y = 011 pays (2, 1, 1)
        assert_eq!(full.payoff(4, 3), &[rat(2, 1), rat(1, 1), rat(1, 1)]);
        // x = 001, y = 110 pays (1, 1, 2)
        assert_eq!(full.payoff(1, 6), &[rat(1, 1), rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn catalog_lookup_round_trips() {
        for entry in entries() {
            let game = by_name(entry.name.as_str()).unwrap();
            assert_eq!(game, entry.game);
        }
        assert!(by_name("unknown").is_none());
    }
}
