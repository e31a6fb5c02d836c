//! Run reports: one JSON document per invocation in machine mode, aligned
//! tables in human mode.
//!
//! Exact values are printed as reduced fractions in both modes; reals carry
//! six significant digits in human mode and full precision in JSON.

use advice_games::game_model::format_real;
use serde::Serialize;

use crate::sim::SimulationSummary;

/// FNV-1a hash of the canonical game serialization, hex encoded. Identifies
/// the game a report talks about without embedding the whole table.
pub fn game_hash(canonical: &str) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub game: GameInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Results,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameInfo {
    pub name: String,
    pub hash: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Catalog { games: Vec<CatalogInfo> },
    Classical(ClassicalResults),
    Quantum(QuantumResults),
    Equilibrium(EquilibriumResults),
    Simulation(SimulationSummary),
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogInfo {
    pub name: String,
    pub players: usize,
    pub notes: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalResults {
    /// Maximum total payoff over pure profiles, as a reduced fraction.
    pub social_optimum: String,
    /// Profiles attaining it, in `outputs-per-input|...` notation.
    pub optimal_profiles: Vec<String>,
    pub equilibria: Vec<EquilibriumPoint>,
    /// Distinct pure-profile payoff vectors (vertices of the feasible
    /// payoff set).
    pub polytope_vertices: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumPoint {
    pub profile: String,
    pub payoffs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantumResults {
    pub strategy_source: String,
    /// Joint output labels, in the column order of `behavior` rows.
    pub output_labels: Vec<String>,
    pub payoffs: Vec<f64>,
    pub total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svetlichny: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ghz_winning_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seesaw: Option<SeesawInfo>,
    pub behavior: Vec<BehaviorRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeesawInfo {
    pub restarts: usize,
    pub best_restart: usize,
    pub sweeps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BehaviorRow {
    pub x: String,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumResults {
    pub method: String,
    pub tolerance: f64,
    pub is_equilibrium: bool,
    pub players: Vec<PlayerDeviation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerDeviation {
    pub player: String,
    pub current_payoff: f64,
    pub bound: f64,
    pub gain: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality_gap: Option<f64>,
}

impl RunReport {
    /// Process exit code the report implies: 1 for a negative equilibrium
    /// verdict, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        match &self.results {
            Results::Equilibrium(eq) if !eq.is_equilibrium => 1,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: &str| {
            out.push_str(line);
            out.push('\n');
        };
        push(&mut out, &format!("command: {}", self.command));
        push(
            &mut out,
            &format!("game: {} (hash {})", self.game.name, self.game.hash),
        );
        if let Some(seed) = self.seed {
            push(&mut out, &format!("seed: {seed}"));
        }
        out.push('\n');
        match &self.results {
            Results::Catalog { games } => {
                for info in games {
                    push(
                        &mut out,
                        &format!("{:<10} {} players  {}", info.name, info.players, info.notes),
                    );
                }
            }
            Results::Classical(r) => {
                push(&mut out, &format!("social optimum: {}", r.social_optimum));
                push(
                    &mut out,
                    &format!(
                        "optimal profiles ({}): {}",
                        r.optimal_profiles.len(),
                        r.optimal_profiles.join(", ")
                    ),
                );
                push(
                    &mut out,
                    &format!("pure Nash equilibria ({}):", r.equilibria.len()),
                );
                push(
                    &mut out,
                    &table_of(
                        &["profile", "payoffs"],
                        r.equilibria
                            .iter()
                            .map(|e| vec![e.profile.clone(), format!("({})", e.payoffs.join(", "))])
                            .collect(),
                    ),
                );
                push(
                    &mut out,
                    &format!("payoff vertices ({}):", r.polytope_vertices.len()),
                );
                for v in &r.polytope_vertices {
                    push(&mut out, &format!("  ({})", v.join(", ")));
                }
            }
            Results::Quantum(r) => {
                push(&mut out, &format!("strategy: {}", r.strategy_source));
                if let Some(info) = &r.seesaw {
                    push(
                        &mut out,
                        &format!(
                            "seesaw: {} restarts, best restart {} after {} sweeps",
                            info.restarts, info.best_restart, info.sweeps
                        ),
                    );
                }
                let payoffs: Vec<String> = r.payoffs.iter().map(|&v| format_real(v)).collect();
                push(&mut out, &format!("payoffs: ({})", payoffs.join(", ")));
                push(&mut out, &format!("total: {}", format_real(r.total)));
                if let Some(s) = r.svetlichny {
                    push(&mut out, &format!("svetlichny value: {}", format_real(s)));
                }
                if let Some(w) = r.ghz_winning_probability {
                    push(
                        &mut out,
                        &format!("ghz winning probability: {}", format_real(w)),
                    );
                }
                push(&mut out, "behavior P(y|x):");
                let rows: Vec<Vec<String>> = r
                    .behavior
                    .iter()
                    .map(|row| {
                        let mut cells = vec![row.x.clone()];
                        cells.extend(row.probabilities.iter().map(|&p| format_real(p)));
                        cells
                    })
                    .collect();
                let mut header: Vec<&str> = vec!["x"];
                header.extend(r.output_labels.iter().map(String::as_str));
                push(&mut out, &table_of(&header, rows));
            }
            Results::Equilibrium(r) => {
                push(&mut out, &format!("method: {}", r.method));
                push(
                    &mut out,
                    &format!("tolerance: {}", format_real(r.tolerance)),
                );
                let rows: Vec<Vec<String>> = r
                    .players
                    .iter()
                    .map(|p| {
                        let mut cells = vec![
                            p.player.clone(),
                            format_real(p.current_payoff),
                            format_real(p.bound),
                            format_real(p.gain),
                        ];
                        if let Some(gap) = p.duality_gap {
                            cells.push(format!("{gap:.2e}"));
                        }
                        cells
                    })
                    .collect();
                let with_gap = r.players.iter().any(|p| p.duality_gap.is_some());
                let header: &[&str] = if with_gap {
                    &["player", "payoff", "bound", "gain", "gap"]
                } else {
                    &["player", "payoff", "bound", "gain"]
                };
                push(&mut out, &table_of(header, rows));
                push(
                    &mut out,
                    &format!(
                        "verdict: {}",
                        if r.is_equilibrium {
                            "equilibrium"
                        } else {
                            "not an equilibrium"
                        }
                    ),
                );
            }
            Results::Simulation(r) => {
                push(&mut out, &format!("rounds: {}", r.rounds));
                let rows: Vec<Vec<String>> = r
                    .means
                    .iter()
                    .zip(&r.standard_errors)
                    .enumerate()
                    .map(|(i, (&mean, &se))| {
                        vec![format!("player {i}"), format_real(mean), format_real(se)]
                    })
                    .collect();
                push(&mut out, &table_of(&["player", "mean", "std error"], rows));
                push(
                    &mut out,
                    &format!("total mean: {}", format_real(r.total_mean)),
                );
            }
        }
        out
    }
}

/// Renders rows as a left-aligned table with a header.
fn table_of(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(header.len());
    let mut widths: Vec<usize> = (0..columns)
        .map(|c| header.get(c).map_or(0, |h| h.len()))
        .collect();
    for row in &rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    let mut render = |cells: Vec<String>| {
        let mut line = String::from("  ");
        for (c, cell) in cells.iter().enumerate() {
            line.push_str(&format!("{:<width$}  ", cell, width = widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    render(header.iter().map(|s| s.to_string()).collect());
    for row in rows {
        render(row);
    }
    out.trim_end().to_string()
}
