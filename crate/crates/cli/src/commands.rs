//! Command-line surface and the handlers behind each subcommand.

use std::path::{Path, PathBuf};

use advice_games::catalog;
use advice_games::classical::{
    classical_social_optimum, payoff_polytope_vertices, pure_nash_equilibria,
};
use advice_games::equilibrium::{verify_quantum_equilibrium, BoundMethod};
use advice_games::game_model::{ghz_winning_probability, svetlichny_value, Game, PayoffVector};
use advice_games::npa::DeviationSdp;
use advice_games::quantum::{
    behavior_of_quantum, ghz_game_strategy, seesaw_optimize, QuantumStrategy,
};
use advice_games::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::gamefile;
use crate::report::{
    game_hash, BehaviorRow, CatalogInfo, ClassicalResults, EquilibriumPoint, EquilibriumResults,
    GameInfo, PlayerDeviation, QuantumResults, Results, RunReport, SeesawInfo,
};
use crate::sim::simulate_behavior;
use crate::strategyfile;

#[derive(Debug, Parser)]
#[command(
    name = "advice-games",
    about = "Analyze finite multiparty games with classical or quantum advice",
    version
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in games, or export one as a game file.
    Catalog {
        /// Print the named game in the game-file format instead of listing.
        #[arg(long)]
        export: Option<String>,
    },
    /// Exact classical analysis: pure Nash equilibria, the social optimum,
    /// and the payoff vertices.
    AnalyzeClassical {
        /// Built-in game name or path to a game file.
        game: String,
    },
    /// Evaluate a quantum strategy: behavior table, payoffs, and Bell
    /// functionals.
    EvalQuantum {
        game: String,
        /// `ghz`, `seesaw`, or a path to a strategy file.
        #[arg(long)]
        strategy: String,
        /// Seesaw restarts (seesaw strategy only).
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Seed for the seesaw search.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Check whether a quantum strategy is an equilibrium under the chosen
    /// deviation bound.
    VerifyEquilibrium {
        game: String,
        #[arg(long)]
        strategy: String,
        /// `exact` (POVM best response), `bound` (outcome correlation), or
        /// `npa` (moment-matrix SDP).
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Equilibrium tolerance; defaults depend on method and strategy
        /// provenance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Write the SDP problems (npa method) to this path in the
        /// plain-text debug format.
        #[arg(long)]
        dump_sdp: Option<PathBuf>,
    },
    /// Monte Carlo simulation of repeated rounds.
    Simulate {
        game: String,
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value_t = 1_000_000)]
        rounds: u64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Seesaw restarts (seesaw strategy only).
        #[arg(long, default_value_t = 50)]
        restarts: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Bound,
    Npa,
}

impl Method {
    fn to_bound_method(self) -> BoundMethod {
        match self {
            Method::Exact => BoundMethod::ExactPovm,
            Method::Bound => BoundMethod::OutcomeCorrelation,
            Method::Npa => BoundMethod::NpaSdp,
        }
    }
}

/// A game plus how the user named it.
struct LoadedGame {
    game: Game,
    info: GameInfo,
}

fn load_game(spec: &str) -> Result<LoadedGame> {
    let (game, name) = if let Some(game) = catalog::by_name(spec) {
        (game, spec.to_string())
    } else {
        let path = Path::new(spec);
        if !path.exists() {
            return Err(Error::Game(format!(
                "`{spec}` is neither a catalog game (ghz, promised, full) nor a readable file"
            )));
        }
        let game = gamefile::parse_game_file(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        (game, name)
    };
    let hash = game_hash(&gamefile::game_to_string(&game));
    Ok(LoadedGame {
        game,
        info: GameInfo { name, hash },
    })
}

/// How a strategy was obtained, for reports and tolerance defaults.
struct LoadedStrategy {
    strategy: QuantumStrategy,
    source: String,
    seesaw: Option<SeesawInfo>,
    seed: Option<u64>,
    from_seesaw: bool,
}

fn load_strategy(spec: &str, game: &Game, restarts: usize, seed: u64) -> Result<LoadedStrategy> {
    match spec {
        "ghz" => Ok(LoadedStrategy {
            strategy: ghz_game_strategy(),
            source: "ghz builtin".into(),
            seesaw: None,
            seed: None,
            from_seesaw: false,
        }),
        "seesaw" => {
            let outcome = seesaw_optimize(game, restarts, seed)?;
            Ok(LoadedStrategy {
                strategy: outcome.strategy,
                source: format!("seesaw ({restarts} restarts)"),
                seesaw: Some(SeesawInfo {
                    restarts,
                    best_restart: outcome.best_restart,
                    sweeps: outcome.sweeps,
                }),
                seed: Some(seed),
                from_seesaw: true,
            })
        }
        path => Ok(LoadedStrategy {
            strategy: strategyfile::parse_strategy_file(Path::new(path))?,
            source: format!("file {path}"),
            seesaw: None,
            seed: None,
            from_seesaw: false,
        }),
    }
}

/// True when the game's prior lives on the GHZ promise set
/// {000, 011, 101, 110}.
fn has_ghz_promise(game: &Game) -> bool {
    if game.player_count() != 3 || !game.is_binary() {
        return false;
    }
    game.support()
        .iter()
        .all(|&x| [0usize, 3, 5, 6].contains(&x))
}

fn profile_strings(game: &Game, profiles: &[advice_games::classical::PureProfile]) -> Vec<String> {
    profiles.iter().map(|p| p.describe(game)).collect()
}

fn exact_payoff_strings(payoffs: &PayoffVector) -> Vec<String> {
    match payoffs {
        PayoffVector::Exact(v) => v.iter().map(|r| r.to_string()).collect(),
        PayoffVector::Real(v) => v.iter().map(|x| format!("{x}")).collect(),
    }
}

pub fn cmd_catalog(export: Option<&str>) -> Result<RunReport> {
    if let Some(name) = export {
        let game = catalog::by_name(name)
            .ok_or_else(|| Error::Game(format!("no catalog game named `{name}`")))?;
        // Export is the raw game file, not a report; signal with a
        // dedicated command string so the caller prints it verbatim.
        return Ok(RunReport {
            command: format!("catalog --export {name}"),
            game: GameInfo {
                name: name.to_string(),
                hash: game_hash(&gamefile::game_to_string(&game)),
            },
            seed: None,
            results: Results::Catalog {
                games: vec![CatalogInfo {
                    name: name.to_string(),
                    players: game.player_count(),
                    notes: gamefile::game_to_string(&game),
                }],
            },
        });
    }
    let games = catalog::entries()
        .into_iter()
        .map(|entry| CatalogInfo {
            name: entry.name.to_string(),
            players: entry.game.player_count(),
            notes: entry.notes.to_string(),
        })
        .collect();
    Ok(RunReport {
        command: "catalog".into(),
        game: GameInfo {
            name: "-".into(),
            hash: "-".into(),
        },
        seed: None,
        results: Results::Catalog { games },
    })
}

pub fn cmd_analyze_classical(game_spec: &str) -> Result<RunReport> {
    let loaded = load_game(game_spec)?;
    let game = &loaded.game;
    let (optimum, argmax) = classical_social_optimum(game);
    let equilibria = pure_nash_equilibria(game)
        .into_iter()
        .map(|(profile, payoffs)| EquilibriumPoint {
            profile: profile.describe(game),
            payoffs: exact_payoff_strings(&payoffs),
        })
        .collect();
    let polytope_vertices = payoff_polytope_vertices(game)
        .iter()
        .map(exact_payoff_strings)
        .collect();
    Ok(RunReport {
        command: format!("analyze-classical {game_spec}"),
        game: loaded.info,
        seed: None,
        results: Results::Classical(ClassicalResults {
            social_optimum: optimum.to_string(),
            optimal_profiles: profile_strings(game, &argmax),
            equilibria,
            polytope_vertices,
        }),
    })
}

fn quantum_results(game: &Game, loaded: &LoadedStrategy) -> Result<QuantumResults> {
    let behavior = behavior_of_quantum(&loaded.strategy)?;
    let payoffs = game.average_payoffs(&behavior)?;
    let total = game.total_average_payoff(&behavior)?.to_f64();
    let svetlichny = (game.player_count() == 3 && game.is_binary())
        .then(|| svetlichny_value(&behavior).map(|n| n.to_f64()))
        .transpose()?;
    let winning = has_ghz_promise(game)
        .then(|| ghz_winning_probability(&behavior).map(|n| n.to_f64()))
        .transpose()?;
    let rows = (0..game.joint_input_count())
        .map(|x| {
            Ok(BehaviorRow {
                x: game.input_label(x),
                probabilities: behavior.row_f64(x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let output_labels = (0..game.joint_output_count())
        .map(|y| game.output_label(y))
        .collect();
    Ok(QuantumResults {
        strategy_source: loaded.source.clone(),
        output_labels,
        payoffs: payoffs.to_f64_vec(),
        total,
        svetlichny,
        ghz_winning_probability: winning,
        seesaw: loaded.seesaw.clone(),
        behavior: rows,
    })
}

pub fn cmd_eval_quantum(
    game_spec: &str,
    strategy_spec: &str,
    restarts: usize,
    seed: u64,
) -> Result<RunReport> {
    let loaded = load_game(game_spec)?;
    let strategy = load_strategy(strategy_spec, &loaded.game, restarts, seed)?;
    let results = quantum_results(&loaded.game, &strategy)?;
    Ok(RunReport {
        command: format!("eval-quantum {game_spec} --strategy {strategy_spec}"),
        game: loaded.info,
        seed: strategy.seed,
        results: Results::Quantum(results),
    })
}

pub fn cmd_verify_equilibrium(
    game_spec: &str,
    strategy_spec: &str,
    method: Method,
    tol: Option<f64>,
    restarts: usize,
    seed: u64,
    dump_sdp: Option<&Path>,
) -> Result<RunReport> {
    let loaded = load_game(game_spec)?;
    let strategy = load_strategy(strategy_spec, &loaded.game, restarts, seed)?;
    // Tolerance defaults follow numerical provenance: analytic strategies
    // verify tightly, seesaw output within its convergence tolerance, and
    // the SDP within the acceptance window of its bound.
    let tol = tol.unwrap_or(match (method, strategy.from_seesaw) {
        (Method::Npa, _) => 2e-3,
        (_, true) => 1e-6,
        (_, false) => 1e-9,
    });

    if let Some(path) = dump_sdp {
        if method != Method::Npa {
            return Err(Error::Domain(
                "--dump-sdp applies to the npa method only".into(),
            ));
        }
        let mut text = String::new();
        for player in 0..loaded.game.player_count() {
            let built = DeviationSdp::build(&loaded.game, &strategy.strategy, player)?;
            text.push_str(&format!("# deviator {player}\n"));
            text.push_str(&built.problem.to_debug_text());
        }
        std::fs::write(path, text)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
    }

    let verdict = verify_quantum_equilibrium(
        &loaded.game,
        &strategy.strategy,
        method.to_bound_method(),
        tol,
    )?;
    let players = verdict
        .reports
        .iter()
        .map(|r| PlayerDeviation {
            player: loaded.game.player_names()[r.player].clone(),
            current_payoff: r.current_payoff,
            bound: r.best_response_value,
            gain: r.gain(),
            solver_iterations: r.diagnostics.as_ref().map(|d| d.iterations),
            duality_gap: r.diagnostics.as_ref().map(|d| d.duality_gap),
        })
        .collect();
    Ok(RunReport {
        command: format!(
            "verify-equilibrium {game_spec} --strategy {strategy_spec} --method {}",
            match method {
                Method::Exact => "exact",
                Method::Bound => "bound",
                Method::Npa => "npa",
            }
        ),
        game: loaded.info,
        seed: strategy.seed,
        results: Results::Equilibrium(EquilibriumResults {
            method: verdict.method.as_str().to_string(),
            tolerance: verdict.tolerance,
            is_equilibrium: verdict.is_equilibrium,
            players,
        }),
    })
}

pub fn cmd_simulate(
    game_spec: &str,
    strategy_spec: &str,
    rounds: u64,
    seed: u64,
    restarts: usize,
) -> Result<RunReport> {
    let loaded = load_game(game_spec)?;
    // The strategy seed is decoupled from the simulation seed so the
    // simulation stream is reproducible on its own.
    let strategy = load_strategy(strategy_spec, &loaded.game, restarts, seed)?;
    let behavior = behavior_of_quantum(&strategy.strategy)?;
    let summary = simulate_behavior(&loaded.game, &behavior, rounds, seed)?;
    Ok(RunReport {
        command: format!("simulate {game_spec} --strategy {strategy_spec} --rounds {rounds}"),
        game: loaded.info,
        seed: Some(seed),
        results: Results::Simulation(summary),
    })
}

/// Runs a parsed invocation; returns the report.
pub fn execute(cli: &Cli) -> Result<RunReport> {
    match &cli.command {
        Command::Catalog { export } => cmd_catalog(export.as_deref()),
        Command::AnalyzeClassical { game } => cmd_analyze_classical(game),
        Command::EvalQuantum {
            game,
            strategy,
            restarts,
            seed,
        } => cmd_eval_quantum(game, strategy, *restarts, *seed),
        Command::VerifyEquilibrium {
            game,
            strategy,
            method,
            tol,
            restarts,
            seed,
            dump_sdp,
        } => cmd_verify_equilibrium(
            game,
            strategy,
            *method,
            *tol,
            *restarts,
            *seed,
            dump_sdp.as_deref(),
        ),
        Command::Simulate {
            game,
            strategy,
            rounds,
            seed,
            restarts,
        } => cmd_simulate(game, strategy, *rounds, *seed, *restarts),
    }
}

/// Exit code for an error: 3 for solver failures, 2 for validation problems.
pub fn error_exit_code(error: &Error) -> i32 {
    match error {
        Error::SdpInfeasible { .. } | Error::SdpNonConvergence { .. } | Error::Numerical(_) => 3,
        _ => 2,
    }
}
