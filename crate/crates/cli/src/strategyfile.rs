//! The quantum strategy file format.
//!
//! ```json
//! {
//!   "state": [[0.7071, 0.0], [0.0, 0.0], ..., [0.7071, 0.0]],
//!   "measurements": [
//!     [ { "outcome0": [[[re, im], [re, im]], [[re, im], [re, im]]],
//!         "outcome1": ... },
//!       ... one object per input ... ],
//!     ... one list per player ...
//!   ]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs; each outcome operator is a 2×2
//! matrix in row-major order. Validation (state norm, positivity,
//! completeness) happens on load.

use advice_games::linalg::{CMat, C64};
use advice_games::quantum::{BinaryMeasurement, QuantumStrategy, StateVector};
use advice_games::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyFile {
    /// Amplitudes over the joint computational basis, player 0 most
    /// significant.
    pub state: Vec<[f64; 2]>,
    /// `measurements[player][input]`.
    pub measurements: Vec<Vec<MeasurementEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementEntry {
    pub outcome0: Vec<Vec<[f64; 2]>>,
    pub outcome1: Vec<Vec<[f64; 2]>>,
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat, Error> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(Error::Strategy("measurement operators must be 2x2".into()));
    }
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    Ok(CMat::from_rows(&rows))
}

fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..2)
        .map(|i| (0..2).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl StrategyFile {
    pub fn to_strategy(&self) -> Result<QuantumStrategy, Error> {
        let amps: Vec<C64> = self
            .state
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let state = StateVector::new(amps)?;
        let measurements = self
            .measurements
            .iter()
            .map(|family| {
                family
                    .iter()
                    .map(|entry| {
                        BinaryMeasurement::new(
                            matrix_from_rows(&entry.outcome0)?,
                            matrix_from_rows(&entry.outcome1)?,
                        )
                    })
                    .collect::<Result<Vec<_>, Error>>()
            })
            .collect::<Result<Vec<_>, Error>>()?;
        QuantumStrategy::new(state, measurements)
    }

    pub fn from_strategy(qs: &QuantumStrategy) -> StrategyFile {
        StrategyFile {
            state: qs
                .state()
                .amplitudes()
                .iter()
                .map(|a| [a.re, a.im])
                .collect(),
            measurements: qs
                .measurements()
                .iter()
                .map(|family| {
                    family
                        .iter()
                        .map(|m| MeasurementEntry {
                            outcome0: matrix_to_rows(m.outcome(0)),
                            outcome1: matrix_to_rows(m.outcome(1)),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

pub fn parse_strategy_str(text: &str) -> Result<QuantumStrategy, Error> {
    let file: StrategyFile = serde_json::from_str(text).map_err(|e| {
        Error::Strategy(format!(
            "malformed strategy file at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    file.to_strategy()
}

pub fn parse_strategy_file(path: &std::path::Path) -> Result<QuantumStrategy, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Strategy(format!("cannot read {}: {e}", path.display())))?;
    parse_strategy_str(&text)
}

pub fn strategy_to_string(qs: &QuantumStrategy) -> String {
    serde_json::to_string_pretty(&StrategyFile::from_strategy(qs)).expect("strategy serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use advice_games::quantum::ghz_game_strategy;

    #[test]
    fn ghz_strategy_round_trips() {
        let qs = ghz_game_strategy();
        let text = strategy_to_string(&qs);
        let reparsed = parse_strategy_str(&text).unwrap();
        assert_eq!(reparsed, qs);
    }

    #[test]
    fn invalid_measurements_are_rejected_on_load() {
        let qs = ghz_game_strategy();
        let mut file = StrategyFile::from_strategy(&qs);
        file.measurements[0][0].outcome0[0][0] = [2.0, 0.0];
        let err = file.to_strategy().unwrap_err();
        assert!(matches!(err, Error::Measurement { .. }));
    }
}
