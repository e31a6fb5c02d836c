//! Quantum strategies: shared state vectors, binary qubit measurements, and
//! Born-rule behavior tables.
//!
//! A [`QuantumStrategy`] holds the shared state `|Ψ⟩` (one qubit per player)
//! and, for every (player, input), a binary measurement `{M⁰, M¹}`. The
//! induced behavior is `P(y|x) = ⟨Ψ| M¹_{x_1,y_1} ⊗ … ⊗ Mⁿ_{x_n,y_n} |Ψ⟩`,
//! which is no-signalling by construction.
//!
//! Measurements are general POVMs in the type; the builders construct
//! projective ones. The outcome-to-output convention is fixed throughout:
//! outcome `+` (the first projector) is output `0`.

mod seesaw;

pub use seesaw::{seesaw_optimize, seesaw_optimize_with, SeesawOptions, SeesawOutcome};

use num_complex::Complex64;

use crate::game_model::Behavior;
use crate::linalg::{inner, CMat, C64};
use crate::{Error, Result};

/// Norm/completeness tolerance for states and measurements.
pub const VALIDATION_TOLERANCE: f64 = 1e-9;

/// A pure state of `n` qubits as amplitudes over the computational basis,
/// player 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 4 {
            return Err(Error::Strategy(format!(
                "state dimension {dim} is not 2^n for n >= 2"
            )));
        }
        let state = StateVector { amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > VALIDATION_TOLERANCE {
            return Err(Error::Measurement {
                reason: format!("state norm is {norm}, expected 1"),
                worst_eigenvalue: norm,
            });
        }
        Ok(state)
    }

    pub fn qubit_count(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Density matrix of the qubits listed in `keep`, traced over the rest.
    /// The kept qubits appear in the order given.
    pub fn reduced_state(&self, keep: &[usize]) -> CMat {
        let n = self.qubit_count();
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let rd = 1usize << rest.len();
        // Global index from kept-part u and rest-part w; qubit q occupies bit
        // (n-1-q), matching player 0 most significant.
        let merge = |u: usize, w: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                let bit = u >> (keep.len() - 1 - pos) & 1;
                idx |= bit << (n - 1 - q);
            }
            for (pos, &q) in rest.iter().enumerate() {
                let bit = w >> (rest.len() - 1 - pos) & 1;
                idx |= bit << (n - 1 - q);
            }
            idx
        };
        let mut rho = CMat::zeros(kd);
        for u in 0..kd {
            for v in 0..kd {
                let mut acc = C64::new(0.0, 0.0);
                for w in 0..rd {
                    acc += self.amplitudes[merge(u, w)] * self.amplitudes[merge(v, w)].conj();
                }
                rho[(u, v)] = acc;
            }
        }
        rho
    }
}

/// The three-qubit GHZ state `(|000⟩ + |111⟩)/√2`.
pub fn ghz_state() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0] = C64::new(s, 0.0);
    amps[7] = C64::new(s, 0.0);
    StateVector::new(amps).expect("GHZ state is normalized")
}

/// The two-qubit state `(|00⟩ + |11⟩)/√2`, the default advice for two-player
/// seesaw runs.
pub fn bell_phi_plus() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    amps[0] = C64::new(s, 0.0);
    amps[3] = C64::new(s, 0.0);
    StateVector::new(amps).expect("Bell state is normalized")
}

/// A two-outcome qubit measurement `{M⁰, M¹}` with `M⁰ + M¹ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMeasurement {
    operators: [CMat; 2],
}

impl BinaryMeasurement {
    /// Validates positivity and completeness of the pair.
    pub fn new(outcome0: CMat, outcome1: CMat) -> Result<Self> {
        if outcome0.dim() != 2 || outcome1.dim() != 2 {
            return Err(Error::Strategy(
                "measurement operators must act on one qubit".into(),
            ));
        }
        let mut worst = f64::INFINITY;
        for op in [&outcome0, &outcome1] {
            if op.hermitian_defect() > VALIDATION_TOLERANCE {
                return Err(Error::Measurement {
                    reason: "measurement operator is not Hermitian".into(),
                    worst_eigenvalue: op.hermitian_defect(),
                });
            }
            worst = worst.min(op.min_eigenvalue());
        }
        if worst < -VALIDATION_TOLERANCE {
            return Err(Error::Measurement {
                reason: "measurement operator is not positive semidefinite".into(),
                worst_eigenvalue: worst,
            });
        }
        let sum = outcome0.add(&outcome1);
        let defect = sum.sub(&CMat::identity(2));
        let completeness_gap: f64 = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| defect[(i, j)].norm())
            .fold(0.0, f64::max);
        if completeness_gap > VALIDATION_TOLERANCE {
            return Err(Error::Measurement {
                reason: format!(
                    "measurement outcomes do not sum to the identity (gap {completeness_gap:.3e})"
                ),
                worst_eigenvalue: completeness_gap,
            });
        }
        Ok(BinaryMeasurement {
            operators: [outcome0, outcome1],
        })
    }

    pub fn outcome(&self, output: usize) -> &CMat {
        &self.operators[output]
    }
}

/// Projective measurement in the equatorial basis `(|0⟩ ± e^{iθ}|1⟩)/√2`.
///
/// Outcome `+` maps to output 0. `θ = 0` is the σ_X eigenbasis and
/// `θ = π/2` the σ_Y eigenbasis.
pub fn equatorial_measurement(theta: f64) -> BinaryMeasurement {
    let phase = Complex64::from_polar(1.0, theta);
    let half = C64::new(0.5, 0.0);
    let m0 = CMat::from_rows(&[vec![half, half * phase.conj()], vec![half * phase, half]]);
    let m1 = CMat::from_rows(&[vec![half, -half * phase.conj()], vec![-half * phase, half]]);
    BinaryMeasurement::new(m0, m1).expect("equatorial projectors are valid")
}

/// Projective measurement along the Bloch direction with polar angle `phi`
/// and azimuth `theta`; outcome `+` (toward the direction) is output 0.
pub fn bloch_measurement(phi: f64, theta: f64) -> BinaryMeasurement {
    let c = (phi / 2.0).cos();
    let s = (phi / 2.0).sin();
    let v = [C64::new(c, 0.0), Complex64::from_polar(s, theta)];
    let m0 = crate::linalg::outer(&v, &v);
    let m1 = CMat::identity(2).sub(&m0);
    BinaryMeasurement::new(m0, m1).expect("bloch projectors are valid")
}

/// Computational-basis (σ_Z) measurement; included mainly to build corrupted
/// strategies in tests and demos.
pub fn computational_measurement() -> BinaryMeasurement {
    let mut m0 = CMat::zeros(2);
    m0[(0, 0)] = C64::new(1.0, 0.0);
    let mut m1 = CMat::zeros(2);
    m1[(1, 1)] = C64::new(1.0, 0.0);
    BinaryMeasurement::new(m0, m1).expect("basis projectors are valid")
}

/// Shared state plus one binary measurement per (player, input).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    state: StateVector,
    /// Indexed `[player][input]`.
    measurements: Vec<Vec<BinaryMeasurement>>,
}

impl QuantumStrategy {
    pub fn new(state: StateVector, measurements: Vec<Vec<BinaryMeasurement>>) -> Result<Self> {
        let n = measurements.len();
        if n != state.qubit_count() {
            return Err(Error::Strategy(format!(
                "{n} measurement families for a {}-qubit state",
                state.qubit_count()
            )));
        }
        if measurements.iter().any(Vec::is_empty) {
            return Err(Error::Strategy(
                "every player needs a measurement per input".into(),
            ));
        }
        Ok(QuantumStrategy {
            state,
            measurements,
        })
    }

    pub fn player_count(&self) -> usize {
        self.measurements.len()
    }

    pub fn input_counts(&self) -> Vec<usize> {
        self.measurements.iter().map(Vec::len).collect()
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn measurement(&self, player: usize, input: usize) -> &BinaryMeasurement {
        &self.measurements[player][input]
    }

    pub fn measurements(&self) -> &[Vec<BinaryMeasurement>] {
        &self.measurements
    }

    /// Replaces one player's measurement family.
    pub fn with_player_measurements(
        &self,
        player: usize,
        family: Vec<BinaryMeasurement>,
    ) -> Result<Self> {
        if family.len() != self.measurements[player].len() {
            return Err(Error::Strategy(format!(
                "player {player} needs {} measurements, got {}",
                self.measurements[player].len(),
                family.len()
            )));
        }
        let mut measurements = self.measurements.clone();
        measurements[player] = family;
        QuantumStrategy::new(self.state.clone(), measurements)
    }
}

/// The GHZ-game strategy: GHZ state; every player measures σ_X on input 0
/// and σ_Y on input 1, outputting 0 on outcome `+`.
pub fn ghz_game_strategy() -> QuantumStrategy {
    let family = || {
        vec![
            equatorial_measurement(0.0),
            equatorial_measurement(std::f64::consts::FRAC_PI_2),
        ]
    };
    QuantumStrategy::new(ghz_state(), vec![family(), family(), family()])
        .expect("GHZ strategy is valid")
}

/// Born-rule behavior of a quantum strategy.
///
/// The result is real-valued, normalized within `1e-9`, and no-signalling by
/// construction.
pub fn behavior_of_quantum(qs: &QuantumStrategy) -> Result<Behavior> {
    let n = qs.player_count();
    let input_sizes = qs.input_counts();
    let output_sizes = vec![2usize; n];
    let nx: usize = input_sizes.iter().product();
    let ny = 1usize << n;
    let psi = qs.state().amplitudes();

    let mut rows = Vec::with_capacity(nx);
    for x in 0..nx {
        let xt = crate::game_model::joint_tuple(&input_sizes, x);
        let mut row = Vec::with_capacity(ny);
        for y in 0..ny {
            let mut op = qs.measurement(0, xt[0]).outcome(y >> (n - 1) & 1).clone();
            for player in 1..n {
                let bit = y >> (n - 1 - player) & 1;
                op = op.kron(qs.measurement(player, xt[player]).outcome(bit));
            }
            let prob = inner(psi, &op.mul_vec(psi));
            if prob.im.abs() > VALIDATION_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "Born probability has imaginary part {:.3e}",
                    prob.im
                )));
            }
            row.push(prob.re.max(0.0));
        }
        rows.push(row);
    }
    Behavior::from_real(input_sizes, output_sizes, rows)
}
