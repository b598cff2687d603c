use std::fmt;
use std::str::FromStr;

use rand::distributions::WeightedIndex;

use crate::channels::{
    decoherence_channel, ideal_cz, nonideal_cz, CzErrorParams, DecoherenceParams, KrausChannel,
};
use crate::error::{Error, Result};
use crate::qlin::{ComplexMatrix, LocalLayout, PauliString};
use crate::twirl::{
    pauli_channel_to_kraus, pta_cz, pta_decoherence, upper_bound_channel, PauliChannel,
};

/// Register size of the protocol: data qubits 0 and 1, `ZZ` ancilla 2, `XX` ancilla 3.
pub const N_QUBITS: usize = 4;
pub const DATA_QUBITS: [usize; 2] = [0, 1];
pub const Z_ANCILLA: usize = 2;
pub const X_ANCILLA: usize = 3;
pub const STEPS_PER_CYCLE: usize = 9;

/// How error processes are realized during the simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimMode {
    /// Raw Kraus decoherence and the nonideal CZ unitary.
    Exact,
    /// Ideal gates followed by the twirled channels folded back into Kraus form.
    Pta,
    /// Like `Pta`, with every twirled channel replaced by its max-probability bound.
    BoundPta,
    /// Ideal gates with Pauli errors sampled from the twirled channels.
    MonteCarloPta,
}

impl SimMode {
    pub const ALL: [SimMode; 4] = [
        SimMode::Exact,
        SimMode::Pta,
        SimMode::BoundPta,
        SimMode::MonteCarloPta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::Exact => "exact",
            SimMode::Pta => "pta",
            SimMode::BoundPta => "bound",
            SimMode::MonteCarloPta => "mc",
        }
    }

    pub fn is_sampled(self) -> bool {
        self == SimMode::MonteCarloPta
    }
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(SimMode::Exact),
            "pta" => Ok(SimMode::Pta),
            "bound" | "boundpta" | "bound-pta" => Ok(SimMode::BoundPta),
            "mc" | "montecarlo" | "mc-pta" => Ok(SimMode::MonteCarloPta),
            other => Err(Error::InvalidParameters(format!("unknown mode '{other}'"))),
        }
    }
}

/// Pauli channel prepared for sampling.
#[derive(Clone, Debug)]
pub struct PauliSampler {
    pub(crate) channel: PauliChannel<f64>,
    pub(crate) dist: Option<WeightedIndex<f64>>,
    pub(crate) matrices: Vec<ComplexMatrix<f64>>,
}

impl PauliSampler {
    pub fn new(channel: PauliChannel<f64>) -> Result<Self> {
        let n = channel.n_qubits();
        let dist = if channel.error_probability() > 0.0 {
            Some(WeightedIndex::new(channel.probs()).map_err(|e| {
                Error::InvalidParameters(format!("cannot sample Pauli channel: {e}"))
            })?)
        } else {
            None
        };
        let matrices = PauliString::all(n).map(|s| s.matrix()).collect();
        Ok(Self {
            channel,
            dist,
            matrices,
        })
    }

    pub fn channel(&self) -> &PauliChannel<f64> {
        &self.channel
    }
}

/// Per-step single-qubit decoherence acting on every qubit.
#[derive(Clone, Debug)]
pub enum StepNoise {
    None,
    Kraus(KrausChannel<f64>),
    Sampled(PauliSampler),
}

impl StepNoise {
    /// Decoherence realization for `mode`; `None` parameters mean no decoherence.
    pub fn build(dec: Option<&DecoherenceParams<f64>>, mode: SimMode) -> Result<Self> {
        let Some(dec) = dec else {
            return Ok(StepNoise::None);
        };
        Ok(match mode {
            SimMode::Exact => StepNoise::Kraus(decoherence_channel(dec)?),
            SimMode::Pta => StepNoise::Kraus(pauli_channel_to_kraus(&pta_decoherence(dec))?),
            SimMode::BoundPta => StepNoise::Kraus(pauli_channel_to_kraus(&upper_bound_channel(
                &pta_decoherence(dec),
            )?)?),
            SimMode::MonteCarloPta => StepNoise::Sampled(PauliSampler::new(pta_decoherence(dec))?),
        })
    }
}

/// How each CZ in the schedule is realized.
#[derive(Clone, Debug)]
pub enum CzRealization {
    Unitary(ComplexMatrix<f64>),
    IdealThenChannel(KrausChannel<f64>),
    IdealThenSampled(PauliSampler),
}

#[derive(Clone, Debug)]
pub enum Gate {
    /// Deterministic reset of both ancillas to `|0>`.
    ResetAncillas,
    Hadamard(usize),
    /// CZ with the first qubit as the most significant factor of the 4x4 matrix.
    Cz(usize, usize),
    /// Computational-basis readout of the `ZZ` and `XX` ancillas, followed by reset.
    MeasureAncillas,
}

#[derive(Clone, Debug)]
pub struct Step {
    pub gates: Vec<Gate>,
}

/// One stabilizer-measurement cycle: gate steps, each followed by one step of
/// decoherence on all four qubits.
#[derive(Clone, Debug)]
pub struct CycleSchedule {
    steps: Vec<Step>,
    cz: CzRealization,
    pub(crate) ideal_cz: ComplexMatrix<f64>,
    pub(crate) hadamard: ComplexMatrix<f64>,
    pub(crate) qubit_layouts: Vec<LocalLayout>,
}

impl CycleSchedule {
    /// Validates a custom step list: nine steps, four CZ gates and a final
    /// ancilla measurement.
    pub fn new(steps: Vec<Step>, cz: CzRealization) -> Result<Self> {
        if steps.len() != STEPS_PER_CYCLE {
            return Err(Error::InvalidParameters(format!(
                "a cycle has {STEPS_PER_CYCLE} steps, got {}",
                steps.len()
            )));
        }
        let n_cz = steps
            .iter()
            .flat_map(|s| &s.gates)
            .filter(|g| matches!(g, Gate::Cz(..)))
            .count();
        if n_cz != 4 {
            return Err(Error::InvalidParameters(format!(
                "a cycle has 4 CZ gates, got {n_cz}"
            )));
        }
        let last = steps.last().expect("nine steps");
        if !matches!(last.gates.last(), Some(Gate::MeasureAncillas)) {
            return Err(Error::InvalidParameters(
                "the last step must end with the ancilla measurement".into(),
            ));
        }
        for g in steps.iter().flat_map(|s| &s.gates) {
            match *g {
                Gate::Hadamard(q) if q >= N_QUBITS => {
                    return Err(Error::InvalidTargets {
                        targets: vec![q],
                        n_qubits: N_QUBITS,
                    })
                }
                Gate::Cz(a, b) => {
                    LocalLayout::new(N_QUBITS, &[a, b])?;
                }
                _ => {}
            }
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok(Self {
            steps,
            cz,
            ideal_cz: ideal_cz(),
            hadamard: ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])?,
            qubit_layouts: (0..N_QUBITS)
                .map(|q| LocalLayout::new(N_QUBITS, &[q]))
                .collect::<Result<_>>()?,
        })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn cz(&self) -> &CzRealization {
        &self.cz
    }

    pub fn cz_count(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| &s.gates)
            .filter(|g| matches!(g, Gate::Cz(..)))
            .count()
    }

    pub fn cycle_time(&self, t_step: f64) -> f64 {
        self.steps.len() as f64 * t_step
    }
}

/// The fixed nine-step cycle measuring `ZZ` with ancilla 2, then `XX` with
/// ancilla 3 (data Hadamards around the second CZ pair).
pub fn standard_steps() -> Vec<Step> {
    use Gate::*;
    let step = |gates: Vec<Gate>| Step { gates };
    vec![
        step(vec![ResetAncillas]),
        step(vec![Hadamard(Z_ANCILLA), Hadamard(X_ANCILLA)]),
        step(vec![Cz(Z_ANCILLA, 0)]),
        step(vec![Cz(Z_ANCILLA, 1)]),
        step(vec![Hadamard(0), Hadamard(1)]),
        step(vec![Cz(X_ANCILLA, 0)]),
        step(vec![Cz(X_ANCILLA, 1)]),
        step(vec![
            Hadamard(0),
            Hadamard(1),
            Hadamard(Z_ANCILLA),
            Hadamard(X_ANCILLA),
        ]),
        step(vec![MeasureAncillas]),
    ]
}

/// CZ realization for `mode`.
pub fn cz_realization(czparams: &CzErrorParams<f64>, mode: SimMode) -> Result<CzRealization> {
    Ok(match mode {
        SimMode::Exact => CzRealization::Unitary(nonideal_cz(czparams)),
        SimMode::Pta => CzRealization::IdealThenChannel(pauli_channel_to_kraus(&pta_cz(czparams))?),
        SimMode::BoundPta => CzRealization::IdealThenChannel(pauli_channel_to_kraus(
            &upper_bound_channel(&pta_cz(czparams))?,
        )?),
        SimMode::MonteCarloPta => {
            CzRealization::IdealThenSampled(PauliSampler::new(pta_cz(czparams))?)
        }
    })
}

/// The standard cycle with CZ gates realized according to `mode`.
pub fn build_schedule(czparams: &CzErrorParams<f64>, mode: SimMode) -> Result<CycleSchedule> {
    CycleSchedule::new(standard_steps(), cz_realization(czparams, mode)?)
}
