use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cycle::{predict_bell, run_cycle, BellState, CycleContext, Syndrome};
use super::schedule::{build_schedule, CycleSchedule, SimMode, StepNoise, DATA_QUBITS, N_QUBITS};
use crate::channels::{CzErrorParams, DecoherenceParams};
use crate::error::{Error, Result};
use crate::qlin::{pauli_matrix, ComplexMatrix, DensityMatrix, LocalLayout, PauliString};

pub const DEFAULT_MAX_CYCLES: usize = 100;
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-12;
pub const DEFAULT_MASS_BUDGET: f64 = 1e-6;
/// Consecutive identical syndromes that end a trial.
pub const STABLE_RUN: usize = 3;

/// Deterministic Pauli error applied to the register before a given cycle
/// (1-based). Used to probe syndrome tracking.
#[derive(Clone, Debug, PartialEq)]
pub struct Injection {
    pub before_cycle: usize,
    pub error: PauliString,
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    /// `None` disables decoherence entirely.
    pub decoherence: Option<DecoherenceParams<f64>>,
    pub cz: CzErrorParams<f64>,
    pub mode: SimMode,
    pub max_cycles: usize,
    pub prune_threshold: f64,
    pub mass_budget: f64,
    pub injections: Vec<Injection>,
}

impl ProtocolConfig {
    pub fn new(
        decoherence: Option<DecoherenceParams<f64>>,
        cz: CzErrorParams<f64>,
        mode: SimMode,
    ) -> Self {
        Self {
            decoherence,
            cz,
            mode,
            max_cycles: DEFAULT_MAX_CYCLES,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            mass_budget: DEFAULT_MASS_BUDGET,
            injections: Vec::new(),
        }
    }

    /// No decoherence and an ideal CZ.
    pub fn error_free(mode: SimMode) -> Self {
        Self::new(None, CzErrorParams::ideal(), mode)
    }

    pub fn with_mode(&self, mode: SimMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn with_injection(mut self, before_cycle: usize, error: &str) -> Result<Self> {
        let error: PauliString = error.parse()?;
        if error.n_qubits() != N_QUBITS {
            return Err(Error::InvalidParameters(format!(
                "injected error {error} must act on {N_QUBITS} qubits"
            )));
        }
        self.injections.push(Injection {
            before_cycle,
            error,
        });
        Ok(self)
    }
}

/// Result of a single sampled trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub syndrome_history: Vec<Syndrome>,
    pub final_syndrome: Syndrome,
    pub predicted_bell: BellState,
    /// Probability that a Bell-basis measurement finds the predicted state.
    pub p_b: f64,
    pub cycles_run: usize,
    pub truncated: bool,
}

/// Failure probability `P`, the average of `1 - p_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureEstimate {
    pub p: f64,
    /// Standard error of the mean (sampled modes; zero for enumeration).
    pub std_error: f64,
    /// Probability mass retained by the enumeration (1 for sampled modes).
    pub captured_mass: f64,
    /// Part of `captured_mass` that hit the cycle cap.
    pub truncated_mass: f64,
    pub trials_or_branches: usize,
    pub cycles_mean: f64,
}

impl FailureEstimate {
    /// Mass discarded by pruning.
    pub fn dropped_mass(&self) -> f64 {
        (1.0 - self.captured_mass).max(0.0)
    }
}

/// Initial register state: data in `B1`, ancillas in `|00>`.
pub fn initial_state() -> DensityMatrix<f64> {
    let data = BellState::B1.vector();
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << N_QUBITS];
    for (d, amp) in data.iter().enumerate() {
        psi[d << 2] = *amp;
    }
    DensityMatrix::from_pure(&psi)
}

/// Overlap of the data-qubit reduced state with `bell`.
pub fn bell_fidelity(rho: &DensityMatrix<f64>, bell: BellState) -> Result<f64> {
    let data = rho.partial_trace(&DATA_QUBITS)?;
    Ok(data.fidelity_with_pure(&bell.vector()))
}

fn stable(history: &[Syndrome]) -> bool {
    history.len() >= STABLE_RUN
        && history[history.len() - STABLE_RUN..]
            .windows(2)
            .all(|w| w[0] == w[1])
}

/// Schedule and noise prepared once for repeated trials.
#[derive(Clone, Debug)]
pub struct Protocol {
    config: ProtocolConfig,
    schedule: CycleSchedule,
    noise: StepNoise,
    injections: Vec<(usize, ComplexMatrix<f64>)>,
    full_layout: LocalLayout,
}

impl Protocol {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        if config.max_cycles < STABLE_RUN {
            return Err(Error::InvalidParameters(format!(
                "max_cycles must be at least {STABLE_RUN}"
            )));
        }
        let schedule = build_schedule(&config.cz, config.mode)?;
        Self::with_schedule(config, schedule)
    }

    /// Uses a custom cycle schedule instead of the standard one.
    pub fn with_schedule(config: ProtocolConfig, schedule: CycleSchedule) -> Result<Self> {
        let noise = StepNoise::build(config.decoherence.as_ref(), config.mode)?;
        let injections = config
            .injections
            .iter()
            .map(|inj| (inj.before_cycle, pauli_matrix(&inj.error)))
            .collect();
        Ok(Self {
            full_layout: LocalLayout::new(N_QUBITS, &[0, 1, 2, 3])?,
            config,
            schedule,
            noise,
            injections,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn schedule(&self) -> &CycleSchedule {
        &self.schedule
    }

    fn inject(&self, rho: &mut DensityMatrix<f64>, cycle: usize) {
        for (before, m) in &self.injections {
            if *before == cycle {
                rho.conjugate_with(m, &self.full_layout);
            }
        }
    }

    /// One trial with sampled syndromes (and sampled Pauli errors in
    /// Monte Carlo mode).
    pub fn run_trial(&self, rng: &mut dyn RngCore) -> Result<TrialOutcome> {
        let mut rho = initial_state();
        let mut history = Vec::new();
        let mut truncated = true;
        for cycle in 1..=self.config.max_cycles {
            self.inject(&mut rho, cycle);
            let mut ctx = CycleContext::Sample(&mut *rng);
            let branch = run_cycle(&rho, &self.schedule, &self.noise, &mut ctx)?
                .pop()
                .expect("sampled cycle yields one branch");
            history.push(branch.syndrome);
            rho = branch.state;
            if stable(&history) {
                truncated = false;
                break;
            }
        }
        let final_syndrome = *history.last().expect("at least one cycle");
        let predicted_bell = predict_bell(final_syndrome);
        Ok(TrialOutcome {
            p_b: bell_fidelity(&rho, predicted_bell)?,
            cycles_run: history.len(),
            syndrome_history: history,
            final_syndrome,
            predicted_bell,
            truncated,
        })
    }

    /// Monte Carlo estimate over `n_trials` trials. Trial `i` draws from the
    /// ChaCha stream `i` of `seed`, so the result does not depend on how
    /// trials are scheduled across threads.
    pub fn run_montecarlo(&self, seed: u64, n_trials: usize) -> Result<FailureEstimate> {
        if n_trials == 0 {
            return Err(Error::InvalidParameters("n_trials must be positive".into()));
        }
        let per_trial: Vec<(f64, usize, bool)> = (0..n_trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, i as u64);
                self.run_trial(&mut rng)
                    .map(|t| (1.0 - t.p_b, t.cycles_run, t.truncated))
            })
            .collect::<Result<_>>()?;
        let n = n_trials as f64;
        let mean = per_trial.iter().map(|t| t.0).sum::<f64>() / n;
        let var = if n_trials > 1 {
            per_trial.iter().map(|t| (t.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let truncated = per_trial.iter().filter(|t| t.2).count() as f64;
        Ok(FailureEstimate {
            p: mean,
            std_error: (var / n).sqrt(),
            captured_mass: 1.0,
            truncated_mass: truncated / n,
            trials_or_branches: n_trials,
            cycles_mean: per_trial.iter().map(|t| t.1 as f64).sum::<f64>() / n,
        })
    }

    /// Deterministic enumeration of the syndrome tree.
    ///
    /// Branches that share their last syndrome and the length of its current
    /// run evolve identically from then on, so they are merged into one
    /// probability-weighted mixture. That leaves at most eight live classes
    /// per cycle. Classes lighter than the prune threshold are dropped and
    /// their mass reported; classes alive at the cycle cap are scored on their
    /// last syndrome and counted as truncated.
    pub fn run_enumeration(&self) -> Result<FailureEstimate> {
        if self.config.mode.is_sampled() {
            return Err(Error::InvalidParameters(
                "enumeration needs a deterministic mode (exact, pta or bound)".into(),
            ));
        }
        struct Class {
            last: Option<Syndrome>,
            run: usize,
            state: DensityMatrix<f64>,
            weight: f64,
        }
        let mut live = vec![Class {
            last: None,
            run: 0,
            state: initial_state(),
            weight: 1.0,
        }];
        let (mut fail, mut done_mass, mut truncated_mass, mut cycles_acc) = (0.0, 0.0, 0.0, 0.0);
        let mut expansions = 0usize;

        for cycle in 1..=self.config.max_cycles {
            let expanded: Vec<Vec<_>> = live
                .par_iter()
                .map(|class| {
                    let mut rho = class.state.clone();
                    self.inject(&mut rho, cycle);
                    run_cycle(&rho, &self.schedule, &self.noise, &mut CycleContext::Branch)
                })
                .collect::<Result<_>>()?;

            let mut next: BTreeMap<(Syndrome, usize), (ComplexMatrix<f64>, f64)> = BTreeMap::new();
            for (class, branches) in live.iter().zip(expanded) {
                for b in branches {
                    expansions += 1;
                    let w = class.weight * b.weight;
                    let run = if class.last == Some(b.syndrome) {
                        class.run + 1
                    } else {
                        1
                    };
                    if run >= STABLE_RUN {
                        let p_b = bell_fidelity(&b.state, predict_bell(b.syndrome))?;
                        fail += w * (1.0 - p_b);
                        done_mass += w;
                        cycles_acc += w * cycle as f64;
                        continue;
                    }
                    let entry = next
                        .entry((b.syndrome, run))
                        .or_insert_with(|| (ComplexMatrix::zeros(1 << N_QUBITS), 0.0));
                    entry.0.add_scaled(b.state.matrix(), w);
                    entry.1 += w;
                }
            }

            live = next
                .into_iter()
                .filter(|(_, (_, w))| *w >= self.config.prune_threshold)
                .map(|((s, run), (m, w))| Class {
                    last: Some(s),
                    run,
                    state: DensityMatrix::from_matrix_unchecked(m.scale_real(1.0 / w)),
                    weight: w,
                })
                .collect();

            if live.is_empty() {
                break;
            }
            if cycle == self.config.max_cycles {
                for class in &live {
                    let s = class.last.expect("live classes have a syndrome");
                    let p_b = bell_fidelity(&class.state, predict_bell(s))?;
                    fail += class.weight * (1.0 - p_b);
                    truncated_mass += class.weight;
                    cycles_acc += class.weight * cycle as f64;
                }
            }
        }

        let captured = done_mass + truncated_mass;
        if captured < 1.0 - self.config.mass_budget {
            return Err(Error::MassBudgetExceeded {
                captured,
                budget: self.config.mass_budget,
            });
        }
        Ok(FailureEstimate {
            p: (fail / captured).clamp(0.0, 1.0),
            std_error: 0.0,
            captured_mass: captured,
            truncated_mass,
            trials_or_branches: expansions,
            cycles_mean: cycles_acc / captured,
        })
    }

    /// Enumeration for deterministic modes, Monte Carlo otherwise.
    pub fn estimate(&self, seed: u64, n_trials: usize) -> Result<FailureEstimate> {
        if self.config.mode.is_sampled() {
            self.run_montecarlo(seed, n_trials)
        } else {
            self.run_enumeration()
        }
    }
}

/// Independent per-trial RNG stream derived from the master seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_trial(config: &ProtocolConfig, rng: &mut dyn RngCore) -> Result<TrialOutcome> {
    Protocol::new(config.clone())?.run_trial(rng)
}

pub fn run_enumeration(config: &ProtocolConfig) -> Result<FailureEstimate> {
    Protocol::new(config.clone())?.run_enumeration()
}

/// Monte Carlo estimate with Pauli errors sampled from the twirled channels,
/// whatever mode `config` names.
pub fn run_montecarlo_pta(
    config: &ProtocolConfig,
    seed: u64,
    n_trials: usize,
) -> Result<FailureEstimate> {
    if n_trials < 100 {
        return Err(Error::InvalidParameters(format!(
            "n_trials must be at least 100, got {n_trials}"
        )));
    }
    Protocol::new(config.with_mode(SimMode::MonteCarloPta))?.run_montecarlo(seed, n_trials)
}
