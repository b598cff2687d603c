//! Four-qubit Bell-state preservation experiment.
//!
//! Data qubits 0 and 1 start in `B1`. Each cycle measures `ZZ` on the data
//! through ancilla 2 and `XX` through ancilla 3; cycles repeat until three
//! consecutive syndromes agree, the stable syndrome predicts the data's Bell
//! state, and the failure probability is the average of `1 - p_B`.

mod cycle;
mod run;
mod schedule;

pub use cycle::{predict_bell, run_cycle, BellState, CycleBranch, CycleContext, Syndrome};
pub use run::{
    bell_fidelity, initial_state, run_enumeration, run_montecarlo_pta, run_trial, trial_rng,
    FailureEstimate, Injection, Protocol, ProtocolConfig, TrialOutcome, DEFAULT_MASS_BUDGET,
    DEFAULT_MAX_CYCLES, DEFAULT_PRUNE_THRESHOLD, STABLE_RUN,
};
pub use schedule::{
    build_schedule, cz_realization, standard_steps, CycleSchedule, CzRealization, Gate,
    PauliSampler, SimMode, Step, StepNoise, DATA_QUBITS, N_QUBITS, STEPS_PER_CYCLE, X_ANCILLA,
    Z_ANCILLA,
};
