use num_complex::Complex64;
use rand::distributions::Distribution;
use rand::{Rng, RngCore};

use super::schedule::{
    CycleSchedule, CzRealization, Gate, PauliSampler, StepNoise, X_ANCILLA, Z_ANCILLA,
};
use crate::error::{Error, Result};
use crate::qlin::{ComplexMatrix, DensityMatrix, LocalLayout};

/// Ancilla readout `(x3, x4)`: `ZZ` ancilla bit, then `XX` ancilla bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(pub u8, pub u8);

impl Syndrome {
    pub const ALL: [Syndrome; 4] = [
        Syndrome(0, 0),
        Syndrome(0, 1),
        Syndrome(1, 0),
        Syndrome(1, 1),
    ];

    pub fn index(self) -> usize {
        (self.0 as usize) << 1 | self.1 as usize
    }
}

/// The four Bell states of the data pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    /// `(|00> + |11>)/sqrt2`
    B1,
    /// `(|00> - |11>)/sqrt2`
    B2,
    /// `(|01> + |10>)/sqrt2`
    B3,
    /// `(|01> - |10>)/sqrt2`
    B4,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::B1, BellState::B2, BellState::B3, BellState::B4];

    /// 1-based label index.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn vector(self) -> Vec<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| Complex64::new(x, 0.0);
        match self {
            BellState::B1 => vec![c(s), c(0.0), c(0.0), c(s)],
            BellState::B2 => vec![c(s), c(0.0), c(0.0), c(-s)],
            BellState::B3 => vec![c(0.0), c(s), c(s), c(0.0)],
            BellState::B4 => vec![c(0.0), c(s), c(-s), c(0.0)],
        }
    }
}

/// Bell state predicted by a stable syndrome.
pub fn predict_bell(s: Syndrome) -> BellState {
    match (s.0 & 1, s.1 & 1) {
        (0, 0) => BellState::B1,
        (0, 1) => BellState::B2,
        (1, 0) => BellState::B3,
        _ => BellState::B4,
    }
}

/// Outcome branch of one cycle: normalized post-cycle state and the
/// probability of reaching it from the input state.
#[derive(Clone, Debug)]
pub struct CycleBranch {
    pub syndrome: Syndrome,
    pub state: DensityMatrix<f64>,
    pub weight: f64,
}

/// Whether measurement outcomes (and sampled errors) are drawn at random or
/// every outcome is enumerated.
pub enum CycleContext<'a> {
    Branch,
    Sample(&'a mut dyn RngCore),
}

impl CycleContext<'_> {
    fn rng(&mut self) -> Result<&mut dyn RngCore> {
        match self {
            CycleContext::Sample(rng) => Ok(&mut **rng),
            CycleContext::Branch => Err(Error::MissingRng),
        }
    }
}

fn apply_sampled(
    rho: &mut DensityMatrix<f64>,
    sampler: &PauliSampler,
    layout: &LocalLayout,
    ctx: &mut CycleContext<'_>,
) -> Result<()> {
    let rng = ctx.rng()?;
    if let Some(dist) = &sampler.dist {
        let k = dist.sample(rng);
        if k != 0 {
            rho.conjugate_with(&sampler.matrices[k], layout);
        }
    }
    Ok(())
}

fn apply_noise(
    rho: &mut DensityMatrix<f64>,
    sched: &CycleSchedule,
    noise: &StepNoise,
    ctx: &mut CycleContext<'_>,
) -> Result<()> {
    match noise {
        StepNoise::None => {}
        StepNoise::Kraus(ch) => {
            for layout in &sched.qubit_layouts {
                rho.apply_kraus_layout(ch.kraus(), layout);
            }
        }
        StepNoise::Sampled(sampler) => {
            for layout in &sched.qubit_layouts {
                apply_sampled(rho, sampler, layout, ctx)?;
            }
        }
    }
    Ok(())
}

fn apply_gate(
    rho: &mut DensityMatrix<f64>,
    gate: &Gate,
    sched: &CycleSchedule,
    ctx: &mut CycleContext<'_>,
) -> Result<()> {
    match *gate {
        Gate::ResetAncillas => {
            rho.reset_qubit_mut(Z_ANCILLA);
            rho.reset_qubit_mut(X_ANCILLA);
        }
        Gate::Hadamard(q) => rho.conjugate_with(&sched.hadamard, &sched.qubit_layouts[q]),
        Gate::Cz(a, b) => {
            let layout = LocalLayout::new(rho.n_qubits(), &[a, b])?;
            match sched.cz() {
                CzRealization::Unitary(u) => rho.conjugate_with(u, &layout),
                CzRealization::IdealThenChannel(ch) => {
                    rho.conjugate_with(&sched.ideal_cz, &layout);
                    rho.apply_kraus_layout(ch.kraus(), &layout);
                }
                CzRealization::IdealThenSampled(sampler) => {
                    rho.conjugate_with(&sched.ideal_cz, &layout);
                    apply_sampled(rho, sampler, &layout, ctx)?;
                }
            }
        }
        Gate::MeasureAncillas => unreachable!("measurement handled by run_cycle"),
    }
    Ok(())
}

/// Joint ancilla projection; returns the outcome probability and the
/// normalized state with both ancillas reset to `|0>`.
fn project_syndrome(rho: &DensityMatrix<f64>, s: Syndrome) -> Option<(f64, DensityMatrix<f64>)> {
    let p = syndrome_probability(rho, s);
    if p < 1e-15 {
        return None;
    }
    let n = rho.n_qubits();
    let (zb, xb) = (1usize << (n - 1 - Z_ANCILLA), 1usize << (n - 1 - X_ANCILLA));
    let shift = if s.0 == 1 { zb } else { 0 } | if s.1 == 1 { xb } else { 0 };
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(src.dim());
    let scale = 1.0 / p;
    for i in (0..src.dim()).filter(|i| i & (zb | xb) == 0) {
        for j in (0..src.dim()).filter(|j| j & (zb | xb) == 0) {
            out[(i, j)] = src[(i | shift, j | shift)] * scale;
        }
    }
    Some((p, DensityMatrix::from_matrix_unchecked(out)))
}

/// Runs one full cycle on a four-qubit state.
///
/// Every step applies its gates, then `noise` on all four qubits. At the
/// ancilla measurement the state either branches into every possible
/// syndrome or one syndrome is sampled, according to `ctx`. Outcomes with
/// probability below `1e-15` are dropped.
pub fn run_cycle(
    rho: &DensityMatrix<f64>,
    sched: &CycleSchedule,
    noise: &StepNoise,
    ctx: &mut CycleContext<'_>,
) -> Result<Vec<CycleBranch>> {
    let mut branches: Vec<(Option<Syndrome>, DensityMatrix<f64>, f64)> =
        vec![(None, rho.clone(), 1.0)];
    for step in sched.steps() {
        for gate in &step.gates {
            if matches!(gate, Gate::MeasureAncillas) {
                branches = measure_branches(branches, ctx)?;
                continue;
            }
            for (_, state, _) in &mut branches {
                apply_gate(state, gate, sched, ctx)?;
            }
        }
        for (_, state, _) in &mut branches {
            apply_noise(state, sched, noise, ctx)?;
        }
    }
    branches
        .into_iter()
        .map(|(s, state, weight)| {
            let syndrome = s.ok_or_else(|| {
                Error::InvalidParameters("cycle schedule has no ancilla measurement".into())
            })?;
            Ok(CycleBranch {
                syndrome,
                state,
                weight,
            })
        })
        .collect()
}

type Partial = (Option<Syndrome>, DensityMatrix<f64>, f64);

fn measure_branches(branches: Vec<Partial>, ctx: &mut CycleContext<'_>) -> Result<Vec<Partial>> {
    let mut out = Vec::new();
    for (_, state, weight) in branches {
        match ctx {
            CycleContext::Branch => {
                for s in Syndrome::ALL {
                    if let Some((p, post)) = project_syndrome(&state, s) {
                        out.push((Some(s), post, weight * p));
                    }
                }
            }
            CycleContext::Sample(rng) => {
                let probs: Vec<f64> = Syndrome::ALL
                    .iter()
                    .map(|&s| syndrome_probability(&state, s))
                    .collect();
                let total: f64 = probs.iter().sum();
                let mut u = rng.gen::<f64>() * total;
                let mut chosen = Syndrome::ALL[3];
                for (s, p) in Syndrome::ALL.iter().zip(&probs) {
                    if u < *p {
                        chosen = *s;
                        break;
                    }
                    u -= p;
                }
                // guard against landing on a rounding-level outcome at the end
                if probs[chosen.index()] < 1e-15 {
                    chosen = Syndrome::ALL[probs
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.total_cmp(b.1))
                        .map(|(i, _)| i)
                        .unwrap()];
                }
                let (p, post) =
                    project_syndrome(&state, chosen).ok_or(Error::ZeroProbabilityOutcome {
                        probability: probs[chosen.index()],
                    })?;
                out.push((Some(chosen), post, weight * p));
            }
        }
    }
    Ok(out)
}

fn syndrome_probability(rho: &DensityMatrix<f64>, s: Syndrome) -> f64 {
    let m = rho.matrix();
    let shift_z = rho.n_qubits() - 1 - Z_ANCILLA;
    let shift_x = rho.n_qubits() - 1 - X_ANCILLA;
    (0..m.dim())
        .filter(|&i| ((i >> shift_z) & 1) as u8 == s.0 && ((i >> shift_x) & 1) as u8 == s.1)
        .map(|i| m[(i, i)].re)
        .sum::<f64>()
        .max(0.0)
}
