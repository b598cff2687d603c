use std::time::Instant;

use pta_core::channels::split_gate_error;
use pta_core::protocol::{Protocol, ProtocolConfig, SimMode};
use rayon::prelude::*;

use crate::config::SweepConfig;
use crate::error::HarnessError;
use crate::pstep::{decoherence_for, invert_pstep};

/// One `(grid point, mode)` result.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p_step: f64,
    pub gate_error: f64,
    pub phi: f64,
    pub t2_ratio: f64,
    pub mode: SimMode,
    pub p: f64,
    /// Standard error for Monte Carlo rows, pruned probability mass otherwise.
    pub err: f64,
    pub cycles_mean: f64,
    pub wall_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows for one mode, in sweep order.
    pub fn mode_rows(&self, mode: SimMode) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.mode == mode)
    }

    /// Failure probability for an exact match of point and mode.
    pub fn lookup(&self, p_step: f64, gate_error: f64, mode: SimMode) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.p_step == p_step && r.gate_error == gate_error && r.mode == mode)
            .map(|r| r.p)
    }
}

/// splitmix64 finalizer; spreads point indices into unrelated seeds.
fn point_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Grid points in emission order: gate error outer, `p_step` inner.
pub fn grid_points(cfg: &SweepConfig) -> Vec<(f64, f64)> {
    cfg.gate_errors
        .iter()
        .flat_map(|&e| cfg.p_steps.iter().map(move |&p| (p, e)))
        .collect()
}

fn run_point(
    cfg: &SweepConfig,
    index: usize,
    p_step: f64,
    gate_error: f64,
) -> Result<Vec<SweepRow>, HarnessError> {
    let context = |source| HarnessError::Point {
        point: format!(
            "p_step={p_step}, E={gate_error}, phi={}, T2/T1={}",
            cfg.phi, cfg.t2_ratio
        ),
        source,
    };
    let t1 = invert_pstep(p_step, cfg.t2_ratio, cfg.alpha, cfg.t_step).map_err(context)?;
    let dec = decoherence_for(t1, cfg.t2_ratio, cfg.alpha, cfg.t_step).map_err(context)?;
    let cz = split_gate_error(gate_error, cfg.phi).map_err(context)?;
    let seed = point_seed(cfg.seed, index as u64);
    cfg.modes
        .iter()
        .map(|&mode| {
            let start = Instant::now();
            let mut pc = ProtocolConfig::new(Some(dec), cz, mode);
            pc.max_cycles = cfg.max_cycles;
            pc.prune_threshold = cfg.prune_threshold;
            pc.mass_budget = cfg.mass_budget;
            let est = Protocol::new(pc)
                .and_then(|p| p.estimate(seed, cfg.trials))
                .map_err(context)?;
            let err = if mode.is_sampled() {
                est.std_error
            } else {
                est.dropped_mass()
            };
            Ok(SweepRow {
                p_step,
                gate_error,
                phi: cfg.phi,
                t2_ratio: cfg.t2_ratio,
                mode,
                p: est.p,
                err,
                cycles_mean: est.cycles_mean,
                wall_s: if cfg.timing {
                    start.elapsed().as_secs_f64()
                } else {
                    0.0
                },
            })
        })
        .collect()
}

/// Runs every grid point in every configured mode. Points are evaluated in
/// parallel; rows come back in grid order with the modes of one point adjacent.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, HarnessError> {
    if cfg.modes.is_empty() {
        return Err(HarnessError::Config("no simulation modes selected".into()));
    }
    let points = grid_points(cfg);
    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(p, e))| run_point(cfg, i, p, e))
        .collect::<Result<_, _>>()?;
    Ok(SweepResult {
        rows: per_point.into_iter().flatten().collect(),
    })
}
