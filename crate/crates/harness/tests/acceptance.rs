//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p pta-harness --test acceptance`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use pta_core::channels::{
    avg_gate_fidelity, cz_error_unitary, decoherence_channel, ideal_cz, leading_order_gate_error,
    nonideal_cz, split_gate_error, tensor_channel, CzErrorParams, DecoherenceParams, KrausChannel,
};
use pta_core::protocol::{
    predict_bell, run_enumeration, run_montecarlo_pta, run_trial, trial_rng, ProtocolConfig,
    SimMode, Syndrome,
};
use pta_core::twirl::{pta, pta_cz, pta_decoherence, tphi_crit, twirl_numeric};
use pta_harness::config::{log_grid, SweepConfig};
use pta_harness::{decoherence_for, emit_csv, invert_pstep, run_sweep, HarnessError, SweepResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T_STEP: f64 = 25e-9;

const TWIRL_TOL: f64 = 1e-12;
const CONSERVATION_TOL: f64 = 1e-12;
const CROSSOVER_TOL: f64 = 1e-12;
const UNITARITY_TOL: f64 = 1e-12;
const LEADING_ORDER_REL: f64 = 0.02;
const ZERO_P_TOL: f64 = 1e-10;
const P_B_TOL: f64 = 1e-12;
const DECOHERENCE_REL: f64 = 0.05;
const GATE_REL: f64 = 0.15;
const MC_SIGMAS: f64 = 3.0;
const MC_TRIALS: usize = 100_000;

const C1_SECONDS: f64 = 5.0;
const C5_SECONDS: f64 = 1.0;
const POINT_SECONDS: f64 = 120.0;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {detail}");
    }

    fn run(&mut self, id: usize, name: &str, f: impl FnOnce() -> Outcome) {
        match f() {
            Ok((ok, detail)) => self.line(id, name, ok, detail),
            Err(e) => self.line(id, name, false, format!("error: {e}")),
        }
    }
}

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn random_decoherence(r: &mut ChaCha8Rng) -> pta_core::Result<DecoherenceParams<f64>> {
    let t1 = 10f64.powf(r.gen_range(-7.0..-3.0));
    let t_phi = if r.gen_bool(0.1) {
        f64::INFINITY
    } else {
        t1 * r.gen_range(0.05..5.0)
    };
    DecoherenceParams::new(t1, t_phi, r.gen_range(0.0..2.0), r.gen_range(1e-9..1e-7))
}

fn random_cz(r: &mut ChaCha8Rng) -> pta_core::Result<CzErrorParams<f64>> {
    CzErrorParams::new(
        r.gen_range(0.0..1.0),
        r.gen_range(-2.0..2.0),
        r.gen_range(-PI..PI),
    )
}

fn v_channel(p: &CzErrorParams<f64>) -> pta_core::Result<KrausChannel<f64>> {
    KrausChannel::from_unitary(cz_error_unitary(p), "V")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let (mut dec_dev, mut cz_dev) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = random_decoherence(&mut r)?;
        dec_dev = dec_dev
            .max(pta_decoherence(&p).max_abs_diff(&twirl_numeric(&decoherence_channel(&p)?)?));
        let c = random_cz(&mut r)?;
        cz_dev = cz_dev.max(pta_cz(&c).max_abs_diff(&twirl_numeric(&v_channel(&c)?)?));
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = dec_dev <= TWIRL_TOL && cz_dev <= TWIRL_TOL && secs < C1_SECONDS;
    Ok((
        ok,
        format!(
            "max dev decoherence {dec_dev:.1e}, CZ {cz_dev:.1e} (tol {TWIRL_TOL:e}); {secs:.2} s"
        ),
    ))
}

fn criterion_2() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = decoherence_channel(&random_decoherence(&mut r)?)?;
        let b = decoherence_channel(&random_decoherence(&mut r)?)?;
        worst = worst.max((pta(&a).total() - 1.0).abs());
        worst = worst.max((pta(&tensor_channel(&[a, b])?).total() - 1.0).abs());
        worst = worst.max((pta(&v_channel(&random_cz(&mut r)?)?).total() - 1.0).abs());
    }
    Ok((
        worst <= CONSERVATION_TOL,
        format!("max |sum p_A - 1| = {worst:.1e}"),
    ))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut exact_markov = true;
    for &t1 in &[1e-7, 2.5e-6, 3e-5, 1e-3] {
        for &alpha in &[0.0, 0.5, 1.0] {
            let crit = tphi_crit(t1, alpha, T_STEP);
            let (x, y, z) =
                pta_decoherence(&DecoherenceParams::new(t1, crit, alpha, T_STEP)?).xyz();
            worst = worst
                .max((x - y).abs())
                .max((x - z).abs())
                .max((y - z).abs());
        }
        exact_markov &= tphi_crit(t1, 0.0, T_STEP) == 2.0 * t1;
    }
    Ok((
        worst <= CROSSOVER_TOL && exact_markov,
        format!("max |p_a - p_b| = {worst:.1e}; alpha=0 crossover == 2 T1: {exact_markov}"),
    ))
}

fn criterion_4() -> Outcome {
    let mut unit = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let p = CzErrorParams::new(
                    i as f64 / 9.0,
                    -PI + 2.0 * PI * j as f64 / 9.0,
                    2.0 * PI * k as f64 / 9.0,
                )?;
                unit = unit.max(nonideal_cz(&p).unitarity_deviation());
            }
        }
    }
    let cz = ideal_cz::<f64>();
    let f_ideal = avg_gate_fidelity(&cz, &cz)?;
    let mut rel = 0.0f64;
    for e in log_grid(1e-5, 1e-2, 7) {
        for &phi in &[0.0, FRAC_PI_4, PI / 2.0] {
            let p = split_gate_error(e, phi)?;
            let exact = 1.0 - avg_gate_fidelity(&nonideal_cz(&p), &cz)?;
            rel = rel
                .max((exact - leading_order_gate_error(&p)).abs() / leading_order_gate_error(&p));
        }
    }
    let ok = unit <= UNITARITY_TOL && f_ideal == 1.0 && rel <= LEADING_ORDER_REL;
    Ok((
        ok,
        format!(
            "max |U^dag U - I| {unit:.1e}; F(CZ,CZ) = {f_ideal}; leading-order rel gap {:.2}%",
            rel * 100.0
        ),
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut ok = true;
    for mode in SimMode::ALL {
        let cfg = ProtocolConfig::error_free(mode);
        let est = if mode.is_sampled() {
            run_montecarlo_pta(&cfg, 5, 100)?
        } else {
            run_enumeration(&cfg)?
        };
        worst = worst.max(est.p.abs());
        ok &= est.cycles_mean == 3.0;
        let t = run_trial(&cfg, &mut trial_rng(5, 0))?;
        ok &= t.cycles_run == 3 && t.syndrome_history == vec![Syndrome(0, 0); 3];
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        ok && worst <= ZERO_P_TOL && secs < C5_SECONDS,
        format!("max |P| {worst:.1e}, 3 cycles of (0,0) in all modes: {ok}; {secs:.3} s"),
    ))
}

fn criterion_6() -> Outcome {
    let table = [
        ("XIII", Syndrome(1, 0)),
        ("IXII", Syndrome(1, 0)),
        ("YIII", Syndrome(1, 1)),
        ("IYII", Syndrome(1, 1)),
        ("ZIII", Syndrome(0, 1)),
        ("IZII", Syndrome(0, 1)),
    ];
    let mut bad = Vec::new();
    for (err, want) in table {
        let cfg = ProtocolConfig::error_free(SimMode::Exact).with_injection(1, err)?;
        let t = run_trial(&cfg, &mut trial_rng(6, 0))?;
        if t.final_syndrome != want
            || t.predicted_bell != predict_bell(want)
            || (t.p_b - 1.0).abs() > P_B_TOL
        {
            bad.push(format!("{err}->{:?} p_B={}", t.final_syndrome, t.p_b));
        }
    }
    let detail = if bad.is_empty() {
        "X->(1,0) B3, Z->(0,1) B2, Y->(1,1) B4 on both data qubits, p_B = 1".to_string()
    } else {
        bad.join("; ")
    };
    Ok((bad.is_empty(), detail))
}

fn gate_grid(
    ratio: f64,
    phi: f64,
    p_steps: Vec<f64>,
    gate_errors: Vec<f64>,
    modes: Vec<SimMode>,
) -> Result<SweepResult, HarnessError> {
    run_sweep(&SweepConfig {
        t2_ratio: ratio,
        phi,
        p_steps,
        gate_errors,
        modes,
        timing: true,
        ..SweepConfig::default()
    })
}

/// Relative PTA/exact gaps at each (p_step, E) of `res`.
fn gaps(res: &SweepResult, gate_errors: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for r in res
        .mode_rows(SimMode::Exact)
        .filter(|r| gate_errors.contains(&r.gate_error))
    {
        if let Some(p) = res.lookup(r.p_step, r.gate_error, SimMode::Pta) {
            out.push((r.p_step, r.gate_error, (p - r.p).abs() / r.p));
        }
    }
    out
}

fn worst_gap(g: &[(f64, f64, f64)]) -> String {
    match g.iter().max_by(|a, b| a.2.total_cmp(&b.2)) {
        Some((p, e, v)) => format!("{:.2}% at p_step={p}, E={e}", v * 100.0),
        None => "no points".into(),
    }
}

fn slowest(res: &SweepResult) -> f64 {
    // rows carry per-mode wall time; a point is the sum of its modes
    let mut worst = 0.0f64;
    for r in res.mode_rows(SimMode::Exact) {
        let total: f64 = res
            .rows
            .iter()
            .filter(|x| x.p_step == r.p_step && x.gate_error == r.gate_error)
            .map(|x| x.wall_s)
            .sum();
        worst = worst.max(total);
    }
    worst
}

fn decoherence_gate_outcomes(res: &SweepResult, label: &str) -> [(bool, String); 2] {
    let dec = gaps(res, &[0.0]);
    let gate = gaps(res, &[1e-3, 1e-2]);
    let secs = slowest(res);
    let ok7 = dec.len() == 2 && dec.iter().all(|g| g.2 <= DECOHERENCE_REL) && secs <= POINT_SECONDS;
    let ok8 = gate.len() == 4 && gate.iter().all(|g| g.2 <= GATE_REL) && secs <= POINT_SECONDS;
    [
        (
            ok7,
            format!(
                "{label} decoherence-only worst gap {} (tol 5%); slowest point {secs:.2} s",
                worst_gap(&dec)
            ),
        ),
        (
            ok8,
            format!("{label} phi=0 worst gap {} (tol 15%)", worst_gap(&gate)),
        ),
    ]
}

fn criterion_9() -> Outcome {
    let res = gate_grid(
        1.0,
        FRAC_PI_4,
        log_grid(1e-4, 1e-1, 13),
        vec![1e-3, 1e-2],
        vec![SimMode::Exact, SimMode::Pta],
    )?;
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for r in res.mode_rows(SimMode::Exact) {
        let p = res
            .lookup(r.p_step, r.gate_error, SimMode::Pta)
            .ok_or("missing PTA row")?;
        min_margin = min_margin.min((p - r.p) / r.p);
        if p < r.p {
            violations.push(format!("p_step={} E={}", r.p_step, r.gate_error));
        }
    }
    Ok((
        violations.is_empty(),
        format!(
            "P_PTA >= P_exact at {}/26 points; smallest relative margin {:.2}%{}",
            26 - violations.len(),
            min_margin * 100.0,
            if violations.is_empty() {
                String::new()
            } else {
                format!("; violations: {}", violations.join(", "))
            }
        ),
    ))
}

fn criterion_11() -> Outcome {
    let configs = [
        ("p_step=1e-2 E=0", 1e-2, 0.0, 0.0),
        ("p_step=1e-3 E=1e-2 phi=0", 1e-3, 1e-2, 0.0),
        ("p_step=1e-2 E=1e-2 phi=pi/4", 1e-2, 1e-2, FRAC_PI_4),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (label, ps, e, phi)) in configs.into_iter().enumerate() {
        let t1 = invert_pstep(ps, 1.0, 0.0, T_STEP)?;
        let cfg = ProtocolConfig::new(
            Some(decoherence_for(t1, 1.0, 0.0, T_STEP)?),
            split_gate_error(e, phi)?,
            SimMode::Pta,
        );
        let exact = run_enumeration(&cfg)?;
        let mc = run_montecarlo_pta(&cfg, 1000 + i as u64, MC_TRIALS)?;
        let z = (mc.p - exact.p).abs() / mc.std_error;
        ok &= z <= MC_SIGMAS;
        parts.push(format!("{label}: {z:.2} sigma"));
    }

    // determinism: same seed at 1 and 4 workers, both for the estimator and the CSV bytes
    let cfg = SweepConfig {
        p_steps: vec![1e-3, 1e-2],
        gate_errors: vec![0.0, 1e-2],
        modes: vec![SimMode::MonteCarloPta],
        trials: 2_000,
        ..SweepConfig::default()
    };
    let dir = std::env::temp_dir().join(format!("pta-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let mut csvs = Vec::new();
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        let res = pool.install(|| run_sweep(&cfg))?;
        let path = dir.join(format!("mc{threads}.csv"));
        emit_csv(&res, &path)?;
        csvs.push(std::fs::read(&path)?);
    }
    std::fs::remove_dir_all(&dir)?;
    let identical = csvs[0] == csvs[1];
    ok &= identical;
    parts.push(format!(
        "CSV byte-identical at 1 and 4 workers: {identical}"
    ));
    Ok((ok, parts.join("; ")))
}

fn criterion_12(grids: &[(&str, &SweepResult)]) -> (bool, String, Vec<String>) {
    let mut ok = true;
    let mut count = 0;
    let mut findings = Vec::new();
    for (label, res) in grids {
        for r in res.mode_rows(SimMode::BoundPta) {
            count += 1;
            let pta = res.lookup(r.p_step, r.gate_error, SimMode::Pta);
            let exact = res.lookup(r.p_step, r.gate_error, SimMode::Exact);
            if pta.is_none_or(|p| r.p < p) {
                ok = false;
            }
            if let Some(x) = exact {
                if r.p < x {
                    findings.push(format!(
                        "{label} p_step={} E={}: P_bound {:.4e} < P_exact {x:.4e}",
                        r.p_step, r.gate_error, r.p
                    ));
                }
            }
        }
    }
    (
        ok,
        format!(
            "P_bound >= P_PTA at all {count} points: {ok}; {} points with P_bound < P_exact",
            findings.len()
        ),
        findings,
    )
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    report.run(1, "closed-form vs oracle twirl", criterion_1);
    report.run(2, "probability conservation", criterion_2);
    report.run(3, "depolarizing crossover", criterion_3);
    report.run(4, "CZ model", criterion_4);
    report.run(5, "zero-error protocol", criterion_5);
    report.run(6, "syndrome table", criterion_6);

    let modes = vec![SimMode::Exact, SimMode::Pta, SimMode::BoundPta];
    let grid = |ratio| {
        gate_grid(
            ratio,
            0.0,
            vec![1e-3, 1e-2],
            vec![0.0, 1e-3, 1e-2],
            modes.clone(),
        )
    };
    let grids: Vec<(&str, Result<SweepResult, _>)> = vec![
        ("T2=T1", grid(1.0)),
        ("T2=2T1", grid(2.0)),
        ("T2=T1/2", grid(0.5)),
    ];

    match &grids[0].1 {
        Ok(res) => {
            let [c7, c8] = decoherence_gate_outcomes(res, "T2=T1");
            report.line(7, "PTA accuracy, decoherence only", c7.0, c7.1);
            report.line(8, "PTA accuracy with gate errors", c8.0, c8.1);
        }
        Err(e) => {
            report.line(
                7,
                "PTA accuracy, decoherence only",
                false,
                format!("error: {e}"),
            );
            report.line(
                8,
                "PTA accuracy with gate errors",
                false,
                format!("error: {e}"),
            );
        }
    }
    report.run(9, "PTA overestimates at phi = pi/4", criterion_9);

    let mut ok10 = true;
    let mut detail10 = Vec::new();
    for (label, res) in &grids[1..] {
        match res {
            Ok(res) => {
                for (ok, d) in decoherence_gate_outcomes(res, label) {
                    ok10 &= ok;
                    detail10.push(d);
                }
            }
            Err(e) => {
                ok10 = false;
                detail10.push(format!("{label}: error: {e}"));
            }
        }
    }
    report.line(10, "T2 variants", ok10, detail10.join("; "));

    report.run(11, "Monte Carlo consistency", criterion_11);

    let ok_grids: Vec<(&str, &SweepResult)> = grids
        .iter()
        .filter_map(|(l, r)| r.as_ref().ok().map(|r| (*l, r)))
        .collect();
    let (ok12, detail12, findings) = criterion_12(&ok_grids);
    report.line(12, "bound channel", ok12 && ok_grids.len() == 3, detail12);
    for f in findings {
        println!("     finding: {f}");
    }

    println!("{} of 12 criteria failed", report.failures);
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
