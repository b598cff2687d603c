//! Fast invariant and oracle checks behind `ptasim check`.

use std::f64::consts::PI;

use pta_core::channels::{
    avg_gate_fidelity, cz_error_unitary, decoherence_channel, ideal_cz, leading_order_gate_error,
    nonideal_cz, split_gate_error, tensor_channel, CzErrorParams, DecoherenceParams,
};
use pta_core::protocol::{
    predict_bell, run_enumeration, run_trial, trial_rng, ProtocolConfig, SimMode, Syndrome,
};
use pta_core::twirl::{pta, pta_cz, pta_decoherence, tphi_crit, twirl_numeric};
use pta_core::{KrausChannel64, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult {
            name,
            passed,
            detail,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

const T_STEP: f64 = 25e-9;

fn decoherence_grid() -> Result<Vec<DecoherenceParams<f64>>> {
    let mut out = Vec::new();
    for &t1 in &[2e-7, 5e-6, 1e-4] {
        for &ratio in &[0.3, 1.0, 4.0] {
            for &alpha in &[0.0, 0.5, 1.0] {
                out.push(DecoherenceParams::new(t1, ratio * t1, alpha, T_STEP)?);
            }
        }
    }
    Ok(out)
}

fn cz_grid() -> Result<Vec<CzErrorParams<f64>>> {
    let mut out = Vec::new();
    for &e1 in &[0.0, 1e-3, 0.05, 0.4] {
        for &delta in &[0.0, 0.1, 1.3] {
            for &phi in &[0.0, PI / 4.0, 2.0] {
                out.push(CzErrorParams::new(e1, delta, phi)?);
            }
        }
    }
    Ok(out)
}

fn closed_forms() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for p in decoherence_grid()? {
        let lit = twirl_numeric(&decoherence_channel(&p)?)?;
        worst = worst.max(pta_decoherence(&p).max_abs_diff(&lit));
    }
    for p in cz_grid()? {
        let ch = KrausChannel64::from_unitary(cz_error_unitary(&p), "V")?;
        worst = worst.max(pta_cz(&p).max_abs_diff(&twirl_numeric(&ch)?));
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:e}")))
}

fn conservation() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let decs = decoherence_grid()?;
    for p in &decs {
        worst = worst.max((pta(&decoherence_channel(p)?).total() - 1.0).abs());
    }
    let pair = tensor_channel(&[
        decoherence_channel(&decs[0])?,
        decoherence_channel(&decs[13])?,
    ])?;
    worst = worst.max((pta(&pair).total() - 1.0).abs());
    for p in cz_grid()? {
        let ch = KrausChannel64::from_unitary(cz_error_unitary(&p), "V")?;
        worst = worst.max((pta(&ch).total() - 1.0).abs());
    }
    Ok((worst <= 1e-12, format!("max |sum - 1| {worst:e}")))
}

fn crossover() -> Result<(bool, String)> {
    let t1 = 1e-6;
    let mut worst = 0.0f64;
    for &alpha in &[0.0, 0.5, 1.0] {
        let crit = tphi_crit(t1, alpha, T_STEP);
        let (px, py, pz) = pta_decoherence(&DecoherenceParams::new(t1, crit, alpha, T_STEP)?).xyz();
        worst = worst.max((px - pz).abs()).max((py - pz).abs());
    }
    let markov = tphi_crit(t1, 0.0, T_STEP);
    let ok = worst <= 1e-12 && markov == 2.0 * t1;
    Ok((
        ok,
        format!("max |p_a - p_b| {worst:e}, alpha=0 crossover {markov:e}"),
    ))
}

fn cz_model() -> Result<(bool, String)> {
    let mut unit = 0.0f64;
    for p in cz_grid()? {
        unit = unit.max(nonideal_cz(&p).unitarity_deviation());
    }
    let cz = ideal_cz::<f64>();
    let f_ideal = avg_gate_fidelity(&cz, &cz)?;
    let mut rel = 0.0f64;
    for &e in &[1e-4, 1e-3, 1e-2] {
        for &phi in &[0.0, PI / 4.0, PI / 2.0] {
            let p = split_gate_error(e, phi)?;
            let actual = 1.0 - avg_gate_fidelity(&nonideal_cz(&p), &cz)?;
            rel = rel.max((actual - leading_order_gate_error(&p)).abs() / e);
        }
    }
    let ok = unit <= 1e-12 && f_ideal == 1.0 && rel <= 0.02;
    Ok((
        ok,
        format!("unitarity {unit:e}, F(CZ,CZ)={f_ideal}, leading-order rel gap {rel:e}"),
    ))
}

fn zero_error() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut ok = true;
    for mode in [SimMode::Exact, SimMode::Pta, SimMode::BoundPta] {
        let est = run_enumeration(&ProtocolConfig::error_free(mode))?;
        worst = worst.max(est.p.abs());
        ok &= est.cycles_mean == 3.0;
    }
    let out = run_trial(
        &ProtocolConfig::error_free(SimMode::MonteCarloPta),
        &mut trial_rng(0, 0),
    )?;
    worst = worst.max((1.0 - out.p_b).abs());
    ok &= out.cycles_run == 3 && out.syndrome_history.iter().all(|&s| s == Syndrome(0, 0));
    Ok((ok && worst <= 1e-10, format!("max |P| {worst:e}")))
}

fn syndrome_table() -> Result<(bool, String)> {
    let cases = [
        ("XIII", Syndrome(1, 0)),
        ("IXII", Syndrome(1, 0)),
        ("ZIII", Syndrome(0, 1)),
        ("IZII", Syndrome(0, 1)),
        ("YIII", Syndrome(1, 1)),
        ("IYII", Syndrome(1, 1)),
    ];
    let mut bad = Vec::new();
    for (err, want) in cases {
        let cfg = ProtocolConfig::error_free(SimMode::Exact).with_injection(1, err)?;
        let out = run_trial(&cfg, &mut trial_rng(0, 0))?;
        if out.final_syndrome != want
            || out.predicted_bell != predict_bell(want)
            || (out.p_b - 1.0).abs() > 1e-10
        {
            bad.push(err);
        }
    }
    Ok((bad.is_empty(), format!("mismatches: {bad:?}")))
}

/// Runs the full suite. Takes well under a second.
pub fn run_checks() -> Vec<CheckResult> {
    vec![
        check("closed forms match literal twirl", closed_forms),
        check("probability conservation", conservation),
        check("depolarizing crossover", crossover),
        check("CZ error model", cz_model),
        check("error-free protocol", zero_error),
        check("syndrome table", syndrome_table),
    ]
}
