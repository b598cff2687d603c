use pta_core::channels::{split_gate_error, CzErrorParams, DecoherenceParams};
use pta_core::protocol::{
    build_schedule, initial_state, predict_bell, run_cycle, run_enumeration, run_montecarlo_pta,
    run_trial, trial_rng, CycleContext, Gate, ProtocolConfig, SimMode, StepNoise, Syndrome,
};

const T_STEP: f64 = 25e-9;

fn dec(t1: f64, t2_ratio: f64) -> DecoherenceParams<f64> {
    DecoherenceParams::from_t1_t2(t1, t2_ratio * t1, T_STEP).unwrap()
}

fn config(t1: f64, e: f64, phi: f64, mode: SimMode) -> ProtocolConfig {
    ProtocolConfig::new(Some(dec(t1, 1.0)), split_gate_error(e, phi).unwrap(), mode)
}

#[test]
fn schedule_shape() {
    for mode in SimMode::ALL {
        let s = build_schedule(&split_gate_error(1e-3, 0.0).unwrap(), mode).unwrap();
        assert_eq!(s.steps().len(), 9);
        assert_eq!(s.cz_count(), 4);
        assert!(matches!(
            s.steps()[8].gates.last(),
            Some(Gate::MeasureAncillas)
        ));
        assert!((s.cycle_time(T_STEP) - 225e-9).abs() < 1e-20);
    }
}

#[test]
fn zero_error_every_mode() {
    for mode in SimMode::ALL {
        let cfg = ProtocolConfig::error_free(mode);
        let est = if mode.is_sampled() {
            run_montecarlo_pta(&cfg, 3, 200).unwrap()
        } else {
            run_enumeration(&cfg).unwrap()
        };
        assert!(est.p.abs() <= 1e-10, "{mode}: {}", est.p);
        assert_eq!(est.cycles_mean, 3.0);
    }
}

#[test]
fn six_injected_errors_follow_anticommutation() {
    // X anticommutes with the ZZ stabilizer, Z with XX, Y with both
    for (err, want) in [
        ("XIII", Syndrome(1, 0)),
        ("IXII", Syndrome(1, 0)),
        ("YIII", Syndrome(1, 1)),
        ("IYII", Syndrome(1, 1)),
        ("ZIII", Syndrome(0, 1)),
        ("IZII", Syndrome(0, 1)),
    ] {
        for mode in [SimMode::Exact, SimMode::Pta] {
            let cfg = ProtocolConfig::error_free(mode)
                .with_injection(1, err)
                .unwrap();
            let out = run_trial(&cfg, &mut trial_rng(1, 0)).unwrap();
            assert_eq!(out.syndrome_history, vec![want; 3], "{err}");
            assert_eq!(out.predicted_bell, predict_bell(want));
            assert!((out.p_b - 1.0).abs() <= 1e-12, "{err}: {}", out.p_b);
            let est = run_enumeration(&cfg).unwrap();
            assert!(est.p.abs() <= 1e-12);
        }
    }
}

#[test]
fn trace_stable_over_a_hundred_cycles() {
    let d = dec(5e-6, 1.0);
    let cz = split_gate_error(1e-2, 0.5).unwrap();
    for mode in [SimMode::Exact, SimMode::Pta] {
        let sched = build_schedule(&cz, mode).unwrap();
        let noise = StepNoise::build(Some(&d), mode).unwrap();
        let mut rng = trial_rng(5, 0);
        let mut rho = initial_state();
        for _ in 0..100 {
            let mut ctx = CycleContext::Sample(&mut rng);
            rho = run_cycle(&rho, &sched, &noise, &mut ctx)
                .unwrap()
                .pop()
                .unwrap()
                .state;
            assert!((rho.trace() - 1.0).abs() <= 1e-9, "{mode}");
        }
        assert!(rho.is_psd(1e-9));
    }
}

#[test]
fn branch_weights_sum_to_one() {
    let d = dec(2e-6, 0.5);
    let cz = split_gate_error(1e-2, 0.2).unwrap();
    for mode in [SimMode::Exact, SimMode::Pta, SimMode::BoundPta] {
        let sched = build_schedule(&cz, mode).unwrap();
        let noise = StepNoise::build(Some(&d), mode).unwrap();
        let branches =
            run_cycle(&initial_state(), &sched, &noise, &mut CycleContext::Branch).unwrap();
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        assert!((total - 1.0).abs() <= 1e-12, "{mode}: {total}");
    }
}

#[test]
fn enumeration_matches_explicit_tree_for_short_cap() {
    // with max_cycles = 3 the tree is small enough to expand by hand:
    // 4^3 leaves, stable only for three identical syndromes
    let cfg = {
        let mut c = config(1e-6, 1e-2, 0.3, SimMode::Exact);
        c.max_cycles = 3;
        c
    };
    let sched = build_schedule(&cfg.cz, cfg.mode).unwrap();
    let noise = StepNoise::build(cfg.decoherence.as_ref(), cfg.mode).unwrap();
    let mut fail = 0.0;
    let mut mass = 0.0;
    let mut frontier = vec![(vec![], initial_state(), 1.0)];
    for _ in 0..3 {
        let mut next = Vec::new();
        for (hist, rho, w) in frontier {
            for b in run_cycle(&rho, &sched, &noise, &mut CycleContext::Branch).unwrap() {
                let mut h: Vec<Syndrome> = hist.clone();
                h.push(b.syndrome);
                next.push((h, b.state, w * b.weight));
            }
        }
        frontier = next;
    }
    for (hist, rho, w) in frontier {
        let s = *hist.last().unwrap();
        let p_b = pta_core::protocol::bell_fidelity(&rho, predict_bell(s)).unwrap();
        fail += w * (1.0 - p_b);
        mass += w;
    }
    let mut cfg = cfg;
    cfg.prune_threshold = 1e-300;
    let est = run_enumeration(&cfg).unwrap();
    assert!(
        (est.p - fail / mass).abs() <= 1e-12,
        "{} vs {}",
        est.p,
        fail / mass
    );
}

#[test]
fn montecarlo_is_reproducible() {
    let cfg = config(2.5e-6, 1e-2, 0.0, SimMode::MonteCarloPta);
    let a = run_montecarlo_pta(&cfg, 42, 500).unwrap();
    let b = run_montecarlo_pta(&cfg, 42, 500).unwrap();
    assert_eq!(a, b);
    let c = run_montecarlo_pta(&cfg, 43, 500).unwrap();
    assert_ne!(a.p, c.p);
}

#[test]
fn montecarlo_agrees_with_enumeration_at_one_percent() {
    // decoherence only, p_step close to 1e-2
    let cfg = ProtocolConfig::new(
        Some(dec(1.875e-6, 1.0)),
        CzErrorParams::ideal(),
        SimMode::Pta,
    );
    let exact = run_enumeration(&cfg).unwrap();
    let mc = run_montecarlo_pta(&cfg, 9, 20_000).unwrap();
    let z = (mc.p - exact.p).abs() / mc.std_error;
    assert!(z <= 3.0, "enum {} mc {} +- {}", exact.p, mc.p, mc.std_error);
    assert!(mc.cycles_mean > 3.0 && mc.cycles_mean < 5.0);
}

#[test]
fn bound_mode_dominates_pta() {
    for &(t1, e) in &[(2.5e-5, 1e-3), (2.5e-6, 1e-2), (2.5e-6, 0.0)] {
        let pta = run_enumeration(&config(t1, e, 0.0, SimMode::Pta))
            .unwrap()
            .p;
        let bound = run_enumeration(&config(t1, e, 0.0, SimMode::BoundPta))
            .unwrap()
            .p;
        assert!(bound >= pta - 1e-12, "T1={t1} E={e}: {bound} < {pta}");
    }
}

#[test]
fn failure_grows_with_decoherence() {
    let mut last = 0.0;
    for &t1 in &[1e-4, 3e-5, 1e-5, 3e-6, 1e-6] {
        let p = run_enumeration(&config(t1, 0.0, 0.0, SimMode::Exact))
            .unwrap()
            .p;
        assert!(p > last, "T1={t1}");
        last = p;
    }
}

#[test]
fn mass_budget_is_enforced() {
    let mut cfg = config(1e-6, 1e-2, 0.0, SimMode::Pta);
    cfg.prune_threshold = 1e-2;
    cfg.mass_budget = 1e-9;
    assert!(matches!(
        run_enumeration(&cfg),
        Err(pta_core::Error::MassBudgetExceeded { .. })
    ));
}
