//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
#![allow(clippy::approx_constant, clippy::type_complexity)]

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refrig_imc::parallel::run_sweep_parallel;
use refrig_imc_core::imc::ideal_pid_tf;
use refrig_imc_core::metrics::weighted_j;
use refrig_imc_core::reduction::sum_squared_residual;
use refrig_imc_core::{
    aggregate_j, default_scenario, fit_sopm, imc_controller_tf, imc_pid, presets, rga,
    run_closed_loop, Channel, ContinuousTF, GainMatrix, ImcDesign, IndexSet, JWeights, Lti,
    MimoPlant2x2, Scenario, SecondOrderModel, SweepGrid, SweepProblem,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within_rel(x: f64, target: f64, tol: f64) -> bool {
    ((x - target) / target).abs() <= tol
}

fn c1_imc_tuning() -> Verdict {
    let m11 = SecondOrderModel::new(-0.016, 31.0, 3e-5).unwrap();
    let m22 = SecondOrderModel::new(0.16, 3.0, 1e-7).unwrap();
    let start = Instant::now();
    let c1 = imc_pid(&m11, 0.1, 10.0, presets::AV_LIMITS).unwrap();
    let c2 = imc_pid(&m22, 0.1, 10.0, presets::N_LIMITS).unwrap();
    let elapsed = start.elapsed();
    let checks = [
        ("k1", within_rel(c1.k, -1.93e4, 0.005)),
        ("tau_i1", (c1.tau_i - 31.0).abs() <= 1e-6),
        ("tau_d1", (c1.tau_d - 3e-5).abs() <= 1e-9),
        ("k2", within_rel(c2.k, 187.5, 0.005)),
        ("runtime", elapsed < Duration::from_millis(1)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    verdict(
        failed.is_empty(),
        format!(
            "k1 = {}, tau_i1 = {}, tau_d1 = {:e}, k2 = {}, {:?}; failed: {:?}",
            c1.k, c1.tau_i, c1.tau_d, c2.k, elapsed, failed
        ),
    )
}

fn c2_model_reduction() -> Verdict {
    let plant = presets::identified_plant();
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (ch, horizon, kp, tau1) in [
        (Channel::G11, 300.0, -0.016, 31.0),
        (Channel::G22, 60.0, 0.16, 3.0),
    ] {
        let g = plant.channel(ch).at_sample_time(1.0).unwrap();
        let y = g.step_response(horizon).unwrap();
        match fit_sopm(&y, 1.0, 1.0) {
            Ok(fit) => {
                let m = fit.model;
                ok &= within_rel(m.kp, kp, 0.05) && within_rel(m.tau1, tau1, 0.10);
                detail.push(format!("{ch}: kp = {:.4}, tau1 = {:.4}", m.kp, m.tau1));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{ch}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    verdict(ok, format!("{}, {elapsed:?}", detail.join("; ")))
}

fn c3_metrics_table() -> Verdict {
    let ratios = [
        0.3511, 0.4458, 1.6104, 0.1830, 0.3196, 0.1280, 1.1283, 1.3739,
    ];
    let j = weighted_j(&ratios, &JWeights::default());
    verdict(
        (j - 0.68209).abs() <= 5e-4,
        format!("equal-weight J = {j:.5}, expected 0.68209"),
    )
}

fn c4_rga() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_sum = 0.0f64;
    let mut worst_scale = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let a = GainMatrix([
            [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
            [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
        ]);
        let Ok(l) = rga(&a) else { continue };
        n += 1;
        let m = l.0;
        for s in [
            m[0][0] + m[0][1],
            m[1][0] + m[1][1],
            m[0][0] + m[1][0],
            m[0][1] + m[1][1],
        ] {
            worst_sum = worst_sum.max((s - 1.0).abs());
        }
        let (d1, d2, e1, e2) = (
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
        );
        let b = GainMatrix([
            [d1 * a.0[0][0] * e1, d1 * a.0[0][1] * e2],
            [d2 * a.0[1][0] * e1, d2 * a.0[1][1] * e2],
        ]);
        let lb = rga(&b).unwrap().0;
        for i in 0..2 {
            for k in 0..2 {
                worst_scale = worst_scale.max((lb[i][k] - m[i][k]).abs());
            }
        }
    }
    // coupling product a12 a21 / (a11 a22) = 3.9984e-4
    let inv = GainMatrix([[1.0, 0.019996], [0.019996, 1.0]]);
    let l11 = rga(&inv).unwrap().0[0][0];
    let ok = worst_sum <= 1e-9 && worst_scale <= 1e-9 && (l11 - 1.0004).abs() <= 1e-6;
    verdict(ok, format!("max |sum - 1| = {worst_sum:.1e}, max scaling change = {worst_scale:.1e}, lambda11 = {l11:.7}"))
}

fn c5_closed_loop() -> Verdict {
    let g11: Lti = presets::g11_reduced().to_tf().into();
    let zero: Lti = ContinuousTF::new(vec![0.0], vec![1.0]).unwrap().into();
    let g22: Lti = presets::g22_reduced().to_tf().into();
    let plant = MimoPlant2x2::new(g11, zero.clone(), zero, g22).unwrap();
    let c = presets::imc_controllers(refrig_imc_core::LambdaPreset::Table3).unwrap();
    let (t_step, step) = (10.0, -0.5);
    let duration = t_step + 10.0 * c[0].tau_i + 10.0;
    let base = default_scenario();
    let y0 = base.operating_point.y0;
    let scenario = Scenario {
        duration,
        ts: 1.0,
        operating_point: base.operating_point,
        setpoints: [
            vec![(0.0, y0[0]), (t_step, y0[0] + step)],
            vec![(0.0, y0[1])],
        ],
        disturbances: vec![],
        windows: vec![(t_step, 10.0); 4],
    };
    let sim = run_closed_loop(&plant, &c, &scenario).unwrap();
    let settle = t_step + 10.0 * c[0].tau_i;
    let tail_err = sim
        .time
        .iter()
        .zip(&sim.e[0])
        .filter(|(t, _)| **t >= settle)
        .fold(0.0f64, |m, (_, e)| m.max(e.abs()));
    let u = sim.u_abs(0);
    let in_limits = u.iter().all(|v| (10.0..=90.0).contains(v));
    let ok = !sim.diverged() && tail_err < 1e-3 * step.abs() && in_limits;
    let (lo, hi) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    verdict(
        ok,
        format!(
            "max |e| after 10 tau_i = {tail_err:.2e} (limit {:.1e}), Av in [{lo:.2}, {hi:.2}]",
            1e-3 * step.abs()
        ),
    )
}

fn c6_sweep() -> Verdict {
    let sc = default_scenario();
    let plant = presets::surrogate_plant();
    let base = run_closed_loop(&plant, &presets::baseline_controllers(), &sc).unwrap();
    let problem = SweepProblem::new(
        [presets::g11_reduced(), presets::g22_reduced()],
        10.0,
        [presets::AV_LIMITS, presets::N_LIMITS],
        plant,
        sc,
        &base,
        JWeights::default(),
    )
    .unwrap();
    let grid = SweepGrid::standard();
    let workers = std::thread::available_parallelism()
        .map_or(4, |n| n.get())
        .max(2);
    let start = Instant::now();
    let par = run_sweep_parallel(&problem, &grid, Some(workers)).unwrap();
    let elapsed = start.elapsed();
    let seq = run_sweep_parallel(&problem, &grid, Some(1)).unwrap();
    let bits = |s: &refrig_imc_core::SweepSurface| -> Vec<u64> {
        s.points
            .iter()
            .flat_map(|p| {
                p.ratios
                    .iter()
                    .chain([&p.j])
                    .chain(p.raw.to_array().iter())
                    .map(|v| v.to_bits())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let identical = bits(&par) == bits(&seq);
    // grid index 1 is 0.06 and index 2 is 0.11
    let (j_small, j_large) = (par.at(1, 2).j, par.at(10, 10).j);
    let trend = j_large > j_small;
    let ok = trend && identical && elapsed < Duration::from_secs(60);
    verdict(
        ok,
        format!(
            "J(0.06, 0.11) = {j_small:.4}, J(0.51, 0.51) = {j_large:.4}, larger at (0.51, 0.51): {trend}; \
             {workers} workers {elapsed:?}; identical to 1 worker: {identical}"
        ),
    )
}

fn monic(num: &[f64], den: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let lead = *den.last().unwrap();
    (
        num.iter().map(|c| c / lead).collect(),
        den.iter().map(|c| c / lead).collect(),
    )
}

fn step(kp: f64, t1: f64, t2: f64, t: f64) -> f64 {
    if (t1 - t2).abs() < 1e-9 * t1 {
        kp * (1.0 - (1.0 + t / t1) * (-t / t1).exp())
    } else {
        kp * (1.0 - (t1 * (-t / t1).exp() - t2 * (-t / t2).exp()) / (t1 - t2))
    }
}

/// Smallest residual over a 60x60 log grid of time constants with the gain
/// solved by least squares.
fn grid_oracle(y: &[f64], ts: f64) -> f64 {
    let horizon = (y.len() - 1) as f64 * ts;
    let (lo, hi) = ((0.01 * ts).ln(), (10.0 * horizon).ln());
    let axis: Vec<f64> = (0..60)
        .map(|i| (lo + (hi - lo) * i as f64 / 59.0).exp())
        .collect();
    let mut best = f64::INFINITY;
    for (i, &a) in axis.iter().enumerate() {
        for &b in &axis[..=i] {
            let phi: Vec<f64> = (0..y.len())
                .map(|n| step(1.0, a, b, n as f64 * ts))
                .collect();
            let k = y.iter().zip(&phi).map(|(y, p)| y * p).sum::<f64>()
                / phi.iter().map(|p| p * p).sum::<f64>();
            best = best.min(
                y.iter()
                    .zip(&phi)
                    .map(|(y, p)| (y - k * p) * (y - k * p))
                    .sum(),
            );
        }
    }
    best
}

fn c7_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_tf = 0.0f64;
    for _ in 0..100 {
        let kp = rng.gen_range(0.01..10.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        let t1 = rng.gen_range(0.01..100.0);
        let m = SecondOrderModel::new(kp, t1, t1 * rng.gen_range(0.001..1.0)).unwrap();
        let lambda = rng.gen_range(0.01..5.0);
        let c = imc_controller_tf(&m.to_tf(), &ImcDesign::new(lambda, 1).unwrap()).unwrap();
        let p = imc_pid(&m, lambda, 10.0, (-1.0, 1.0)).unwrap();
        let pid = ideal_pid_tf(p.k, p.tau_i, p.tau_d);
        let (n1, d1) = monic(c.num().coeffs(), c.den().coeffs());
        let (n2, d2) = monic(pid.num().coeffs(), pid.den().coeffs());
        if n1.len() != n2.len() || d1.len() != d2.len() {
            return verdict(false, format!("structure differs for {m:?}"));
        }
        let scale = n1.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        for (a, b) in n1.iter().zip(&n2).chain(d1.iter().zip(&d2)) {
            worst_tf = worst_tf.max((a - b).abs() / scale);
        }
    }
    let mut worst_fit = f64::NEG_INFINITY;
    for case in 0..20 {
        let kp = rng.gen_range(-2.0..2.0);
        let t1 = rng.gen_range(2.0..40.0);
        let t2 = t1 * rng.gen_range(0.01..1.0);
        let n = (8.0 * t1) as usize + 20;
        let mut y: Vec<f64> = (0..n).map(|k| step(kp, t1, t2, k as f64)).collect();
        if case % 2 == 1 {
            let range = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for v in &mut y {
                *v += 0.005 * range * rng.gen_range(-1.0..1.0);
            }
        }
        let fit = fit_sopm(&y, 1.0, 1.0).unwrap();
        worst_fit =
            worst_fit.max(sum_squared_residual(&fit.model, &y, 1.0, 1.0) - grid_oracle(&y, 1.0));
    }
    verdict(
        worst_tf <= 1e-9 && worst_fit <= 1e-9,
        format!("max relative coefficient gap = {worst_tf:.1e}, max (fit - grid) residual = {worst_fit:.1e}"),
    )
}

fn c8_j_identity() -> Verdict {
    let sim = run_closed_loop(
        &presets::surrogate_plant(),
        &presets::baseline_controllers(),
        &default_scenario(),
    )
    .unwrap();
    let raw = IndexSet::score(&sim, &default_scenario().windows).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let mut w = [0.0; 8];
        for x in &mut w {
            *x = rng.gen_range(0.0..5.0);
        }
        w[rng.gen_range(0..8)] += 0.1;
        let rel = aggregate_j(&raw, &raw, &JWeights::new(w).unwrap())
            .unwrap()
            .relative
            .unwrap();
        if rel.j != 1.0 || rel.ratios.iter().any(|r| *r != 1.0) {
            return verdict(false, format!("weights {w:?} gave J = {}", rel.j));
        }
    }
    verdict(true, "ratios and J exactly 1 for 10 weight vectors")
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("IMC tuning reproduction", c1_imc_tuning),
        ("model reduction reproduction", c2_model_reduction),
        ("metrics self-consistency", c3_metrics_table),
        ("RGA properties", c4_rga),
        ("closed-loop contract", c5_closed_loop),
        ("sweep trend, speed and determinism", c6_sweep),
        ("oracle equivalence", c7_oracles),
        ("J identity", c8_j_identity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        failed += usize::from(!v.pass);
        println!(
            "{} criterion {} ({name}): {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
