//! The CLI subcommands. Each returns the text to print and the files it wrote.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use refrig_imc_core::metrics::INDEX_NAMES;
use refrig_imc_core::{
    aggregate_j, argmin_j, fit_sopm, presets, recommend_pairing, rga, run_closed_loop,
    steady_state_matrix, Channel, GainMatrix, IndexSet, MetricsReport, Pairing, PidParams,
    RgaMatrix, SimResult, SweepProblem, SweepSurface,
};

use crate::csvio;
use crate::error::{CliError, CliResult};
use crate::formats::{self, ControllerSpec, ModelSpec};
use crate::parallel;
use crate::project::{PlantSource, Project};
use crate::svg;

pub const RGA_JSON: &str = "rga.json";
pub const REDUCE_JSON: &str = "reduce.json";
pub const STEP_G11_CSV: &str = "step_g11.csv";
pub const STEP_G22_CSV: &str = "step_g22.csv";
pub const TUNE_JSON: &str = "tune.json";
pub const TUNE_CSV: &str = "tune.csv";
pub const SIM_CANDIDATE_CSV: &str = "sim_candidate.csv";
pub const SIM_BASELINE_CSV: &str = "sim_baseline.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const SWEEP_SUMMARY_JSON: &str = "sweep_summary.json";
pub const MANIFEST_JSON: &str = "run-manifest.json";

/// Step horizons for the two diagonal channels, seconds.
pub const STEP_HORIZONS: [f64; 2] = [300.0, 60.0];

const OUTPUT_NAMES: [&str; 2] = ["Te_sec_out", "Tsh"];
const INPUT_NAMES: [&str; 2] = ["Av", "N_comp"];

#[derive(Debug, Default)]
pub struct Outcome {
    pub text: String,
    pub artifacts: Vec<PathBuf>,
}

impl Outcome {
    fn absorb(&mut self, other: Outcome) {
        self.text.push_str(&other.text);
        self.artifacts.extend(other.artifacts);
    }
}

fn out_dir(p: &Project) -> CliResult<&Path> {
    std::fs::create_dir_all(&p.out).map_err(|e| CliError::io(&p.out, e))?;
    Ok(&p.out)
}

fn write_file(path: PathBuf, content: &str, arts: &mut Vec<PathBuf>) -> CliResult<()> {
    std::fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
    arts.push(path);
    Ok(())
}

/// File name for a surface: `J`, or `R` followed by the index name.
pub fn surface_file(name: &str) -> String {
    format!("sweep_{}.csv", name.replace('@', "_"))
}

pub fn ratio_names() -> [String; 8] {
    INDEX_NAMES.map(|n| format!("R{n}"))
}

// ---------------------------------------------------------------- rga

#[derive(Serialize)]
struct RgaOut {
    source: String,
    gain_matrix: [[f64; 2]; 2],
    rga: [[f64; 2]; 2],
    input_for_output: [usize; 2],
    poor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    published_rga: Option<[[f64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    published_input_for_output: Option<[usize; 2]>,
}

fn fmt_matrix(out: &mut String, m: &[[f64; 2]; 2]) {
    for row in m {
        let _ = writeln!(out, "  [{:>12.6} {:>12.6}]", row[0], row[1]);
    }
}

fn fmt_pairing(p: &Pairing) -> String {
    let s = (0..2)
        .map(|o| {
            format!(
                "{} <- {}",
                OUTPUT_NAMES[o], INPUT_NAMES[p.input_for_output[o]]
            )
        })
        .collect::<Vec<_>>();
    format!(
        "{}{}",
        s.join(", "),
        if p.poor {
            " (poor: relative gain outside (0, 2))"
        } else {
            ""
        }
    )
}

pub fn cmd_rga(p: &Project) -> CliResult<Outcome> {
    let (source, gm): (String, GainMatrix) = match &p.plant_source {
        PlantSource::File(path) => (path.display().to_string(), steady_state_matrix(&p.plant)?),
        PlantSource::Shipped => (
            "reduced diagonal with identified cross channels".into(),
            presets::hybrid_gain_matrix(),
        ),
    };
    let l: RgaMatrix = rga(&gm)?;
    let pairing = recommend_pairing(&l)?;
    let mut text = String::new();
    let _ = writeln!(text, "Plant: {source}");
    let _ = writeln!(text, "Steady-state gain matrix:");
    fmt_matrix(&mut text, &gm.0);
    let _ = writeln!(text, "Relative gain array:");
    fmt_matrix(&mut text, &l.0);
    let _ = writeln!(text, "Pairing: {}", fmt_pairing(&pairing));
    let published = if p.plant_source == PlantSource::Shipped {
        let pl = presets::PUBLISHED_RGA;
        let pp = recommend_pairing(&pl)?;
        let _ = writeln!(text, "Published relative gain array:");
        fmt_matrix(&mut text, &pl.0);
        let _ = writeln!(
            text,
            "Published pairing (used for control): {}",
            fmt_pairing(&pp)
        );
        Some((pl.0, pp.input_for_output))
    } else {
        None
    };
    let rec = RgaOut {
        source,
        gain_matrix: gm.0,
        rga: l.0,
        input_for_output: pairing.input_for_output,
        poor: pairing.poor,
        published_rga: published.map(|x| x.0),
        published_input_for_output: published.map(|x| x.1),
    };
    let mut arts = Vec::new();
    write_file(
        out_dir(p)?.join(RGA_JSON),
        &formats::to_json(&rec),
        &mut arts,
    )?;
    Ok(Outcome {
        text,
        artifacts: arts,
    })
}

// ---------------------------------------------------------------- reduce

#[derive(Serialize)]
struct FitOut {
    channel: String,
    horizon: f64,
    ts: f64,
    model: ModelSpec,
    fit_percent: f64,
    residual_norm: f64,
    tau2_identifiable: bool,
    reference: ModelSpec,
}

/// Fits second-order models to the unit step responses of the diagonal
/// channels of the identified plant.
pub fn cmd_reduce(p: &Project) -> CliResult<Outcome> {
    let dir = out_dir(p)?;
    let mut text = String::from("Second-order model reduction (unit step)\n");
    let mut arts = Vec::new();
    let mut fits = Vec::new();
    let refs = [presets::g11_reduced(), presets::g22_reduced()];
    for (k, (ch, file)) in [(Channel::G11, STEP_G11_CSV), (Channel::G22, STEP_G22_CSV)]
        .into_iter()
        .enumerate()
    {
        let g = p.plant.channel(ch);
        let ts = g.ts().unwrap_or(p.ts);
        let y = g.at_sample_time(ts)?.step_response(STEP_HORIZONS[k])?;
        let fit = fit_sopm(&y, ts, 1.0)?;
        let yhat: Vec<f64> = (0..y.len())
            .map(|n| fit.model.step(n as f64 * ts))
            .collect();
        let path = dir.join(file);
        csvio::write_series(&path, ts, &[("response", &y), ("fit", &yhat)])?;
        arts.push(path);
        if p.svg {
            let t: Vec<f64> = (0..y.len()).map(|n| n as f64 * ts).collect();
            let plot = svg::line_plot(
                &format!("{ch} step response"),
                "time [s]",
                &t,
                &[("response", &y), ("fit", &yhat)],
            );
            write_file(dir.join(file.replace(".csv", ".svg")), &plot, &mut arts)?;
        }
        let m = fit.model;
        let _ = writeln!(
            text,
            "{ch}: kp = {:.6}, tau1 = {:.4} s, tau2 = {:.4e} s, fit = {:.2}%{}",
            m.kp,
            m.tau1,
            m.tau2,
            fit.fit_percent,
            if fit.tau2_identifiable {
                ""
            } else {
                " (tau2 below one sample, not identifiable)"
            }
        );
        let _ = writeln!(
            text,
            "     reference: kp = {}, tau1 = {} s, tau2 = {:e} s",
            refs[k].kp, refs[k].tau1, refs[k].tau2
        );
        fits.push(FitOut {
            channel: ch.to_string(),
            horizon: STEP_HORIZONS[k],
            ts,
            model: ModelSpec::from_model(&m),
            fit_percent: fit.fit_percent,
            residual_norm: fit.residual_norm,
            tau2_identifiable: fit.tau2_identifiable,
            reference: ModelSpec::from_model(&refs[k]),
        });
    }
    write_file(dir.join(REDUCE_JSON), &formats::to_json(&fits), &mut arts)?;
    Ok(Outcome {
        text,
        artifacts: arts,
    })
}

// ---------------------------------------------------------------- tune

#[derive(Serialize)]
struct TuneOut {
    lambda11: f64,
    lambda22: f64,
    models: [ModelSpec; 2],
    controllers: [ControllerSpec; 2],
}

fn fmt_controllers(text: &mut String, c: &[PidParams; 2]) {
    let _ = writeln!(
        text,
        "{:<5} {:>14} {:>10} {:>12} {:>6} {:>10} {:>14}",
        "loop", "k", "tau_i", "tau_d", "N", "t_track", "limits"
    );
    for (i, p) in c.iter().enumerate() {
        let _ = writeln!(
            text,
            "{:<5} {:>14.6} {:>10.4} {:>12.4e} {:>6} {:>10.4} {:>14}",
            i + 1,
            p.k,
            p.tau_i,
            p.tau_d,
            p.n_filter,
            p.t_track,
            format!("[{}, {}]", p.u_min, p.u_max)
        );
    }
}

pub fn cmd_tune(p: &Project) -> CliResult<Outcome> {
    let c = p.tuned()?;
    let dir = out_dir(p)?;
    let mut text = format!(
        "IMC-PID tuning at lambda11 = {}, lambda22 = {}\n",
        p.lambdas.0, p.lambdas.1
    );
    fmt_controllers(&mut text, &c);
    let mut arts = Vec::new();
    let rec = TuneOut {
        lambda11: p.lambdas.0,
        lambda22: p.lambdas.1,
        models: p.models.each_ref().map(ModelSpec::from_model),
        controllers: c.each_ref().map(ControllerSpec::from_params),
    };
    write_file(dir.join(TUNE_JSON), &formats::to_json(&rec), &mut arts)?;
    let mut csv = String::from("loop,k,tau_i,tau_d,n_filter,u_min,u_max,t_track\n");
    for (i, q) in c.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            i + 1,
            q.k,
            q.tau_i,
            q.tau_d,
            q.n_filter,
            q.u_min,
            q.u_max,
            q.t_track
        );
    }
    write_file(dir.join(TUNE_CSV), &csv, &mut arts)?;
    Ok(Outcome {
        text,
        artifacts: arts,
    })
}

// ---------------------------------------------------------------- simulate

fn plot_sim(dir: &Path, stem: &str, sim: &SimResult, arts: &mut Vec<PathBuf>) -> CliResult<()> {
    for i in 0..2 {
        let (r, y, u) = (sim.r_abs(i), sim.y_abs(i), sim.u_abs(i));
        let outputs = svg::line_plot(
            &format!("{} ({stem})", OUTPUT_NAMES[i]),
            "time [s]",
            &sim.time,
            &[("setpoint", &r), ("output", &y)],
        );
        write_file(dir.join(format!("{stem}_y{}.svg", i + 1)), &outputs, arts)?;
        let inputs = svg::line_plot(
            &format!("{} ({stem})", INPUT_NAMES[i]),
            "time [s]",
            &sim.time,
            &[("input", &u)],
        );
        write_file(dir.join(format!("{stem}_u{}.svg", i + 1)), &inputs, arts)?;
    }
    Ok(())
}

fn sim_summary(text: &mut String, label: &str, sim: &SimResult) {
    match sim.diverged_at {
        Some(t) => {
            let _ = writeln!(text, "{label}: diverged at t = {t} s");
        }
        None => {
            let sat = sim
                .saturated
                .iter()
                .map(|s| s.iter().filter(|&&b| b).count())
                .collect::<Vec<_>>();
            let _ = writeln!(
                text,
                "{label}: {} samples, saturated samples per loop {:?}",
                sim.len(),
                sat
            );
        }
    }
}

/// Runs candidate and baseline controllers through the scenario.
pub fn simulate_pair(p: &Project) -> CliResult<(SimResult, SimResult)> {
    let cand = run_closed_loop(&p.sim_plant, &p.candidate_controllers()?, &p.scenario)?;
    let base = run_closed_loop(&p.sim_plant, &p.baseline, &p.scenario)?;
    Ok((cand, base))
}

pub fn cmd_simulate(p: &Project) -> CliResult<Outcome> {
    let (cand, base) = simulate_pair(p)?;
    let dir = out_dir(p)?;
    let mut arts = Vec::new();
    for (file, sim) in [(SIM_CANDIDATE_CSV, &cand), (SIM_BASELINE_CSV, &base)] {
        let path = dir.join(file);
        csvio::write_sim(&path, sim)?;
        arts.push(path);
    }
    if p.svg {
        plot_sim(dir, "candidate", &cand, &mut arts)?;
        plot_sim(dir, "baseline", &base, &mut arts)?;
    }
    let mut text = format!(
        "Scenario: {} s at ts = {} s\n",
        p.scenario.duration, p.scenario.ts
    );
    sim_summary(&mut text, "candidate", &cand);
    sim_summary(&mut text, "baseline", &base);
    Ok(Outcome {
        text,
        artifacts: arts,
    })
}

// ---------------------------------------------------------------- report

#[derive(Serialize)]
struct ReportOut {
    names: [&'static str; 8],
    weights: [f64; 8],
    candidate: [f64; 8],
    baseline: [f64; 8],
    ratios: [f64; 8],
    j: f64,
}

/// Scores two runs over the scenario windows and compares them.
pub fn compare(
    p: &Project,
    cand: &SimResult,
    base: &SimResult,
) -> CliResult<(IndexSet, IndexSet, MetricsReport)> {
    let windows = &p.scenario.windows;
    let (c, b) = (
        IndexSet::score(cand, windows)?,
        IndexSet::score(base, windows)?,
    );
    let report = aggregate_j(&c, &b, &p.weights)?;
    Ok((c, b, report))
}

fn report_outcome(p: &Project, cand: &SimResult, base: &SimResult) -> CliResult<Outcome> {
    let (c, b, report) = compare(p, cand, base)?;
    let rel = report.relative.expect("baseline given");
    let pub_ratios = presets::PUBLISHED_PID_IMC;
    let mut text = format!(
        "{:<10} {:>14} {:>14} {:>10} {:>10}\n",
        "index", "candidate", "baseline", "ratio", "published"
    );
    let (ca, ba) = (c.to_array(), b.to_array());
    for k in 0..8 {
        let _ = writeln!(
            text,
            "{:<10} {:>14.6} {:>14.6} {:>10.4} {:>10.4}",
            ratio_names()[k],
            ca[k],
            ba[k],
            rel.ratios[k],
            pub_ratios.0[k]
        );
    }
    let _ = writeln!(
        text,
        "{:<10} {:>14} {:>14} {:>10.4} {:>10.4}",
        "J", "", "", rel.j, pub_ratios.1
    );
    let dir = out_dir(p)?;
    let mut arts = Vec::new();
    let rec = ReportOut {
        names: INDEX_NAMES,
        weights: *p.weights.as_array(),
        candidate: ca,
        baseline: ba,
        ratios: rel.ratios,
        j: rel.j,
    };
    write_file(dir.join(REPORT_JSON), &formats::to_json(&rec), &mut arts)?;
    let mut csv = String::from("index,weight,candidate,baseline,ratio\n");
    for k in 0..8 {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            INDEX_NAMES[k], rec.weights[k], ca[k], ba[k], rel.ratios[k]
        );
    }
    let _ = writeln!(csv, "J,,,,{}", rel.j);
    write_file(dir.join(REPORT_CSV), &csv, &mut arts)?;
    Ok(Outcome {
        text,
        artifacts: arts,
    })
}

/// Reads two simulation CSVs and writes the comparison.
pub fn cmd_report(p: &Project, candidate: &Path, baseline: &Path) -> CliResult<Outcome> {
    let (cand, base) = (csvio::read_sim(candidate)?, csvio::read_sim(baseline)?);
    if cand.len() != base.len() || cand.ts != base.ts {
        return Err(CliError::Invalid(format!(
            "{} and {} cover different time grids",
            candidate.display(),
            baseline.display()
        )));
    }
    if (cand.ts - p.scenario.ts).abs() > 1e-9 * p.scenario.ts {
        return Err(CliError::Invalid(format!(
            "runs are sampled at {} s but the scenario windows assume {} s",
            cand.ts, p.scenario.ts
        )));
    }
    report_outcome(p, &cand, &base)
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct Argmin {
    lambda11: f64,
    lambda22: f64,
    j: f64,
}

#[derive(Serialize)]
struct SweepSummary {
    lambda11: Vec<f64>,
    lambda22: Vec<f64>,
    points: usize,
    stable_points: usize,
    argmin: Option<Argmin>,
    lambda11_trend_spearman: f64,
}

/// Builds the sweep problem from the project and runs it on `threads`
/// workers (`None`: the environment cap or all cores).
pub fn run_project_sweep(p: &Project, threads: Option<usize>) -> CliResult<SweepSurface> {
    let base = run_closed_loop(&p.sim_plant, &p.baseline, &p.scenario)?;
    let limits = [
        (p.baseline[0].u_min, p.baseline[0].u_max),
        (p.baseline[1].u_min, p.baseline[1].u_max),
    ];
    let problem = SweepProblem::new(
        p.models,
        p.n_filter,
        limits,
        p.sim_plant.clone(),
        p.scenario.clone(),
        &base,
        p.weights,
    )?;
    let threads = match threads {
        Some(n) => Some(n),
        None => parallel::thread_cap()?,
    };
    parallel::run_sweep_parallel(&problem, &p.grid, threads)
}

fn surface_values(
    surface: &SweepSurface,
    value: impl Fn(&refrig_imc_core::SweepPoint) -> f64,
) -> Vec<Vec<f64>> {
    let (n1, n2) = (surface.grid.lambda11().len(), surface.grid.lambda22().len());
    (0..n1)
        .map(|i| (0..n2).map(|j| value(surface.at(i, j))).collect())
        .collect()
}

pub fn write_sweep(p: &Project, surface: &SweepSurface) -> CliResult<Outcome> {
    let dir = out_dir(p)?;
    let mut arts = Vec::new();
    type Extract = Box<dyn Fn(&refrig_imc_core::SweepPoint) -> f64>;
    let mut surfaces: Vec<(String, Extract)> = vec![("J".into(), Box::new(|q| q.j))];
    for (k, name) in ratio_names().into_iter().enumerate() {
        surfaces.push((name, Box::new(move |q| q.ratios[k])));
    }
    for (name, f) in &surfaces {
        let path = dir.join(surface_file(name));
        csvio::write_surface(&path, surface, f)?;
        let svg_path = path.with_extension("svg");
        arts.push(path);
        if p.svg {
            let plot = svg::heatmap(
                name,
                surface.grid.lambda11(),
                surface.grid.lambda22(),
                &surface_values(surface, f),
            );
            write_file(svg_path, &plot, &mut arts)?;
        }
    }
    let argmin = match argmin_j(surface) {
        Ok((a, b, j)) => Some(Argmin {
            lambda11: a,
            lambda22: b,
            j,
        }),
        Err(refrig_imc_core::Error::AllUnstable) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = SweepSummary {
        lambda11: surface.grid.lambda11().to_vec(),
        lambda22: surface.grid.lambda22().to_vec(),
        points: surface.points.len(),
        stable_points: surface.points.iter().filter(|q| q.stable).count(),
        argmin,
        lambda11_trend_spearman: surface.lambda11_trend(),
    };
    let mut text = format!(
        "Sweep over {} points, {} stable\n",
        summary.points, summary.stable_points
    );
    match &summary.argmin {
        Some(a) => {
            let _ = writeln!(
                text,
                "Minimum J = {:.4} at lambda11 = {}, lambda22 = {}",
                a.j, a.lambda11, a.lambda22
            );
        }
        None => text.push_str("Every grid point diverged\n"),
    }
    let _ = writeln!(
        text,
        "Spearman(lambda11, J) at the median lambda22: {:.3}",
        summary.lambda11_trend_spearman
    );
    write_file(
        dir.join(SWEEP_SUMMARY_JSON),
        &formats::to_json(&summary),
        &mut arts,
    )?;
    Ok(Outcome {
        text,
        artifacts: arts,
    })
}

pub fn cmd_sweep(p: &Project, threads: Option<usize>) -> CliResult<Outcome> {
    let start = Instant::now();
    let surface = run_project_sweep(p, threads)?;
    let elapsed = start.elapsed();
    let mut out = write_sweep(p, &surface)?;
    let _ = writeln!(out.text, "Elapsed: {:.2} s", elapsed.as_secs_f64());
    Ok(out)
}

// ---------------------------------------------------------------- pipeline

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    created_unix_s: u64,
    config: &'a formats::ConfigFile,
    ts: f64,
    lambda11: f64,
    lambda22: f64,
    weights: [f64; 8],
    artifacts: Vec<String>,
}

/// Runs every stage in order and records the outputs in a manifest. The
/// sweep stage runs only when enabled in the configuration.
pub fn cmd_pipeline(p: &Project, threads: Option<usize>) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let stage = |out: &mut Outcome, name: &str, o: Outcome| {
        let _ = writeln!(out.text, "== {name}");
        out.absorb(o);
    };
    stage(&mut out, "rga", cmd_rga(p)?);
    stage(&mut out, "reduce", cmd_reduce(p)?);
    if p.candidate.is_none() {
        stage(&mut out, "tune", cmd_tune(p)?);
    }
    let sim = cmd_simulate(p)?;
    stage(&mut out, "simulate", sim);
    let dir = out_dir(p)?.to_path_buf();
    let (cand, base) = (
        csvio::read_sim(&dir.join(SIM_CANDIDATE_CSV))?,
        csvio::read_sim(&dir.join(SIM_BASELINE_CSV))?,
    );
    stage(&mut out, "report", report_outcome(p, &cand, &base)?);
    if p.sweep_enabled {
        stage(&mut out, "sweep", cmd_sweep(p, threads)?);
    }
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        created_unix_s: created,
        config: &p.config,
        ts: p.ts,
        lambda11: p.lambdas.0,
        lambda22: p.lambdas.1,
        weights: *p.weights.as_array(),
        artifacts: out
            .artifacts
            .iter()
            .map(|a| a.display().to_string())
            .collect(),
    };
    let mut arts = Vec::new();
    write_file(
        dir.join(MANIFEST_JSON),
        &formats::to_json(&manifest),
        &mut arts,
    )?;
    out.artifacts.extend(arts);
    Ok(out)
}
