//! Executes a validated config and writes its data files and manifest.

use crate::config::{
    Axis, BellSign, CouplingsConfig, Edge, Experiment, ExperimentConfig, FluxQubitConfig, LzConfig,
    PumpConfig, QuenchConfig, SpectrumConfig, TrimerConfig,
};
use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;
use topochain::effective::{classify_path, compare_reduction, default_tolerance, lz_evolve};
use topochain::export::{
    coupling_table, flux_sweep_table, format_float, spectrum_sweep_table, spectrum_trace_table,
    trajectory_table, CsvTable,
};
use topochain::fluxcircuit::{flux_sweep, qubit_gap};
use topochain::spectra::{EDGE_FLAG_SITES, EDGE_FLAG_THRESHOLD};
use topochain::{
    apply_disorder, edge_weight, eigendecompose, instantaneous_spectrum, pump, quench,
    transfer_fidelity, IntegratorConfig, Schedule, StateVector, Trajectory, C64,
};

pub const MANIFEST_FILE: &str = "manifest.json";
const DEFAULT_RECORDS_PER_CYCLE: usize = 200;
const DEFAULT_N_TIMES: usize = 201;
const DEFAULT_N_RECORDS: usize = 201;

/// Run-time switches that do not belong to the config itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Adds `re_j, im_j` amplitude columns to trajectory files.
    pub amplitudes: bool,
}

/// One output file held in memory until it is written.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub file: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn csv(file: impl Into<String>, table: &CsvTable) -> Self {
        Self { file: file.into(), bytes: table.to_csv_string().into_bytes() }
    }
}

/// Data files plus a JSON summary of the headline numbers.
#[derive(Debug, Clone)]
pub struct Execution {
    pub artifacts: Vec<Artifact>,
    pub summary: Value,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub amplitudes: bool,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputRecord>,
    pub summary: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Runs `cfg`, writes its files into `out_dir`, reads every file back to
/// check it, and finishes with `manifest.json`.
pub fn run_to_dir(cfg: &ExperimentConfig, out_dir: &Path, opts: RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let exec = execute(cfg, opts)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut outputs = Vec::with_capacity(exec.artifacts.len());
    for a in &exec.artifacts {
        outputs.push(write_checked(out_dir, &a.file, &a.bytes)?);
    }
    let manifest = RunManifest {
        tool: "topochain".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.command().name().into(),
        config: cfg.to_value(),
        seed: exec.seed,
        amplitudes: opts.amplitudes,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs,
        summary: exec.summary,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_checked(out_dir, MANIFEST_FILE, text.as_bytes())?;
    Ok(manifest)
}

/// Writes `bytes`, then re-reads the file and checks size, checksum and
/// that CSV/JSON content parses.
fn write_checked(dir: &Path, file: &str, bytes: &[u8]) -> Result<OutputRecord> {
    let path = &dir.join(file);
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    let back = std::fs::read(path).with_context(|| format!("reading back {}", path.display()))?;
    let sha256 = sha256_hex(bytes);
    ensure!(sha256_hex(&back) == sha256, "{} changed on disk after writing", path.display());
    let text = std::str::from_utf8(&back).with_context(|| format!("{} is not UTF-8", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => {
            let table = CsvTable::parse(text).with_context(|| format!("validating {}", path.display()))?;
            ensure!(!table.rows.is_empty(), "{} has no data rows", path.display());
        }
        Some("json") => {
            serde_json::from_str::<Value>(text).with_context(|| format!("validating {}", path.display()))?;
        }
        _ => {}
    }
    Ok(OutputRecord { file: file.to_owned(), bytes: back.len() as u64, sha256 })
}

/// Computes all artifacts of a run without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Execution> {
    let seed = opts.seed.or(cfg.seed);
    let (artifacts, summary, seed) = match &cfg.experiment {
        Experiment::Spectrum(c) => with_seed(run_spectrum(c), None)?,
        Experiment::Pump(c) => with_seed(run_pump(c, opts.amplitudes), None)?,
        Experiment::Quench(c) => run_quench(c, seed, opts.amplitudes)?,
        Experiment::Lz(c) => with_seed(run_lz(c, opts.amplitudes), None)?,
        Experiment::Trimer(c) => with_seed(run_trimer(c, opts.amplitudes), None)?,
        Experiment::Couplings(c) => with_seed(run_couplings(c), None)?,
        Experiment::FluxQubit(c) => with_seed(run_fluxqubit(c), None)?,
    };
    Ok(Execution { artifacts, summary, seed })
}

type Outcome = (Vec<Artifact>, Value);

fn with_seed(r: Result<Outcome>, seed: Option<u64>) -> Result<(Vec<Artifact>, Value, Option<u64>)> {
    r.map(|(a, s)| (a, s, seed))
}

fn integrator(cfg: &Option<IntegratorConfig>) -> IntegratorConfig {
    cfg.clone().unwrap_or_default()
}

/// Trajectory table, adding amplitude columns on request.
fn trajectory_artifact(file: &str, traj: &Trajectory, amplitudes: bool) -> Result<Artifact> {
    Ok(Artifact::csv(file, &trajectory_table(traj, amplitudes)?))
}

fn run_spectrum(c: &SpectrumConfig) -> Result<Outcome> {
    let chain = &c.chain;
    if let Some(sweep) = &c.sweep {
        let values = sweep.values();
        let trace = topochain::spectra::spectrum_sweep(&values, |x| chain.with_constant(sweep.param, x).hamiltonian())
            .context("spectrum sweep")?;
        let table = spectrum_sweep_table(sweep.param.name(), &trace.times, &trace.spectra)?;
        let summary = json!({
            "n_sites": chain.n_sites(),
            "param": sweep.param.name(),
            "points": values.len(),
        });
        return Ok((vec![Artifact::csv("spectrum.csv", &table)], summary));
    }
    if chain.is_static() {
        let h = chain.hamiltonian().context("building chain")?;
        let s = eigendecompose(&h).context("diagonalizing chain")?;
        let mut table = CsvTable::new(["level", "E", "edge_weight", "edge_flag"]);
        for (j, (e, v)) in s.eigenvalues.iter().zip(&s.eigenvectors).enumerate() {
            let w = edge_weight(v, EDGE_FLAG_SITES);
            let flag = if w >= EDGE_FLAG_THRESHOLD { "1" } else { "0" };
            table.push_row(vec![(j + 1).to_string(), format_float(*e), format_float(w), flag.into()])?;
        }
        let zero_modes = s.eigenvalues.iter().filter(|e| e.abs() <= 1e-6).count();
        let summary = json!({
            "n_sites": h.n_sites(),
            "zero_modes": zero_modes,
            "min_abs_energy": s.eigenvalues.iter().fold(f64::INFINITY, |m, e| m.min(e.abs())),
        });
        return Ok((vec![Artifact::csv("spectrum.csv", &table)], summary));
    }
    let schedule = chain.schedule()?;
    let n_times = c.n_times.unwrap_or(DEFAULT_N_TIMES);
    let trace = instantaneous_spectrum(&schedule, chain.kind, chain.cells, n_times).context("instantaneous spectrum")?;
    let table = spectrum_trace_table(&trace)?;
    let summary = json!({ "n_sites": chain.n_sites(), "n_times": n_times, "period": schedule.period });
    Ok((vec![Artifact::csv("spectrum.csv", &table)], summary))
}

fn initial_state(n_sites: usize, sites: &[usize], amplitudes: Option<&[f64]>) -> Result<StateVector> {
    let mut amps = vec![C64::new(0.0, 0.0); n_sites];
    for (i, &site) in sites.iter().enumerate() {
        ensure!((1..=n_sites).contains(&site), "initial site {site} outside 1..={n_sites}");
        amps[site - 1] += C64::new(amplitudes.map_or(1.0, |a| a[i]), 0.0);
    }
    Ok(StateVector::normalized(amps)?)
}

fn peak(sz: &[f64]) -> (usize, f64) {
    let (j, &v) = sz.iter().enumerate().fold((0, &f64::NEG_INFINITY), |best, (j, v)| if *v > *best.1 { (j, v) } else { best });
    (j + 1, (1.0 + v) / 2.0)
}

fn run_pump(c: &PumpConfig, amplitudes: bool) -> Result<Outcome> {
    let chain = &c.chain;
    let schedule = chain.schedule()?;
    let n = chain.n_sites();
    let psi0 = match &c.initial {
        Some(init) => initial_state(n, &init.sites, init.amplitudes.as_deref())?,
        None => initial_state(n, &[1], None)?,
    };
    let n_records = c.records_per_cycle.unwrap_or(DEFAULT_RECORDS_PER_CYCLE) * schedule.cycles as usize + 1;
    let traj = pump(&schedule, chain.kind, chain.cells, &psi0, &integrator(&c.integrator), n_records)
        .context("pump evolution")?;
    let (site, population) = peak(traj.sz.last().expect("at least two records"));
    let summary = json!({
        "n_sites": n,
        "duration": schedule.duration(),
        "final_peak_site": site,
        "final_peak_population": population,
        "steps": traj.steps,
        "max_norm_drift": traj.max_norm_drift,
    });
    Ok((vec![trajectory_artifact("pump.csv", &traj, amplitudes)?], summary))
}

fn run_quench(c: &QuenchConfig, seed: Option<u64>, amplitudes: bool) -> Result<(Vec<Artifact>, Value, Option<u64>)> {
    let mut h = c.chain.hamiltonian().context("building chain")?;
    let mut used_seed = None;
    if let Some(d) = &c.disorder {
        let mut d = d.clone();
        if let Some(s) = seed {
            d.seed = s;
        }
        used_seed = Some(d.seed);
        h = apply_disorder(&h, &d).context("applying disorder")?;
    }
    let flip = c.flip_site.unwrap_or(1);
    let traj = quench(&h, flip - 1, c.t1, &integrator(&c.integrator), c.n_records.unwrap_or(DEFAULT_N_RECORDS))
        .context("quench evolution")?;
    let flipped: Vec<f64> = traj.sz.iter().map(|row| row[flip - 1]).collect();
    let summary = json!({
        "n_sites": h.n_sites(),
        "flip_site": flip,
        "min_sz_flip_site": flipped.iter().copied().fold(f64::INFINITY, f64::min),
        "final_sz_flip_site": flipped.last(),
        "steps": traj.steps,
    });
    Ok((vec![trajectory_artifact("quench.csv", &traj, amplitudes)?], summary, used_seed))
}

fn run_lz(c: &LzConfig, amplitudes: bool) -> Result<Outcome> {
    let cfg = integrator(&c.integrator);
    let n_records = c.n_records.unwrap_or(DEFAULT_N_RECORDS);
    if let Some(path) = &c.path {
        let start = match c.initial.unwrap_or(Edge::L) {
            Edge::L => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            Edge::R => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        };
        let traj = lz_evolve(path, start, &cfg, n_records).context("two-level evolution")?;
        let mut header = vec!["t", "u", "g", "p_L", "p_R"];
        if amplitudes {
            header.extend(["re_L", "im_L", "re_R", "im_R"]);
        }
        let mut table = CsvTable::new(header);
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let (u, g) = path.at(*t);
            let p = state.populations();
            let mut row = vec![*t, u, g, p[0], p[1]];
            if amplitudes {
                row.extend(state.amplitudes().iter().flat_map(|z| [z.re, z.im]));
            }
            table.push_floats(&row)?;
        }
        let samples = path.sample(n_records);
        let class = classify_path(&samples, default_tolerance(&samples))?;
        let fin = traj.final_state().populations();
        let summary = json!({ "class": class, "final_p_L": fin[0], "final_p_R": fin[1], "steps": traj.steps });
        return Ok((vec![Artifact::csv("lz.csv", &table)], summary));
    }
    let Some(cmp) = &c.compare else { bail!("lz config needs path or compare") };
    let schedule = cmp.chain.schedule()?;
    let report = compare_reduction(&schedule, cmp.chain.cells, (cmp.window[0], cmp.window[1]), &cfg, n_records)
        .context("full versus reduced dynamics")?;
    let mut table = CsvTable::new(["t", "full_L", "full_R", "reduced_L", "reduced_R"]);
    for ((t, f), r) in report.times.iter().zip(&report.full).zip(&report.reduced) {
        table.push_floats(&[*t, f.0, f.1, r.0, r.1])?;
    }
    let summary = json!({ "max_deviation": report.max_deviation, "window": cmp.window });
    Ok((vec![Artifact::csv("lz.csv", &table)], summary))
}

fn bell_state(n_sites: usize, first: usize, sign: f64) -> Result<StateVector> {
    let mut v = vec![0.0; n_sites];
    v[first] = 1.0;
    v[first + 1] = sign;
    let norm = 2f64.sqrt();
    Ok(StateVector::from_real(&v.iter().map(|x| x / norm).collect::<Vec<_>>())?)
}

fn run_trimer(c: &TrimerConfig, amplitudes: bool) -> Result<Outcome> {
    let (cells, cycles) = (c.cells(), c.cycles());
    let schedule = Schedule::trimer_transfer(c.period(), cycles);
    let n = 3 * cells;
    let rpc = c.records_per_cycle.unwrap_or(DEFAULT_RECORDS_PER_CYCLE);
    let cfg = integrator(&c.integrator);
    let mut artifacts = Vec::new();
    let mut runs = Vec::new();
    for sign in c.signs() {
        let s = sign.value();
        let psi0 = bell_state(n, 0, s)?;
        let traj = pump(&schedule, topochain::ModelKind::Trimer, cells, &psi0, &cfg, rpc * cycles as usize + 1)
            .with_context(|| format!("trimer transfer ({})", sign.label()))?;
        let left = bell_state(n, 0, s)?;
        let right = bell_state(n, n - 2, s)?;
        // Odd cycles end at the right edge, even cycles back at the left.
        let fidelities: Vec<f64> = (1..=cycles as usize)
            .map(|k| transfer_fidelity(&traj.states[k * rpc], if k % 2 == 1 { &right } else { &left }))
            .collect();
        let file = format!("trimer_{}.csv", sign.label());
        artifacts.push(trajectory_artifact(&file, &traj, amplitudes)?);
        runs.push(json!({ "sign": sign_str(sign), "file": file, "cycle_fidelity": fidelities, "steps": traj.steps }));
    }
    Ok((artifacts, json!({ "n_sites": n, "period": c.period(), "runs": runs })))
}

fn sign_str(sign: BellSign) -> &'static str {
    match sign {
        BellSign::Plus => "+",
        BellSign::Minus => "-",
    }
}

fn run_couplings(c: &CouplingsConfig) -> Result<Outcome> {
    let points: Vec<(f64, f64)> = c
        .alpha_1
        .values()
        .into_iter()
        .flat_map(|a1| c.alpha_2.values().into_iter().map(move |a2| (a1, a2)))
        .collect();
    let table = coupling_table(c.bare, &points)?;
    let grid = |a: &Axis| a.values().len();
    let summary = json!({ "bare": c.bare, "rows": points.len(), "alpha_1_points": grid(&c.alpha_1), "alpha_2_points": grid(&c.alpha_2) });
    Ok((vec![Artifact::csv("couplings.csv", &table)], summary))
}

fn run_fluxqubit(c: &FluxQubitConfig) -> Result<Outcome> {
    use rayon::prelude::*;
    let spec = c.circuit();
    let f_eps = c.f_eps_values();
    let points = flux_sweep(&spec, c.f_alpha, &f_eps, c.levels).context("flux sweep")?;
    let mut artifacts = vec![Artifact::csv("fluxqubit.csv", &flux_sweep_table(&points)?)];
    let centre = points
        .iter()
        .min_by(|p, q| p.f_eps.abs().total_cmp(&q.f_eps.abs()))
        .expect("sweep_points >= 1");
    let mut summary = json!({
        "f_alpha": c.f_alpha,
        "dim": spec.dim(),
        "f_eps_nearest_zero": centre.f_eps,
        "g_par_nearest_zero": centre.g_par,
        "g_perp_nearest_zero": centre.g_perp,
    });
    if let Some(grid) = &c.gap_sweep {
        let f_alpha = grid.values();
        let gaps = f_alpha
            .par_iter()
            .map(|&fa| qubit_gap(&spec, fa))
            .collect::<topochain::Result<Vec<_>>>()
            .context("gap sweep")?;
        let mut table = CsvTable::new(["f_alpha", "gap"]);
        for (fa, g) in f_alpha.iter().zip(&gaps) {
            table.push_floats(&[*fa, *g])?;
        }
        artifacts.push(Artifact::csv("fluxqubit_gap.csv", &table));
        summary["gap_min"] = json!(gaps.iter().copied().fold(f64::INFINITY, f64::min));
        summary["gap_max"] = json!(gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    Ok((artifacts, summary))
}
