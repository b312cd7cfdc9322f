//! Parameter sweeps producing CSV data sets.

use std::fs;
use std::path::{Path, PathBuf};

use krylovlab_core as core;
use krylovlab_core::{
    build_anni, count_resonances, k_complexity, krylov_evolve_with, lanczos_with_spectrum, mean_gap_ratio,
    opee_from_coefficients, pauli_decompose, randomize_eigenvectors, sample_goe, sample_type1_ensemble,
    size_resolved_map, AnniParams, ComplexityOperatorDynamics, HamiltonianMatrix, OperatorVector, OqslResult,
    ResonanceReport,
};
use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::output::{comment_line, label, write_atomic, Field, Table};
use crate::stats::{mean, slope, stderr};

/// Early C_K growth is fitted on `t <= EARLY_WINDOW * t_max`.
pub const EARLY_WINDOW: f64 = 0.05;

/// Largest tolerated fraction of aborted ensemble members per sweep point.
pub const MAX_ABORT_FRACTION: f64 = 0.2;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 1,
            _ => 2,
        }
    }
}

impl From<core::Error> for RunError {
    fn from(e: core::Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

/// Everything a Krylov run needs beyond `(H, O)`.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub times: Vec<f64>,
    pub taus: Vec<f64>,
    pub tau_fixed: f64,
    pub lanczos_tol: f64,
    pub max_krylov: usize,
    pub degeneracy_tol: f64,
}

impl PipelineOptions {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            times: cfg.time_grid(),
            taus: cfg.tau_grid(),
            tau_fixed: cfg.tau_fixed,
            lanczos_tol: cfg.lanczos_tol,
            max_krylov: cfg.max_krylov,
            degeneracy_tol: cfg.degeneracy_tol,
        }
    }
}

/// Results of the Lanczos / complexity / speed-limit pipeline for one `(H, O)`.
#[derive(Debug, Clone)]
pub struct KrylovRun {
    pub b: Vec<f64>,
    pub krylov_dim: usize,
    pub truncated: bool,
    pub ck: Vec<f64>,
    /// `max_t |sum_n |phi_n(t)|^2 - 1|`.
    pub weight_defect: f64,
    /// Complexity-operator bound on the horizon grid.
    pub oqsl: Vec<OqslResult>,
    /// Kernel-refined bound on the horizon grid.
    pub kernel: Vec<OqslResult>,
    pub fixed: OqslResult,
    pub fixed_kernel: OqslResult,
    pub resonances: ResonanceReport,
    pub gap_ratio: f64,
    /// Least-squares slope of C_K over the early window.
    pub ck_rate: f64,
}

impl KrylovRun {
    pub fn oqsl_max(&self) -> f64 {
        self.oqsl.iter().map(|r| r.tau_ref).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn kernel_max(&self) -> f64 {
        self.kernel.iter().map(|r| r.tau_ref).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn early_rate(times: &[f64], ck: &[f64]) -> f64 {
    let t_max = times.last().copied().unwrap_or(0.0);
    let k = times.iter().take_while(|&&t| t <= EARLY_WINDOW * t_max * (1.0 + 1e-12)).count().max(2);
    slope(&times[..k], &ck[..k])
}

pub fn krylov_pipeline(h: &HamiltonianMatrix, o: &OperatorVector, opts: &PipelineOptions) -> core::Result<KrylovRun> {
    let spec = h.spectral_decomposition()?;
    let lz = lanczos_with_spectrum(&spec, o, opts.lanczos_tol, opts.max_krylov)?;
    let tri = lz.tridiagonal_spectrum()?;
    let amps = krylov_evolve_with(&tri, &opts.times)?;
    let ck = k_complexity(&amps);
    let weight_defect = (0..opts.times.len()).map(|i| (amps.total_weight(i) - 1.0).abs()).fold(0.0, f64::max);

    let dynamics = ComplexityOperatorDynamics::from_spectrum(&lz, &tri)?;
    let ev = dynamics.eigenvalues();
    let kernel_tol = opts.degeneracy_tol * (ev[ev.len() - 1] - ev[0]);
    let mut oqsl = Vec::with_capacity(opts.taus.len());
    let mut kernel = Vec::with_capacity(opts.taus.len());
    for &tau in &opts.taus {
        oqsl.push(dynamics.oqsl(tau)?);
        kernel.push(dynamics.kernel_refined(tau, kernel_tol)?);
    }
    let fixed = dynamics.oqsl(opts.tau_fixed)?;
    let fixed_kernel = dynamics.kernel_refined(opts.tau_fixed, kernel_tol)?;

    let resonances = count_resonances(spec.eigenvalues(), opts.degeneracy_tol * spec.spectral_range())?;
    let gap_ratio = mean_gap_ratio(spec.eigenvalues()).unwrap_or(f64::NAN);
    let ck_rate = early_rate(&opts.times, &ck);
    Ok(KrylovRun {
        krylov_dim: lz.krylov_dim(),
        truncated: lz.truncated,
        b: lz.b,
        ck,
        weight_defect,
        oqsl,
        kernel,
        fixed,
        fixed_kernel,
        resonances,
        gap_ratio,
        ck_rate,
    })
}

/// SplitMix64 finalizer, used to derive independent seeds.
fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of ensemble member `member`. Members share seeds across the `x`
/// grid so that sweep points differ only through `x`.
pub fn member_seed(base: u64, member: usize) -> u64 {
    mix(base, member as u64 + 1)
}

/// Draws `(H, O)` for one RMT ensemble member.
pub fn rmt_instance(dim: usize, x: f64, seed: u64) -> core::Result<(HamiltonianMatrix, OperatorVector)> {
    let h = sample_type1_ensemble(dim, x, mix(seed, 1))?;
    let h = randomize_eigenvectors(&h, mix(seed, 2))?;
    let o = OperatorVector::new(sample_goe(dim, mix(seed, 3))?.entries().to_owned())?;
    Ok((h, o))
}

pub fn anni_instance(sites: usize, g: f64, h: f64) -> core::Result<(HamiltonianMatrix, OperatorVector)> {
    let ham = build_anni(&AnniParams::new(sites, g, h)?)?;
    Ok((ham, core::paulis::mid_chain_probe(sites)?))
}

/// One sweep point: successful runs plus the number of aborted members.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub param: f64,
    pub runs: Vec<KrylovRun>,
    pub aborted: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ScramblingSeries {
    pub g: f64,
    pub krylov_dim: usize,
    pub influence: Vec<f64>,
    pub ipr: Vec<f64>,
    pub opee: Vec<f64>,
    pub ipr_t: Vec<f64>,
    pub opee_t: Vec<f64>,
    pub snapshots: Vec<(usize, Vec<Vec<f64>>)>,
}

#[derive(Debug, Clone)]
pub struct ScramblingOutcome {
    pub times: Vec<f64>,
    pub cut: usize,
    pub series: Vec<ScramblingSeries>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Sweep(SweepOutcome),
    Scrambling(ScramblingOutcome),
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Numerical(format!("cannot start worker pool: {e}")))
}

fn prepare_dir(out: &Path, cfg: &ExperimentConfig) -> Result<(), RunError> {
    fs::create_dir_all(out).map_err(|source| RunError::Io { path: out.to_path_buf(), source })?;
    let path = out.join("config.resolved");
    write_atomic(&path, cfg.resolved().as_bytes()).map_err(|source| RunError::Io { path, source })
}

fn write_tables(out: &Path, tables: Vec<(String, Table)>) -> Result<Vec<PathBuf>, RunError> {
    let mut files = Vec::with_capacity(tables.len());
    for (name, table) in tables {
        let path = out.join(name);
        table.write(&path).map_err(|source| RunError::Io { path: path.clone(), source })?;
        files.push(path);
    }
    Ok(files)
}

/// Runs the experiment selected by `cfg.kind`, writing into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    cfg.validate()?;
    // members run concurrently; keep the dense kernels single-threaded so
    // results do not depend on the worker count
    core::faer::set_global_parallelism(core::faer::Par::Seq);
    match cfg.kind {
        ExperimentKind::RmtSweep => run_rmt_sweep(cfg, out).map(Outcome::Sweep),
        ExperimentKind::AnniSweep => run_anni_sweep(cfg, out).map(Outcome::Sweep),
        ExperimentKind::ScramblingProbe => run_scrambling_probe(cfg, out).map(Outcome::Scrambling),
    }
}

pub fn run_rmt_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<SweepOutcome, RunError> {
    prepare_dir(out, cfg)?;
    let opts = PipelineOptions::from_config(cfg);
    let jobs: Vec<(usize, usize)> =
        (0..cfg.x_grid.len()).flat_map(|p| (0..cfg.ensemble).map(move |m| (p, m))).collect();
    let results: Vec<core::Result<KrylovRun>> = pool(cfg.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(p, m)| {
                let x = cfg.x_grid[p];
                let (h, o) = rmt_instance(cfg.dim, x, member_seed(cfg.seed, m))?;
                let run = krylov_pipeline(&h, &o, &opts);
                info!("rmt x={x} member={m} done");
                run
            })
            .collect()
    });
    let mut points: Vec<SweepPoint> =
        cfg.x_grid.iter().map(|&x| SweepPoint { param: x, runs: Vec::new(), aborted: 0 }).collect();
    for (&(p, m), res) in jobs.iter().zip(results) {
        match res {
            Ok(run) => points[p].runs.push(run),
            Err(e) => {
                warn!("rmt x={} member={m} aborted: {e}", cfg.x_grid[p]);
                points[p].aborted += 1;
            }
        }
    }
    check_aborts(&points, cfg.ensemble)?;
    let files = write_tables(out, sweep_tables(cfg, &opts, &points, "x"))?;
    Ok(SweepOutcome { points, files })
}

pub fn run_anni_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<SweepOutcome, RunError> {
    prepare_dir(out, cfg)?;
    let opts = PipelineOptions::from_config(cfg);
    let results: Vec<core::Result<KrylovRun>> = pool(cfg.workers)?.install(|| {
        cfg.g_grid
            .par_iter()
            .map(|&g| {
                let (h, o) = anni_instance(cfg.sites, g, cfg.h)?;
                let run = krylov_pipeline(&h, &o, &opts);
                info!("anni g={g} done");
                run
            })
            .collect()
    });
    let mut points = Vec::with_capacity(cfg.g_grid.len());
    for (&g, res) in cfg.g_grid.iter().zip(results) {
        match res {
            Ok(run) => points.push(SweepPoint { param: g, runs: vec![run], aborted: 0 }),
            Err(e) => {
                warn!("anni g={g} aborted: {e}");
                points.push(SweepPoint { param: g, runs: Vec::new(), aborted: 1 });
            }
        }
    }
    check_aborts(&points, 1)?;
    let files = write_tables(out, sweep_tables(cfg, &opts, &points, "g"))?;
    Ok(SweepOutcome { points, files })
}

fn check_aborts(points: &[SweepPoint], members: usize) -> Result<(), RunError> {
    for p in points {
        if p.aborted as f64 > MAX_ABORT_FRACTION * members as f64 {
            return Err(RunError::Numerical(format!(
                "{} of {members} members aborted at parameter {}",
                p.aborted, p.param
            )));
        }
    }
    Ok(())
}

fn mean_stderr(xs: &[f64]) -> [Field; 2] {
    [mean(xs).into(), stderr(xs).into()]
}

fn sweep_tables(
    cfg: &ExperimentConfig,
    opts: &PipelineOptions,
    points: &[SweepPoint],
    p: &str,
) -> Vec<(String, Table)> {
    let comment = comment_line(cfg);

    let mut bn = Table::new(&comment, &[p, "n", "b_mean", "b_stderr", "members"]);
    let mut ck = Table::new(&comment, &[p, "t", "ck_mean", "ck_stderr", "members"]);
    let mut oqsl = Table::new(
        &comment,
        &["param", "tau", "geodesic", "speed", "tau_qsl", "tau_ref", "stationary_norm", "count1", "count2", "D_K"],
    );
    let mut summary = Table::new(
        &comment,
        &[
            "param",
            "members",
            "aborted",
            "tau_fixed",
            "oqsl_fixed_mean",
            "oqsl_fixed_stderr",
            "oqsl_max_mean",
            "oqsl_max_stderr",
            "ref_fixed_mean",
            "ref_fixed_stderr",
            "ref_max_mean",
            "ref_max_stderr",
            "ck_rate_mean",
            "ck_rate_stderr",
            "D_K_mean",
            "gap_ratio_mean",
        ],
    );

    for point in points {
        let runs = &point.runs;
        let param = Field::from(point.param);
        let longest = runs.iter().map(|r| r.b.len()).max().unwrap_or(0);
        for n in 0..longest {
            let vals: Vec<f64> = runs.iter().filter_map(|r| r.b.get(n).copied()).collect();
            let [m, s] = mean_stderr(&vals);
            bn.row(&[param, (n + 1).into(), m, s, vals.len().into()]);
        }
        for (ti, &t) in opts.times.iter().enumerate() {
            let vals: Vec<f64> = runs.iter().map(|r| r.ck[ti]).collect();
            let [m, s] = mean_stderr(&vals);
            ck.row(&[param, t.into(), m, s, vals.len().into()]);
        }
        let count1: Vec<f64> = runs.iter().map(|r| r.resonances.count1 as f64).collect();
        let count2: Vec<f64> = runs.iter().map(|r| r.resonances.count2 as f64).collect();
        let dk: Vec<f64> = runs.iter().map(|r| r.krylov_dim as f64).collect();
        for (k, &tau) in opts.taus.iter().enumerate() {
            let avg = |f: &dyn Fn(&KrylovRun) -> f64| mean(&runs.iter().map(f).collect::<Vec<_>>());
            oqsl.row(&[
                param,
                tau.into(),
                avg(&|r| r.kernel[k].geodesic).into(),
                avg(&|r| r.kernel[k].path_speed).into(),
                avg(&|r| r.oqsl[k].tau_ref).into(),
                avg(&|r| r.kernel[k].tau_ref).into(),
                avg(&|r| r.kernel[k].stationary_norm).into(),
                mean(&count1).into(),
                mean(&count2).into(),
                mean(&dk).into(),
            ]);
        }
        let col = |f: &dyn Fn(&KrylovRun) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
        let [a, b] = mean_stderr(&col(&|r| r.fixed.tau_ref));
        let [c, d] = mean_stderr(&col(&|r| r.oqsl_max()));
        let [e, f] = mean_stderr(&col(&|r| r.fixed_kernel.tau_ref));
        let [g, h] = mean_stderr(&col(&|r| r.kernel_max()));
        let [i, j] = mean_stderr(&col(&|r| r.ck_rate));
        summary.row(&[
            param,
            runs.len().into(),
            point.aborted.into(),
            opts.tau_fixed.into(),
            a,
            b,
            c,
            d,
            e,
            f,
            g,
            h,
            i,
            j,
            mean(&dk).into(),
            mean(&col(&|r| r.gap_ratio)).into(),
        ]);
    }
    vec![
        (format!("bn_vs_{p}.csv"), bn),
        (format!("ck_vs_{p}.csv"), ck),
        (format!("oqsl_vs_{p}.csv"), oqsl),
        (format!("oqsl_summary_vs_{p}.csv"), summary),
    ]
}

/// Scrambling diagnostics of the Krylov basis and of `O(t)` for one `g`.
pub fn scrambling_series(cfg: &ExperimentConfig, g: f64, times: &[f64]) -> core::Result<ScramblingSeries> {
    let (h, o) = anni_instance(cfg.sites, g, cfg.h)?;
    let spec = h.spectral_decomposition()?;
    let lz = lanczos_with_spectrum(&spec, &o, cfg.lanczos_tol, cfg.max_krylov)?;
    let n_sites = cfg.sites;
    let cut = n_sites / 2;
    let d_k = lz.krylov_dim();
    let mut series = ScramblingSeries {
        g,
        krylov_dim: d_k,
        influence: Vec::with_capacity(d_k),
        ipr: Vec::with_capacity(d_k),
        opee: Vec::with_capacity(d_k),
        ipr_t: Vec::with_capacity(times.len()),
        opee_t: Vec::with_capacity(times.len()),
        snapshots: Vec::new(),
    };
    for (n, k_n) in lz.basis.iter().enumerate() {
        let c = pauli_decompose(&k_n, n_sites)?;
        series.influence.push(core::influence(&c));
        series.ipr.push(core::ipr(&c)?);
        series.opee.push(opee_from_coefficients(&c, cut)?.entropy_bits);
        if cfg.snapshots.contains(&n) {
            series.snapshots.push((n, size_resolved_map(&c)));
        }
    }
    for &t in times {
        let c = pauli_decompose(&core::evolve_operator(&spec, &o, t)?, n_sites)?;
        series.ipr_t.push(core::ipr(&c)?);
        series.opee_t.push(opee_from_coefficients(&c, cut)?.entropy_bits);
    }
    Ok(series)
}

pub fn run_scrambling_probe(cfg: &ExperimentConfig, out: &Path) -> Result<ScramblingOutcome, RunError> {
    prepare_dir(out, cfg)?;
    let times = cfg.time_grid();
    let results: Vec<core::Result<ScramblingSeries>> =
        pool(cfg.workers)?.install(|| cfg.g_grid.par_iter().map(|&g| scrambling_series(cfg, g, &times)).collect());
    let mut series = Vec::with_capacity(results.len());
    for (&g, res) in cfg.g_grid.iter().zip(results) {
        match res {
            Ok(s) => series.push(s),
            Err(e) => return Err(RunError::Numerical(format!("scrambling probe at g={g}: {e}"))),
        }
    }

    let comment = comment_line(cfg);
    let mut influence = Table::new(&comment, &["g", "n", "influence"]);
    let mut ipr = Table::new(&comment, &["g", "n", "ipr"]);
    let mut opee = Table::new(&comment, &["g", "n", "opee"]);
    let mut ipr_t = Table::new(&comment, &["g", "t", "ipr"]);
    let mut opee_t = Table::new(&comment, &["g", "t", "opee"]);
    let mut tables = Vec::new();
    for s in &series {
        let g = Field::from(s.g);
        for n in 0..s.krylov_dim {
            influence.row(&[g, n.into(), s.influence[n].into()]);
            ipr.row(&[g, n.into(), s.ipr[n].into()]);
            opee.row(&[g, n.into(), s.opee[n].into()]);
        }
        for (ti, &t) in times.iter().enumerate() {
            ipr_t.row(&[g, t.into(), s.ipr_t[ti].into()]);
            opee_t.row(&[g, t.into(), s.opee_t[ti].into()]);
        }
        for (n, rows) in &s.snapshots {
            let header = format!(
                "{comment}\n# n_sites={} krylov_index={n} rows=Pauli size 0..n_sites; entries |c_a| by increasing label; \
                 label digit per site 2s+t (0=I 1=Z 2=X 3=XZ), site 1 most significant",
                cfg.sites
            );
            let mut t = Table::new(&header, &["size", "abs_coeffs"]);
            for (k, row) in rows.iter().enumerate() {
                let mut fields: Vec<Field> = vec![k.into()];
                fields.extend(row.iter().map(|&v| Field::from(v)));
                t.raw_row(&fields);
            }
            tables.push((format!("density_g{}_n{n}.csv", label(s.g)), t));
        }
    }
    let mut all = vec![
        ("influence_vs_n.csv".to_string(), influence),
        ("ipr_vs_n.csv".to_string(), ipr),
        ("opee_vs_n.csv".to_string(), opee),
        ("ipr_vs_t.csv".to_string(), ipr_t),
        ("opee_vs_t.csv".to_string(), opee_t),
    ];
    all.extend(tables);
    let files = write_tables(out, all)?;
    Ok(ScramblingOutcome { times, cut: cfg.sites / 2, series, files })
}
