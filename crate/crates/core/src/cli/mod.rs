//! Command-line front end: `solve`, `gen`, `train`, `eval`, `infer`, `render`.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.

mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use report::{Report, SignCounts};

use crate::data::{
    broadcast_l, build_instance, generate, parametric_point, read_dataset, regenerate, sample_seed, write_dataset,
    DataError, ExperimentKind, ExperimentSpec, Sample, Split, PREDICTION_ID, SOLVE_ID,
};
use crate::dynamics::{Air3D, Air3DCapture, Dubins4D, Dynamics, Translation};
use crate::geometry::{rasterize_l, GeometryError, Primitive, Scene, Vec2};
use crate::grid::{GridError, ValueGrid};
use crate::hji::{solve, HjiError, SolverConfig};
use crate::nn::{
    read_checkpoint, rel_l2, train, write_checkpoint, ArchConfig, FnoConfig, NnError, OperatorModel, Tape, Tensor,
    TnoConfig, TrainConfig,
};
use crate::render::{contour_overlay, heatmap};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Hji(#[from] HjiError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Hji(e) => hji_code(e),
            CliError::Data(DataError::Hji(e)) => hji_code(e),
            CliError::Data(DataError::Spec(_)) => 1,
            CliError::Data(DataError::NotConverged { .. }) => 3,
            CliError::Nn(NnError::NonFiniteLoss { .. }) => 3,
            _ => 2,
        }
    }
}

fn hji_code(e: &HjiError) -> i32 {
    match e {
        HjiError::Config(_) => 1,
        HjiError::NonFinite { .. } => 3,
        _ => 2,
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "reachop", version, about = "Reachability value functions on grids and learned operator surrogates")]
pub struct Cli {
    /// Master seed for instance generation, initialization and shuffling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for the grid solver.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write the full value function as a dataset file.
    Solve(SolveArgs),
    /// Generate train/test datasets for an experiment family.
    Gen(GenArgs),
    /// Train a neural operator and write a checkpoint plus a CSV log.
    Train(TrainArgs),
    /// Evaluate a checkpoint and write a TOML report.
    Eval(EvalArgs),
    /// Run a checkpoint over a dataset and write its predictions.
    Infer(InferArgs),
    /// Write a heatmap (PGM) and zero-contour overlay (PPM) of a 2D slice.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    Translation,
    Dubins,
    Air3d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Arch {
    Fno,
    Tno,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Dynamics used with --scene (ignored with --experiment).
    #[arg(long, value_enum, default_value_t = System::Dubins)]
    pub system: System,
    /// Take the instance from an experiment family instead of --scene.
    #[arg(long)]
    pub experiment: Option<ExperimentKind>,
    #[arg(long, value_enum, default_value_t = SplitArg::Train)]
    pub split: SplitArg,
    /// Instance index within the split.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Scene TOML; defaults to a unit disc at the origin.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Translation velocity `c1,c2`.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.0])]
    pub velocity: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    #[arg(long, default_value_t = 7)]
    pub speed_samples: usize,
    #[arg(long, default_value_t = 16)]
    pub heading_samples: usize,
    #[arg(long)]
    pub max_horizon: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output dataset file holding the solution.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional TOML metrics record.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub experiment: Option<ExperimentKind>,
    /// Experiment spec TOML; flags below override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub slices_per_solve: Option<usize>,
    /// Receives train.hjrd, test.hjrd and spec.toml.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Optional held-out set, evaluated after every epoch.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Arch::Fno)]
    pub arch: Arch,
    #[arg(long)]
    pub width: Option<usize>,
    /// Retained Fourier modes per axis.
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub mlp_hidden: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// CSV log: `epoch,train_mse,train_rel_l2,test_rel_l2,seconds`.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Re-solve ground truth at `k` times the stored resolution.
    #[arg(long, default_value_t = 1)]
    pub resolution_scale: usize,
    /// Spec used for re-solving; defaults to spec.toml beside --data.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// CSV of per-sample wall time: `sample,seconds`.
    #[arg(long)]
    pub timing: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
    /// `target`, `l`, or `input:N`.
    #[arg(long, default_value = "target")]
    pub channel: String,
    /// Fix an axis at a node index, `axis=index`; repeat until two axes remain.
    #[arg(long = "fix")]
    pub fix: Vec<String>,
    /// Prediction file: render its target next to the truth.
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// Pixels per grid node.
    #[arg(long, default_value_t = 4)]
    pub scale: usize,
    #[arg(long)]
    pub out_prefix: PathBuf,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, seed, cli.threads).map(|_| ()),
        Command::Gen(a) => cmd_gen(a, cli.seed, cli.threads),
        Command::Train(a) => cmd_train(a, seed).map(|_| ()),
        Command::Eval(a) => cmd_eval(a, cli.threads).map(|_| ()),
        Command::Infer(a) => cmd_infer(a).map(|_| ()),
        Command::Render(a) => cmd_render(a).map(|_| ()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveMetrics {
    pub system: String,
    pub nodes: usize,
    pub converged: bool,
    pub iterations: usize,
    pub horizon: f64,
    pub wall_time: f64,
}

pub fn cmd_solve(a: &SolveArgs, seed: u64, threads: usize) -> Result<SolveMetrics, CliError> {
    let mut config = SolverConfig { threads, ..SolverConfig::default() };
    if let Some(h) = a.max_horizon {
        config.max_horizon = h;
    }
    if let Some(c) = a.cfl {
        config.cfl = c;
    }
    if let Some(t) = a.tol {
        config.convergence_tol = t;
    }
    config.validate()?;
    if a.resolution < 3 {
        return Err(CliError::Usage("--resolution must be at least 3".into()));
    }
    let (system, instance_seed, l, dynamics) = if let Some(kind) = a.experiment {
        let spec = ExperimentSpec {
            resolution: a.resolution,
            speed_samples: a.speed_samples,
            heading_samples: a.heading_samples,
            ..ExperimentSpec::desk(kind)
        };
        let split = if a.split == SplitArg::Train { Split::Train } else { Split::Test };
        let s = sample_seed(seed, split, a.index);
        let extra = match kind {
            ExperimentKind::Parametric => {
                let (u1, u2) = parametric_point(&spec, split, a.index);
                vec![u1, u2]
            }
            _ => vec![],
        };
        let inst = build_instance(&spec, s, &extra, a.resolution)?;
        (kind.name().to_string(), s, inst.l, inst.dynamics)
    } else {
        let scene = match &a.scene {
            Some(p) => Scene::from_toml(&std::fs::read_to_string(p).map_err(|e| io_err(p, e))?)?,
            None => Scene::single(Primitive::Disc { center: Vec2::default(), radius: 1.0 })?,
        };
        let n = a.resolution;
        match a.system {
            System::Translation => {
                if a.velocity.len() != 2 {
                    return Err(CliError::Usage("--velocity needs two components".into()));
                }
                let d = Dubins4D::default().domain().select(&[0, 1]);
                let l = rasterize_l(&scene, &d, &[n, n])?;
                ("translation".into(), seed, l, Dynamics::Translation(Translation::constant(a.velocity.clone())))
            }
            System::Dubins => {
                let dubins = Dubins4D::default();
                let d = dubins.domain();
                let shape = vec![n, n, a.speed_samples, a.heading_samples];
                let l2 = rasterize_l(&scene, &d.select(&[0, 1]), &shape[..2])?;
                ("dubins".into(), seed, broadcast_l(&l2, &d, &shape)?, Dynamics::Dubins4D(dubins))
            }
            System::Air3d => {
                let (d, shape) = Air3D::default_domain(n, a.heading_samples);
                let l = Air3DCapture::Radius(Air3D::CAPTURE_RADIUS).field(&d, &shape).map_err(DataError::from)?;
                ("air3d".into(), seed, l, Dynamics::Air3D(Air3D::default()))
            }
        }
    };
    let res = solve(&l, &dynamics, &config)?;
    if !res.converged {
        eprintln!(
            "warning: not converged after {} iterations (horizon {:.3}); writing the last iterate",
            res.iterations, res.horizon
        );
    }
    let sample = Sample::from_grids(SOLVE_ID, instance_seed, &l, &res.v_inf, &[])?;
    write_dataset(&a.out, &[sample])?;
    let m = SolveMetrics {
        system,
        nodes: l.len(),
        converged: res.converged,
        iterations: res.iterations,
        horizon: res.horizon,
        wall_time: res.wall_time,
    };
    println!(
        "system={} nodes={} converged={} iterations={} horizon={:.4} wall_time={:.4}",
        m.system, m.nodes, m.converged, m.iterations, m.horizon, m.wall_time
    );
    if let Some(p) = &a.metrics {
        std::fs::write(p, toml::to_string(&m).expect("metrics are TOML-representable")).map_err(|e| io_err(p, e))?;
    }
    Ok(m)
}

fn load_spec(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn cmd_gen(a: &GenArgs, seed: Option<u64>, threads: usize) -> Result<(), CliError> {
    let mut spec = match (&a.spec, a.experiment) {
        (Some(p), None) => load_spec(p)?,
        (None, Some(kind)) => ExperimentSpec::desk(kind),
        (Some(_), Some(_)) => return Err(CliError::Usage("pass either --spec or --experiment".into())),
        (None, None) => return Err(CliError::Usage("one of --spec or --experiment is required".into())),
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(v) = a.n_train {
        spec.n_train = v;
    }
    if let Some(v) = a.n_test {
        spec.n_test = v;
    }
    if let Some(v) = a.resolution {
        spec.resolution = v;
    }
    if let Some(v) = a.slices_per_solve {
        spec.slices_per_solve = v;
    }
    spec.solver.threads = threads;
    spec.validate()?;
    let g = generate(&spec)?;
    for r in g.excluded() {
        eprintln!(
            "warning: excluded {:?} instance {} (seed {}): not converged after {} iterations",
            r.split, r.index, r.seed, r.iterations
        );
    }
    std::fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;
    write_dataset(&a.out_dir.join("train.hjrd"), &g.train)?;
    write_dataset(&a.out_dir.join("test.hjrd"), &g.test)?;
    // threads do not change results; keep the stored spec independent of them
    let stored = ExperimentSpec { solver: SolverConfig { threads: 1, ..spec.solver.clone() }, ..spec.clone() };
    let p = a.out_dir.join("spec.toml");
    std::fs::write(&p, toml::to_string(&stored).expect("spec is TOML-representable")).map_err(|e| io_err(&p, e))?;
    let solve_time: f64 = g.solves.iter().map(|r| r.wall_time).sum();
    println!(
        "experiment={} train={} test={} excluded={} solve_seconds={:.3}",
        spec.kind.name(),
        g.train.len(),
        g.test.len(),
        g.excluded().count(),
        solve_time
    );
    Ok(())
}

/// Model-facing tensors: `[n1, n2, C]` for FNO, `[n1·n2, C]` for TNO.
pub fn model_io(arch: &ArchConfig, s: &Sample) -> Result<(Tensor<f32>, Tensor<f32>), CliError> {
    if s.c_in != arch.in_channels() || s.c_out != arch.out_channels() {
        return Err(CliError::Mismatch(format!(
            "model expects {} -> {} channels, sample has {} -> {}",
            arch.in_channels(),
            arch.out_channels(),
            s.c_in,
            s.c_out
        )));
    }
    if s.dims.len() != 2 {
        return Err(CliError::Mismatch(format!("model needs 2D samples, got dims {:?}", s.dims)));
    }
    let (x, y) = (s.input_tensor::<f32>(), s.target_tensor::<f32>());
    Ok(match arch {
        ArchConfig::Fno(_) => (x, y),
        ArchConfig::Tno(_) => {
            let n = s.nodes();
            (x.reshape(vec![n, s.c_in])?, y.reshape(vec![n, s.c_out])?)
        }
    })
}

fn tensors(arch: &ArchConfig, samples: &[Sample]) -> Result<Vec<(Tensor<f32>, Tensor<f32>)>, CliError> {
    samples.iter().map(|s| model_io(arch, s)).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn train_arch(a: &TrainArgs, c_in: usize) -> ArchConfig {
    match a.arch {
        Arch::Fno => {
            let mut c = FnoConfig::desk(c_in);
            if let Some(w) = a.width {
                c.width = w;
            }
            if let Some(m) = a.modes {
                c.modes = (m, m);
            }
            if let Some(b) = a.blocks {
                c.n_blocks = b;
            }
            ArchConfig::Fno(c)
        }
        Arch::Tno => {
            let mut c = TnoConfig::desk(c_in);
            if let Some(w) = a.width {
                c.width = w;
            }
            if let Some(b) = a.blocks {
                c.n_blocks = b;
            }
            if let Some(h) = a.mlp_hidden {
                c.mlp_hidden = h;
            }
            ArchConfig::Tno(c)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub final_train_rel_l2: f64,
    pub final_test_rel_l2: Option<f64>,
    pub seconds: f64,
}

pub fn cmd_train(a: &TrainArgs, seed: u64) -> Result<TrainSummary, CliError> {
    let samples = read_dataset(&a.data)?;
    let first = samples.first().ok_or(NnError::EmptyDataset)?;
    let arch = train_arch(a, first.c_in);
    arch.validate()?;
    let data = tensors(&arch, &samples)?;
    let test = match &a.test {
        Some(p) => Some(tensors(&arch, &read_dataset(p)?)?),
        None => None,
    };
    let mut model = OperatorModel::<f32>::init(arch, seed)?;
    let cfg = TrainConfig { epochs: a.epochs, lr: a.lr, batch_size: a.batch_size, seed };
    let mut log = match &a.log {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?);
            writeln!(w, "epoch,train_mse,train_rel_l2,test_rel_l2,seconds").map_err(|e| io_err(p, e))?;
            Some((w, p.clone()))
        }
        None => None,
    };
    let start = Instant::now();
    let mut test_err = None;
    let mut failure: Option<CliError> = None;
    let hist = train(&mut model, &data, &cfg, |s, m| {
        if failure.is_some() {
            return;
        }
        if let Some(t) = &test {
            match crate::nn::evaluate(m, t) {
                Ok(v) => test_err = Some(mean(&v)),
                Err(e) => failure = Some(e.into()),
            }
        }
        let shown = test_err.map(|v| v.to_string()).unwrap_or_default();
        if let Some((w, p)) = log.as_mut() {
            if let Err(e) = writeln!(w, "{},{},{},{},{}", s.epoch, s.train_mse, s.train_rel_l2, shown, s.seconds) {
                failure = Some(io_err(p, e));
            }
        }
        let test_shown = test_err.map(|v| format!("  test {v:.4}")).unwrap_or_default();
        eprintln!("epoch {:>3}  mse {:.3e}  train rel L2 {:.4}{test_shown}", s.epoch, s.train_mse, s.train_rel_l2);
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some((w, p)) = log.as_mut() {
        w.flush().map_err(|e| io_err(p, e))?;
    }
    write_checkpoint(&a.out, &model)?;
    Ok(TrainSummary {
        final_train_rel_l2: hist.last().map_or(f64::NAN, |s| s.train_rel_l2),
        final_test_rel_l2: test_err,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn predict(model: &OperatorModel<f32>, tape: &mut Tape<f32>, x: &Tensor<f32>) -> Result<(Vec<f64>, f64), CliError> {
    let t0 = Instant::now();
    let p = model.predict_with(tape, x)?;
    Ok((p.to_f64_vec(), t0.elapsed().as_secs_f64()))
}

fn spec_beside(data: &Path) -> PathBuf {
    data.parent().unwrap_or(Path::new(".")).join("spec.toml")
}

pub fn cmd_eval(a: &EvalArgs, threads: usize) -> Result<Report, CliError> {
    if a.resolution_scale == 0 {
        return Err(CliError::Usage("--resolution-scale must be at least 1".into()));
    }
    let model = read_checkpoint(&a.model)?;
    let mut samples = read_dataset(&a.data)?;
    if samples.is_empty() {
        return Err(NnError::EmptyDataset.into());
    }
    let mut solve_times = Vec::new();
    if a.resolution_scale > 1 {
        let p = a.spec.clone().unwrap_or_else(|| spec_beside(&a.data));
        let mut spec = load_spec(&p)?;
        spec.solver.threads = threads;
        for s in samples.iter_mut() {
            let n = s.dims[0] * a.resolution_scale;
            let t0 = Instant::now();
            *s = regenerate(&spec, s, n)?;
            solve_times.push(t0.elapsed().as_secs_f64());
        }
    }
    let mut tape = Tape::new();
    let mut per_sample = Vec::with_capacity(samples.len());
    let mut times = Vec::with_capacity(samples.len());
    let mut signs = SignCounts::default();
    for s in &samples {
        let (x, y) = model_io(&model.arch, s)?;
        let (pred, dt) = predict(&model, &mut tape, &x)?;
        let truth = y.to_f64_vec();
        per_sample.push(rel_l2(&pred, &truth)?);
        times.push(dt);
        signs.add(&pred, &truth);
    }
    let report = Report {
        model: a.model.display().to_string(),
        dataset: a.data.display().to_string(),
        samples: samples.len(),
        resolution: samples[0].dims.clone(),
        resolution_scale: a.resolution_scale,
        mean_rel_l2: mean(&per_sample),
        max_rel_l2: per_sample.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        sign_mismatch_rate: signs.mismatch_rate(),
        false_safe_rate: signs.false_safe_rate(),
        mean_inference_seconds: mean(&times),
        mean_solve_seconds: (!solve_times.is_empty()).then(|| mean(&solve_times)),
        per_sample_rel_l2: per_sample,
    };
    std::fs::write(&a.out, report.to_toml()).map_err(|e| io_err(&a.out, e))?;
    println!(
        "samples={} mean_rel_l2={:.6} max_rel_l2={:.6} sign_mismatch={:.4} false_safe={:.4}",
        report.samples, report.mean_rel_l2, report.max_rel_l2, report.sign_mismatch_rate, report.false_safe_rate
    );
    Ok(report)
}

/// Per-sample inference wall times in seconds.
pub fn cmd_infer(a: &InferArgs) -> Result<Vec<f64>, CliError> {
    let model = read_checkpoint(&a.model)?;
    let samples = read_dataset(&a.data)?;
    let mut tape = Tape::new();
    let mut out = Vec::with_capacity(samples.len());
    let mut times = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let (x, _) = model_io(&model.arch, s)?;
        let (pred, dt) = predict(&model, &mut tape, &x)?;
        println!("sample={i} seconds={dt:.6}");
        times.push(dt);
        out.push(Sample { experiment: PREDICTION_ID, target: pred.iter().map(|&v| v as f32).collect(), ..s.clone() });
    }
    write_dataset(&a.out, &out)?;
    if let Some(p) = &a.timing {
        let mut text = String::from("sample,seconds\n");
        for (i, t) in times.iter().enumerate() {
            text.push_str(&format!("{i},{t}\n"));
        }
        std::fs::write(p, text).map_err(|e| io_err(p, e))?;
    }
    if !times.is_empty() {
        println!("mean_seconds={:.6}", mean(&times));
    }
    Ok(times)
}

fn parse_fix(spec: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--fix expects axis=index, got {spec:?}"));
    let (a, i) = spec.split_once('=').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, i.trim().parse().map_err(|_| bad())?))
}

fn select_slice(s: &Sample, channel: &str, fix: &[(usize, usize)]) -> Result<ValueGrid, CliError> {
    let grid = match channel {
        "target" => s.target_grid()?,
        "l" => s.input_grid(0)?,
        other => {
            let c = other
                .strip_prefix("input:")
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| CliError::Usage(format!("unknown channel {other:?}")))?;
            s.input_grid(c)?
        }
    };
    if grid.ndim() - fix.len() != 2 {
        return Err(CliError::Usage(format!(
            "selection is {}D after fixing {} axes; fix axes until two remain",
            grid.ndim() - fix.len().min(grid.ndim()),
            fix.len()
        )));
    }
    if fix.is_empty() {
        Ok(grid)
    } else {
        grid.slice(fix).map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn write_images(grid: &ValueGrid, scale: usize, stem: &Path) -> Result<Vec<PathBuf>, CliError> {
    let heat = stem.with_file_name(format!("{}.pgm", file_name(stem)));
    let contour = stem.with_file_name(format!("{}_contour.ppm", file_name(stem)));
    std::fs::write(&heat, heatmap(grid, scale).encode()).map_err(|e| io_err(&heat, e))?;
    std::fs::write(&contour, contour_overlay(grid, scale).encode()).map_err(|e| io_err(&contour, e))?;
    Ok(vec![heat, contour])
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Writes `<prefix>.pgm` and `<prefix>_contour.ppm`; with `--pred`,
/// `<prefix>_truth.*` and `<prefix>_pred.*` instead. Returns the paths.
pub fn cmd_render(a: &RenderArgs) -> Result<Vec<PathBuf>, CliError> {
    let fix = a.fix.iter().map(|f| parse_fix(f)).collect::<Result<Vec<_>, _>>()?;
    let pick = |path: &Path| -> Result<Sample, CliError> {
        let mut all = read_dataset(path)?;
        if a.sample >= all.len() {
            return Err(CliError::Usage(format!(
                "--sample {} but {} has {} samples",
                a.sample,
                path.display(),
                all.len()
            )));
        }
        Ok(all.swap_remove(a.sample))
    };
    let truth = select_slice(&pick(&a.data)?, &a.channel, &fix)?;
    match &a.pred {
        None => write_images(&truth, a.scale, &a.out_prefix),
        Some(p) => {
            let pred = select_slice(&pick(p)?, &a.channel, &fix)?;
            if pred.shape != truth.shape {
                return Err(CliError::Mismatch(format!("prediction {:?} vs truth {:?}", pred.shape, truth.shape)));
            }
            let stem = |tag: &str| a.out_prefix.with_file_name(format!("{}_{tag}", file_name(&a.out_prefix)));
            let mut paths = write_images(&truth, a.scale, &stem("truth"))?;
            paths.extend(write_images(&pred, a.scale, &stem("pred"))?);
            Ok(paths)
        }
    }
}
