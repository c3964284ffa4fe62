//! Command-line front end. `main.rs` only calls [`main`].

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::features::{sample_features, Sampler};
use crate::harness::{self, fmt_float, ExperimentConfig, ExperimentKind};
use crate::kernels::{median_bandwidth, KernelFamily, KernelSpec, DEFAULT_BANDWIDTH_PROBES};
use crate::krr::{self, RegressionDataset};
use crate::qmc::{
    apply_scramble, halton_points, sobol_points_count, star_discrepancy_exact,
    star_discrepancy_lower_bound, uniform_points, PointMeta, PointSet, ScrambleKind, ScrambleSpec,
    EXACT_WORK_LIMIT,
};

#[derive(Parser, Debug)]
#[command(name = "rqmcf", version, about = "Randomized QMC random features and kernel ridge regression")]
pub struct Cli {
    /// Worker threads for trial-level parallelism (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a Sobol', Halton or uniform point set as CSV.
    GenPoints(PointArgs),
    /// Write the frequencies and phases of a feature bank as CSV.
    GenFeatures(FeatureArgs),
    /// Fit one KRR model and report its errors.
    KrrFit(FitArgs),
    /// Kernel approximation error experiment (approx_avg, approx_sup_avg, approx_det).
    ApproxError(ExperimentArgs),
    /// KRR benchmark: exact KRR against feature KRR for each sampler.
    KrrBench(ExperimentArgs),
    /// Star discrepancy of a point set, exact or as a lower bound.
    Discrepancy(DiscrepancyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[arg(long, default_value = "sobol")]
    pub generator: String,
    /// Number of points is 2^m.
    #[arg(long, conflicts_with = "count")]
    pub m: Option<u32>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// First sequence index (Halton defaults to 1).
    #[arg(long)]
    pub offset: Option<u64>,
    /// none, owen or cp (Sobol' and Halton only).
    #[arg(long, default_value = "none")]
    pub scramble: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 53)]
    pub digit_depth: u32,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FeatureArgs {
    #[arg(long, default_value = "sobol_owen")]
    pub sampler: String,
    #[arg(long, default_value = "gaussian")]
    pub kernel: String,
    /// Length scale; median heuristic when absent.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 256)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// exact, mc, halton, sobol-owen or sobol-cp.
    #[arg(long, default_value = "exact")]
    pub mode: String,
    /// CSV with columns x1..xd,y. Synthetic data is generated when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Smoothness of the synthetic target and of the lambda schedule.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n_test: usize,
    /// Number of features in feature modes.
    #[arg(long, default_value_t = 256)]
    pub features: usize,
    /// Ridge parameter; the schedule 0.25 n^(-1/(2r+1)) when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the fitted coefficients.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ExperimentArgs {
    /// Flat key = value file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    /// Comma-separated list, e.g. mc,halton,sobol_owen.
    #[arg(long)]
    pub samplers: Option<String>,
    /// Comma-separated powers of two.
    #[arg(long)]
    pub m_grid: Option<String>,
    #[arg(long)]
    pub n_pairs: Option<String>,
    #[arg(long)]
    pub n_train: Option<String>,
    #[arg(long)]
    pub n_test: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub lambda_coeff: Option<String>,
    #[arg(long)]
    pub include_exact: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub bandwidth_probes: Option<String>,
    #[arg(long)]
    pub calibration_probes: Option<String>,
    /// Fill the wall_ms column (makes the CSV timing dependent).
    #[arg(long)]
    pub record_timing: bool,
    /// CSV path; a JSON sidecar is written next to it. Stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DiscrepancyArgs {
    /// CSV point set with a header row. Generated from the point flags when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub points: PointArgs,
    /// Random probe corners for the lower bound; 0 requests the exact value.
    #[arg(long, default_value_t = 0)]
    pub probes: usize,
}

impl ExperimentArgs {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("d", &self.d),
            ("kernel", &self.kernel),
            ("sigma", &self.sigma),
            ("samplers", &self.samplers),
            ("m_grid", &self.m_grid),
            ("n_pairs", &self.n_pairs),
            ("n_train", &self.n_train),
            ("n_test", &self.n_test),
            ("trials", &self.trials),
            ("r", &self.r),
            ("lambda_coeff", &self.lambda_coeff),
            ("include_exact", &self.include_exact),
            ("master_seed", &self.seed),
            ("bandwidth_probes", &self.bandwidth_probes),
            ("calibration_probes", &self.calibration_probes),
        ]
    }

    /// Defaults for the experiment kind, then the config file, then flags.
    pub fn resolve(&self, default_kind: ExperimentKind) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        let mut kind = default_kind;
        let mut probe = ExperimentConfig::new(default_kind);
        probe.apply_text(&text)?;
        if probe.experiment != default_kind {
            kind = probe.experiment;
        }
        if let Some(e) = &self.experiment {
            kind = e.parse()?;
        }
        let mut cfg = ExperimentConfig::new(kind);
        cfg.apply_text(&text)?;
        cfg.experiment = kind;
        for (key, value) in self.flags() {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.record_timing {
            cfg.record_timing = true;
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_matrix(out: &mut dyn Write, header: &[String], data: &[f64]) -> Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in data.chunks_exact(header.len()) {
        let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a numeric CSV with one header row. Returns row-major data and the
/// column count.
pub fn read_csv_matrix(path: &Path) -> Result<(Vec<f64>, usize)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let cols = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{} is empty", path.display())))?
        .split(',')
        .count();
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let before = data.len();
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{}: row {}: bad number '{cell}'", path.display(), i + 1)))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::Config(format!("{}: row {} has the wrong width", path.display(), i + 1)));
        }
    }
    Ok((data, cols))
}

fn scramble_spec(name: &str, seed: u64, depth: u32) -> Result<ScrambleSpec> {
    let kind = match name {
        "none" => ScrambleKind::None,
        "owen" | "owen_nested" => ScrambleKind::OwenNested,
        "cp" | "cp_rotation" => ScrambleKind::CpRotation,
        other => return Err(Error::Config(format!("unknown scramble '{other}'"))),
    };
    Ok(ScrambleSpec { kind, seed, digit_depth: depth })
}

pub fn generate_points(a: &PointArgs) -> Result<PointSet> {
    let count = match (a.m, a.count) {
        (Some(m), _) if m > 31 => return Err(Error::Config(format!("m = {m} exceeds 31"))),
        (Some(m), _) => 1usize << m,
        (None, Some(c)) => c,
        (None, None) => 256,
    };
    let spec = scramble_spec(&a.scramble, a.seed, a.digit_depth)?;
    let ps = match a.generator.as_str() {
        "sobol" => sobol_points_count(count, a.dim, a.offset.unwrap_or(0))?,
        "halton" => halton_points(count, a.dim, a.offset.unwrap_or(1))?,
        "uniform" | "mc" => {
            if spec.kind != ScrambleKind::None {
                return Err(Error::Config("uniform points cannot be scrambled".into()));
            }
            return uniform_points(count, a.dim, a.seed);
        }
        other => return Err(Error::Config(format!("unknown generator '{other}'"))),
    };
    apply_scramble(&ps, &spec)
}

fn cmd_gen_points(a: &PointArgs) -> Result<()> {
    let ps = generate_points(a)?;
    let header: Vec<String> = (1..=ps.dim()).map(|j| format!("x{j}")).collect();
    let mut out = open_output(a.output.as_deref())?;
    write_matrix(&mut *out, &header, ps.as_slice())
}

fn cmd_gen_features(a: &FeatureArgs) -> Result<()> {
    let sampler: Sampler = a.sampler.parse()?;
    let family: KernelFamily = a.kernel.parse()?;
    let sigma = match a.sigma {
        Some(s) => s,
        None => median_bandwidth(a.dim, DEFAULT_BANDWIDTH_PROBES, a.seed)?,
    };
    let kernel = KernelSpec::new(family, sigma, a.dim)?;
    let bank = sample_features(sampler, &kernel, a.count, a.seed)?;
    let mut header: Vec<String> = (1..=a.dim).map(|j| format!("w{j}")).collect();
    header.push("b".into());
    let mut data = Vec::with_capacity(bank.len() * (a.dim + 1));
    for i in 0..bank.len() {
        data.extend_from_slice(bank.frequency(i));
        data.push(bank.phases()[i]);
    }
    let mut out = open_output(a.output.as_deref())?;
    write_matrix(&mut *out, &header, &data)
}

fn cmd_krr_fit(a: &FitArgs) -> Result<()> {
    let sampler = match a.mode.replace('-', "_").as_str() {
        "exact" => None,
        m => Some(m.parse::<Sampler>()?),
    };
    // Synthetic data share the benchmark's generator with a single trial.
    let mut cfg = ExperimentConfig::new(ExperimentKind::KrrBench);
    cfg.d = a.d;
    cfg.n_train = a.n;
    cfg.n_test = a.n_test;
    cfg.r = a.r;
    cfg.master_seed = a.seed;
    cfg.sigma = a.sigma;
    let (data, d, test) = match &a.data {
        Some(path) => {
            let (raw, cols) = read_csv_matrix(path)?;
            if cols < 2 {
                return Err(Error::Config("data needs at least one input column and y".into()));
            }
            let d = cols - 1;
            let (mut x, mut y) = (Vec::new(), Vec::new());
            for row in raw.chunks_exact(cols) {
                x.extend_from_slice(&row[..d]);
                y.push(row[d]);
            }
            (RegressionDataset::new(x, d, y)?, d, None)
        }
        None => {
            cfg.validate()?;
            let kernel = harness::resolve_kernel(&cfg)?;
            let target = harness::target::TargetSpec::new(cfg.r, cfg.d, kernel.sigma)?
                .calibrated(cfg.calibration_probes, cfg.master_seed)?;
            let data = crate::harness::training_set(&cfg, &target, 0)?;
            let xt = uniform_points(a.n_test, a.d, crate::seed::derive_seed(a.seed, &[crate::seed::label("test")]))?;
            let ft: Vec<f64> = xt.rows().map(|r| target.eval(r)).collect();
            (data, a.d, Some((xt, ft)))
        }
    };
    cfg.d = d;
    let kernel = harness::resolve_kernel(&cfg)?;
    let lambda = match a.lambda {
        Some(l) => l,
        None => krr::lambda_schedule(data.len(), a.r, krr::DEFAULT_LAMBDA_COEFF)?,
    };
    let model = match sampler {
        None => krr::fit_exact_with(&data, Arc::new(kernel), lambda)?,
        Some(s) => krr::fit_features(&data, &sample_features(s, &kernel, a.features, a.seed)?, lambda)?,
    };
    let train = krr::test_mse(&model, data.x(), data.y())?;
    let test_mse = match &test {
        Some((xt, ft)) => fmt_float(krr::test_mse(&model, xt.as_slice(), ft)?),
        None => String::new(),
    };
    let m = sampler.map(|_| a.features.to_string()).unwrap_or_default();
    let mut out = std::io::stdout().lock();
    writeln!(out, "mode,n,d,M,lambda,sigma,train_mse,test_mse,residual")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        a.mode,
        data.len(),
        d,
        m,
        fmt_float(lambda),
        fmt_float(kernel.sigma),
        fmt_float(train),
        test_mse,
        fmt_float(model.residual())
    )?;
    if let Some(path) = &a.coefficients {
        let mut f = open_output(Some(path))?;
        write_matrix(&mut *f, &["coefficient".to_string()], model.coefficients())?;
    }
    Ok(())
}

fn cmd_experiment(a: &ExperimentArgs, kind: ExperimentKind) -> Result<()> {
    let cfg = a.resolve(kind)?;
    if cfg.experiment.is_approx() != kind.is_approx() {
        return Err(Error::Config(format!("experiment {} does not belong to this command", cfg.experiment.name())));
    }
    let out = harness::run(&cfg)?;
    for note in &out.notes {
        eprintln!("note: {note}");
    }
    match &cfg.output {
        Some(path) => harness::write_outputs(path, &cfg, &out),
        None => {
            let mut w = open_output(None)?;
            harness::write_csv(&mut w, &out.records)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_discrepancy(a: &DiscrepancyArgs) -> Result<()> {
    let ps = match &a.input {
        Some(p) => {
            let (data, cols) = read_csv_matrix(p)?;
            PointSet::new(data, cols, PointMeta::external())?
        }
        None => generate_points(&a.points)?,
    };
    let work = (ps.len() as f64 + 1.0).powi(ps.dim() as i32) * ps.dim() as f64;
    let report = if a.probes == 0 && work <= EXACT_WORK_LIMIT {
        star_discrepancy_exact(&ps)?
    } else {
        let probes = if a.probes == 0 { 100_000 } else { a.probes };
        star_discrepancy_lower_bound(&ps, probes, a.points.seed)?
    };
    let mut out = open_output(a.points.output.as_deref())?;
    writeln!(out, "points,dim,value,exact,boxes_examined")?;
    writeln!(
        out,
        "{},{},{},{},{}",
        ps.len(),
        ps.dim(),
        fmt_float(report.value),
        report.exact,
        report.boxes_examined
    )?;
    out.flush()?;
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    let work = || match &cli.command {
        Command::GenPoints(a) => cmd_gen_points(a),
        Command::GenFeatures(a) => cmd_gen_features(a),
        Command::KrrFit(a) => cmd_krr_fit(a),
        Command::ApproxError(a) => cmd_experiment(a, ExperimentKind::ApproxAvg),
        Command::KrrBench(a) => cmd_experiment(a, ExperimentKind::KrrBench),
        Command::Discrepancy(a) => cmd_discrepancy(a),
    };
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Exit status: 0 on success, 3 for numerical failures, 2 for everything
/// else (bad configuration, unreadable input).
pub fn exit_code(err: &Error) -> u8 {
    if err.is_numeric() {
        3
    } else {
        2
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
