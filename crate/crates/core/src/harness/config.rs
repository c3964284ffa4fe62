use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Sampler;
use crate::kernels::KernelFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Mean over pairs of the replicate-averaged squared error.
    ApproxAvg,
    /// Max over pairs of the replicate-averaged squared error.
    ApproxSupAvg,
    /// Max over pairs of the squared error of a single feature set.
    ApproxDet,
    KrrBench,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ApproxAvg => "approx_avg",
            ExperimentKind::ApproxSupAvg => "approx_sup_avg",
            ExperimentKind::ApproxDet => "approx_det",
            ExperimentKind::KrrBench => "krr_bench",
        }
    }

    pub fn is_approx(self) -> bool {
        !matches!(self, ExperimentKind::KrrBench)
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "approx_avg" => Ok(ExperimentKind::ApproxAvg),
            "approx_sup_avg" => Ok(ExperimentKind::ApproxSupAvg),
            "approx_det" => Ok(ExperimentKind::ApproxDet),
            "krr_bench" => Ok(ExperimentKind::KrrBench),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Declarative description of one run. Every output byte is a function of
/// this struct (timing columns aside, which stay zero unless
/// `record_timing` is set).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub d: usize,
    pub kernel: KernelFamily,
    /// Kernel length scale; the median heuristic is used when absent.
    pub sigma: Option<f64>,
    pub samplers: Vec<Sampler>,
    pub m_grid: Vec<usize>,
    /// Number of `(x, x')` pairs; defaults to 1000, or 10000 for `approx_det`.
    pub n_pairs: Option<usize>,
    pub n_train: usize,
    pub n_test: usize,
    pub trials: usize,
    pub r: f64,
    pub lambda_coeff: f64,
    pub include_exact: bool,
    pub master_seed: u64,
    pub bandwidth_probes: usize,
    pub calibration_probes: usize,
    pub record_timing: bool,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_APPROX_GRID: [usize; 9] = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096];
pub const DEFAULT_KRR_GRID: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        let krr = experiment == ExperimentKind::KrrBench;
        Self {
            experiment,
            d: 1,
            kernel: KernelFamily::Gaussian,
            sigma: None,
            samplers: vec![Sampler::Mc, Sampler::Halton, Sampler::SobolOwen],
            m_grid: if krr { DEFAULT_KRR_GRID.to_vec() } else { DEFAULT_APPROX_GRID.to_vec() },
            n_pairs: None,
            n_train: 2048,
            n_test: 100_000,
            trials: if krr { 50 } else { 100 },
            r: 1.0,
            lambda_coeff: crate::krr::DEFAULT_LAMBDA_COEFF,
            include_exact: true,
            master_seed: 0,
            bandwidth_probes: crate::kernels::DEFAULT_BANDWIDTH_PROBES,
            calibration_probes: super::target::DEFAULT_CALIBRATION_PROBES,
            record_timing: false,
            output: None,
        }
    }

    pub fn pairs(&self) -> usize {
        self.n_pairs.unwrap_or(match self.experiment {
            ExperimentKind::ApproxDet => 10_000,
            _ => 1_000,
        })
    }

    /// Sets one field from its textual form. Keys match the field names;
    /// dashes are accepted in place of underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("invalid {what} '{value}' for key '{key}'"));
        match key.as_str() {
            "experiment" => self.experiment = value.parse()?,
            "d" | "dim" => self.d = value.parse().map_err(|_| bad("integer"))?,
            "kernel" => self.kernel = value.parse()?,
            "sigma" => {
                self.sigma = match value {
                    "" | "median" | "auto" => None,
                    v => Some(v.parse().map_err(|_| bad("number"))?),
                }
            }
            "samplers" | "sampler" => {
                self.samplers = split_list(value).map(str::parse).collect::<Result<_>>()?
            }
            "m_grid" | "m" => {
                self.m_grid = split_list(value)
                    .map(|v| v.parse::<usize>().map_err(|_| bad("integer list")))
                    .collect::<Result<_>>()?
            }
            "n_pairs" | "pairs" => self.n_pairs = Some(value.parse().map_err(|_| bad("integer"))?),
            "n_train" | "n" => self.n_train = value.parse().map_err(|_| bad("integer"))?,
            "n_test" => self.n_test = value.parse().map_err(|_| bad("integer"))?,
            "trials" | "r_trials" => self.trials = value.parse().map_err(|_| bad("integer"))?,
            "r" | "smoothness" => self.r = value.parse().map_err(|_| bad("number"))?,
            "lambda_coeff" => self.lambda_coeff = value.parse().map_err(|_| bad("number"))?,
            "include_exact" => self.include_exact = parse_bool(value).ok_or_else(|| bad("boolean"))?,
            "master_seed" | "seed" => self.master_seed = value.parse().map_err(|_| bad("integer"))?,
            "bandwidth_probes" => self.bandwidth_probes = value.parse().map_err(|_| bad("integer"))?,
            "calibration_probes" => self.calibration_probes = value.parse().map_err(|_| bad("integer"))?,
            "record_timing" => self.record_timing = parse_bool(value).ok_or_else(|| bad("boolean"))?,
            "output" => self.output = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file. Blank lines and `#` comments are
    /// ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.d == 0 {
            return fail("d must be at least 1".into());
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.samplers.is_empty() && !(self.experiment == ExperimentKind::KrrBench && self.include_exact) {
            return fail("no samplers selected".into());
        }
        if self.m_grid.is_empty() && !self.samplers.is_empty() {
            return fail("M grid is empty".into());
        }
        if let Some(&m) = self.m_grid.iter().find(|m| !m.is_power_of_two()) {
            return fail(format!("M grid entry {m} is not a power of two"));
        }
        if self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return fail("M grid must be strictly increasing".into());
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return fail(format!("sigma must be positive, got {s}"));
            }
        }
        if self.pairs() == 0 {
            return fail("n_pairs must be at least 1".into());
        }
        if self.bandwidth_probes < 2 {
            return fail("bandwidth_probes must be at least 2".into());
        }
        if self.experiment == ExperimentKind::KrrBench {
            if self.r != 0.5 && self.r != 1.0 {
                return fail(format!("krr_bench needs r = 0.5 or 1, got {}", self.r));
            }
            if self.kernel != KernelFamily::Gaussian {
                return fail("krr_bench targets are defined for the Gaussian kernel only".into());
            }
            if self.n_train == 0 || self.n_test == 0 {
                return fail("n_train and n_test must be positive".into());
            }
            if !(self.lambda_coeff > 0.0) {
                return fail("lambda_coeff must be positive".into());
            }
            if self.calibration_probes < super::target::MIN_CALIBRATION_PROBES {
                return fail(format!(
                    "calibration_probes must be at least {}",
                    super::target::MIN_CALIBRATION_PROBES
                ));
            }
        }
        Ok(())
    }

    /// The resolved configuration as `key = value` lines, in the format
    /// accepted by [`ExperimentConfig::apply_text`].
    pub fn to_text(&self) -> String {
        let list = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment.name());
        let _ = writeln!(s, "d = {}", self.d);
        let _ = writeln!(s, "kernel = {}", self.kernel.name());
        let _ = writeln!(s, "sigma = {}", self.sigma.map_or("median".into(), |v| format!("{v:?}")));
        let _ = writeln!(s, "samplers = {}", list(self.samplers.iter().map(|x| x.name().to_string()).collect()));
        let _ = writeln!(s, "m_grid = {}", list(self.m_grid.iter().map(|m| m.to_string()).collect()));
        let _ = writeln!(s, "n_pairs = {}", self.pairs());
        let _ = writeln!(s, "n_train = {}", self.n_train);
        let _ = writeln!(s, "n_test = {}", self.n_test);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "r = {:?}", self.r);
        let _ = writeln!(s, "lambda_coeff = {:?}", self.lambda_coeff);
        let _ = writeln!(s, "include_exact = {}", self.include_exact);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "bandwidth_probes = {}", self.bandwidth_probes);
        let _ = writeln!(s, "calibration_probes = {}", self.calibration_probes);
        let _ = writeln!(s, "record_timing = {}", self.record_timing);
        s
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_depend_on_experiment() {
        let det = ExperimentConfig::new(ExperimentKind::ApproxDet);
        assert_eq!(det.pairs(), 10_000);
        let avg = ExperimentConfig::new(ExperimentKind::ApproxAvg);
        assert_eq!(avg.pairs(), 1_000);
        assert_eq!(avg.m_grid.first(), Some(&16));
        assert_eq!(avg.m_grid.last(), Some(&4096));
        let krr = ExperimentConfig::new(ExperimentKind::KrrBench);
        assert_eq!(krr.trials, 50);
        assert!(krr.validate().is_ok());
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ApproxSupAvg);
        cfg.apply_text("# a comment\nd = 5\nsamplers = mc, sobol-owen\nm_grid = 16,64\nsigma = 0.75\nseed=9\n")
            .unwrap();
        assert_eq!(cfg.d, 5);
        assert_eq!(cfg.samplers, vec![Sampler::Mc, Sampler::SobolOwen]);
        assert_eq!(cfg.m_grid, vec![16, 64]);
        assert_eq!(cfg.sigma, Some(0.75));
        assert_eq!(cfg.master_seed, 9);
        let mut back = ExperimentConfig::new(ExperimentKind::KrrBench);
        back.apply_text(&cfg.to_text()).unwrap();
        cfg.n_pairs = Some(cfg.pairs());
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ApproxAvg);
        cfg.m_grid = vec![16, 48];
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.m_grid = vec![64, 32];
        assert!(cfg.validate().is_err());
        cfg.m_grid = vec![32, 32];
        assert!(cfg.validate().is_err());
        cfg.m_grid = vec![32];
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut krr = ExperimentConfig::new(ExperimentKind::KrrBench);
        krr.r = 0.75;
        assert!(krr.validate().is_err());
    }

    #[test]
    fn unknown_keys_and_values() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ApproxAvg);
        assert!(cfg.set("colour", "blue").is_err());
        assert!(cfg.set("d", "two").is_err());
        assert!(cfg.set("samplers", "mc,nope").is_err());
        assert!(cfg.apply_text("d 3").is_err());
    }
}
