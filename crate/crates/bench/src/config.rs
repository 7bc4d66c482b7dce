//! Experiment configuration from command-line flags and an optional
//! `key = value` file. Flags override file entries.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use trunc_regress::gibbs::{default_lambda, GibbsSpec};
use trunc_regress::synth::{Design, NoiseModel, DEFAULT_Q, DEFAULT_SIGMA, MIXTURE_RHO_01};
use trunc_regress::MinMaxConfig;

pub const DEFAULT_REPETITIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorArg {
    Inc,
    Hcc,
    Ts,
}

impl From<GeneratorArg> for Design {
    fn from(g: GeneratorArg) -> Self {
        match g {
            GeneratorArg::Inc => Design::Inc,
            GeneratorArg::Hcc => Design::Hcc,
            GeneratorArg::Ts => Design::Ts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    Heavy,
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Estimator {
    Ols,
    Ridge,
    Minmax,
    Gibbs,
}

/// Bounds of the Gibbs prior box, `LO:HI` on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxBounds {
    pub lo: f64,
    pub hi: f64,
}

fn parse_box(s: &str) -> Result<BoxBounds, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("need finite LO < HI, got `{s}`"));
    }
    Ok(BoxBounds { lo, hi })
}

/// Raw options, every field optional so that file values can fill the gaps.
#[derive(Debug, Clone, Default, Parser)]
#[command(
    name = "trunc-bench",
    version,
    about = "Monte Carlo comparison of least squares and truncated min-max regression"
)]
pub struct Cli {
    /// `key = value` file; keys are the long flag names without dashes.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long = "gen", value_enum)]
    pub generator: Option<GeneratorArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    /// Tail exponent of the heavy-tailed noise.
    #[arg(long)]
    pub q: Option<f64>,
    /// Weight of the Dirac component of the mixture noise.
    #[arg(long)]
    pub p: Option<f64>,
    /// Share of the mixture variance carried by its Gaussian component.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated subset of ols,ridge,minmax,gibbs.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub estimators: Option<Vec<Estimator>>,
    /// Ridge parameter shared by the ridge and min-max estimators.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "gibbs-box", value_name = "LO:HI", value_parser = parse_box, allow_hyphen_values = true)]
    pub gibbs_box: Option<BoxBounds>,
    #[arg(long = "gibbs-grid")]
    pub gibbs_grid: Option<usize>,
    /// Gibbs temperature; defaults to 0.32/(3σ)².
    #[arg(long = "gibbs-lambda")]
    pub gibbs_lambda: Option<f64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Repetition whose points (and curves, for ts) are written under plots/.
    #[arg(long = "plot-rep")]
    pub plot_rep: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error(transparent)]
    Cli(#[from] clap::Error),
    #[error("cannot read config file {path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("missing required option --{0}")]
    Missing(&'static str),
}

impl ConfigError {
    fn value(key: &str, message: impl ToString) -> Self {
        Self::InvalidValue {
            key: key.to_string(),
            message: message.to_string(),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e: T::Err| ConfigError::value(key, e))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, ConfigError> {
    T::from_str(v, true).map_err(|e| ConfigError::value(key, e))
}

impl Cli {
    fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "gen" => self.generator = Some(parse_enum(key, v)?),
            "n" => self.n = Some(parse_value(key, v)?),
            "d" => self.d = Some(parse_value(key, v)?),
            "noise" => self.noise = Some(parse_enum(key, v)?),
            "q" => self.q = Some(parse_value(key, v)?),
            "p" => self.p = Some(parse_value(key, v)?),
            "rho" => self.rho = Some(parse_value(key, v)?),
            "sigma" => self.sigma = Some(parse_value(key, v)?),
            "reps" => self.reps = Some(parse_value(key, v)?),
            "seed" => self.seed = Some(parse_value(key, v)?),
            "estimators" => {
                self.estimators = Some(
                    v.split(',')
                        .map(|s| parse_enum(key, s.trim()))
                        .collect::<Result<_, _>>()?,
                )
            }
            "lambda" => self.lambda = Some(parse_value(key, v)?),
            "gibbs-box" => {
                self.gibbs_box = Some(parse_box(v).map_err(|e| ConfigError::value(key, e))?)
            }
            "gibbs-grid" => self.gibbs_grid = Some(parse_value(key, v)?),
            "gibbs-lambda" => self.gibbs_lambda = Some(parse_value(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "plot-rep" => self.plot_rep = Some(parse_value(key, v)?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    /// Underscores in keys are accepted in place of dashes.
    pub fn from_file_contents(contents: &str, path: &std::path::Path) -> Result<Self, ConfigError> {
        let mut cli = Cli::default();
        for (no, line) in contents.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: path.to_path_buf(),
                line: no + 1,
            })?;
            cli.set(&k.trim().replace('_', "-"), v.trim())?;
        }
        Ok(cli)
    }

    /// Fills every unset field of `self` from `base`.
    pub fn or(self, base: Cli) -> Cli {
        Cli {
            config: self.config.or(base.config),
            generator: self.generator.or(base.generator),
            n: self.n.or(base.n),
            d: self.d.or(base.d),
            noise: self.noise.or(base.noise),
            q: self.q.or(base.q),
            p: self.p.or(base.p),
            rho: self.rho.or(base.rho),
            sigma: self.sigma.or(base.sigma),
            reps: self.reps.or(base.reps),
            seed: self.seed.or(base.seed),
            estimators: self.estimators.or(base.estimators),
            lambda: self.lambda.or(base.lambda),
            gibbs_box: self.gibbs_box.or(base.gibbs_box),
            gibbs_grid: self.gibbs_grid.or(base.gibbs_grid),
            gibbs_lambda: self.gibbs_lambda.or(base.gibbs_lambda),
            out: self.out.or(base.out),
            plot_rep: self.plot_rep.or(base.plot_rep),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub design: Design,
    pub n: usize,
    pub d: usize,
    pub noise: NoiseModel,
    pub sigma: f64,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Sorted and deduplicated. Least squares is always fitted as the
    /// baseline, whether listed or not.
    pub estimators: Vec<Estimator>,
    pub minmax: MinMaxConfig,
    pub gibbs: Option<GibbsSpec>,
    pub output_dir: PathBuf,
    pub plot_rep: Option<usize>,
}

impl ExperimentConfig {
    pub fn runs(&self, e: Estimator) -> bool {
        self.estimators.contains(&e)
    }

    /// Row label in the style `INC(n=200,d=1)`.
    pub fn label(&self) -> String {
        format!("{}(n={},d={})", self.design.label(), self.n, self.d)
    }

    pub fn lambda(&self) -> f64 {
        self.minmax.lambda_ridge
    }
}

/// Parses command-line arguments (including the program name), merging in
/// the `--config` file when given.
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let merged = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| ConfigError::File {
                path: path.clone(),
                source,
            })?;
            cli.clone().or(Cli::from_file_contents(&text, path)?)
        }
        None => cli,
    };
    validate(merged)
}

/// Turns merged raw options into a checked configuration.
pub fn validate(cli: Cli) -> Result<ExperimentConfig, ConfigError> {
    let design: Design = cli.generator.ok_or(ConfigError::Missing("gen"))?.into();
    let n = cli.n.ok_or(ConfigError::Missing("n"))?;
    let d = cli.d.ok_or(ConfigError::Missing("d"))?;
    let noise_kind = cli.noise.ok_or(ConfigError::Missing("noise"))?;
    let master_seed = cli.seed.ok_or(ConfigError::Missing("seed"))?;
    let output_dir = cli.out.ok_or(ConfigError::Missing("out"))?;

    if n == 0 {
        return Err(ConfigError::value("n", "must be at least 1"));
    }
    if d == 0 {
        return Err(ConfigError::value("d", "must be at least 1"));
    }
    if design == Design::Ts && d % 2 != 0 {
        return Err(ConfigError::value(
            "d",
            "the ts generator needs an even dimension",
        ));
    }
    let repetitions = cli.reps.unwrap_or(DEFAULT_REPETITIONS);
    if repetitions == 0 {
        return Err(ConfigError::value("reps", "must be at least 1"));
    }
    let sigma = cli.sigma.unwrap_or(DEFAULT_SIGMA);
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(ConfigError::value(
            "sigma",
            "must be nonnegative and finite",
        ));
    }

    let noise = match noise_kind {
        NoiseArg::Gaussian => NoiseModel::Gaussian,
        NoiseArg::Heavy => NoiseModel::heavy_tailed(cli.q.unwrap_or(DEFAULT_Q))
            .map_err(|e| ConfigError::value("q", e))?,
        NoiseArg::Mixture => {
            let p = cli.p.unwrap_or(MIXTURE_RHO_01.0);
            let rho = cli.rho.unwrap_or(MIXTURE_RHO_01.1);
            NoiseModel::mixture(p, rho).map_err(|e| ConfigError::value("p/rho", e))?
        }
    };

    let mut estimators = cli
        .estimators
        .unwrap_or_else(|| vec![Estimator::Ols, Estimator::Minmax]);
    estimators.push(Estimator::Ols);
    estimators.sort();
    estimators.dedup();

    let minmax = MinMaxConfig {
        lambda_ridge: cli.lambda.unwrap_or(0.0),
        ..MinMaxConfig::default()
    };
    minmax
        .validate()
        .map_err(|e| ConfigError::value("lambda", e))?;

    let gibbs = if estimators.contains(&Estimator::Gibbs) {
        let b = cli.gibbs_box.ok_or(ConfigError::Missing("gibbs-box"))?;
        let lambda = cli
            .gibbs_lambda
            .unwrap_or_else(|| default_lambda(sigma, sigma));
        let spec = match cli.gibbs_grid {
            Some(g) => GibbsSpec::new(vec![(b.lo, b.hi); d], g, lambda),
            None => GibbsSpec::cube(d, b.lo, b.hi, lambda),
        };
        Some(spec.map_err(|e| ConfigError::value("gibbs", e))?)
    } else {
        None
    };

    if let Some(k) = cli.plot_rep {
        if k >= repetitions {
            return Err(ConfigError::value(
                "plot-rep",
                format!("must be below reps = {repetitions}"),
            ));
        }
    }

    Ok(ExperimentConfig {
        design,
        n,
        d,
        noise,
        sigma,
        repetitions,
        master_seed,
        estimators,
        minmax,
        gibbs,
        output_dir,
        plot_rep: cli.plot_rep,
    })
}
