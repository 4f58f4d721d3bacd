//! The `wtpc` command line: one subcommand per pipeline step, each a pure
//! function of its input artifacts and flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use wtpc_core::curves::{fit, ModelClass, ModelSpec};
use wtpc_core::dynamic::{DynamicModel, Exogenous};
use wtpc_core::environmental::{fit_environmental, EnvMode};
use wtpc_core::estimation::binned_means;
use wtpc_core::evaluation::{horizon_report, DEFAULT_DELTA};
use wtpc_core::residuals::{residuals, ResidualProfile, DEFAULT_ALPHA, DEFAULT_MIN_BIN_COUNT};
use wtpc_core::scada::{clean, DEFAULT_IQR_K};
use wtpc_core::selection::select_order;
use wtpc_core::synthetic::{generate, GeneratorConfig};

use crate::artifacts::{
    read_enhanced, read_enhanced_artifact, read_json, read_model, write_json, DynamicArtifact, EnhancedArtifact, ModelArtifact,
    ProfileArtifact, ReportArtifact, TruthArtifact,
};
use crate::config::{load_config, parse_grid, parse_horizons};
use crate::error::{AppError, AppResult, EXIT_CODES};
use crate::io::{read_exogenous, read_records, read_samples, write_records, write_samples, Required, Schema};
use crate::report::{emit_report, write_binned_stats, write_forecasts, write_histogram, write_profile, write_sweep};

fn exit_code_help() -> String {
    let mut s = String::from("Exit codes:\n");
    for (code, what) in EXIT_CODES {
        s.push_str(&format!("  {code}  {what}\n"));
    }
    s.push_str("\nOn failure a JSON object {error, message, exit_code} is written to stderr.");
    s
}

#[derive(Debug, Parser)]
#[command(name = "wtpc", version, about = "Wind turbine power-curve modelling and forecasting from SCADA data")]
#[command(after_help = exit_code_help())]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the cleaning rules; writes clean.csv and cleaning_report.json.
    Clean(PipelineArgs),
    /// Fit one static curve; writes model.json and binned_stats.csv.
    Fit(PipelineArgs),
    /// Sweep an order grid by BIC; writes sweep.csv, model.json and selection.json.
    Select(PipelineArgs),
    /// Fit angle and temperature coefficients on a base model; writes enhanced.json.
    Enhance(PipelineArgs),
    /// Residual scale profile and Gaussian band; writes profile.json, profile.csv and residual_hist.csv.
    Residuals(PipelineArgs),
    /// Fit the ARMA layer; writes dynamic_<q1>_<q2>.json.
    Arma(PipelineArgs),
    /// Forecast from a history and known future inputs; writes forecast.csv.
    Forecast(PipelineArgs),
    /// Horizon MSE sweep and coverage audit; writes horizons.csv, coverage.csv, summary.json.
    Evaluate(PipelineArgs),
    /// Generate a synthetic corpus; writes training.csv, validation.csv and truth.json.
    Simulate(PipelineArgs),
}

/// Flags shared by every subcommand. Any flag may also be given as
/// `key = value` in the file passed to `--config`; flags take precedence.
#[derive(Debug, Clone, Default, Args)]
pub struct PipelineArgs {
    /// Flat key-value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input data file (delimited text with a header row).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Column mapping overrides, e.g. `wind=ws,power=p_kw`.
    #[arg(long)]
    pub schema: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Field delimiter (default `,`).
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Model class: logistic5pl, mstukel, piecewise, polynomial, spline.
    #[arg(long)]
    pub class: Option<String>,
    /// Model order for `fit`.
    #[arg(long)]
    pub order: Option<usize>,
    /// Order grid for `select`, e.g. `4..30`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Environmental mode: both, angle or temp.
    #[arg(long)]
    pub mode: Option<String>,
    /// Significance level of the Gaussian band.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bins with fewer samples get an interpolated scale.
    #[arg(long)]
    pub min_count: Option<usize>,
    /// Whisker multiplier of the outlier rule.
    #[arg(long)]
    pub iqr_k: Option<f64>,
    /// Static model artifact.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Enhanced model artifact.
    #[arg(long)]
    pub enhanced: Option<PathBuf>,
    /// Residual profile artifact.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Dynamic model artifacts, comma separated.
    #[arg(long)]
    pub dynamic: Option<String>,
    /// Future exogenous inputs for `forecast`.
    #[arg(long)]
    pub future: Option<PathBuf>,
    /// Autoregressive order.
    #[arg(long)]
    pub q1: Option<usize>,
    /// Moving-average order.
    #[arg(long)]
    pub q2: Option<usize>,
    /// Horizons in minutes, comma separated.
    #[arg(long)]
    pub horizons: Option<String>,
    /// Confidence level of prediction bands.
    #[arg(long)]
    pub level: Option<f64>,
    /// Sampling step in minutes.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Generator seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Records per simulated season.
    #[arg(long)]
    pub n: Option<usize>,
}

macro_rules! fill {
    ($args:ident, $cfg:ident, $($field:ident),* $(,)?) => {
        $(
            if $args.$field.is_none() {
                if let Some(v) = $cfg.get(stringify!($field)) {
                    $args.$field = Some(v.parse().map_err(|e| {
                        AppError::Config(format!("{}: cannot parse {v:?}: {e}", stringify!($field)))
                    })?);
                }
            }
        )*
    };
}

impl PipelineArgs {
    /// Fills unset flags from the config file, if one was given.
    pub fn resolve(mut self) -> AppResult<Self> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        if !path.exists() {
            return Err(AppError::MissingArtifact(path));
        }
        let cfg: BTreeMap<String, String> = load_config(&path)?;
        fill!(
            self, cfg, data, schema, out, delimiter, class, order, grid, mode, alpha, min_count, iqr_k, model,
            enhanced, profile, dynamic, future, q1, q2, horizons, level, delta, seed, n,
        );
        Ok(self)
    }

    fn need<'a, T>(value: &'a Option<T>, flag: &str) -> AppResult<&'a T> {
        value.as_ref().ok_or_else(|| AppError::Usage(format!("--{flag} is required")))
    }

    fn input(value: &Option<PathBuf>, flag: &str) -> AppResult<PathBuf> {
        let p = Self::need(value, flag)?.clone();
        if !p.exists() {
            return Err(AppError::MissingArtifact(p));
        }
        Ok(p)
    }

    fn data(&self) -> AppResult<PathBuf> {
        Self::input(&self.data, "data")
    }

    fn out(&self) -> AppResult<PathBuf> {
        let dir = Self::need(&self.out, "out")?.clone();
        std::fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
        Ok(dir)
    }

    fn schema(&self) -> AppResult<Schema> {
        self.schema.as_deref().map(Schema::parse).unwrap_or_else(|| Ok(Schema::default()))
    }

    fn delimiter(&self) -> AppResult<u8> {
        let c = self.delimiter.unwrap_or(',');
        u8::try_from(c).ok().filter(u8::is_ascii).ok_or_else(|| AppError::Usage(format!("delimiter {c:?} is not ASCII")))
    }

    fn samples(&self) -> AppResult<Vec<wtpc_core::scada::Sample>> {
        read_samples(&self.data()?, &self.schema()?, self.delimiter()?)
    }

    fn class(&self) -> AppResult<ModelClass> {
        let name = Self::need(&self.class, "class")?;
        ModelClass::parse(name).ok_or_else(|| AppError::Usage(format!("unknown model class {name:?}")))
    }

    fn level(&self) -> AppResult<f64> {
        let level = self.level.unwrap_or(0.95);
        if level > 0.0 && level < 1.0 {
            Ok(level)
        } else {
            Err(AppError::Usage(format!("--level must be in (0, 1), got {level}")))
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> AppResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(AppError::Usage(e.to_string().trim_end().to_string())),
    };
    dispatch(cli.command)
}

pub fn dispatch(command: Command) -> AppResult<()> {
    match command {
        Command::Clean(a) => cmd_clean(&a.resolve()?),
        Command::Fit(a) => cmd_fit(&a.resolve()?),
        Command::Select(a) => cmd_select(&a.resolve()?),
        Command::Enhance(a) => cmd_enhance(&a.resolve()?),
        Command::Residuals(a) => cmd_residuals(&a.resolve()?),
        Command::Arma(a) => cmd_arma(&a.resolve()?),
        Command::Forecast(a) => cmd_forecast(&a.resolve()?),
        Command::Evaluate(a) => cmd_evaluate(&a.resolve()?),
        Command::Simulate(a) => cmd_simulate(&a.resolve()?),
    }
}

fn cmd_clean(a: &PipelineArgs) -> AppResult<()> {
    let delimiter = a.delimiter()?;
    let records = read_records(&a.data()?, &a.schema()?, delimiter, Required::Full)?;
    let cleaned = clean(&records, a.iqr_k.unwrap_or(DEFAULT_IQR_K))?;
    let out = a.out()?;
    write_samples(&out.join("clean.csv"), cleaned.samples(), delimiter)?;
    write_json(&out.join("cleaning_report.json"), &ReportArtifact::from(cleaned.report()))
}

fn cmd_fit(a: &PipelineArgs) -> AppResult<()> {
    let class = a.class()?;
    let order = match (class.fixed_order(), a.order) {
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => return Err(AppError::Usage(format!("--order is required for {class}"))),
    };
    let samples = a.samples()?;
    let model = fit(&ModelSpec::new(class, order)?, &samples)?;
    let out = a.out()?;
    write_json(&out.join("model.json"), &ModelArtifact::from(&model))?;
    write_binned_stats(&out.join("binned_stats.csv"), &binned_means(&samples)?)
}

fn cmd_select(a: &PipelineArgs) -> AppResult<()> {
    #[derive(serde::Serialize)]
    struct Selection {
        class: String,
        chosen_order: usize,
        failures: Vec<(usize, String)>,
    }
    let class = a.class()?;
    let grid = match (&a.grid, class.fixed_order()) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(m)) => vec![m],
        (None, None) => return Err(AppError::Usage(format!("--grid is required for {class}"))),
    };
    let samples = a.samples()?;
    let result = select_order(class, &grid, &samples)?;
    let out = a.out()?;
    write_sweep(&out.join("sweep.csv"), &result)?;
    write_json(&out.join("model.json"), &ModelArtifact::from(&result.chosen_model))?;
    let selection = Selection {
        class: class.name().to_string(),
        chosen_order: result.chosen_order,
        failures: result.failures.iter().map(|(m, e)| (*m, e.to_string())).collect(),
    };
    write_json(&out.join("selection.json"), &selection)
}

fn cmd_enhance(a: &PipelineArgs) -> AppResult<()> {
    let model_path = PipelineArgs::input(&a.model, "model")?;
    let base = read_model(&model_path)?;
    let mode_name = a.mode.as_deref().unwrap_or("both");
    let mode = EnvMode::parse(mode_name).ok_or_else(|| AppError::Usage(format!("unknown mode {mode_name:?}")))?;
    let samples = a.samples()?;
    let fitted = fit_environmental(&base, &samples, mode)?;
    let out = a.out()?;
    write_json(&out.join("enhanced.json"), &EnhancedArtifact::from_fit(&fitted, &model_path.display().to_string()))
}

fn enhanced_input(a: &PipelineArgs) -> AppResult<(EnhancedArtifact, wtpc_core::environmental::EnhancedModel)> {
    let path = match (&a.enhanced, &a.model) {
        (Some(_), _) => PipelineArgs::input(&a.enhanced, "enhanced")?,
        (None, Some(_)) => PipelineArgs::input(&a.model, "model")?,
        (None, None) => return Err(AppError::Usage("--enhanced or --model is required".into())),
    };
    let art = read_enhanced_artifact(&path)?;
    let model = art.to_model(&path)?;
    Ok((art, model))
}

fn cmd_residuals(a: &PipelineArgs) -> AppResult<()> {
    let (_, model) = enhanced_input(a)?;
    let samples = a.samples()?;
    let alpha = a.alpha.unwrap_or(DEFAULT_ALPHA);
    let profile = ResidualProfile::build(&model, &samples, alpha, a.min_count.unwrap_or(DEFAULT_MIN_BIN_COUNT))?;
    let r = residuals(&model, &samples)?;
    let scaled: Vec<f64> = r
        .iter()
        .zip(&samples)
        .filter(|(_, s)| profile.in_band(s.wind) && profile.sigma_at(s.wind) > 0.0)
        .map(|(e, s)| e / profile.sigma_at(s.wind))
        .collect();
    let out = a.out()?;
    write_json(&out.join("profile.json"), &ProfileArtifact::from(&profile))?;
    write_profile(&out.join("profile.csv"), &profile)?;
    write_histogram(&out.join("residual_hist.csv"), &scaled)
}

fn cmd_arma(a: &PipelineArgs) -> AppResult<()> {
    let (enhanced_art, model) = enhanced_input(a)?;
    let profile_path = PipelineArgs::input(&a.profile, "profile")?;
    let profile = read_json::<ProfileArtifact>(&profile_path)?.to_profile(&profile_path)?;
    let (q1, q2) = (a.q1.unwrap_or(0), a.q2.unwrap_or(0));
    let samples = a.samples()?;
    let dynamic = DynamicModel::fit(model, profile, &samples, q1, q2)?;
    let out = a.out()?;
    write_json(&out.join(format!("dynamic_{q1}_{q2}.json")), &DynamicArtifact::new(&dynamic, enhanced_art))
}

fn read_dynamic(path: &Path) -> AppResult<DynamicModel> {
    read_json::<DynamicArtifact>(path)?.to_model(path)
}

fn cmd_forecast(a: &PipelineArgs) -> AppResult<()> {
    let dyn_spec = PipelineArgs::need(&a.dynamic, "dynamic")?;
    let dyn_path = PathBuf::from(dyn_spec.split(',').next().unwrap_or("").trim());
    if !dyn_path.exists() {
        return Err(AppError::MissingArtifact(dyn_path));
    }
    let model = read_dynamic(&dyn_path)?;
    let history = a.samples()?;
    let future_path = PipelineArgs::input(&a.future, "future")?;
    let future = read_exogenous(&future_path, &a.schema()?, a.delimiter()?)?;
    let level = a.level()?;
    let inputs: Vec<Exogenous> = future.iter().map(|(_, x)| *x).collect();
    let forecasts = model.predict_power(&history, &inputs, inputs.len())?;
    let rows: Vec<(i64, f64, f64, f64, f64)> = future
        .iter()
        .zip(&forecasts)
        .map(|((t, _), f)| {
            let (lo, hi) = f.interval(level);
            (*t, f.mean, f.variance, lo, hi)
        })
        .collect();
    write_forecasts(&a.out()?.join("forecast.csv"), &rows, level)
}

fn cmd_evaluate(a: &PipelineArgs) -> AppResult<()> {
    let static_model = read_model(&PipelineArgs::input(&a.model, "model")?)?;
    let enhanced = match &a.enhanced {
        Some(_) => read_enhanced(&PipelineArgs::input(&a.enhanced, "enhanced")?)?,
        None => wtpc_core::environmental::EnhancedModel::from_base(static_model.clone(), 0.0),
    };
    let mut dynamic = Vec::new();
    if let Some(list) = &a.dynamic {
        for p in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let path = PathBuf::from(p);
            if !path.exists() {
                return Err(AppError::MissingArtifact(path));
            }
            dynamic.push(read_dynamic(&path)?);
        }
    }
    let horizons = parse_horizons(a.horizons.as_deref().unwrap_or("10,50,100,1000,10000"))?;
    let delta = a.delta.unwrap_or(DEFAULT_DELTA);
    let level = a.level()?;
    let validation = a.samples()?;
    let refs: Vec<&DynamicModel> = dynamic.iter().collect();
    let report = horizon_report(&static_model, &enhanced, &refs, &validation, &horizons, delta, Some(level))?;
    let out = a.out()?;
    emit_report(&report, delta, &out)?;
    write_binned_stats(&out.join("binned_stats.csv"), &binned_means(&validation)?)
}

/// Writes `training.csv`, `validation.csv` and `truth.json` into `out`.
pub fn simulate(config: &GeneratorConfig, out: &Path) -> AppResult<()> {
    let corpus = generate(config)?;
    std::fs::create_dir_all(out).map_err(|e| AppError::io(out, e))?;
    write_records(&out.join("training.csv"), &corpus.training.records, b',')?;
    write_records(&out.join("validation.csv"), &corpus.validation.records, b',')?;
    write_json(&out.join("truth.json"), &TruthArtifact::from(&corpus.truth))
}

fn cmd_simulate(a: &PipelineArgs) -> AppResult<()> {
    let mut config = GeneratorConfig::default();
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(n) = a.n {
        config.n_samples = n;
    }
    simulate(&config, &a.out()?)
}
