//! The `hsrecon` command line.
//!
//! Every subcommand reads its inputs from files, runs one pipeline stage and
//! writes its outputs together with a [`RunManifest`]. Exit codes: 0 on
//! success, 1 for file and format errors, 2 for invalid flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsrecon_core::{
    estimate_noise_variances, evaluate, forward_capture, generate_flat_top_bank,
    mean_variance, normalize_capture, poisson_corrupt, reconstruct_wiener_image, synthetic_scene,
    CsrParams, FilterBank, HyperCube, IntensityLevel, MultiCube, NoiseCovariance, SceneSpec,
    SpectralGrid, DEFAULT_ALPHA,
};

use crate::io::{self, Cube, FormatError};
use crate::manifest::{float_value, manifest_path, RunManifest};
use crate::parallel::{default_threads, reconstruct_csr_parallel};

#[derive(Debug, Parser)]
#[command(name = "hsrecon", version, about = "Hyperspectral reconstruction from multispectral captures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a bank of overlapping flat-top filters as CSV.
    GenFilters(GenFiltersArgs),
    /// Capture a scene through a filter bank.
    Simulate(SimulateArgs),
    /// Add Poisson shot noise to a multispectral cube.
    AddNoise(AddNoiseArgs),
    /// Print per-channel noise variance estimates.
    EstimateNoise(EstimateNoiseArgs),
    /// Reconstruct a hyperspectral cube from a multispectral one.
    Reconstruct(ReconstructArgs),
    /// Compare a reconstruction against its reference.
    Evaluate(EvaluateArgs),
    /// Render one band as a 16-bit PGM.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GenFiltersArgs {
    #[arg(long, default_value_t = 49)]
    pub bands: usize,
    #[arg(long, default_value_t = 440.0, allow_negative_numbers = true)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 920.0, allow_negative_numbers = true)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 9)]
    pub channels: usize,
    /// Super-Gaussian order; larger is flatter.
    #[arg(long, default_value_t = 3.0)]
    pub sharpness: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Where the scene of `simulate` comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SceneSource {
    Synthetic(SceneSpec),
    File(PathBuf),
}

impl FromStr for SceneSource {
    type Err = String;

    /// `synthetic:<H>x<W>[:<regions>[:<seed>]]`, or a path to a hyperspectral
    /// SCUB file.
    fn from_str(s: &str) -> Result<Self, String> {
        let Some(rest) = s.strip_prefix("synthetic:") else {
            return Ok(SceneSource::File(PathBuf::from(s)));
        };
        let usage = || format!("expected synthetic:<H>x<W>[:<regions>[:<seed>]], got {s:?}");
        let mut parts = rest.split(':');
        let size = parts.next().ok_or_else(usage)?;
        let (h, w) = size.split_once('x').ok_or_else(usage)?;
        let mut spec = SceneSpec::new(h.parse().map_err(|_| usage())?, w.parse().map_err(|_| usage())?);
        if let Some(regions) = parts.next() {
            spec.regions = regions.parse().map_err(|_| usage())?;
        }
        if let Some(seed) = parts.next() {
            spec.seed = seed.parse().map_err(|_| usage())?;
        }
        if parts.next().is_some() || spec.height == 0 || spec.width == 0 || spec.regions == 0 {
            return Err(usage());
        }
        Ok(SceneSource::Synthetic(spec))
    }
}

impl fmt::Display for SceneSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneSource::Synthetic(s) => {
                write!(f, "synthetic:{}x{}:{}:{}", s.height, s.width, s.regions, s.seed)
            }
            SceneSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `synthetic:<H>x<W>[:<regions>[:<seed>]]` or a hyperspectral SCUB file.
    #[arg(long)]
    pub scene: SceneSource,
    #[arg(long)]
    pub filters: PathBuf,
    /// The peak-normalized multispectral capture. The reference scene and the
    /// matching rescaled filter bank are written next to it as
    /// `<stem>.reference.scub` and `<stem>.filters.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct AddNoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Intensity level `l`: samples become `Poisson(l·v) / l`.
    #[arg(long, value_parser = positive_f64)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateNoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Wiener,
    Csr,
}

/// Noise variances for reconstruction: estimated from the input, or given.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Auto,
    /// One value for all channels, or one per channel.
    Variances(Vec<f64>),
}

impl FromStr for NoiseSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(NoiseSpec::Auto);
        }
        s.split(',')
            .map(|v| match v.trim().parse::<f64>() {
                Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
                _ => Err(format!("expected \"auto\" or comma-separated variances >= 0, got {s:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(NoiseSpec::Variances)
    }
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub filters: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Csr)]
    pub method: Method,
    /// `auto` or comma-separated per-channel variances.
    #[arg(long, default_value = "auto")]
    pub noise: NoiseSpec,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub block: u32,
    #[arg(long, default_value_t = 33, value_parser = clap::value_parser!(u32).range(1..))]
    pub window: u32,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub step: u32,
    #[arg(long, default_value_t = 6.0, value_parser = positive_f64)]
    pub tau_c: f64,
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u32).range(1..))]
    pub mu_c: u32,
    #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = positive_f64)]
    pub alpha: f64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub estimate: PathBuf,
    /// key=value report; also printed to stdout.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub band: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// A failed command and the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid flags or flag combinations.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Format(_) | CliError::Failed(_) => 1,
        }
    }
}

impl From<hsrecon_core::Error> for CliError {
    fn from(e: hsrecon_core::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenFilters(a) => gen_filters(&a),
        Command::Simulate(a) => simulate(&a),
        Command::AddNoise(a) => add_noise(&a),
        Command::EstimateNoise(a) => estimate_noise(&a),
        Command::Reconstruct(a) => reconstruct(&a),
        Command::Evaluate(a) => evaluate_cmd(&a),
        Command::Render(a) => render(&a),
    }
}

fn write_manifest(manifest: &mut RunManifest, started: Instant, output: &Path) -> Result<(), CliError> {
    manifest.finish(started.elapsed());
    let path = manifest_path(output);
    std::fs::write(&path, manifest.to_json())
        .map_err(|source| FormatError::Io { path, source })?;
    Ok(())
}

fn read_multi(path: &Path) -> Result<MultiCube, CliError> {
    io::read_cube(path)?.into_multi().ok_or_else(|| {
        CliError::Failed(format!("{}: expected a multispectral cube", path.display()))
    })
}

fn read_hyper(path: &Path) -> Result<HyperCube, CliError> {
    io::read_cube(path)?.into_hyper().ok_or_else(|| {
        CliError::Failed(format!("{}: expected a hyperspectral cube", path.display()))
    })
}

fn gen_filters(a: &GenFiltersArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let grid = SpectralGrid::new(a.lambda_min, a.lambda_max, a.bands).map_err(usage)?;
    let bank = generate_flat_top_bank(grid, a.channels, a.sharpness).map_err(usage)?;
    io::write_filter_csv(&a.out, &bank)?;

    let mut m = RunManifest::new("gen-filters");
    m.param("bands", a.bands)
        .param("lambda_min", a.lambda_min)
        .param("lambda_max", a.lambda_max)
        .param("channels", a.channels)
        .param("sharpness", a.sharpness);
    m.outputs.push(a.out.clone());
    write_manifest(&mut m, started, &a.out)
}

/// `dir/<stem>.<suffix>` for an output `dir/<stem>.<ext>`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let bank = io::read_filter_csv(&a.filters)?;
    let scene = match &a.scene {
        SceneSource::Synthetic(spec) => synthetic_scene(spec, *bank.grid())?,
        SceneSource::File(path) => read_hyper(path)?.normalized_to_peak(),
    };
    let raw = forward_capture(&scene, &bank)?;
    let normalized = normalize_capture(&raw, &bank)?;

    let reference = sibling(&a.out, "reference.scub");
    let filters = sibling(&a.out, "filters.csv");
    io::write_cube(&a.out, &normalized.capture.into())?;
    io::write_cube(&reference, &scene.into())?;
    io::write_filter_csv(&filters, &normalized.bank)?;

    let mut m = RunManifest::new("simulate");
    m.param("scene", a.scene.to_string())
        .result("capture_scale", normalized.scale);
    if let SceneSource::File(path) = &a.scene {
        m.inputs.push(path.clone());
    }
    m.inputs.push(a.filters.clone());
    m.outputs.extend([a.out.clone(), reference, filters]);
    write_manifest(&mut m, started, &a.out)
}

fn add_noise(a: &AddNoiseArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let clean = read_multi(&a.input)?;
    let level = IntensityLevel::new(a.level).map_err(usage)?;
    let noisy = poisson_corrupt(&clean, level, a.seed)?;
    io::write_cube(&a.out, &noisy.into())?;

    let mut m = RunManifest::new("add-noise");
    m.param("level", a.level);
    m.seed = Some(a.seed);
    m.inputs.push(a.input.clone());
    m.outputs.push(a.out.clone());
    write_manifest(&mut m, started, &a.out)
}

fn format_list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn estimate_noise(a: &EstimateNoiseArgs) -> Result<(), CliError> {
    let noisy = read_multi(&a.input)?;
    let cov = estimate_noise_variances(&noisy).map_err(usage)?;
    println!("channel_variances={}", format_list(cov.variances()));
    println!("mean_variance={}", mean_variance(&cov));
    Ok(())
}

fn resolve_noise(spec: &NoiseSpec, noisy: &MultiCube) -> Result<NoiseCovariance, CliError> {
    let m = noisy.n_channels();
    match spec {
        NoiseSpec::Auto => Ok(estimate_noise_variances(noisy)?),
        NoiseSpec::Variances(v) if v.len() == 1 => NoiseCovariance::uniform(m, v[0]).map_err(usage),
        NoiseSpec::Variances(v) if v.len() == m => NoiseCovariance::new(v.clone()).map_err(usage),
        NoiseSpec::Variances(v) => Err(CliError::Usage(format!(
            "--noise lists {} variances for {m} channels",
            v.len()
        ))),
    }
}

fn reconstruct(a: &ReconstructArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let noisy = read_multi(&a.input)?;
    let bank: FilterBank = io::read_filter_csv(&a.filters)?;
    if noisy.n_channels() != bank.n_channels() {
        return Err(CliError::Failed(format!(
            "{} has {} channels but {} describes {} filters",
            a.input.display(),
            noisy.n_channels(),
            a.filters.display(),
            bank.n_channels()
        )));
    }
    let cov = resolve_noise(&a.noise, &noisy)?;
    let params = CsrParams {
        block_size: a.block as usize,
        window: a.window as usize,
        step: a.step as usize,
        tau_c: a.tau_c,
        mu_c: a.mu_c as usize,
        alpha: a.alpha,
    };
    params.validate().map_err(usage)?;
    let threads = a.threads.map_or_else(default_threads, |t| t as usize);

    let estimate = match a.method {
        Method::Wiener => reconstruct_wiener_image(&noisy, &bank, &cov, a.alpha)?,
        Method::Csr => reconstruct_csr_parallel(&noisy, &bank, &cov, &params, threads)?,
    };
    io::write_cube(&a.out, &estimate.into())?;

    let mut m = RunManifest::new("reconstruct");
    m.param("method", format!("{:?}", a.method).to_lowercase())
        .param("noise", match &a.noise {
            NoiseSpec::Auto => "auto".to_owned(),
            NoiseSpec::Variances(v) => format_list(v),
        })
        .param("block", a.block)
        .param("window", a.window)
        .param("step", a.step)
        .param("tau_c", a.tau_c)
        .param("mu_c", a.mu_c)
        .param("alpha", a.alpha)
        .result("noise_variances", cov.variances().to_vec());
    m.threads = Some(threads);
    m.inputs.extend([a.input.clone(), a.filters.clone()]);
    m.outputs.push(a.out.clone());
    write_manifest(&mut m, started, &a.out)
}

/// Formats a dB value, with `inf` for a perfect match.
pub fn format_db(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_owned()
    } else {
        v.to_string()
    }
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let reference = read_hyper(&a.reference)?;
    let estimate = read_hyper(&a.estimate)?;
    let report = evaluate(&reference, &estimate)?;
    let text = format!(
        "mean_theta_rad={}\nmean_theta_deg={}\ntheta_std_rad={}\npsnr_db={}\nn_evaluated={}\nn_zero_reference={}\n",
        report.mean_theta,
        report.mean_theta.to_degrees(),
        report.theta_std,
        format_db(report.psnr),
        report.n_evaluated,
        report.n_zero_reference,
    );
    std::fs::write(&a.report, &text).map_err(|source| FormatError::Io {
        path: a.report.clone(),
        source,
    })?;
    print!("{text}");

    let mut m = RunManifest::new("evaluate");
    m.result("mean_theta_rad", report.mean_theta)
        .result("mean_theta_deg", report.mean_theta.to_degrees())
        .result("theta_std_rad", report.theta_std)
        .result("psnr_db", float_value(report.psnr))
        .result("n_evaluated", report.n_evaluated)
        .result("n_zero_reference", report.n_zero_reference);
    m.inputs.extend([a.reference.clone(), a.estimate.clone()]);
    m.outputs.push(a.report.clone());
    write_manifest(&mut m, started, &a.report)
}

fn render(a: &RenderArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let cube: Cube = io::read_cube(&a.input)?;
    if a.band >= cube.bands() {
        return Err(CliError::Usage(format!(
            "--band {} out of range: {} has {} bands",
            a.band,
            a.input.display(),
            cube.bands()
        )));
    }
    io::render_channel_pgm(&cube, a.band, &a.out)?;

    let mut m = RunManifest::new("render");
    m.param("band", a.band);
    m.inputs.push(a.input.clone());
    m.outputs.push(a.out.clone());
    write_manifest(&mut m, started, &a.out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_specs() {
        assert_eq!(
            "synthetic:64x32".parse::<SceneSource>().unwrap(),
            SceneSource::Synthetic(SceneSpec::new(64, 32))
        );
        let full: SceneSource = "synthetic:8x9:3:7".parse().unwrap();
        assert_eq!(full.to_string(), "synthetic:8x9:3:7");
        for bad in ["synthetic:64", "synthetic:0x4", "synthetic:4x4:0", "synthetic:4x4:2:1:0", "synthetic:ax4"] {
            assert!(bad.parse::<SceneSource>().is_err(), "{bad}");
        }
        assert_eq!("cube.scub".parse::<SceneSource>().unwrap(), SceneSource::File("cube.scub".into()));
    }

    #[test]
    fn noise_specs() {
        assert_eq!("auto".parse::<NoiseSpec>().unwrap(), NoiseSpec::Auto);
        assert_eq!("0.01".parse::<NoiseSpec>().unwrap(), NoiseSpec::Variances(vec![0.01]));
        assert_eq!("0.01, 0.02".parse::<NoiseSpec>().unwrap(), NoiseSpec::Variances(vec![0.01, 0.02]));
        assert!("-1".parse::<NoiseSpec>().is_err());
        assert!("0.1,x".parse::<NoiseSpec>().is_err());
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("a/cap.scub"), "filters.csv"), Path::new("a/cap.filters.csv"));
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
