//! Command-line front end.
//!
//! Exit codes: 0 analysis completed (tumor found or not), 2 usage or
//! parameter error, 3 pipeline or numerical failure, 4 I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Serialize, Serializer};

use crate::detect::{self, detect_pipeline, render_overlay, BoundingBox, Config, DetectionResult};
use crate::edges::{canny, gradient, threshold_edges, EdgeMap, Operator};
use crate::error::Error;
use crate::imaging::{encode_netpbm, load_netpbm, GrayImage, Image, RgbImage};
use crate::phantom::{generate, LesionSpec, PhantomSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PIPELINE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Operators accepted by `edges`, in `report` row order.
pub const OPERATORS: [&str; 4] = ["sobel", "prewitt", "roberts", "canny"];

#[derive(Debug, Parser)]
#[command(
    name = "brainsym",
    version,
    about = "Bilateral-symmetry tumor candidate detection on brain slices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect edges with one operator and write the edge map as P5
    Edges {
        input: PathBuf,
        #[arg(long, value_parser = OPERATORS)]
        operator: String,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Fit the symmetry axis and write a P6 overlay
    Axis {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the full pipeline, writing a JSON report and a P6 overlay
    Detect {
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Edge counts per operator as CSV
    Report {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Generate a synthetic phantom and its ground-truth sidecar
    Phantom {
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        spec: PhantomArgs,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Median window size, 0 to skip
    #[arg(long, default_value_t = 3)]
    median_window: usize,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    contrast: bool,
    #[arg(long, default_value_t = 0.10)]
    canny_low: f64,
    #[arg(long, default_value_t = 0.20)]
    canny_high: f64,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// Minimum row span as a fraction of image width
    #[arg(long, default_value_t = 0.10)]
    min_span: f64,
    #[arg(long, default_value_t = 2)]
    mirror_tol: usize,
    #[arg(long, default_value_t = 2)]
    closing_radius: usize,
    /// Minimum region area in pixels [default: 25 per 256x256 of image area]
    #[arg(long)]
    min_area: Option<usize>,
    /// Pixel spacing in mm
    #[arg(long, default_value_t = 1.0)]
    pixel_spacing: f64,
}

impl From<&ConfigArgs> for Config {
    fn from(a: &ConfigArgs) -> Self {
        Config {
            sigma: a.sigma,
            median_window: a.median_window,
            contrast: a.contrast,
            canny_low: a.canny_low,
            canny_high: a.canny_high,
            degree: a.degree,
            min_span: a.min_span,
            mirror_tol: a.mirror_tol,
            closing_radius: a.closing_radius,
            min_area: a.min_area,
            pixel_spacing: a.pixel_spacing,
        }
    }
}

#[derive(Debug, Args)]
struct PhantomArgs {
    #[arg(long, default_value_t = 257)]
    width: usize,
    #[arg(long, default_value_t = 257)]
    height: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100.0)]
    semi_axis_x: f64,
    #[arg(long, default_value_t = 120.0)]
    semi_axis_y: f64,
    #[arg(long, default_value_t = 10)]
    noise_amplitude: u32,
    /// Generate a lesion-free, exactly symmetric phantom
    #[arg(long)]
    no_lesion: bool,
    #[arg(long, default_value_t = 40, allow_hyphen_values = true)]
    lesion_dx: i32,
    /// Lesion center row [default: middle row]
    #[arg(long)]
    lesion_y: Option<usize>,
    #[arg(long, default_value_t = 10)]
    lesion_radius: usize,
    #[arg(long, default_value_t = 60, allow_hyphen_values = true)]
    lesion_delta: i32,
}

impl From<&PhantomArgs> for PhantomSpec {
    fn from(a: &PhantomArgs) -> Self {
        PhantomSpec {
            width: a.width,
            height: a.height,
            seed: a.seed,
            semi_axis_x: a.semi_axis_x,
            semi_axis_y: a.semi_axis_y,
            noise_amplitude: a.noise_amplitude,
            lesion: (!a.no_lesion).then(|| LesionSpec {
                center_dx: a.lesion_dx,
                center_y: a.lesion_y.unwrap_or(a.height.saturating_sub(1) / 2),
                radius: a.lesion_radius,
                delta: a.lesion_delta,
            }),
        }
    }
}

/// A failed command: message for stderr plus exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err.root() {
            Error::Parameter(_) => EXIT_USAGE,
            Error::Netpbm(_) => EXIT_IO,
            _ => EXIT_PIPELINE,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Edges {
            input,
            operator,
            output,
            config,
        } => cmd_edges(&input, &operator, &output, &(&config).into()),
        Command::Axis { input, output, config } => cmd_axis(&input, &output, &(&config).into()),
        Command::Detect { input, out_dir, config } => cmd_detect(&input, &out_dir, &(&config).into()),
        Command::Report { input, output, config } => cmd_report(&input, output.as_deref(), &(&config).into()),
        Command::Phantom { output, spec } => cmd_phantom(&(&spec).into(), &output),
    }
}

fn load_gray(path: &Path) -> CliResult<GrayImage> {
    load_netpbm(path)
        .map(Image::into_gray)
        .map_err(|e| CliError::io(path, e))
}

/// Writes through a sibling temporary file so readers never see a partial
/// output.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Edge map of `img` under a named operator: Canny with the configured
/// smoothing and thresholds, or a gradient operator thresholded at the
/// high fraction.
pub fn edge_map_for(img: &GrayImage, operator: &str, config: &Config) -> crate::Result<EdgeMap> {
    config.validate()?;
    if operator == "canny" {
        return canny(img, config.sigma, config.canny_low, config.canny_high);
    }
    let op: Operator = operator.parse()?;
    threshold_edges(&gradient(img, op)?, config.canny_high)
}

fn cmd_edges(input: &Path, operator: &str, output: &Path, config: &Config) -> CliResult<()> {
    config.validate()?;
    let img = load_gray(input)?;
    let map = edge_map_for(&img, operator, config)?;
    write_atomic(output, &encode_netpbm(&Image::Gray(map.to_gray())))?;
    println!("edges={}", map.count());
    Ok(())
}

fn cmd_axis(input: &Path, output: &Path, config: &Config) -> CliResult<()> {
    config.validate()?;
    let img = load_gray(input)?;
    let pre = detect::preprocess(&img, config)?;
    let axis = detect::estimate_axis(&pre, config)?;
    let mut overlay = RgbImage::from_gray(&img);
    detect::draw_axis(&mut overlay, &axis);
    write_atomic(output, &encode_netpbm(&Image::Rgb(overlay)))?;
    let line: Vec<String> = axis
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| format!("c{i}={}", sig6(*c)))
        .collect();
    println!("{}", line.join(" "));
    Ok(())
}

fn cmd_detect(input: &Path, out_dir: &Path, config: &Config) -> CliResult<()> {
    config.validate()?;
    let img = load_gray(input)?;
    let result = detect_pipeline(&img, config)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "result".into());
    let overlay = render_overlay(&img, &result);
    write_atomic(
        &out_dir.join(format!("{stem}.overlay.ppm")),
        &encode_netpbm(&Image::Rgb(overlay)),
    )?;
    write_atomic(&out_dir.join(format!("{stem}.json")), report_json(&result).as_bytes())?;
    println!("{}", result.verdict.message());
    Ok(())
}

/// CSV of edge counts per operator.
pub fn report_csv(img: &GrayImage, config: &Config) -> crate::Result<String> {
    let mut csv = String::from("operator,edges\n");
    for op in OPERATORS {
        csv.push_str(&format!("{op},{}\n", edge_map_for(img, op, config)?.count()));
    }
    Ok(csv)
}

fn cmd_report(input: &Path, output: Option<&Path>, config: &Config) -> CliResult<()> {
    config.validate()?;
    let img = load_gray(input)?;
    let csv = report_csv(&img, config)?;
    match output {
        Some(path) => write_atomic(path, csv.as_bytes()),
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn cmd_phantom(spec: &PhantomSpec, output: &Path) -> CliResult<()> {
    let (img, truth) = generate(spec)?;
    write_atomic(output, &encode_netpbm(&Image::Gray(img)))?;
    let sidecar = PhantomSidecar {
        axis_column: truth.axis_column,
        lesion: truth
            .lesion_center
            .zip(truth.lesion_radius)
            .map(|((x, y), radius)| SidecarLesion { center: [x, y], radius }),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("plain data serializes") + "\n";
    write_atomic(&output.with_extension("json"), json.as_bytes())
}

#[derive(Serialize)]
struct PhantomSidecar {
    axis_column: f64,
    lesion: Option<SidecarLesion>,
}

#[derive(Serialize)]
struct SidecarLesion {
    center: [f64; 2],
    radius: usize,
}

/// Rounds to 6 significant digits; negative zero becomes zero.
pub fn sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return 0.0;
    }
    format!("{v:.5e}").parse().expect("formatted float parses")
}

fn ser_sig6<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(sig6(*v))
}

fn ser_sig6_seq<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&x| sig6(x)))
}

#[derive(Serialize)]
struct AxisReport<'a> {
    degree: usize,
    #[serde(serialize_with = "ser_sig6_seq")]
    coeffs: &'a [f64],
}

#[derive(Serialize)]
struct RegionReport<'a> {
    area_px: usize,
    #[serde(serialize_with = "ser_sig6")]
    area_mm2: f64,
    bbox: &'a BoundingBox,
    #[serde(serialize_with = "ser_sig6_seq")]
    centroid: [f64; 2],
}

#[derive(Serialize)]
struct DetectReport<'a> {
    width: usize,
    height: usize,
    axis: AxisReport<'a>,
    regions: Vec<RegionReport<'a>>,
    total_area_px: usize,
    #[serde(serialize_with = "ser_sig6")]
    total_area_mm2: f64,
    verdict: &'static str,
    message: &'static str,
    edge_count: usize,
}

/// JSON document for a detection result, with a fixed key order and floats
/// rounded to 6 significant digits.
pub fn report_json(result: &DetectionResult) -> String {
    let spacing2 = result.pixel_spacing * result.pixel_spacing;
    let report = DetectReport {
        width: result.width,
        height: result.height,
        axis: AxisReport {
            degree: result.axis.degree,
            coeffs: &result.axis.coeffs,
        },
        regions: result
            .regions
            .iter()
            .map(|r| RegionReport {
                area_px: r.area_px,
                area_mm2: r.area_px as f64 * spacing2,
                bbox: &r.bbox,
                centroid: [r.centroid.0, r.centroid.1],
            })
            .collect(),
        total_area_px: result.total_area_px,
        total_area_mm2: result.total_area_mm2,
        verdict: result.verdict.as_str(),
        message: result.verdict.message(),
        edge_count: result.edge_count,
    };
    serde_json::to_string_pretty(&report).expect("plain data serializes") + "\n"
}
