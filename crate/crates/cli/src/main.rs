use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eas_core::baselines::{baseline_score_map, DEFAULT_HARRIS_K};
use eas_core::blur_lab::{apply_pipeline, parse_pipeline, BlurPipeline};
use eas_core::eas::{eas_score_map, keypoints_to_csv, keypoints_to_json, EasConfig};
use eas_core::evalbench::{
    repeatability, results_to_csv, results_to_json, sweep, timing, write_series, Detector, EvalConfig, SweepAxis,
};
use eas_core::imagecore::{load_image, save_image, ImageF, SaveMode, WarpSpec};
use eas_core::pyramid::build_pyramid;
use eas_core::{BaselineKind, Error};

/// Blur-robust keypoint detection and repeatability benchmarks.
#[derive(Parser, Debug)]
#[command(name = "eas", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect keypoints and write them as CSV or JSON
    Detect(DetectArgs),
    /// Apply a blur pipeline file to an image
    Blur(BlurArgs),
    /// Repeatability of one detector under a pipeline and optional warp
    Eval(EvalArgs),
    /// Repeatability grid over a blur axis and several TopN values
    Sweep(SweepArgs),
    /// Median detection time
    Bench(BenchArgs),
    /// Write one octave's score map as raw_f32
    DumpScores(DumpArgs),
}

#[derive(Args, Debug, Clone)]
struct DetectorOpts {
    /// Upper bound on squared derivatives
    #[arg(long, default_value_t = 1.0)]
    clamp: f64,
    /// Restrict derivative moments to ix >= 0, iy >= 0
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    quadrant_mask: bool,
    /// Maximum eigenvalue ratio before a pixel is treated as an edge
    #[arg(long, default_value_t = 5.0)]
    edge_thr: f64,
    #[arg(long, default_value_t = 6)]
    max_octaves: usize,
    /// Averaging window at octave 0
    #[arg(long, default_value_t = 10.0)]
    k_base: f64,
    #[arg(long, default_value_t = 1)]
    nms_radius: usize,
    /// Harris sensitivity
    #[arg(long, default_value_t = DEFAULT_HARRIS_K)]
    harris_k: f64,
}

impl DetectorOpts {
    fn config(&self) -> Result<EasConfig, Error> {
        let cfg = EasConfig {
            clamp: self.clamp,
            quadrant_mask: self.quadrant_mask,
            edge_thr: self.edge_thr,
            max_octaves: self.max_octaves,
            k_base: self.k_base,
            nms_radius: self.nms_radius,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn detector(&self, name: &str) -> Result<Detector, Error> {
        let d: Detector = name.parse()?;
        Ok(match d {
            Detector::Baseline(BaselineKind::Harris { .. }) => {
                let kind = BaselineKind::Harris { k: self.harris_k };
                kind.validate()?;
                Detector::Baseline(kind)
            }
            other => other,
        })
    }
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// eas, harris or min-eigen
    #[arg(long, default_value = "eas")]
    detector: String,
    #[arg(long, default_value_t = 500)]
    top_n: usize,
    /// Output file; `.json` selects JSON, anything else CSV. Stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: DetectorOpts,
}

#[derive(Args, Debug)]
struct BlurArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    pipeline: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// pgm8, pgm16 or raw_f32 [default: raw_f32 for .f32/.raw, else pgm8]
    #[arg(long)]
    mode: Option<String>,
    /// Seed for noise steps without an explicit `seed=`
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Pipeline file; no blur when omitted
    #[arg(long)]
    pipeline: Option<PathBuf>,
    /// Affine warp a,b,c,d,e,f mapping (x, y) to (ax+by+c, dx+ey+f)
    #[arg(long)]
    warp: Option<String>,
    #[arg(long, default_value = "eas")]
    detector: String,
    #[arg(long, default_value_t = 500)]
    top_n: usize,
    /// Match distance in pixels; 0 requires identical positions
    #[arg(long, default_value_t = 1.0)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file; `.json` selects JSON. Stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: DetectorOpts,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// gaussian:<sigmas> or motion:<lengths>
    #[arg(long, default_value = "gaussian:1,3,5,7,9")]
    axis: String,
    /// Motion direction in radians
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value = "100,200,300,400,500")]
    top_ns: String,
    #[arg(long, default_value = "eas,harris,min-eigen")]
    detectors: String,
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    /// Report file, plus one `<stem>.<detector>.csv` series per detector beside it. Stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opts: DetectorOpts,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value = "eas")]
    detector: String,
    #[arg(long, default_value_t = 500)]
    top_n: usize,
    #[command(flatten)]
    opts: DetectorOpts,
}

#[derive(Args, Debug)]
struct DumpArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    octave: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "eas")]
    detector: String,
    #[command(flatten)]
    opts: DetectorOpts,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| usage(format!("bad {what} `{s}`"))))
        .collect()
}

fn parse_warp(text: &str) -> Result<WarpSpec, Error> {
    match parse_list::<f64>(text, "warp entry")?[..] {
        [a, b, c, d, e, f] => WarpSpec::affine(a, b, c, d, e, f),
        _ => Err(usage("--warp takes six comma-separated numbers a,b,c,d,e,f")),
    }
}

fn parse_axis(text: &str, theta: f64) -> Result<SweepAxis, Error> {
    let (kind, values) = text
        .split_once(':')
        .ok_or_else(|| usage("--axis must look like gaussian:1,3,5 or motion:5,10"))?;
    let values: Vec<f64> = parse_list(values, "axis value")?;
    match kind {
        "gaussian" => Ok(SweepAxis::GaussianSigma(values)),
        "motion" => Ok(SweepAxis::MotionLength { lengths: values, theta }),
        other => Err(usage(format!("unknown axis `{other}`"))),
    }
}

fn load_pipeline(path: &Path, seed: u64) -> Result<BlurPipeline, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_pipeline(&text, seed)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn is_json(path: Option<&Path>) -> bool {
    path.and_then(Path::extension).is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Detect(a) => {
            let cfg = a.opts.config()?;
            let detector = a.opts.detector(&a.detector)?;
            let img = load_image(&a.input)?;
            let kps = detector.detect(&img, &cfg, a.top_n)?;
            let text = if is_json(a.out.as_deref()) {
                keypoints_to_json(&kps)
            } else {
                keypoints_to_csv(&kps)
            };
            write_text(a.out.as_deref(), &text)
        }
        Command::Blur(a) => {
            let mode = match &a.mode {
                Some(m) => m.parse::<SaveMode>()?,
                None => match a.out.extension().and_then(|e| e.to_str()) {
                    Some("f32" | "raw") => SaveMode::RawF32,
                    _ => SaveMode::Pgm8,
                },
            };
            let pipeline = load_pipeline(&a.pipeline, a.seed)?;
            let img = load_image(&a.input)?;
            save_image(&apply_pipeline(&img, &pipeline)?, &a.out, mode)
        }
        Command::Eval(a) => {
            let cfg = a.opts.config()?;
            let detector = a.opts.detector(&a.detector)?;
            let mut eval = EvalConfig::new(a.top_n, a.tol);
            if let Some(w) = &a.warp {
                eval = eval.with_transform(parse_warp(w)?);
            }
            eval.validate()?;
            let pipeline = a.pipeline.as_deref().map(|p| load_pipeline(p, a.seed)).transpose()?;
            let img = load_image(&a.input)?;
            let row = repeatability(&img, detector, pipeline.as_ref(), &eval, &cfg)?;
            let text = if is_json(a.out.as_deref()) {
                results_to_json(std::slice::from_ref(&row))
            } else {
                results_to_csv(std::slice::from_ref(&row))
            };
            write_text(a.out.as_deref(), &text)
        }
        Command::Sweep(a) => {
            let cfg = a.opts.config()?;
            let axis = parse_axis(&a.axis, a.theta)?;
            let top_ns: Vec<usize> = parse_list(&a.top_ns, "top-n")?;
            let detectors = a
                .detectors
                .split(',')
                .map(|d| a.opts.detector(d.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let img = load_image(&a.input)?;
            let rows = sweep(&img, &detectors, &axis, &top_ns, a.tol, &cfg)?;
            if is_json(a.out.as_deref()) {
                write_text(a.out.as_deref(), &results_to_json(&rows))?;
            } else {
                write_text(a.out.as_deref(), &results_to_csv(&rows))?;
            }
            if let Some(out) = &a.out {
                write_series(out, &rows)?;
            }
            Ok(())
        }
        Command::Bench(a) => {
            let cfg = a.opts.config()?;
            let detector = a.opts.detector(&a.detector)?;
            let img = load_image(&a.input)?;
            let ms = timing(&img, detector, &cfg, a.top_n, a.repeats)?;
            println!(
                "{detector} {}x{} median {ms:.3} ms over {} runs",
                img.width(),
                img.height(),
                a.repeats
            );
            Ok(())
        }
        Command::DumpScores(a) => {
            let cfg = a.opts.config()?;
            let detector = a.opts.detector(&a.detector)?;
            let img = load_image(&a.input)?;
            let stack = build_pyramid(&img, cfg.max_octaves)?;
            let level: &ImageF = stack.levels().get(a.octave).ok_or_else(|| {
                usage(format!(
                    "octave {} out of range, image has {} octaves",
                    a.octave,
                    stack.len()
                ))
            })?;
            let map = match detector {
                Detector::Eas => eas_score_map(level, a.octave, &cfg)?,
                Detector::Baseline(kind) => baseline_score_map(level, a.octave, kind, &cfg)?,
            };
            save_image(&map, &a.out, SaveMode::RawF32)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io_or_format() { 2 } else { 1 })
        }
    }
}
