use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use asist_core::annosim::{self, Preset, SimParams};
use asist_core::error::{Error, Result};
use asist_core::io::config::{read_config, PipelineConfig};
use asist_core::io::{colorize, embedding, masks, report};
use asist_core::meanshift::{segment_and_track, MeanShiftParams};
use asist_core::metrics::{evaluate, AogmWeights};
use asist_core::oracle::{embed_labels, OracleParams};

#[derive(Parser)]
#[command(
    name = "asist",
    version,
    about = "Simulate rod-instance annotation videos, embed, segment/track, and evaluate"
)]
struct Cli {
    /// Optional TOML config; explicit flags override config values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an annotation video (or a preset batch) as mask directories.
    Simulate(SimulateArgs),
    /// Split a label video into a spatial grid of quadrant videos.
    Split(SplitArgs),
    /// Convert a label video into a surrogate embedding video (ASEMB file).
    Embed(EmbedArgs),
    /// Cluster an embedding video and associate tracks into a label video.
    Track(TrackArgs),
    /// Score a computed label video against a reference with DET/SEG/TRA.
    Evaluate(EvaluateArgs),
    /// Render a label video as RGB PNGs with a deterministic palette.
    Colorize(ColorizeArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Preset simu-1, simu-5, or simu-20; omits -> explicit parameters.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    objects: Option<u32>,
    #[arg(long)]
    frames: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    canvas: Option<u32>,
    /// Cropped output size.
    #[arg(long)]
    size: Option<u32>,
    #[arg(long)]
    min_length: Option<f64>,
    #[arg(long)]
    max_length: Option<f64>,
    #[arg(long)]
    min_width: Option<f64>,
    #[arg(long)]
    max_width: Option<f64>,
    #[arg(long)]
    move_prob: Option<f64>,
    #[arg(long)]
    rotate_prob: Option<f64>,
    #[arg(long)]
    resize_prob: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    rows: u32,
    #[arg(long, default_value_t = 2)]
    cols: u32,
    /// Output prefix; quadrants land in <out>_q0, <out>_q1, ...
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output size limit in bytes.
    #[arg(long, default_value_t = embedding::DEFAULT_SIZE_LIMIT)]
    size_limit: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrackArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    seed_fraction: Option<f64>,
    #[arg(long)]
    max_iters: Option<u32>,
    #[arg(long)]
    convergence_tol: Option<f64>,
    #[arg(long)]
    merge_tol: Option<f64>,
    #[arg(long)]
    fg_norm_threshold: Option<f64>,
    #[arg(long)]
    min_cluster_pixels: Option<usize>,
    #[arg(long)]
    assoc_threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Reference label video directory.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Computed label video directory.
    #[arg(long = "res")]
    result: PathBuf,
    #[arg(long)]
    w_ns: Option<f64>,
    #[arg(long)]
    w_fn: Option<f64>,
    #[arg(long)]
    w_fp: Option<f64>,
    #[arg(long)]
    w_ed: Option<f64>,
    #[arg(long)]
    w_ea: Option<f64>,
    #[arg(long)]
    w_ec: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ColorizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    match path {
        Some(p) => read_config(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn sim_params(args: &SimulateArgs, cfg: &PipelineConfig) -> SimParams {
    let d = SimParams::default();
    let c = &cfg.simulate;
    SimParams {
        n_objects: args.objects.or(c.n_objects).unwrap_or(d.n_objects),
        canvas_size: args.canvas.or(c.canvas_size).unwrap_or(d.canvas_size),
        out_size: args.size.or(c.out_size).unwrap_or(d.out_size),
        n_frames: args.frames.or(c.n_frames).unwrap_or(d.n_frames),
        min_length: args.min_length.or(c.min_length).unwrap_or(d.min_length),
        max_length: args.max_length.or(c.max_length).unwrap_or(d.max_length),
        min_width: args.min_width.or(c.min_width).unwrap_or(d.min_width),
        max_width: args.max_width.or(c.max_width).unwrap_or(d.max_width),
        move_prob: args.move_prob.or(c.move_prob).unwrap_or(d.move_prob),
        rotate_prob: args.rotate_prob.or(c.rotate_prob).unwrap_or(d.rotate_prob),
        resize_prob: args.resize_prob.or(c.resize_prob).unwrap_or(d.resize_prob),
        seed: args.seed.or(c.seed).unwrap_or(d.seed),
    }
}

fn cmd_simulate(args: SimulateArgs, cfg: &PipelineConfig) -> Result<()> {
    let base = sim_params(&args, cfg);
    let mut n_objects = base.n_objects;
    let videos = match &args.preset {
        Some(name) => {
            let preset = Preset::parse(name)?;
            n_objects = preset.object_counts()[0];
            annosim::generate_preset(preset, &base)?
        }
        None => {
            let full = annosim::simulate_video(&base)?;
            vec![annosim::center_crop(&full, base.out_size)?]
        }
    };

    if videos.len() == 1 {
        masks::write_label_video(&videos[0], &args.out)?;
        println!(
            "wrote {} ({} frames, {} tracks, {} initial objects, seed {})",
            args.out.display(),
            videos[0].frames.len(),
            videos[0].tracks.len(),
            n_objects,
            base.seed
        );
    } else {
        for (k, v) in videos.iter().enumerate() {
            let dest = args.out.join(format!("video_{k:02}"));
            masks::write_label_video(v, &dest)?;
            println!(
                "wrote {} ({} frames, {} tracks, {} initial objects)",
                dest.display(),
                v.frames.len(),
                v.tracks.len(),
                v.frames[0].pixels_by_id().len()
            );
        }
        println!("seed {}", base.seed);
    }
    Ok(())
}

fn cmd_split(args: SplitArgs) -> Result<()> {
    let video = masks::read_label_video(&args.input)?;
    let parts = annosim::split_video(&video, args.rows, args.cols)?;
    let base = args.out.to_string_lossy().into_owned();
    for (q, part) in parts.iter().enumerate() {
        let dest = PathBuf::from(format!("{base}_q{q}"));
        masks::write_label_video(part, &dest)?;
        println!(
            "wrote {} ({}x{}, {} tracks)",
            dest.display(),
            part.width(),
            part.height(),
            part.tracks.len()
        );
    }
    Ok(())
}

fn cmd_embed(args: EmbedArgs, cfg: &PipelineConfig) -> Result<()> {
    let d = OracleParams::default();
    let c = &cfg.oracle;
    let params = OracleParams {
        dim: args.dim.or(c.dim).unwrap_or(d.dim),
        noise_sigma: args.sigma.or(c.noise_sigma).unwrap_or(d.noise_sigma),
        seed: args.seed.or(c.seed).unwrap_or(d.seed),
    };
    params.validate()?;
    let video = masks::read_label_video(&args.input)?;
    let emb = embed_labels(&video, &params)?;
    embedding::write_embedding(&emb, &args.out, args.size_limit)?;
    println!(
        "wrote {} ({} frames, {}x{}, dim {}, sigma {})",
        args.out.display(),
        emb.frames.len(),
        emb.width,
        emb.height,
        emb.dim,
        params.noise_sigma
    );
    Ok(())
}

fn track_params(args: &TrackArgs, cfg: &PipelineConfig) -> MeanShiftParams {
    let d = MeanShiftParams::default();
    let c = &cfg.meanshift;
    MeanShiftParams {
        bandwidth: args.bandwidth.or(c.bandwidth).unwrap_or(d.bandwidth),
        seed_fraction: args
            .seed_fraction
            .or(c.seed_fraction)
            .unwrap_or(d.seed_fraction),
        max_iters: args.max_iters.or(c.max_iters).unwrap_or(d.max_iters),
        convergence_tol: args
            .convergence_tol
            .or(c.convergence_tol)
            .unwrap_or(d.convergence_tol),
        merge_tol: args.merge_tol.or(c.merge_tol).unwrap_or(d.merge_tol),
        fg_norm_threshold: args
            .fg_norm_threshold
            .or(c.fg_norm_threshold)
            .unwrap_or(d.fg_norm_threshold),
        min_cluster_pixels: args
            .min_cluster_pixels
            .or(c.min_cluster_pixels)
            .unwrap_or(d.min_cluster_pixels),
        assoc_threshold: args
            .assoc_threshold
            .or(c.assoc_threshold)
            .unwrap_or(d.assoc_threshold),
        seed: args.seed.or(c.seed).unwrap_or(d.seed),
    }
}

fn cmd_track(args: TrackArgs, cfg: &PipelineConfig) -> Result<()> {
    let params = track_params(&args, cfg);
    params.validate()?;
    let emb = embedding::read_embedding(&args.input)?;
    let video = segment_and_track(&emb, &params)?;
    masks::write_label_video(&video, &args.out)?;
    println!(
        "wrote {} ({} frames, {} tracks)",
        args.out.display(),
        video.frames.len(),
        video.tracks.len()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs, cfg: &PipelineConfig) -> Result<()> {
    let d = AogmWeights::default();
    let c = &cfg.weights;
    let weights = AogmWeights {
        w_ns: args.w_ns.or(c.w_ns).unwrap_or(d.w_ns),
        w_fn: args.w_fn.or(c.w_fn).unwrap_or(d.w_fn),
        w_fp: args.w_fp.or(c.w_fp).unwrap_or(d.w_fp),
        w_ed: args.w_ed.or(c.w_ed).unwrap_or(d.w_ed),
        w_ea: args.w_ea.or(c.w_ea).unwrap_or(d.w_ea),
        w_ec: args.w_ec.or(c.w_ec).unwrap_or(d.w_ec),
    };
    weights.validate()?;
    let reference = masks::read_label_video(&args.reference)?;
    let result = read_result_video(&args.result, &reference)?;
    let metrics = evaluate(&reference, &result, &weights)?;
    let file = report::ReportFile::new(&metrics, &weights);
    report::write_report(&file, &args.out)?;
    println!(
        "det {:.6}  seg {:.6}  tra {:.6}  -> {}",
        metrics.det,
        metrics.seg,
        metrics.tra,
        args.out.display()
    );
    Ok(())
}

/// A result directory may legitimately contain zero detections. An empty or
/// frame-less directory is treated as the all-background video matching the
/// reference shape.
fn read_result_video(
    dir: &std::path::Path,
    reference: &asist_core::model::LabelVideo,
) -> Result<asist_core::model::LabelVideo> {
    match masks::read_label_video(dir) {
        Ok(v) => Ok(v),
        Err(Error::Format(_)) if dir.is_dir() && std::fs::read_dir(dir)?.next().is_none() => {
            Ok(asist_core::model::LabelVideo {
                frames: reference
                    .frames
                    .iter()
                    .map(|f| asist_core::model::LabelFrame::zeros(f.width, f.height))
                    .collect(),
                tracks: Vec::new(),
            })
        }
        Err(e) => Err(e),
    }
}

fn cmd_colorize(args: ColorizeArgs) -> Result<()> {
    let video = masks::read_label_video(&args.input)?;
    colorize::write_colorized(&video, &args.out)?;
    println!("wrote {} ({} frames)", args.out.display(), video.frames.len());
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    asist_core::init_thread_pool();
    let cfg = load_config(&cli.config)?;
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args, &cfg),
        Command::Split(args) => cmd_split(args),
        Command::Embed(args) => cmd_embed(args, &cfg),
        Command::Track(args) => cmd_track(args, &cfg),
        Command::Evaluate(args) => cmd_evaluate(args, &cfg),
        Command::Colorize(args) => cmd_colorize(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
