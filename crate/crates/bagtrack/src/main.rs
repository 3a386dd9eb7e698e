use std::path::PathBuf;
use std::process::ExitCode;

use bagtrack::ablation::{find_sequences, run_ablation, write_ablation, Sequence};
use bagtrack::config::{load_config, validate};
use bagtrack::frames::{list_frames, load_frame_files};
use bagtrack::ground_truth::{load_ground_truth, scale_ground_truth};
use bagtrack::manifest::parse_bbox;
use bagtrack::pgm::read_frame;
use bagtrack::report::{write_report, RunReport};
use bagtrack::run::{dump_overlays, thread_cap, track_sequence, with_threads};
use bagtrack::synth::{generate_sequence, standard_suite};
use bagtrack::{Error, Result};
use bagtrack_core::{BBox, TrackerConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bagtrack", version, about = "Particle-filter tracking with bags of affine subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track one object through a directory of frames.
    Track(TrackArgs),
    /// Run every combination of scenarios, alphas, bag sizes and seeds.
    Ablation(AblationArgs),
    /// Write the synthetic scenario suite, one subdirectory per scenario.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct TrackArgs {
    #[arg(long)]
    frames: PathBuf,
    /// Initial box `X,Y,W,H` in frame 0.
    #[arg(long, value_parser = bbox_arg)]
    init: BBox,
    /// Ground truth CSV (`frame,x,y,w,h`).
    #[arg(long)]
    gt: Option<PathBuf>,
    /// `key = value` tracker configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Result CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "bag-size")]
    bag_size: Option<usize>,
    /// Frame file name pattern.
    #[arg(long, default_value = "*.pgm")]
    pattern: String,
    /// Resize frames to `WxH` on load; boxes are scaled to match.
    #[arg(long, value_parser = size_arg)]
    resize: Option<(usize, usize)>,
    /// Write frames with the tracked box drawn in.
    #[arg(long = "dump-overlays")]
    dump_overlays: Option<PathBuf>,
}

#[derive(Args)]
struct AblationArgs {
    /// A sequence directory, or a directory of them.
    #[arg(long)]
    scenarios: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    #[arg(long = "bag-sizes", value_delimiter = ',', required = true)]
    bag_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Base configuration; alpha, K and seed are overridden per run.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    /// Only this scenario.
    #[arg(long)]
    scenario: Option<String>,
}

fn bbox_arg(s: &str) -> std::result::Result<BBox, String> {
    parse_bbox(s).ok_or_else(|| format!("expected X,Y,W,H, got `{s}`"))
}

fn size_arg(s: &str) -> std::result::Result<(usize, usize), String> {
    let bad = || format!("expected WxH, got `{s}`");
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn base_config(path: Option<&PathBuf>) -> Result<TrackerConfig> {
    match path {
        Some(p) => load_config(p),
        None => Ok(TrackerConfig::default()),
    }
}

fn track(args: TrackArgs) -> Result<()> {
    let mut cfg = base_config(args.config.as_ref())?;
    if let Some(a) = args.alpha {
        cfg.alpha = a;
    }
    if let Some(k) = args.bag_size {
        cfg.bag_size = k;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    validate(&cfg)?;

    let paths = list_frames(&args.frames, &args.pattern)?;
    if paths.is_empty() {
        return Err(Error::Format {
            path: args.frames.clone(),
            message: format!("no frames match `{}`", args.pattern),
        });
    }
    let mut init = args.init;
    let mut gt = args.gt.as_deref().map(load_ground_truth).transpose()?;
    if let Some((w, h)) = args.resize {
        let first = read_frame(&paths[0])?;
        let sx = w as f64 / first.width() as f64;
        let sy = h as f64 / first.height() as f64;
        init = BBox::new(init.x * sx, init.y * sy, init.w * sx, init.h * sy);
        gt = gt.map(|g| scale_ground_truth(&g, sx, sy));
    }
    let frames = load_frame_files(&paths, args.resize)?;
    log::info!("tracking {} frames of {}x{}", frames.len(), frames[0].width(), frames[0].height());

    let results = track_sequence(&frames, init, &cfg)?;
    let report = RunReport::new(&results, gt.as_ref(), &cfg);
    if let Some(out) = &args.out {
        write_report(&report, out)?;
    }
    if let Some(dir) = &args.dump_overlays {
        dump_overlays(&frames, &results, dir)?;
    }
    match report.mean_error {
        Some(m) => println!("mean_error={m:.6}"),
        None => println!("mean_error=nan"),
    }
    Ok(())
}

fn ablation(args: AblationArgs) -> Result<()> {
    let base = base_config(args.config.as_ref())?;
    let sequences = find_sequences(&args.scenarios)?
        .iter()
        .map(|d| Sequence::load(d))
        .collect::<Result<Vec<_>>>()?;
    let rows = run_ablation(&sequences, &base, &args.alphas, &args.bag_sizes, &args.seeds)?;
    write_ablation(&rows, &args.out)?;
    println!("runs={}", rows.len());
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<()> {
    let mut suite = standard_suite();
    if let Some(name) = &args.scenario {
        suite.retain(|s| &s.name == name);
        if suite.is_empty() {
            return Err(Error::Config {
                key: "scenario".into(),
                message: format!("unknown scenario `{name}`"),
            });
        }
    }
    for s in &suite {
        let dir = args.out.join(&s.name);
        generate_sequence(s, &dir)?;
        println!("{}", dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = with_threads(thread_cap(), move || match cli.command {
        Command::Track(a) => track(a),
        Command::Ablation(a) => ablation(a),
        Command::Generate(a) => generate(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
