//! The `mapless` command line. Every subcommand writes under the output
//! directory and stamps its files with the config hash.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{evaluate, train_cost_model};
use crate::io::{
    config_hash, decisions_to_jsonl, gan_frames, generate_synthetic_dataset, load_expert_db, load_model,
    load_scenario, load_trajectories, load_trajectory_dir, save_expert_db, save_model, trace_from_csv,
    trace_to_csv, training_frames, ModelFile, RunConfig,
};
use crate::planner::{train_gan_planner, Planner, SamplerToggles, ToyGenerator};
use crate::raster::export::{export_raster_csv, export_raster_pgm};
use crate::raster::{rasterize_scene, OccupancyGrid};
use crate::samplers::{build_expert_db, synthetic_expert_trajectories};
use crate::simulator::{builtin_scenario, compare_samplers, metrics_from_trace, run_closed_loop};
use crate::types::{Frame, Scenario};

#[derive(Debug, Parser)]
#[command(name = "mapless", version, about = "Map-free trajectory planning toolkit")]
pub struct Cli {
    /// TOML run configuration, or `default` for built-in defaults.
    #[arg(long, global = true, default_value = "default")]
    pub config: String,
    /// Overrides `output_dir`.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the enabled samplers, e.g. `lattice+curve`.
    #[arg(long, global = true)]
    pub samplers: Option<String>,
    /// Overrides `model_path`.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Overrides `expert_db_path`.
    #[arg(long, global = true)]
    pub expert_db: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-loop runs: trace CSV, per-frame decisions and metrics.
    Simulate {
        /// Built-in name or scenario file; repeatable. Defaults to the config list.
        #[arg(long)]
        scenario: Vec<String>,
    },
    /// Candidate set of every enabled sampler on a scenario's first frame.
    Sample {
        #[arg(long)]
        scenario: String,
    },
    /// Cost breakdown of a trajectory file on a scenario's first frame.
    Evaluate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Max-margin training of the cost model on the synthetic dataset.
    TrainCost {
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Adversarial training of the generator against the evaluator.
    TrainGan {
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Builds the binned expert trajectory database.
    BuildExpertDb {
        /// Directory of trajectory JSON files.
        #[arg(long, conflicts_with = "synthetic")]
        input: Option<PathBuf>,
        /// Number of synthetic scenes instead of an input directory.
        #[arg(long)]
        synthetic: Option<usize>,
    },
    /// Metrics of a trace file, or a sampler comparison over the config's
    /// scenarios and sweeps.
    Metrics {
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// BEV channels of a scenario's first frame as graymaps (and CSV).
    ExportRaster {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        csv: bool,
    },
}

/// Exit status for each failure class.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Format(_) | Error::Json(_) => 3,
        Error::InvalidInput(_) | Error::Io(_) => 4,
        Error::Validation(_) => 5,
        Error::Diverged(_) => 6,
        _ => 1,
    }
}

/// Parses `argv`, runs the command and returns the exit status. Normal
/// output goes to stdout, diagnostics to stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Builds the effective configuration: defaults, then the file, then flags.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = if cli.config == "default" {
        let mut c = RunConfig::default();
        c.resolve(Path::new("."));
        c
    } else {
        RunConfig::load(Path::new(&cli.config))?
    };
    if let Some(o) = &cli.output {
        cfg.output_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.planner.seed = s;
        cfg.dataset.seed = s;
        cfg.gan.seed = s;
        cfg.generator.seed = s;
    }
    if let Some(s) = &cli.samplers {
        cfg.planner.samplers =
            SamplerToggles::parse(s).ok_or_else(|| Error::InvalidInput(format!("unknown sampler combination {s:?}")))?;
    }
    if let Some(m) = &cli.model {
        cfg.model_path = Some(m.clone());
    }
    if let Some(d) = &cli.expert_db {
        cfg.expert_db_path = Some(d.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn resolve_scenario(name: &str) -> Result<Scenario> {
    match builtin_scenario(name) {
        Some(s) => Ok(s),
        None if Path::new(name).is_file() => load_scenario(Path::new(name)),
        None => Err(Error::InvalidInput(format!("no built-in scenario or file named {name:?}"))),
    }
}

/// Planner with the configured model, generator and expert database.
pub fn build_planner(cfg: &RunConfig) -> Result<Planner> {
    let mut planner = Planner::new(cfg.planner.clone(), cfg.model);
    if let Some(p) = &cfg.model_path {
        let file = load_model(p)?;
        planner.model = file.cost_model()?;
        planner.generator = file.generator;
    }
    if let Some(p) = &cfg.expert_db_path {
        planner.expert_db = Some(load_expert_db(p)?.0);
    }
    Ok(planner)
}

fn output_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", cfg.output_dir.display())))?;
    Ok(&cfg.output_dir)
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    #[serde(flatten)]
    body: T,
}

fn write_json<T: Serialize>(path: &Path, hash: &str, body: T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&Stamped { config_hash: hash, body })?)?;
    Ok(())
}

/// Cost breakdown text exactly as `evaluate` prints it.
pub fn evaluate_text(planner: &Planner, scenario: &Scenario, trajectory: &crate::types::Trajectory) -> Result<String> {
    let frame = Frame::initial(scenario);
    let ctx = planner.prepare(&frame)?;
    Ok(evaluate(&planner.model, &ctx.planes, trajectory).to_text())
}

pub fn run(cli: &Cli) -> Result<String> {
    let cfg = effective_config(cli)?;
    let hash = config_hash(&cfg);
    let mut out = String::new();
    match &cli.command {
        Command::Simulate { scenario } => {
            let names = if scenario.is_empty() { cfg.scenarios.clone() } else { scenario.clone() };
            let scenarios: Vec<Scenario> = names.iter().map(|n| resolve_scenario(n)).collect::<Result<_>>()?;
            let planner = build_planner(&cfg)?;
            let dir = output_dir(&cfg)?;
            for s in &scenarios {
                let run = run_closed_loop(s, &planner, &cfg.sim)?;
                fs::write(dir.join(format!("{}.trace.csv", s.name)), trace_to_csv(&s.name, &hash, &run.rows))?;
                fs::write(dir.join(format!("{}.decisions.jsonl", s.name)), decisions_to_jsonl(&run, &hash)?)?;
                write_json(&dir.join(format!("{}.metrics.json", s.name)), &hash, &run.metrics)?;
                let m = &run.metrics;
                let _ = writeln!(
                    out,
                    "{}: steps={} collisions={} deviations={} lost_control={} discomfort={} fallbacks={} completed={} t={:.1} max_lat_accel={:.2} max_jerk={:.2}",
                    s.name, m.steps, m.collisions, m.deviations, m.lost_control, m.discomfort, m.fallbacks, m.completed,
                    m.completion_time, m.max_lat_accel, m.max_jerk
                );
            }
            let _ = writeln!(out, "config {hash}, outputs in {}", dir.display());
        }
        Command::Sample { scenario } => {
            let s = resolve_scenario(scenario)?;
            let planner = build_planner(&cfg)?;
            let frame = Frame::initial(&s);
            let ctx = planner.prepare(&frame)?;
            let set = planner.candidates(&frame, &ctx, 0)?;
            let dir = output_dir(&cfg)?;
            write_json(&dir.join(format!("{}.candidates.json", s.name)), &hash, &set)?;
            let _ = writeln!(out, "{}: {} candidates", s.name, set.len());
            for src in crate::types::Source::ALL {
                let n = set.iter().filter(|c| c.source == src).count();
                if n > 0 {
                    let _ = writeln!(out, "  {} {n}", src.name());
                }
            }
            if let Some(w) = &set.warning {
                let _ = writeln!(out, "  warning: {w}");
            }
        }
        Command::Evaluate { scenario, trajectory } => {
            let s = resolve_scenario(scenario)?;
            let trajs = load_trajectories(trajectory)?;
            let [traj] = trajs.as_slice() else {
                return Err(Error::InvalidInput(format!("{} must hold exactly one trajectory", trajectory.display())));
            };
            let planner = build_planner(&cfg)?;
            let text = evaluate_text(&planner, &s, traj)?;
            let dir = output_dir(&cfg)?;
            fs::write(dir.join(format!("{}.cost.txt", s.name)), format!("# config={hash}\n{text}"))?;
            out = text;
        }
        Command::TrainCost { frames } => {
            let mut dcfg = cfg.dataset.clone();
            if let Some(n) = frames {
                dcfg.frames = *n;
            }
            let data = generate_synthetic_dataset(&dcfg)?;
            let mut pcfg = cfg.planner.clone();
            pcfg.samplers = SamplerToggles { lattice: true, ..SamplerToggles::NONE };
            let planner = Planner::new(pcfg, cfg.model);
            let tf = training_frames(&data, &planner)?;
            let report = train_cost_model(&tf, cfg.model, &cfg.train)?;
            let dir = output_dir(&cfg)?;
            save_model(&ModelFile::new(&report.model, None, &hash), &dir.join("model.json"))?;
            let mut csv = format!("# config={hash}\nstep,loss\n");
            for (i, l) in report.trace.iter().enumerate() {
                let _ = writeln!(csv, "{i},{l}");
            }
            fs::write(dir.join("train_cost.csv"), csv)?;
            let ranked = tf.iter().filter(|f| f.gt_ranks_cheapest(&report.model)).count();
            let _ = writeln!(
                out,
                "trained on {} frames: loss {} -> {}, gt cheapest on {ranked}/{}\nweights {:?}\nmodel written to {}",
                tf.len(),
                report.trace[0],
                report.trace.last().copied().unwrap_or(f64::NAN),
                tf.len(),
                report.model.weights,
                dir.join("model.json").display()
            );
        }
        Command::TrainGan { frames } => {
            let mut dcfg = cfg.dataset.clone();
            if let Some(n) = frames {
                dcfg.frames = *n;
            }
            let data = generate_synthetic_dataset(&dcfg)?;
            let planner = build_planner(&cfg)?;
            let gf = gan_frames(&data, &planner)?;
            let g = cfg.generator;
            let generator = planner
                .generator
                .clone()
                .unwrap_or_else(|| ToyGenerator::new(g.latent_dim, g.modes, g.latent_scale, g.seed));
            let report = train_gan_planner(&gf, generator, planner.model, &cfg.gan)?;
            let dir = output_dir(&cfg)?;
            save_model(&ModelFile::new(&report.evaluator, Some(report.generator.clone()), &hash), &dir.join("model.json"))?;
            let mut csv = format!("# config={hash}\nkind,epoch,loss\n");
            for (i, l) in report.generator_trace.iter().enumerate() {
                let _ = writeln!(csv, "generator,{i},{l}");
            }
            for (i, l) in report.evaluator_trace.iter().enumerate() {
                let _ = writeln!(csv, "evaluator,{i},{l}");
            }
            fs::write(dir.join("train_gan.csv"), csv)?;
            let _ = writeln!(
                out,
                "trained on {} frames: generator loss {} -> {}\nmodel written to {}",
                gf.len(),
                report.generator_trace.first().copied().unwrap_or(f64::NAN),
                report.generator_trace.last().copied().unwrap_or(f64::NAN),
                dir.join("model.json").display()
            );
        }
        Command::BuildExpertDb { input, synthetic } => {
            let raw = match (input, synthetic) {
                (Some(dir), _) => load_trajectory_dir(dir)?,
                (None, Some(n)) => synthetic_expert_trajectories(*n, 20, cfg.planner.seed),
                (None, None) => return Err(Error::InvalidInput("build-expert-db needs --input or --synthetic".into())),
            };
            let db = build_expert_db(&raw, &cfg.expert_db)?;
            let dir = output_dir(&cfg)?;
            let path = dir.join("expert_db.bin");
            save_expert_db(&db, &hash, &path)?;
            let _ = writeln!(out, "{} trajectories -> {} entries in {}", raw.len(), db.entries.len(), path.display());
        }
        Command::Metrics { trace } => {
            let dir = output_dir(&cfg)?;
            if let Some(path) = trace {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("cannot read trace {}: {e}", path.display())))?;
                let file = trace_from_csv(&text)?;
                let m = metrics_from_trace(&file.rows, &cfg.sim.events);
                write_json(&dir.join(format!("{}.metrics.json", file.scenario)), &hash, &m)?;
                out = serde_json::to_string_pretty(&m)? + "\n";
            } else {
                let scenarios: Vec<Scenario> = cfg.scenarios.iter().map(|n| resolve_scenario(n)).collect::<Result<_>>()?;
                let combos: Vec<SamplerToggles> = cfg.sweeps.iter().filter_map(|s| SamplerToggles::parse(s)).collect();
                let rows = compare_samplers(&scenarios, &combos, &build_planner(&cfg)?, &cfg.sim)?;
                let mut csv = format!("# config={hash}\n");
                csv.push_str("combo,scenarios,collisions,deviations,lost_control,discomfort,fallbacks,completed,mean_lat_accel,mean_jerk,mean_steer_change,max_lat_accel,max_jerk\n");
                for r in &rows {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        r.combo, r.scenarios, r.collisions, r.deviations, r.lost_control, r.discomfort, r.fallbacks,
                        r.completed, r.mean_lat_accel, r.mean_jerk, r.mean_steer_change, r.max_lat_accel, r.max_jerk
                    );
                }
                fs::write(dir.join("comparison.csv"), &csv)?;
                out = csv;
            }
        }
        Command::ExportRaster { scenario, csv } => {
            let s = resolve_scenario(scenario)?;
            let frame = Frame::initial(&s);
            let geometry = frame.geometry();
            let occ = OccupancyGrid::from_frame(&frame, geometry);
            let raster = rasterize_scene(&frame, Some(&occ), geometry, &cfg.raster)?;
            let dir = output_dir(&cfg)?;
            let comment = format!("scenario={} config={hash}", s.name);
            let paths = export_raster_pgm(&raster, dir, &s.name, &comment)?;
            if *csv {
                export_raster_csv(&raster, &dir.join(format!("{}_raster.csv", s.name)), &comment)?;
            }
            let _ = writeln!(out, "{} channels {}x{} written to {}", paths.len(), geometry.cols, geometry.rows, dir.display());
        }
    }
    Ok(out)
}
