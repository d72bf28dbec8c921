use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use soco_core::exec::{map_indices, ExecPolicy};
use soco_core::families::{estimate_condition_constants, FamilyVariant};
use soco_core::game::{
    generate_oblivious_instance, mean_stderr, play_semi_adaptive, Adversary, AnchorSchedule, GameShell, InfoMap,
    ObliviousAdversary, OnlineAnchored, OnlineDsfhc, OnlineLearner, PathModel, SpikeAdversary,
};
use soco_core::harness::{
    rows_to_csv, rows_to_json, AlgorithmKind, summary_to_json, sweep_and_report, ExperimentConfig, OutputFormat, SeedSpec,
};
use soco_core::oracle::offline_optimal;
use soco_core::reductions::{duplicate_cbc_instance, epigraph_reduce};
use soco_core::schema::{cbc_to_json, parse_cbc, read_instance};
use soco_core::window::{GridSpec, Solver};
use soco_core::Point;

#[derive(Parser)]
#[command(name = "soco-lab", version, about = "Experiments for online optimization with switching costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerArg {
    Greedy,
    Sfhc,
    Dsfhc,
    RsfhcB,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryArg {
    Spike,
    Oblivious,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceMode {
    Duplicate,
    Epigraph,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config once and print or write the rows.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replace the config's seeds with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a config over many seeds and window lengths, writing rows and a summary.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Master seed for `--seeds`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of derived seeds; overrides the config's seed list.
        #[arg(long)]
        seeds: Option<usize>,
        /// Window lengths applied to every windowed algorithm, e.g. `2,4,8`.
        #[arg(long, value_delimiter = ',')]
        ws: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Offline optimum of an instance file.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        /// Lattice as `lo,hi,n`; exact solver or a default lattice otherwise.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play the semi-adaptive game over many seeds.
    Game {
        /// Cost family as JSON, e.g. `{"family":"strongly_convex","m":2}`.
        #[arg(long, default_value = r#"{"family":"strongly_convex","m":2.0}"#)]
        family: String,
        #[arg(long, default_value_t = 6)]
        w: usize,
        #[arg(long, default_value_t = 0)]
        phase: usize,
        #[arg(long = "T", default_value_t = 60)]
        horizon: usize,
        #[arg(long, value_enum, default_value = "rsfhc-b")]
        learner: LearnerArg,
        #[arg(long, value_enum, default_value = "spike")]
        adversary: AdversaryArg,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex body chasing reductions.
    Reduce {
        #[arg(long, value_enum)]
        mode: ReduceMode,
        /// CBC file for `duplicate`, SOCO instance file for `epigraph`.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        w: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the order-of-growth and triangle constants of an instance.
    VerifyConditions {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
    },
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn execute(mut cfg: ExperimentConfig, out: Option<PathBuf>, format: Option<Format>) -> Result<ExitCode> {
    if let Some(f) = format {
        cfg.output.format = f.into();
    }
    let to_stdout = out.is_none() && cfg.output.path.is_none();
    if out.is_some() {
        cfg.output.path = out;
    }
    let outcome = sweep_and_report(&cfg)?;
    if to_stdout {
        let body = match cfg.output.format {
            OutputFormat::Csv => rows_to_csv(&outcome.output.rows)?,
            OutputFormat::Json => pretty(&rows_to_json(&outcome.output.rows)),
        };
        print!("{body}");
    } else {
        eprint!("{}", pretty(&summary_to_json(&outcome.output.summary)));
    }
    Ok(ExitCode::from(outcome.exit_code() as u8))
}

fn parse_grid(g: &[f64]) -> Result<GridSpec> {
    if g.len() != 3 || g[2] < 2.0 || g[2].fract() != 0.0 {
        bail!("--grid expects lo,hi,n with integer n >= 2");
    }
    Ok(GridSpec::new(g[0], g[1], g[2] as usize)?)
}

fn oracle(config: &Path, grid: Option<Vec<f64>>, out: Option<PathBuf>) -> Result<ExitCode> {
    let inst = read_instance(config)?;
    let grid = grid.as_deref().map(parse_grid).transpose()?;
    let r = offline_optimal(&inst, grid.as_ref())?;
    let points: Vec<&[f64]> = r.trajectory.points().iter().map(|p| p.coords()).collect();
    let body = json!({
        "cost": r.cost,
        "hitting": r.trajectory.hitting(),
        "movement": r.trajectory.movement(),
        "points": points,
    });
    emit(out.as_deref(), &pretty(&body))?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn game(
    family: &str,
    w: usize,
    phase: usize,
    horizon: usize,
    learner: LearnerArg,
    adversary: AdversaryArg,
    seeds: u64,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let family: FamilyVariant = serde_json::from_str(family).context("parsing --family")?;
    let dim = match &family {
        FamilyVariant::Glb { e0, .. } => e0.len(),
        _ => 1,
    };
    let start = match family {
        FamilyVariant::Glb { .. } => Point::new(vec![1.0; dim])?,
        _ => Point::new(vec![0.0; dim])?,
    };
    let lo = if family.nonnegative() { 0.0 } else { -(horizon as f64) };
    let shell = GameShell {
        horizon,
        start,
        family,
        w,
        grid: GridSpec::new(lo, horizon as f64, 20 * horizon + 1)?,
    };
    let psi = InfoMap::Quantize { grid: shell.grid };
    let runs = map_indices(ExecPolicy::default(), seeds as usize, |i| -> soco_core::Result<(f64, f64)> {
        let s = seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut l: Box<dyn OnlineLearner> = match learner {
            LearnerArg::Greedy => Box::new(OnlineAnchored::greedy()),
            LearnerArg::Sfhc => Box::new(OnlineAnchored::new(AnchorSchedule::Phase { h: phase }, Solver::Auto)),
            LearnerArg::Dsfhc => Box::new(OnlineDsfhc::new(Solver::Auto)),
            LearnerArg::RsfhcB => Box::new(OnlineAnchored::new(AnchorSchedule::RandomGaps, Solver::Auto)),
        };
        let mut a: Box<dyn Adversary> = match adversary {
            AdversaryArg::Spike => Box::new(SpikeAdversary::new(shell.grid, 2.0, 1.0, s ^ 0x5bd1_e995)?),
            AdversaryArg::Oblivious => {
                let model = PathModel::RandomWalk { sigma: 1.0 };
                let inst = generate_oblivious_instance(&shell.family, &model, horizon, &shell.start, &mut rng)?;
                Box::new(ObliviousAdversary::new(inst))
            }
        };
        let tr = play_semi_adaptive(l.as_mut(), a.as_mut(), &shell, &psi, &mut rng)?;
        tr.check_causality()?;
        Ok((tr.learner_cost, tr.adversary_cost))
    });
    let runs = runs.into_iter().collect::<soco_core::Result<Vec<_>>>()?;
    let (learner_costs, adversary_costs): (Vec<f64>, Vec<f64>) = runs.into_iter().unzip();
    let (lm, ls) = mean_stderr(&learner_costs);
    let (am, as_) = mean_stderr(&adversary_costs);
    let body = json!({
        "w": w,
        "T": horizon,
        "seeds": seeds,
        "learner_mean": lm,
        "learner_stderr": ls,
        "adversary_mean": am,
        "adversary_stderr": as_,
        "ratio_of_means": lm / am,
        "learner_costs": learner_costs,
        "adversary_costs": adversary_costs,
    });
    emit(out.as_deref(), &pretty(&body))?;
    Ok(ExitCode::SUCCESS)
}

fn reduce(mode: ReduceMode, config: &Path, w: usize, out: Option<PathBuf>) -> Result<ExitCode> {
    let body = match mode {
        ReduceMode::Duplicate => {
            let text = std::fs::read_to_string(config)?;
            cbc_to_json(&duplicate_cbc_instance(&parse_cbc(&text)?, w)?)?
        }
        ReduceMode::Epigraph => cbc_to_json(&epigraph_reduce(&read_instance(config)?)?)?,
    };
    emit(out.as_deref(), &(body + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn verify_conditions(config: &Path, samples: usize, seed: u64, radius: f64) -> Result<ExitCode> {
    let inst = read_instance(config)?;
    let est = estimate_condition_constants(&inst, radius, samples, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let eta = inst.eta();
    let lambda = inst.lambda();
    let eta_ok = est.eta_hat <= eta + 1e-6;
    let lambda_ok = lambda.is_none_or(|l| est.lambda_hat >= l - 1e-6);
    let body = json!({
        "eta": eta,
        "eta_hat": est.eta_hat,
        "lambda": lambda,
        "lambda_hat": est.lambda_hat,
        "eta_samples": est.eta_samples,
        "lambda_samples": est.lambda_samples,
        "ok": eta_ok && lambda_ok,
    });
    print!("{}", pretty(&body));
    Ok(if eta_ok && lambda_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            out,
            format,
        } => (|| {
            let mut cfg = ExperimentConfig::read(&config)?;
            if let Some(s) = seed {
                cfg.seeds = SeedSpec::List(vec![s]);
            }
            execute(cfg, out, format)
        })(),
        Command::Sweep {
            config,
            seed,
            seeds,
            ws,
            out,
            format,
        } => (|| {
            let mut cfg = ExperimentConfig::read(&config)?;
            if let Some(count) = seeds {
                cfg.seeds = SeedSpec::Count { master: seed, count };
            }
            if let Some(ws) = ws {
                for a in cfg.algorithms.iter_mut().filter(|a| a.name != AlgorithmKind::Greedy) {
                    a.ws = ws.clone();
                }
                cfg.validate()?;
            }
            execute(cfg, out, format)
        })(),
        Command::Oracle { config, grid, out } => oracle(&config, grid, out),
        Command::Game {
            family,
            w,
            phase,
            horizon,
            learner,
            adversary,
            seeds,
            seed,
            out,
        } => game(&family, w, phase, horizon, learner, adversary, seeds, seed, out),
        Command::Reduce { mode, config, w, out } => reduce(mode, &config, w, out),
        Command::VerifyConditions {
            config,
            samples,
            seed,
            radius,
        } => verify_conditions(&config, samples, seed, radius),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
