use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use recipmatch::harness::{self, Experiment, ExperimentSpec, Mechanism, ReplayTarget, StrategicSelection};
use recipmatch::io::{college_names, matching_to_text, parse_matching, read_instance, student_names};
use recipmatch::stability::write_blocking_pairs_csv;
use recipmatch::strategy::{college_manipulation_audit, write_audit_csv};
use recipmatch::{
    blocking_pairs, enumerate_stable, generalized_match, reciprocating_market, MatchError, MechanismConfig, Mode,
    Result, UnlistedPolicy,
};

#[derive(Parser)]
#[command(name = "match", version, about = "Matching with reciprocating preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write CSV files.
    Run(RunArgs),
    /// Match one instance and print `student,college` lines.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        mech: MechArgs,
    },
    /// Try every dropping strategy for one college.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        college: String,
        /// Largest number of students dropped (default: all).
        #[arg(long)]
        max_drop: Option<usize>,
        #[command(flatten)]
        mech: MechArgs,
    },
    /// Enumerate stable matchings, or list blocking pairs of `--matching`.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matching: Option<PathBuf>,
        #[command(flatten)]
        mech: MechArgs,
    },
}

#[derive(clap::Args)]
struct MechArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Generalized)]
    mode: ModeArg,
    /// Seed for merit-tie lotteries.
    #[arg(long, default_value_t = 0)]
    lottery_seed: u64,
    #[arg(long, value_enum, default_value_t = UnlistedArg::Unacceptable)]
    unlisted: UnlistedArg,
}

impl MechArgs {
    fn config(&self) -> MechanismConfig {
        MechanismConfig {
            mode: match self.mode {
                ModeArg::Generalized => Mode::Generalized,
                ModeArg::PureDa => Mode::PureDa,
                ModeArg::PureBm => Mode::PureBm,
            },
            lottery_seed: self.lottery_seed,
            unlisted: match self.unlisted {
                UnlistedArg::Unacceptable => UnlistedPolicy::Unacceptable,
                UnlistedArg::Acceptable => UnlistedPolicy::Acceptable,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Generalized,
    PureDa,
    PureBm,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnlistedArg {
    Unacceptable,
    Acceptable,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Welfare,
    Strategy,
    PerRank,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismArg {
    Hybrid,
    Gs,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    Lowest,
    Random,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(value_enum)]
    experiment: ExperimentArg,
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Run seed. The MATCH_SEED environment variable takes precedence.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    beta_step: Option<f64>,
    #[arg(long, value_enum)]
    mechanism: Option<MechanismArg>,
    /// Run only this strategic count.
    #[arg(long)]
    strategic_count: Option<usize>,
    #[arg(long, value_enum)]
    strategic_selection: Option<SelectionArg>,
    /// Rerun one trial and print its per-trial rows.
    #[arg(long, value_name = "SEED:TRIAL")]
    replay: Option<ReplayTarget>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Solve { instance, mech } => {
            let inst = read_instance(&instance)?;
            let m = generalized_match(&inst, &inst.student_prefs, &mech.config())?;
            print!("{}", matching_to_text(&m, &inst));
            Ok(())
        }
        Command::Audit {
            instance,
            college,
            max_drop,
            mech,
        } => {
            let inst = read_instance(&instance)?;
            let c = inst
                .college_index(&college)
                .ok_or_else(|| MatchError::UnknownId(college.clone()))?;
            let config = mech.config();
            let report =
                college_manipulation_audit(&inst, &inst.student_prefs, &config, c, max_drop.unwrap_or(usize::MAX))?;
            write_audit_csv(&[(config.lottery_seed, college.as_str(), &report)], io::stdout().lock())?;
            let names = student_names(&inst);
            let show = |v: &[recipmatch::StudentId]| {
                v.iter()
                    .map(|s| names[s.index()].as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            eprintln!(
                "{college}: truthful [{}], best [{}], profitable: {}",
                show(&report.truthful_assignment),
                show(&report.best_assignment),
                report.profitable()
            );
            Ok(())
        }
        Command::Oracle {
            instance,
            matching,
            mech,
        } => {
            let inst = read_instance(&instance)?;
            let market = reciprocating_market(&inst, &inst.student_prefs, &mech.config())?;
            match matching {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| MatchError::io(&path, e))?;
                    let m = parse_matching(&text, &inst)?;
                    let pairs = blocking_pairs(&m, &market);
                    write_blocking_pairs_csv(
                        &pairs,
                        &student_names(&inst),
                        &college_names(&inst),
                        io::stdout().lock(),
                    )
                }
                None => {
                    let stable = enumerate_stable(&market)?;
                    let mut out = io::stdout().lock();
                    for (i, m) in stable.iter().enumerate() {
                        writeln!(out, "# stable matching {}", i + 1)
                            .and_then(|_| write!(out, "{}", matching_to_text(m, &inst)))
                            .map_err(|e| MatchError::io("<stdout>", e))?;
                    }
                    eprintln!("{} stable matching(s)", stable.len());
                    Ok(())
                }
            }
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut spec = match &args.config {
        Some(path) => ExperimentSpec::read(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Ok(env) = std::env::var("MATCH_SEED") {
        spec.seed = env
            .parse()
            .map_err(|_| MatchError::Config(format!("MATCH_SEED `{env}` is not an unsigned integer")))?;
    }
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(step) = args.beta_step {
        spec.beta_step = step;
        spec.betas = None;
    }
    if let Some(m) = args.mechanism {
        spec.mechanisms = match m {
            MechanismArg::Hybrid => vec![Mechanism::Hybrid],
            MechanismArg::Gs => vec![Mechanism::Gs],
            MechanismArg::Both => vec![Mechanism::Hybrid, Mechanism::Gs],
        };
    }
    if let Some(k) = args.strategic_count {
        spec.strategic_counts = Some(vec![k]);
    }
    if let Some(sel) = args.strategic_selection {
        spec.strategic_selection = match sel {
            SelectionArg::Lowest => StrategicSelection::Lowest,
            SelectionArg::Random => StrategicSelection::Random,
        };
    }
    let experiment = match args.experiment {
        ExperimentArg::Welfare => Experiment::Welfare,
        ExperimentArg::Strategy => Experiment::Strategy,
        ExperimentArg::PerRank => Experiment::PerRank,
    };
    spec.check()?;

    if let Some(target) = args.replay {
        spec.seed = target.seed;
        let only = [target.trial];
        let out = io::stdout().lock();
        return match experiment {
            Experiment::Welfare => {
                harness::write_welfare_trials_csv(&harness::run_welfare_sweep(&spec, Some(&only))?.trials, out)
            }
            Experiment::Strategy => {
                harness::write_strategy_trials_csv(&harness::run_strategy_count(&spec, Some(&only))?.trials, out)
            }
            Experiment::PerRank => {
                harness::write_per_rank_trials_csv(&harness::run_per_rank(&spec, Some(&only))?.trials, out)
            }
        };
    }

    std::fs::create_dir_all(&args.out).map_err(|e| MatchError::io(&args.out, e))?;
    let manifest = format!("experiment = \"{}\"\n{}", experiment.name(), spec.to_toml());
    let manifest_path = args.out.join("run.toml");
    std::fs::write(&manifest_path, manifest).map_err(|e| MatchError::io(&manifest_path, e))?;

    let stem = experiment.name().replace('-', "_");
    let summary = args.out.join(format!("{stem}.csv"));
    let trials = args.out.join(format!("{stem}_trials.csv"));
    match experiment {
        Experiment::Welfare => {
            let out = harness::run_welfare_sweep(&spec, None)?;
            harness::write_welfare_csv(&out.rows, create(&summary)?)?;
            harness::write_welfare_trials_csv(&out.trials, create(&trials)?)?;
        }
        Experiment::Strategy => {
            let out = harness::run_strategy_count(&spec, None)?;
            harness::write_strategy_csv(&out.rows, create(&summary)?)?;
            harness::write_strategy_trials_csv(&out.trials, create(&trials)?)?;
        }
        Experiment::PerRank => {
            let out = harness::run_per_rank(&spec, None)?;
            harness::write_per_rank_csv(&out.rows, create(&summary)?)?;
            harness::write_per_rank_trials_csv(&out.trials, create(&trials)?)?;
        }
    }
    eprintln!("wrote {} and {}", summary.display(), trials.display());
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| MatchError::io(path, e))
}
