//! Command-line front end. Exit codes: 0 success, 1 design rejected,
//! 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bundled;
use crate::experiments::{self, ExperimentKey, ExperimentParams};
use crate::optical_model::{parse_setup, OpticalSetup};
use crate::pipeline::{classify_intent_fallback, lint_design, run_pipeline, Intent, PipelineConfig, RunStatus, Stages};
use crate::report::{write_bundle, BundleInput};
use crate::retrieval::{decide_match, MatchDecision, RetrievalIndex, DEFAULT_TOP_K};
use crate::toolbox::{load_toolbox, Tier, TierPaths, Toolbox};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const DEFAULT_SEED: u64 = 42;
/// Overrides the directory holding the three toolbox tier files.
pub const TOOLBOX_DIR_ENV: &str = "TOOLBOX_DIR";

#[derive(Debug, Parser)]
#[command(name = "qodesign", version, about = "Design, lint and simulate quantum-optics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect the component library.
    Toolbox {
        #[command(subcommand)]
        action: ToolboxAction,
    },
    /// Rank stored composites by similarity to a query.
    Retrieve {
        query: String,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top: usize,
    },
    /// Check a setup file against physical ranges and structure.
    Lint { setup: PathBuf },
    /// Run one simulator and write a report bundle.
    Simulate {
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validation pipeline over a setup file.
    Pipeline {
        #[command(subcommand)]
        action: PipelineAction,
    },
    /// Route a message to chat or design mode.
    Intent { text: String },
}

#[derive(Debug, Subcommand)]
enum ToolboxAction {
    List {
        #[arg(long, value_parser = parse_tier)]
        tier: Tier,
    },
}

#[derive(Debug, Subcommand)]
enum PipelineAction {
    Run {
        setup: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn parse_tier(s: &str) -> Result<Tier, String> {
    Tier::parse(s).ok_or_else(|| format!("unknown tier {s:?}; expected primitives, composites or custom"))
}

/// A failure reported on stderr with its exit code.
struct Failure(i32, String);

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn load_library() -> Result<Toolbox, Failure> {
    match std::env::var_os(TOOLBOX_DIR_ENV) {
        Some(dir) => load_toolbox(&TierPaths::in_dir(dir)).map_err(usage),
        None => Ok(Toolbox::bundled()),
    }
}

fn read_setup(path: &Path) -> Result<OpticalSetup, Failure> {
    let bytes = std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_setup(&bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| usage(format!("writing output: {e}"));
    match command {
        Command::Toolbox {
            action: ToolboxAction::List { tier },
        } => {
            let tb = load_library()?;
            match tier {
                Tier::Primitives => {
                    for p in tb.primitives() {
                        writeln!(out, "{}\t{}", p.name, p.category).map_err(io)?;
                    }
                }
                Tier::Composites => {
                    for c in tb.composites() {
                        writeln!(out, "{}\tv{}\t{}", c.name, c.version, c.approved_at.to_rfc3339()).map_err(io)?;
                    }
                }
                Tier::Custom => {
                    for c in tb.custom() {
                        writeln!(out, "{}\t{}", c.name, c.usage_count).map_err(io)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Retrieve { query, top } => {
            if top == 0 {
                return Err(usage("--top must be at least 1"));
            }
            let tb = load_library()?;
            let index = RetrievalIndex::from_composites(tb.composites());
            let hits = index.query(&query, top);
            for h in &hits {
                writeln!(out, "{:.4}\t{}\tv{}", h.similarity, h.name, h.version).map_err(io)?;
            }
            match decide_match(&hits) {
                MatchDecision::ExistingMatch { best, .. } => {
                    writeln!(out, "match: {} v{} (use_this | auto_improve | generate_new)", best.name, best.version).map_err(io)?
                }
                MatchDecision::NoMatch => writeln!(out, "match: none").map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Lint { setup } => {
            let verdict = lint_design(&read_setup(&setup)?);
            writeln!(out, "{}\tconfidence {:.3}", if verdict.approved { "approved" } else { "rejected" }, verdict.confidence).map_err(io)?;
            for c in &verdict.concerns {
                writeln!(err, "concern: {c}").map_err(io)?;
            }
            Ok(if verdict.approved { EXIT_OK } else { EXIT_REJECTED })
        }
        Command::Simulate {
            experiment,
            params,
            seed,
            out: dir,
        } => {
            let key: ExperimentKey = experiment.parse().map_err(usage)?;
            let params = match params {
                Some(path) => {
                    let bytes = std::fs::read(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    ExperimentParams::from_json(key, &bytes).map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                None => ExperimentParams::default_for(key),
            };
            let metrics = experiments::run(&params, seed).map_err(|e| usage(format!("{key}: {e}")))?;
            let setup = bundled::setup(key);
            let input = BundleInput {
                setup: &setup,
                key,
                params: &params,
                metrics: &metrics,
                history: &[],
                seed,
            };
            let bundle = write_bundle(&dir, &input).map_err(usage)?;
            for f in &bundle.files {
                writeln!(out, "{}", f.display()).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Pipeline {
            action: PipelineAction::Run { setup, out: dir, seed },
        } => {
            let setup = read_setup(&setup)?;
            let config = PipelineConfig {
                seed,
                ..Default::default()
            };
            let outcome = run_pipeline(&setup, &Stages::default(), &config);
            let best = outcome.best();
            for c in &best.concerns {
                writeln!(err, "concern: {c}").map_err(io)?;
            }
            let (Some(metrics), Some(params), Some(key)) = (&best.metrics, &best.params, best.key) else {
                let status = match best.status {
                    RunStatus::RejectedPreRun => "rejected before running",
                    _ => "no successful run",
                };
                writeln!(out, "status: {status}").map_err(io)?;
                return Ok(EXIT_REJECTED);
            };
            let input = BundleInput {
                setup: &setup,
                key,
                params,
                metrics,
                history: &outcome.history,
                seed,
            };
            let bundle = write_bundle(&dir, &input).map_err(usage)?;
            writeln!(out, "experiment: {key}").map_err(io)?;
            writeln!(out, "score: {}/10 (iteration {} of {})", best.score(), best.iteration, outcome.history.len()).map_err(io)?;
            writeln!(out, "bundle: {}", bundle.dir.display()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Intent { text } => {
            let intent = match classify_intent_fallback(&text) {
                Intent::Chat => "chat",
                Intent::Design => "design",
            };
            writeln!(out, "{intent}").map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}
