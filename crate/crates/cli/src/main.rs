//! `mnpp` — forge masked noun-phrase prediction datasets from raw text,
//! convert downstream pronoun-resolution sets into the same binary-choice
//! schema, and train/evaluate the bundled baseline scorer.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use mnpp_core::baseline::TrainConfig;
use mnpp_core::config::RunConfig;
use mnpp_core::io::sorted_json;
use mnpp_core::pipeline::{self, Adapter};
use mnpp_core::seed;

#[derive(Parser)]
#[command(name = "mnpp", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Run configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Global seed; overrides the seed in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel stages (0 = all processors). Output
    /// never depends on this value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Suppress progress counters on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: ingest, clean, chunk, generate, optionally
    /// bucket by difficulty, assemble and emit train/dev/manifest.
    Forge,

    /// Score an instance file by candidate similarity and assign
    /// easy/medium/hard buckets.
    Bucket {
        /// Instance JSONL to score.
        #[arg(long)]
        data: PathBuf,
        /// Embedding file; defaults to difficulty.embeddings from --config.
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },

    /// Dedup/filter/sample/split an existing instance file and emit a
    /// dataset directory.
    Assemble {
        /// Instance JSONL (plain or bucketed).
        #[arg(long)]
        data: PathBuf,
    },

    /// Convert a native downstream dataset file into binary-choice JSONL.
    Convert {
        /// Input adapter: mnpp | placeholder | pronoun | copa.
        #[arg(long, value_parser = parse_adapter)]
        adapter: Adapter,
        /// Native records, one JSON object per line.
        #[arg(long)]
        data: PathBuf,
    },

    /// Train the baseline scorer on forged train/dev files.
    Train {
        /// Training instances (MNPP JSONL).
        #[arg(long)]
        train: PathBuf,
        /// Dev instances (MNPP JSONL).
        #[arg(long)]
        dev: PathBuf,
        /// Embedding file; defaults to difficulty.embeddings from --config.
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },

    /// Evaluate a trained model on a dataset, or export predictions.
    Eval {
        /// Model file written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// Dataset file read through --adapter.
        #[arg(long)]
        data: PathBuf,
        /// Input adapter: mnpp | placeholder | pronoun | copa.
        #[arg(long, value_parser = parse_adapter)]
        adapter: Adapter,
        /// Report per-bucket sub-accuracies (requires bucketed data).
        #[arg(long)]
        per_bucket: bool,
        /// Export CSV predictions to this path instead of scoring accuracy.
        #[arg(long)]
        predict: Option<PathBuf>,
        /// Embedding file; defaults to difficulty.embeddings from --config.
        #[arg(long)]
        embeddings: Option<PathBuf>,
    },

    /// Learning-curve AUC from a CSV of (size, accuracy) points.
    Auc {
        /// CSV file "size,accuracy", one point per line.
        #[arg(long)]
        points: PathBuf,
    },

    /// Dataset statistics: size, label balance, per-source and per-bucket
    /// counts.
    Stats {
        /// Instance JSONL.
        #[arg(long)]
        data: PathBuf,
    },
}

fn parse_adapter(s: &str) -> Result<Adapter, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Single-line, machine-parsable reason on the error stream.
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Forge => {
            let cfg = load_config(g)?;
            let outcome = pipeline::forge(&cfg, &g.out, g.jobs)?;
            if !g.quiet {
                eprintln!(
                    "read {} files; sentences: {} seen, {} kept, {} short, {} long, {} charset; \
                     {} instances generated, {} duplicates removed, {} without similarity",
                    outcome.load.files_read,
                    outcome.clean.sentences_seen,
                    outcome.clean.sentences_kept,
                    outcome.clean.sentences_dropped_short,
                    outcome.clean.sentences_dropped_long,
                    outcome.clean.sentences_dropped_charset,
                    outcome.instances_generated,
                    outcome.duplicates_removed,
                    outcome.similarity_missing,
                );
            }
            println!("{}", sorted_json(&outcome.manifest));
        }
        Command::Bucket { data, embeddings } => {
            let embeddings = resolve_embeddings(g, embeddings)?;
            std::fs::create_dir_all(&g.out)
                .with_context(|| format!("cannot create {}", g.out.display()))?;
            let out_path = g.out.join("bucketed.jsonl");
            let summary = pipeline::bucket_file(&data, &embeddings, &out_path)?;
            println!("{}", sorted_json(&summary));
        }
        Command::Assemble { data } => {
            let cfg = load_config(g)?;
            let (manifest, removed) = pipeline::assemble_file(&data, &cfg, &g.out)?;
            if !g.quiet {
                eprintln!("{removed} duplicates removed");
            }
            println!("{}", sorted_json(&manifest));
        }
        Command::Convert { adapter, data } => {
            std::fs::create_dir_all(&g.out)
                .with_context(|| format!("cannot create {}", g.out.display()))?;
            let out_path = g.out.join("converted.jsonl");
            let (n, skipped) = pipeline::convert_file(adapter, &data, &out_path)?;
            if !g.quiet && skipped > 0 {
                eprintln!("{skipped} records skipped");
            }
            println!("{{\"converted\":{n},\"skipped\":{skipped}}}");
        }
        Command::Train {
            train,
            dev,
            embeddings,
        } => {
            let embeddings = resolve_embeddings(g, embeddings)?;
            let train_cfg = training_config(g)?;
            let (best_dev, epochs) =
                pipeline::train_files(&train, &dev, &embeddings, &train_cfg, &g.out)?;
            println!("{{\"best_dev_accuracy\":{best_dev},\"epochs\":{epochs}}}");
        }
        Command::Eval {
            model,
            data,
            adapter,
            per_bucket,
            predict,
            embeddings,
        } => {
            let embeddings = resolve_embeddings(g, embeddings)?;
            match predict {
                Some(out_path) => {
                    let n =
                        pipeline::predict_files(&model, &data, adapter, &embeddings, &out_path)?;
                    println!(
                        "{{\"predictions\":{n},\"path\":{}}}",
                        serde_json_escape(&out_path.display().to_string())
                    );
                }
                None => {
                    let report =
                        pipeline::eval_files(&model, &data, adapter, &embeddings, per_bucket)?;
                    println!("{}", sorted_json(&report));
                }
            }
        }
        Command::Auc { points } => {
            let auc = pipeline::auc_from_csv(&points)?;
            println!("{{\"auc\":{auc}}}");
        }
        Command::Stats { data } => {
            let stats = pipeline::stats_file(&data)?;
            println!("{}", sorted_json(&stats));
        }
    }
    Ok(())
}

fn load_config(g: &GlobalArgs) -> anyhow::Result<RunConfig> {
    let Some(path) = &g.config else {
        bail!("--config is required for this subcommand");
    };
    Ok(RunConfig::load(path, g.seed)?)
}

/// Embedding path: explicit flag wins, otherwise the config's difficulty
/// section.
fn resolve_embeddings(g: &GlobalArgs, flag: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Some(path) = &g.config {
        let cfg = RunConfig::load(path, g.seed)?;
        if let Some(e) = cfg.difficulty.embeddings {
            return Ok(e);
        }
    }
    bail!("no embedding file: pass --embeddings or set difficulty.embeddings in --config")
}

/// Training config from the config file when given, with `--seed` deriving
/// a train sub-seed; defaults otherwise.
fn training_config(g: &GlobalArgs) -> anyhow::Result<TrainConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path, g.seed)?.training,
        None => TrainConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = seed::derive(s, "train");
    }
    Ok(cfg)
}

fn serde_json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
