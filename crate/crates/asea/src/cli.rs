//! Command-line front end: corpus synthesis, training, evaluation,
//! cross-validation, ablations, gradient checking and checkpoint inspection.
//!
//! Exit codes: 0 success, 2 configuration/usage, 3 data/format, 4 numeric.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::data::{
    load_corpus, load_sbu, normalize, synthesize, write_corpus, CorpusManifest,
    SkeletonSequence, SynthSpec,
};
use crate::error::{AseaError, Result};
use crate::gradcheck;
use crate::model::{AseaConfig, AseaModel};
use crate::train::{ablate, cross_validate, evaluate, train, TrainSpec};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "asea", version, about = "Two-person skeleton interaction recognition")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Generate a synthetic two-person interaction corpus.
    Synth {
        /// Output directory for the corpus.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples_per_class: usize,
        #[arg(long, default_value_t = 20)]
        frames: usize,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train a model and write a report and checkpoint.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Treat `data` as an SBU-format directory tree instead of a corpus.
        #[arg(long)]
        sbu: bool,
        /// key=value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Set a single key=value (repeatable, overrides the file).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a checkpoint on a dataset.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        sbu: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// K-fold cross-validation split by participant pair.
    Cv {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        sbu: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train matched models under different selection strategies.
    Ablate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        sbu: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Comma-separated arm names: baseline, all-node-ea, atnac, velocity.
        #[arg(long, default_value = "baseline,all-node-ea,atnac")]
        arms: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare analytic gradients against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 5)]
        seeds: usize,
    },
    /// Show what a checkpoint contains; with data, export the joint selection
    /// and attention weights of one clip.
    Inspect {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        sbu: bool,
        #[arg(long, default_value_t = 0)]
        clip: usize,
        #[arg(long, default_value_t = 0)]
        frame: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// key=value configuration
// ---------------------------------------------------------------------------

/// Parse `key = value` lines; `#` starts a comment; blank lines are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(AseaError::Config(format!(
                "config line {}: expected key=value, got '{line}'",
                lineno + 1
            )));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| AseaError::Config(format!("config key '{key}': {e}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(AseaError::Config(format!("config key '{key}': not a bool: '{other}'"))),
    }
}

/// Apply recognized keys onto the model and training configuration; any
/// unknown key is an error.
pub fn apply_kv(
    map: &BTreeMap<String, String>,
    cfg: &mut AseaConfig,
    ts: &mut TrainSpec,
) -> Result<()> {
    for (k, v) in map {
        match k.as_str() {
            "skeleton" => cfg.skeleton = v.parse()?,
            "widths" => {
                cfg.widths = v
                    .split(',')
                    .map(|w| parse::<usize>("widths", w.trim()))
                    .collect::<Result<Vec<usize>>>()?
            }
            "reduction_ratio" => cfg.reduction_ratio = parse(k, v)?,
            "double_tconv" => cfg.double_tconv = parse_bool(k, v)?,
            "gamma" => cfg.gamma = parse(k, v)?,
            "alpha_init" => cfg.alpha_init = parse(k, v)?,
            "alpha_target" => cfg.alpha_target = parse(k, v)?,
            "lambda" => cfg.lambda = parse(k, v)?,
            "beta" => cfg.beta = parse(k, v)?,
            "d_attn" => cfg.d_attn = Some(parse(k, v)?),
            "classes" => cfg.classes = parse(k, v)?,
            "strategy" => cfg.strategy = v.parse()?,
            "use_ea" => cfg.use_ea = parse_bool(k, v)?,
            "relaxation" => cfg.relaxation = parse_bool(k, v)?,
            "fixed_t" => cfg.fixed_t = Some(parse(k, v)?),
            "init_seed" => cfg.init_seed = parse(k, v)?,
            "optimizer" => ts.optimizer = v.parse()?,
            "lr" => ts.lr = parse(k, v)?,
            "weight_decay" => ts.weight_decay = parse(k, v)?,
            "epochs" => ts.epochs = parse(k, v)?,
            "batch_size" => ts.batch_size = parse(k, v)?,
            "seed" => ts.seed = parse(k, v)?,
            "lr_step" => ts.lr_step = Some(parse(k, v)?),
            "lr_gamma" => ts.lr_gamma = parse(k, v)?,
            other => {
                return Err(AseaError::Config(format!("unknown config key '{other}'")));
            }
        }
    }
    Ok(())
}

fn resolve_config(
    file: Option<&PathBuf>,
    sets: &[String],
    epochs: Option<usize>,
    seed: Option<u64>,
) -> Result<(AseaConfig, TrainSpec)> {
    let mut cfg = AseaConfig::default();
    let mut ts = TrainSpec::default();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| AseaError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        apply_kv(&parse_kv(&text)?, &mut cfg, &mut ts)?;
    }
    let mut overrides = BTreeMap::new();
    for s in sets {
        let Some((k, v)) = s.split_once('=') else {
            return Err(AseaError::Config(format!("--set expects KEY=VALUE, got '{s}'")));
        };
        overrides.insert(k.trim().to_string(), v.trim().to_string());
    }
    apply_kv(&overrides, &mut cfg, &mut ts)?;
    if let Some(e) = epochs {
        ts.epochs = e;
    }
    if let Some(s) = seed {
        ts.seed = s;
    }
    Ok((cfg, ts))
}

// ---------------------------------------------------------------------------
// Dataset loading
// ---------------------------------------------------------------------------

/// Load and normalize a dataset; returns the sequences and the class count.
pub fn load_dataset(dir: &Path, sbu: bool) -> Result<(Vec<SkeletonSequence>, usize)> {
    if sbu {
        let seqs = load_sbu(dir)?;
        Ok((seqs.iter().map(normalize).collect(), crate::data::SBU_CLASSES.len()))
    } else {
        let (seqs, manifest) = load_corpus(dir)?;
        Ok((seqs.iter().map(normalize).collect(), manifest.classes.len()))
    }
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| AseaError::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| AseaError::Format(format!("encode report: {e}")))
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

pub fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Synth { out, samples_per_class, frames, noise, seed } => {
            let spec = SynthSpec {
                samples_per_class,
                frames,
                noise_sigma: noise,
                ..SynthSpec::default()
            };
            let seqs = synthesize(&spec, seed)?;
            let manifest = CorpusManifest {
                classes: spec.classes.iter().map(|c| c.name().to_string()).collect(),
                seed,
                spec: spec.clone(),
            };
            write_corpus(&out, &seqs, &manifest)?;
            println!(
                "wrote {} clips ({} classes x {}) to {}",
                seqs.len(),
                spec.classes.len(),
                samples_per_class,
                out.display()
            );
            Ok(())
        }
        Cmd::Train { data, sbu, config, sets, out, checkpoint, epochs, seed } => {
            let (mut cfg, ts) = resolve_config(config.as_ref(), &sets, epochs, seed)?;
            let (seqs, classes) = load_dataset(&data, sbu)?;
            if config.is_none() && sets.iter().all(|s| !s.starts_with("classes=")) {
                cfg.classes = classes;
            }
            let (train_refs, val_refs) = holdout_split(&seqs, ts.seed)?;
            let mut model = AseaModel::new(cfg)?;
            let report = train(&mut model, &train_refs, &val_refs, &ts)?;
            if let Some(ck) = &checkpoint {
                model.save(ck)?;
            }
            write_or_print(out.as_ref(), &to_json(&report)?)?;
            eprintln!(
                "trained {} epochs; held-out accuracy {:.4}",
                report.epochs.len(),
                report.eval.accuracy
            );
            Ok(())
        }
        Cmd::Eval { checkpoint, data, sbu, out } => {
            let mut model = AseaModel::load(&checkpoint)?;
            let (seqs, _) = load_dataset(&data, sbu)?;
            let refs: Vec<&SkeletonSequence> = seqs.iter().collect();
            let report = evaluate(&mut model, &refs, 16)?;
            let wrapped = serde_json::json!({
                "config": model.cfg,
                "eval": &report,
            });
            write_or_print(out.as_ref(), &to_json(&wrapped)?)?;
            eprintln!("accuracy {:.4} ({}/{})", report.accuracy, report.correct, report.total);
            Ok(())
        }
        Cmd::Cv { data, sbu, config, sets, folds, out, epochs, seed } => {
            let (mut cfg, ts) = resolve_config(config.as_ref(), &sets, epochs, seed)?;
            let (seqs, classes) = load_dataset(&data, sbu)?;
            if config.is_none() && sets.iter().all(|s| !s.starts_with("classes=")) {
                cfg.classes = classes;
            }
            let report = cross_validate(&cfg, &ts, &seqs, folds)?;
            let wrapped = serde_json::json!({
                "config": cfg,
                "train_spec": ts,
                "cv": &report,
            });
            write_or_print(out.as_ref(), &to_json(&wrapped)?)?;
            eprintln!("mean accuracy over {} folds: {:.4}", folds, report.mean_accuracy);
            Ok(())
        }
        Cmd::Ablate { data, sbu, config, sets, arms, out, csv, epochs, seed } => {
            let (mut cfg, ts) = resolve_config(config.as_ref(), &sets, epochs, seed)?;
            let (seqs, classes) = load_dataset(&data, sbu)?;
            if config.is_none() && sets.iter().all(|s| !s.starts_with("classes=")) {
                cfg.classes = classes;
            }
            let arm_names: Vec<String> =
                arms.split(',').map(|a| a.trim().to_string()).filter(|a| !a.is_empty()).collect();
            let (train_refs, val_refs) = holdout_split(&seqs, ts.seed)?;
            let report = ablate(&cfg, &ts, &train_refs, &val_refs, &arm_names)?;
            let wrapped = serde_json::json!({
                "config": cfg,
                "train_spec": ts,
                "ablation": &report,
            });
            write_or_print(out.as_ref(), &to_json(&wrapped)?)?;
            if let Some(csv_path) = csv {
                std::fs::write(&csv_path, report.to_csv()).map_err(|e| AseaError::Io {
                    path: csv_path.display().to_string(),
                    source: e,
                })?;
            }
            for arm in &report.arms {
                eprintln!("{:<12} accuracy {:.4}", arm.name, arm.accuracy);
            }
            Ok(())
        }
        Cmd::Gradcheck { seeds } => {
            let report = gradcheck::run(seeds)?;
            println!("{}", to_json(&report)?);
            if !report.passed {
                return Err(AseaError::Numeric(format!(
                    "gradient check failed: {} at rel err {:.3e}",
                    report.worst_param, report.max_rel_err
                )));
            }
            Ok(())
        }
        Cmd::Inspect { checkpoint, data, sbu, clip, frame, out } => {
            let mut model = AseaModel::load(&checkpoint)?;
            let mut doc = serde_json::json!({
                "config": model.cfg,
                "skeleton_joints": model.graph.n_joints,
                "trainable_scalars": model.trainable_params(),
                "breakdown": model.param_breakdown(),
                "alpha": model.params.tensor(model.alpha).data()[0],
            });
            if let Some(dir) = data {
                let (seqs, _) = load_dataset(&dir, sbu)?;
                let seq = seqs.get(clip).ok_or_else(|| {
                    AseaError::Data(format!("clip {clip} out of range ({} clips)", seqs.len()))
                })?;
                let batch = crate::data::make_batch(&[seq], model.cfg.fixed_t)?;
                if frame >= batch.pad_mask.shape()[1] {
                    return Err(AseaError::Data(format!(
                        "frame {frame} out of range ({} frames)",
                        batch.pad_mask.shape()[1]
                    )));
                }
                let mut tape = crate::autodiff::Tape::new();
                let binds = model.params.bind(&mut tape);
                let fwd = model.forward(&mut tape, &binds, &batch, false)?;
                let selections: Vec<_> =
                    (0..2).map(|p| fwd.selections[p].export(0, p)).collect();
                let attention = fwd
                    .attention
                    .as_ref()
                    .map(|rec| rec.export_frame(0, frame));
                let logits = tape.value(fwd.logits);
                let k = logits.shape()[1];
                doc["clip"] = serde_json::json!({
                    "index": clip,
                    "label": seq.label,
                    "predicted": crate::model::argmax_rows(logits)[0],
                    "logits": (0..k).map(|j| logits.at(&[0, j])).collect::<Vec<f64>>(),
                    "selection": selections,
                    "attention_frame": frame,
                    "attention": attention,
                });
            }
            write_or_print(out.as_ref(), &to_json(&doc)?)
        }
    }
}

/// Hold out one participant-pair fold for validation when possible; with a
/// single pair everything is both train and validation (reported as such).
fn holdout_split(seqs: &[SkeletonSequence], seed: u64) -> Result<(Vec<&SkeletonSequence>, Vec<&SkeletonSequence>)> {
    let pairs: std::collections::BTreeSet<&str> =
        seqs.iter().map(|s| s.subject_id.as_str()).collect();
    if pairs.len() < 2 {
        let all: Vec<&SkeletonSequence> = seqs.iter().collect();
        return Ok((all.clone(), all));
    }
    let k = pairs.len().min(5);
    let folds = crate::data::make_folds(seqs, k, seed)?;
    let (train_idx, val_idx) = &folds[0];
    Ok((
        train_idx.iter().map(|&i| &seqs[i]).collect(),
        val_idx.iter().map(|&i| &seqs[i]).collect(),
    ))
}
