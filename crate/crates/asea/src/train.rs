//! Training, evaluation, cross-validation by participant pair, and the
//! strategy-ablation harness.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::data::{make_batch, make_folds, SkeletonSequence};
use crate::error::{AseaError, Result};
use crate::model::{argmax_rows, AseaConfig, AseaModel, SelectionStrategy};
use crate::nn::ParamSet;
use crate::tensor::Tensor;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptKind {
    Adam,
    SgdMomentum,
}

impl std::str::FromStr for OptKind {
    type Err = AseaError;
    fn from_str(s: &str) -> Result<OptKind> {
        match s {
            "adam" => Ok(OptKind::Adam),
            "sgd-momentum" => Ok(OptKind::SgdMomentum),
            other => Err(AseaError::Config(format!("unknown optimizer '{other}'"))),
        }
    }
}

fn default_opt() -> OptKind {
    OptKind::Adam
}
fn default_lr() -> f64 {
    1e-3
}
fn default_wd() -> f64 {
    1e-4
}
fn default_epochs() -> usize {
    60
}
fn default_batch() -> usize {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSpec {
    #[serde(default = "default_opt")]
    pub optimizer: OptKind,
    #[serde(default = "default_lr")]
    pub lr: f64,
    /// Decoupled decay, applied to weight matrices only.
    #[serde(default = "default_wd")]
    pub weight_decay: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub seed: u64,
    /// Multiply the learning rate by `lr_gamma` every `lr_step` epochs.
    #[serde(default)]
    pub lr_step: Option<usize>,
    #[serde(default = "default_lr_gamma")]
    pub lr_gamma: f64,
}

fn default_lr_gamma() -> f64 {
    0.1
}

impl Default for TrainSpec {
    fn default() -> TrainSpec {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl TrainSpec {
    fn lr_at(&self, epoch: usize) -> f64 {
        match self.lr_step {
            Some(step) if step > 0 => self.lr * self.lr_gamma.powi((epoch / step) as i32),
            _ => self.lr,
        }
    }
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

pub struct Optimizer {
    kind: OptKind,
    /// First moment (Adam) or velocity (SGD), per registry entry.
    m: Vec<Tensor>,
    /// Second moment; unused for SGD.
    v: Vec<Tensor>,
    t: usize,
    weight_decay: f64,
}

const ADAM_B1: f64 = 0.9;
const ADAM_B2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const SGD_MOMENTUM: f64 = 0.9;

impl Optimizer {
    pub fn new(kind: OptKind, params: &ParamSet, weight_decay: f64) -> Optimizer {
        let m = params.entries().iter().map(|e| Tensor::zeros(e.tensor.shape())).collect();
        let v = params.entries().iter().map(|e| Tensor::zeros(e.tensor.shape())).collect();
        Optimizer { kind, m, v, t: 0, weight_decay }
    }

    /// One update from per-entry gradients (`None` = zero gradient).
    pub fn step(&mut self, params: &mut ParamSet, grads: &[Option<Tensor>], lr: f64) {
        self.t += 1;
        for i in 0..params.len() {
            if !params.entries()[i].trainable {
                continue;
            }
            let decay = params.entries()[i].decay;
            let Some(g) = &grads[i] else { continue };
            match self.kind {
                OptKind::Adam => {
                    let bc1 = 1.0 - ADAM_B1.powi(self.t as i32);
                    let bc2 = 1.0 - ADAM_B2.powi(self.t as i32);
                    for j in 0..g.len() {
                        let gj = g.data()[j];
                        let mj = ADAM_B1 * self.m[i].data()[j] + (1.0 - ADAM_B1) * gj;
                        let vj = ADAM_B2 * self.v[i].data()[j] + (1.0 - ADAM_B2) * gj * gj;
                        self.m[i].data_mut()[j] = mj;
                        self.v[i].data_mut()[j] = vj;
                        let mhat = mj / bc1;
                        let vhat = vj / bc2;
                        let p = &mut params.tensor_mut(i).data_mut()[j];
                        *p -= lr * mhat / (vhat.sqrt() + ADAM_EPS);
                        if decay {
                            *p -= lr * self.weight_decay * *p;
                        }
                    }
                }
                OptKind::SgdMomentum => {
                    for j in 0..g.len() {
                        let vel = SGD_MOMENTUM * self.m[i].data()[j] + g.data()[j];
                        self.m[i].data_mut()[j] = vel;
                        let p = &mut params.tensor_mut(i).data_mut()[j];
                        *p -= lr * vel;
                        if decay {
                            *p -= lr * self.weight_decay * *p;
                        }
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub task_loss: f64,
    pub reg_loss: f64,
    pub alpha: f64,
    pub lr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// Only defined when there are at least five classes.
    pub top5_accuracy: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: AseaConfig,
    pub train_spec: TrainSpec,
    pub epochs: Vec<EpochStats>,
    pub eval: EvalReport,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_clips: usize,
    pub test_clips: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldReport>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationArm {
    pub name: String,
    pub strategy: SelectionStrategy,
    pub use_ea: bool,
    pub accuracy: f64,
    pub final_task_loss: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationReport {
    pub arms: Vec<AblationArm>,
}

impl AblationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("arm,strategy,use_ea,accuracy,final_task_loss\n");
        for a in &self.arms {
            let strategy = match a.strategy {
                SelectionStrategy::Atnac => "atnac",
                SelectionStrategy::Velocity => "velocity",
                SelectionStrategy::None => "none",
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                a.name, strategy, a.use_ea, a.accuracy, a.final_task_loss
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Train / evaluate
// ---------------------------------------------------------------------------

/// Train in place on already-normalized sequences; evaluates on `val` at the
/// end. Aborts with a numeric error (naming the step) if the loss diverges.
pub fn train(
    model: &mut AseaModel,
    train_seqs: &[&SkeletonSequence],
    val_seqs: &[&SkeletonSequence],
    spec: &TrainSpec,
) -> Result<RunReport> {
    if train_seqs.is_empty() {
        return Err(AseaError::Data("no training sequences".into()));
    }
    let started = Instant::now();
    let mut opt = Optimizer::new(spec.optimizer, &model.params, spec.weight_decay);
    let mut epochs = Vec::new();
    let mut order: Vec<usize> = (0..train_seqs.len()).collect();
    for epoch in 0..spec.epochs {
        let lr = spec.lr_at(epoch);
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (epoch as u64).wrapping_mul(0x9e37_79b9));
        order.shuffle(&mut rng);
        let mut task_sum = 0.0;
        let mut reg_sum = 0.0;
        let mut steps = 0usize;
        for (step, chunk) in order.chunks(spec.batch_size).enumerate() {
            let refs: Vec<&SkeletonSequence> = chunk.iter().map(|&i| train_seqs[i]).collect();
            let batch = make_batch(&refs, model.cfg.fixed_t)?;
            let mut tape = crate::autodiff::Tape::new();
            let binds = model.params.bind(&mut tape);
            let out = model.forward(&mut tape, &binds, &batch, true)?;
            let task = model.task_loss(&mut tape, out.logits, &batch.labels)?;
            let loss = model.loss(&mut tape, out.logits, &batch.labels, &binds)?;
            let loss_val = tape.value(loss).item();
            if !loss_val.is_finite() {
                return Err(AseaError::Numeric(format!(
                    "loss diverged at epoch {epoch} step {step}: {loss_val}"
                )));
            }
            task_sum += tape.value(task).item();
            reg_sum += loss_val - tape.value(task).item();
            steps += 1;
            let grads = tape.backward(loss)?;
            let per_entry: Vec<Option<Tensor>> = binds
                .iter()
                .map(|&v| grads.get(v).cloned())
                .collect();
            opt.step(&mut model.params, &per_entry, lr);
        }
        epochs.push(EpochStats {
            epoch,
            task_loss: task_sum / steps as f64,
            reg_loss: reg_sum / steps as f64,
            alpha: model.params.tensor(model.alpha).data()[0],
            lr,
        });
    }
    let eval = if val_seqs.is_empty() {
        EvalReport {
            accuracy: f64::NAN,
            correct: 0,
            total: 0,
            confusion: vec![vec![0; model.cfg.classes]; model.cfg.classes],
            top5_accuracy: None,
        }
    } else {
        evaluate(model, val_seqs, spec.batch_size)?
    };
    Ok(RunReport {
        config: model.cfg.clone(),
        train_spec: spec.clone(),
        epochs,
        eval,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

pub fn evaluate(
    model: &mut AseaModel,
    seqs: &[&SkeletonSequence],
    batch_size: usize,
) -> Result<EvalReport> {
    if seqs.is_empty() {
        return Err(AseaError::Data("no sequences to evaluate".into()));
    }
    let k = model.cfg.classes;
    let mut confusion = vec![vec![0usize; k]; k];
    let mut correct = 0usize;
    let mut top5 = 0usize;
    let mut total = 0usize;
    for chunk in seqs.chunks(batch_size.max(1)) {
        let batch = make_batch(chunk, model.cfg.fixed_t)?;
        let mut tape = crate::autodiff::Tape::new();
        let binds = model.params.bind(&mut tape);
        let out = model.forward(&mut tape, &binds, &batch, false)?;
        let logits = tape.value(out.logits).clone();
        let preds = argmax_rows(&logits);
        for (bi, (&pred, &truth)) in preds.iter().zip(&batch.labels).enumerate() {
            if truth >= k {
                return Err(AseaError::Data(format!(
                    "label {truth} out of range for a {k}-class model"
                )));
            }
            confusion[truth][pred] += 1;
            if pred == truth {
                correct += 1;
            }
            if k >= 5 {
                let mut scored: Vec<(f64, usize)> =
                    (0..k).map(|j| (logits.at(&[bi, j]), j)).collect();
                scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                if scored.iter().take(5).any(|&(_, j)| j == truth) {
                    top5 += 1;
                }
            }
            total += 1;
        }
    }
    Ok(EvalReport {
        accuracy: correct as f64 / total as f64,
        correct,
        total,
        confusion,
        top5_accuracy: (k >= 5).then(|| top5 as f64 / total as f64),
    })
}

// ---------------------------------------------------------------------------
// Cross-validation and ablations
// ---------------------------------------------------------------------------

/// K-fold cross-validation split by participant pair. Each fold trains a
/// fresh model from the same config. Errors if any pair leaks across a split.
pub fn cross_validate(
    cfg: &AseaConfig,
    spec: &TrainSpec,
    seqs: &[SkeletonSequence],
    k: usize,
) -> Result<CvReport> {
    let folds = make_folds(seqs, k, spec.seed)?;
    let mut reports = Vec::new();
    for (fi, (train_idx, test_idx)) in folds.iter().enumerate() {
        let train_pairs: BTreeSet<&str> =
            train_idx.iter().map(|&i| seqs[i].subject_id.as_str()).collect();
        let test_pairs: BTreeSet<&str> =
            test_idx.iter().map(|&i| seqs[i].subject_id.as_str()).collect();
        if let Some(leak) = train_pairs.intersection(&test_pairs).next() {
            return Err(AseaError::Contract(format!(
                "participant pair '{leak}' appears in both splits of fold {fi}"
            )));
        }
        let train_refs: Vec<&SkeletonSequence> = train_idx.iter().map(|&i| &seqs[i]).collect();
        let test_refs: Vec<&SkeletonSequence> = test_idx.iter().map(|&i| &seqs[i]).collect();
        let mut model = AseaModel::new(cfg.clone())?;
        let report = train(&mut model, &train_refs, &test_refs, spec)?;
        reports.push(FoldReport {
            fold: fi,
            train_clips: train_refs.len(),
            test_clips: test_refs.len(),
            accuracy: report.eval.accuracy,
        });
    }
    let mean = reports.iter().map(|r| r.accuracy).sum::<f64>() / reports.len() as f64;
    Ok(CvReport { folds: reports, mean_accuracy: mean })
}

/// Resolve an ablation arm name to its (strategy, attention) setting.
pub fn arm_setting(name: &str) -> Result<(SelectionStrategy, bool)> {
    match name {
        "baseline" => Ok((SelectionStrategy::None, false)),
        "all-node-ea" => Ok((SelectionStrategy::None, true)),
        "atnac" => Ok((SelectionStrategy::Atnac, true)),
        "velocity" => Ok((SelectionStrategy::Velocity, true)),
        other => Err(AseaError::Config(format!(
            "unknown ablation arm '{other}' (want baseline, all-node-ea, atnac, velocity)"
        ))),
    }
}

/// Run the same data and seeds through each arm. Needs at least two arms to
/// compare anything.
pub fn ablate(
    cfg: &AseaConfig,
    spec: &TrainSpec,
    train_seqs: &[&SkeletonSequence],
    val_seqs: &[&SkeletonSequence],
    arms: &[String],
) -> Result<AblationReport> {
    if arms.len() < 2 {
        return Err(AseaError::Config(format!(
            "an ablation needs at least two arms, got {}",
            arms.len()
        )));
    }
    let mut out = Vec::new();
    for name in arms {
        let (strategy, use_ea) = arm_setting(name)?;
        let arm_cfg = AseaConfig { strategy, use_ea, ..cfg.clone() };
        let mut model = AseaModel::new(arm_cfg)?;
        let report = train(&mut model, train_seqs, val_seqs, spec)?;
        out.push(AblationArm {
            name: name.clone(),
            strategy,
            use_ea,
            accuracy: report.eval.accuracy,
            final_task_loss: report.epochs.last().map(|e| e.task_loss).unwrap_or(f64::NAN),
        });
    }
    Ok(AblationReport { arms: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{normalize, synthesize, SynthSpec};
    use crate::graph::custom_graph;
    use crate::model::AseaConfig;
    use crate::graph::SkeletonKind;

    fn tiny_cfg() -> AseaConfig {
        let graph = custom_graph(
            (0..5).map(|i| format!("j{i}")).collect(),
            vec![(0, 1), (1, 2), (2, 3), (3, 4)],
        )
        .unwrap();
        AseaConfig {
            skeleton: SkeletonKind::Custom,
            graph: Some(graph),
            widths: vec![8],
            classes: 4,
            ..AseaConfig::default()
        }
    }

    fn synth_cfg() -> AseaConfig {
        AseaConfig { widths: vec![8], classes: 4, ..AseaConfig::default() }
    }

    fn small_corpus(samples: usize, frames: usize) -> Vec<SkeletonSequence> {
        let spec = SynthSpec { samples_per_class: samples, frames, ..SynthSpec::default() };
        synthesize(&spec, 11).unwrap().iter().map(normalize).collect()
    }

    #[test]
    fn adam_single_step_matches_closed_form() {
        let mut ps = ParamSet::new();
        let i = ps.push("w", Tensor::full(&[1], 1.0), true, false);
        let mut opt = Optimizer::new(OptKind::Adam, &ps, 0.0);
        let g = 0.5;
        opt.step(&mut ps, &[Some(Tensor::full(&[1], g))], 0.1);
        // bias-corrected first step: mhat = g, vhat = g^2
        let expect = 1.0 - 0.1 * g / (g.abs() + ADAM_EPS);
        assert!((ps.tensor(i).data()[0] - expect).abs() <= 1e-12);
    }

    #[test]
    fn weight_decay_only_touches_decay_entries() {
        let mut ps = ParamSet::new();
        let w = ps.push("w", Tensor::full(&[1], 1.0), true, true);
        let b = ps.push("b", Tensor::full(&[1], 1.0), true, false);
        let mut opt = Optimizer::new(OptKind::SgdMomentum, &ps, 0.1);
        // zero gradients: only decay moves anything
        opt.step(&mut ps, &[Some(Tensor::zeros(&[1])), Some(Tensor::zeros(&[1]))], 1.0);
        assert!(ps.tensor(w).data()[0] < 1.0);
        assert_eq!(ps.tensor(b).data()[0], 1.0);
    }

    #[test]
    fn sgd_momentum_accumulates_velocity() {
        let mut ps = ParamSet::new();
        let i = ps.push("w", Tensor::full(&[1], 0.0), true, false);
        let mut opt = Optimizer::new(OptKind::SgdMomentum, &ps, 0.0);
        let g = Some(Tensor::full(&[1], 1.0));
        opt.step(&mut ps, &[g.clone()], 0.1);
        opt.step(&mut ps, &[g], 0.1);
        // steps: v1 = 1 -> -0.1; v2 = 1.9 -> -0.19
        assert!((ps.tensor(i).data()[0] + 0.29).abs() <= 1e-12);
    }

    #[test]
    fn lr_schedule_steps_down() {
        let spec = TrainSpec { lr: 1.0, lr_step: Some(2), lr_gamma: 0.5, ..TrainSpec::default() };
        assert_eq!(spec.lr_at(0), 1.0);
        assert_eq!(spec.lr_at(1), 1.0);
        assert_eq!(spec.lr_at(2), 0.5);
        assert_eq!(spec.lr_at(4), 0.25);
    }

    #[test]
    fn training_reduces_loss_on_synthetic_data() {
        let seqs = small_corpus(3, 8);
        let refs: Vec<&SkeletonSequence> = seqs.iter().collect();
        let mut model = AseaModel::new(synth_cfg()).unwrap();
        let spec = TrainSpec { epochs: 4, batch_size: 6, ..TrainSpec::default() };
        let report = train(&mut model, &refs, &refs, &spec).unwrap();
        let first = report.epochs.first().unwrap().task_loss;
        let last = report.epochs.last().unwrap().task_loss;
        assert!(last < first, "task loss should fall: {first} -> {last}");
        assert!(report.eval.total == seqs.len());
        assert!(report.eval.top5_accuracy.is_none(), "only 4 classes");
        assert!(report.wall_clock_secs > 0.0);
    }

    #[test]
    fn confusion_matrix_rows_sum_to_class_counts() {
        let seqs = small_corpus(2, 8);
        let refs: Vec<&SkeletonSequence> = seqs.iter().collect();
        let mut model = AseaModel::new(synth_cfg()).unwrap();
        let eval = evaluate(&mut model, &refs, 4).unwrap();
        for (truth, row) in eval.confusion.iter().enumerate() {
            let count = refs.iter().filter(|s| s.label == truth).count();
            assert_eq!(row.iter().sum::<usize>(), count);
        }
    }

    #[test]
    fn cross_validation_splits_by_pair() {
        let seqs = small_corpus(4, 6);
        let cfg = synth_cfg();
        let spec = TrainSpec { epochs: 1, batch_size: 8, ..TrainSpec::default() };
        let cv = cross_validate(&cfg, &spec, &seqs, 2).unwrap();
        assert_eq!(cv.folds.len(), 2);
        for f in &cv.folds {
            assert!(f.train_clips + f.test_clips == seqs.len());
            assert!(f.test_clips > 0);
        }
        assert!(cv.mean_accuracy.is_finite());
    }

    #[test]
    fn ablation_needs_two_arms_and_reports_each() {
        let seqs = small_corpus(2, 6);
        let refs: Vec<&SkeletonSequence> = seqs.iter().collect();
        let cfg = synth_cfg();
        let spec = TrainSpec { epochs: 1, batch_size: 8, ..TrainSpec::default() };
        assert!(ablate(&cfg, &spec, &refs, &refs, &["atnac".into()]).is_err());
        let rep = ablate(
            &cfg,
            &spec,
            &refs,
            &refs,
            &["baseline".into(), "atnac".into()],
        )
        .unwrap();
        assert_eq!(rep.arms.len(), 2);
        assert!(!rep.arms[0].use_ea && rep.arms[1].use_ea);
        let csv = rep.to_csv();
        assert!(csv.lines().count() == 3);
        assert!(csv.starts_with("arm,"));
    }

    #[test]
    fn unknown_arm_is_config_error() {
        assert!(matches!(arm_setting("bogus"), Err(AseaError::Config(_))));
    }

    #[test]
    fn determinism_same_seed_same_weights() {
        let seqs = small_corpus(2, 6);
        let refs: Vec<&SkeletonSequence> = seqs.iter().collect();
        let spec = TrainSpec { epochs: 2, batch_size: 4, ..TrainSpec::default() };
        let run = || -> Vec<f64> {
            let mut m = AseaModel::new(synth_cfg()).unwrap();
            train(&mut m, &refs, &[], &spec).unwrap();
            m.params
                .entries()
                .iter()
                .flat_map(|e| e.tensor.data().iter().copied())
                .collect()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_custom_graph_trains() {
        // the gradcheck-sized configuration must survive a training step
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let seqs: Vec<SkeletonSequence> = (0..8)
            .map(|i| SkeletonSequence {
                coords: Tensor::from_fn(&[3, 6, 2, 5], |_| rng.gen_range(-0.5..0.5)),
                label: i % 4,
                subject_id: format!("pair{}", i % 2),
                source: crate::data::Source::Synthetic,
            })
            .collect();
        let refs: Vec<&SkeletonSequence> = seqs.iter().collect();
        let mut model = AseaModel::new(tiny_cfg()).unwrap();
        let spec = TrainSpec { epochs: 1, batch_size: 4, ..TrainSpec::default() };
        let rep = train(&mut model, &refs, &refs, &spec).unwrap();
        assert_eq!(rep.epochs.len(), 1);
        assert!(rep.epochs[0].task_loss.is_finite());
    }
}
