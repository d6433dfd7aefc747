//! Full model: shared per-person encoder, adaptive joint selection,
//! cross-person attention, temporal fusion over both persons, pooling and
//! classification. Also the training objective and checkpoint format.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use crate::atnac::{self, NodeSelection};
use crate::attention::{concat_persons, ea_forward, AttentionRecord, EaParams};
use crate::autodiff::{Tape, Var};
use crate::data::Batch;
use crate::error::{AseaError, Result};
use crate::gcn::Encoder;
use crate::graph::{build_graph, init_adjacency, SkeletonGraph, SkeletonKind};
use crate::nn::{BnState, Linear, ParamSet};
use crate::temporal::MsTemporal;
use crate::tensor::Tensor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionStrategy {
    /// Feature-amplitude selection with the learnable threshold.
    Atnac,
    /// Raw joint-speed amplitudes in place of feature energies.
    Velocity,
    /// No selection: every joint stays active.
    None,
}

impl std::str::FromStr for SelectionStrategy {
    type Err = AseaError;
    fn from_str(s: &str) -> Result<SelectionStrategy> {
        match s {
            "atnac" => Ok(SelectionStrategy::Atnac),
            "velocity" => Ok(SelectionStrategy::Velocity),
            "none" => Ok(SelectionStrategy::None),
            other => Err(AseaError::Config(format!("unknown selection strategy '{other}'"))),
        }
    }
}

fn default_widths() -> Vec<usize> {
    vec![16, 16, 32, 32]
}
fn default_reduction() -> usize {
    2
}
fn default_gamma() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.5
}
fn default_lambda() -> f64 {
    0.1
}
fn default_beta() -> f64 {
    0.1
}
fn default_classes() -> usize {
    8
}
fn default_strategy() -> SelectionStrategy {
    SelectionStrategy::Atnac
}
fn default_use_ea() -> bool {
    true
}
fn default_relaxation() -> bool {
    true
}
fn default_skeleton() -> SkeletonKind {
    SkeletonKind::Sbu15
}
fn default_init_seed() -> u64 {
    7
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AseaConfig {
    #[serde(default = "default_skeleton")]
    pub skeleton: SkeletonKind,
    /// Required (and only used) when `skeleton` is `custom`.
    #[serde(default)]
    pub graph: Option<SkeletonGraph>,
    /// Output channels of each encoder block.
    #[serde(default = "default_widths")]
    pub widths: Vec<usize>,
    #[serde(default = "default_reduction")]
    pub reduction_ratio: usize,
    /// Stack a second temporal convolution in every branch.
    #[serde(default)]
    pub double_tconv: bool,
    /// Temperature of the frame-weighting softmax.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Initial value of the trainable threshold coefficient.
    #[serde(default = "default_alpha")]
    pub alpha_init: f64,
    /// Pull of the threshold regularizer.
    #[serde(default = "default_alpha")]
    pub alpha_target: f64,
    /// Weight of the threshold regularizer.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Soft-selection temperature, as a multiple of the amplitude spread.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Attention width; defaults to half the last encoder width.
    #[serde(default)]
    pub d_attn: Option<usize>,
    #[serde(default = "default_classes")]
    pub classes: usize,
    #[serde(default = "default_strategy")]
    pub strategy: SelectionStrategy,
    #[serde(default = "default_use_ea")]
    pub use_ea: bool,
    /// Differentiable soft selection during training (hard mask otherwise).
    #[serde(default = "default_relaxation")]
    pub relaxation: bool,
    /// Resample every clip to this many frames instead of zero-padding.
    #[serde(default)]
    pub fixed_t: Option<usize>,
    #[serde(default = "default_init_seed")]
    pub init_seed: u64,
}

impl Default for AseaConfig {
    fn default() -> AseaConfig {
        serde_json::from_str("{}").expect("defaults")
    }
}

pub const IN_CHANNELS: usize = 3;

pub struct AseaModel {
    pub cfg: AseaConfig,
    pub graph: SkeletonGraph,
    pub params: ParamSet,
    pub bn_states: Vec<BnState>,
    pub encoder: Encoder,
    /// Trainable threshold coefficient (shape `[1]`).
    pub alpha: usize,
    pub ea: Option<EaParams>,
    pub post: MsTemporal,
    pub classifier: Linear,
}

pub struct ForwardOut {
    /// `[B, classes]`.
    pub logits: Var,
    pub selections: [NodeSelection; 2],
    pub attention: Option<AttentionRecord>,
}

impl AseaModel {
    pub fn new(cfg: AseaConfig) -> Result<AseaModel> {
        if cfg.widths.is_empty() {
            return Err(AseaError::Config("need at least one encoder block".into()));
        }
        if cfg.classes < 2 {
            return Err(AseaError::Config(format!("need >= 2 classes, got {}", cfg.classes)));
        }
        if !(0.0..1.0).contains(&cfg.beta) || cfg.beta <= 0.0 {
            return Err(AseaError::Config(format!("beta must be in (0, 1), got {}", cfg.beta)));
        }
        let graph = match cfg.skeleton {
            SkeletonKind::Custom => cfg
                .graph
                .clone()
                .ok_or_else(|| AseaError::Config("custom skeleton requires a graph".into()))?,
            kind => build_graph(kind)?,
        };
        let mut ps = ParamSet::new();
        let mut states = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.init_seed);
        let encoder = Encoder::init(
            &mut ps,
            &mut rng,
            &mut states,
            init_adjacency(&graph),
            IN_CHANNELS,
            &cfg.widths,
            cfg.reduction_ratio,
            cfg.double_tconv,
        )?;
        let alpha = ps.push("select.alpha", Tensor::full(&[1], cfg.alpha_init), true, false);
        let c_last = *cfg.widths.last().unwrap();
        let d = cfg.d_attn.unwrap_or((c_last / 2).max(1));
        let ea = cfg
            .use_ea
            .then(|| EaParams::init(&mut ps, &mut rng, "ea", c_last, d))
            .transpose()?;
        let post = MsTemporal::init(
            &mut ps,
            &mut rng,
            &mut states,
            "post",
            c_last,
            c_last,
            cfg.double_tconv,
        )?;
        let classifier = Linear::init(&mut ps, &mut rng, "classifier", c_last, cfg.classes, true);
        Ok(AseaModel {
            cfg,
            graph,
            params: ps,
            bn_states: states,
            encoder,
            alpha,
            ea,
            post,
            classifier,
        })
    }

    /// One forward pass over a batch. `train` switches normalization to batch
    /// statistics and (with `relaxation`) soft joint gating.
    pub fn forward(
        &mut self,
        tape: &mut Tape,
        binds: &[Var],
        batch: &Batch,
        train: bool,
    ) -> Result<ForwardOut> {
        let s = batch.data.shape().to_vec();
        if s.len() != 5 || s[1] != IN_CHANNELS || s[3] != 2 {
            return Err(AseaError::Shape(format!("batch must be [B,3,T,2,N], got {s:?}")));
        }
        if s[4] != self.graph.n_joints {
            return Err(AseaError::Shape(format!(
                "batch has {} joints but the skeleton has {}",
                s[4], self.graph.n_joints
            )));
        }
        let (b, t, n) = (s[0], s[2], s[4]);
        let pad = &batch.pad_mask;
        let x = tape.constant(batch.data.clone());

        // shared-weight encoding: fold the person axis into the batch axis so
        // normalization statistics mix both persons, exactly as the running
        // averages used at inference do
        let c_last = *self.cfg.widths.last().unwrap();
        let xp = tape.permute(x, &[0, 3, 1, 2, 4])?; // [B, 2, C, T, N]
        let xf = tape.reshape(xp, &[b * 2, IN_CHANNELS, t, n])?;
        let pad2 = Tensor::from_fn(&[b * 2, t], |ix| pad.at(&[ix[0] / 2, ix[1]]));
        let enc = self
            .encoder
            .forward(tape, binds, xf, &pad2, train, &mut self.bn_states)?;
        let enc5 = tape.reshape(enc, &[b, 2, c_last, t, n])?;
        let mut feats = Vec::new();
        let mut coords = Vec::new();
        for p in 0..2 {
            let f = tape.slice(enc5, 1, p, 1)?;
            feats.push(tape.reshape(f, &[b, c_last, t, n])?);
            let cp = tape.value(x).slice(3, p, 1)?;
            coords.push(cp.reshape(&[b, IN_CHANNELS, t, n])?);
        }

        // joint selection per person
        let alpha_now = tape.value(binds[self.alpha]).data()[0];
        let mut selections = Vec::new();
        let mut gate_vars = Vec::new();
        for p in 0..2 {
            let (sel, gate) = self.select_person(tape, binds, feats[p], &coords[p], pad, alpha_now, train)?;
            selections.push(sel);
            gate_vars.push(gate);
        }
        let gates = match (gate_vars[0], gate_vars[1]) {
            (Some(g0), Some(g1)) => {
                let a = tape.reshape(g0, &[b, 1, n])?;
                let bb = tape.reshape(g1, &[b, 1, n])?;
                Some(tape.concat(&[a, bb], 1)?)
            }
            _ => None,
        };
        let hard_mask = Tensor::from_fn(&[b, 2, n], |ix| {
            selections[ix[1]].mask.at(&[ix[0], ix[2]])
        });

        // stack persons and exchange information between them
        let mut stacked_parts = Vec::new();
        for p in 0..2 {
            stacked_parts.push(tape.reshape(feats[p], &[b, c_last, t, 1, n])?);
        }
        let stacked = tape.concat(&stacked_parts, 3)?;
        let (fused, attention) = if self.ea.is_some() {
            let ea = self.ea.clone().unwrap();
            let (y, rec) = ea_forward(tape, binds, &ea, stacked, &hard_mask, gates, pad)?;
            (y, Some(rec))
        } else {
            (stacked, None)
        };

        // joint fusion across persons, temporal mixing, weighted pooling
        let merged = concat_persons(tape, fused)?; // [B, C, T, 2N]
        let mixed = crate::temporal::ms_temporal_forward(
            tape,
            binds,
            &self.post,
            merged,
            pad,
            train,
            &mut self.bn_states,
        )?;
        let joint_w = match gates {
            Some(g) => tape.reshape(g, &[b, 1, 1, 2 * n])?,
            None => tape.constant(hard_mask.reshape(&[b, 1, 1, 2 * n])?),
        };
        let pad_w = tape.constant(pad.reshape(&[b, 1, t, 1])?);
        let w = tape.mul(joint_w, pad_w)?; // [B, 1, T, 2N]
        let xw = tape.mul(mixed, w)?;
        let num = tape.sum(xw, &[2, 3], false); // [B, C]
        let den = tape.sum(w, &[2, 3], false); // [B, 1]
        let pooled = tape.div(num, den)?;
        let logits = self.classifier.apply(tape, binds, pooled)?;
        if !tape.value(logits).all_finite() {
            return Err(AseaError::Numeric("non-finite logits".into()));
        }
        Ok(ForwardOut {
            logits,
            selections: [selections.remove(0), selections.remove(0)],
            attention,
        })
    }

    /// Selection for one person; returns the record and (in relaxation
    /// training) the differentiable `[B, N]` gate.
    #[allow(clippy::too_many_arguments)]
    fn select_person(
        &self,
        tape: &mut Tape,
        binds: &[Var],
        feats: Var,
        coords: &Tensor,
        pad: &Tensor,
        alpha_now: f64,
        train: bool,
    ) -> Result<(NodeSelection, Option<Var>)> {
        match self.cfg.strategy {
            SelectionStrategy::Velocity => {
                let sel = atnac::velocity_selection(coords, Some(pad), self.cfg.gamma, alpha_now)?;
                Ok((sel, None))
            }
            SelectionStrategy::Atnac | SelectionStrategy::None => {
                let e = atnac::joint_energy_t(tape, feats)?;
                let v = atnac::frame_variance_t(tape, e)?;
                let w = atnac::temporal_weights_t(tape, v, self.cfg.gamma, pad)?;
                let s = atnac::node_amplitude_t(tape, e, w)?;
                let (_, sigma, tau) = atnac::threshold_t(tape, s, binds[self.alpha])?;
                let s_val = tape.value(s).clone();
                let (mean, std, tau_val, mask) = atnac::select_active(&s_val, alpha_now);
                let all = Tensor::full(mask.shape(), 1.0);
                let none_strategy = self.cfg.strategy == SelectionStrategy::None;
                let sel = NodeSelection {
                    energies: tape.value(e).clone(),
                    variance: atnac::frame_variance(tape.value(e), Some(pad))?,
                    weights: tape.value(w).clone(),
                    amplitudes: s_val,
                    mean,
                    std,
                    threshold: tau_val,
                    mask: if none_strategy { all } else { mask },
                };
                let gate = if train && self.cfg.relaxation && !none_strategy {
                    let beta = tape.scale(sigma, self.cfg.beta);
                    let beta = tape.add_scalar(beta, 1e-9);
                    Some(atnac::soft_mask_t(tape, s, tau, beta)?)
                } else {
                    None
                };
                Ok((sel, gate))
            }
        }
    }

    /// Task loss plus threshold regularizer, as a scalar tape node.
    pub fn loss(&self, tape: &mut Tape, logits: Var, labels: &[usize], binds: &[Var]) -> Result<Var> {
        let logp = tape.log_softmax(logits, 1)?;
        let picked = tape.pick_class(logp, labels)?;
        let mean = tape.mean(picked, &[0], false);
        let task = tape.scale(mean, -1.0);
        let d = tape.add_scalar(binds[self.alpha], -self.cfg.alpha_target);
        let sq = tape.unary(d, crate::autodiff::UnaryKind::Square);
        let reg = tape.scale(sq, self.cfg.lambda);
        let reg = tape.reshape(reg, &[])?;
        tape.add(task, reg)
    }

    /// Task loss alone (for reporting).
    pub fn task_loss(&self, tape: &mut Tape, logits: Var, labels: &[usize]) -> Result<Var> {
        let logp = tape.log_softmax(logits, 1)?;
        let picked = tape.pick_class(logp, labels)?;
        let mean = tape.mean(picked, &[0], false);
        Ok(tape.scale(mean, -1.0))
    }

    /// Trainable scalar counts grouped by the leading name segment.
    pub fn param_breakdown(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for e in self.params.entries() {
            if !e.trainable {
                continue;
            }
            let head = e.name.split('.').next().unwrap_or("other").to_string();
            *out.entry(head).or_insert(0) += e.tensor.len();
        }
        out
    }

    pub fn trainable_params(&self) -> usize {
        self.params.trainable_scalar_count()
    }
}

// ---------------------------------------------------------------------------
// Checkpoints: magic + version + JSON manifest + little-endian f32 blob
// ---------------------------------------------------------------------------

const CKPT_MAGIC: &[u8; 4] = b"ASK1";
const CKPT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ParamRecord {
    name: String,
    shape: Vec<usize>,
    /// Offset into the blob, in f32 elements.
    offset: u64,
    trainable: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointManifest {
    config: AseaConfig,
    graph: SkeletonGraph,
    params: Vec<ParamRecord>,
}

impl AseaModel {
    /// All tensors that must survive a save/load cycle, in a fixed order:
    /// the registry, then the normalization running statistics.
    fn persisted(&self) -> Vec<(String, &Tensor, bool)> {
        let mut out: Vec<(String, &Tensor, bool)> = self
            .params
            .entries()
            .iter()
            .map(|e| (e.name.clone(), &e.tensor, e.trainable))
            .collect();
        for (i, st) in self.bn_states.iter().enumerate() {
            out.push((format!("norm_state.{i}.mean"), &st.mean, false));
            out.push((format!("norm_state.{i}.var"), &st.var, false));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut records = Vec::new();
        let mut blob: Vec<u8> = Vec::new();
        let mut offset = 0u64;
        for (name, tensor, trainable) in self.persisted() {
            records.push(ParamRecord {
                name,
                shape: tensor.shape().to_vec(),
                offset,
                trainable,
            });
            for &v in tensor.data() {
                blob.extend_from_slice(&(v as f32).to_le_bytes());
            }
            offset += tensor.len() as u64;
        }
        let manifest = CheckpointManifest {
            config: self.cfg.clone(),
            graph: self.graph.clone(),
            params: records,
        };
        let mjson = serde_json::to_vec(&manifest)
            .map_err(|e| AseaError::Format(format!("manifest encode: {e}")))?;
        let io_err = |e: std::io::Error| AseaError::Io {
            path: path.display().to_string(),
            source: e,
        };
        let mut f = std::fs::File::create(path).map_err(io_err)?;
        f.write_all(CKPT_MAGIC).map_err(io_err)?;
        f.write_all(&CKPT_VERSION.to_le_bytes()).map_err(io_err)?;
        f.write_all(&(mjson.len() as u64).to_le_bytes()).map_err(io_err)?;
        f.write_all(&mjson).map_err(io_err)?;
        f.write_all(&blob).map_err(io_err)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<AseaModel> {
        let bytes = std::fs::read(path).map_err(|e| AseaError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        if bytes.len() < 16 || &bytes[0..4] != CKPT_MAGIC {
            return Err(AseaError::Format(format!(
                "{} is not a checkpoint (bad magic)",
                path.display()
            )));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != CKPT_VERSION {
            return Err(AseaError::Format(format!(
                "unsupported checkpoint version {version}"
            )));
        }
        let mlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        if bytes.len() < 16 + mlen {
            return Err(AseaError::Format("truncated checkpoint manifest".into()));
        }
        let manifest: CheckpointManifest = serde_json::from_slice(&bytes[16..16 + mlen])
            .map_err(|e| AseaError::Format(format!("manifest decode: {e}")))?;
        let blob = &bytes[16 + mlen..];
        if blob.len() % 4 != 0 {
            return Err(AseaError::Format("checkpoint blob length not a multiple of 4".into()));
        }
        let floats = blob.len() / 4;
        let read = |offset: u64, len: usize, name: &str| -> Result<Vec<f64>> {
            let start = offset as usize;
            if start + len > floats {
                return Err(AseaError::Format(format!(
                    "checkpoint truncated: parameter '{name}' extends past the blob"
                )));
            }
            Ok((0..len)
                .map(|i| {
                    let b = &blob[(start + i) * 4..(start + i) * 4 + 4];
                    f32::from_le_bytes(b.try_into().unwrap()) as f64
                })
                .collect())
        };

        let mut model = AseaModel::new(manifest.config)?;
        if model.graph.n_joints != manifest.graph.n_joints {
            return Err(AseaError::Format(format!(
                "checkpoint skeleton has {} joints but the config builds {}",
                manifest.graph.n_joints, model.graph.n_joints
            )));
        }
        let mut by_name: BTreeMap<String, &ParamRecord> =
            manifest.params.iter().map(|r| (r.name.clone(), r)).collect();

        // registry tensors
        for i in 0..model.params.len() {
            let name = model.params.name(i).to_string();
            let rec = by_name.remove(&name).ok_or_else(|| {
                AseaError::Format(format!("checkpoint is missing parameter '{name}'"))
            })?;
            let t = model.params.tensor_mut(i);
            if rec.shape != t.shape() {
                return Err(AseaError::Format(format!(
                    "parameter '{name}' has shape {:?} in the checkpoint but {:?} in the model",
                    rec.shape,
                    t.shape()
                )));
            }
            let vals = read(rec.offset, t.len(), &name)?;
            t.data_mut().copy_from_slice(&vals);
        }
        // normalization running statistics
        for i in 0..model.bn_states.len() {
            for (suffix, pick) in [("mean", 0usize), ("var", 1usize)] {
                let name = format!("norm_state.{i}.{suffix}");
                let rec = by_name.remove(&name).ok_or_else(|| {
                    AseaError::Format(format!("checkpoint is missing parameter '{name}'"))
                })?;
                let st = &mut model.bn_states[i];
                let t = if pick == 0 { &mut st.mean } else { &mut st.var };
                if rec.shape != t.shape() {
                    return Err(AseaError::Format(format!(
                        "parameter '{name}' has shape {:?} in the checkpoint but {:?} in the model",
                        rec.shape,
                        t.shape()
                    )));
                }
                let vals = read(rec.offset, t.len(), &name)?;
                t.data_mut().copy_from_slice(&vals);
            }
        }
        if let Some((name, _)) = by_name.into_iter().next() {
            return Err(AseaError::Format(format!(
                "checkpoint has unknown parameter '{name}'"
            )));
        }
        Ok(model)
    }
}

/// Index of the largest logit per row.
pub fn argmax_rows(logits: &Tensor) -> Vec<usize> {
    let (b, k) = (logits.shape()[0], logits.shape()[1]);
    (0..b)
        .map(|bi| {
            let mut best = 0;
            for j in 1..k {
                if logits.at(&[bi, j]) > logits.at(&[bi, best]) {
                    best = j;
                }
            }
            best
        })
        .collect()
}
