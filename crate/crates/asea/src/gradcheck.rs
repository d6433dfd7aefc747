//! Finite-difference verification of the end-to-end gradient on a small
//! model: every trainable scalar is perturbed centrally and compared against
//! the reverse-sweep gradient of the full loss.

use std::collections::BTreeMap;

use crate::autodiff::Tape;
use crate::data::Batch;
use crate::error::Result;
use crate::graph::{custom_graph, SkeletonKind};
use crate::model::{AseaConfig, AseaModel};
use crate::tensor::Tensor;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const FD_STEP: f64 = 1e-5;
pub const REL_TOL: f64 = 1e-4;

/// Small five-joint configuration used for the check: one encoder block,
/// soft selection, cross-person attention, four classes.
pub fn tiny_config() -> AseaConfig {
    let graph = custom_graph(
        (0..5).map(|i| format!("j{i}")).collect(),
        vec![(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)],
    )
    .expect("static graph");
    AseaConfig {
        skeleton: SkeletonKind::Custom,
        graph: Some(graph),
        widths: vec![8],
        classes: 4,
        relaxation: true,
        ..AseaConfig::default()
    }
}

fn tiny_batch(seed: u64) -> Batch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Batch {
        data: Tensor::from_fn(&[2, 3, 6, 2, 5], |_| rng.gen_range(-0.6..0.6)),
        labels: vec![1, 3],
        pad_mask: Tensor::full(&[2, 6], 1.0),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamCheck {
    pub name: String,
    pub max_rel_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradCheckReport {
    pub seeds: usize,
    pub scalars_checked: usize,
    pub max_rel_err: f64,
    pub worst_param: String,
    pub per_module: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
}

fn loss_value(model: &mut AseaModel, batch: &Batch) -> Result<f64> {
    let mut tape = Tape::new();
    let binds = model.params.bind(&mut tape);
    let out = model.forward(&mut tape, &binds, batch, true)?;
    let loss = model.loss(&mut tape, out.logits, &batch.labels, &binds)?;
    Ok(tape.value(loss).item())
}

fn rel_err(a: f64, f: f64) -> f64 {
    let denom = (a.abs() + f.abs()).max(1e-6);
    (a - f).abs() / denom
}

/// Check one model/batch pair. `corrupt` adds a constant to the analytic
/// gradient of the named parameter, for validating the checker itself.
pub fn check_model(
    model: &mut AseaModel,
    batch: &Batch,
    step: f64,
    corrupt: Option<&str>,
) -> Result<Vec<ParamCheck>> {
    // analytic gradients
    let mut tape = Tape::new();
    let binds = model.params.bind(&mut tape);
    let out = model.forward(&mut tape, &binds, batch, true)?;
    let loss = model.loss(&mut tape, out.logits, &batch.labels, &binds)?;
    let grads = tape.backward(loss)?;
    let analytic: Vec<Tensor> = (0..model.params.len())
        .map(|i| grads.grad_or_zero(binds[i], model.params.tensor(i).shape()))
        .collect();
    drop(tape);

    let mut checks = Vec::new();
    for i in 0..model.params.len() {
        if !model.params.entries()[i].trainable {
            continue;
        }
        let name = model.params.name(i).to_string();
        let bias = match corrupt {
            Some(c) if c == name => 1e-2,
            _ => 0.0,
        };
        let mut worst = 0.0f64;
        for j in 0..model.params.tensor(i).len() {
            let orig = model.params.tensor(i).data()[j];
            model.params.tensor_mut(i).data_mut()[j] = orig + step;
            let lp = loss_value(model, batch)?;
            model.params.tensor_mut(i).data_mut()[j] = orig - step;
            let lm = loss_value(model, batch)?;
            model.params.tensor_mut(i).data_mut()[j] = orig;
            let fd = (lp - lm) / (2.0 * step);
            let a = analytic[i].data()[j] + bias;
            worst = worst.max(rel_err(a, fd));
        }
        checks.push(ParamCheck { name, max_rel_err: worst });
    }
    Ok(checks)
}

/// Run the full check over `seeds` seeded model/batch pairs.
pub fn run(seeds: usize) -> Result<GradCheckReport> {
    let mut per_module: BTreeMap<String, f64> = BTreeMap::new();
    let mut worst = ("".to_string(), 0.0f64);
    let mut scalars = 0usize;
    for s in 0..seeds {
        let mut cfg = tiny_config();
        cfg.init_seed = 1000 + s as u64;
        let mut model = AseaModel::new(cfg)?;
        scalars += model.trainable_params();
        let batch = tiny_batch(77 + s as u64);
        for c in check_model(&mut model, &batch, FD_STEP, None)? {
            let module = c.name.split('.').next().unwrap_or("other").to_string();
            let slot = per_module.entry(module).or_insert(0.0);
            *slot = slot.max(c.max_rel_err);
            if c.max_rel_err > worst.1 {
                worst = (c.name, c.max_rel_err);
            }
        }
    }
    Ok(GradCheckReport {
        seeds,
        scalars_checked: scalars,
        max_rel_err: worst.1,
        worst_param: worst.0,
        per_module,
        tolerance: REL_TOL,
        passed: worst.1 <= REL_TOL,
    })
}
