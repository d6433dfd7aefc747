//! Adaptive temporal node amplitude calculation: per-frame joint energies,
//! variance-driven temporal weights, global node amplitudes, a learnable
//! statistical threshold, and the active-node mask with its non-empty
//! safeguard. Also the velocity-based selection used for ablations.
//!
//! The differentiable pieces are tape compositions; the pure-tensor wrappers
//! below evaluate them on a throwaway tape so tests and the inference path
//! share one implementation.

use crate::autodiff::{Tape, UnaryKind, Var};
use crate::error::{AseaError, Result};
use crate::tensor::Tensor;
use serde::Serialize;

/// Floor inside the sqrt of the amplitude standard deviation on the
/// differentiable path; keeps the gradient bounded at degenerate batches.
const SIGMA_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AtnacParams {
    /// Temperature of the temporal softmax.
    pub gamma: f64,
    /// Soft-relaxation temperature, as a multiple of the per-sample sigma.
    pub beta: f64,
}

/// Everything the selection produced for one person of one batch.
#[derive(Debug, Clone)]
pub struct NodeSelection {
    /// `[B, T, N]` joint energies.
    pub energies: Tensor,
    /// `[B, T]` per-frame energy variance; -inf at pad frames.
    pub variance: Tensor,
    /// `[B, T]` temporal weights; exactly 0 at pad frames.
    pub weights: Tensor,
    /// `[B, N]` global node amplitudes.
    pub amplitudes: Tensor,
    /// `[B]` amplitude mean.
    pub mean: Tensor,
    /// `[B]` amplitude standard deviation (population).
    pub std: Tensor,
    /// `[B]` threshold mean + alpha * std.
    pub threshold: Tensor,
    /// `[B, N]` in {0, 1}; at least one active node per sample.
    pub mask: Tensor,
}

// ---------------------------------------------------------------------------
// Tape compositions (training path)
// ---------------------------------------------------------------------------

/// Eq-style energy: `E[b,t,n] = || x[b,:,t,n] ||_2` over the channel axis.
pub fn joint_energy_t(tape: &mut Tape, x: Var) -> Result<Var> {
    tape.l2_norm(x, 1)
}

/// Population variance over joints per frame: `[B,T,N] -> [B,T]`.
pub fn frame_variance_t(tape: &mut Tape, e: Var) -> Result<Var> {
    let mu = tape.mean(e, &[2], true);
    let d = tape.sub(e, mu)?;
    let sq = tape.unary(d, UnaryKind::Square);
    Ok(tape.mean(sq, &[2], false))
}

/// `W[b,:] = softmax(gamma * V[b,:])` over real frames; pad frames get 0.
pub fn temporal_weights_t(tape: &mut Tape, v: Var, gamma: f64, pad_mask: &Tensor) -> Result<Var> {
    if gamma < 0.0 {
        return Err(AseaError::Config(format!("gamma must be >= 0, got {gamma}")));
    }
    let scaled = tape.scale(v, gamma);
    tape.masked_softmax(scaled, 1, pad_mask)
}

/// `S[b,n] = sum_t W[b,t] * E[b,t,n]`.
pub fn node_amplitude_t(tape: &mut Tape, e: Var, w: Var) -> Result<Var> {
    let shape = tape.value(w).shape().to_vec();
    let w3 = tape.reshape(w, &[shape[0], shape[1], 1])?;
    let prod = tape.mul(e, w3)?;
    Ok(tape.sum(prod, &[1], false))
}

/// Per-sample amplitude statistics and threshold on the tape:
/// returns (mean `[B,1]`, sigma `[B,1]`, tau `[B,1]`).
pub fn threshold_t(tape: &mut Tape, s: Var, alpha: Var) -> Result<(Var, Var, Var)> {
    let mu = tape.mean(s, &[1], true);
    let d = tape.sub(s, mu)?;
    let sq = tape.unary(d, UnaryKind::Square);
    let var = tape.mean(sq, &[1], true);
    let var_eps = tape.add_scalar(var, SIGMA_EPS);
    let sigma = tape.unary(var_eps, UnaryKind::Sqrt);
    let asig = tape.mul(alpha, sigma)?;
    let tau = tape.add(mu, asig)?;
    Ok((mu, sigma, tau))
}

/// Differentiable relaxation `sigmoid((S - tau) / beta)`, `beta: [B,1]` or `[1]`.
pub fn soft_mask_t(tape: &mut Tape, s: Var, tau: Var, beta: Var) -> Result<Var> {
    let d = tape.sub(s, tau)?;
    let scaled = tape.div(d, beta)?;
    Ok(tape.sigmoid(scaled))
}

// ---------------------------------------------------------------------------
// Pure wrappers and the hard selection
// ---------------------------------------------------------------------------

pub fn joint_energy(x: &Tensor) -> Result<Tensor> {
    let mut tape = Tape::new();
    let xv = tape.constant(x.clone());
    let e = joint_energy_t(&mut tape, xv)?;
    Ok(tape.value(e).clone())
}

/// Per-frame population variance; pad frames get a -inf sentinel so the
/// weighting step can never pick them.
pub fn frame_variance(e: &Tensor, pad_mask: Option<&Tensor>) -> Result<Tensor> {
    let mut tape = Tape::new();
    let ev = tape.constant(e.clone());
    let v = frame_variance_t(&mut tape, ev)?;
    let mut out = tape.value(v).clone();
    if let Some(mask) = pad_mask {
        for (o, &m) in out.data_mut().iter_mut().zip(mask.data()) {
            if m == 0.0 {
                *o = f64::NEG_INFINITY;
            }
        }
    }
    Ok(out)
}

pub fn temporal_weights(v: &Tensor, gamma: f64, pad_mask: Option<&Tensor>) -> Result<Tensor> {
    let ones = Tensor::full(v.shape(), 1.0);
    let mask = pad_mask.cloned().unwrap_or(ones);
    // -inf sentinels are equivalent to masking; scrub them so 0 * inf
    // cannot poison the tape value
    let v_clean = v.map(|x| if x.is_finite() { x } else { 0.0 });
    let mut tape = Tape::new();
    let vv = tape.constant(v_clean);
    let w = temporal_weights_t(&mut tape, vv, gamma, &mask)?;
    Ok(tape.value(w).clone())
}

pub fn node_amplitude(e: &Tensor, w: &Tensor) -> Result<Tensor> {
    let mut tape = Tape::new();
    let ev = tape.constant(e.clone());
    let wv = tape.constant(w.clone());
    let s = node_amplitude_t(&mut tape, ev, wv)?;
    Ok(tape.value(s).clone())
}

/// Hard selection: population statistics, strict `S > tau`, and the safeguard
/// that keeps the highest-amplitude joint (lowest index on ties) when nothing
/// passes. Returns (mean, std, tau, mask).
pub fn select_active(s: &Tensor, alpha: f64) -> (Tensor, Tensor, Tensor, Tensor) {
    let (b, n) = (s.shape()[0], s.shape()[1]);
    let mut mean = Tensor::zeros(&[b]);
    let mut std = Tensor::zeros(&[b]);
    let mut tau = Tensor::zeros(&[b]);
    let mut mask = Tensor::zeros(&[b, n]);
    for bi in 0..b {
        let row: Vec<f64> = (0..n).map(|j| s.at(&[bi, j])).collect();
        let mu = row.iter().sum::<f64>() / n as f64;
        let var = row.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n as f64;
        let sigma = var.sqrt();
        let t = mu + alpha * sigma;
        mean.data_mut()[bi] = mu;
        std.data_mut()[bi] = sigma;
        tau.data_mut()[bi] = t;
        let mut any = false;
        for j in 0..n {
            if row[j] > t {
                *mask.at_mut(&[bi, j]) = 1.0;
                any = true;
            }
        }
        if !any {
            let mut best = 0usize;
            for j in 1..n {
                if row[j] > row[best] {
                    best = j;
                }
            }
            *mask.at_mut(&[bi, best]) = 1.0;
        }
    }
    (mean, std, tau, mask)
}

pub fn soft_mask(s: &Tensor, tau: &Tensor, beta: f64) -> Result<Tensor> {
    if beta <= 0.0 {
        return Err(AseaError::Config(format!("beta must be > 0, got {beta}")));
    }
    let (b, n) = (s.shape()[0], s.shape()[1]);
    let tau2 = tau.reshape(&[b, 1])?;
    let mut tape = Tape::new();
    let sv = tape.constant(s.clone());
    let tv = tape.constant(tau2);
    let bv = tape.constant(Tensor::scalar(beta));
    let m = soft_mask_t(&mut tape, sv, tv, bv)?;
    let _ = n;
    Ok(tape.value(m).clone())
}

/// Full selection from features `x: [B, C, T, N]`.
pub fn select_from_features(
    x: &Tensor,
    pad_mask: Option<&Tensor>,
    gamma: f64,
    alpha: f64,
) -> Result<NodeSelection> {
    let e = joint_energy(x)?;
    let v = frame_variance(&e, pad_mask)?;
    let w = temporal_weights(&v, gamma, pad_mask)?;
    let s = node_amplitude(&e, &w)?;
    let (mean, std, tau, mask) = select_active(&s, alpha);
    Ok(NodeSelection {
        energies: e,
        variance: v,
        weights: w,
        amplitudes: s,
        mean,
        std,
        threshold: tau,
        mask,
    })
}

/// Per-frame joint speeds on raw coordinates: `[B, 3, T, N] -> [B, T-1, N]`.
pub fn joint_speeds(coords: &Tensor) -> Result<Tensor> {
    let s = coords.shape();
    if s.len() != 4 {
        return Err(AseaError::Shape(format!("expected [B,3,T,N], got {s:?}")));
    }
    let (b, c, t, n) = (s[0], s[1], s[2], s[3]);
    if t < 2 {
        return Err(AseaError::Length(format!("velocity needs T >= 2, got {t}")));
    }
    Ok(Tensor::from_fn(&[b, t - 1, n], |ix| {
        let (bi, ti, j) = (ix[0], ix[1], ix[2]);
        let mut d2 = 0.0;
        for ci in 0..c {
            let d = coords.at(&[bi, ci, ti + 1, j]) - coords.at(&[bi, ci, ti, j]);
            d2 += d * d;
        }
        d2.sqrt()
    }))
}

/// Velocity-based selection ablation: speeds on raw joint positions take the
/// place of feature energies, then the same weighting/threshold pipeline runs.
pub fn velocity_selection(
    coords: &Tensor,
    pad_mask: Option<&Tensor>,
    gamma: f64,
    alpha: f64,
) -> Result<NodeSelection> {
    let speeds = joint_speeds(coords)?;
    // a speed frame is real iff both frames it spans are real
    let speed_mask = pad_mask.map(|m| {
        let (b, t) = (m.shape()[0], m.shape()[1]);
        Tensor::from_fn(&[b, t - 1], |ix| m.at(&[ix[0], ix[1]]) * m.at(&[ix[0], ix[1] + 1]))
    });
    let v = frame_variance(&speeds, speed_mask.as_ref())?;
    let w = temporal_weights(&v, gamma, speed_mask.as_ref())?;
    let s = node_amplitude(&speeds, &w)?;
    let (mean, std, tau, mask) = select_active(&s, alpha);
    Ok(NodeSelection {
        energies: speeds,
        variance: v,
        weights: w,
        amplitudes: s,
        mean,
        std,
        threshold: tau,
        mask,
    })
}

/// `velocity_amplitude` of the ablation study: just the amplitudes.
pub fn velocity_amplitude(coords: &Tensor, gamma: f64) -> Result<Tensor> {
    let speeds = joint_speeds(coords)?;
    let v = frame_variance(&speeds, None)?;
    let w = temporal_weights(&v, gamma, None)?;
    node_amplitude(&speeds, &w)
}

// ---------------------------------------------------------------------------
// JSON export (the data behind the node-selection figures)
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct SelectionExport {
    pub person: usize,
    pub amplitudes: Vec<f64>,
    pub threshold: f64,
    pub active: Vec<usize>,
}

impl NodeSelection {
    pub fn export(&self, sample: usize, person: usize) -> SelectionExport {
        let n = self.amplitudes.shape()[1];
        SelectionExport {
            person,
            amplitudes: (0..n).map(|j| self.amplitudes.at(&[sample, j])).collect(),
            threshold: self.threshold.data()[sample],
            active: (0..n)
                .filter(|&j| self.mask.at(&[sample, j]) == 1.0)
                .collect(),
        }
    }
}
