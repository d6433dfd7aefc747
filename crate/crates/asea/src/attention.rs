//! Cross-person attention over the selected joints: each person's active
//! joints query the other person's active joints, per frame, with shared
//! projections. Inactive keys are masked out of the softmax; inactive query
//! joints pass through unchanged (exact residual identity).

use crate::autodiff::{Tape, Var};
use crate::error::{AseaError, Result};
use crate::nn::{Linear, ParamSet};
use crate::tensor::Tensor;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct EaParams {
    pub w_q: Linear,
    pub w_k: Linear,
    pub w_v: Linear,
    pub w_o: Linear,
    pub channels: usize,
    pub d: usize,
}

impl EaParams {
    /// `d` is the shared query/key/value width (default C/2, floor 1).
    pub fn init(
        ps: &mut ParamSet,
        rng: &mut ChaCha8Rng,
        name: &str,
        channels: usize,
        d: usize,
    ) -> Result<EaParams> {
        if d == 0 {
            return Err(AseaError::Config("attention width must be >= 1".into()));
        }
        let w_q = Linear::init(ps, rng, &format!("{name}.w_q"), channels, d, false);
        let w_k = Linear::init(ps, rng, &format!("{name}.w_k"), channels, d, false);
        let w_v = Linear::init(ps, rng, &format!("{name}.w_v"), channels, d, false);
        let w_o = Linear::init(ps, rng, &format!("{name}.w_o"), d, channels, true);
        Ok(EaParams { w_q, w_k, w_v, w_o, channels, d })
    }
}

/// Raw attention weights and attended values, for inspection/export.
#[derive(Debug, Clone)]
pub struct AttentionRecord {
    /// `[B, T, N, N]` per person: weight of (query joint, key joint); rows of
    /// inactive query joints are zeroed.
    pub alpha: [Tensor; 2],
    /// `[B, T, N, d]` attended values per person, before output projection.
    pub attended: [Tensor; 2],
}

#[derive(Debug, Serialize)]
pub struct AttentionEdge {
    pub query_person: usize,
    pub query_joint: usize,
    pub key_joint: usize,
    pub weight: f64,
}

impl AttentionRecord {
    /// All non-zero attention edges of one frame of one sample.
    pub fn export_frame(&self, sample: usize, frame: usize) -> Vec<AttentionEdge> {
        let mut out = Vec::new();
        for person in 0..2 {
            let a = &self.alpha[person];
            let n = a.shape()[2];
            for qi in 0..n {
                for ki in 0..n {
                    let w = a.at(&[sample, frame, qi, ki]);
                    if w != 0.0 {
                        out.push(AttentionEdge {
                            query_person: person,
                            query_joint: qi,
                            key_joint: ki,
                            weight: w,
                        });
                    }
                }
            }
        }
        out
    }
}

fn check_masks(hard_mask: &Tensor, b: usize, n: usize) -> Result<()> {
    if hard_mask.shape() != [b, 2, n] {
        return Err(AseaError::Shape(format!(
            "active mask must be [B={b}, 2, N={n}], got {:?}",
            hard_mask.shape()
        )));
    }
    for bi in 0..b {
        for p in 0..2 {
            let any = (0..n).any(|j| hard_mask.at(&[bi, p, j]) != 0.0);
            if !any {
                return Err(AseaError::Contract(format!(
                    "no active joints for sample {bi} person {p}; selection must keep at least one"
                )));
            }
        }
    }
    Ok(())
}

/// One direction of attention: person `qi` queries person `ki`.
/// `xs[p]: [B, C, T, N]` in joint-feature layout `[B, T, N, C]` is derived
/// internally. Returns (residual output `[B, C, T, N]`, alpha, attended).
#[allow(clippy::too_many_arguments)]
fn attend_one(
    tape: &mut Tape,
    binds: &[Var],
    p: &EaParams,
    x_q: Var,
    x_k: Var,
    key_mask: Tensor,   // [B, 1, 1, N]
    query_mask: Tensor, // [B, 1, N, 1]
    pad_mask: &Tensor,  // [B, T]
    gate_q: Option<Var>, // [B, 1, N, 1] soft gate on the update
) -> Result<(Var, Var, Var)> {
    let shape = tape.value(x_q).shape().to_vec();
    let (b, _c, t, _n) = (shape[0], shape[1], shape[2], shape[3]);
    let fq = tape.permute(x_q, &[0, 2, 3, 1])?; // [B, T, N, C]
    let fk = tape.permute(x_k, &[0, 2, 3, 1])?;
    let q = p.w_q.apply(tape, binds, fq)?; // [B, T, N, d]
    let k = p.w_k.apply(tape, binds, fk)?;
    let v = p.w_v.apply(tape, binds, fk)?;
    let kt = tape.permute(k, &[0, 1, 3, 2])?; // [B, T, d, N]
    let scores = tape.matmul(q, kt)?; // [B, T, Nq, Nk]
    let scaled = tape.scale(scores, 1.0 / (p.d as f64).sqrt());
    let alpha = tape.masked_softmax(scaled, 3, &key_mask)?;
    let attended = tape.matmul(alpha, v)?; // [B, T, Nq, d]
    let proj = p.w_o.apply(tape, binds, attended)?; // [B, T, Nq, C]
    // gate the update: inactive queries and pad frames receive nothing, so the
    // residual is an exact identity there (w_o bias included)
    let qm = tape.constant(query_mask);
    let mut update = tape.mul(proj, qm)?;
    if let Some(g) = gate_q {
        update = tape.mul(update, g)?;
    }
    let pm = tape.constant(pad_mask.reshape(&[b, t, 1, 1])?);
    update = tape.mul(update, pm)?;
    let back = tape.permute(update, &[0, 3, 1, 2])?; // [B, C, T, N]
    let out = tape.add(x_q, back)?;
    Ok((out, alpha, attended))
}

/// Cross-person attention with residual connection.
/// `x: [B, C, T, 2, N]`; `hard_mask: [B, 2, N]` in {0,1} (1 = active joint);
/// `gates`: optional differentiable `[B, 2, N]` soft gates scaling the update
/// (training relaxation). Returns the updated `[B, C, T, 2, N]` and a record.
pub fn ea_forward(
    tape: &mut Tape,
    binds: &[Var],
    p: &EaParams,
    x: Var,
    hard_mask: &Tensor,
    gates: Option<Var>,
    pad_mask: &Tensor,
) -> Result<(Var, AttentionRecord)> {
    let shape = tape.value(x).shape().to_vec();
    if shape.len() != 5 || shape[3] != 2 {
        return Err(AseaError::Shape(format!(
            "attention expects [B, C, T, 2, N], got {shape:?}"
        )));
    }
    let (b, c, t, n) = (shape[0], shape[1], shape[2], shape[4]);
    check_masks(hard_mask, b, n)?;

    let mut persons = Vec::new();
    for pi in 0..2 {
        let s = tape.slice(x, 3, pi, 1)?;
        persons.push(tape.reshape(s, &[b, c, t, n])?);
    }
    let gate_parts: [Option<Var>; 2] = match gates {
        Some(g) => {
            let mut parts = Vec::new();
            for pi in 0..2 {
                let s = tape.slice(g, 1, pi, 1)?;
                parts.push(Some(tape.reshape(s, &[b, 1, n, 1])?));
            }
            [parts[0], parts[1]]
        }
        None => [None, None],
    };

    let mask_of = |person: usize, as_key: bool| -> Result<Tensor> {
        let m = Tensor::from_fn(&[b, n], |ix| hard_mask.at(&[ix[0], person, ix[1]]));
        if as_key {
            m.reshape(&[b, 1, 1, n])
        } else {
            m.reshape(&[b, 1, n, 1])
        }
    };

    let mut outs = Vec::new();
    let mut alphas = Vec::new();
    let mut atts = Vec::new();
    for pi in 0..2 {
        let other = 1 - pi;
        let (out, alpha, attended) = attend_one(
            tape,
            binds,
            p,
            persons[pi],
            persons[other],
            mask_of(other, true)?,
            mask_of(pi, false)?,
            pad_mask,
            gate_parts[pi],
        )?;
        outs.push(tape.reshape(out, &[b, c, t, 1, n])?);
        // zero the rows of inactive query joints in the exported weights
        let qmask = mask_of(pi, false)?;
        let alpha_masked = tape.value(alpha).mul(&qmask)?;
        alphas.push(alpha_masked);
        atts.push(tape.value(attended).clone());
    }
    let stacked = tape.concat(&outs, 3)?;
    let record = AttentionRecord {
        alpha: [alphas.remove(0), alphas.remove(0)],
        attended: [atts.remove(0), atts.remove(0)],
    };
    Ok((stacked, record))
}

/// Fold the person axis into the joint axis: `[B, C, T, 2, N] -> [B, C, T, 2N]`.
pub fn concat_persons(tape: &mut Tape, x: Var) -> Result<Var> {
    let s = tape.value(x).shape().to_vec();
    if s.len() != 5 {
        return Err(AseaError::Shape(format!("expected rank-5 input, got {s:?}")));
    }
    tape.reshape(x, &[s[0], s[1], s[2], s[3] * s[4]])
}
