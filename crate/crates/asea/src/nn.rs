//! Parameter registry and the small layer vocabulary built on the tape.
//!
//! Parameters live outside any tape in a [`ParamSet`]; each forward pass binds
//! them as leaves so the optimizer and the finite-difference checker can treat
//! them uniformly by name.

use crate::autodiff::{Tape, Var};
use crate::error::Result;
use crate::tensor::Tensor;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct ParamEntry {
    pub name: String,
    pub tensor: Tensor,
    pub trainable: bool,
    /// Weight decay applies only to weight matrices, not biases/norms/scalars.
    pub decay: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ParamSet {
    entries: Vec<ParamEntry>,
}

impl ParamSet {
    pub fn new() -> ParamSet {
        ParamSet::default()
    }

    pub fn push(&mut self, name: &str, tensor: Tensor, trainable: bool, decay: bool) -> usize {
        self.entries.push(ParamEntry {
            name: name.to_string(),
            tensor,
            trainable,
            decay,
        });
        self.entries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ParamEntry] {
        &self.entries
    }

    pub fn tensor(&self, idx: usize) -> &Tensor {
        &self.entries[idx].tensor
    }

    pub fn tensor_mut(&mut self, idx: usize) -> &mut Tensor {
        &mut self.entries[idx].tensor
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.entries[idx].name
    }

    /// Bind every parameter as a tape leaf; returns vars parallel to entries.
    pub fn bind(&self, tape: &mut Tape) -> Vec<Var> {
        self.entries
            .iter()
            .map(|e| tape.leaf(e.tensor.clone()))
            .collect()
    }

    pub fn trainable_scalar_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.trainable)
            .map(|e| e.tensor.len())
            .sum()
    }
}

pub fn xavier_uniform(rng: &mut ChaCha8Rng, shape: &[usize], fan_in: usize, fan_out: usize) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Tensor::from_fn(shape, |_| rng.gen_range(-limit..limit))
}

// ---------------------------------------------------------------------------
// Linear
// ---------------------------------------------------------------------------

/// Dense map over the trailing axis: `y[..., out] = x[..., in] W + b`.
#[derive(Debug, Clone)]
pub struct Linear {
    pub w: usize,
    pub b: Option<usize>,
    pub in_f: usize,
    pub out_f: usize,
}

impl Linear {
    pub fn init(
        ps: &mut ParamSet,
        rng: &mut ChaCha8Rng,
        name: &str,
        in_f: usize,
        out_f: usize,
        bias: bool,
    ) -> Linear {
        let w = ps.push(
            &format!("{name}.w"),
            xavier_uniform(rng, &[in_f, out_f], in_f, out_f),
            true,
            true,
        );
        let b = bias.then(|| ps.push(&format!("{name}.b"), Tensor::zeros(&[out_f]), true, false));
        Linear { w, b, in_f, out_f }
    }

    pub fn apply(&self, tape: &mut Tape, binds: &[Var], x: Var) -> Result<Var> {
        let y = tape.matmul(x, binds[self.w])?;
        match self.b {
            Some(b) => tape.add(y, binds[b]),
            None => Ok(y),
        }
    }

    pub fn param_count(&self, ps: &ParamSet) -> usize {
        ps.tensor(self.w).len() + self.b.map(|b| ps.tensor(b).len()).unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// Temporal convolution (with bias)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TConv {
    pub kernel: usize,
    pub bias: usize,
    pub dilation: usize,
    pub c_in: usize,
    pub c_out: usize,
    pub k: usize,
}

impl TConv {
    pub fn init(
        ps: &mut ParamSet,
        rng: &mut ChaCha8Rng,
        name: &str,
        c_in: usize,
        c_out: usize,
        k: usize,
        dilation: usize,
    ) -> TConv {
        let kernel = ps.push(
            &format!("{name}.kernel"),
            xavier_uniform(rng, &[c_out, c_in, k], c_in * k, c_out * k),
            true,
            true,
        );
        let bias = ps.push(&format!("{name}.bias"), Tensor::zeros(&[c_out]), true, false);
        TConv { kernel, bias, dilation, c_in, c_out, k }
    }

    /// `x: [B, C_in, T, N] -> [B, C_out, T, N]` (stride 1).
    pub fn apply(&self, tape: &mut Tape, binds: &[Var], x: Var) -> Result<Var> {
        let y = tape.temporal_conv(x, binds[self.kernel], self.dilation, 1)?;
        let b = tape.reshape(binds[self.bias], &[1, self.c_out, 1, 1])?;
        tape.add(y, b)
    }
}

// ---------------------------------------------------------------------------
// Per-channel normalization
// ---------------------------------------------------------------------------

/// Running statistics for one normalization layer (inference path).
#[derive(Debug, Clone)]
pub struct BnState {
    pub mean: Tensor,
    pub var: Tensor,
}

#[derive(Debug, Clone)]
pub struct BatchNorm {
    pub gamma: usize,
    pub beta: usize,
    /// Index into the model's `Vec<BnState>`.
    pub state: usize,
    pub channels: usize,
}

pub const BN_EPS: f64 = 1e-5;
pub const BN_MOMENTUM: f64 = 0.9;

impl BatchNorm {
    pub fn init(ps: &mut ParamSet, name: &str, channels: usize, states: &mut Vec<BnState>) -> BatchNorm {
        let gamma = ps.push(&format!("{name}.gamma"), Tensor::full(&[channels], 1.0), true, false);
        let beta = ps.push(&format!("{name}.beta"), Tensor::zeros(&[channels]), true, false);
        states.push(BnState {
            mean: Tensor::zeros(&[channels]),
            var: Tensor::full(&[channels], 1.0),
        });
        BatchNorm { gamma, beta, state: states.len() - 1, channels }
    }

    /// `x: [B, C, T, N]` with pad mask `[B, T]` (1 = real frame). Training mode
    /// uses masked batch statistics and updates the running averages; inference
    /// uses the stored running averages. Pad frames are re-zeroed on output.
    pub fn apply(
        &self,
        tape: &mut Tape,
        binds: &[Var],
        x: Var,
        pad_mask: &Tensor,
        train: bool,
        states: &mut [BnState],
    ) -> Result<Var> {
        let shape = tape.value(x).shape().to_vec();
        let (b, c, t, n) = (shape[0], shape[1], shape[2], shape[3]);
        debug_assert_eq!(c, self.channels);
        let mask4 = pad_mask.reshape(&[b, 1, t, 1])?;
        let mask_var = tape.constant(mask4.clone());
        let count = pad_mask.data().iter().sum::<f64>() * n as f64;
        let gamma = tape.reshape(binds[self.gamma], &[1, c, 1, 1])?;
        let beta = tape.reshape(binds[self.beta], &[1, c, 1, 1])?;
        let normalized = if train {
            let xm = tape.mul(x, mask_var)?;
            let s = tape.sum(xm, &[0, 2, 3], true);
            let mean = tape.scale(s, 1.0 / count);
            let diff = tape.sub(x, mean)?;
            let diffm = tape.mul(diff, mask_var)?;
            let sq = tape.unary(diffm, crate::autodiff::UnaryKind::Square);
            let var_s = tape.sum(sq, &[0, 2, 3], true);
            let var = tape.scale(var_s, 1.0 / count);
            // fold batch stats into the running averages
            let st = &mut states[self.state];
            let bm = tape.value(mean).reshape(&[c])?;
            let bv = tape.value(var).reshape(&[c])?;
            for i in 0..c {
                st.mean.data_mut()[i] =
                    BN_MOMENTUM * st.mean.data()[i] + (1.0 - BN_MOMENTUM) * bm.data()[i];
                st.var.data_mut()[i] =
                    BN_MOMENTUM * st.var.data()[i] + (1.0 - BN_MOMENTUM) * bv.data()[i];
            }
            let var_eps = tape.add_scalar(var, BN_EPS);
            let std = tape.unary(var_eps, crate::autodiff::UnaryKind::Sqrt);
            let inv = tape.unary(std, crate::autodiff::UnaryKind::Recip);
            tape.mul(diff, inv)?
        } else {
            let st = &states[self.state];
            let mean = tape.constant(st.mean.reshape(&[1, c, 1, 1])?);
            let inv = tape.constant(
                st.var
                    .map(|v| 1.0 / (v + BN_EPS).sqrt())
                    .reshape(&[1, c, 1, 1])?,
            );
            let diff = tape.sub(x, mean)?;
            tape.mul(diff, inv)?
        };
        let scaled = tape.mul(normalized, gamma)?;
        let shifted = tape.add(scaled, beta)?;
        tape.mul(shifted, mask_var)
    }
}
