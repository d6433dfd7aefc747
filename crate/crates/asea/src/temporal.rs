//! Four-branch multi-scale temporal module: three dilated-convolution
//! branches (dilations 1, 2, 3, kernel 5) each followed by a temporal
//! max-pool, plus a 1x1 pass-through branch. Branch outputs of C_out/4
//! channels are concatenated in fixed order. Joints are never mixed.

use crate::autodiff::{Tape, Var};
use crate::error::{AseaError, Result};
use crate::nn::{BnState, ParamSet, TConv};
use crate::tensor::Tensor;
use rand_chacha::ChaCha8Rng;

pub const BRANCH_DILATIONS: [usize; 3] = [1, 2, 3];
pub const TEMPORAL_KERNEL: usize = 5;
pub const POOL_WINDOW: usize = 3;

#[derive(Debug, Clone)]
struct ConvBranch {
    reduce: TConv,
    conv: TConv,
    /// Second stacked convolution, enabled by the `double_tconv` fidelity knob.
    conv2: Option<TConv>,
}

#[derive(Debug, Clone)]
pub struct MsTemporal {
    branches: Vec<ConvBranch>,
    passthrough: TConv,
    pub c_in: usize,
    pub c_out: usize,
}

impl MsTemporal {
    pub fn init(
        ps: &mut ParamSet,
        rng: &mut ChaCha8Rng,
        _states: &mut Vec<BnState>,
        name: &str,
        c_in: usize,
        c_out: usize,
        double_tconv: bool,
    ) -> Result<MsTemporal> {
        if c_out % 4 != 0 {
            return Err(AseaError::Config(format!(
                "temporal module output channels {c_out} must be divisible by 4"
            )));
        }
        let cb = c_out / 4;
        let mut branches = Vec::new();
        for (i, &d) in BRANCH_DILATIONS.iter().enumerate() {
            let reduce = TConv::init(ps, rng, &format!("{name}.branch{i}.reduce"), c_in, cb, 1, 1);
            let conv = TConv::init(
                ps,
                rng,
                &format!("{name}.branch{i}.conv"),
                cb,
                cb,
                TEMPORAL_KERNEL,
                d,
            );
            let conv2 = double_tconv.then(|| {
                TConv::init(
                    ps,
                    rng,
                    &format!("{name}.branch{i}.conv2"),
                    cb,
                    cb,
                    TEMPORAL_KERNEL,
                    d,
                )
            });
            branches.push(ConvBranch { reduce, conv, conv2 });
        }
        let passthrough = TConv::init(ps, rng, &format!("{name}.branch3.reduce"), c_in, cb, 1, 1);
        Ok(MsTemporal { branches, passthrough, c_in, c_out })
    }
}

/// `x: [B, C_in, T, N] -> [B, C_out, T, N]`, stride 1. Pad frames (mask 0)
/// are treated as zeros by the convolutions and as -inf by the max-pools,
/// and are re-zeroed on output.
pub fn ms_temporal_forward(
    tape: &mut Tape,
    binds: &[Var],
    p: &MsTemporal,
    x: Var,
    pad_mask: &Tensor,
    _train: bool,
    _states: &mut [BnState],
) -> Result<Var> {
    let shape = tape.value(x).shape().to_vec();
    let (b, _c, t, n) = (shape[0], shape[1], shape[2], shape[3]);
    let mask4 = pad_mask.reshape(&[b, 1, t, 1])?;
    // -1e30 at pad frames, 0 at real frames: keeps max-pools off the padding
    let neg_pad = mask4.map(|m| (m - 1.0) * 1e30);
    let mask_var = tape.constant(mask4.clone());
    let neg_var = tape.constant(neg_pad);
    let _ = n;
    let mut outs = Vec::new();
    for branch in &p.branches {
        let reduced = branch.reduce.apply(tape, binds, x)?;
        let reduced = tape.mul(reduced, mask_var)?;
        let mut conv = branch.conv.apply(tape, binds, reduced)?;
        if let Some(c2) = &branch.conv2 {
            let masked = tape.mul(conv, mask_var)?;
            conv = c2.apply(tape, binds, masked)?;
        }
        let sunk = tape.add(conv, neg_var)?;
        let pooled = tape.max_pool_t(sunk, POOL_WINDOW)?;
        outs.push(tape.mul(pooled, mask_var)?);
    }
    let pass = p.passthrough.apply(tape, binds, x)?;
    outs.push(tape.mul(pass, mask_var)?);
    tape.concat(&outs, 1)
}
