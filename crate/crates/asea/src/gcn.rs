//! Per-person spatial encoding: channel-wise topology refinement and graph
//! feature aggregation, stacked with the multi-scale temporal module into
//! encoder blocks. The same block parameters are applied to each person.

use crate::autodiff::{Tape, UnaryKind, Var};
use crate::error::Result;
use crate::nn::{BatchNorm, BnState, Linear, ParamSet, TConv};
use crate::temporal::MsTemporal;
use crate::tensor::Tensor;
use rand_chacha::ChaCha8Rng;

/// One encoder block: channel-wise refined graph aggregation followed by the
/// multi-scale temporal module, with a residual connection (1x1 projection
/// when the channel count changes).
#[derive(Debug, Clone)]
pub struct GcnBlock {
    pub psi: Linear,
    pub phi: Linear,
    pub delta: Linear,
    pub w_feat: Linear,
    pub bn: BatchNorm,
    pub alpha_refine: usize,
    pub temporal: MsTemporal,
    pub residual: Option<TConv>,
    pub c_in: usize,
    pub c_out: usize,
}

impl GcnBlock {
    pub fn init(
        ps: &mut ParamSet,
        rng: &mut ChaCha8Rng,
        states: &mut Vec<BnState>,
        name: &str,
        c_in: usize,
        c_out: usize,
        reduction_ratio: usize,
        double_tconv: bool,
    ) -> Result<GcnBlock> {
        let c_r = (c_in / reduction_ratio).max(1);
        let psi = Linear::init(ps, rng, &format!("{name}.psi"), c_in, c_r, true);
        let phi = Linear::init(ps, rng, &format!("{name}.phi"), c_in, c_r, true);
        let delta = Linear::init(ps, rng, &format!("{name}.delta"), c_r, c_out, true);
        let w_feat = Linear::init(ps, rng, &format!("{name}.w_feat"), c_in, c_out, true);
        let bn = BatchNorm::init(ps, &format!("{name}.bn"), c_out, states);
        let alpha_refine = ps.push(&format!("{name}.alpha_refine"), Tensor::zeros(&[1]), true, false);
        let temporal = MsTemporal::init(ps, rng, states, &format!("{name}.tm"), c_out, c_out, double_tconv)?;
        let residual = (c_in != c_out)
            .then(|| TConv::init(ps, rng, &format!("{name}.res"), c_in, c_out, 1, 1));
        Ok(GcnBlock { psi, phi, delta, w_feat, bn, alpha_refine, temporal, residual, c_in, c_out })
    }
}

/// Input-dependent channel-specific correlations Q:
/// features are mean-pooled over T, then
/// `q_ij = delta(tanh(psi(xbar_i) - phi(xbar_j)))` per sample.
/// `x: [B, C, T, N] -> Q: [B, N, N, C_out]`.
pub fn channel_correlation(
    tape: &mut Tape,
    binds: &[Var],
    block: &GcnBlock,
    x: Var,
) -> Result<Var> {
    let shape = tape.value(x).shape().to_vec();
    let (b, _c, _t, n) = (shape[0], shape[1], shape[2], shape[3]);
    let pooled = tape.mean(x, &[2], false); // [B, C, N]
    let feat = tape.permute(pooled, &[0, 2, 1])?; // [B, N, C]
    let a = block.psi.apply(tape, binds, feat)?; // [B, N, C_r]
    let bq = block.phi.apply(tape, binds, feat)?; // [B, N, C_r]
    let c_r = block.psi.out_f;
    let a1 = tape.reshape(a, &[b, n, 1, c_r])?;
    let b1 = tape.reshape(bq, &[b, 1, n, c_r])?;
    let diff = tape.sub(a1, b1)?; // [B, N, N, C_r]
    let act = tape.unary(diff, UnaryKind::Tanh);
    block.delta.apply(tape, binds, act) // [B, N, N, C_out]
}

/// `R[b,i,j,c] = A[i,j] + alpha * Q[b,i,j,c]` — A broadcast over channels.
pub fn refine_topology(tape: &mut Tape, adjacency: Var, q: Var, alpha: Var) -> Result<Var> {
    let n = tape.value(adjacency).shape()[0];
    let a4 = tape.reshape(adjacency, &[1, n, n, 1])?;
    let aq = tape.mul(alpha, q)?;
    tape.add(a4, aq)
}

/// Aggregate features over the refined topology:
/// `out[b,c,t,i] = sum_j R[b,i,j,c] * e[b,c,t,j]` with `e = W_feat(x)`.
/// Returns the pre-normalization aggregate `[B, C_out, T, N]`.
pub fn spatial_aggregate(
    tape: &mut Tape,
    binds: &[Var],
    block: &GcnBlock,
    x: Var,
    r: Var,
) -> Result<Var> {
    let xp = tape.permute(x, &[0, 2, 3, 1])?; // [B, T, N, C_in]
    let e = block.w_feat.apply(tape, binds, xp)?; // [B, T, N, C_out]
    let ep = tape.permute(e, &[0, 3, 2, 1])?; // [B, C_out, N, T]
    let rp = tape.permute(r, &[0, 3, 1, 2])?; // [B, C_out, N(i), N(j)]
    let agg = tape.matmul(rp, ep)?; // [B, C_out, N(i), T]
    tape.permute(agg, &[0, 1, 3, 2]) // [B, C_out, T, N]
}

/// The per-person encoder: a stack of blocks sharing one trainable adjacency.
/// Each block runs aggregate -> norm -> relu -> temporal -> residual -> relu,
/// with pad frames re-zeroed after every block.
#[derive(Debug, Clone)]
pub struct Encoder {
    pub adjacency: usize,
    pub blocks: Vec<GcnBlock>,
}

impl Encoder {
    pub fn init(
        ps: &mut ParamSet,
        rng: &mut ChaCha8Rng,
        states: &mut Vec<BnState>,
        adjacency_init: Tensor,
        c_in: usize,
        widths: &[usize],
        reduction_ratio: usize,
        double_tconv: bool,
    ) -> Result<Encoder> {
        let adjacency = ps.push("encoder.adjacency", adjacency_init, true, false);
        let mut blocks = Vec::new();
        let mut c_prev = c_in;
        for (i, &c_out) in widths.iter().enumerate() {
            blocks.push(GcnBlock::init(
                ps,
                rng,
                states,
                &format!("encoder.block{i}"),
                c_prev,
                c_out,
                reduction_ratio,
                double_tconv,
            )?);
            c_prev = c_out;
        }
        Ok(Encoder { adjacency, blocks })
    }

    /// Encode one person's features `[B, C, T, N] -> [B, C_last, T, N]`.
    ///
    /// Each person is encoded independently with the same parameters, so the
    /// encoding of one person never depends on the other.
    pub fn forward(
        &self,
        tape: &mut Tape,
        binds: &[Var],
        mut x: Var,
        pad_mask: &Tensor,
        train: bool,
        states: &mut [BnState],
    ) -> Result<Var> {
        for block in &self.blocks {
            let q = channel_correlation(tape, binds, block, x)?;
            let r = refine_topology(tape, binds[self.adjacency], q, binds[block.alpha_refine])?;
            let agg = spatial_aggregate(tape, binds, block, x, r)?;
            let normed = block.bn.apply(tape, binds, agg, pad_mask, train, states)?;
            let activated = tape.relu(normed);
            let temporal = crate::temporal::ms_temporal_forward(
                tape,
                binds,
                &block.temporal,
                activated,
                pad_mask,
                train,
                states,
            )?;
            let res = match &block.residual {
                Some(proj) => proj.apply(tape, binds, x)?,
                None => x,
            };
            let summed = tape.add(temporal, res)?;
            let out = tape.relu(summed);
            let shape = tape.value(out).shape().to_vec();
            let mask4 = pad_mask.reshape(&[shape[0], 1, shape[2], 1])?;
            let mv = tape.constant(mask4);
            x = tape.mul(out, mv)?;
        }
        Ok(x)
    }
}
