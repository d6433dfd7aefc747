//! Eager reverse-mode differentiation over [`Tensor`] values.
//!
//! Ops append nodes to a [`Tape`]; node ids are already in topological order,
//! so the backward sweep is a single reverse walk. A tape is confined to one
//! logical thread; tensors it produces are immutable.

use crate::error::{AseaError, Result};
use crate::tensor::{numel, strides_of, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryKind {
    Tanh,
    Relu,
    Sigmoid,
    Sqrt,
    Square,
    Recip,
    Exp,
}

#[derive(Debug)]
enum Op {
    Leaf,
    Add(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    AddScalar(Var),
    MatMul(Var, Var),
    Sum { x: Var, axes: Vec<usize>, keepdim: bool },
    Softmax { x: Var, axis: usize },
    MaskedSoftmax { x: Var, axis: usize },
    LogSoftmax { x: Var, axis: usize },
    Unary { x: Var, kind: UnaryKind },
    L2Norm { x: Var, axis: usize },
    TemporalConv { x: Var, kernel: Var, dilation: usize, stride: usize },
    MaxPoolT { x: Var, argmax: Vec<usize> },
    Concat { xs: Vec<Var>, axis: usize },
    Permute { x: Var, perm: Vec<usize> },
    Reshape { x: Var },
    Slice { x: Var, axis: usize, start: usize },
    PickClass { x: Var, labels: Vec<usize> },
}

struct Node {
    value: Tensor,
    op: Op,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Adjoints produced by [`Tape::backward`].
pub struct Grads {
    adjoints: Vec<Option<Tensor>>,
}

impl Grads {
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.adjoints[v.0].as_ref()
    }

    /// Gradient of `v`, zero-filled when the variable was never reached.
    pub fn grad_or_zero(&self, v: Var, shape: &[usize]) -> Tensor {
        self.adjoints[v.0]
            .clone()
            .unwrap_or_else(|| Tensor::zeros(shape))
    }
}

impl Tape {
    pub fn new() -> Tape {
        Tape::default()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf)
    }

    pub fn constant(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).add(self.value(b))?;
        Ok(self.push(v, Op::Add(a, b)))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).mul(self.value(b))?;
        Ok(self.push(v, Op::Mul(a, b)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let nb = self.scale(b, -1.0);
        self.add(a, nb)
    }

    pub fn div(&mut self, a: Var, b: Var) -> Result<Var> {
        let rb = self.unary(b, UnaryKind::Recip);
        self.mul(a, rb)
    }

    pub fn scale(&mut self, x: Var, c: f64) -> Var {
        let v = self.value(x).scale(c);
        self.push(v, Op::Scale(x, c))
    }

    pub fn add_scalar(&mut self, x: Var, c: f64) -> Var {
        let v = self.value(x).map(|t| t + c);
        self.push(v, Op::AddScalar(x))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).matmul(self.value(b))?;
        Ok(self.push(v, Op::MatMul(a, b)))
    }

    pub fn sum(&mut self, x: Var, axes: &[usize], keepdim: bool) -> Var {
        let v = self.value(x).sum_axes(axes, keepdim);
        self.push(v, Op::Sum { x, axes: axes.to_vec(), keepdim })
    }

    pub fn mean(&mut self, x: Var, axes: &[usize], keepdim: bool) -> Var {
        let n: usize = axes.iter().map(|&a| self.value(x).shape()[a]).product();
        let s = self.sum(x, axes, keepdim);
        self.scale(s, 1.0 / n as f64)
    }

    pub fn softmax(&mut self, x: Var, axis: usize) -> Result<Var> {
        let xv = self.value(x);
        if axis >= xv.rank() {
            return Err(AseaError::Shape(format!(
                "softmax axis {axis} out of bounds for {:?}",
                xv.shape()
            )));
        }
        let v = softmax_forward(xv, axis, None);
        Ok(self.push(v, Op::Softmax { x, axis }))
    }

    /// Softmax over unmasked entries; masked entries (mask == 0) get exactly 0.
    /// Fully masked slices produce all-zero output.
    pub fn masked_softmax(&mut self, x: Var, axis: usize, mask: &Tensor) -> Result<Var> {
        let xv = self.value(x);
        let mask_full = mask.expand_to(xv.shape())?;
        let v = softmax_forward(xv, axis, Some(&mask_full));
        Ok(self.push(v, Op::MaskedSoftmax { x, axis }))
    }

    pub fn log_softmax(&mut self, x: Var, axis: usize) -> Result<Var> {
        let xv = self.value(x);
        if axis >= xv.rank() {
            return Err(AseaError::Shape(format!(
                "log_softmax axis {axis} out of bounds for {:?}",
                xv.shape()
            )));
        }
        let v = log_softmax_forward(xv, axis);
        Ok(self.push(v, Op::LogSoftmax { x, axis }))
    }

    pub fn unary(&mut self, x: Var, kind: UnaryKind) -> Var {
        let v = match kind {
            UnaryKind::Tanh => self.value(x).map(f64::tanh),
            UnaryKind::Relu => self.value(x).map(|t| if t > 0.0 { t } else { 0.0 }),
            UnaryKind::Sigmoid => self.value(x).map(sigmoid),
            UnaryKind::Sqrt => self.value(x).map(f64::sqrt),
            UnaryKind::Square => self.value(x).map(|t| t * t),
            UnaryKind::Recip => self.value(x).map(|t| 1.0 / t),
            UnaryKind::Exp => self.value(x).map(f64::exp),
        };
        self.push(v, Op::Unary { x, kind })
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        self.unary(x, UnaryKind::Tanh)
    }

    pub fn relu(&mut self, x: Var) -> Var {
        self.unary(x, UnaryKind::Relu)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        self.unary(x, UnaryKind::Sigmoid)
    }

    /// Euclidean norm along `axis` (axis removed). Zero-vector subgradient is 0.
    pub fn l2_norm(&mut self, x: Var, axis: usize) -> Result<Var> {
        let xv = self.value(x);
        if axis >= xv.rank() {
            return Err(AseaError::Shape(format!(
                "l2_norm axis {axis} out of bounds for {:?}",
                xv.shape()
            )));
        }
        let v = xv.map(|t| t * t).sum_axes(&[axis], false).map(f64::sqrt);
        Ok(self.push(v, Op::L2Norm { x, axis }))
    }

    /// Dilated 1-D convolution along the T axis of `x: [B, C_in, T, N]` with
    /// `kernel: [C_out, C_in, K]` (K odd). Zero padding keeps T at stride 1.
    pub fn temporal_conv(
        &mut self,
        x: Var,
        kernel: Var,
        dilation: usize,
        stride: usize,
    ) -> Result<Var> {
        let v = temporal_conv_forward(self.value(x), self.value(kernel), dilation, stride)?;
        Ok(self.push(v, Op::TemporalConv { x, kernel, dilation, stride }))
    }

    /// Max-pool along T (stride 1, odd window, implicit -inf padding) of
    /// `x: [B, C, T, N]`.
    pub fn max_pool_t(&mut self, x: Var, window: usize) -> Result<Var> {
        let (v, argmax) = max_pool_t_forward(self.value(x), window)?;
        Ok(self.push(v, Op::MaxPoolT { x, argmax }))
    }

    pub fn concat(&mut self, xs: &[Var], axis: usize) -> Result<Var> {
        let parts: Vec<&Tensor> = xs.iter().map(|&v| self.value(v)).collect();
        let v = Tensor::concat(&parts, axis)?;
        Ok(self.push(v, Op::Concat { xs: xs.to_vec(), axis }))
    }

    pub fn permute(&mut self, x: Var, perm: &[usize]) -> Result<Var> {
        let v = self.value(x).permute(perm)?;
        Ok(self.push(v, Op::Permute { x, perm: perm.to_vec() }))
    }

    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Result<Var> {
        let v = self.value(x).reshape(shape)?;
        Ok(self.push(v, Op::Reshape { x }))
    }

    pub fn slice(&mut self, x: Var, axis: usize, start: usize, len: usize) -> Result<Var> {
        let v = self.value(x).slice(axis, start, len)?;
        Ok(self.push(v, Op::Slice { x, axis, start }))
    }

    /// `x: [B, K]`, labels in `0..K` -> `[B]` picking `x[b, labels[b]]`.
    pub fn pick_class(&mut self, x: Var, labels: &[usize]) -> Result<Var> {
        let xv = self.value(x);
        if xv.rank() != 2 || xv.shape()[0] != labels.len() {
            return Err(AseaError::Shape(format!(
                "pick_class expects [B, K] with B == labels, got {:?} and {} labels",
                xv.shape(),
                labels.len()
            )));
        }
        let k = xv.shape()[1];
        for (b, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(AseaError::Data(format!(
                    "label {l} out of range (classes = {k}) at row {b}"
                )));
            }
        }
        let data: Vec<f64> = labels
            .iter()
            .enumerate()
            .map(|(b, &l)| xv.at(&[b, l]))
            .collect();
        let v = Tensor::new(vec![labels.len()], data)?;
        Ok(self.push(v, Op::PickClass { x, labels: labels.to_vec() }))
    }

    /// Reverse sweep from a scalar root; fills adjoints for every reached node.
    pub fn backward(&self, root: Var) -> Result<Grads> {
        if self.value(root).len() != 1 {
            return Err(AseaError::Contract(format!(
                "backward root must be scalar, got shape {:?}",
                self.value(root).shape()
            )));
        }
        let mut adj: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        adj[root.0] = Some(Tensor::scalar(1.0));
        for id in (0..=root.0).rev() {
            let g = match adj[id].take() {
                Some(g) => g,
                None => continue,
            };
            self.accumulate(id, &g, &mut adj);
            adj[id] = Some(g);
        }
        Ok(Grads { adjoints: adj })
    }

    fn acc(&self, adj: &mut [Option<Tensor>], v: Var, delta: Tensor) {
        match &mut adj[v.0] {
            Some(t) => {
                let sum = t.add(&delta).expect("adjoint shape mismatch");
                adj[v.0] = Some(sum);
            }
            slot @ None => *slot = Some(delta),
        }
    }

    fn accumulate(&self, id: usize, g: &Tensor, adj: &mut [Option<Tensor>]) {
        let node = &self.nodes[id];
        match &node.op {
            Op::Leaf => {}
            Op::Add(a, b) => {
                self.acc(adj, *a, g.reduce_to(self.value(*a).shape()));
                self.acc(adj, *b, g.reduce_to(self.value(*b).shape()));
            }
            Op::Mul(a, b) => {
                let ga = g.mul(self.value(*b)).unwrap().reduce_to(self.value(*a).shape());
                let gb = g.mul(self.value(*a)).unwrap().reduce_to(self.value(*b).shape());
                self.acc(adj, *a, ga);
                self.acc(adj, *b, gb);
            }
            Op::Scale(x, c) => self.acc(adj, *x, g.scale(*c)),
            Op::AddScalar(x) => self.acc(adj, *x, g.clone()),
            Op::MatMul(a, b) => {
                let av = self.value(*a);
                let bv = self.value(*b);
                let ga = g.matmul(&bv.transpose_last()).unwrap().reduce_to(av.shape());
                let gb = av.transpose_last().matmul(g).unwrap().reduce_to(bv.shape());
                self.acc(adj, *a, ga);
                self.acc(adj, *b, gb);
            }
            Op::Sum { x, axes, keepdim } => {
                let xshape = self.value(*x).shape().to_vec();
                let g_kept = if *keepdim {
                    g.clone()
                } else {
                    let mut kept = xshape.clone();
                    for &a in axes {
                        kept[a] = 1;
                    }
                    g.reshape(&kept).unwrap()
                };
                self.acc(adj, *x, g_kept.expand_to(&xshape).unwrap());
            }
            Op::Softmax { x, axis } | Op::MaskedSoftmax { x, axis } => {
                // dx = y * (g - sum(y*g, axis)); masked entries have y = 0.
                let y = &node.value;
                let yg = y.mul(g).unwrap();
                let s = yg.sum_axes(&[*axis], true);
                let dx = y.mul(&g.sub(&s).unwrap()).unwrap();
                self.acc(adj, *x, dx);
            }
            Op::LogSoftmax { x, axis } => {
                let soft = node.value.map(f64::exp);
                let s = g.sum_axes(&[*axis], true);
                let dx = g.sub(&soft.mul(&s).unwrap()).unwrap();
                self.acc(adj, *x, dx);
            }
            Op::Unary { x, kind } => {
                let xv = self.value(*x);
                let y = &node.value;
                let dydx = match kind {
                    UnaryKind::Tanh => y.map(|t| 1.0 - t * t),
                    UnaryKind::Relu => xv.map(|t| if t > 0.0 { 1.0 } else { 0.0 }),
                    UnaryKind::Sigmoid => y.map(|t| t * (1.0 - t)),
                    UnaryKind::Sqrt => y.map(|t| if t > 0.0 { 0.5 / t } else { 0.0 }),
                    UnaryKind::Square => xv.map(|t| 2.0 * t),
                    UnaryKind::Recip => y.map(|t| -t * t),
                    UnaryKind::Exp => y.clone(),
                };
                self.acc(adj, *x, g.mul(&dydx).unwrap());
            }
            Op::L2Norm { x, axis } => {
                let xv = self.value(*x);
                let mut kept = xv.shape().to_vec();
                kept[*axis] = 1;
                let y_kept = node.value.reshape(&kept).unwrap();
                let g_kept = g.reshape(&kept).unwrap();
                // x / y with the zero-norm subgradient fixed to 0.
                let ratio = xv
                    .broadcast_zip(&y_kept, |xi, yi| if yi > 0.0 { xi / yi } else { 0.0 })
                    .unwrap();
                self.acc(adj, *x, ratio.mul(&g_kept).unwrap());
            }
            Op::TemporalConv { x, kernel, dilation, stride } => {
                let (dx, dk) = temporal_conv_backward(
                    self.value(*x),
                    self.value(*kernel),
                    g,
                    *dilation,
                    *stride,
                );
                self.acc(adj, *x, dx);
                self.acc(adj, *kernel, dk);
            }
            Op::MaxPoolT { x, argmax } => {
                let mut dx = Tensor::zeros(self.value(*x).shape());
                for (o, &src) in argmax.iter().enumerate() {
                    dx.data_mut()[src] += g.data()[o];
                }
                self.acc(adj, *x, dx);
            }
            Op::Concat { xs, axis } => {
                let mut start = 0usize;
                for &part in xs {
                    let len = self.value(part).shape()[*axis];
                    let gp = g.slice(*axis, start, len).unwrap();
                    self.acc(adj, part, gp);
                    start += len;
                }
            }
            Op::Permute { x, perm } => {
                let mut inv = vec![0usize; perm.len()];
                for (d, &p) in perm.iter().enumerate() {
                    inv[p] = d;
                }
                self.acc(adj, *x, g.permute(&inv).unwrap());
            }
            Op::Reshape { x } => {
                self.acc(adj, *x, g.reshape(self.value(*x).shape()).unwrap());
            }
            Op::Slice { x, axis, start } => {
                let mut dx = Tensor::zeros(self.value(*x).shape());
                dx.slice_add(*axis, *start, g);
                self.acc(adj, *x, dx);
            }
            Op::PickClass { x, labels } => {
                let mut dx = Tensor::zeros(self.value(*x).shape());
                for (b, &l) in labels.iter().enumerate() {
                    *dx.at_mut(&[b, l]) += g.data()[b];
                }
                self.acc(adj, *x, dx);
            }
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Max-subtracted softmax along `axis`; with a 0/1 mask, masked entries are
/// excluded from the max and the sum and emit exactly 0.
fn softmax_forward(x: &Tensor, axis: usize, mask: Option<&Tensor>) -> Tensor {
    let shape = x.shape().to_vec();
    let strides = strides_of(&shape);
    let axis_len = shape[axis];
    let axis_stride = strides[axis];
    let mut out = Tensor::zeros(&shape);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    for o in 0..outer {
        for i in 0..inner {
            let base = o * axis_len * inner + i;
            let live = |j: usize| match mask {
                Some(m) => m.data()[base + j * axis_stride] != 0.0,
                None => true,
            };
            let mut max = f64::NEG_INFINITY;
            for j in 0..axis_len {
                if live(j) {
                    max = max.max(x.data()[base + j * axis_stride]);
                }
            }
            if max == f64::NEG_INFINITY {
                continue; // fully masked slice -> zeros
            }
            let mut sum = 0.0;
            for j in 0..axis_len {
                if live(j) {
                    let e = (x.data()[base + j * axis_stride] - max).exp();
                    out.data_mut()[base + j * axis_stride] = e;
                    sum += e;
                }
            }
            for j in 0..axis_len {
                if live(j) {
                    out.data_mut()[base + j * axis_stride] /= sum;
                }
            }
        }
    }
    out
}

fn log_softmax_forward(x: &Tensor, axis: usize) -> Tensor {
    let shape = x.shape().to_vec();
    let strides = strides_of(&shape);
    let axis_len = shape[axis];
    let axis_stride = strides[axis];
    let mut out = Tensor::zeros(&shape);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    for o in 0..outer {
        for i in 0..inner {
            let base = o * axis_len * inner + i;
            let mut max = f64::NEG_INFINITY;
            for j in 0..axis_len {
                max = max.max(x.data()[base + j * axis_stride]);
            }
            let mut sum = 0.0;
            for j in 0..axis_len {
                sum += (x.data()[base + j * axis_stride] - max).exp();
            }
            let lse = max + sum.ln();
            for j in 0..axis_len {
                out.data_mut()[base + j * axis_stride] = x.data()[base + j * axis_stride] - lse;
            }
        }
    }
    out
}

pub(crate) fn temporal_conv_forward(
    x: &Tensor,
    kernel: &Tensor,
    dilation: usize,
    stride: usize,
) -> Result<Tensor> {
    let (b, c_in, t, n) = conv_dims(x)?;
    if kernel.rank() != 3 || kernel.shape()[1] != c_in {
        return Err(AseaError::Shape(format!(
            "temporal kernel must be [C_out, C_in={c_in}, K], got {:?}",
            kernel.shape()
        )));
    }
    let k = kernel.shape()[2];
    if k % 2 == 0 {
        return Err(AseaError::Config(format!("temporal kernel length {k} must be odd")));
    }
    if dilation == 0 || stride == 0 {
        return Err(AseaError::Config("dilation and stride must be positive".into()));
    }
    let c_out = kernel.shape()[0];
    let pad = dilation * (k - 1) / 2;
    let receptive = dilation * (k - 1) + 1;
    if t + 2 * pad < receptive {
        return Err(AseaError::Length(format!(
            "T = {t} smaller than dilated receptive field {receptive} after padding {pad}"
        )));
    }
    let t_out = (t - 1) / stride + 1;
    let mut out = Tensor::zeros(&[b, c_out, t_out, n]);
    let xd = x.data();
    let kd = kernel.data();
    {
        use rayon::prelude::*;
        let chunk = c_out * t_out * n;
        out.data_mut()
            .par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(bi, od)| {
                for co in 0..c_out {
                    for to in 0..t_out {
                        let t_center = to * stride;
                        for kk in 0..k {
                            let ti = t_center as isize - pad as isize + (kk * dilation) as isize;
                            if ti < 0 || ti >= t as isize {
                                continue;
                            }
                            let ti = ti as usize;
                            for ci in 0..c_in {
                                let w = kd[(co * c_in + ci) * k + kk];
                                if w == 0.0 {
                                    continue;
                                }
                                let xb = ((bi * c_in + ci) * t + ti) * n;
                                let ob = (co * t_out + to) * n;
                                for j in 0..n {
                                    od[ob + j] += w * xd[xb + j];
                                }
                            }
                        }
                    }
                }
            });
    }
    Ok(out)
}

fn temporal_conv_backward(
    x: &Tensor,
    kernel: &Tensor,
    g: &Tensor,
    dilation: usize,
    stride: usize,
) -> (Tensor, Tensor) {
    let (b, c_in, t, n) = conv_dims(x).expect("conv_dims checked in forward");
    let c_out = kernel.shape()[0];
    let k = kernel.shape()[2];
    let pad = dilation * (k - 1) / 2;
    let t_out = g.shape()[2];
    let mut dx = Tensor::zeros(x.shape());
    let mut dk = Tensor::zeros(kernel.shape());
    let xd = x.data();
    let kd = kernel.data();
    let gd = g.data();
    for bi in 0..b {
        for co in 0..c_out {
            for to in 0..t_out {
                let t_center = to * stride;
                for kk in 0..k {
                    let ti = t_center as isize - pad as isize + (kk * dilation) as isize;
                    if ti < 0 || ti >= t as isize {
                        continue;
                    }
                    let ti = ti as usize;
                    let gb = ((bi * c_out + co) * t_out + to) * n;
                    for ci in 0..c_in {
                        let w = kd[(co * c_in + ci) * k + kk];
                        let xb = ((bi * c_in + ci) * t + ti) * n;
                        let mut acc = 0.0;
                        for j in 0..n {
                            let gv = gd[gb + j];
                            dx.data_mut()[xb + j] += w * gv;
                            acc += xd[xb + j] * gv;
                        }
                        dk.data_mut()[(co * c_in + ci) * k + kk] += acc;
                    }
                }
            }
        }
    }
    (dx, dk)
}

fn max_pool_t_forward(x: &Tensor, window: usize) -> Result<(Tensor, Vec<usize>)> {
    let (b, c, t, n) = conv_dims(x)?;
    if window % 2 == 0 {
        return Err(AseaError::Config(format!("pool window {window} must be odd")));
    }
    let pad = (window - 1) / 2;
    let mut out = Tensor::zeros(&[b, c, t, n]);
    let mut argmax = vec![0usize; numel(&[b, c, t, n])];
    let xd = x.data();
    for bi in 0..b {
        for ci in 0..c {
            for to in 0..t {
                for j in 0..n {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_off = 0usize;
                    for w in 0..window {
                        let ti = to as isize - pad as isize + w as isize;
                        if ti < 0 || ti >= t as isize {
                            continue; // -inf padding
                        }
                        let off = ((bi * c + ci) * t + ti as usize) * n + j;
                        if xd[off] > best {
                            best = xd[off];
                            best_off = off;
                        }
                    }
                    let oo = ((bi * c + ci) * t + to) * n + j;
                    out.data_mut()[oo] = best;
                    argmax[oo] = best_off;
                }
            }
        }
    }
    Ok((out, argmax))
}

fn conv_dims(x: &Tensor) -> Result<(usize, usize, usize, usize)> {
    if x.rank() != 4 {
        return Err(AseaError::Shape(format!(
            "temporal op expects [B, C, T, N], got {:?}",
            x.shape()
        )));
    }
    Ok((x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]))
}
