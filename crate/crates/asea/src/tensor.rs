//! Dense row-major f64 tensors with the small set of operations the model needs.
//!
//! Everything is contiguous and eager; broadcasting follows the usual
//! trailing-alignment rules. These kernels are shared by the forward path and
//! the reverse-mode sweep in `autodiff`.

use crate::error::{AseaError, Result};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

pub fn numel(shape: &[usize]) -> usize {
    shape.iter().product()
}

pub fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Tensor> {
        if numel(&shape) != data.len() {
            return Err(AseaError::Shape(format!(
                "shape {:?} implies {} elements, got {}",
                shape,
                numel(&shape),
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Tensor {
        Tensor { shape: shape.to_vec(), data: vec![0.0; numel(shape)] }
    }

    pub fn full(shape: &[usize], v: f64) -> Tensor {
        Tensor { shape: shape.to_vec(), data: vec![v; numel(shape)] }
    }

    pub fn scalar(v: f64) -> Tensor {
        Tensor { shape: vec![1], data: vec![v] }
    }

    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Tensor {
        let n = numel(shape);
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..n {
            data.push(f(&idx));
            inc_index(&mut idx, shape);
        }
        Tensor { shape: shape.to_vec(), data }
    }

    pub fn eye(n: usize) -> Tensor {
        Tensor::from_fn(&[n, n], |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn item(&self) -> f64 {
        debug_assert_eq!(self.data.len(), 1);
        self.data[0]
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn at_mut(&mut self, idx: &[usize]) -> &mut f64 {
        let o = self.offset(idx);
        &mut self.data[o]
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let strides = strides_of(&self.shape);
        idx.iter().zip(&strides).map(|(i, s)| i * s).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Tensor {
        self.map(|v| v * c)
    }

    pub fn reshape(&self, shape: &[usize]) -> Result<Tensor> {
        if numel(shape) != self.data.len() {
            return Err(AseaError::Shape(format!(
                "cannot reshape {:?} into {:?}",
                self.shape, shape
            )));
        }
        Ok(Tensor { shape: shape.to_vec(), data: self.data.clone() })
    }

    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        if perm.len() != self.shape.len() {
            return Err(AseaError::Shape(format!(
                "permutation {:?} does not match rank {}",
                perm,
                self.shape.len()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || seen[p] {
                return Err(AseaError::Shape(format!("invalid permutation {:?}", perm)));
            }
            seen[p] = true;
        }
        let out_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let in_strides = strides_of(&self.shape);
        let perm_strides: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
        let mut out = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; out_shape.len()];
        for _ in 0..self.data.len() {
            let off: usize = idx.iter().zip(&perm_strides).map(|(i, s)| i * s).sum();
            out.push(self.data[off]);
            inc_index(&mut idx, &out_shape);
        }
        Ok(Tensor { shape: out_shape, data: out })
    }

    /// Narrow along `axis` to `[start, start+len)`.
    pub fn slice(&self, axis: usize, start: usize, len: usize) -> Result<Tensor> {
        if axis >= self.rank() || start + len > self.shape[axis] {
            return Err(AseaError::Shape(format!(
                "slice axis {axis} [{start}..{}] out of bounds for {:?}",
                start + len,
                self.shape
            )));
        }
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut out_shape = self.shape.clone();
        out_shape[axis] = len;
        let mut data = Vec::with_capacity(outer * len * inner);
        for o in 0..outer {
            let base = o * self.shape[axis] * inner + start * inner;
            data.extend_from_slice(&self.data[base..base + len * inner]);
        }
        Ok(Tensor { shape: out_shape, data })
    }

    /// Scatter-add `patch` back into the `slice(axis, start, ..)` region of self.
    pub fn slice_add(&mut self, axis: usize, start: usize, patch: &Tensor) {
        let len = patch.shape[axis];
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        for o in 0..outer {
            let dst = o * self.shape[axis] * inner + start * inner;
            let src = o * len * inner;
            for i in 0..len * inner {
                self.data[dst + i] += patch.data[src + i];
            }
        }
    }

    pub fn concat(parts: &[&Tensor], axis: usize) -> Result<Tensor> {
        let first = parts
            .first()
            .ok_or_else(|| AseaError::Shape("concat of zero tensors".into()))?;
        let mut out_shape = first.shape.clone();
        let mut total = 0usize;
        for p in parts {
            if p.rank() != first.rank() {
                return Err(AseaError::Shape("concat rank mismatch".into()));
            }
            for (d, (&a, &b)) in p.shape.iter().zip(&first.shape).enumerate() {
                if d != axis && a != b {
                    return Err(AseaError::Shape(format!(
                        "concat shape mismatch at axis {d}: {:?} vs {:?}",
                        p.shape, first.shape
                    )));
                }
            }
            total += p.shape[axis];
        }
        out_shape[axis] = total;
        let outer: usize = first.shape[..axis].iter().product();
        let inner: usize = first.shape[axis + 1..].iter().product();
        let mut data = Vec::with_capacity(numel(&out_shape));
        for o in 0..outer {
            for p in parts {
                let l = p.shape[axis];
                let base = o * l * inner;
                data.extend_from_slice(&p.data[base..base + l * inner]);
            }
        }
        Ok(Tensor { shape: out_shape, data })
    }

    /// Elementwise binary op with trailing-aligned broadcasting.
    pub fn broadcast_zip(&self, other: &Tensor, f: impl Fn(f64, f64) -> f64) -> Result<Tensor> {
        let shape = broadcast_shape(&self.shape, &other.shape)?;
        // Fast path: identical shapes.
        if self.shape == other.shape {
            let data = self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect();
            return Ok(Tensor { shape, data });
        }
        let a_strides = broadcast_strides(&self.shape, &shape);
        let b_strides = broadcast_strides(&other.shape, &shape);
        let n = numel(&shape);
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..n {
            let ao: usize = idx.iter().zip(&a_strides).map(|(i, s)| i * s).sum();
            let bo: usize = idx.iter().zip(&b_strides).map(|(i, s)| i * s).sum();
            data.push(f(self.data[ao], other.data[bo]));
            inc_index(&mut idx, &shape);
        }
        Ok(Tensor { shape, data })
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.broadcast_zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.broadcast_zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Tensor) -> Result<Tensor> {
        self.broadcast_zip(other, |a, b| a * b)
    }

    /// Sum over `axes`; reduced axes kept as extent 1 when `keepdim`.
    pub fn sum_axes(&self, axes: &[usize], keepdim: bool) -> Tensor {
        let mut reduce = vec![false; self.rank()];
        for &a in axes {
            reduce[a] = true;
        }
        let kept_shape: Vec<usize> = self
            .shape
            .iter()
            .enumerate()
            .map(|(d, &e)| if reduce[d] { 1 } else { e })
            .collect();
        let out_strides = strides_of(&kept_shape);
        let mut out = vec![0.0; numel(&kept_shape)];
        let mut idx = vec![0usize; self.rank()];
        for &v in &self.data {
            let off: usize = idx
                .iter()
                .enumerate()
                .map(|(d, &i)| if reduce[d] { 0 } else { i * out_strides[d] })
                .sum();
            out[off] += v;
            inc_index(&mut idx, &self.shape);
        }
        let shape = if keepdim {
            kept_shape
        } else {
            self.shape
                .iter()
                .enumerate()
                .filter(|(d, _)| !reduce[*d])
                .map(|(_, &e)| e)
                .collect::<Vec<_>>()
        };
        let shape = if shape.is_empty() { vec![1] } else { shape };
        Tensor { shape, data: out }
    }

    /// Reduce (by summation) down to `target` shape — inverse of broadcasting.
    pub fn reduce_to(&self, target: &[usize]) -> Tensor {
        if self.shape == target {
            return self.clone();
        }
        // Align trailing dims; leading extra dims of self are summed away.
        let extra = self.rank() - target.len();
        let mut axes: Vec<usize> = (0..extra).collect();
        for (d, &t) in target.iter().enumerate() {
            if t == 1 && self.shape[extra + d] != 1 {
                axes.push(extra + d);
            }
        }
        let summed = self.sum_axes(&axes, true);
        summed
            .reshape(target)
            .expect("reduce_to: target incompatible with broadcast source")
    }

    /// Expand (broadcast-copy) to `target` shape.
    pub fn expand_to(&self, target: &[usize]) -> Result<Tensor> {
        self.broadcast_zip(&Tensor::zeros(target), |a, _| a)
    }

    /// Batched matrix multiply: `[.., m, k] x [.., k, n] -> [.., m, n]`
    /// with broadcasting over leading dims.
    pub fn matmul(&self, other: &Tensor) -> Result<Tensor> {
        if self.rank() < 2 || other.rank() < 2 {
            return Err(AseaError::Shape(format!(
                "matmul needs rank >= 2, got {:?} x {:?}",
                self.shape, other.shape
            )));
        }
        let (m, ka) = (self.shape[self.rank() - 2], self.shape[self.rank() - 1]);
        let (kb, n) = (other.shape[other.rank() - 2], other.shape[other.rank() - 1]);
        if ka != kb {
            return Err(AseaError::Shape(format!(
                "matmul inner dims disagree: {:?} x {:?}",
                self.shape, other.shape
            )));
        }
        let a_lead = &self.shape[..self.rank() - 2];
        let b_lead = &other.shape[..other.rank() - 2];
        let lead = broadcast_shape(a_lead, b_lead)?;
        let a_lstr = broadcast_strides(a_lead, &lead);
        let b_lstr = broadcast_strides(b_lead, &lead);
        let batches = numel(&lead);
        let mut out_shape = lead.clone();
        out_shape.push(m);
        out_shape.push(n);
        let mut out = vec![0.0; batches * m * n];
        let a_data = &self.data;
        let b_data = &other.data;
        out.par_chunks_mut(m * n).enumerate().for_each(|(batch, chunk)| {
            let bidx = unflatten(batch, &lead);
            let ao: usize = bidx.iter().zip(&a_lstr).map(|(i, s)| i * s).sum::<usize>() * m * ka;
            let bo: usize = bidx.iter().zip(&b_lstr).map(|(i, s)| i * s).sum::<usize>() * kb * n;
            for i in 0..m {
                let row = &mut chunk[i * n..(i + 1) * n];
                for kk in 0..ka {
                    let s = a_data[ao + i * ka + kk];
                    if s == 0.0 {
                        continue;
                    }
                    let brow = &b_data[bo + kk * n..bo + (kk + 1) * n];
                    for (r, &b) in row.iter_mut().zip(brow) {
                        *r += s * b;
                    }
                }
            }
        });
        Ok(Tensor { shape: out_shape, data: out })
    }

    /// Transpose the last two axes.
    pub fn transpose_last(&self) -> Tensor {
        let r = self.rank();
        let mut perm: Vec<usize> = (0..r).collect();
        perm.swap(r - 2, r - 1);
        self.permute(&perm).expect("transpose_last")
    }
}

pub fn inc_index(idx: &mut [usize], shape: &[usize]) {
    for d in (0..shape.len()).rev() {
        idx[d] += 1;
        if idx[d] < shape[d] {
            return;
        }
        idx[d] = 0;
    }
}

pub fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0usize; shape.len()];
    for d in (0..shape.len()).rev() {
        idx[d] = flat % shape[d];
        flat /= shape[d];
    }
    idx
}

pub fn broadcast_shape(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    let r = a.len().max(b.len());
    let mut out = vec![0usize; r];
    for d in 0..r {
        let ae = if d < r - a.len() { 1 } else { a[d - (r - a.len())] };
        let be = if d < r - b.len() { 1 } else { b[d - (r - b.len())] };
        out[d] = if ae == be {
            ae
        } else if ae == 1 {
            be
        } else if be == 1 {
            ae
        } else {
            return Err(AseaError::Shape(format!(
                "cannot broadcast {:?} with {:?}",
                a, b
            )));
        };
    }
    Ok(out)
}

/// Per-dim strides of `src` viewed through the broadcast `target` shape
/// (0 where the source extent is 1).
fn broadcast_strides(src: &[usize], target: &[usize]) -> Vec<usize> {
    let src_strides = strides_of(src);
    let pad = target.len() - src.len();
    (0..target.len())
        .map(|d| {
            if d < pad || src[d - pad] == 1 {
                0
            } else {
                src_strides[d - pad]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity() {
        let i = Tensor::eye(2);
        let a = Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = i.matmul(&a).unwrap();
        assert_eq!(y.data(), a.data());
    }

    #[test]
    fn matmul_projector() {
        let p = Tensor::new(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let a = Tensor::new(vec![2, 2], vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let y = p.matmul(&a).unwrap();
        assert_eq!(y.data(), &[5.0, 6.0, 0.0, 0.0]);
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        let a = Tensor::from_fn(&[3, 4], |_| next());
        let b = Tensor::from_fn(&[4, 2], |_| next());
        let y = a.matmul(&b).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += a.at(&[i, k]) * b.at(&[k, j]);
                }
                assert!((y.at(&[i, j]) - s).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn matmul_shape_error_names_shapes() {
        let a = Tensor::zeros(&[2, 3]);
        let b = Tensor::zeros(&[4, 2]);
        let err = a.matmul(&b).unwrap_err().to_string();
        assert!(err.contains("[2, 3]") && err.contains("[4, 2]"), "{err}");
    }

    #[test]
    fn broadcast_add_and_reduce_roundtrip() {
        let a = Tensor::from_fn(&[2, 3], |ix| (ix[0] * 3 + ix[1]) as f64);
        let b = Tensor::new(vec![3], vec![10.0, 20.0, 30.0]).unwrap();
        let y = a.add(&b).unwrap();
        assert_eq!(y.at(&[1, 2]), 5.0 + 30.0);
        let g = Tensor::full(&[2, 3], 1.0);
        let r = g.reduce_to(&[3]);
        assert_eq!(r.data(), &[2.0, 2.0, 2.0]);
    }

    #[test]
    fn permute_roundtrip() {
        let a = Tensor::from_fn(&[2, 3, 4], |ix| (ix[0] * 100 + ix[1] * 10 + ix[2]) as f64);
        let p = a.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.shape(), &[4, 2, 3]);
        let back = p.permute(&[1, 2, 0]).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn sum_axes_keepdim() {
        let a = Tensor::from_fn(&[2, 2], |ix| (ix[0] * 2 + ix[1]) as f64);
        let s = a.sum_axes(&[1], true);
        assert_eq!(s.shape(), &[2, 1]);
        assert_eq!(s.data(), &[1.0, 5.0]);
        let s2 = a.sum_axes(&[0, 1], false);
        assert_eq!(s2.shape(), &[1]);
        assert_eq!(s2.item(), 6.0);
    }

    #[test]
    fn slice_and_concat() {
        let a = Tensor::from_fn(&[2, 4], |ix| (ix[0] * 4 + ix[1]) as f64);
        let s0 = a.slice(1, 0, 2).unwrap();
        let s1 = a.slice(1, 2, 2).unwrap();
        let back = Tensor::concat(&[&s0, &s1], 1).unwrap();
        assert_eq!(back, a);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_matrices() -> impl Strategy<Value = (Tensor, Tensor, Tensor)> {
            (1usize..4, 1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(b, m, k, n)| {
                let len_a = b * m * k;
                let len_b = b * k * n;
                (
                    proptest::collection::vec(-2.0..2.0f64, len_a),
                    proptest::collection::vec(-2.0..2.0f64, len_b),
                    proptest::collection::vec(-2.0..2.0f64, len_a),
                    Just((b, m, k, n)),
                )
                    .prop_map(|(va, vb, va2, (b, m, k, n))| {
                        (
                            Tensor::new(vec![b, m, k], va).unwrap(),
                            Tensor::new(vec![b, k, n], vb).unwrap(),
                            Tensor::new(vec![b, m, k], va2).unwrap(),
                        )
                    })
            })
        }

        proptest! {
            // (A + A') B == AB + A'B for batched products
            #[test]
            fn matmul_is_linear_in_lhs((a, b, a2) in small_matrices()) {
                let lhs = a.add(&a2).unwrap().matmul(&b).unwrap();
                let rhs = a.matmul(&b).unwrap().add(&a2.matmul(&b).unwrap()).unwrap();
                for (x, y) in lhs.data().iter().zip(rhs.data()) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }

            // summing all axes equals the plain data sum
            #[test]
            fn sum_axes_total_matches_iterator(
                vals in proptest::collection::vec(-5.0..5.0f64, 1..48),
            ) {
                let n = vals.len();
                let t = Tensor::new(vec![n], vals.clone()).unwrap();
                let total = t.sum_axes(&[0], false).item();
                let direct: f64 = vals.iter().sum();
                prop_assert!((total - direct).abs() <= 1e-9);
            }

            // broadcasting a + b commutes
            #[test]
            fn broadcast_add_commutes(
                rows in 1usize..5,
                cols in 1usize..5,
                seed in 0u64..1000,
            ) {
                use rand::prelude::*;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let a = Tensor::from_fn(&[rows, 1], |_| rng.gen_range(-1.0..1.0));
                let b = Tensor::from_fn(&[1, cols], |_| rng.gen_range(-1.0..1.0));
                let ab = a.add(&b).unwrap();
                let ba = b.add(&a).unwrap();
                prop_assert_eq!(ab.shape(), &[rows, cols]);
                prop_assert_eq!(ab.data(), ba.data());
            }
        }
    }
}
