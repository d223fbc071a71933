//! Dense real tensors and the primitive operations both semantic backends
//! evaluate with: contraction-style products, element-wise operations, and
//! the compact-closed / Frobenius maps over fixed-basis spaces.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("rank mismatch: expected rank {expected}, got rank {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("matrix is not square: {0:?}")]
    NotSquare(Vec<usize>),
    #[error("invalid contraction axes: {0}")]
    BadAxes(String),
    #[error("invalid permutation {perm:?} for rank {rank}")]
    BadPermutation { perm: Vec<usize>, rank: usize },
}

/// Dense row-major tensor with explicit shape. Rank 0 is a scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Panics if `data.len() != product(shape)`.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Tensor {
        let expected: usize = shape.iter().product();
        assert_eq!(
            data.len(),
            expected,
            "data length {} does not match shape {:?}",
            data.len(),
            shape
        );
        Tensor { shape, data }
    }

    pub fn scalar(value: f64) -> Tensor {
        Tensor::new(vec![], vec![value])
    }

    pub fn zeros(shape: Vec<usize>) -> Tensor {
        let len = shape.iter().product();
        Tensor::new(shape, vec![0.0; len])
    }

    pub fn vector(values: Vec<f64>) -> Tensor {
        Tensor::new(vec![values.len()], values)
    }

    /// Row-major rank-2 tensor from rows.
    pub fn matrix(rows: Vec<Vec<f64>>) -> Tensor {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend_from_slice(row);
        }
        Tensor::new(vec![r, c], data)
    }

    pub fn identity(dim: usize) -> Tensor {
        let mut t = Tensor::zeros(vec![dim, dim]);
        for i in 0..dim {
            t.data[i * dim + i] = 1.0;
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// The value of a rank-0 tensor.
    pub fn scalar_value(&self) -> Result<f64, TensorError> {
        if self.rank() != 0 {
            return Err(TensorError::RankMismatch {
                expected: 0,
                got: self.rank(),
            });
        }
        Ok(self.data[0])
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.shape.len()];
        for i in (0..self.shape.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.shape[i + 1];
        }
        strides
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank());
        let strides = self.strides();
        let offset: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.data[offset]
    }

    fn require_rank(&self, rank: usize) -> Result<(), TensorError> {
        if self.rank() != rank {
            Err(TensorError::RankMismatch {
                expected: rank,
                got: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    fn require_same_shape(&self, other: &Tensor) -> Result<(), TensorError> {
        if self.shape != other.shape {
            Err(TensorError::ShapeMismatch {
                expected: self.shape.clone(),
                got: other.shape.clone(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "shape {:?} [", self.shape)?;
        for (i, v) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Iterate all multi-indices of `shape` in ascending row-major order.
fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.iter().any(|&d| d == 0) {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    loop {
        f(&idx);
        // advance odometer, last axis fastest
        let mut axis = shape.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < shape[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Matrix transposition: `out[i,j] = m[j,i]`.
pub fn transpose(m: &Tensor) -> Result<Tensor, TensorError> {
    m.require_rank(2)?;
    let (r, c) = (m.shape[0], m.shape[1]);
    let mut out = Tensor::zeros(vec![c, r]);
    for i in 0..r {
        for j in 0..c {
            out.data[j * r + i] = m.data[i * c + j];
        }
    }
    Ok(out)
}

/// Matrix-vector contraction `×₁`: `out[i] = Σⱼ m[i,j]·v[j]`.
pub fn mat_vec(m: &Tensor, v: &Tensor) -> Result<Tensor, TensorError> {
    m.require_rank(2)?;
    v.require_rank(1)?;
    if m.shape[1] != v.shape[0] {
        return Err(TensorError::ShapeMismatch {
            expected: vec![m.shape[0], v.shape[0]],
            got: m.shape.clone(),
        });
    }
    let (r, c) = (m.shape[0], m.shape[1]);
    let mut out = vec![0.0; r];
    for i in 0..r {
        for j in 0..c {
            out[i] += m.data[i * c + j] * v.data[j];
        }
    }
    Ok(Tensor::vector(out))
}

/// Cube-vector contraction `×₂`: `out[i,j] = Σₖ c[i,j,k]·v[k]`.
pub fn cube_vec(c: &Tensor, v: &Tensor) -> Result<Tensor, TensorError> {
    c.require_rank(3)?;
    v.require_rank(1)?;
    if c.shape[2] != v.shape[0] {
        return Err(TensorError::ShapeMismatch {
            expected: vec![c.shape[0], c.shape[1], v.shape[0]],
            got: c.shape.clone(),
        });
    }
    let (d0, d1, d2) = (c.shape[0], c.shape[1], c.shape[2]);
    let mut out = Tensor::zeros(vec![d0, d1]);
    for i in 0..d0 {
        for j in 0..d1 {
            let mut acc = 0.0;
            for k in 0..d2 {
                acc += c.data[(i * d1 + j) * d2 + k] * v.data[k];
            }
            out.data[i * d1 + j] = acc;
        }
    }
    Ok(out)
}

/// Element-wise product `⊙`.
pub fn elem_mul(u: &Tensor, v: &Tensor) -> Result<Tensor, TensorError> {
    u.require_same_shape(v)?;
    let data = u.data.iter().zip(&v.data).map(|(a, b)| a * b).collect();
    Ok(Tensor::new(u.shape.clone(), data))
}

/// Pointwise sum.
pub fn add(u: &Tensor, v: &Tensor) -> Result<Tensor, TensorError> {
    u.require_same_shape(v)?;
    let data = u.data.iter().zip(&v.data).map(|(a, b)| a + b).collect();
    Ok(Tensor::new(u.shape.clone(), data))
}

/// Frobenius `Δ`: place a vector on the diagonal of a square matrix.
pub fn frob_delta(v: &Tensor) -> Result<Tensor, TensorError> {
    v.require_rank(1)?;
    let d = v.shape[0];
    let mut out = Tensor::zeros(vec![d, d]);
    for i in 0..d {
        out.data[i * d + i] = v.data[i];
    }
    Ok(out)
}

/// Frobenius `μ`: extract the diagonal of a square matrix.
pub fn frob_mu(m: &Tensor) -> Result<Tensor, TensorError> {
    m.require_rank(2)?;
    if m.shape[0] != m.shape[1] {
        return Err(TensorError::NotSquare(m.shape.clone()));
    }
    let d = m.shape[0];
    Ok(Tensor::vector((0..d).map(|i| m.data[i * d + i]).collect()))
}

/// Frobenius `ι`: sum the coefficients of a vector.
pub fn frob_iota(v: &Tensor) -> Result<f64, TensorError> {
    v.require_rank(1)?;
    Ok(v.data.iter().sum())
}

/// Frobenius `ζ`: the constant vector `λ` of the given dimension.
pub fn frob_zeta(lambda: f64, dim: usize) -> Tensor {
    assert!(dim >= 1, "space dimension must be >= 1");
    Tensor::vector(vec![lambda; dim])
}

/// `ε`: the trace of a square matrix (the inner-product map under a fixed basis).
pub fn epsilon(m: &Tensor) -> Result<f64, TensorError> {
    m.require_rank(2)?;
    if m.shape[0] != m.shape[1] {
        return Err(TensorError::NotSquare(m.shape.clone()));
    }
    let d = m.shape[0];
    Ok((0..d).map(|i| m.data[i * d + i]).sum())
}

/// `η`: `λ` times the identity tensor of the given dimension.
pub fn eta(lambda: f64, dim: usize) -> Tensor {
    assert!(dim >= 1, "space dimension must be >= 1");
    let mut out = Tensor::zeros(vec![dim, dim]);
    for i in 0..dim {
        out.data[i * dim + i] = lambda;
    }
    out
}

/// Contract the paired axes simultaneously; remaining axes keep their order.
///
/// Summation runs in ascending index order so results are reproducible
/// bit-for-bit across implementations of the same contraction.
pub fn contract(t: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor, TensorError> {
    let rank = t.rank();
    let mut seen = vec![false; rank];
    for &(a, b) in pairs {
        if a >= rank || b >= rank {
            return Err(TensorError::BadAxes(format!(
                "axis pair ({a},{b}) out of range for rank {rank}"
            )));
        }
        if a == b || seen[a] || seen[b] {
            return Err(TensorError::BadAxes(format!("repeated axis in ({a},{b})")));
        }
        if t.shape[a] != t.shape[b] {
            return Err(TensorError::BadAxes(format!(
                "axes {a} and {b} have different dimensions {} and {}",
                t.shape[a], t.shape[b]
            )));
        }
        seen[a] = true;
        seen[b] = true;
    }
    let free_axes: Vec<usize> = (0..rank).filter(|&ax| !seen[ax]).collect();
    let free_shape: Vec<usize> = free_axes.iter().map(|&ax| t.shape[ax]).collect();
    let bound_shape: Vec<usize> = pairs.iter().map(|&(a, _)| t.shape[a]).collect();
    let strides = t.strides();

    let mut out = Tensor::zeros(free_shape.clone());
    let mut out_pos = 0usize;
    for_each_index(&free_shape, |free_idx| {
        let base: usize = free_idx
            .iter()
            .zip(&free_axes)
            .map(|(i, &ax)| i * strides[ax])
            .sum();
        let mut acc = 0.0;
        for_each_index(&bound_shape, |bound_idx| {
            let off: usize = bound_idx
                .iter()
                .zip(pairs)
                .map(|(i, &(a, b))| i * (strides[a] + strides[b]))
                .sum();
            acc += t.data[base + off];
        });
        out.data[out_pos] = acc;
        out_pos += 1;
    });
    Ok(out)
}

/// Move axes: `out[perm(idx)] = t[idx]`, i.e. `perm[i]` is the output
/// position of input axis `i`. The associator is the identity on this flat
/// representation, so only genuine symmetries reorder data.
pub fn permute(t: &Tensor, perm: &[usize]) -> Result<Tensor, TensorError> {
    let rank = t.rank();
    if perm.len() != rank {
        return Err(TensorError::BadPermutation {
            perm: perm.to_vec(),
            rank,
        });
    }
    let mut seen = vec![false; rank];
    for &p in perm {
        if p >= rank || seen[p] {
            return Err(TensorError::BadPermutation {
                perm: perm.to_vec(),
                rank,
            });
        }
        seen[p] = true;
    }
    let mut out_shape = vec![0usize; rank];
    for (i, &p) in perm.iter().enumerate() {
        out_shape[p] = t.shape[i];
    }
    let mut out = Tensor::zeros(out_shape);
    let out_strides = out.strides();
    let mut src_pos = 0usize;
    for_each_index(&t.shape, |idx| {
        let dst: usize = idx
            .iter()
            .zip(perm)
            .map(|(i, &p)| i * out_strides[p])
            .sum();
        out.data[dst] = t.data[src_pos];
        src_pos += 1;
    });
    Ok(out)
}

/// Tensor (outer) product; the result's axes are `a`'s followed by `b`'s.
pub fn tensor_product(a: &Tensor, b: &Tensor) -> Tensor {
    let mut shape = a.shape.clone();
    shape.extend_from_slice(&b.shape);
    let mut data = Vec::with_capacity(a.data.len() * b.data.len());
    for x in &a.data {
        for y in &b.data {
            data.push(x * y);
        }
    }
    Tensor::new(shape, data)
}

/// Cosine similarity of two equal-shape rank-1 tensors.
///
/// Returns `None` when either vector has zero norm.
pub fn cosine(u: &Tensor, v: &Tensor) -> Result<Option<f64>, TensorError> {
    u.require_rank(1)?;
    u.require_same_shape(v)?;
    let dot: f64 = u.data.iter().zip(&v.data).map(|(a, b)| a * b).sum();
    let nu = u.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(None);
    }
    Ok(Some(dot / (nu * nv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= TOL, "{a} != {b}");
    }

    #[test]
    fn transpose_basics() {
        let m = Tensor::matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(
            transpose(&m).unwrap(),
            Tensor::matrix(vec![vec![1.0, 3.0], vec![2.0, 4.0]])
        );
        let id = Tensor::identity(3);
        assert_eq!(transpose(&id).unwrap(), id);
        let row = Tensor::new(vec![1, 2], vec![0.0, 5.0]);
        assert_eq!(transpose(&row).unwrap(), Tensor::new(vec![2, 1], vec![0.0, 5.0]));
    }

    #[test]
    fn mat_vec_cases() {
        let id = Tensor::identity(2);
        let v = Tensor::vector(vec![7.0, 9.0]);
        assert_eq!(mat_vec(&id, &v).unwrap(), v);
        let m = Tensor::matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let ones = Tensor::vector(vec![1.0, 1.0]);
        assert_eq!(mat_vec(&m, &ones).unwrap(), Tensor::vector(vec![3.0, 7.0]));
        let zero = Tensor::zeros(vec![2, 2]);
        assert_eq!(mat_vec(&zero, &v).unwrap(), Tensor::vector(vec![0.0, 0.0]));
        assert!(mat_vec(&m, &Tensor::vector(vec![1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn cube_vec_cases() {
        // delta cube: c[i,j,k] = 1 iff j == k, so (c ×₂ v)[i,j] = v[j]
        let mut c = Tensor::zeros(vec![2, 2, 2]);
        for i in 0..2 {
            for j in 0..2 {
                c.data[(i * 2 + j) * 2 + j] = 1.0;
            }
        }
        let v = Tensor::vector(vec![3.0, 5.0]);
        let m = cube_vec(&c, &v).unwrap();
        assert_eq!(m, Tensor::matrix(vec![vec![3.0, 5.0], vec![3.0, 5.0]]));

        // basis-vector selection picks the k = 0 slice
        let cube = Tensor::new(vec![2, 2, 2], (1..=8).map(f64::from).collect());
        let e0 = Tensor::vector(vec![1.0, 0.0]);
        let slice = cube_vec(&cube, &e0).unwrap();
        assert_eq!(slice, Tensor::matrix(vec![vec![1.0, 3.0], vec![5.0, 7.0]]));

        let ones_cube = Tensor::new(vec![2, 2, 2], vec![1.0; 8]);
        let v = Tensor::vector(vec![2.0, 3.0]);
        assert_eq!(
            cube_vec(&ones_cube, &v).unwrap(),
            Tensor::matrix(vec![vec![5.0, 5.0], vec![5.0, 5.0]])
        );
    }

    #[test]
    fn elementwise_ops() {
        let u = Tensor::vector(vec![1.0, 2.0]);
        let v = Tensor::vector(vec![3.0, 4.0]);
        assert_eq!(elem_mul(&u, &v).unwrap(), Tensor::vector(vec![3.0, 8.0]));
        assert_eq!(add(&u, &v).unwrap(), Tensor::vector(vec![4.0, 6.0]));
        let ones = frob_zeta(1.0, 2);
        assert_eq!(elem_mul(&v, &ones).unwrap(), v);
        assert_eq!(add(&v, &Tensor::zeros(vec![2])).unwrap(), v);
        assert!(elem_mul(&u, &Tensor::vector(vec![1.0])).is_err());
    }

    #[test]
    fn frobenius_maps() {
        let v = Tensor::vector(vec![1.0, 2.0]);
        assert_eq!(
            frob_delta(&v).unwrap(),
            Tensor::matrix(vec![vec![1.0, 0.0], vec![0.0, 2.0]])
        );
        assert_eq!(frob_delta(&frob_zeta(1.0, 3)).unwrap(), Tensor::identity(3));
        assert_eq!(frob_mu(&frob_delta(&v).unwrap()).unwrap(), v);
        let m = Tensor::matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(frob_mu(&m).unwrap(), Tensor::vector(vec![1.0, 4.0]));
        assert_close(frob_iota(&Tensor::vector(vec![1.0, 2.0, 3.0])).unwrap(), 6.0);
        assert_close(frob_iota(&frob_zeta(1.0, 5)).unwrap(), 5.0);
        assert_close(epsilon(&Tensor::identity(2)).unwrap(), 2.0);
        assert_close(epsilon(&m).unwrap(), 5.0);
        assert_close(epsilon(&eta(1.0, 4)).unwrap(), 4.0);
        assert_eq!(eta(2.0, 2), Tensor::matrix(vec![vec![2.0, 0.0], vec![0.0, 2.0]]));
        assert!(frob_mu(&Tensor::new(vec![1, 2], vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn contract_trace_and_identity() {
        let m = Tensor::matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let tr = contract(&m, &[(0, 1)]).unwrap();
        assert_close(tr.scalar_value().unwrap(), 5.0);
        assert_eq!(contract(&m, &[]).unwrap(), m);

        let ones = Tensor::new(vec![2, 2, 2], vec![1.0; 8]);
        let out = contract(&ones, &[(0, 2)]).unwrap();
        assert_eq!(out, Tensor::vector(vec![2.0, 2.0]));
    }

    #[test]
    fn contract_rejects_bad_axes() {
        let m = Tensor::matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(contract(&m, &[(0, 0)]).is_err());
        assert!(contract(&m, &[(0, 1), (1, 0)]).is_err());
        let rect = Tensor::new(vec![1, 2], vec![1.0, 2.0]);
        assert!(contract(&rect, &[(0, 1)]).is_err());
    }

    #[test]
    fn permute_cases() {
        let m = Tensor::matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(permute(&m, &[0, 1]).unwrap(), m);
        assert_eq!(permute(&m, &[1, 0]).unwrap(), transpose(&m).unwrap());
        assert!(permute(&m, &[0, 0]).is_err());
        assert!(permute(&m, &[0]).is_err());
    }

    #[test]
    fn cosine_cases() {
        let v = Tensor::vector(vec![1.0, 2.0]);
        assert_close(cosine(&v, &v).unwrap().unwrap(), 1.0);
        let e0 = Tensor::vector(vec![1.0, 0.0]);
        let e1 = Tensor::vector(vec![0.0, 1.0]);
        assert_close(cosine(&e0, &e1).unwrap().unwrap(), 0.0);
        let twice = Tensor::vector(vec![2.0, 4.0]);
        assert_close(cosine(&v, &twice).unwrap().unwrap(), 1.0);
        assert_eq!(cosine(&v, &Tensor::zeros(vec![2])).unwrap(), None);
    }

    // independent oracle: contract against a naive summation over all indices
    fn naive_contract(t: &Tensor, pairs: &[(usize, usize)]) -> Tensor {
        let rank = t.rank();
        let paired: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        let free: Vec<usize> = (0..rank).filter(|ax| !paired.contains(ax)).collect();
        let free_shape: Vec<usize> = free.iter().map(|&ax| t.shape()[ax]).collect();
        let mut out = Tensor::zeros(free_shape.clone());
        let out_strides = out.strides();
        for_each_index(t.shape(), |idx| {
            if pairs.iter().all(|&(a, b)| idx[a] == idx[b]) {
                let pos: usize = free
                    .iter()
                    .enumerate()
                    .map(|(k, &ax)| idx[ax] * out_strides[k])
                    .sum();
                out.data[pos] += t.get(idx);
            }
        });
        out
    }

    proptest! {
        #[test]
        fn contract_matches_naive_summation(
            dims in proptest::collection::vec(1usize..=3, 2..=4),
            seed in 0u64..1000,
        ) {
            let len: usize = dims.iter().product();
            // cheap deterministic fill
            let data: Vec<f64> = (0..len)
                .map(|i| ((i as u64).wrapping_mul(6364136223846793005).wrapping_add(seed) % 17) as f64 - 8.0)
                .collect();
            let t = Tensor::new(dims.clone(), data);
            // contract the first equal-dimension axis pair, if any
            let mut pair = None;
            'outer: for a in 0..dims.len() {
                for b in (a + 1)..dims.len() {
                    if dims[a] == dims[b] {
                        pair = Some((a, b));
                        break 'outer;
                    }
                }
            }
            if let Some(p) = pair {
                let got = contract(&t, &[p]).unwrap();
                let want = naive_contract(&t, &[p]);
                prop_assert_eq!(got, want);
            }
        }

        #[test]
        fn elem_mul_commutes(values in proptest::collection::vec(-10.0f64..10.0, 1..8)) {
            let u = Tensor::vector(values.iter().map(|v| v + 1.0).collect());
            let v = Tensor::vector(values.clone());
            prop_assert_eq!(elem_mul(&u, &v).unwrap(), elem_mul(&v, &u).unwrap());
            prop_assert_eq!(add(&u, &v).unwrap(), add(&v, &u).unwrap());
        }

        #[test]
        fn double_swap_is_identity(rows in 1usize..4, cols in 1usize..4) {
            let data: Vec<f64> = (0..rows * cols).map(|i| i as f64).collect();
            let t = Tensor::new(vec![rows, cols], data);
            let swapped = permute(&t, &[1, 0]).unwrap();
            prop_assert_eq!(permute(&swapped, &[1, 0]).unwrap(), t);
        }
    }
}
