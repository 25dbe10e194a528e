//! Dense complex linear-algebra helpers shared by every module.
//!
//! All Hermitian functional calculus goes through [`eigh`], which symmetrizes
//! its input and returns eigenpairs in ascending order so that downstream
//! results are reproducible bit-for-bit.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Global eigenvalue zero threshold (positive parts, supports, PSD checks).
pub const ZERO_TOL: f64 = 1e-10;

/// Threshold below which a matrix entry is treated as structurally zero when
/// detecting block structure.
pub const STRUCTURE_TOL: f64 = 1e-13;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize, m: usize) -> CMat {
    CMat::zeros(n, m)
}

/// `(A + A†)/2`.
pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * cr(0.5)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_defect(a: &CMat) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn real_trace(a: &CMat) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// Eigendecomposition of a Hermitian matrix (ascending eigenvalues).
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl Eigh {
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Index sets of the connected components of the nonzero pattern of `a`.
fn components(a: &CMat) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for r in 0..n {
        for c in r + 1..n {
            if a[(r, c)].norm() > STRUCTURE_TOL || a[(c, r)].norm() > STRUCTURE_TOL {
                let (x, y) = (root(&mut parent, r), root(&mut parent, c));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = vec![];
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(vec![]);
        }
        out[slot[r]].push(i);
    }
    out
}

/// Decoupled diagonal blocks are diagonalized separately.
pub fn eigh(a: &CMat) -> Eigh {
    let n = a.nrows();
    if n == 0 {
        return Eigh {
            values: vec![],
            vectors: CMat::zeros(0, 0),
        };
    }
    let h = hermitize(a);
    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMat::zeros(n, n);
    for idx in components(&h) {
        let k = idx.len();
        let sub = CMat::from_fn(k, k, |i, j| h[(idx[i], idx[j])]);
        let eig = SymmetricEigen::new(sub);
        for j in 0..k {
            let col = vals.len();
            vals.push(eig.eigenvalues[j]);
            for (i, &r) in idx.iter().enumerate() {
                vecs[(r, col)] = eig.eigenvectors[(i, j)];
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let values = order.iter().map(|&i| vals[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &vecs.column(src));
    }
    Eigh { values, vectors }
}

pub fn eigvals(a: &CMat) -> Vec<f64> {
    eigh(a).values
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    eigh(a).min()
}

/// Hermitian functional calculus `f(A)`.
pub fn apply_fn(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    eigh(a).reconstruct_with(f)
}

/// Square root of a PSD matrix; eigenvalues below the zero threshold map to 0.
pub fn psd_sqrt(a: &CMat) -> CMat {
    apply_fn(a, |x| if x > ZERO_TOL { x.sqrt() } else { 0.0 })
}

/// `A^s` on the support of `A` (so `A^0` is the support projector).
pub fn psd_pow(a: &CMat, s: f64) -> CMat {
    apply_fn(a, |x| if x > ZERO_TOL { x.powf(s) } else { 0.0 })
}

/// Inverse square root on the support; zero on the kernel.
pub fn invsqrt_support(a: &CMat) -> CMat {
    apply_fn(a, |x| if x > ZERO_TOL { 1.0 / x.sqrt() } else { 0.0 })
}

/// Projector onto the span of eigenvectors with eigenvalue `> ZERO_TOL`.
pub fn positive_projector(a: &CMat) -> CMat {
    apply_fn(a, |x| if x > ZERO_TOL { 1.0 } else { 0.0 })
}

pub fn support_projector(a: &CMat) -> CMat {
    positive_projector(a)
}

/// `‖A‖₁` for Hermitian `A`.
pub fn trace_norm_hermitian(a: &CMat) -> f64 {
    eigvals(a).iter().map(|x| x.abs()).sum()
}

/// `‖A‖₁` for arbitrary square `A` (sum of singular values).
pub fn trace_norm(a: &CMat) -> f64 {
    a.clone().singular_values().iter().sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Low-rank factor `W` with `A = W W†` for PSD `A`, keeping eigenvalues
/// above the zero threshold. Returns an `n × r` matrix (possibly `r = 0`).
pub fn psd_factor(a: &CMat) -> CMat {
    let e = eigh(a);
    let n = a.nrows();
    let keep: Vec<usize> = (0..n).filter(|&i| e.values[i] > ZERO_TOL).collect();
    let mut w = CMat::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let s = e.values[i].sqrt();
        for r in 0..n {
            w[(r, col)] = e.vectors[(r, i)] * s;
        }
    }
    w
}

/// Frobenius inner product `Re Tr(A† B)`.
pub fn re_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

/// Direct sum of square blocks.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

/// Ceiling robust to solver noise: values within `1e-7` above an integer
/// round down to it.
pub fn ceil_tol(v: f64) -> f64 {
    (v - 1e-7).ceil()
}

/// Floor robust to solver noise: values within `1e-7` below an integer
/// round up to it.
pub fn floor_tol(v: f64) -> f64 {
    (v + 1e-7).floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_is_sorted_and_reconstructs() {
        let a = CMat::from_row_slice(2, 2, &[cr(2.0), c(0.0, 1.0), c(0.0, -1.0), cr(2.0)]);
        let e = eigh(&a);
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        let back = e.reconstruct_with(|x| x);
        assert!(max_abs_diff(&back, &a) < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn blockwise_eigh_matches_dense(seed in 0u64..1000, sizes in proptest::collection::vec(1usize..4, 1..4)) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let blocks: Vec<CMat> = sizes
                .iter()
                .map(|&k| {
                    let g = CMat::from_fn(k, k, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
                    hermitize(&g)
                })
                .collect();
            let bd = block_diag(&blocks);
            // interleave the blocks so they are not contiguous
            let n = bd.nrows();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.sort_by_key(|&i| (i * 7919) % n);
            let a = CMat::from_fn(n, n, |i, j| bd[(perm[i], perm[j])]);
            let e = eigh(&a);
            let mut dense: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
            dense.sort_by(f64::total_cmp);
            for (x, y) in e.values.iter().zip(&dense) {
                proptest::prop_assert!((x - y).abs() < 1e-12);
            }
            proptest::prop_assert!(max_abs_diff(&e.reconstruct_with(|x| x), &a) < 1e-12);
            let gram = e.vectors.adjoint() * &e.vectors;
            proptest::prop_assert!(max_abs_diff(&gram, &CMat::identity(n, n)) < 1e-12);
        }
    }

    #[test]
    fn psd_pow_zero_is_support_projector() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![cr(0.5), cr(0.0)]));
        let p = psd_pow(&a, 0.0);
        assert!((p[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(p[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn factor_reproduces_matrix() {
        let v = CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let a = outer(&v, &v);
        let w = psd_factor(&a);
        assert_eq!(w.ncols(), 1);
        assert!(max_abs_diff(&(&w * w.adjoint()), &a) < 1e-12);
    }

    #[test]
    fn tolerant_rounding() {
        assert_eq!(ceil_tol(4.000_000_001), 4.0);
        assert_eq!(ceil_tol(4.01), 5.0);
        assert_eq!(floor_tol(0.999_999_999), 1.0);
        assert_eq!(floor_tol(0.99), 0.0);
    }
}
