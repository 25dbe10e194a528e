//! Purifications as matrices and the Uhlmann construction.
//!
//! A vector `|Ψ⟩ = Σ M[i, b] |i⟩|b⟩` on `S ⊗ B` is stored as the matrix `M`;
//! its `S` marginal is `M M†` and its `B` marginal is `Mᵀ M̄`.

use crate::linalg::{self, cr, CMat, ZERO_TOL};

/// Purification of an operator on `A ⊗ B` (A-major) with a reference `R`,
/// returned as the matrix with rows `(a, r)` (A-major) and columns `b`,
/// together with `dim R`.
pub(crate) fn purify_rows_ar(rho: &CMat, da: usize, db: usize) -> (CMat, usize) {
    let e = linalg::eigh(rho);
    let keep: Vec<usize> = (0..rho.nrows())
        .rev()
        .filter(|&i| e.values[i] > ZERO_TOL)
        .collect();
    let r = keep.len().max(1);
    let mut m = CMat::zeros(da * r, db);
    for (k, &i) in keep.iter().enumerate() {
        let s = e.values[i].sqrt();
        for a in 0..da {
            for b in 0..db {
                m[(a * r + k, b)] = e.vectors[(a * db + b, i)] * s;
            }
        }
    }
    (m, r)
}

/// Cq purification restricted to `S = ⊕_x span{|x, x, k⟩}`: rows `(x, k)`
/// for the eigenvectors `k` of each weighted block `p_x φ_x`, columns `b`.
pub(crate) struct CqRows {
    pub m: CMat,
    /// Row group (alphabet position) of each row.
    pub group: Vec<usize>,
}

pub(crate) fn cq_rows(blocks: &[CMat]) -> CqRows {
    let db = blocks.first().map_or(1, |b| b.nrows());
    let mut rows: Vec<Vec<linalg::C64>> = vec![];
    let mut group = vec![];
    for (x, blk) in blocks.iter().enumerate() {
        let e = linalg::eigh(blk);
        for i in (0..db).rev() {
            if e.values[i] <= ZERO_TOL {
                continue;
            }
            let s = e.values[i].sqrt();
            rows.push((0..db).map(|b| e.vectors[(b, i)] * s).collect());
            group.push(x);
        }
    }
    let m = CMat::from_fn(rows.len(), db, |r, c| rows[r][c]);
    CqRows { m, group }
}

/// Uhlmann partner: given `|Ψ⟩ ↔ M` (`n × d`) and a target `ρ̄` on the
/// `n`-dimensional side, return `N` (`n × d`) such that `|Ψ̄⟩ ↔ N` is the
/// optimal purification of `ρ̄` on an enlarged `B' ⊇ B`, compressed back
/// onto `B`. `⟨Ψ|Ψ̄⟩ = F(M M†, ρ̄)` and compression cannot increase the
/// distance to `Ψ` (which lives on `B`).
pub(crate) fn uhlmann(rho_bar: &CMat, m: &CMat) -> CMat {
    let n = m.nrows();
    let d = m.ncols();
    let dp = d.max(n);
    let mut mt = CMat::zeros(n, dp);
    mt.view_mut((0, 0), (n, d)).copy_from(m);
    let sq = linalg::apply_fn(rho_bar, |x| x.max(0.0).sqrt());
    let k = &sq * &mt;
    let svd = k.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let co = u * vt;
    let full = &sq * co;
    full.view((0, 0), (n, d)).into_owned()
}

/// `Tr_R` of the vector with rows `(a, r)` and columns `b`: operator on
/// `A ⊗ B` (A-major).
pub(crate) fn reduce_rows_ar(n: &CMat, da: usize, r: usize) -> CMat {
    let db = n.ncols();
    let v = CMat::from_fn(da * db, r, |ab, k| n[((ab / db) * r + k, ab % db)]);
    linalg::hermitize(&(&v * v.adjoint()))
}

/// Weighted cq blocks `Σ_{rows of x} N_xᵀ N̄_x` of a vector on `S ⊗ B`.
pub(crate) fn reduce_cq_rows(n: &CMat, group: &[usize], nx: usize) -> Vec<CMat> {
    let db = n.ncols();
    let mut out = vec![CMat::zeros(db, db); nx];
    for (row, &x) in group.iter().enumerate() {
        let v = n.row(row).transpose();
        out[x] += &v * v.adjoint();
    }
    out.into_iter().map(|b| linalg::hermitize(&b)).collect()
}

pub(crate) fn normalize(m: &CMat) -> CMat {
    let t = linalg::real_trace(m);
    if t > 0.0 {
        m * cr(1.0 / t)
    } else {
        m.clone()
    }
}
