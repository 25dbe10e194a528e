//! Block structure of a bipartite operator in the computational basis.
//!
//! If `ρ_AB` never couples two groups of `A` basis states (or of `B` basis
//! states), pinching with the corresponding projectors leaves `ρ` invariant
//! and can only improve any candidate `σ` or `ρ̄`, so every entropy program
//! decomposes into independent blocks `(α, β)`.

use crate::linalg::{CMat, STRUCTURE_TOL};

pub(crate) struct Blocks {
    pub a_classes: Vec<Vec<usize>>,
    pub b_classes: Vec<Vec<usize>>,
    /// Blocks `(α, β)` on which `ρ` is not identically zero.
    pub active: Vec<(usize, usize)>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

fn classes(parent: &mut [usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = parent.len();
    let mut id = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = vec![];
    let mut class_of = vec![0; n];
    for i in 0..n {
        let r = find(parent, i);
        if id[r] == usize::MAX {
            id[r] = out.len();
            out.push(vec![]);
        }
        out[id[r]].push(i);
        class_of[i] = id[r];
    }
    (out, class_of)
}

pub(crate) fn detect(rho: &CMat, da: usize, db: usize) -> Blocks {
    let mut pa: Vec<usize> = (0..da).collect();
    let mut pb: Vec<usize> = (0..db).collect();
    let n = da * db;
    for r in 0..n {
        for c in r..n {
            if rho[(r, c)].norm() > STRUCTURE_TOL {
                union(&mut pa, r / db, c / db);
                union(&mut pb, r % db, c % db);
            }
        }
    }
    let (a_classes, a_of) = classes(&mut pa);
    let (b_classes, b_of) = classes(&mut pb);
    let mut active = vec![];
    for r in 0..n {
        if rho[(r, r)].re > STRUCTURE_TOL {
            let key = (a_of[r / db], b_of[r % db]);
            if !active.contains(&key) {
                active.push(key);
            }
        }
    }
    active.sort();
    Blocks {
        a_classes,
        b_classes,
        active,
    }
}

/// Flat indices (A-major) of the block `a_idx × b_idx`.
pub(crate) fn block_indices(a_idx: &[usize], b_idx: &[usize], db: usize) -> Vec<usize> {
    a_idx
        .iter()
        .flat_map(|&a| b_idx.iter().map(move |&b| a * db + b))
        .collect()
}

pub(crate) fn extract(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

pub(crate) fn scatter(full: &mut CMat, block: &CMat, idx: &[usize]) {
    for (r, &ir) in idx.iter().enumerate() {
        for (c, &ic) in idx.iter().enumerate() {
            full[(ir, ic)] += block[(r, c)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;

    #[test]
    fn classical_register_splits_into_singletons() {
        // diag(0.5, 0, 0, 0.5) on 2 ⊗ 2
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = cr(0.5);
        m[(3, 3)] = cr(0.5);
        let b = detect(&m, 2, 2);
        assert_eq!(b.a_classes.len(), 2);
        assert_eq!(b.b_classes.len(), 2);
        assert_eq!(b.active, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn entangled_state_is_one_block() {
        let mut m = CMat::zeros(4, 4);
        for &(r, c) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(r, c)] = cr(0.5);
        }
        let b = detect(&m, 2, 2);
        assert_eq!(b.a_classes.len(), 1);
        assert_eq!(b.b_classes.len(), 1);
    }
}
