use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ZERO_TOL};

use super::layout::{join_index, split_index, SystemLayout};

/// Hermitian PSD operator with trace in `(0, 1]` on a labelled tensor space.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: CMat,
    layout: SystemLayout,
}

pub(crate) fn check_density(matrix: &CMat, layout: &SystemLayout) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::invariant(
            "square matrix",
            format!("{}x{}", matrix.nrows(), matrix.ncols()),
        ));
    }
    if matrix.nrows() != layout.dim() {
        return Err(Error::invariant(
            "dimension matches layout",
            format!("matrix {} vs layout {}", matrix.nrows(), layout.dim()),
        ));
    }
    let defect = linalg::hermitian_defect(matrix);
    if defect > 1e-10 {
        return Err(Error::invariant(
            "Hermitian within 1e-10",
            format!("defect {defect:.3e}"),
        ));
    }
    let min = linalg::min_eigenvalue(matrix);
    if min < -ZERO_TOL {
        return Err(Error::invariant(
            "eigenvalues >= -1e-10",
            format!("min eigenvalue {min:.3e}"),
        ));
    }
    let tr = linalg::real_trace(matrix);
    if !(tr > 0.0 && tr <= 1.0 + 1e-10) {
        return Err(Error::invariant(
            "trace in (0, 1 + 1e-10]",
            format!("trace {tr:.12}"),
        ));
    }
    Ok(())
}

impl DensityOperator {
    pub fn new(matrix: CMat, layout: SystemLayout) -> Result<Self> {
        check_density(&matrix, &layout)?;
        Ok(DensityOperator {
            matrix: linalg::hermitize(&matrix),
            layout,
        })
    }

    /// Internal constructor for operators produced by exact algebra; the
    /// invariants are re-checked in debug builds.
    pub(crate) fn from_parts(matrix: CMat, layout: SystemLayout) -> Self {
        let matrix = linalg::hermitize(&matrix);
        debug_assert!(
            check_density(&matrix, &layout).is_ok(),
            "density invariant: {:?}",
            check_density(&matrix, &layout)
        );
        DensityOperator { matrix, layout }
    }

    /// Clamp tiny negative eigenvalues produced by numerical optimisation and
    /// wrap the result.
    pub(crate) fn from_numerical(matrix: &CMat, layout: SystemLayout) -> Self {
        let cleaned = linalg::apply_fn(matrix, |x| x.max(0.0));
        let tr = linalg::real_trace(&cleaned);
        let cleaned = if tr > 1.0 {
            cleaned * linalg::cr(1.0 / tr)
        } else {
            cleaned
        };
        Self::from_parts(cleaned, layout)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::real_trace(&self.matrix)
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= 1e-10
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvals(&self.matrix)
    }

    /// Reduced operator on `keep` (factor order of the original layout).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        let kept_layout = self.layout.subset(keep)?;
        let m = partial_trace_matrix(&self.matrix, &self.layout, keep)?;
        Ok(DensityOperator::from_parts(m, kept_layout))
    }

    /// Reduced operator with `labels` traced out.
    pub fn trace_out(&self, labels: &[&str]) -> Result<DensityOperator> {
        let comp = self.layout.complement(labels)?;
        let keep: Vec<&str> = comp.labels();
        self.partial_trace(&keep)
    }

    /// Permute tensor factors into `order` (must list every label once).
    pub fn reorder(&self, order: &[&str]) -> Result<DensityOperator> {
        let (m, layout) = reorder_matrix(&self.matrix, &self.layout, order)?;
        Ok(DensityOperator::from_parts(m, layout))
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(DensityOperator::from_parts(
            linalg::kron(&self.matrix, &other.matrix),
            layout,
        ))
    }

    /// True if the operator is block diagonal in the computational basis of
    /// factor `label`.
    pub fn is_classical_on(&self, label: &str) -> Result<bool> {
        let pos = self.layout.position(label)?;
        let dims = self.layout.dims();
        let n = self.dim();
        for r in 0..n {
            let ri = split_index(r, &dims)[pos];
            for c in 0..n {
                if split_index(c, &dims)[pos] != ri
                    && self.matrix[(r, c)].norm() > linalg::STRUCTURE_TOL
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Partial trace of a raw matrix over the complement of `keep`.
pub(crate) fn partial_trace_matrix(
    m: &CMat,
    layout: &SystemLayout,
    keep: &[&str],
) -> Result<CMat> {
    for l in keep {
        layout.position(l)?;
    }
    if m.nrows() != layout.dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix {} vs layout {}",
            m.nrows(),
            layout.dim()
        )));
    }
    let dims = layout.dims();
    let keep_mask: Vec<bool> = layout
        .labels()
        .iter()
        .map(|l| keep.contains(l))
        .collect();
    let kept_dims: Vec<usize> = dims
        .iter()
        .zip(&keep_mask)
        .filter(|(_, &k)| k)
        .map(|(&d, _)| d)
        .collect();
    let traced_dims: Vec<usize> = dims
        .iter()
        .zip(&keep_mask)
        .filter(|(_, &k)| !k)
        .map(|(&d, _)| d)
        .collect();
    let n = layout.dim();
    let mut kept_idx = vec![0; n];
    let mut traced_idx = vec![0; n];
    for (i, (ki, ti)) in kept_idx.iter_mut().zip(traced_idx.iter_mut()).enumerate() {
        let parts = split_index(i, &dims);
        let kp: Vec<usize> = parts
            .iter()
            .zip(&keep_mask)
            .filter(|(_, &k)| k)
            .map(|(&p, _)| p)
            .collect();
        let tp: Vec<usize> = parts
            .iter()
            .zip(&keep_mask)
            .filter(|(_, &k)| !k)
            .map(|(&p, _)| p)
            .collect();
        *ki = join_index(&kp, &kept_dims);
        *ti = join_index(&tp, &traced_dims);
    }
    let kd: usize = kept_dims.iter().product();
    let mut out = CMat::zeros(kd, kd);
    for r in 0..n {
        for c in 0..n {
            if traced_idx[r] == traced_idx[c] {
                out[(kept_idx[r], kept_idx[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

pub(crate) fn reorder_matrix(
    m: &CMat,
    layout: &SystemLayout,
    order: &[&str],
) -> Result<(CMat, SystemLayout)> {
    if order.len() != layout.len() {
        return Err(Error::InvalidArgument(format!(
            "reorder needs all {} labels, got {}",
            layout.len(),
            order.len()
        )));
    }
    let perm: Vec<usize> = order
        .iter()
        .map(|l| layout.position(l))
        .collect::<Result<_>>()?;
    let new_layout = SystemLayout::new(perm.iter().map(|&p| layout.factors()[p].clone()))?;
    let old_dims = layout.dims();
    let new_dims = new_layout.dims();
    let n = layout.dim();
    let mut map = vec![0; n];
    for (old, slot) in map.iter_mut().enumerate() {
        let parts = split_index(old, &old_dims);
        let np: Vec<usize> = perm.iter().map(|&p| parts[p]).collect();
        *slot = join_index(&np, &new_dims);
    }
    let mut out = CMat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok((out, new_layout))
}

/// Unit vector on a labelled tensor space.
#[derive(Clone, Debug)]
pub struct PureState {
    vector: CVec,
    layout: SystemLayout,
}

impl PureState {
    pub fn new(vector: CVec, layout: SystemLayout) -> Result<Self> {
        if vector.len() != layout.dim() {
            return Err(Error::invariant(
                "dimension matches layout",
                format!("vector {} vs layout {}", vector.len(), layout.dim()),
            ));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invariant("norm = 1 within 1e-10", format!("norm {norm}")));
        }
        Ok(PureState { vector, layout })
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_parts(linalg::outer(&self.vector, &self.vector), self.layout.clone())
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.vector.dotc(&other.vector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr};

    fn bell() -> DensityOperator {
        let s = 1.0 / 2f64.sqrt();
        let v = CVec::from_vec(vec![cr(s), cr(0.0), cr(0.0), cr(s)]);
        let l = SystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        PureState::new(v, l).unwrap().density()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = bell().partial_trace(&["A"]).unwrap();
        assert!(linalg::max_abs_diff(r.matrix(), &(linalg::identity(2) * cr(0.5))) < 1e-14);
    }

    #[test]
    fn product_marginal() {
        let a = CMat::from_row_slice(2, 2, &[cr(0.7), c(0.1, 0.2), c(0.1, -0.2), cr(0.3)]);
        let b = CMat::from_row_slice(3, 3, &[
            cr(0.5), cr(0.0), cr(0.1),
            cr(0.0), cr(0.3), cr(0.0),
            cr(0.1), cr(0.0), cr(0.2),
        ]);
        let ra = DensityOperator::new(a.clone(), SystemLayout::single("A", 2).unwrap()).unwrap();
        let rb = DensityOperator::new(b.clone(), SystemLayout::single("B", 3).unwrap()).unwrap();
        let ab = ra.tensor(&rb).unwrap();
        assert!(linalg::max_abs_diff(ab.partial_trace(&["A"]).unwrap().matrix(), &a) < 1e-14);
        assert!(linalg::max_abs_diff(ab.partial_trace(&["B"]).unwrap().matrix(), &b) < 1e-14);
        let ba = ab.reorder(&["B", "A"]).unwrap();
        assert!(linalg::max_abs_diff(ba.matrix(), &linalg::kron(&b, &a)) < 1e-14);
    }

    #[test]
    fn unknown_label_is_an_error() {
        assert!(matches!(bell().partial_trace(&["C"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn invariant_violations_are_named() {
        let l = SystemLayout::single("A", 2).unwrap();
        let bad = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-0.5)]);
        match DensityOperator::new(bad, l.clone()) {
            Err(Error::Invariant { invariant, .. }) => assert!(invariant.contains("eigenvalues")),
            other => panic!("unexpected {other:?}"),
        }
        let big = linalg::identity(2);
        match DensityOperator::new(big, l) {
            Err(Error::Invariant { invariant, .. }) => assert!(invariant.contains("trace")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
