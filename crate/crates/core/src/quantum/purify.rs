use crate::error::{Error, Result};
use crate::linalg::{self, CVec, C64};

use super::cq::CqState;
use super::layout::SystemLayout;
use super::state::{DensityOperator, PureState};

/// Label given to the purifying reference system.
pub const REFERENCE_LABEL: &str = "R";

/// Purification `Σ_k √λ_k |v_k⟩ ⊗ |k⟩_R` with `dim R = rank ρ` (at least 1).
pub fn purify(rho: &DensityOperator) -> Result<PureState> {
    purify_with_label(rho, REFERENCE_LABEL)
}

pub fn purify_with_label(rho: &DensityOperator, label: &str) -> Result<PureState> {
    if !rho.is_normalized() {
        return Err(Error::InvalidArgument(format!(
            "purify needs a normalized state, trace is {:.12}",
            rho.trace()
        )));
    }
    let e = linalg::eigh(rho.matrix());
    let n = rho.dim();
    let keep: Vec<usize> = (0..n)
        .rev()
        .filter(|&i| e.values[i] > linalg::ZERO_TOL)
        .collect();
    let r = keep.len().max(1);
    let layout = rho
        .layout()
        .concat(&SystemLayout::single(label, r)?)?;
    let mut v = CVec::zeros(n * r);
    for (k, &i) in keep.iter().enumerate() {
        let s = e.values[i].sqrt();
        for a in 0..n {
            v[a * r + k] += e.vectors[(a, i)] * s;
        }
    }
    let v = &v / C64::new(v.norm(), 0.0);
    PureState::new(v, layout)
}

/// Cq purification `Σ_x √p_x |x⟩_X |x⟩_X' |φ_x⟩_{side,C}` where `|φ_x⟩`
/// purifies the conditional state on the side systems plus `C`.
///
/// `dim C` is the largest rank among the conditional states.
pub fn purify_cq(cq: &CqState, x_copy: &str, c_label: &str) -> Result<PureState> {
    let d = cq.side_dim();
    let eigs: Vec<_> = cq.states().iter().map(|s| linalg::eigh(s.matrix())).collect();
    let rank = eigs
        .iter()
        .map(|e| e.values.iter().filter(|&&v| v > linalg::ZERO_TOL).count())
        .max()
        .unwrap_or(1)
        .max(1);
    let nx = cq.alphabet_size();
    let layout = SystemLayout::single(cq.x_label(), nx)?
        .concat(&SystemLayout::single(x_copy, nx)?)?
        .concat(cq.side_layout())?
        .concat(&SystemLayout::single(c_label, rank)?)?;
    let mut v = CVec::zeros(layout.dim());
    for (i, &x) in cq.symbols().iter().enumerate() {
        let e = &eigs[i];
        let base = (x * nx + x) * d * rank;
        let mut k = 0;
        for j in (0..d).rev() {
            if e.values[j] <= linalg::ZERO_TOL {
                continue;
            }
            let s = (cq.probs()[i] * e.values[j]).sqrt();
            for b in 0..d {
                v[base + b * rank + k] += e.vectors[(b, j)] * s;
            }
            k += 1;
        }
    }
    let v = &v / C64::new(v.norm(), 0.0);
    PureState::new(v, layout)
}
