//! Conditional min- and max-entropies, their smoothed versions, cq smoothing
//! and chain rules.
//!
//! Every quantity is obtained from one semidefinite program:
//!
//! * `Hmin(A|B) = −log min{Tr σ : ρ ⪯ 1_A ⊗ σ}`;
//! * `Hmax(A|B) = −Hmin(A|R)` on a purification `ρ_ABR`, with a direct
//!   fidelity maximization as cross-check and as the source of the witness `σ`;
//! * smoothing optimizes jointly over `ρ̄` in the purified-distance ball,
//!   the fidelity constraint written as a block LMI.
//!
//! When `A` is classical the max-entropy uses the cq purification restricted
//! to `span{|x, x, k⟩}`; the smoothing witness is then cq as well.

mod chain;
mod programs;
mod purification;
mod structure;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::quantum::{
    purified_distance, purified_distance_plain, CqState, DensityOperator, PureState,
    SystemLayout,
};

pub use chain::{chain_max, chain_min, ChainCheck};

use programs::{hmax_direct_program, hmin_grouped_program, hmin_program, Solved};
use purification::{
    cq_rows, normalize, purify_rows_ar, reduce_cq_rows, reduce_rows_ar, uhlmann,
};

/// Disagreement tolerated between the duality route and the direct
/// fidelity SDP for `Hmax`.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

/// Largest eigenvalue spread accepted before an instance counts as
/// ill-conditioned.
pub const MAX_SPREAD: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct EntropyResult {
    /// Entropy in bits.
    pub value: f64,
    pub epsilon: f64,
    /// Optimal normalized `σ` on the conditioning systems.
    pub witness_sigma: DensityOperator,
    /// Optimal smoothing state, present iff `epsilon > 0`.
    pub witness_rho_bar: Option<DensityOperator>,
    /// Duality gap of the primary solve.
    pub gap: f64,
    pub iterations: usize,
    /// Entropy of the witness state evaluated by an independent program.
    pub witness_value: Option<f64>,
    /// Purified distance to the witness, generalized fidelity.
    pub distance: Option<f64>,
    /// Same with the plain fidelity.
    pub distance_plain: Option<f64>,
}

impl EntropyResult {
    pub fn rho_bar_trace(&self) -> Option<f64> {
        self.witness_rho_bar.as_ref().map(|r| r.trace())
    }
}

struct Split {
    matrix: CMat,
    da: usize,
    db: usize,
    a_layout: SystemLayout,
    b_layout: SystemLayout,
}

impl Split {
    fn ab_layout(&self) -> SystemLayout {
        self.a_layout
            .concat(&self.b_layout)
            .expect("disjoint by construction")
    }

    /// Bring an operator on `A ⊗ B` back to the original factor order.
    fn restore(&self, m: &CMat, original: &SystemLayout) -> Result<DensityOperator> {
        let ab = DensityOperator::from_numerical(m, self.ab_layout());
        ab.reorder(&original.labels())
    }

    fn sigma(&self, s: &CMat) -> DensityOperator {
        DensityOperator::from_numerical(&normalize(s), self.b_layout.clone())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) || eps.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "smoothing parameter must satisfy 0 <= eps < 1, got {eps}"
        )));
    }
    Ok(())
}

fn check_conditioning(m: &CMat) -> Result<()> {
    let ev = linalg::eigvals(m);
    let pos: Vec<f64> = ev.into_iter().filter(|&v| v > linalg::ZERO_TOL).collect();
    if let (Some(min), Some(max)) = (pos.first(), pos.last()) {
        let spread = max / min;
        if spread > MAX_SPREAD {
            return Err(Error::IllConditioned(spread));
        }
    }
    Ok(())
}

fn split(rho: &DensityOperator, condition_on: &[&str]) -> Result<Split> {
    let layout = rho.layout();
    for l in condition_on {
        layout.position(l)?;
    }
    let b_layout = layout.subset(condition_on)?;
    let a_layout = layout.complement(condition_on)?;
    let mut order = a_layout.labels();
    order.extend(b_layout.labels());
    let ordered = rho.reorder(&order)?;
    check_conditioning(ordered.matrix())?;
    Ok(Split {
        matrix: ordered.into_matrix(),
        da: a_layout.dim(),
        db: b_layout.dim(),
        a_layout,
        b_layout,
    })
}

fn plain_result(value: f64, eps: f64, sigma: DensityOperator, s: &Solved) -> EntropyResult {
    EntropyResult {
        value,
        epsilon: eps,
        witness_sigma: sigma,
        witness_rho_bar: None,
        gap: s.gap,
        iterations: s.iterations,
        witness_value: None,
        distance: None,
        distance_plain: None,
    }
}

/// `Hmin(A|B)` with `B = condition_on` and `A` the remaining factors.
pub fn hmin_cond(rho: &DensityOperator, condition_on: &[&str]) -> Result<EntropyResult> {
    let sp = split(rho, condition_on)?;
    let s = hmin_program(&sp.matrix, sp.da, sp.db, 0.0)?;
    Ok(plain_result(s.value, 0.0, sp.sigma(&s.sigma), &s))
}

/// `Hmin^ε(A|B)`: maximum of `Hmin(A|B)_ρ̄` over the ball `P(ρ, ρ̄) ≤ ε`.
pub fn hmin_smooth(rho: &DensityOperator, condition_on: &[&str], eps: f64) -> Result<EntropyResult> {
    check_eps(eps)?;
    if eps == 0.0 {
        return hmin_cond(rho, condition_on);
    }
    let sp = split(rho, condition_on)?;
    let s = hmin_program(&sp.matrix, sp.da, sp.db, eps)?;
    let bar = sp.restore(s.rho_bar.as_ref().expect("smoothed"), rho.layout())?;
    let mut out = plain_result(s.value, eps, sp.sigma(&s.sigma), &s);
    out.distance = Some(purified_distance(rho, &bar)?);
    out.distance_plain = Some(purified_distance_plain(rho, &bar)?);
    out.witness_rho_bar = Some(bar);
    Ok(out)
}

/// `Hmax(A|B)` through duality, cross-checked against the direct fidelity
/// program within [`CROSS_CHECK_TOL`].
pub fn hmax_cond(rho: &DensityOperator, condition_on: &[&str]) -> Result<EntropyResult> {
    let sp = split(rho, condition_on)?;
    let primary = if is_classical_a(&sp) {
        let blocks = cq_blocks(&sp);
        let rows = cq_rows(&blocks);
        let rho_s = &rows.m * rows.m.adjoint();
        hmin_grouped_program(&rho_s, &rows.group, 0.0)?
    } else {
        let (m, r) = purify_rows_ar(&sp.matrix, sp.da, sp.db);
        hmin_program(&(&m * m.adjoint()), sp.da, r, 0.0)?
    };
    let direct = hmax_direct_program(&sp.matrix, sp.da, sp.db)?;
    let value = -primary.value;
    if (value - direct.value).abs() > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "Hmax via duality {value:.9} vs direct {:.9}",
            direct.value
        )));
    }
    let mut out = plain_result(value, 0.0, sp.sigma(&direct.sigma), &primary);
    out.witness_value = Some(direct.value);
    Ok(out)
}

/// `Hmax(A|B)` from the direct fidelity program alone.
pub fn hmax_cond_direct(rho: &DensityOperator, condition_on: &[&str]) -> Result<EntropyResult> {
    let sp = split(rho, condition_on)?;
    let s = hmax_direct_program(&sp.matrix, sp.da, sp.db)?;
    Ok(plain_result(s.value, 0.0, sp.sigma(&s.sigma), &s))
}

/// `Hmax^ε(A|B)`: minimum of `Hmax(A|B)_ρ̄` over the ball. For classical `A`
/// the optimum is searched over cq candidates, which loses nothing.
pub fn hmax_smooth(rho: &DensityOperator, condition_on: &[&str], eps: f64) -> Result<EntropyResult> {
    check_eps(eps)?;
    if eps == 0.0 {
        return hmax_cond(rho, condition_on);
    }
    let sp = split(rho, condition_on)?;
    if is_classical_a(&sp) {
        hmax_smooth_cq_split(rho, &sp, eps)
    } else {
        hmax_smooth_generic_split(rho, &sp, eps)
    }
}

/// `Hmax^ε(A|B)` without exploiting classical structure of `A`: the
/// smoothing candidate ranges over all states.
pub fn hmax_smooth_unrestricted(
    rho: &DensityOperator,
    condition_on: &[&str],
    eps: f64,
) -> Result<EntropyResult> {
    check_eps(eps)?;
    let sp = split(rho, condition_on)?;
    if eps == 0.0 {
        let (m, r) = purify_rows_ar(&sp.matrix, sp.da, sp.db);
        let s = hmin_program(&(&m * m.adjoint()), sp.da, r, 0.0)?;
        let direct = hmax_direct_program(&sp.matrix, sp.da, sp.db)?;
        let mut out = plain_result(-s.value, 0.0, sp.sigma(&direct.sigma), &s);
        out.witness_value = Some(direct.value);
        return Ok(out);
    }
    hmax_smooth_generic_split(rho, &sp, eps)
}

/// `Hmax^ε(X|B)` of a cq state.
pub fn hmax_smooth_cq(cq: &CqState, eps: f64) -> Result<EntropyResult> {
    let rho = cq.embed();
    let labels = cq.side_layout().labels();
    hmax_smooth(&rho, &labels, eps)
}

/// `Hmin^ε(X|B)` of a cq state.
pub fn hmin_smooth_cq(cq: &CqState, eps: f64) -> Result<EntropyResult> {
    let rho = cq.embed();
    let labels = cq.side_layout().labels();
    hmin_smooth(&rho, &labels, eps)
}

fn is_classical_a(sp: &Split) -> bool {
    let st = structure::detect(&sp.matrix, sp.da, sp.db);
    st.a_classes.len() == sp.da
}

fn cq_blocks(sp: &Split) -> Vec<CMat> {
    let d = sp.db;
    (0..sp.da)
        .map(|x| sp.matrix.view((x * d, x * d), (d, d)).into_owned())
        .collect()
}

fn finish_smoothed(
    rho: &DensityOperator,
    sp: &Split,
    eps: f64,
    primary: &Solved,
    bar_ab: CMat,
) -> Result<EntropyResult> {
    let direct = hmax_direct_program(&bar_ab, sp.da, sp.db)?;
    let bar = sp.restore(&bar_ab, rho.layout())?;
    let mut out = plain_result(-primary.value, eps, sp.sigma(&direct.sigma), primary);
    out.witness_value = Some(direct.value);
    out.distance = Some(purified_distance(rho, &bar)?);
    out.distance_plain = Some(purified_distance_plain(rho, &bar)?);
    out.witness_rho_bar = Some(bar);
    Ok(out)
}

fn hmax_smooth_cq_split(rho: &DensityOperator, sp: &Split, eps: f64) -> Result<EntropyResult> {
    let blocks = cq_blocks(sp);
    let rows = cq_rows(&blocks);
    let rho_s = &rows.m * rows.m.adjoint();
    let s = hmin_grouped_program(&rho_s, &rows.group, eps)?;
    let partner = uhlmann(s.rho_bar.as_ref().expect("smoothed"), &rows.m);
    let bar_blocks = reduce_cq_rows(&partner, &rows.group, sp.da);
    finish_smoothed(rho, sp, eps, &s, linalg::block_diag(&bar_blocks))
}

fn hmax_smooth_generic_split(rho: &DensityOperator, sp: &Split, eps: f64) -> Result<EntropyResult> {
    let (m, r) = purify_rows_ar(&sp.matrix, sp.da, sp.db);
    let s = hmin_program(&(&m * m.adjoint()), sp.da, r, eps)?;
    let partner = uhlmann(s.rho_bar.as_ref().expect("smoothed"), &m);
    let bar_ab = reduce_rows_ar(&partner, sp.da, r);
    finish_smoothed(rho, sp, eps, &s, bar_ab)
}

/// Project a smoothing candidate on the cq purification layout
/// `(X, X', side..., C)` with `P = Σ_x |x⟩⟨x| ⊗ |x⟩⟨x|` on `X X'`.
pub fn cq_smoothing_project(rho_hat: &DensityOperator, cq_template: &CqState) -> Result<DensityOperator> {
    let layout = rho_hat.layout();
    let factors = layout.factors();
    let nx = cq_template.alphabet_size();
    let side = cq_template.side_layout();
    let expected = 2 + side.len() + 1;
    let consistent = factors.len() == expected
        && factors[0].1 == nx
        && factors[1].1 == nx
        && factors[2..2 + side.len()]
            .iter()
            .zip(side.factors())
            .all(|(a, b)| a.1 == b.1);
    if !consistent {
        return Err(Error::DimensionMismatch(format!(
            "candidate layout {:?} is not a purification layout for |X| = {nx} with side {:?}",
            factors,
            side.factors()
        )));
    }
    let rest = layout.dim() / (nx * nx);
    let n = layout.dim();
    let keep = |i: usize| {
        let x = i / (nx * rest);
        let xp = (i / rest) % nx;
        x == xp
    };
    let m = rho_hat.matrix();
    let out = CMat::from_fn(n, n, |r, c| {
        if keep(r) && keep(c) {
            m[(r, c)]
        } else {
            linalg::C64::new(0.0, 0.0)
        }
    });
    Ok(DensityOperator::from_numerical(&out, layout.clone()))
}

/// Cq purification with fresh labels for the copy `X'` and the purifying
/// system `C`.
pub fn cq_purification(cq: &CqState) -> Result<PureState> {
    let taken = cq.layout();
    let fresh = |base: &str| {
        let mut l = base.to_string();
        while taken.contains(&l) {
            l.push('\'');
        }
        l
    };
    let xp = fresh(&format!("{}'", cq.x_label()));
    let c = fresh("C");
    crate::quantum::purify_cq(cq, &xp, &c)
}

#[cfg(test)]
mod tests;
