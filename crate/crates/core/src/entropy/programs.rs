//! SDP formulations.
//!
//! * `2^{−Hmin(A|B)} = min Tr σ  s.t.  1_A ⊗ σ ⪰ ρ`.
//! * `2^{Hmax(A|B)/2} = max Σ Tr Y  s.t.  [[1, Y], [Y, W†(1_A ⊗ σ)W]] ⪰ 0, σ ⪰ 0, Tr σ ≤ 1`
//!   where `ρ = W W†`, since `F(ρ, τ) = Tr √(W† τ W)`.
//! * Smoothing adds a variable `ρ̄ ⪰ 0` with `Tr ρ̄ ≤ 1` and
//!   `F(ρ, ρ̄) + √((1 − Tr ρ)(1 − Tr ρ̄)) ≥ √(1 − ε²)`, the square-root term
//!   carried by a 2×2 LMI `[[1 − Tr ρ, t], [t, 1 − Tr ρ̄]] ⪰ 0`.

use crate::error::Result;
use crate::linalg::{self, cr, CMat};
use crate::sdp::{self, HermitianVar, SdpBuilder, SolverOptions};

use super::structure::{block_indices, detect, extract, scatter};

pub(crate) struct Solved {
    /// Entropy in bits.
    pub value: f64,
    /// Unnormalized optimal `σ` on the conditioning system.
    pub sigma: CMat,
    /// Optimal smoothing state (same space as the input).
    pub rho_bar: Option<CMat>,
    pub gap: f64,
    pub iterations: usize,
}

fn one(v: f64) -> CMat {
    CMat::from_element(1, 1, cr(v))
}

fn trace_1x1(e: &CMat, coef: f64) -> CMat {
    one(coef * linalg::real_trace(e))
}

/// `[[0, e], [e, 0]]` in a `2r` block.
fn off_diagonal(e: &CMat) -> CMat {
    let r = e.nrows();
    let mut m = CMat::zeros(2 * r, 2 * r);
    m.view_mut((0, r), (r, r)).copy_from(e);
    m.view_mut((r, 0), (r, r)).copy_from(&e.adjoint());
    m
}

/// `[[0, 0], [0, e]]` in a `2r` block.
fn lower_right(e: &CMat) -> CMat {
    let r = e.nrows();
    let mut m = CMat::zeros(2 * r, 2 * r);
    m.view_mut((r, r), (r, r)).copy_from(e);
    m
}

fn upper_identity(r: usize) -> CMat {
    let mut m = CMat::zeros(2 * r, 2 * r);
    m.view_mut((0, 0), (r, r)).fill_with_identity();
    m
}

/// Ball constraints for a block-diagonal `ρ̄ = ⊕ ρ̄_k` around `ρ = ⊕ W_k W_k†`.
pub(crate) fn add_ball(
    sb: &mut SdpBuilder,
    blocks: &[(HermitianVar, CMat)],
    trace_rho: f64,
    eps: f64,
) {
    let target = (1.0 - eps * eps).max(0.0).sqrt();
    let fid = sb.lmi(1);
    sb.add_constant(fid, &one(-target));
    let tr = sb.lmi(1);
    sb.add_constant(tr, &one(1.0));
    for (rb, w) in blocks {
        let pos = sb.lmi(rb.dim());
        sb.add_map(pos, *rb, |e| e.clone());
        sb.add_map(tr, *rb, |e| trace_1x1(e, -1.0));
        let r = w.ncols();
        if r == 0 {
            continue;
        }
        let y = sb.hermitian(r);
        let l = sb.lmi(2 * r);
        sb.add_constant(l, &upper_identity(r));
        sb.add_map(l, y, off_diagonal);
        let wa = w.adjoint();
        sb.add_map(l, *rb, |e| lower_right(&(&wa * e * w)));
        sb.add_map(fid, y, |e| trace_1x1(e, 1.0));
    }
    let deficit = 1.0 - trace_rho;
    if deficit > 1e-12 {
        let t = sb.scalar();
        sb.add_scalar(fid, t, &one(1.0));
        let l = sb.lmi(2);
        let mut cst = CMat::zeros(2, 2);
        cst[(0, 0)] = cr(deficit);
        cst[(1, 1)] = cr(1.0);
        sb.add_constant(l, &cst);
        let mut coupling = CMat::zeros(2, 2);
        coupling[(0, 1)] = cr(1.0);
        coupling[(1, 0)] = cr(1.0);
        sb.add_scalar(l, t, &coupling);
        for (rb, _) in blocks {
            sb.add_map(l, *rb, |e| {
                let mut m = CMat::zeros(2, 2);
                m[(1, 1)] = cr(-linalg::real_trace(e));
                m
            });
        }
    }
}

/// `Hmin^ε(A|B)` of an operator on `A ⊗ B` (A-major); `ε = 0` gives the
/// unsmoothed value.
pub(crate) fn hmin_program(rho: &CMat, da: usize, db: usize, eps: f64) -> Result<Solved> {
    let st = detect(rho, da, db);
    let mut sb = SdpBuilder::new();
    let mut sigmas: Vec<Option<HermitianVar>> = vec![None; st.b_classes.len()];
    for &(_, beta) in &st.active {
        if sigmas[beta].is_none() {
            let v = sb.hermitian(st.b_classes[beta].len());
            sb.maximize_trace(v, -1.0);
            sigmas[beta] = Some(v);
        }
    }
    let mut ball = vec![];
    let mut rbars = vec![];
    for &(alpha, beta) in &st.active {
        let a_idx = &st.a_classes[alpha];
        let b_idx = &st.b_classes[beta];
        let idx = block_indices(a_idx, b_idx, db);
        let block = extract(rho, &idx);
        let na = a_idx.len();
        let sig = sigmas[beta].expect("allocated above");
        let l = sb.lmi(idx.len());
        let eye = CMat::identity(na, na);
        sb.add_map(l, sig, |e| linalg::kron(&eye, e));
        if eps == 0.0 {
            sb.add_constant(l, &(-block));
        } else {
            let rb = sb.hermitian(idx.len());
            sb.add_map(l, rb, |e| -e);
            ball.push((rb, linalg::psd_factor(&block)));
            rbars.push((rb, idx));
        }
    }
    if eps > 0.0 {
        add_ball(&mut sb, &ball, linalg::real_trace(rho), eps);
    }
    let sol = sdp::solve(&sb.build(), &SolverOptions::default())?;
    let mut sigma = CMat::zeros(db, db);
    for (beta, v) in sigmas.iter().enumerate() {
        if let Some(v) = v {
            let s = v.value(&sol.y);
            let b_idx = &st.b_classes[beta];
            scatter(&mut sigma, &s, b_idx);
        }
    }
    let rho_bar = (eps > 0.0).then(|| {
        let mut full = CMat::zeros(da * db, da * db);
        for (rb, idx) in &rbars {
            scatter(&mut full, &rb.value(&sol.y), idx);
        }
        full
    });
    Ok(Solved {
        value: -(-sol.objective).log2(),
        sigma,
        rho_bar,
        gap: sol.gap,
        iterations: sol.iterations,
    })
}

/// Unsmoothed `Hmax(A|B)` by direct fidelity maximization.
pub(crate) fn hmax_direct_program(rho: &CMat, da: usize, db: usize) -> Result<Solved> {
    let st = detect(rho, da, db);
    let mut sb = SdpBuilder::new();
    let tr = sb.lmi(1);
    sb.add_constant(tr, &one(1.0));
    let mut sigmas: Vec<Option<HermitianVar>> = vec![None; st.b_classes.len()];
    for &(_, beta) in &st.active {
        if sigmas[beta].is_none() {
            let v = sb.hermitian(st.b_classes[beta].len());
            let pos = sb.lmi(v.dim());
            sb.add_map(pos, v, |e| e.clone());
            sb.add_map(tr, v, |e| trace_1x1(e, -1.0));
            sigmas[beta] = Some(v);
        }
    }
    for &(alpha, beta) in &st.active {
        let a_idx = &st.a_classes[alpha];
        let b_idx = &st.b_classes[beta];
        let idx = block_indices(a_idx, b_idx, db);
        let w = linalg::psd_factor(&extract(rho, &idx));
        let r = w.ncols();
        if r == 0 {
            continue;
        }
        let y = sb.hermitian(r);
        sb.maximize_trace(y, 1.0);
        let l = sb.lmi(2 * r);
        sb.add_constant(l, &upper_identity(r));
        sb.add_map(l, y, off_diagonal);
        let eye = CMat::identity(a_idx.len(), a_idx.len());
        let wa = w.adjoint();
        let sig = sigmas[beta].expect("allocated above");
        sb.add_map(l, sig, |e| lower_right(&(&wa * linalg::kron(&eye, e) * &w)));
    }
    let sol = sdp::solve(&sb.build(), &SolverOptions::default())?;
    let mut sigma = CMat::zeros(db, db);
    for (beta, v) in sigmas.iter().enumerate() {
        if let Some(v) = v {
            scatter(&mut sigma, &v.value(&sol.y), &st.b_classes[beta]);
        }
    }
    Ok(Solved {
        value: 2.0 * sol.objective.max(f64::MIN_POSITIVE).log2(),
        sigma,
        rho_bar: None,
        gap: sol.gap,
        iterations: sol.iterations,
    })
}

/// `min Σ Tr σ_g  s.t.  ⊕_g σ_g ⪰ ρ̄` where row `i` of `ρ` belongs to group
/// `group[i]` and `σ` is block diagonal over groups. This is
/// `2^{−Hmin^ε(X|X'C)}` for a cq purification restricted to the subspace
/// spanned by `|x, x, k⟩`.
pub(crate) fn hmin_grouped_program(rho: &CMat, group: &[usize], eps: f64) -> Result<Solved> {
    let n = rho.nrows();
    let st = detect(rho, 1, n);
    let mut sb = SdpBuilder::new();
    let mut sigmas: Vec<(HermitianVar, Vec<usize>)> = vec![];
    let mut ball = vec![];
    let mut rbars = vec![];
    for &(_, beta) in &st.active {
        let idx = &st.b_classes[beta];
        let block = extract(rho, idx);
        let l = sb.lmi(idx.len());
        let mut groups: Vec<usize> = idx.iter().map(|&i| group[i]).collect();
        groups.dedup();
        groups.sort_unstable();
        groups.dedup();
        for g in groups {
            let local: Vec<usize> = (0..idx.len()).filter(|&p| group[idx[p]] == g).collect();
            let v = sb.hermitian(local.len());
            sb.maximize_trace(v, -1.0);
            let dim = idx.len();
            sb.add_map(l, v, |e| {
                let mut m = CMat::zeros(dim, dim);
                scatter(&mut m, e, &local);
                m
            });
            sigmas.push((v, local.iter().map(|&p| idx[p]).collect()));
        }
        if eps == 0.0 {
            sb.add_constant(l, &(-block));
        } else {
            let rb = sb.hermitian(idx.len());
            sb.add_map(l, rb, |e| -e);
            ball.push((rb, linalg::psd_factor(&block)));
            rbars.push((rb, idx.clone()));
        }
    }
    if eps > 0.0 {
        add_ball(&mut sb, &ball, linalg::real_trace(rho), eps);
    }
    let sol = sdp::solve(&sb.build(), &SolverOptions::default())?;
    let mut sigma = CMat::zeros(n, n);
    for (v, idx) in &sigmas {
        scatter(&mut sigma, &v.value(&sol.y), idx);
    }
    let rho_bar = (eps > 0.0).then(|| {
        let mut full = CMat::zeros(n, n);
        for (rb, idx) in &rbars {
            scatter(&mut full, &rb.value(&sol.y), idx);
        }
        full
    });
    Ok(Solved {
        value: -(-sol.objective).log2(),
        sigma,
        rho_bar,
        gap: sol.gap,
        iterations: sol.iterations,
    })
}
