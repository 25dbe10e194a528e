//! Infeasible-start primal-dual path-following method (HKM search direction,
//! Mehrotra predictor-corrector) for
//!
//! ```text
//!   (P)  min ⟨C, X⟩  s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0
//!   (D)  max bᵀy     s.t. Z = C − Σ y_i A_i ⪰ 0
//! ```
//!
//! with `C = F0` and `A_i = −F_i`, so `(D)` is the LMI problem stored in
//! [`SdpProblem`].

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

use super::problem::{SdpProblem, Sparse};

type Mat = DMatrix<f64>;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Absolute duality-gap target.
    pub gap_tol: f64,
    /// Relative primal/dual infeasibility target.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Largest gap still accepted when progress stalls.
    pub accept_gap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_tol: 1e-8,
            feas_tol: 1e-9,
            max_iter: 200,
            accept_gap: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Optimal LMI variables.
    pub y: Vec<f64>,
    /// `bᵀy`.
    pub objective: f64,
    /// `⟨C, X⟩`.
    pub primal_objective: f64,
    /// `|⟨C, X⟩ − bᵀy|`, bounded by `⟨X, Z⟩` plus residual terms.
    pub gap: f64,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

struct Data<'a> {
    p: &'a SdpProblem,
    /// Per block: variables touching it, in ascending order.
    block_vars: Vec<Vec<usize>>,
    /// Per block: coefficient matrices aligned with `block_vars`.
    block_coeffs: Vec<Vec<&'a Sparse>>,
}

fn dense(s: &Sparse, n: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    for &(r, c, v) in s {
        m[(r, c)] += v;
    }
    m
}

fn sparse_inner(s: &Sparse, m: &Mat) -> f64 {
    s.iter().map(|&(r, c, v)| v * m[(r, c)]).sum()
}

fn inner(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Largest `α ≤ 1` with `X + α ΔX ⪰ 0`, scaled back by `gamma`.
fn step_length(x: &[Mat], dx: &[Mat], gamma: f64) -> f64 {
    let mut alpha = 1.0f64;
    for (xb, dxb) in x.iter().zip(dx) {
        let n = xb.nrows();
        let lmin = if n == 1 {
            dxb[(0, 0)] / xb[(0, 0)]
        } else {
            let Some(ch) = Cholesky::new(xb.clone()) else {
                return 0.0;
            };
            let l = ch.l();
            let linv = l
                .clone()
                .solve_lower_triangular(&Mat::identity(n, n))
                .unwrap_or_else(|| Mat::identity(n, n));
            let w = sym(&(&linv * dxb * linv.transpose()));
            SymmetricEigen::new(w)
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        };
        if lmin < 0.0 {
            alpha = alpha.min(-gamma / lmin);
        }
    }
    alpha.min(1.0)
}

fn inverse_spd(m: &Mat) -> Option<Mat> {
    if m.nrows() == 1 {
        return (m[(0, 0)] > 0.0).then(|| Mat::from_element(1, 1, 1.0 / m[(0, 0)]));
    }
    Cholesky::new(m.clone()).map(|c| sym(&c.inverse()))
}

impl<'a> Data<'a> {
    fn new(p: &'a SdpProblem) -> Self {
        let mut block_vars = vec![];
        let mut block_coeffs = vec![];
        for b in &p.blocks {
            let mut pairs: Vec<(usize, &Sparse)> = b.terms.iter().map(|(v, s)| (*v, s)).collect();
            pairs.sort_by_key(|(v, _)| *v);
            block_vars.push(pairs.iter().map(|(v, _)| *v).collect());
            block_coeffs.push(pairs.into_iter().map(|(_, s)| s).collect());
        }
        Data {
            p,
            block_vars,
            block_coeffs,
        }
    }

    /// `F0 + Σ y_i F_i` per block.
    fn lmi_value(&self, y: &[f64]) -> Vec<Mat> {
        self.p
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let mut m = dense(&b.constant, b.dim);
                for (v, s) in self.block_vars[k].iter().zip(&self.block_coeffs[k]) {
                    for &(r, c, val) in s.iter() {
                        m[(r, c)] += y[*v] * val;
                    }
                }
                m
            })
            .collect()
    }

    /// `Σ y_i F_i` per block (no constant).
    fn lmi_linear(&self, y: &[f64]) -> Vec<Mat> {
        self.p
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let mut m = Mat::zeros(b.dim, b.dim);
                for (v, s) in self.block_vars[k].iter().zip(&self.block_coeffs[k]) {
                    for &(r, c, val) in s.iter() {
                        m[(r, c)] += y[*v] * val;
                    }
                }
                m
            })
            .collect()
    }

    /// `(⟨F_i, K⟩)_i` summed over blocks.
    fn adjoint_apply(&self, k: &[Mat]) -> Vec<f64> {
        let mut out = vec![0.0; self.p.n_vars];
        for (b, kb) in k.iter().enumerate() {
            for (v, s) in self.block_vars[b].iter().zip(&self.block_coeffs[b]) {
                out[*v] += sparse_inner(s, kb);
            }
        }
        out
    }

    /// Schur complement `M_ij = Σ_blocks Tr(F_i X F_j Z⁻¹)`.
    fn schur(&self, x: &[Mat], zinv: &[Mat]) -> Mat {
        let m = self.p.n_vars;
        let mut out = Mat::zeros(m, m);
        for (b, (xb, gb)) in x.iter().zip(zinv).enumerate() {
            let n = xb.nrows();
            let vars = &self.block_vars[b];
            let coeffs = &self.block_coeffs[b];
            let mut pm = Mat::zeros(n, n);
            for (jpos, (&j, aj)) in vars.iter().zip(coeffs).enumerate() {
                // P = X F_j Z⁻¹
                if aj.len() > 2 * n {
                    pm = xb * dense(aj, n) * gb;
                } else {
                    pm.fill(0.0);
                    for &(r, c, v) in aj.iter() {
                        pm.ger(v, &xb.column(r), &gb.column(c), 1.0);
                    }
                }
                for (&i, ai) in vars[jpos..].iter().zip(&coeffs[jpos..]) {
                    // Tr(F_i P) = Σ F_i[a,b] P[b,a]
                    let val: f64 = ai.iter().map(|&(r, c, v)| v * pm[(c, r)]).sum();
                    out[(i, j)] += val;
                }
            }
        }
        for j in 0..m {
            for i in j + 1..m {
                out[(j, i)] = out[(i, j)];
            }
        }
        out
    }
}

struct Factor {
    chol: Cholesky<f64, nalgebra::Dyn>,
}

fn factor(mut m: Mat) -> Result<Factor> {
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..12 {
        if let Some(chol) = Cholesky::new(m.clone()) {
            return Ok(Factor { chol });
        }
        let next = if reg == 0.0 { 1e-14 * scale } else { reg * 100.0 };
        for i in 0..n {
            m[(i, i)] += next - reg;
        }
        reg = next;
    }
    Err(Error::SolverNonConvergence {
        iterations: 0,
        gap: f64::NAN,
        pinf: f64::NAN,
        dinf: f64::NAN,
    })
}

impl Factor {
    fn solve(&self, r: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(r);
        self.chol.solve(&v).iter().copied().collect()
    }
}

/// Solve `max bᵀy s.t. F0 + Σ y_i F_i ⪰ 0`.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    let data = Data::new(p);
    let m = p.n_vars;
    let b = &p.objective;
    let dims: Vec<usize> = p.blocks.iter().map(|bl| bl.dim).collect();
    let n_tot: usize = dims.iter().sum();
    if n_tot == 0 {
        return Err(Error::InvalidArgument("SDP without constraint blocks".into()));
    }

    // C = F0 (dense), A_i = −F_i
    let c: Vec<Mat> = p.blocks.iter().map(|bl| dense(&bl.constant, bl.dim)).collect();
    let c_norm = c.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut a_norm = vec![0.0f64; m];
    for bl in &p.blocks {
        for (v, s) in &bl.terms {
            a_norm[*v] += s.iter().map(|e| e.2 * e.2).sum::<f64>();
        }
    }
    let a_norm: Vec<f64> = a_norm.into_iter().map(f64::sqrt).collect();
    let sqrt_n = (n_tot as f64).sqrt();
    let xi = (0..m)
        .map(|i| (1.0 + b[i].abs()) / (1.0 + a_norm[i]))
        .fold(sqrt_n.max(10.0), f64::max);
    let eta = a_norm
        .iter()
        .copied()
        .fold((1.0 + c_norm).max(sqrt_n).max(10.0), f64::max);

    let mut x: Vec<Mat> = dims.iter().map(|&n| Mat::identity(n, n) * xi).collect();
    let mut z: Vec<Mat> = dims.iter().map(|&n| Mat::identity(n, n) * eta).collect();
    let mut y = vec![0.0; m];

    let mut best: Option<SdpSolution> = None;
    let mut stall = 0usize;

    for iter in 0..=opts.max_iter {
        // residuals: Rp = b − A(X) = b + F(X); Rd = C − A*(y) − Z = F0 + Σ y F − Z
        let fx = data.adjoint_apply(&x);
        let rp: Vec<f64> = (0..m).map(|i| b[i] + fx[i]).collect();
        let lmi = data.lmi_value(&y);
        let rd: Vec<Mat> = lmi.iter().zip(&z).map(|(l, zb)| l - zb).collect();
        let pobj: f64 = c.iter().zip(&x).map(|(cb, xb)| inner(cb, xb)).sum();
        let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let xz: f64 = x.iter().zip(&z).map(|(xb, zb)| inner(xb, zb)).sum();
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
        let dinf = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + c_norm);
        let gap = (pobj - dobj).abs().max(xz);

        let sol = SdpSolution {
            y: y.clone(),
            objective: dobj,
            primal_objective: pobj,
            gap,
            iterations: iter,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
        };
        if gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
            return Ok(sol);
        }
        let improves = best.as_ref().is_none_or(|bs| {
            sol.gap.max(sol.primal_infeasibility).max(sol.dual_infeasibility)
                < bs.gap.max(bs.primal_infeasibility).max(bs.dual_infeasibility) * 0.999
        });
        if improves {
            stall = 0;
        } else {
            stall += 1;
        }
        if improves || best.is_none() {
            best = Some(sol);
        }
        if iter == opts.max_iter || stall >= 30 {
            break;
        }

        let mu = xz / n_tot as f64;
        let zinv: Vec<Mat> = match z.iter().map(inverse_spd).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => break,
        };
        let schur = data.schur(&x, &zinv);
        let Ok(fac) = factor(schur) else { break };

        // Direction for a given Rc (per block, non-symmetric).
        let direction = |rc: &[Mat]| -> (Vec<Mat>, Vec<f64>, Vec<Mat>) {
            // rhs = Rp − A((Rc − X Rd) Z⁻¹) = Rp + F((Rc − X Rd) Z⁻¹)
            let k: Vec<Mat> = (0..dims.len())
                .map(|bi| (&rc[bi] - &x[bi] * &rd[bi]) * &zinv[bi])
                .collect();
            let fk = data.adjoint_apply(&k);
            let rhs: Vec<f64> = (0..m).map(|i| rp[i] + fk[i]).collect();
            let dy = fac.solve(&rhs);
            // ΔZ = Rd − A*(Δy) = Rd + Σ Δy_i F_i
            let fdy = data.lmi_linear(&dy);
            let dz: Vec<Mat> = rd.iter().zip(&fdy).map(|(r, f)| r + f).collect();
            let dx: Vec<Mat> = (0..dims.len())
                .map(|bi| sym(&((&rc[bi] - &x[bi] * &dz[bi]) * &zinv[bi])))
                .collect();
            (dx, dy, dz)
        };

        // predictor
        let rc_aff: Vec<Mat> = x.iter().zip(&z).map(|(xb, zb)| -(xb * zb)).collect();
        let (dx_a, _dy_a, dz_a) = direction(&rc_aff);
        let ap = step_length(&x, &dx_a, 1.0);
        let ad = step_length(&z, &dz_a, 1.0);
        let mu_aff: f64 = x
            .iter()
            .zip(&dx_a)
            .zip(z.iter().zip(&dz_a))
            .map(|((xb, dxb), (zb, dzb))| inner(&(xb + dxb * ap), &(zb + dzb * ad)))
            .sum::<f64>()
            / n_tot as f64;
        let sigma = if mu > 0.0 {
            (mu_aff.max(0.0) / mu).powi(3).clamp(0.0, 1.0)
        } else {
            0.0
        };

        // corrector
        let rc: Vec<Mat> = (0..dims.len())
            .map(|bi| {
                let n = dims[bi];
                Mat::identity(n, n) * (sigma * mu) - &x[bi] * &z[bi] - &dx_a[bi] * &dz_a[bi]
            })
            .collect();
        let (dx, dy, dz) = direction(&rc);
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = step_length(&x, &dx, gamma);
        let ad = step_length(&z, &dz, gamma);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        for bi in 0..dims.len() {
            x[bi] += &dx[bi] * ap;
            z[bi] += &dz[bi] * ad;
            x[bi] = sym(&x[bi]);
            z[bi] = sym(&z[bi]);
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }

    let best = best.expect("at least one iterate");
    if best.gap <= opts.accept_gap
        && best.primal_infeasibility <= opts.accept_gap
        && best.dual_infeasibility <= opts.accept_gap
    {
        Ok(best)
    } else {
        Err(Error::SolverNonConvergence {
            iterations: best.iterations,
            gap: best.gap,
            pinf: best.primal_infeasibility,
            dinf: best.dual_infeasibility,
        })
    }
}
