//! Semidefinite programs over Hermitian matrix variables.
//!
//! Problems are stated in LMI form, `maximize bᵀy` subject to
//! `F0 + Σ y_i F_i ⪰ 0` on a list of blocks, and solved by a small
//! primal-dual interior-point method.

mod problem;
mod solver;

pub use problem::{HermitianVar, LmiId, RealBlock, ScalarVar, SdpBuilder, SdpProblem};
pub use solver::{solve, SdpSolution, SolverOptions};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, c, cr, CMat};

    #[test]
    fn largest_eigenvalue_of_hermitian_matrix() {
        let a = CMat::from_row_slice(2, 2, &[cr(1.0), c(0.5, 0.5), c(0.5, -0.5), cr(-0.3)]);
        let mut sb = SdpBuilder::new();
        let t = sb.scalar();
        sb.maximize_scalar(t, -1.0);
        let l = sb.lmi(2);
        sb.add_scalar(l, t, &CMat::identity(2, 2));
        sb.add_constant(l, &(-a.clone()));
        let sol = solve(&sb.build(), &SolverOptions::default()).unwrap();
        let lmax = linalg::eigh(&a).max();
        assert!((-sol.objective - lmax).abs() < 1e-7, "{} vs {lmax}", -sol.objective);
    }

    #[test]
    fn trace_of_square_root_via_block_lmi() {
        // max Tr Y s.t. [[1, Y], [Y, K]] ⪰ 0 equals Tr √K
        let k = CMat::from_row_slice(2, 2, &[cr(0.6), c(0.1, 0.2), c(0.1, -0.2), cr(0.4)]);
        let mut sb = SdpBuilder::new();
        let y = sb.hermitian(2);
        sb.maximize_trace(y, 1.0);
        let l = sb.lmi(4);
        let mut cst = CMat::zeros(4, 4);
        cst.view_mut((0, 0), (2, 2)).copy_from(&CMat::identity(2, 2));
        cst.view_mut((2, 2), (2, 2)).copy_from(&k);
        sb.add_constant(l, &cst);
        sb.add_map(l, y, |e| {
            let mut m = CMat::zeros(4, 4);
            m.view_mut((0, 2), (2, 2)).copy_from(e);
            m.view_mut((2, 0), (2, 2)).copy_from(e);
            m
        });
        let prob = sb.build();
        assert_eq!(prob.block_dims(), vec![8]);
        let sol = solve(&prob, &SolverOptions::default()).unwrap();
        let want: f64 = linalg::eigvals(&k).iter().map(|v| v.sqrt()).sum();
        assert!((sol.objective - want).abs() < 1e-7);
        assert!(linalg::max_abs_diff(&y.value(&sol.y), &linalg::psd_sqrt(&k)) < 1e-4);
    }

    #[test]
    fn real_blocks_stay_real() {
        let mut sb = SdpBuilder::new();
        let s = sb.hermitian(2);
        sb.maximize_trace(s, -1.0);
        let l = sb.lmi(2);
        sb.add_map(l, s, |e| e.clone());
        sb.add_constant(l, &(CMat::identity(2, 2) * cr(-0.5)));
        // the variable has complex basis elements, so this block is embedded
        assert_eq!(sb.build().block_dims(), vec![4]);
    }
}
