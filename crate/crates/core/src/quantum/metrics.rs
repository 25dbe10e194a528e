use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

use super::state::DensityOperator;

fn same_dims(a: &CMat, b: &CMat) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// `‖√ρ √σ‖₁` for raw PSD matrices.
pub(crate) fn fidelity_mat(rho: &CMat, sigma: &CMat) -> f64 {
    linalg::trace_norm(&(linalg::psd_sqrt(rho) * linalg::psd_sqrt(sigma)))
}

/// `F + √((1 − Tr ρ)(1 − Tr σ))`, clamped to `[0, 1]`.
pub(crate) fn generalized_fidelity_mat(rho: &CMat, sigma: &CMat) -> f64 {
    let tr = (1.0 - linalg::real_trace(rho)).max(0.0);
    let ts = (1.0 - linalg::real_trace(sigma)).max(0.0);
    (fidelity_mat(rho, sigma) + (tr * ts).sqrt()).clamp(0.0, 1.0)
}

pub(crate) fn purified_distance_mat(rho: &CMat, sigma: &CMat) -> f64 {
    let f = generalized_fidelity_mat(rho, sigma);
    (1.0 - f * f).max(0.0).sqrt()
}

pub(crate) fn trace_distance_mat(rho: &CMat, sigma: &CMat) -> f64 {
    0.5 * linalg::trace_norm_hermitian(&(rho - sigma))
}

/// Fidelity `‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dims(rho.matrix(), sigma.matrix())?;
    Ok(fidelity_mat(rho.matrix(), sigma.matrix()).min(1.0))
}

/// Generalized fidelity; coincides with [`fidelity`] when either argument is
/// normalized.
pub fn generalized_fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dims(rho.matrix(), sigma.matrix())?;
    Ok(generalized_fidelity_mat(rho.matrix(), sigma.matrix()))
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dims(rho.matrix(), sigma.matrix())?;
    Ok(trace_distance_mat(rho.matrix(), sigma.matrix()).min(1.0))
}

/// `√(1 − F̄²)` with the generalized fidelity `F̄`.
pub fn purified_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dims(rho.matrix(), sigma.matrix())?;
    Ok(purified_distance_mat(rho.matrix(), sigma.matrix()))
}

/// `√(1 − F²)` with the plain fidelity (differs from [`purified_distance`]
/// only for subnormalized pairs).
pub fn purified_distance_plain(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// Projector onto the span of eigenvectors with eigenvalue `> 1e-10`.
pub fn positive_part_projector(a: &CMat) -> Result<CMat> {
    let defect = linalg::hermitian_defect(a);
    if defect > 1e-10 {
        return Err(Error::invariant("Hermitian input", format!("defect {defect:.3e}")));
    }
    Ok(linalg::positive_projector(a))
}

/// Inverse square root on the support of a PSD matrix, zero on its kernel.
pub fn invsqrt_on_support(a: &CMat) -> Result<CMat> {
    let defect = linalg::hermitian_defect(a);
    if defect > 1e-10 {
        return Err(Error::invariant("Hermitian input", format!("defect {defect:.3e}")));
    }
    let min = linalg::min_eigenvalue(a);
    if min < -linalg::ZERO_TOL {
        return Err(Error::invariant(
            "eigenvalues >= -1e-10",
            format!("min eigenvalue {min:.3e}"),
        ));
    }
    Ok(linalg::invsqrt_support(a))
}
