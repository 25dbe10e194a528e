use serde::Serialize;

use crate::error::{Error, Result};
use crate::hashing::HashFunction;
use crate::linalg::{self, cr, CMat};
use crate::quantum::CqState;

use super::build_pgm_decoder;

/// Upper bound on the family-averaged PGM error,
/// `2 Tr[(1 − P) ψ] + 4 · 2^{−m} Tr[P (1 ⊗ φ)]` and its two terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PgmErrorBound {
    /// Weight missed by the test operators.
    pub first: f64,
    /// Collisions with other symbols sharing a syndrome.
    pub second: f64,
    pub total: f64,
}

pub fn pgm_error_bound(psi: &CqState, test_operators: &[CMat], m: u32) -> PgmErrorBound {
    pgm_error_bound_blocks(&psi.full_blocks(), test_operators, m)
}

/// Same for weighted blocks `p_x φ_x` indexed by symbol value.
pub fn pgm_error_bound_blocks(blocks: &[CMat], test_operators: &[CMat], m: u32) -> PgmErrorBound {
    let d = blocks.first().map_or(1, |b| b.nrows());
    let phi = blocks.iter().fold(CMat::zeros(d, d), |acc, b| acc + b);
    let mut miss = 0.0;
    let mut overlap = 0.0;
    for (b, p) in blocks.iter().zip(test_operators) {
        miss += linalg::real_trace(b) - linalg::re_inner(p, b);
        overlap += linalg::re_inner(p, &phi);
    }
    let first = 2.0 * miss;
    let second = 4.0 * 2f64.powi(-(m as i32)) * overlap;
    PgmErrorBound {
        first,
        second,
        total: first + second,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AudenaertCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl AudenaertCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

fn require_psd(a: &CMat, name: &str) -> Result<()> {
    let min = linalg::min_eigenvalue(a);
    if min < -1e-9 || linalg::hermitian_defect(a) > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be PSD, smallest eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// `Tr[ρ {ρ − σ}_− + σ {ρ − σ}_+]` against `Tr[ρ^s σ^{1−s}]`, where
/// `{A}_+` projects onto the strictly positive part of `A`,
/// `{A}_− = 1 − {A}_+` and `A^0` is the support projector.
pub fn audenaert_check(rho: &CMat, sigma: &CMat, s: f64) -> Result<AudenaertCheck> {
    if rho.shape() != sigma.shape() || !rho.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s must lie in [0, 1], got {s}")));
    }
    require_psd(rho, "rho")?;
    require_psd(sigma, "sigma")?;
    let d = rho.nrows();
    let plus = linalg::positive_projector(&(rho - sigma));
    let minus = CMat::identity(d, d) - &plus;
    let lhs = linalg::re_inner(&minus, rho) + linalg::re_inner(&plus, sigma);
    let rhs = (linalg::psd_pow(rho, s) * linalg::psd_pow(sigma, 1.0 - s))
        .trace()
        .re;
    Ok(AudenaertCheck { lhs, rhs })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnravelingCheck {
    /// Smallest eigenvalue of `rhs − lhs`.
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// `1 − Λ_{x;c} ⪯ 2(1 − Π_x) + 4 Σ_{x' ≠ x, f(x') = c} Π_{x'}`.
pub fn unraveling_check(
    test_operators: &[CMat],
    hash: &HashFunction,
    c: u64,
    x: usize,
) -> Result<UnravelingCheck> {
    if x >= test_operators.len() {
        return Err(Error::InvalidArgument(format!("symbol {x} outside the alphabet")));
    }
    let fx = hash.eval(x as u64)?;
    if fx != c {
        return Err(Error::InvalidArgument(format!("f({x}) = {fx}, not {c}")));
    }
    let code = build_pgm_decoder(test_operators, hash)?;
    let d = code.side_dim();
    let eye = CMat::identity(d, d);
    let lhs = &eye - code.povm_element(x, c);
    let mut rhs = (&eye - &test_operators[x]) * cr(2.0);
    for &y in code.class(c) {
        if y != x {
            rhs += &test_operators[y] * cr(4.0);
        }
    }
    let min_eigenvalue = linalg::min_eigenvalue(&linalg::hermitize(&(rhs - lhs)));
    Ok(UnravelingCheck {
        min_eigenvalue,
        pass: min_eigenvalue >= -1e-9,
    })
}
