//! Chain rules with a classical register.

use crate::error::{Error, Result};
use crate::quantum::DensityOperator;

use super::{hmax_cond, hmin_smooth};

/// Both sides of a chain-rule inequality `lhs ≥ rhs` (for the max-entropy
/// rule) or `lhs ≤ rhs` (for the min-entropy rule).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// True when `lhs ≥ rhs`; false when `lhs ≤ rhs` is the claim.
    pub lhs_is_larger: bool,
}

impl ChainCheck {
    pub fn holds(&self, tol: f64) -> bool {
        if self.lhs_is_larger {
            self.lhs >= self.rhs - tol
        } else {
            self.lhs <= self.rhs + tol
        }
    }

    /// Amount by which the inequality is violated (≤ 0 when it holds).
    pub fn violation(&self) -> f64 {
        if self.lhs_is_larger {
            self.rhs - self.lhs
        } else {
            self.lhs - self.rhs
        }
    }
}

fn restrict(rho: &DensityOperator, groups: &[&[&str]]) -> Result<DensityOperator> {
    let keep: Vec<&str> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let mut seen = std::collections::HashSet::new();
    for l in &keep {
        if !seen.insert(*l) {
            return Err(Error::InvalidArgument(format!("label `{l}` used twice")));
        }
    }
    rho.partial_trace(&keep)
}

fn require_classical(rho: &DensityOperator, label: &str) -> Result<()> {
    if rho.is_classical_on(label)? {
        Ok(())
    } else {
        Err(Error::NotClassical(label.to_string()))
    }
}

/// `Hmax(A|BC) ≥ Hmax(A|B) − log|C|` for classical `C`. Systems outside
/// `A`, `B`, `C` are traced out.
pub fn chain_max(rho: &DensityOperator, a: &[&str], b: &[&str], c: &str) -> Result<ChainCheck> {
    let abc = restrict(rho, &[a, b, &[c]])?;
    require_classical(&abc, c)?;
    let mut bc: Vec<&str> = b.to_vec();
    bc.push(c);
    let lhs = hmax_cond(&abc, &bc)?.value;
    let ab = abc.trace_out(&[c])?;
    let dc = abc.layout().factor_dim(c)? as f64;
    let rhs = hmax_cond(&ab, b)?.value - dc.log2();
    Ok(ChainCheck {
        lhs,
        rhs,
        lhs_is_larger: true,
    })
}

/// `Hmin^ε(AB|C) ≤ Hmin^ε(A|BC) + log|B|` for classical `B`. Systems outside
/// `A`, `B`, `C` are traced out.
pub fn chain_min(
    rho: &DensityOperator,
    a: &[&str],
    b: &str,
    c: &[&str],
    eps: f64,
) -> Result<ChainCheck> {
    let abc = restrict(rho, &[a, &[b], c])?;
    require_classical(&abc, b)?;
    let lhs = hmin_smooth(&abc, c, eps)?.value;
    let mut bc: Vec<&str> = vec![b];
    bc.extend_from_slice(c);
    let db = abc.layout().factor_dim(b)? as f64;
    let rhs = hmin_smooth(&abc, &bc, eps)?.value + db.log2();
    Ok(ChainCheck {
        lhs,
        rhs,
        lhs_is_larger: false,
    })
}
