use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMat};
use crate::quantum::{trace_distance, DensityOperator};

/// Classical keys `(k_A, k_B)` and a classical transcript index `t`, each
/// carrying an adversary operator: `ρ = Σ |k_A k_B t⟩⟨k_A k_B t| ⊗ ρ_{k_A k_B t}`.
#[derive(Clone, Debug)]
pub struct KeyState {
    keys: usize,
    transcripts: usize,
    de: usize,
    blocks: BTreeMap<(usize, usize, usize), CMat>,
}

impl KeyState {
    pub fn new(keys: usize, transcripts: usize, de: usize) -> Self {
        KeyState {
            keys,
            transcripts,
            de,
            blocks: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, ka: usize, kb: usize, t: usize, op: &CMat) {
        *self
            .blocks
            .entry((ka, kb, t))
            .or_insert_with(|| CMat::zeros(self.de, self.de)) += op;
    }

    pub fn trace(&self) -> f64 {
        self.blocks.values().map(linalg::real_trace).sum()
    }

    /// `D(ρ, κ^{K_A K_B} ⊗ ρ^{TE})`, computed block by block.
    pub fn quality(&self) -> f64 {
        let l = self.keys as f64;
        let mut total = 0.0;
        for t in 0..self.transcripts {
            let marginal = self
                .blocks
                .iter()
                .filter(|((_, _, tt), _)| *tt == t)
                .fold(CMat::zeros(self.de, self.de), |acc, (_, b)| acc + b);
            let share = &marginal * cr(1.0 / l);
            for k in 0..self.keys {
                let diag = self
                    .blocks
                    .get(&(k, k, t))
                    .cloned()
                    .unwrap_or_else(|| CMat::zeros(self.de, self.de));
                total += linalg::trace_norm_hermitian(&(diag - &share));
            }
            for ((ka, kb, tt), b) in &self.blocks {
                if *tt == t && ka != kb {
                    total += linalg::trace_norm_hermitian(b);
                }
            }
        }
        0.5 * total
    }

    /// Full operator on `(K_A, K_B, T, E)`.
    pub fn to_density(&self) -> Result<DensityOperator> {
        let layout = crate::quantum::SystemLayout::new([
            ("KA", self.keys),
            ("KB", self.keys),
            ("T", self.transcripts),
            ("E", self.de),
        ])?;
        let n = layout.dim();
        let mut m = CMat::zeros(n, n);
        for ((ka, kb, t), b) in &self.blocks {
            let off = ((ka * self.keys + kb) * self.transcripts + t) * self.de;
            m.view_mut((off, off), (self.de, self.de)).copy_from(b);
        }
        Ok(DensityOperator::from_numerical(&m, layout))
    }
}

/// `D(ρ^{K_A K_B R}, κ^{K_A K_B} ⊗ ρ^R)` for classical key registers of
/// equal size, `R` being every other factor.
pub fn key_quality(rho: &DensityOperator, ka: &str, kb: &str) -> Result<f64> {
    let layout = rho.layout();
    let da = layout.factor_dim(ka)?;
    let db = layout.factor_dim(kb)?;
    if da != db {
        return Err(Error::DimensionMismatch(format!(
            "key registers have sizes {da} and {db}"
        )));
    }
    for k in [ka, kb] {
        if !rho.is_classical_on(k)? {
            return Err(Error::NotClassical(k.to_string()));
        }
    }
    let rest = rho.trace_out(&[ka, kb])?;
    let mut kappa = CMat::zeros(da * da, da * da);
    for k in 0..da {
        kappa[(k * da + k, k * da + k)] = cr(1.0 / da as f64);
    }
    let key_layout = layout.subset(&[ka, kb])?;
    let ordered_key = if key_layout.labels() == [ka, kb] {
        key_layout
    } else {
        crate::quantum::SystemLayout::new([(ka, da), (kb, db)])?
    };
    let ideal = DensityOperator::from_numerical(&kappa, ordered_key).tensor(&rest)?;
    let mut order = vec![ka, kb];
    order.extend(rest.layout().labels());
    let actual = rho.reorder(&order)?;
    trace_distance(&actual, &ideal)
}
