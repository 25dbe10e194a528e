use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

use super::layout::SystemLayout;
use super::state::{check_density, DensityOperator};

/// Classical-quantum state `Σ_x p_x |x⟩⟨x| ⊗ φ_x`.
///
/// Symbols with zero probability are dropped at construction; `symbols()`
/// keeps the original labels of the stored ones.
#[derive(Clone, Debug)]
pub struct CqState {
    x_label: String,
    alphabet_size: usize,
    symbols: Vec<usize>,
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
    side: SystemLayout,
}

const PROB_TOL: f64 = 1e-10;

impl CqState {
    /// `probs` has one entry per alphabet symbol; `states[x]` is the
    /// conditional state for symbol `x` (ignored when `probs[x] == 0`).
    pub fn new(probs: &[f64], states: Vec<CMat>, side: SystemLayout) -> Result<Self> {
        Self::with_label("X", probs, states, side)
    }

    pub fn with_label(
        x_label: &str,
        probs: &[f64],
        states: Vec<CMat>,
        side: SystemLayout,
    ) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invariant("alphabet_size >= 1", "empty alphabet"));
        }
        if probs.len() != states.len() {
            return Err(Error::invariant(
                "one conditional state per symbol",
                format!("{} probabilities, {} states", probs.len(), states.len()),
            ));
        }
        if side.contains(x_label) {
            return Err(Error::Layout(format!("label `{x_label}` used twice")));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::invariant("probabilities nonnegative", format!("p = {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invariant(
                "probabilities sum to 1 within 1e-10",
                format!("sum {total:.12}"),
            ));
        }
        let mut out = CqState {
            x_label: x_label.to_string(),
            alphabet_size: probs.len(),
            symbols: vec![],
            probs: vec![],
            states: vec![],
            side,
        };
        for (x, (p, m)) in probs.iter().zip(states).enumerate() {
            if *p == 0.0 {
                continue;
            }
            check_density(&m, &out.side)?;
            let tr = linalg::real_trace(&m);
            if (tr - 1.0).abs() > PROB_TOL {
                return Err(Error::invariant(
                    "conditional states have trace 1",
                    format!("symbol {x}: trace {tr:.12}"),
                ));
            }
            out.symbols.push(x);
            out.probs.push(*p);
            out.states.push(DensityOperator::from_parts(m, out.side.clone()));
        }
        Ok(out)
    }

    /// Build from weighted blocks `p_x φ_x`; `p_x` is read off as the trace.
    pub fn from_weighted(blocks: Vec<CMat>, side: SystemLayout) -> Result<Self> {
        let s = Self::from_weighted_subnormalized("X", blocks, side)?;
        let total = s.total_weight();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invariant(
                "probabilities sum to 1 within 1e-10",
                format!("sum {total:.12}"),
            ));
        }
        Ok(s)
    }

    /// Weighted blocks with total weight at most 1 (smoothing candidates).
    pub(crate) fn from_weighted_subnormalized(
        x_label: &str,
        blocks: Vec<CMat>,
        side: SystemLayout,
    ) -> Result<Self> {
        let mut out = CqState {
            x_label: x_label.to_string(),
            alphabet_size: blocks.len(),
            symbols: vec![],
            probs: vec![],
            states: vec![],
            side,
        };
        for (x, b) in blocks.into_iter().enumerate() {
            let p = linalg::real_trace(&b);
            if p <= linalg::ZERO_TOL {
                continue;
            }
            let phi = linalg::apply_fn(&(b * linalg::cr(1.0 / p)), |v| v.max(0.0));
            let phi = &phi * linalg::cr(1.0 / linalg::real_trace(&phi));
            check_density(&phi, &out.side)?;
            out.symbols.push(x);
            out.probs.push(p);
            out.states.push(DensityOperator::from_parts(phi, out.side.clone()));
        }
        if out.symbols.is_empty() {
            return Err(Error::invariant("nonzero total weight", "all blocks vanish"));
        }
        if out.total_weight() > 1.0 + 1e-9 {
            return Err(Error::invariant(
                "total weight <= 1",
                format!("{:.12}", out.total_weight()),
            ));
        }
        Ok(out)
    }

    /// Read a cq state off a density operator that is block diagonal in the
    /// basis of its first factor.
    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        let layout = rho.layout();
        let (x_label, nx) = layout
            .factors()
            .first()
            .cloned()
            .ok_or_else(|| Error::Layout("empty layout".into()))?;
        if !rho.is_classical_on(&x_label)? {
            return Err(Error::NotClassical(x_label));
        }
        let side = layout.complement(&[&x_label])?;
        let d = side.dim();
        let blocks = (0..nx)
            .map(|x| rho.matrix().view((x * d, x * d), (d, d)).into_owned())
            .collect();
        let s = Self::from_weighted_subnormalized(&x_label, blocks, side)?;
        if rho.is_normalized() {
            Ok(Self::renormalized(s))
        } else {
            Ok(s)
        }
    }

    fn renormalized(mut s: CqState) -> CqState {
        let total = s.total_weight();
        for p in &mut s.probs {
            *p /= total;
        }
        s
    }

    pub fn x_label(&self) -> &str {
        &self.x_label
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Original labels of the stored (positive-probability) symbols.
    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn side_layout(&self) -> &SystemLayout {
        &self.side
    }

    pub fn side_dim(&self) -> usize {
        self.side.dim()
    }

    pub fn total_weight(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Full layout `(X, side...)`.
    pub fn layout(&self) -> SystemLayout {
        SystemLayout::single(&self.x_label, self.alphabet_size)
            .and_then(|x| x.concat(&self.side))
            .expect("labels checked at construction")
    }

    /// Probability of an original symbol label (0 for dropped symbols).
    pub fn prob_of(&self, symbol: usize) -> f64 {
        self.symbols
            .iter()
            .position(|&s| s == symbol)
            .map_or(0.0, |i| self.probs[i])
    }

    /// `p_x φ_x` for the `i`-th stored symbol.
    pub fn weighted_block(&self, i: usize) -> CMat {
        self.states[i].matrix() * linalg::cr(self.probs[i])
    }

    pub fn weighted_blocks(&self) -> Vec<CMat> {
        (0..self.len()).map(|i| self.weighted_block(i)).collect()
    }

    /// `φ = Σ_x p_x φ_x` on the side system.
    pub fn side_marginal(&self) -> DensityOperator {
        let d = self.side_dim();
        let m = (0..self.len()).fold(CMat::zeros(d, d), |acc, i| acc + self.weighted_block(i));
        DensityOperator::from_parts(m, self.side.clone())
    }

    /// Weighted blocks indexed by the full alphabet (zeros for dropped symbols).
    pub fn full_blocks(&self) -> Vec<CMat> {
        let d = self.side_dim();
        let mut out = vec![CMat::zeros(d, d); self.alphabet_size];
        for (i, &x) in self.symbols.iter().enumerate() {
            out[x] = self.weighted_block(i);
        }
        out
    }

    pub fn embed(&self) -> DensityOperator {
        DensityOperator::from_parts(linalg::block_diag(&self.full_blocks()), self.layout())
    }

    /// Partial trace on the side system, keeping `keep`.
    pub fn reduce_side(&self, keep: &[&str]) -> Result<CqState> {
        let side = self.side.subset(keep)?;
        let states = self
            .states
            .iter()
            .map(|s| s.partial_trace(keep))
            .collect::<Result<Vec<_>>>()?;
        Ok(CqState {
            x_label: self.x_label.clone(),
            alphabet_size: self.alphabet_size,
            symbols: self.symbols.clone(),
            probs: self.probs.clone(),
            states,
            side,
        })
    }
}

/// `Σ_x p_x |x⟩⟨x| ⊗ φ_x` with layout `(X, side...)`.
pub fn cq_embed(cq: &CqState) -> DensityOperator {
    cq.embed()
}
