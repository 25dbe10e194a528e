//! Hash-and-decode compression of a classical source `X` for a receiver
//! holding quantum side information `B`.
//!
//! The encoder sends `c = f(X)` for a linear hash `f`. The decoder measures
//! `B` with the pretty-good measurement built from per-symbol test
//! operators `Π_x = {p_x φ_x − 2^{−(m−1)} φ}_+` restricted to the symbols in
//! the syndrome class of `c`. Whatever mass the PGM elements leave is an
//! explicit abort outcome and counts as an error.

mod bounds;
mod family;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::entropy;
use crate::error::{Error, Result};
use crate::hashing::{HashFamily, HashFunction, HashKind};
use crate::linalg::{self, cr, CMat};
use crate::quantum::CqState;

pub use bounds::{
    audenaert_check, pgm_error_bound, pgm_error_bound_blocks, unraveling_check, AudenaertCheck,
    PgmErrorBound, UnravelingCheck,
};
pub use crate::hashing::{AveragingMode, FamilyAverage};
pub use family::average_error_over_family;

/// Tolerance for POVM completeness.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// `Π_x` for every alphabet symbol of `ψ`, indexed by symbol value.
pub fn build_test_operator(psi: &CqState, m: u32) -> Vec<CMat> {
    test_operators_from_blocks(&psi.full_blocks(), m)
}

/// `Π_x = {B_x − 2^{−(m−1)} Σ_y B_y}_+` for weighted blocks `B_x = p_x φ_x`
/// (possibly subnormalized).
pub fn test_operators_from_blocks(blocks: &[CMat], m: u32) -> Vec<CMat> {
    let d = blocks.first().map_or(1, |b| b.nrows());
    let phi = blocks.iter().fold(CMat::zeros(d, d), |acc, b| acc + b);
    let threshold = 2f64.powi(1 - m as i32);
    blocks
        .iter()
        .map(|b| linalg::positive_projector(&(b - &phi * cr(threshold))))
        .collect()
}

/// A hash function together with the PGM decoder built for it.
#[derive(Clone, Debug)]
pub struct CompressionCode {
    hash: HashFunction,
    test_operators: Vec<CMat>,
    /// `Λ_{x; f(x)}` by symbol value.
    povm: Vec<CMat>,
    /// Symbols of each nonempty syndrome class.
    classes: BTreeMap<u64, Vec<usize>>,
    /// `1 − Σ_{x ∈ class} Λ_x` per nonempty class.
    abort: BTreeMap<u64, CMat>,
}

/// PGM decoder `Λ_{x;c} = S_c^{−1/2} Π_x S_c^{−1/2}` with
/// `S_c = Σ_{f(x') = c} Π_{x'}`.
pub fn build_pgm_decoder(test_operators: &[CMat], hash: &HashFunction) -> Result<CompressionCode> {
    let d = test_operators
        .first()
        .map(|p| p.nrows())
        .ok_or_else(|| Error::InvalidArgument("empty test-operator family".into()))?;
    let n_in = 1u128 << hash.input_bits();
    if test_operators.len() as u128 > n_in {
        return Err(Error::DimensionMismatch(format!(
            "{} symbols do not fit in {} input bits",
            test_operators.len(),
            hash.input_bits()
        )));
    }
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for x in 0..test_operators.len() {
        classes.entry(hash.eval(x as u64)?).or_default().push(x);
    }
    let mut povm = vec![CMat::zeros(d, d); test_operators.len()];
    let mut abort = BTreeMap::new();
    for (&c, members) in &classes {
        let s = members
            .iter()
            .fold(CMat::zeros(d, d), |acc, &x| acc + &test_operators[x]);
        let inv = linalg::invsqrt_support(&s);
        let mut total = CMat::zeros(d, d);
        for &x in members {
            let l = linalg::hermitize(&(&inv * &test_operators[x] * &inv));
            total += &l;
            povm[x] = l;
        }
        abort.insert(c, linalg::hermitize(&(CMat::identity(d, d) - total)));
    }
    Ok(CompressionCode {
        hash: hash.clone(),
        test_operators: test_operators.to_vec(),
        povm,
        classes,
        abort,
    })
}

impl CompressionCode {
    pub fn hash(&self) -> &HashFunction {
        &self.hash
    }

    /// Output bits `m = log |C|`.
    pub fn m(&self) -> u32 {
        self.hash.output_bits()
    }

    pub fn test_operators(&self) -> &[CMat] {
        &self.test_operators
    }

    pub fn side_dim(&self) -> usize {
        self.test_operators[0].nrows()
    }

    pub fn alphabet_size(&self) -> usize {
        self.test_operators.len()
    }

    pub fn syndrome(&self, x: usize) -> u64 {
        self.hash.eval_unchecked(x as u64)
    }

    /// `Λ_{x;c}`; zero whenever `f(x) ≠ c`.
    pub fn povm_element(&self, x: usize, c: u64) -> CMat {
        if self.syndrome(x) == c {
            self.povm[x].clone()
        } else {
            CMat::zeros(self.side_dim(), self.side_dim())
        }
    }

    /// Symbols hashing to `c`.
    pub fn class(&self, c: u64) -> &[usize] {
        self.classes.get(&c).map_or(&[], |v| v.as_slice())
    }

    /// Abort element for syndrome `c`; the identity for an empty class.
    pub fn abort_element(&self, c: u64) -> CMat {
        self.abort
            .get(&c)
            .cloned()
            .unwrap_or_else(|| CMat::identity(self.side_dim(), self.side_dim()))
    }

    /// Largest `‖Σ_x Λ_{x;c} + abort − 1‖` and most negative abort
    /// eigenvalue over nonempty classes.
    pub fn completeness_defect(&self) -> (f64, f64) {
        let d = self.side_dim();
        let mut defect: f64 = 0.0;
        let mut min_abort = f64::INFINITY;
        for (&c, members) in &self.classes {
            let ab = &self.abort[&c];
            let sum = members.iter().fold(ab.clone(), |acc, &x| acc + &self.povm[x]);
            defect = defect.max(linalg::max_abs_diff(&sum, &CMat::identity(d, d)));
            min_abort = min_abort.min(linalg::min_eigenvalue(ab));
        }
        (defect, min_abort)
    }

    fn check_state(&self, psi: &CqState) -> Result<()> {
        if psi.alphabet_size() > self.alphabet_size() || psi.side_dim() != self.side_dim() {
            return Err(Error::DimensionMismatch(format!(
                "code for |X| = {}, dim B = {} applied to |X| = {}, dim B = {}",
                self.alphabet_size(),
                self.side_dim(),
                psi.alphabet_size(),
                psi.side_dim()
            )));
        }
        Ok(())
    }

    /// `p_err = 1 − Σ_x p_x Tr[Λ_{x;f(x)} φ_x]`, abort counted as error.
    pub fn error_probability(&self, psi: &CqState) -> Result<f64> {
        self.check_state(psi)?;
        let success: f64 = psi
            .symbols()
            .iter()
            .enumerate()
            .map(|(i, &x)| linalg::re_inner(&self.povm[x], &psi.weighted_block(i)))
            .sum();
        Ok((psi.total_weight() - success).clamp(0.0, 1.0))
    }

    /// Joint distribution of `(x, x̂)` with `x̂ = None` for abort.
    pub fn joint_distribution(&self, psi: &CqState) -> Result<Vec<(usize, Option<usize>, f64)>> {
        self.check_state(psi)?;
        let mut out = vec![];
        for (i, &x) in psi.symbols().iter().enumerate() {
            let block = psi.weighted_block(i);
            let c = self.syndrome(x);
            for &y in self.class(c) {
                out.push((x, Some(y), linalg::re_inner(&self.povm[y], &block)));
            }
            out.push((x, None, linalg::re_inner(&self.abort_element(c), &block)));
        }
        Ok(out)
    }

    /// `½ Σ_{x, x̂} |p_x δ_{x, x̂} − p_{x, x̂}|`, the variational distance
    /// between the decoded and the ideal joint distributions.
    pub fn variational_error(&self, psi: &CqState) -> Result<f64> {
        let joint = self.joint_distribution(psi)?;
        let mut total = 0.0;
        for (x, y, p) in joint {
            let ideal = if y == Some(x) { psi.prob_of(x) } else { 0.0 };
            total += (ideal - p).abs();
        }
        Ok(0.5 * total)
    }
}

/// Rate choice for the direct part together with the smoothing witness it
/// was computed from.
#[derive(Clone, Debug)]
pub struct DirectRate {
    pub m: u32,
    /// `Hmax^{ε1}(X|B)`.
    pub hmax: f64,
    /// Weighted cq blocks of the smoothing witness (the state itself when
    /// `ε1 = 0`), indexed by symbol value.
    pub witness_blocks: Vec<CMat>,
}

/// `m = ⌈Hmax^{ε1}(X|B) + 2 log(1/ε2)⌉ + 3`, clamped at 0.
pub fn direct_rate(psi: &CqState, eps1: f64, eps2: f64) -> Result<DirectRate> {
    if !(eps2 > 0.0 && eps2 <= 1.0) {
        return Err(Error::InvalidArgument(format!("eps2 must lie in (0, 1], got {eps2}")));
    }
    let r = entropy::hmax_smooth_cq(psi, eps1)?;
    let m = (linalg::ceil_tol(r.value + 2.0 * (1.0 / eps2).log2()) + 3.0).max(0.0) as u32;
    let witness_blocks = match &r.witness_rho_bar {
        Some(bar) => {
            let d = psi.side_dim();
            (0..psi.alphabet_size())
                .map(|x| bar.matrix().view((x * d, x * d), (d, d)).into_owned())
                .collect()
        }
        None => psi.full_blocks(),
    };
    Ok(DirectRate {
        m,
        hmax: r.value,
        witness_blocks,
    })
}

/// `Hmax^{√(2ε)}(X|B)`, a lower bound on `log |C|` for any code with error
/// at most `ε`.
pub fn converse_bound(psi: &CqState, eps: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "converse bound needs 0 <= eps < 1/2, got {eps}"
        )));
    }
    Ok(entropy::hmax_smooth_cq(psi, (2.0 * eps).sqrt())?.value)
}

/// Outcome of running the compression protocol on one source.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolResult {
    pub m: u32,
    pub direct_m: u32,
    pub hmax_smooth: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub family: String,
    pub mode: String,
    /// Family-averaged error probability.
    pub mean_p_err: f64,
    pub std_error: f64,
    pub functions_evaluated: u64,
    /// Best code found and its error.
    pub best_p_err: f64,
    pub best_hash: String,
    pub bound_miss_term: f64,
    pub bound_collision_term: f64,
    pub pgm_error_bound: f64,
    /// `Hmax^{√(2 p)}` at the best code's error `p`, or `None` if `p ≥ 1/2`.
    pub converse_bound: Option<f64>,
    pub seeds: Vec<u64>,
}

/// Options for [`compress`].
#[derive(Clone, Debug)]
pub struct CompressOptions {
    pub eps1: f64,
    pub eps2: f64,
    /// Overrides the direct-part rate.
    pub m: Option<u32>,
    pub kind: HashKind,
    pub mode: AveragingMode,
}

impl CompressOptions {
    pub fn new(eps1: f64, eps2: f64) -> Self {
        CompressOptions {
            eps1,
            eps2,
            m: None,
            kind: HashKind::Toeplitz,
            mode: AveragingMode::Auto {
                samples: 2000,
                seed: 0,
            },
        }
    }
}

/// Build codes on the smoothing witness at the chosen rate, average their
/// error on the true source over the hash family and collect the bounds.
pub fn compress(psi: &CqState, opts: &CompressOptions) -> Result<(ProtocolResult, FamilyAverage)> {
    let rate = direct_rate(psi, opts.eps1, opts.eps2)?;
    let m = opts.m.unwrap_or(rate.m);
    let ops = test_operators_from_blocks(&rate.witness_blocks, m);
    let family = HashFamily::for_alphabet(opts.kind, psi.alphabet_size(), m)?;
    let avg = average_error_over_family(psi, &ops, &family, &opts.mode)?;
    let l1 = pgm_error_bound_blocks(&rate.witness_blocks, &ops, m);
    let best = avg.best_member(&family)?;
    let converse = if avg.best_value < 0.5 {
        Some(converse_bound(psi, avg.best_value)?)
    } else {
        None
    };
    let result = ProtocolResult {
        m,
        direct_m: rate.m,
        hmax_smooth: rate.hmax,
        eps1: opts.eps1,
        eps2: opts.eps2,
        family: opts.kind.to_string(),
        mode: avg.mode.clone(),
        mean_p_err: avg.mean,
        std_error: avg.std_error,
        functions_evaluated: avg.count,
        best_p_err: avg.best_value,
        best_hash: best.to_json()?,
        bound_miss_term: l1.first,
        bound_collision_term: l1.second,
        pgm_error_bound: l1.total,
        converse_bound: converse,
        seeds: avg.seeds.clone(),
    };
    Ok((result, avg))
}

#[cfg(test)]
mod tests;
