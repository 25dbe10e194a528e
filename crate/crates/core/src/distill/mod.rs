//! Privacy amplification and one-way secret-key distillation.
//!
//! `distill` runs the composed protocol on a cq state `ψ^{XBE}`:
//!
//! 1. Alice applies a classical channel `x ↦ (u, v)` and announces `v`;
//! 2. she sends the syndrome `c = f(u)` and Bob decodes `û` from `(c, v, B)`
//!    with the PGM code of [`crate::coding`];
//! 3. both hash with `f_pa` to `ℓ` bits. The adversary holds `(E, V, C)`.
//!
//! The output is evaluated exactly as the trace distance of
//! `ρ^{K_A K_B C V E}` to `κ^{K_A K_B} ⊗ ρ^{CVE}`.

mod channel;
mod key;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coding::{self, test_operators_from_blocks, CompressionCode};
use crate::entropy;
use crate::error::{Error, Result};
use crate::hashing::{average_over_family, AveragingMode, FamilyAverage, HashFamily, HashFunction, HashKind};
use crate::linalg::{self, CMat};
use crate::quantum::{CqState, DensityOperator, SystemLayout};

pub use channel::PreprocessChannel;
pub use key::{key_quality, KeyState};

/// `Σ_k |k⟩⟨k| ⊗ Σ_{f(x) = k} p_x φ_x` on `(K, E')`.
pub fn apply_pa(psi: &CqState, f_pa: &HashFunction, l: u32) -> Result<DensityOperator> {
    if f_pa.output_bits() != l {
        return Err(Error::DimensionMismatch(format!(
            "hash outputs {} bits, key length is {l}",
            f_pa.output_bits()
        )));
    }
    let blocks = pa_blocks(psi, f_pa)?;
    let k_label = fresh_label(&psi.side_layout().labels(), "K");
    let layout = SystemLayout::single(&k_label, blocks.len())?.concat(psi.side_layout())?;
    Ok(DensityOperator::from_numerical(&linalg::block_diag(&blocks), layout))
}

fn pa_blocks(psi: &CqState, f_pa: &HashFunction) -> Result<Vec<CMat>> {
    if (psi.alphabet_size() as u128) > 1u128 << f_pa.input_bits() {
        return Err(Error::DimensionMismatch(format!(
            "|X| = {} does not fit in {} input bits",
            psi.alphabet_size(),
            f_pa.input_bits()
        )));
    }
    let d = psi.side_dim();
    let mut blocks = vec![CMat::zeros(d, d); f_pa.output_size()];
    for (i, &x) in psi.symbols().iter().enumerate() {
        blocks[f_pa.eval(x as u64)? as usize] += psi.weighted_block(i);
    }
    Ok(blocks)
}

/// `D(ρ^{KE'}, κ^K ⊗ ρ^{E'})` after hashing with `f_pa`.
pub fn pa_distance(psi: &CqState, f_pa: &HashFunction) -> Result<f64> {
    let blocks = pa_blocks(psi, f_pa)?;
    let marginal = psi.side_marginal();
    let share = marginal.matrix() * linalg::cr(1.0 / blocks.len() as f64);
    Ok(0.5
        * blocks
            .iter()
            .map(|b| linalg::trace_norm_hermitian(&(b - &share)))
            .sum::<f64>())
}

/// Key distance averaged over a hash family.
pub fn average_pa_distance(
    psi: &CqState,
    family: &HashFamily,
    mode: &AveragingMode,
) -> Result<FamilyAverage> {
    average_over_family(family, mode, |f| pa_distance(psi, f))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PaRate {
    pub l: u32,
    /// `Hmin^{ε1}(X|E)`.
    pub hmin: f64,
}

/// `ℓ = ⌊Hmin^{ε1}(X|E) − 2 log(1/ε2) + 1⌋`, clamped at 0.
pub fn pa_rate(psi: &CqState, eps1: f64, eps2: f64) -> Result<PaRate> {
    if !(eps2 > 0.0 && eps2 <= 1.0) {
        return Err(Error::InvalidArgument(format!("eps2 must lie in (0, 1], got {eps2}")));
    }
    let hmin = entropy::hmin_smooth_cq(psi, eps1)?.value;
    Ok(PaRate {
        l: rate_from_hmin(hmin, eps2),
        hmin,
    })
}

fn rate_from_hmin(hmin: f64, eps2: f64) -> u32 {
    linalg::floor_tol(hmin - 2.0 * (1.0 / eps2).log2() + 1.0).max(0.0) as u32
}

fn fresh_label(taken: &[&str], base: &str) -> String {
    let mut l = base.to_string();
    while taken.contains(&l.as_str()) {
        l.push('\'');
    }
    l
}

/// Which side factors Bob and Eve hold.
#[derive(Clone, Debug)]
pub struct Parties {
    pub bob: Vec<String>,
    pub eve: Vec<String>,
}

impl Parties {
    pub fn new(bob: &[&str], eve: &[&str]) -> Self {
        Parties {
            bob: bob.iter().map(|s| s.to_string()).collect(),
            eve: eve.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn check(&self, psi: &CqState) -> Result<(SystemLayout, SystemLayout)> {
        let side = psi.side_layout();
        let bob: Vec<&str> = self.bob.iter().map(String::as_str).collect();
        let eve: Vec<&str> = self.eve.iter().map(String::as_str).collect();
        let b = side.subset(&bob)?;
        let e = side.subset(&eve)?;
        if b.len() + e.len() != side.len() || bob.iter().any(|l| eve.contains(l)) {
            return Err(Error::Layout(format!(
                "Bob {:?} and Eve {:?} must partition the side systems {:?}",
                bob,
                eve,
                side.labels()
            )));
        }
        Ok((b, e))
    }
}

/// The preprocessed state: weighted operators `w_{uv}` on `B ⊗ E`.
struct Preprocessed {
    nu: usize,
    nv: usize,
    db: usize,
    de: usize,
    /// Indexed `u * nv + v`.
    w: Vec<CMat>,
}

impl Preprocessed {
    fn new(psi: &CqState, parties: &Parties, ch: &PreprocessChannel) -> Result<Self> {
        let (b, e) = parties.check(psi)?;
        if ch.input_size() != psi.alphabet_size() {
            return Err(Error::DimensionMismatch(format!(
                "channel on {} symbols, source has {}",
                ch.input_size(),
                psi.alphabet_size()
            )));
        }
        let mut order: Vec<&str> = b.labels();
        order.extend(e.labels());
        let (nu, nv) = (ch.u_size(), ch.v_size());
        let (db, de) = (b.dim(), e.dim());
        let mut w = vec![CMat::zeros(db * de, db * de); nu * nv];
        for (i, &x) in psi.symbols().iter().enumerate() {
            let phi = psi.states()[i].reorder(&order)?;
            let weighted = phi.matrix() * linalg::cr(psi.probs()[i]);
            for u in 0..nu {
                for v in 0..nv {
                    let q = ch.prob(x, u, v);
                    if q > 0.0 {
                        w[u * nv + v] += &weighted * linalg::cr(q);
                    }
                }
            }
        }
        Ok(Preprocessed { nu, nv, db, de, w })
    }

    fn reduce_e(&self, m: &CMat) -> CMat {
        partial_trace_second(m, self.db, self.de)
    }

    fn reduce_b(&self, m: &CMat) -> CMat {
        partial_trace_first(m, self.db, self.de)
    }

    /// `ψ^{U, VB}` with `V` classical.
    fn u_given_vb(&self) -> Result<CqState> {
        let side = SystemLayout::new([("V", self.nv), ("B", self.db)])?;
        let blocks = (0..self.nu)
            .map(|u| {
                let parts: Vec<CMat> = (0..self.nv).map(|v| self.reduce_e(&self.w[u * self.nv + v])).collect();
                linalg::block_diag(&parts)
            })
            .collect();
        CqState::from_weighted_subnormalized("U", blocks, side)
    }

    /// `ψ^{U, VE}`, or `ψ^{U, VCE}` when a syndrome map is supplied
    /// (`C` restricted to the syndromes that occur).
    fn u_given_ve(&self, syndromes: Option<&[usize]>) -> Result<CqState> {
        let nc = syndromes.map_or(1, |s| s.iter().max().map_or(1, |m| m + 1));
        let side = if syndromes.is_some() {
            SystemLayout::new([("V", self.nv), ("C", nc), ("E", self.de)])?
        } else {
            SystemLayout::new([("V", self.nv), ("E", self.de)])?
        };
        let de = self.de;
        let blocks = (0..self.nu)
            .map(|u| {
                let c = syndromes.map_or(0, |s| s[u]);
                let mut full = CMat::zeros(self.nv * nc * de, self.nv * nc * de);
                for v in 0..self.nv {
                    let off = (v * nc + c) * de;
                    full.view_mut((off, off), (de, de))
                        .copy_from(&self.reduce_b(&self.w[u * self.nv + v]));
                }
                full
            })
            .collect();
        CqState::from_weighted_subnormalized("U", blocks, side)
    }
}

/// `Tr_E` of an operator on `B ⊗ E`.
fn partial_trace_second(m: &CMat, db: usize, de: usize) -> CMat {
    CMat::from_fn(db, db, |r, c| (0..de).map(|e| m[(r * de + e, c * de + e)]).sum())
}

/// `Tr_B` of an operator on `B ⊗ E`.
fn partial_trace_first(m: &CMat, db: usize, de: usize) -> CMat {
    CMat::from_fn(de, de, |r, c| (0..db).map(|b| m[(b * de + r, b * de + c)]).sum())
}

/// `Tr_B[(Λ ⊗ 1_E) W]` for `W` on `B ⊗ E`.
fn measure_b(lambda: &CMat, w: &CMat, db: usize, de: usize) -> CMat {
    CMat::from_fn(de, de, |r, c| {
        let mut s = linalg::c(0.0, 0.0);
        for b in 0..db {
            for bp in 0..db {
                s += lambda[(b, bp)] * w[(bp * de + r, b * de + c)];
            }
        }
        s
    })
}

/// ε parameters of the composed protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistillParams {
    /// Smoothing of the max-entropy in the compression step.
    pub eps1: f64,
    /// Hashing slack, shared by both steps.
    pub eps2: f64,
    /// Smoothing of the min-entropy in the amplification step.
    pub epsp1: f64,
}

impl DistillParams {
    /// `(ε1 + ε2) + (ε′1 + ε2)`.
    pub fn budget(&self) -> f64 {
        (self.eps1 + self.eps2) + (self.epsp1 + self.eps2)
    }

    fn validate(&self) -> Result<()> {
        let ok = |e: f64| (0.0..1.0).contains(&e);
        if !(ok(self.eps1) && ok(self.epsp1) && self.eps2 > 0.0 && self.eps2 <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= eps1, epsp1 < 1 and 0 < eps2 <= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KeyReport {
    pub channel: String,
    pub key_length: u32,
    /// Trace distance of the final state to the ideal key, for the chosen
    /// amplification hash.
    pub measured_distance: f64,
    /// Mean of the same over the amplification family.
    pub mean_distance: f64,
    pub bound_distance: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub epsp1: f64,
    pub epsp2: f64,
    /// Syndrome bits `m`, so `|C| = 2^m`.
    pub syndrome_bits: u32,
    /// Syndromes that actually occur.
    pub syndromes_used: usize,
    pub v_size: usize,
    pub compression_p_err: f64,
    pub compression_mean_p_err: f64,
    /// `Hmax^{ε1}(U|BV)`.
    pub hmax_u_bv: f64,
    /// `Hmin^{ε′1}(U|EV)`.
    pub hmin_u_ev: f64,
    /// `Hmin^{ε′1}(U|EVC)`.
    pub hmin_u_evc: f64,
    /// `Hmin^{ε′1}(U|EV) − Hmax^{ε1}(U|BV) − 4 log(1/ε2) − 3`.
    pub lower_bound: f64,
    pub compression_hash: String,
    pub pa_hash: Option<String>,
    pub mode: String,
}

#[derive(Clone, Debug)]
pub struct DistillOptions {
    pub kind: HashKind,
    pub mode: AveragingMode,
}

impl Default for DistillOptions {
    fn default() -> Self {
        DistillOptions {
            kind: HashKind::Toeplitz,
            mode: AveragingMode::Auto { samples: 2000, seed: 0 },
        }
    }
}

/// Compression followed by privacy amplification against `(E, V, C)`.
pub fn distill(
    psi: &CqState,
    parties: &Parties,
    params: DistillParams,
    channel: &PreprocessChannel,
    opts: &DistillOptions,
) -> Result<KeyReport> {
    params.validate()?;
    let pre = Preprocessed::new(psi, parties, channel).map_err(|e| e.at_stage("preprocess"))?;
    let (code, rate, comp) = compress_stage(&pre, params, opts).map_err(|e| e.at_stage("compression"))?;
    let pa = pa_stage(&pre, &code, params, opts).map_err(|e| e.at_stage("privacy amplification"))?;
    let lower_bound = pa.hmin_u_ev - rate.hmax - 4.0 * (1.0 / params.eps2).log2() - 3.0;
    Ok(KeyReport {
        channel: channel.name().to_string(),
        key_length: pa.l,
        measured_distance: pa.best_distance,
        mean_distance: pa.mean_distance,
        bound_distance: params.budget(),
        eps1: params.eps1,
        eps2: params.eps2,
        epsp1: params.epsp1,
        epsp2: params.eps2,
        syndrome_bits: code.m(),
        syndromes_used: pa.syndromes_used,
        v_size: pre.nv,
        compression_p_err: comp.best_value,
        compression_mean_p_err: comp.mean,
        hmax_u_bv: rate.hmax,
        hmin_u_ev: pa.hmin_u_ev,
        hmin_u_evc: pa.hmin_u_evc,
        lower_bound,
        compression_hash: code.hash().to_json()?,
        pa_hash: pa.hash.map(|h| h.to_json()).transpose()?,
        mode: comp.mode,
    })
}

/// Runs [`distill`] for every candidate channel and returns all reports.
pub fn distill_candidates(
    psi: &CqState,
    parties: &Parties,
    params: DistillParams,
    channels: &[PreprocessChannel],
    opts: &DistillOptions,
) -> Result<Vec<KeyReport>> {
    channels
        .iter()
        .map(|ch| distill(psi, parties, params, ch, opts))
        .collect()
}

fn compress_stage(
    pre: &Preprocessed,
    params: DistillParams,
    opts: &DistillOptions,
) -> Result<(CompressionCode, coding::DirectRate, FamilyAverage)> {
    let source = pre.u_given_vb()?;
    let rate = coding::direct_rate(&source, params.eps1, params.eps2)?;
    let ops = test_operators_from_blocks(&rate.witness_blocks, rate.m);
    let family = HashFamily::for_alphabet(opts.kind, pre.nu, rate.m)?;
    let avg = coding::average_error_over_family(&source, &ops, &family, &opts.mode)?;
    let f = avg.best_member(&family)?;
    let code = coding::build_pgm_decoder(&ops, &f)?;
    Ok((code, rate, avg))
}

struct PaOutcome {
    l: u32,
    hmin_u_ev: f64,
    hmin_u_evc: f64,
    syndromes_used: usize,
    best_distance: f64,
    mean_distance: f64,
    hash: Option<HashFunction>,
}

fn pa_stage(
    pre: &Preprocessed,
    code: &CompressionCode,
    params: DistillParams,
    opts: &DistillOptions,
) -> Result<PaOutcome> {
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    let active: Vec<bool> = (0..pre.nu)
        .map(|u| (0..pre.nv).any(|v| linalg::real_trace(&pre.w[u * pre.nv + v]) > 0.0))
        .collect();
    for u in (0..pre.nu).filter(|&u| active[u]) {
        let n = index.len();
        index.entry(code.syndrome(u)).or_insert(n);
    }
    let syndromes: Vec<usize> = (0..pre.nu)
        .map(|u| index.get(&code.syndrome(u)).copied().unwrap_or(0))
        .collect();
    let hmin_u_ev = entropy::hmin_smooth_cq(&pre.u_given_ve(None)?, params.epsp1)?.value;
    let hmin_u_evc = entropy::hmin_smooth_cq(&pre.u_given_ve(Some(&syndromes))?, params.epsp1)?.value;
    let l = rate_from_hmin(hmin_u_evc, params.eps2);
    let family = HashFamily::for_alphabet(opts.kind, pre.nu, l)?;
    let avg = average_over_family(&family, &opts.mode, |f| {
        Ok(final_key_state(pre, code, &syndromes, f)?.quality())
    })?;
    let hash = (l > 0).then(|| avg.best_member(&family)).transpose()?;
    Ok(PaOutcome {
        l,
        hmin_u_ev,
        hmin_u_evc,
        syndromes_used: index.len().max(1),
        best_distance: avg.best_value,
        mean_distance: avg.mean,
        hash,
    })
}

/// `ρ^{K_A K_B (VC) E}` produced by the protocol with amplification hash `f_pa`.
fn final_key_state(
    pre: &Preprocessed,
    code: &CompressionCode,
    syndromes: &[usize],
    f_pa: &HashFunction,
) -> Result<KeyState> {
    let nc = syndromes.iter().max().map_or(1, |m| m + 1);
    let mut ks = KeyState::new(f_pa.output_size(), pre.nv * nc, pre.de);
    let db = pre.db;
    for u in 0..pre.nu {
        let ka = f_pa.eval(u as u64)? as usize;
        let c = code.syndrome(u);
        for v in 0..pre.nv {
            let w = &pre.w[u * pre.nv + v];
            if linalg::real_trace(w) <= 0.0 {
                continue;
            }
            let cv = v * nc + syndromes[u];
            let off = v * db;
            for &uh in code.class(c) {
                let lam = code.povm_element(uh, c).view((off, off), (db, db)).into_owned();
                let kb = f_pa.eval(uh as u64)? as usize;
                ks.add(ka, kb, cv, &measure_b(&lam, w, db, pre.de));
            }
            let abort = code.abort_element(c).view((off, off), (db, db)).into_owned();
            ks.add(ka, 0, cv, &measure_b(&abort, w, db, pre.de));
        }
    }
    Ok(ks)
}

/// `max` over candidate channels of
/// `Hmin^{√(2ε)}(U|EV) − Hmax^{√(2ε)}(U|BV)`.
pub fn secr_upper(
    psi: &CqState,
    parties: &Parties,
    eps: f64,
    channels: &[PreprocessChannel],
) -> Result<f64> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!("need 0 <= eps < 1/2, got {eps}")));
    }
    if channels.is_empty() {
        return Err(Error::InvalidArgument("no candidate channels".into()));
    }
    let s = (2.0 * eps).sqrt();
    let mut best = f64::NEG_INFINITY;
    for ch in channels {
        let pre = Preprocessed::new(psi, parties, ch)?;
        let hmin = entropy::hmin_smooth_cq(&pre.u_given_ve(None)?, s)?.value;
        let hmax = entropy::hmax_smooth_cq(&pre.u_given_vb()?, s)?.value;
        best = best.max(hmin - hmax);
    }
    Ok(best)
}

#[cfg(test)]
mod tests;
