//! Check groups behind the suites. Each group returns records for
//! `config.instances` instances (or its own default count).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coding::{self, audenaert_check, build_test_operator, pgm_error_bound, unraveling_check, CompressOptions};
use crate::distill::{self, DistillOptions, DistillParams, Parties, PreprocessChannel};
use crate::entropy;
use crate::error::Result;
use crate::hashing::{AveragingMode, HashFamily, HashKind};
use crate::linalg;
use crate::quantum::random::{random_density, random_psd};
use crate::quantum::{purified_distance, trace_distance, CqState, DensityOperator, SystemLayout};

use super::{
    gen_state, iid_power, over_instances, party_labels, random_classically_extended,
    random_tripartite_pure, ExperimentConfig, Record, Relation, StateSource, StateSpec,
};

/// Claim names carried by the records.
pub mod anchor {
    pub const DISTANCE_ORDERING: &str = "distance-ordering";
    pub const PURE_STATE_DISTANCE: &str = "pure-state-distance";
    pub const ENTROPY_DUALITY: &str = "entropy-duality";
    pub const SMOOTHING_AT_ZERO: &str = "smoothing-at-zero";
    pub const SMOOTHING_MONOTONE: &str = "smoothing-monotone";
    pub const PGM_AVERAGE_ERROR: &str = "pgm-average-error-bound";
    pub const PGM_UNRAVELING: &str = "pgm-unraveling";
    pub const TRACE_INEQUALITY: &str = "trace-inequality";
    pub const COMPRESSION_DIRECT: &str = "compression-direct";
    pub const COMPRESSION_CONVERSE: &str = "compression-converse";
    pub const DISTILLATION_SECURITY: &str = "distillation-security";
    pub const DISTILLATION_LOWER: &str = "distillation-lower-bound";
    pub const DISTILLATION_CONVERSE: &str = "distillation-converse";
    pub const LEFTOVER_HASHING: &str = "leftover-hashing";
    pub const CQ_SMOOTHING: &str = "cq-optimal-smoothing";
    pub const MAX_CHAIN: &str = "max-entropy-chain-rule";
    pub const MIN_CHAIN: &str = "min-entropy-chain-rule";
    pub const EQUIPARTITION_TREND: &str = "equipartition-trend";
}

/// ε grid for the smoothing checks.
pub const SMOOTHING_GRID: [f64; 4] = [0.0, 0.05, 0.1, 0.2];
/// Exponents of the trace inequality.
pub const TRACE_INEQUALITY_S: [f64; 3] = [0.1, 0.5, 0.9];

fn count(cfg: &ExperimentConfig, default: usize) -> usize {
    cfg.instances.unwrap_or(default)
}

fn rng(seed: u64) -> ChaCha8Rng {
    // decorrelate shape choices from the generator stream of the same seed
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed0f5ba9e)
}

fn side_labels(psi: &CqState) -> Vec<&str> {
    psi.side_layout().labels()
}

/// Pairwise distance orderings between conditional states, plus the closed
/// form `√(1 − |⟨a|b⟩|²)` when both are pure.
pub fn metrics(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    over_instances(cfg, count(cfg, 20), |i, _| {
        let psi = cfg.instance_state(i, |_| StateSpec::RandomCq { alphabet: 3, side_dim: 3, uniform: false })?;
        let states = psi.states();
        let mut out = vec![];
        for a in 0..states.len() {
            for b in a + 1..states.len() {
                let (x, y) = (psi.symbols()[a], psi.symbols()[b]);
                let (ra, rb) = (&states[a], &states[b]);
                let d = trace_distance(ra, rb)?;
                let p = purified_distance(ra, rb)?;
                out.push(Record::new(anchor::DISTANCE_ORDERING, &format!("D<=P[{x},{y}]"), d, Relation::Le, p, 1e-10));
                out.push(Record::new(
                    anchor::DISTANCE_ORDERING,
                    &format!("P<=sqrt(2D)[{x},{y}]"),
                    p,
                    Relation::Le,
                    (2.0 * d).sqrt(),
                    1e-10,
                ));
                let pure = |r: &DensityOperator| linalg::re_inner(r.matrix(), r.matrix()) > 1.0 - 1e-9;
                if pure(ra) && pure(rb) {
                    let overlap = linalg::re_inner(ra.matrix(), rb.matrix()).clamp(0.0, 1.0);
                    let closed = (1.0 - overlap).sqrt();
                    out.push(Record::new(anchor::PURE_STATE_DISTANCE, &format!("D[{x},{y}]"), d, Relation::Eq, closed, 1e-9));
                    out.push(Record::new(anchor::PURE_STATE_DISTANCE, &format!("P[{x},{y}]"), p, Relation::Eq, closed, 1e-9));
                }
            }
        }
        Ok(out)
    })
}

/// `Hmax(A|B) + Hmin(A|C) = 0` on random pure `ABC`, with `Hmax` from the
/// direct fidelity program so the check does not go through duality.
pub fn duality(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    over_instances(cfg, count(cfg, 200), |_, seed| {
        let rho = random_tripartite_pure(seed)?;
        let hmax = entropy::hmax_cond_direct(&rho.partial_trace(&["A", "B"])?, &["B"])?.value;
        let hmin = entropy::hmin_cond(&rho.partial_trace(&["A", "C"])?, &["C"])?.value;
        Ok(vec![Record::new(
            anchor::ENTROPY_DUALITY,
            "Hmax(A|B)+Hmin(A|C)",
            hmax + hmin,
            Relation::Eq,
            0.0,
            1e-6,
        )])
    })
}

/// State for a smoothing instance: the configured source when set, else a
/// random cq state (even instances) or a generic two-qubit state (odd).
fn smoothing_state(cfg: &ExperimentConfig, i: usize, seed: u64) -> Result<(DensityOperator, Vec<String>)> {
    if cfg.state.is_some() || i.is_multiple_of(2) {
        let psi = cfg.instance_state(i, |s| StateSpec::RandomCq {
            alphabet: rng(s).random_range(2..=3),
            side_dim: 2,
            uniform: false,
        })?;
        let labels = side_labels(&psi).iter().map(|s| s.to_string()).collect();
        return Ok((psi.embed(), labels));
    }
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let layout = SystemLayout::new([("A", 2), ("B", 2)])?;
    Ok((DensityOperator::new(random_density(4, &mut r), layout)?, vec!["B".into()]))
}

/// Smoothed entropies at `ε = 0` against the unsmoothed programs, and
/// monotonicity over [`SMOOTHING_GRID`].
pub fn smoothing(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    over_instances(cfg, count(cfg, 50), |i, seed| {
        let (rho, labels) = smoothing_state(cfg, i, seed)?;
        let cond: Vec<&str> = labels.iter().map(String::as_str).collect();
        let mut out = vec![];
        let hmin: Vec<f64> = SMOOTHING_GRID
            .iter()
            .map(|&e| Ok(entropy::hmin_smooth(&rho, &cond, e)?.value))
            .collect::<Result<_>>()?;
        let hmax: Vec<f64> = SMOOTHING_GRID
            .iter()
            .map(|&e| Ok(entropy::hmax_smooth(&rho, &cond, e)?.value))
            .collect::<Result<_>>()?;
        let hmin0 = entropy::hmin_cond(&rho, &cond)?.value;
        let hmax0 = entropy::hmax_cond_direct(&rho, &cond)?.value;
        out.push(Record::new(anchor::SMOOTHING_AT_ZERO, "Hmin^0", hmin[0], Relation::Eq, hmin0, 1e-6));
        out.push(Record::new(anchor::SMOOTHING_AT_ZERO, "Hmax^0", hmax[0], Relation::Eq, hmax0, 1e-6));
        for k in 1..SMOOTHING_GRID.len() {
            let (lo, hi) = (SMOOTHING_GRID[k - 1], SMOOTHING_GRID[k]);
            out.push(Record::new(
                anchor::SMOOTHING_MONOTONE,
                &format!("Hmin^{hi}>=Hmin^{lo}"),
                hmin[k],
                Relation::Ge,
                hmin[k - 1],
                1e-6,
            ));
            out.push(Record::new(
                anchor::SMOOTHING_MONOTONE,
                &format!("Hmax^{hi}<=Hmax^{lo}"),
                hmax[k],
                Relation::Le,
                hmax[k - 1],
                1e-6,
            ));
        }
        Ok(out)
    })
}

/// Exhaustive family average of the PGM error against its analytic bound.
/// Defaults: `|X| = 4`, qubit `B`, full-linear family with `m = 2`.
pub fn pgm_average(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let kind = cfg.hash.unwrap_or(HashKind::FullLinear);
    let m = cfg.m.unwrap_or(2);
    over_instances(cfg, count(cfg, 20), |i, seed| {
        let psi = cfg.instance_state(i, |_| StateSpec::RandomCq { alphabet: 4, side_dim: 2, uniform: false })?;
        let ops = build_test_operator(&psi, m);
        let family = HashFamily::for_alphabet(kind, psi.alphabet_size(), m)?;
        let mode = match &cfg.mode {
            Some(_) => cfg.averaging(seed)?,
            None => AveragingMode::Exhaustive,
        };
        let avg = coding::average_error_over_family(&psi, &ops, &family, &mode)?;
        let bound = pgm_error_bound(&psi, &ops, m);
        let tol = if avg.exhaustive { 0.0 } else { 3.0 * avg.std_error };
        Ok(vec![Record::new(anchor::PGM_AVERAGE_ERROR, "mean p_err<=bound", avg.mean, Relation::Le, bound.total, tol)])
    })
}

/// `1 − Λ_{x;c} ⪯ 2(1 − Π_x) + 4 Σ_{x'≠x} Π_{x'}` on random decoders.
pub fn unraveling(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let kind = cfg.hash.unwrap_or(HashKind::Toeplitz);
    over_instances(cfg, count(cfg, 200), |i, seed| {
        let mut r = rng(seed);
        let (nx, d) = (r.random_range(2..=8), r.random_range(2..=4));
        let m = r.random_range(1..=3);
        let psi = cfg.instance_state(i, |_| StateSpec::RandomCq { alphabet: nx, side_dim: d, uniform: false })?;
        let ops = build_test_operator(&psi, m);
        let f = HashFamily::for_alphabet(kind, psi.alphabet_size(), m)?.sample(seed);
        let x = r.random_range(0..psi.alphabet_size());
        let c = f.eval(x as u64)?;
        let u = unraveling_check(&ops, &f, c, x)?;
        Ok(vec![Record::new(anchor::PGM_UNRAVELING, &format!("min eig (x={x})"), u.min_eigenvalue, Relation::Ge, 0.0, 1e-9)])
    })
}

/// Trace inequality on random PSD pairs of dimension up to 8 (with random
/// ranks), plus equality at `σ = ρ`.
pub fn audenaert(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    over_instances(cfg, count(cfg, 500), |_, seed| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let d = r.random_range(1..=8);
        let (k1, k2) = (r.random_range(1..=d), r.random_range(1..=d));
        let rho = random_psd(d, k1, &mut r);
        let sigma = random_psd(d, k2, &mut r);
        let mut out = vec![];
        for s in TRACE_INEQUALITY_S {
            let a = audenaert_check(&rho, &sigma, s)?;
            out.push(Record::new(anchor::TRACE_INEQUALITY, &format!("s={s}"), a.lhs, Relation::Le, a.rhs, 1e-9));
        }
        let a = audenaert_check(&rho, &rho, 0.5)?;
        out.push(Record::new(anchor::TRACE_INEQUALITY, "sigma=rho", a.lhs, Relation::Eq, a.rhs, 1e-9));
        Ok(out)
    })
}

/// Direct part at the prescribed rate and converse at the best code's
/// measured error. Defaults: `|X| ∈ 2..=8`, `dim B ∈ 2..=4`,
/// `ε1 = ε2 = 0.1`.
pub fn compression(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let eps1 = cfg.eps1.unwrap_or(0.1);
    let eps2 = cfg.eps2.unwrap_or(0.1);
    over_instances(cfg, count(cfg, 20), |i, seed| {
        let psi = cfg.instance_state(i, |s| {
            let mut r = rng(s);
            StateSpec::RandomCq {
                alphabet: r.random_range(2..=8),
                side_dim: r.random_range(2..=4),
                uniform: false,
            }
        })?;
        let opts = CompressOptions {
            eps1,
            eps2,
            m: cfg.m,
            kind: cfg.hash.unwrap_or(HashKind::Toeplitz),
            mode: cfg.averaging(seed)?,
        };
        let (res, avg) = coding::compress(&psi, &opts)?;
        let margin = if avg.exhaustive { 0.0 } else { 3.0 * avg.std_error };
        let mut out = vec![
            Record::new(anchor::COMPRESSION_DIRECT, "mean p_err<=eps1+eps2", res.mean_p_err, Relation::Le, eps1 + eps2, margin),
            Record::info(anchor::COMPRESSION_DIRECT, "m", res.m as f64),
            Record::info(anchor::COMPRESSION_DIRECT, "Hmax^eps1(X|B)", res.hmax_smooth),
        ];
        out.push(match res.converse_bound {
            Some(h) => Record::new(anchor::COMPRESSION_CONVERSE, "m>=Hmax^sqrt(2p)", res.m as f64, Relation::Ge, h, 1e-6),
            // the bound needs p < 1/2; nothing to check otherwise
            None => Record::info(anchor::COMPRESSION_CONVERSE, "best p_err>=1/2", res.best_p_err),
        });
        Ok(out)
    })
}

/// Composite key quality, the lower bound on `ℓ` and the converse, for the
/// identity and the constant preprocessing. Defaults: `|X| ∈ 2..=4`, qubit
/// `B` and `E`, `(ε1, ε2, ε′1) = (0.05, 0.1, 0.05)`.
pub fn distillation(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let params = DistillParams {
        eps1: cfg.eps1.unwrap_or(0.05),
        eps2: cfg.eps2.unwrap_or(0.1),
        epsp1: cfg.epsp1.unwrap_or(0.05),
    };
    over_instances(cfg, count(cfg, 10), |i, seed| {
        let psi = cfg.instance_state(i, |s| StateSpec::CqqRandom {
            alphabet: rng(s).random_range(2..=4),
            dim_b: 2,
            dim_e: 2,
            uniform: false,
        })?;
        let (bob, eve) = party_labels(&psi);
        let bob: Vec<&str> = bob.iter().map(String::as_str).collect();
        let eve: Vec<&str> = eve.iter().map(String::as_str).collect();
        let parties = Parties::new(&bob, &eve);
        let nx = psi.alphabet_size();
        let channels = [PreprocessChannel::identity(nx), PreprocessChannel::constant(nx)];
        let opts = DistillOptions {
            kind: cfg.hash.unwrap_or(HashKind::Toeplitz),
            mode: cfg.averaging(seed)?,
        };
        let reports = distill::distill_candidates(&psi, &parties, params, &channels, &opts)?;
        let mut out = vec![];
        for rep in &reports {
            let ch = &rep.channel;
            let l = rep.key_length as f64;
            out.push(Record::new(
                anchor::DISTILLATION_SECURITY,
                &format!("distance<=budget[{ch}]"),
                rep.measured_distance,
                Relation::Le,
                rep.bound_distance,
                1e-12,
            ));
            out.push(Record::new(anchor::DISTILLATION_LOWER, &format!("l>=bound[{ch}]"), l, Relation::Ge, rep.lower_bound, 0.0));
            if rep.measured_distance < 0.5 {
                let upper = distill::secr_upper(&psi, &parties, rep.measured_distance, &channels)?;
                out.push(Record::new(anchor::DISTILLATION_CONVERSE, &format!("l<=upper[{ch}]"), l, Relation::Le, upper, 1e-6));
            }
        }
        Ok(out)
    })
}

/// Family-averaged key distance at `ℓ = ⌊Hmin^{ε1}(X|E) − 2 log(1/ε2) + 1⌋`.
/// Defaults: two copies of a uniform 16-symbol source with a qubit
/// adversary, `ε1 = 0`, `ε2 = 0.2`, exhaustive averaging.
pub fn privacy_amplification(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let eps1 = cfg.eps1.unwrap_or(0.0);
    let eps2 = cfg.eps2.unwrap_or(0.2);
    let kind = cfg.hash.unwrap_or(HashKind::Toeplitz);
    over_instances(cfg, count(cfg, 20), |i, seed| {
        let psi = cfg.instance_state(i, |_| StateSpec::Iid {
            base: Box::new(StateSpec::RandomCq { alphabet: 16, side_dim: 2, uniform: true }),
            n: 2,
        })?;
        let rate = distill::pa_rate(&psi, eps1, eps2)?;
        let family = HashFamily::for_alphabet(kind, psi.alphabet_size(), rate.l)?;
        let mode = match &cfg.mode {
            Some(_) => cfg.averaging(seed)?,
            None => AveragingMode::Exhaustive,
        };
        let avg = distill::average_pa_distance(&psi, &family, &mode)?;
        let tol = if avg.exhaustive { 1e-12 } else { 3.0 * avg.std_error };
        Ok(vec![
            Record::new(anchor::LEFTOVER_HASHING, "mean distance<=eps1+eps2", avg.mean, Relation::Le, eps1 + eps2, tol),
            Record::info(anchor::LEFTOVER_HASHING, "l", rate.l as f64),
            Record::info(anchor::LEFTOVER_HASHING, "Hmin^eps1(X|E)", rate.hmin),
        ])
    })
}

/// Smoothing of `Hmax(X|B)` over cq candidates against all candidates.
pub fn cq_smoothing(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let eps = cfg.eps1.unwrap_or(0.1);
    over_instances(cfg, count(cfg, 20), |i, _| {
        let psi = cfg.instance_state(i, |_| StateSpec::RandomCq { alphabet: 2, side_dim: 2, uniform: false })?;
        let cq = entropy::hmax_smooth_cq(&psi, eps)?;
        let free = entropy::hmax_smooth_unrestricted(&psi.embed(), &side_labels(&psi), eps)?;
        let mut out = vec![Record::new(anchor::CQ_SMOOTHING, "cq==unrestricted", cq.value, Relation::Eq, free.value, 1e-5)];
        if let Some(dist) = cq.distance {
            out.push(Record::new(anchor::CQ_SMOOTHING, "witness distance<=eps", dist, Relation::Le, eps, 1e-6));
        }
        Ok(out)
    })
}

/// Chain rules on `Σ_k p_k ρ_k^{AQ} ⊗ |k⟩⟨k|^K`: the max-entropy rule with
/// `K` as the classical conditioning register, the min-entropy rule with
/// `K` as the classical register moved into the conditioning.
pub fn chain_rules(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let eps = cfg.eps1.unwrap_or(0.1);
    over_instances(cfg, count(cfg, 100), |_, seed| {
        let rho = random_classically_extended(seed)?;
        let mx = entropy::chain_max(&rho, &["A"], &["Q"], "K")?;
        let mut out = vec![Record::new(anchor::MAX_CHAIN, "Hmax(A|QK)>=Hmax(A|Q)-log|K|", mx.lhs, Relation::Ge, mx.rhs, 1e-8)];
        for e in [0.0, eps] {
            let mn = entropy::chain_min(&rho, &["A"], "K", &["Q"], e)?;
            out.push(Record::new(
                anchor::MIN_CHAIN,
                &format!("Hmin^{e}(AK|Q)<=Hmin^{e}(A|KQ)+log|K|"),
                mn.lhs,
                Relation::Le,
                mn.rhs,
                1e-8,
            ));
        }
        Ok(out)
    })
}

/// `Hmax^ε(Xⁿ|Bⁿ)/n` for `n = 1..=4` (while within the size cap). Only
/// finiteness is asserted; the successive differences are reported. The
/// default base has pure conditional states, which keeps the smoothing
/// program at `2ⁿ` dimensions.
pub fn aep_trend(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let eps = cfg.eps1.unwrap_or(0.1);
    over_instances(cfg, count(cfg, 1), |i, _| {
        let base = match &cfg.state {
            Some(StateSource::Generator(StateSpec::Iid { base, .. })) => gen_state(base, cfg.instance_seed(i))?,
            _ => cfg.instance_state(i, |_| StateSpec::PurePair { theta: 1.0 })?,
        };
        let one = base.alphabet_size() * base.side_dim();
        let mut out = vec![];
        let mut prev: Option<f64> = None;
        for n in 1..=4u32 {
            if one.pow(n) > super::MAX_IID_DIM {
                break;
            }
            let psi = iid_power(&base, n as usize)?;
            let rate = entropy::hmax_smooth_cq(&psi, eps)?.value / n as f64;
            out.push(Record::new(anchor::EQUIPARTITION_TREND, &format!("Hmax^eps/n (n={n})"), rate, Relation::Finite, 0.0, 0.0));
            if let Some(p) = prev {
                out.push(Record::info(anchor::EQUIPARTITION_TREND, &format!("change at n={n}"), rate - p));
            }
            prev = Some(rate);
        }
        Ok(out)
    })
}
