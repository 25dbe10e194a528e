use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMat, CVec};
use crate::quantum::random::{random_density, random_probs, random_pure};
use crate::quantum::{CqState, DensityOperator, SystemLayout};

/// Largest alphabet a generator will produce.
pub const MAX_ALPHABET: usize = 16;
/// Largest total side dimension (`dim B · dim E`).
pub const MAX_SIDE_DIM: usize = 16;
/// Largest `(|X| · dim)^n` for i.i.d. powers.
pub const MAX_IID_DIM: usize = 4096;

/// Recipe for a seeded cq state.
///
/// The compact string form used on the command line is
/// `random-cq:4:2[:uniform]`, `correlated:2`, `pure-pair:1.5708`,
/// `cqq-random:4:2:2[:uniform]` and `iid:3:<base>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    /// Random probabilities and Wishart conditional states on `B`.
    RandomCq {
        alphabet: usize,
        side_dim: usize,
        #[serde(default)]
        uniform: bool,
    },
    /// Uniform `X` with `B` holding a copy.
    Correlated { alphabet: usize },
    /// Uniform bit with pure states `|0⟩` and `cos θ|0⟩ + sin θ|1⟩` on `B`.
    PurePair { theta: f64 },
    /// `n` independent copies of `base`; side factors are suffixed `1..n`.
    Iid { base: Box<StateSpec>, n: usize },
    /// Random probabilities and Wishart conditional states on `B ⊗ E`.
    CqqRandom {
        alphabet: usize,
        dim_b: usize,
        dim_e: usize,
        #[serde(default)]
        uniform: bool,
    },
}

impl StateSpec {
    pub fn alphabet_size(&self) -> usize {
        match self {
            StateSpec::RandomCq { alphabet, .. }
            | StateSpec::Correlated { alphabet }
            | StateSpec::CqqRandom { alphabet, .. } => *alphabet,
            StateSpec::PurePair { .. } => 2,
            StateSpec::Iid { base, n } => base.alphabet_size().saturating_pow(*n as u32),
        }
    }

    pub fn side_dim(&self) -> usize {
        match self {
            StateSpec::RandomCq { side_dim, .. } => *side_dim,
            StateSpec::Correlated { alphabet } => *alphabet,
            StateSpec::PurePair { .. } => 2,
            StateSpec::CqqRandom { dim_b, dim_e, .. } => dim_b * dim_e,
            StateSpec::Iid { base, n } => base.side_dim().saturating_pow(*n as u32),
        }
    }

    fn check_caps(&self) -> Result<()> {
        let cap = |what: &str, v: usize, max: usize| {
            if v == 0 || v > max {
                Err(Error::InvalidArgument(format!("{what} = {v} outside 1..={max}")))
            } else {
                Ok(())
            }
        };
        match self {
            StateSpec::Iid { base, n } => {
                if *n == 0 {
                    return Err(Error::InvalidArgument("iid needs n >= 1".into()));
                }
                if matches!(**base, StateSpec::Iid { .. }) {
                    return Err(Error::InvalidArgument("nested iid specs are not supported".into()));
                }
                base.check_caps()?;
                let one = base.alphabet_size() * base.side_dim();
                let total = (one as u128).checked_pow(*n as u32).unwrap_or(u128::MAX);
                if total > MAX_IID_DIM as u128 {
                    return Err(Error::InvalidArgument(format!(
                        "iid dimension ({one})^{n} exceeds {MAX_IID_DIM}"
                    )));
                }
                Ok(())
            }
            StateSpec::PurePair { theta } if !theta.is_finite() => {
                Err(Error::InvalidArgument(format!("theta must be finite, got {theta}")))
            }
            _ => {
                cap("|X|", self.alphabet_size(), MAX_ALPHABET)?;
                cap("side dimension", self.side_dim(), MAX_SIDE_DIM)
            }
        }
    }

    /// Side layout of the non-iid kinds.
    fn side_layout(&self) -> Result<SystemLayout> {
        match self {
            StateSpec::CqqRandom { dim_b, dim_e, .. } => SystemLayout::new([("B", *dim_b), ("E", *dim_e)]),
            _ => SystemLayout::single("B", self.side_dim()),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = |uniform: &bool| if *uniform { ":uniform" } else { "" };
        match self {
            StateSpec::RandomCq { alphabet, side_dim, uniform } => {
                write!(f, "random-cq:{alphabet}:{side_dim}{}", u(uniform))
            }
            StateSpec::Correlated { alphabet } => write!(f, "correlated:{alphabet}"),
            StateSpec::PurePair { theta } => write!(f, "pure-pair:{theta}"),
            StateSpec::Iid { base, n } => write!(f, "iid:{n}:{base}"),
            StateSpec::CqqRandom { alphabet, dim_b, dim_e, uniform } => {
                write!(f, "cqq-random:{alphabet}:{dim_b}:{dim_e}{}", u(uniform))
            }
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse state spec `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<usize>().map_err(|_| bad());
        let uniform = |rest: &[&str]| match rest {
            [] => Ok(false),
            ["uniform"] => Ok(true),
            _ => Err(bad()),
        };
        match parts.as_slice() {
            ["random-cq", a, d, rest @ ..] => Ok(StateSpec::RandomCq {
                alphabet: num(a)?,
                side_dim: num(d)?,
                uniform: uniform(rest)?,
            }),
            ["correlated", a] => Ok(StateSpec::Correlated { alphabet: num(a)? }),
            ["pure-pair", t] => Ok(StateSpec::PurePair {
                theta: t.parse().map_err(|_| bad())?,
            }),
            ["cqq-random", a, b, e, rest @ ..] => Ok(StateSpec::CqqRandom {
                alphabet: num(a)?,
                dim_b: num(b)?,
                dim_e: num(e)?,
                uniform: uniform(rest)?,
            }),
            ["iid", n, ..] => {
                let base = s.splitn(3, ':').nth(2).ok_or_else(bad)?;
                Ok(StateSpec::Iid {
                    base: Box::new(base.parse()?),
                    n: num(n)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

fn basis_state(d: usize, i: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, i)] = cr(1.0);
    m
}

fn probs<R: Rng>(n: usize, uniform: bool, rng: &mut R) -> Vec<f64> {
    if uniform {
        vec![1.0 / n as f64; n]
    } else {
        random_probs(n, rng)
    }
}

/// Conditional state of symbol `x`; the maximally mixed state when `p_x = 0`.
fn conditional(cq: &CqState, x: usize) -> CMat {
    match cq.symbols().iter().position(|&s| s == x) {
        Some(i) => cq.states()[i].matrix().clone(),
        None => {
            let d = cq.side_dim();
            CMat::identity(d, d) * cr(1.0 / d as f64)
        }
    }
}

/// Build the state described by `spec` from `seed`.
pub fn gen_state(spec: &StateSpec, seed: u64) -> Result<CqState> {
    spec.check_caps()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        StateSpec::RandomCq { alphabet, side_dim, uniform } => {
            let p = probs(*alphabet, *uniform, &mut rng);
            let states = (0..*alphabet).map(|_| random_density(*side_dim, &mut rng)).collect();
            CqState::new(&p, states, spec.side_layout()?)
        }
        StateSpec::CqqRandom { alphabet, dim_b, dim_e, uniform } => {
            let p = probs(*alphabet, *uniform, &mut rng);
            let states = (0..*alphabet)
                .map(|_| random_density(dim_b * dim_e, &mut rng))
                .collect();
            CqState::new(&p, states, spec.side_layout()?)
        }
        StateSpec::Correlated { alphabet } => CqState::new(
            &vec![1.0 / *alphabet as f64; *alphabet],
            (0..*alphabet).map(|x| basis_state(*alphabet, x)).collect(),
            spec.side_layout()?,
        ),
        StateSpec::PurePair { theta } => {
            let v = CVec::from_vec(vec![cr(theta.cos()), cr(theta.sin())]);
            CqState::new(&[0.5, 0.5], vec![basis_state(2, 0), linalg::outer(&v, &v)], spec.side_layout()?)
        }
        StateSpec::Iid { base, n } => {
            let one = gen_state(base, seed)?;
            iid_power(&one, *n)
        }
    }
}

/// `ψ^{⊗n}` with `Xⁿ` as one register and side factors suffixed `1..n`.
pub fn iid_power(base: &CqState, n: usize) -> Result<CqState> {
    if n == 0 {
        return Err(Error::InvalidArgument("iid needs n >= 1".into()));
    }
    let mut factors = vec![];
    for i in 1..=n {
        for (l, d) in base.side_layout().factors() {
            factors.push((format!("{l}{i}"), *d));
        }
    }
    let side = SystemLayout::new(factors)?;
    let nx = base.alphabet_size();
    let mut p = vec![1.0];
    let mut states = vec![CMat::identity(1, 1)];
    for _ in 0..n {
        let mut next_p = Vec::with_capacity(p.len() * nx);
        let mut next_s = Vec::with_capacity(p.len() * nx);
        for (q, s) in p.iter().zip(&states) {
            for x in 0..nx {
                next_p.push(q * base.prob_of(x));
                next_s.push(linalg::kron(s, &conditional(base, x)));
            }
        }
        p = next_p;
        states = next_s;
    }
    // products of floats drift from unit sum by a few ulps
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|q| *q /= total);
    CqState::new(&p, states, side)
}

/// Side factors of a generated state held by Bob (`B…`) and Eve (`E…`).
pub fn party_labels(cq: &CqState) -> (Vec<String>, Vec<String>) {
    let mut bob = vec![];
    let mut eve = vec![];
    for l in cq.side_layout().labels() {
        if l.starts_with('E') {
            eve.push(l.to_string());
        } else {
            bob.push(l.to_string());
        }
    }
    (bob, eve)
}

/// Random pure state on `A ⊗ B ⊗ C` with each factor of dimension 2 or 3,
/// returned as a density operator.
pub fn random_tripartite_pure(seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = (0..3).map(|_| rng.random_range(2..=3)).collect();
    let layout = SystemLayout::new([("A", dims[0]), ("B", dims[1]), ("C", dims[2])])?;
    let v = random_pure(layout.dim(), &mut rng);
    DensityOperator::new(linalg::outer(&v, &v), layout)
}

/// `Σ_k p_k ρ_k^{AQ} ⊗ |k⟩⟨k|^K` with `dim A = 2` and `dim Q, |K| ∈ {2, 3}`.
pub fn random_classically_extended(seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dq = rng.random_range(2..=3);
    let dk = rng.random_range(2..=3);
    let p = random_probs(dk, &mut rng);
    let daq = 2 * dq;
    let mut m = CMat::zeros(daq * dk, daq * dk);
    for (k, pk) in p.iter().enumerate() {
        let block = linalg::kron(&random_density(daq, &mut rng), &basis_state(dk, k)) * c(*pk, 0.0);
        m += block;
    }
    DensityOperator::new(m, SystemLayout::new([("A", 2), ("Q", dq), ("K", dk)])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_kinds() {
        let s = gen_state(&StateSpec::Correlated { alphabet: 2 }, 0).unwrap();
        assert_eq!(s.states()[1].matrix()[(1, 1)], cr(1.0));
        assert_eq!(s.probs(), &[0.5, 0.5]);

        let s = gen_state(&StateSpec::PurePair { theta: std::f64::consts::FRAC_PI_2 }, 0).unwrap();
        let overlap = linalg::re_inner(s.states()[0].matrix(), s.states()[1].matrix());
        assert!(overlap.abs() < 1e-15);
    }

    #[test]
    fn iid_square_is_kronecker_square() {
        let base = StateSpec::RandomCq { alphabet: 3, side_dim: 2, uniform: false };
        let one = gen_state(&base, 5).unwrap();
        let two = gen_state(&StateSpec::Iid { base: Box::new(base), n: 2 }, 5).unwrap();
        assert_eq!(two.side_layout().labels(), vec!["B1", "B2"]);
        // ρ^{XB} ⊗ ρ^{XB} reordered to (X1 X2) B1 B2, entry by entry
        let m = one.embed().into_matrix();
        let sq = two.embed().into_matrix();
        let split = |i: usize| (i / 12, (i / 4) % 3, (i / 2) % 2, i % 2);
        for r in 0..36 {
            for col in 0..36 {
                let (x1, x2, b1, b2) = split(r);
                let (y1, y2, c1, c2) = split(col);
                let expected = m[(x1 * 2 + b1, y1 * 2 + c1)] * m[(x2 * 2 + b2, y2 * 2 + c2)];
                assert!((sq[(r, col)] - expected).norm() < 1e-14, "{r} {col}");
            }
        }
    }

    #[test]
    fn caps_and_determinism() {
        assert!(gen_state(&StateSpec::RandomCq { alphabet: 17, side_dim: 2, uniform: false }, 0).is_err());
        assert!(gen_state(&StateSpec::CqqRandom { alphabet: 2, dim_b: 4, dim_e: 5, uniform: false }, 0).is_err());
        let big = StateSpec::Iid {
            base: Box::new(StateSpec::RandomCq { alphabet: 4, side_dim: 3, uniform: false }),
            n: 4,
        };
        assert!(gen_state(&big, 0).is_err());
        let spec = StateSpec::CqqRandom { alphabet: 3, dim_b: 2, dim_e: 2, uniform: false };
        let a = gen_state(&spec, 11).unwrap();
        let b = gen_state(&spec, 11).unwrap();
        assert_eq!(a.embed().matrix(), b.embed().matrix());
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["random-cq:4:2", "random-cq:4:2:uniform", "correlated:3", "pure-pair:0.5", "cqq-random:2:2:2", "iid:3:random-cq:4:2:uniform"] {
            let spec: StateSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("random-cq:4".parse::<StateSpec>().is_err());
        let json = serde_json::to_string(&"iid:2:correlated:2".parse::<StateSpec>().unwrap()).unwrap();
        assert_eq!(json, r#"{"kind":"iid","base":{"kind":"correlated","alphabet":2},"n":2}"#);
    }
}
