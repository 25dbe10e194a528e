//! Linear 2-universal hash families over GF(2).
//!
//! A function is an `m × n` binary matrix acting on the bits of the input
//! index (bit `j` of `x` is `(x >> j) & 1`). Two families are provided:
//!
//! * `full-linear`: every matrix, `m·n` parameter bits;
//! * `toeplitz`: `M[i][j] = t[i − j + n − 1]`, `n + m − 1` parameter bits.
//!
//! Both satisfy `Pr_f[f(x) = f(y)] ≤ 2^{−m}` for `x ≠ y`. The degenerate
//! `m = 0` family has a single member with an empty output.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n + parameter bits` for exact collision probabilities.
pub const COLLISION_REGIME_BITS: u32 = 24;

/// Largest number of parameter bits for which a family is enumerated.
pub const ENUMERATION_REGIME_BITS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashKind {
    FullLinear,
    Toeplitz,
}

impl fmt::Display for HashKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HashKind::FullLinear => "full-linear",
            HashKind::Toeplitz => "toeplitz",
        })
    }
}

impl std::str::FromStr for HashKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-linear" => Ok(HashKind::FullLinear),
            "toeplitz" => Ok(HashKind::Toeplitz),
            _ => Err(Error::InvalidArgument(format!("unknown hash family `{s}`"))),
        }
    }
}

/// Input bits needed for an alphabet `{0, …, size − 1}`: `max(1, ⌈log |X|⌉)`.
pub fn input_bits_for(alphabet_size: usize) -> u32 {
    let mut n = 0;
    while (1usize << n) < alphabet_size {
        n += 1;
    }
    n.max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HashFamily {
    kind: HashKind,
    n: u32,
    m: u32,
}

impl HashFamily {
    pub fn new(kind: HashKind, n: u32, m: u32) -> Result<Self> {
        if n == 0 || n > 64 || m > 64 {
            return Err(Error::InvalidArgument(format!(
                "hash family needs 1 <= n <= 64 and m <= 64, got n = {n}, m = {m}"
            )));
        }
        Ok(HashFamily { kind, n, m })
    }

    /// Family on the embedded alphabet `{0, …, size − 1}`.
    pub fn for_alphabet(kind: HashKind, alphabet_size: usize, m: u32) -> Result<Self> {
        Self::new(kind, input_bits_for(alphabet_size), m)
    }

    pub fn kind(&self) -> HashKind {
        self.kind
    }

    pub fn input_bits(&self) -> u32 {
        self.n
    }

    pub fn output_bits(&self) -> u32 {
        self.m
    }

    pub fn param_bits(&self) -> u32 {
        match (self.kind, self.m) {
            (_, 0) => 0,
            (HashKind::FullLinear, m) => m * self.n,
            (HashKind::Toeplitz, m) => self.n + m - 1,
        }
    }

    /// Number of members, if it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        1u64.checked_shl(self.param_bits())
    }

    pub fn enumerable(&self) -> bool {
        self.param_bits() <= ENUMERATION_REGIME_BITS
    }

    /// Member whose parameter bits are the bits of `index`.
    pub fn member(&self, index: u64) -> Result<HashFunction> {
        let bits = self.param_bits();
        if bits < 64 && index >> bits != 0 {
            return Err(Error::InvalidArgument(format!(
                "member index {index} out of range for {bits} parameter bits"
            )));
        }
        let params = (0..bits).map(|i| i < 64 && (index >> i) & 1 == 1).collect();
        Ok(self.member_from_params(params))
    }

    /// All members in index order. Fails outside the enumeration regime.
    pub fn members(&self) -> Result<impl Iterator<Item = HashFunction> + '_> {
        if !self.enumerable() {
            return Err(Error::RegimeExceeded(format!(
                "{} family with {} parameter bits has more than 2^{} members",
                self.kind,
                self.param_bits(),
                ENUMERATION_REGIME_BITS
            )));
        }
        let size = self.size().expect("enumerable");
        Ok((0..size).map(|i| self.member(i).expect("in range")))
    }

    /// Uniformly random member, determined by `seed`.
    pub fn sample(&self, seed: u64) -> HashFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..self.param_bits()).map(|_| rng.random::<bool>()).collect();
        self.member_from_params(params)
    }

    fn member_from_params(&self, params: Vec<bool>) -> HashFunction {
        let (n, m) = (self.n as usize, self.m as usize);
        let rows = (0..m)
            .map(|i| {
                (0..n).fold(0u64, |row, j| {
                    let bit = match self.kind {
                        HashKind::FullLinear => params[i * n + j],
                        HashKind::Toeplitz => params[i + n - 1 - j],
                    };
                    row | (u64::from(bit) << j)
                })
            })
            .collect();
        HashFunction {
            family: *self,
            params,
            rows,
        }
    }

    /// `max_{x ≠ y} Pr_f[f(x) = f(y)]` by enumeration. By linearity this is
    /// the largest fraction of members annihilating a nonzero difference.
    pub fn collision_probability(&self) -> Result<f64> {
        let total = self.n + self.param_bits();
        if total > COLLISION_REGIME_BITS {
            return Err(Error::RegimeExceeded(format!(
                "n + parameter bits = {total} exceeds {COLLISION_REGIME_BITS}"
            )));
        }
        let members: Vec<HashFunction> = self.members()?.collect();
        let mut worst = 0usize;
        for d in 1..(1u64 << self.n) {
            let zeros = members.iter().filter(|f| f.eval_unchecked(d) == 0).count();
            worst = worst.max(zeros);
        }
        Ok(worst as f64 / members.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFunction {
    family: HashFamily,
    params: Vec<bool>,
    rows: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct HashFunctionJson {
    kind: HashKind,
    n: u32,
    m: u32,
    params: String,
}

impl HashFunction {
    pub fn family(&self) -> &HashFamily {
        &self.family
    }

    pub fn input_bits(&self) -> u32 {
        self.family.n
    }

    pub fn output_bits(&self) -> u32 {
        self.family.m
    }

    /// Number of possible outputs `2^m`.
    pub fn output_size(&self) -> usize {
        1usize << self.family.m
    }

    /// Matrix rows as bitmasks over the input bits.
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn params(&self) -> &[bool] {
        &self.params
    }

    /// `M · bits(x)` over GF(2); output bit `i` is row `i`.
    pub fn eval(&self, x: u64) -> Result<u64> {
        let n = self.family.n;
        if n < 64 && x >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "input {x} does not fit in {n} bits"
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |c, (i, row)| c | (u64::from((row & x).count_ones() & 1) << i))
    }

    /// Parameter bits packed little-endian into bytes, as lowercase hex.
    pub fn params_hex(&self) -> String {
        self.params
            .chunks(8)
            .map(|ch| {
                let byte = ch
                    .iter()
                    .enumerate()
                    .fold(0u8, |b, (i, &bit)| b | (u8::from(bit) << i));
                format!("{byte:02x}")
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&HashFunctionJson {
            kind: self.family.kind,
            n: self.family.n,
            m: self.family.m,
            params: self.params_hex(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: HashFunctionJson = serde_json::from_str(s)?;
        let family = HashFamily::new(j.kind, j.n, j.m)?;
        let bits = family.param_bits() as usize;
        if j.params.len() != bits.div_ceil(8) * 2 {
            return Err(Error::InvalidArgument(format!(
                "expected {} hex digits of parameters, got {}",
                bits.div_ceil(8) * 2,
                j.params.len()
            )));
        }
        let mut params = Vec::with_capacity(bits);
        for k in 0..bits.div_ceil(8) {
            let byte = u8::from_str_radix(&j.params[2 * k..2 * k + 2], 16)
                .map_err(|e| Error::InvalidArgument(format!("bad parameter hex: {e}")))?;
            for i in 0..8 {
                if params.len() < bits {
                    params.push((byte >> i) & 1 == 1);
                }
            }
        }
        Ok(family.member_from_params(params))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AveragingMode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
    /// Exhaustive when the family is enumerable, Monte Carlo otherwise.
    Auto { samples: u64, seed: u64 },
}

impl fmt::Display for AveragingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AveragingMode::Exhaustive => f.write_str("exhaustive"),
            AveragingMode::MonteCarlo { samples, seed } => write!(f, "mc:{samples}:{seed}"),
            AveragingMode::Auto { samples, seed } => write!(f, "auto:{samples}:{seed}"),
        }
    }
}

impl std::str::FromStr for AveragingMode {
    type Err = Error;

    /// `exhaustive`, `auto`, `auto:N:seed` or `mc:N:seed`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.parse::<u64>()
                .map_err(|e| Error::InvalidArgument(format!("bad number `{p}` in mode: {e}")))
        };
        match parts.as_slice() {
            ["exhaustive"] => Ok(AveragingMode::Exhaustive),
            ["auto"] => Ok(AveragingMode::Auto { samples: 2000, seed: 0 }),
            ["auto", n, seed] => Ok(AveragingMode::Auto {
                samples: num(n)?,
                seed: num(seed)?,
            }),
            ["mc", n, seed] => Ok(AveragingMode::MonteCarlo {
                samples: num(n)?,
                seed: num(seed)?,
            }),
            _ => Err(Error::InvalidArgument(format!(
                "mode must be exhaustive, auto[:N:seed] or mc:N:seed, got `{s}`"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyAverage {
    pub mean: f64,
    /// Standard error of the mean (0 when exhaustive).
    pub std_error: f64,
    pub count: u64,
    pub exhaustive: bool,
    pub mode: String,
    /// Member index (exhaustive) or seed (Monte Carlo) of the minimizer.
    pub best_key: u64,
    pub best_value: f64,
    /// Seeds drawn in Monte-Carlo mode.
    pub seeds: Vec<u64>,
    /// `(member index or seed, value)` for every evaluated function.
    pub per_function: Vec<(u64, f64)>,
}

/// Mean of `eval` over the members of `family`: every member when
/// enumeration is allowed by `mode`, otherwise seeded samples.
pub fn average_over_family(
    family: &HashFamily,
    mode: &AveragingMode,
    mut eval: impl FnMut(&HashFunction) -> Result<f64>,
) -> Result<FamilyAverage> {
    let exhaustive = match mode {
        AveragingMode::Exhaustive => {
            if !family.enumerable() {
                return Err(Error::RegimeExceeded(format!(
                    "{} family with {} parameter bits",
                    family.kind(),
                    family.param_bits()
                )));
            }
            true
        }
        AveragingMode::MonteCarlo { .. } => false,
        AveragingMode::Auto { .. } => family.enumerable(),
    };
    let mut per_function = vec![];
    let mut seeds = vec![];
    let mode_name;
    if exhaustive {
        mode_name = "exhaustive".to_string();
        for (i, f) in family.members()?.enumerate() {
            per_function.push((i as u64, eval(&f)?));
        }
    } else {
        let (samples, seed) = match mode {
            AveragingMode::MonteCarlo { samples, seed } | AveragingMode::Auto { samples, seed } => {
                (*samples, *seed)
            }
            AveragingMode::Exhaustive => unreachable!("handled above"),
        };
        if samples == 0 {
            return Err(Error::InvalidArgument("Monte-Carlo mode needs N >= 1".into()));
        }
        mode_name = format!("mc:{samples}:{seed}");
        for i in 0..samples {
            let s = seed.wrapping_add(i);
            seeds.push(s);
            per_function.push((s, eval(&family.sample(s))?));
        }
    }
    let count = per_function.len() as u64;
    let mean = per_function.iter().map(|p| p.1).sum::<f64>() / count as f64;
    let std_error = if exhaustive || count < 2 {
        0.0
    } else {
        let var = per_function.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>()
            / (count - 1) as f64;
        (var / count as f64).sqrt()
    };
    let &(best_key, best_value) = per_function
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one function");
    Ok(FamilyAverage {
        mean,
        std_error,
        count,
        exhaustive,
        mode: mode_name,
        best_key,
        best_value,
        seeds,
        per_function,
    })
}

impl FamilyAverage {
    /// The member that attained [`FamilyAverage::best_value`].
    pub fn best_member(&self, family: &HashFamily) -> Result<HashFunction> {
        if self.exhaustive {
            family.member(self.best_key)
        } else {
            Ok(family.sample(self.best_key))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain GF(2) product of an explicit matrix with the bit vector of `x`.
    fn matmul(m: &[Vec<u8>], x: u64) -> u64 {
        m.iter().enumerate().fold(0, |acc, (i, row)| {
            let s: u8 = row
                .iter()
                .enumerate()
                .map(|(j, &b)| b & ((x >> j) & 1) as u8)
                .sum();
            acc | (u64::from(s % 2) << i)
        })
    }

    #[test]
    fn toeplitz_table_matches_hand_product() {
        // n = 3, m = 2, t = (t0, t1, t2, t3) = (1, 0, 1, 1)
        let fam = HashFamily::new(HashKind::Toeplitz, 3, 2).unwrap();
        let f = fam.member(0b1101).unwrap();
        let t = [1u8, 0, 1, 1];
        let mat: Vec<Vec<u8>> = (0..2)
            .map(|i| (0..3).map(|j| t[i + 2 - j]).collect())
            .collect();
        for x in 0..8 {
            assert_eq!(f.eval(x).unwrap(), matmul(&mat, x));
        }
        assert_eq!(fam.size(), Some(16));
    }

    #[test]
    fn identity_and_zero_input() {
        let fam = HashFamily::new(HashKind::FullLinear, 3, 3).unwrap();
        // rows e_0, e_1, e_2 → params bit i*n + i
        let idx = (1 << 0) | (1 << 4) | (1 << 8);
        let f = fam.member(idx).unwrap();
        for x in 0..8 {
            assert_eq!(f.eval(x).unwrap(), x);
        }
        assert_eq!(fam.sample(9).eval(0).unwrap(), 0);
        assert!(f.eval(8).is_err());
    }

    #[test]
    fn exact_collision_probabilities() {
        let fl = HashFamily::new(HashKind::FullLinear, 2, 2).unwrap();
        assert_eq!(fl.collision_probability().unwrap(), 0.25);
        let tp = HashFamily::new(HashKind::Toeplitz, 3, 1).unwrap();
        assert_eq!(tp.collision_probability().unwrap(), 0.5);
        let big = HashFamily::new(HashKind::FullLinear, 5, 5).unwrap();
        assert!(matches!(big.collision_probability(), Err(Error::RegimeExceeded(_))));
    }

    #[test]
    fn two_universal_for_small_families() {
        for kind in [HashKind::FullLinear, HashKind::Toeplitz] {
            for n in 1..=4 {
                for m in 1..=3 {
                    let fam = HashFamily::new(kind, n, m).unwrap();
                    let p = fam.collision_probability().unwrap();
                    assert!(p <= 0.5f64.powi(m as i32) + 1e-15, "{kind} {n} {m}: {p}");
                }
            }
        }
    }

    #[test]
    fn sampling_frequencies_match_enumeration() {
        let fam = HashFamily::new(HashKind::FullLinear, 2, 2).unwrap();
        let members: Vec<_> = fam.members().unwrap().collect();
        let draws = 16000;
        let mut counts = vec![0usize; members.len()];
        for seed in 0..draws {
            let f = fam.sample(seed);
            let k = members.iter().position(|g| *g == f).unwrap();
            counts[k] += 1;
        }
        let p = 1.0 / 16.0;
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 3.0 * sd + 1.0, "{c}");
        }
    }

    #[test]
    fn json_roundtrip_and_determinism() {
        let fam = HashFamily::new(HashKind::Toeplitz, 5, 3).unwrap();
        let f = fam.sample(42);
        assert_eq!(f, fam.sample(42));
        let back = HashFunction::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(f.to_json().unwrap().contains("\"kind\":\"toeplitz\""));
    }

    #[test]
    fn empty_output() {
        let fam = HashFamily::new(HashKind::Toeplitz, 3, 0).unwrap();
        assert_eq!(fam.size(), Some(1));
        assert_eq!(fam.member(0).unwrap().eval(5).unwrap(), 0);
        assert_eq!(input_bits_for(1), 1);
        assert_eq!(input_bits_for(5), 3);
    }

    proptest! {
        #[test]
        fn linear_over_gf2(seed in any::<u64>(), n in 1u32..12, m in 1u32..8, x in any::<u64>(), y in any::<u64>()) {
            for kind in [HashKind::FullLinear, HashKind::Toeplitz] {
                let f = HashFamily::new(kind, n, m).unwrap().sample(seed);
                let mask = (1u64 << n) - 1;
                let (x, y) = (x & mask, y & mask);
                prop_assert_eq!(f.eval(x ^ y).unwrap(), f.eval(x).unwrap() ^ f.eval(y).unwrap());
            }
        }
    }
}
