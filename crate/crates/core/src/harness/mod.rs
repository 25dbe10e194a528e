//! State generators, experiment configuration and the verification suites.
//!
//! A suite runs one family of checks over seeded instances. Instance `i`
//! uses seed `config.seed + i`; instances run in parallel and their records
//! are assembled in instance order, so a rerun with the same configuration
//! gives the same report.

mod generate;
mod report;
pub mod suites;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{AveragingMode, HashKind};
use crate::quantum::{io, CqState};

pub use generate::{
    gen_state, iid_power, party_labels, random_classically_extended, random_tripartite_pure, StateSpec,
    MAX_ALPHABET, MAX_IID_DIM, MAX_SIDE_DIM,
};
pub use report::{Record, Relation, ReportFormat, SuiteReport};

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "ONESHOT_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Orderings between trace and purified distance.
    Metrics,
    /// Duality of min- and max-entropy and sanity of smoothing.
    Entropy,
    /// Averaged PGM error against its bound, and the unraveling inequality.
    PgmBound,
    /// The trace inequality `Tr[ρ{ρ−σ}_− + σ{ρ−σ}_+] ≤ Tr[ρ^s σ^{1−s}]`.
    Audenaert,
    /// Direct and converse rates for compression with side information.
    Compression,
    /// End-to-end key distillation against the lower and upper bounds.
    Distillation,
    /// Leftover hashing against a quantum adversary.
    PrivacyAmplification,
    /// Smoothing restricted to cq states loses nothing.
    CqSmoothing,
    /// Chain rules with a classical register.
    ChainRules,
    /// `Hmax^ε(Xⁿ|Bⁿ)/n` for growing `n`.
    AepTrend,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Metrics,
        Suite::Entropy,
        Suite::PgmBound,
        Suite::Audenaert,
        Suite::Compression,
        Suite::Distillation,
        Suite::PrivacyAmplification,
        Suite::CqSmoothing,
        Suite::ChainRules,
        Suite::AepTrend,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Metrics => "metrics",
            Suite::Entropy => "entropy",
            Suite::PgmBound => "pgm-bound",
            Suite::Audenaert => "audenaert",
            Suite::Compression => "compression",
            Suite::Distillation => "distillation",
            Suite::PrivacyAmplification => "privacy-amplification",
            Suite::CqSmoothing => "cq-smoothing",
            Suite::ChainRules => "chain-rules",
            Suite::AepTrend => "aep-trend",
        }
    }

    /// Whether the suite draws its instances from a cq state source.
    pub fn takes_state(self) -> bool {
        !matches!(self, Suite::Audenaert | Suite::ChainRules)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::InvalidArgument(format!("unknown suite `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Where instance states come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSource {
    /// A single state file used for every instance.
    File(PathBuf),
    /// A generator recipe, seeded per instance. Accepts the spec string
    /// (`"random-cq:4:2"`) as well as the tagged object.
    Generator(#[serde(deserialize_with = "spec_string_or_object")] StateSpec),
}

fn spec_string_or_object<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<StateSpec, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Text(String),
        Object(StateSpec),
    }
    match Repr::deserialize(d)? {
        Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        Repr::Object(spec) => Ok(spec),
    }
}

/// Everything a suite run depends on. Unset options fall back to the
/// suite's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    pub seed: u64,
    pub instances: Option<usize>,
    pub state: Option<StateSource>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub epsp1: Option<f64>,
    /// Syndrome bits for suites that fix the code rate.
    pub m: Option<u32>,
    /// Hash family; each suite has its own default.
    pub hash: Option<HashKind>,
    /// Averaging mode string, e.g. `exhaustive` or `mc:2000:7`.
    pub mode: Option<String>,
    pub json_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(suite: Suite) -> Self {
        ExperimentConfig {
            suite: suite.name().to_string(),
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_instances(mut self, n: usize) -> Self {
        self.instances = Some(n);
        self
    }

    pub fn with_state(mut self, source: StateSource) -> Self {
        self.state = Some(source);
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Replace the seed with `$ONESHOT_SEED` when it is set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{SEED_ENV}=`{v}` is not a u64")))?;
        }
        Ok(())
    }

    pub fn suite(&self) -> Result<Suite> {
        self.suite.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let suite = self.suite()?;
        for (name, v) in [("eps1", self.eps1), ("epsp1", self.epsp1)] {
            if let Some(e) = v {
                if !(0.0..1.0).contains(&e) {
                    return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1), got {e}")));
                }
            }
        }
        if let Some(e) = self.eps2 {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidArgument(format!("eps2 must lie in (0, 1), got {e}")));
            }
        }
        if let Some(mode) = &self.mode {
            mode.parse::<AveragingMode>()?;
        }
        if self.instances == Some(0) {
            return Err(Error::InvalidArgument("instances must be >= 1".into()));
        }
        match &self.state {
            Some(_) if !suite.takes_state() => Err(Error::InvalidArgument(format!(
                "suite `{suite}` generates its own instances and takes no state"
            ))),
            Some(StateSource::File(p)) if !p.is_file() => {
                Err(Error::InvalidArgument(format!("state file {} does not exist", p.display())))
            }
            _ => Ok(()),
        }
    }

    pub fn instance_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }

    /// Averaging mode: the configured one, else `auto` with 2000 samples
    /// seeded by `seed`.
    pub fn averaging(&self, seed: u64) -> Result<AveragingMode> {
        match &self.mode {
            Some(m) => m.parse(),
            None => Ok(AveragingMode::Auto { samples: 2000, seed }),
        }
    }

    /// State for instance `i`: from the configured source, else from the
    /// suite's default recipe.
    pub(crate) fn instance_state(&self, i: usize, default: impl Fn(u64) -> StateSpec) -> Result<CqState> {
        let seed = self.instance_seed(i);
        match &self.state {
            Some(StateSource::File(p)) => io::read_state(p)?.cq(),
            Some(StateSource::Generator(spec)) => gen_state(spec, seed),
            None => gen_state(&default(seed), seed),
        }
    }
}

/// Run `f` on instances `0..n` in parallel and collect the records in
/// instance order, stamping instance index, seed and runtime.
pub(crate) fn over_instances(
    cfg: &ExperimentConfig,
    n: usize,
    f: impl Fn(usize, u64) -> Result<Vec<Record>> + Sync,
) -> Result<Vec<Record>> {
    let per: Vec<Vec<Record>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.instance_seed(i);
            let start = Instant::now();
            let mut recs = f(i, seed)?;
            let share = start.elapsed().as_secs_f64() / recs.len().max(1) as f64;
            for r in &mut recs {
                r.instance = i;
                r.seed = seed;
                r.runtime = share;
            }
            Ok(recs)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Run the suite named in `config`.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport> {
    config.validate()?;
    let suite = config.suite()?;
    let records = match suite {
        Suite::Metrics => suites::metrics(config)?,
        Suite::Entropy => {
            let mut r = suites::duality(config)?;
            r.extend(suites::smoothing(config)?);
            r
        }
        Suite::PgmBound => {
            let mut r = suites::pgm_average(config)?;
            r.extend(suites::unraveling(config)?);
            r
        }
        Suite::Audenaert => suites::audenaert(config)?,
        Suite::Compression => suites::compression(config)?,
        Suite::Distillation => suites::distillation(config)?,
        Suite::PrivacyAmplification => suites::privacy_amplification(config)?,
        Suite::CqSmoothing => suites::cq_smoothing(config)?,
        Suite::ChainRules => suites::chain_rules(config)?,
        Suite::AepTrend => suites::aep_trend(config)?,
    };
    Ok(SuiteReport::new(suite.name(), config.clone(), records))
}

/// Run a suite and write the configured outputs.
pub fn run_and_emit(config: &ExperimentConfig) -> Result<SuiteReport> {
    let report = run_suite(config)?;
    if let Some(p) = &config.json_out {
        report.emit(p, ReportFormat::Json)?;
    }
    if let Some(p) = &config.csv_out {
        report.emit(p, ReportFormat::Csv)?;
    }
    Ok(report)
}
