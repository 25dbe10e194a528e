use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use oneshot_cqsw::coding::{self, CompressOptions};
use oneshot_cqsw::distill::{self, DistillOptions, DistillParams, Parties, PreprocessChannel};
use oneshot_cqsw::entropy;
use oneshot_cqsw::harness::{self, ExperimentConfig, StateSource, StateSpec};
use oneshot_cqsw::hashing::{AveragingMode, HashFamily, HashKind};
use oneshot_cqsw::quantum::io;
use oneshot_cqsw::Result;

#[derive(Parser)]
#[command(name = "oneshot-cqsw", version, about = "One-shot compression with quantum side information and key distillation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum EntropyKind {
    Hmin,
    Hmax,
}

#[derive(Subcommand)]
enum Cmd {
    /// Smooth conditional min- or max-entropy of a state file.
    Entropy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        kind: EntropyKind,
        /// Conditioning systems (repeat or comma-separate).
        #[arg(long, value_delimiter = ',', required = true)]
        condition: Vec<String>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Smooth the max-entropy over all states, ignoring classical structure.
        #[arg(long)]
        unrestricted: bool,
    },
    /// Hash-and-PGM compression of a cq state.
    Compress {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        epsilon1: f64,
        #[arg(long)]
        epsilon2: f64,
        /// Override the syndrome length.
        #[arg(long)]
        m: Option<u32>,
        /// exhaustive, auto[:N:seed] or mc:N:seed
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value = "toeplitz")]
        hash: HashKind,
        #[arg(long, env = "ONESHOT_SEED", default_value_t = 0)]
        seed: u64,
        /// Write the per-function error table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Privacy amplification of X against all side systems.
    Pa {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        /// Override the key length.
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value = "toeplitz")]
        hash: HashKind,
        #[arg(long, env = "ONESHOT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Compression followed by privacy amplification on an XBE state.
    Distill {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        #[arg(long)]
        epsp1: f64,
        /// JSON list of preprocessing channels; identity when absent.
        #[arg(long)]
        channels: Option<PathBuf>,
        /// Bob's side systems; default all labels not starting with `E`.
        #[arg(long, value_delimiter = ',')]
        bob: Vec<String>,
        /// Eve's side systems; default all labels starting with `E`.
        #[arg(long, value_delimiter = ',')]
        eve: Vec<String>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value = "toeplitz")]
        hash: HashKind,
        #[arg(long, env = "ONESHOT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Generate a seeded cq state file.
    GenState {
        /// e.g. random-cq:4:2, correlated:2, pure-pair:1.57, cqq-random:4:2:2, iid:3:random-cq:2:2
        #[arg(long)]
        spec: StateSpec,
        #[arg(long, env = "ONESHOT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        /// Suite name; overrides the one in --config.
        #[arg(long)]
        suite: Option<String>,
        /// Experiment configuration as JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "ONESHOT_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        instances: Option<usize>,
        /// Generator recipe for instance states.
        #[arg(long, conflicts_with = "state")]
        spec: Option<StateSpec>,
        /// State file used for every instance.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        eps1: Option<f64>,
        #[arg(long)]
        eps2: Option<f64>,
        #[arg(long)]
        epsp1: Option<f64>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        hash: Option<HashKind>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn mode_or_auto(mode: Option<String>, seed: u64) -> Result<AveragingMode> {
    match mode {
        Some(m) => m.parse(),
        None => Ok(AveragingMode::Auto { samples: 2000, seed }),
    }
}

/// Returns whether every check the command performs passed.
fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Entropy { state, kind, condition, epsilon, unrestricted } => {
            let rho = io::read_state(&state)?.density();
            let cond: Vec<&str> = condition.iter().map(String::as_str).collect();
            let r = match (kind, unrestricted) {
                (EntropyKind::Hmin, _) => entropy::hmin_smooth(&rho, &cond, epsilon)?,
                (EntropyKind::Hmax, false) => entropy::hmax_smooth(&rho, &cond, epsilon)?,
                (EntropyKind::Hmax, true) => entropy::hmax_smooth_unrestricted(&rho, &cond, epsilon)?,
            };
            print_json(&json!({
                "kind": match kind { EntropyKind::Hmin => "hmin", EntropyKind::Hmax => "hmax" },
                "condition": condition,
                "epsilon": r.epsilon,
                "value": r.value,
                "witness_value": r.witness_value,
                "distance": r.distance,
                "witness_trace": r.rho_bar_trace(),
                "gap": r.gap,
                "iterations": r.iterations,
            }))?;
            Ok(true)
        }
        Cmd::Compress { state, epsilon1, epsilon2, m, mode, hash, seed, csv } => {
            let psi = io::read_state(&state)?.cq()?;
            let opts = CompressOptions {
                eps1: epsilon1,
                eps2: epsilon2,
                m,
                kind: hash,
                mode: mode_or_auto(mode, seed)?,
            };
            let (res, avg) = coding::compress(&psi, &opts)?;
            print_json(&res)?;
            if let Some(path) = csv {
                let mut w = csv::Writer::from_path(&path).map_err(std::io::Error::other)?;
                let key = if avg.exhaustive { "index" } else { "seed" };
                w.write_record([key, "p_err"]).map_err(std::io::Error::other)?;
                for (k, p) in &avg.per_function {
                    w.write_record([k.to_string(), p.to_string()]).map_err(std::io::Error::other)?;
                }
                w.flush()?;
            }
            let margin = if avg.exhaustive { 0.0 } else { 3.0 * avg.std_error };
            Ok(res.mean_p_err <= epsilon1 + epsilon2 + margin)
        }
        Cmd::Pa { state, eps1, eps2, l, mode, hash, seed } => {
            let psi = io::read_state(&state)?.cq()?;
            let rate = distill::pa_rate(&psi, eps1, eps2)?;
            let l = l.unwrap_or(rate.l);
            let family = HashFamily::for_alphabet(hash, psi.alphabet_size(), l)?;
            let avg = distill::average_pa_distance(&psi, &family, &mode_or_auto(mode, seed)?)?;
            let best = avg.best_member(&family)?;
            print_json(&json!({
                "l": l,
                "rate_l": rate.l,
                "hmin_smooth": rate.hmin,
                "eps1": eps1,
                "eps2": eps2,
                "family": hash.to_string(),
                "mode": avg.mode,
                "mean_distance": avg.mean,
                "std_error": avg.std_error,
                "functions_evaluated": avg.count,
                "best_distance": avg.best_value,
                "best_hash": serde_json::from_str::<serde_json::Value>(&best.to_json()?)?,
            }))?;
            let margin = if avg.exhaustive { 0.0 } else { 3.0 * avg.std_error };
            Ok(avg.mean <= eps1 + eps2 + margin)
        }
        Cmd::Distill { state, eps1, eps2, epsp1, channels, bob, eve, mode, hash, seed } => {
            let psi = io::read_state(&state)?.cq()?;
            let (def_bob, def_eve) = harness::party_labels(&psi);
            let bob = if bob.is_empty() { def_bob } else { bob };
            let eve = if eve.is_empty() { def_eve } else { eve };
            let bob: Vec<&str> = bob.iter().map(String::as_str).collect();
            let eve: Vec<&str> = eve.iter().map(String::as_str).collect();
            let channels = match channels {
                Some(p) => PreprocessChannel::list_from_json(&std::fs::read_to_string(p)?)?,
                None => vec![PreprocessChannel::identity(psi.alphabet_size())],
            };
            let params = DistillParams { eps1, eps2, epsp1 };
            let opts = DistillOptions { kind: hash, mode: mode_or_auto(mode, seed)? };
            let reports = distill::distill_candidates(&psi, &Parties::new(&bob, &eve), params, &channels, &opts)?;
            print_json(&reports)?;
            Ok(reports.iter().all(|r| r.measured_distance <= r.bound_distance))
        }
        Cmd::GenState { spec, seed, out } => {
            let psi = harness::gen_state(&spec, seed)?;
            let body = io::cq_to_json(&psi)?;
            match out {
                Some(p) => std::fs::write(p, body + "\n")?,
                None => println!("{body}"),
            }
            Ok(true)
        }
        Cmd::Verify {
            suite, config, seed, instances, spec, state, eps1, eps2, epsp1, m, hash, mode, json, csv,
        } => {
            let mut cfg = match config {
                Some(p) => ExperimentConfig::from_json(&std::fs::read_to_string(p)?)?,
                None => ExperimentConfig::default(),
            };
            cfg.apply_seed_env()?;
            if let Some(s) = suite {
                cfg.suite = s;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(spec) = spec {
                cfg.state = Some(StateSource::Generator(spec));
            }
            if let Some(p) = state {
                cfg.state = Some(StateSource::File(p));
            }
            cfg.instances = instances.or(cfg.instances);
            cfg.eps1 = eps1.or(cfg.eps1);
            cfg.eps2 = eps2.or(cfg.eps2);
            cfg.epsp1 = epsp1.or(cfg.epsp1);
            cfg.m = m.or(cfg.m);
            cfg.hash = hash.or(cfg.hash);
            cfg.mode = mode.or(cfg.mode);
            cfg.json_out = json.or(cfg.json_out);
            cfg.csv_out = csv.or(cfg.csv_out);
            let report = harness::run_and_emit(&cfg)?;
            for r in report.failures() {
                println!(
                    "FAIL {} {} instance {} (seed {}): {} {} {} (tol {})",
                    r.anchor, r.check, r.instance, r.seed, r.lhs, r.relation, r.rhs, r.tolerance
                );
            }
            println!("{}: {}/{} checks passed", report.suite, report.passed, report.total);
            eprintln!("instance time {:.2}s", report.runtime());
            Ok(report.all_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
