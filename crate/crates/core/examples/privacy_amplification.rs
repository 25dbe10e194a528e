// Hash a partially secret string down to a key that an eavesdropper holding
// quantum side information cannot distinguish from uniform.

use oneshot_cqsw::distill::{average_pa_distance, pa_distance, pa_rate};
use oneshot_cqsw::harness::{gen_state, StateSpec};
use oneshot_cqsw::hashing::{AveragingMode, HashFamily, HashKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec: StateSpec = "iid:2:random-cq:16:2:uniform".parse()?;
    let psi = gen_state(&spec, 5)?;
    let rate = pa_rate(&psi, 0.0, 0.2)?;
    println!("Hmin(X|E) = {:.4}, extracting l = {} bits", rate.hmin, rate.l);

    let fam = HashFamily::for_alphabet(HashKind::Toeplitz, psi.alphabet_size(), rate.l)?;
    let avg = average_pa_distance(&psi, &fam, &AveragingMode::Exhaustive)?;
    println!("mean distance to ideal key {:.4} over all {} Toeplitz matrices", avg.mean, avg.count);

    // squeezing out more bits than the entropy allows
    let greedy = HashFamily::for_alphabet(HashKind::Toeplitz, psi.alphabet_size(), 6)?;
    let d = pa_distance(&psi, &greedy.sample(1))?;
    println!("a 6-bit key from one sampled hash is at distance {d:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
