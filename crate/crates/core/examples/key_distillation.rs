// One-way key distillation on an XBE state: Alice compresses X for Bob,
// then both hash the agreed string against Eve.

use oneshot_cqsw::distill::{distill_candidates, secr_upper, DistillOptions, DistillParams, Parties, PreprocessChannel};
use oneshot_cqsw::harness::{gen_state, StateSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let psi = gen_state(&StateSpec::CqqRandom { alphabet: 4, dim_b: 2, dim_e: 2, uniform: true }, 9)?;
    let parties = Parties::new(&["B"], &["E"]);
    let params = DistillParams { eps1: 0.05, eps2: 0.1, epsp1: 0.05 };
    let channels = vec![
        PreprocessChannel::identity(psi.alphabet_size()),
        PreprocessChannel::noisy(psi.alphabet_size(), 0.1)?,
    ];

    let reports = distill_candidates(&psi, &parties, params, &channels, &DistillOptions::default())?;
    // At this size the 4 log(1/eps2) + 3 overhead exceeds the entropy gap,
    // so the guaranteed key length is zero.
    for r in &reports {
        println!(
            "{:>10}: l = {}, distance {:.4} <= {:.2}, lower bound {:.3}",
            r.channel, r.key_length, r.measured_distance, r.bound_distance, r.lower_bound
        );
    }
    let upper = secr_upper(&psi, &parties, 0.3, &channels)?;
    println!("no one-way protocol over these channels beats {upper:.3} bits");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
