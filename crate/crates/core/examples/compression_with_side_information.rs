// Compress X to m syndrome bits so that a receiver holding B can recover
// it with a pretty good measurement, and compare against the rate bounds.

use oneshot_cqsw::coding::{compress, CompressOptions};
use oneshot_cqsw::harness::{gen_state, StateSpec};
use oneshot_cqsw::hashing::AveragingMode;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let psi = gen_state(&StateSpec::RandomCq { alphabet: 4, side_dim: 2, uniform: false }, 3)?;
    let mut opts = CompressOptions::new(0.1, 0.1);
    opts.mode = AveragingMode::Auto { samples: 500, seed: 3 };

    let (res, avg) = compress(&psi, &opts)?;
    println!("Hmax^0.1(X|B) = {:.4} -> m = {} bits", res.hmax_smooth, res.m);
    println!(
        "mean error {:.4} over {} functions (target {:.1}), best {:.4}",
        res.mean_p_err,
        avg.count,
        opts.eps1 + opts.eps2,
        res.best_p_err
    );
    println!("PGM error bound on the witness: {:.4}", res.pgm_error_bound);
    if let Some(lb) = res.converse_bound {
        println!("converse: any code with this error needs at least {lb:.4} bits");
    }

    // The one-shot rate carries 2 log(1/eps2) + 3 bits of overhead, which
    // dwarfs a 2-bit source. The code itself works far below that rate.
    opts.m = Some(2);
    let (plain, _) = compress(&psi, &opts)?;
    println!("at m = 2 the mean error is {:.4}", plain.mean_p_err);
    // at m = 1 the threshold is all of φ, every test operator vanishes and
    // the decoder always aborts
    opts.m = Some(1);
    let (tight, _) = compress(&psi, &opts)?;
    println!("at m = 1 the mean error is {:.4}", tight.mean_p_err);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
