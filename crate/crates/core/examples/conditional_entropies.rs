// Min- and max-entropies of small states, the duality between them on a
// pure tripartite state, and smoothing.

use oneshot_cqsw::entropy::{hmax_cond, hmax_smooth, hmax_smooth_cq, hmin_cond, hmin_smooth};
use oneshot_cqsw::harness::{gen_state, random_tripartite_pure, StateSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let abc = random_tripartite_pure(7)?;
    let ab = abc.partial_trace(&["A", "B"])?;
    let ac = abc.partial_trace(&["A", "C"])?;
    let hmax = hmax_cond(&ab, &["B"])?.value;
    let hmin = hmin_cond(&ac, &["C"])?.value;
    println!("Hmax(A|B) = {hmax:.8}, Hmin(A|C) = {hmin:.8}, sum {:.1e}", hmax + hmin);

    let psi = gen_state(&StateSpec::RandomCq { alphabet: 3, side_dim: 2, uniform: false }, 11)?;
    let rho = psi.embed();
    for eps in [0.0, 0.05, 0.1, 0.2] {
        let lo = hmin_smooth(&rho, &["B"], eps)?;
        let hi = hmax_smooth(&rho, &["B"], eps)?;
        println!("eps {eps:.2}: Hmin^eps(X|B) = {:.5}  Hmax^eps(X|B) = {:.5}", lo.value, hi.value);
    }

    // the optimal smoothed state and its distance from the original
    let r = hmax_smooth_cq(&psi, 0.1)?;
    println!("witness at purified distance {:.4}", r.distance.unwrap_or(0.0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
