// Build a classical-quantum state, move between its cq and dense forms and
// compare states with the trace and purified distances.

use oneshot_cqsw::linalg::{c, cr, CMat};
use oneshot_cqsw::quantum::{
    fidelity, io, purified_distance, purify, trace_distance, CqState, DensityOperator, SystemLayout,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // X is a uniform bit; B holds |0⟩ or |+⟩.
    let zero = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
    let plus = CMat::from_row_slice(2, 2, &[cr(0.5), cr(0.5), cr(0.5), cr(0.5)]);
    let psi = CqState::new(&[0.5, 0.5], vec![zero, plus], SystemLayout::single("B", 2)?)?;

    let rho = psi.embed();
    println!("layout {:?}, dim {}", rho.layout().labels(), rho.dim());
    let rho_b = rho.partial_trace(&["B"])?;
    println!("marginal on B: {:.4}", rho_b.matrix());

    let tilted = CMat::from_row_slice(2, 2, &[cr(0.6), c(0.1, 0.2), c(0.1, -0.2), cr(0.4)]);
    let sigma_b = DensityOperator::new(tilted, SystemLayout::single("B", 2)?)?;
    println!(
        "D = {:.6}  F = {:.6}  P = {:.6}",
        trace_distance(&rho_b, &sigma_b)?,
        fidelity(&rho_b, &sigma_b)?,
        purified_distance(&rho_b, &sigma_b)?
    );

    let pure = purify(&rho_b)?;
    println!("purification lives on {:?}", pure.layout().labels());
    let back = pure.density().partial_trace(&["B"])?;
    println!("re-traced marginal differs by {:.2e}", trace_distance(&back, &rho_b)?);

    let json = io::cq_to_json(&psi)?;
    let again = io::cq_from_json(&json)?;
    assert_eq!(again.probs(), psi.probs());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
