// Linear hash families over GF(2): enumerate, sample, evaluate and check
// 2-universality exactly.

use oneshot_cqsw::hashing::{HashFamily, HashFunction, HashKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for kind in [HashKind::FullLinear, HashKind::Toeplitz] {
        let fam = HashFamily::new(kind, 3, 2)?;
        println!(
            "{kind}: {} members, max collision probability {:.4} (2^-m = 0.25)",
            fam.size().unwrap_or(0),
            fam.collision_probability()?
        );
    }

    let fam = HashFamily::for_alphabet(HashKind::Toeplitz, 12, 2)?;
    let f = fam.sample(42);
    let table: Vec<u64> = (0..12).map(|x| f.eval(x)).collect::<Result<_, _>>()?;
    println!("sampled member {} maps 0..12 to {table:?}", f.params_hex());

    let json = f.to_json()?;
    let g = HashFunction::from_json(&json)?;
    assert_eq!(g.eval(5)?, f.eval(5)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
