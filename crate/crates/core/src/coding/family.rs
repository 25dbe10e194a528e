use std::collections::HashMap;

use crate::error::Result;
use crate::hashing::{average_over_family, AveragingMode, FamilyAverage, HashFamily, HashFunction};
use crate::linalg::CMat;
use crate::quantum::CqState;

use super::build_pgm_decoder;

/// Class labels renumbered by first occurrence; two functions with the same
/// key induce the same decoder up to relabeling of syndromes.
fn partition_key(hash: &HashFunction, alphabet: usize) -> Vec<u16> {
    let mut seen: Vec<u64> = vec![];
    (0..alphabet)
        .map(|x| {
            let c = hash.eval_unchecked(x as u64);
            match seen.iter().position(|&s| s == c) {
                Some(i) => i as u16,
                None => {
                    seen.push(c);
                    (seen.len() - 1) as u16
                }
            }
        })
        .collect()
}

/// Mean error probability of the PGM codes built from `test_operators`
/// over the members of `family`, evaluated on `psi`.
pub fn average_error_over_family(
    psi: &CqState,
    test_operators: &[CMat],
    family: &HashFamily,
    mode: &AveragingMode,
) -> Result<FamilyAverage> {
    let mut memo: HashMap<Vec<u16>, f64> = HashMap::new();
    let alphabet = test_operators.len();
    average_over_family(family, mode, |f| {
        let key = partition_key(f, alphabet);
        if let Some(&p) = memo.get(&key) {
            return Ok(p);
        }
        let p = build_pgm_decoder(test_operators, f)?.error_probability(psi)?;
        memo.insert(key, p);
        Ok(p)
    })
}
