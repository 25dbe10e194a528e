use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::cr;
use crate::quantum::random::{random_density, random_probs};

fn basis(d: usize, i: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, i)] = cr(1.0);
    m
}

fn layout(f: &[(&str, usize)]) -> SystemLayout {
    SystemLayout::new(f.iter().map(|&(l, d)| (l, d))).unwrap()
}

/// `X` uniform on `n` symbols with `E` holding a copy.
fn copied_to_e(n: usize) -> CqState {
    let p = vec![1.0 / n as f64; n];
    CqState::new(&p, (0..n).map(|x| basis(n, x)).collect(), layout(&[("E", n)])).unwrap()
}

fn identity_hash(n: u32) -> HashFunction {
    let idx = (0..n).fold(0u64, |acc, i| acc | 1 << (i * n + i));
    HashFamily::new(HashKind::FullLinear, n, n).unwrap().member(idx).unwrap()
}

#[test]
fn amplification_examples() {
    let uniform = CqState::new(&[0.25; 4], vec![CMat::identity(1, 1); 4], layout(&[("E", 1)])).unwrap();
    let f = HashFamily::new(HashKind::Toeplitz, 2, 1).unwrap().member(0b001).unwrap();
    assert!(pa_distance(&uniform, &f).unwrap().abs() < 1e-12);
    let out = apply_pa(&uniform, &f, 1).unwrap();
    assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
    assert!(apply_pa(&uniform, &f, 2).is_err());

    let copy = copied_to_e(2);
    let f = identity_hash(1);
    assert!((pa_distance(&copy, &f).unwrap() - 0.5).abs() < 1e-12);
    // explicit 4×4 trace distance against κ ⊗ ρ^E
    let rho = apply_pa(&copy, &f, 1).unwrap();
    let ideal = CMat::identity(4, 4) * cr(0.25);
    assert!((crate::quantum::trace_distance_mat(rho.matrix(), &ideal) - 0.5).abs() < 1e-12);

    let f0 = HashFamily::new(HashKind::Toeplitz, 1, 0).unwrap().member(0).unwrap();
    assert!(pa_distance(&copy, &f0).unwrap().abs() < 1e-12);
}

#[test]
fn key_quality_examples() {
    let l = layout(&[("KA", 2), ("KB", 2), ("E", 2)]);
    let half = CMat::identity(2, 2) * cr(0.5);
    let mut perfect = CMat::zeros(8, 8);
    let mut flipped = CMat::zeros(8, 8);
    let mut leaked = CMat::zeros(8, 8);
    for k in 0..2 {
        let same = (k * 2 + k) * 2;
        let other = (k * 2 + (1 - k)) * 2;
        perfect.view_mut((same, same), (2, 2)).copy_from(&(&half * cr(0.5)));
        flipped.view_mut((other, other), (2, 2)).copy_from(&(&half * cr(0.5)));
        leaked.view_mut((same, same), (2, 2)).copy_from(&(basis(2, k) * cr(0.5)));
    }
    let q = |m: CMat| key_quality(&DensityOperator::new(m, l.clone()).unwrap(), "KA", "KB").unwrap();
    assert!(q(perfect).abs() < 1e-12);
    // disjoint supports from the ideal key
    assert!((q(flipped) - 1.0).abs() < 1e-12);
    assert!(q(leaked) >= 0.5 - 1e-12);
}

#[test]
fn rate_examples() {
    let uniform = CqState::new(&[0.25; 4], vec![CMat::identity(1, 1); 4], layout(&[("E", 1)])).unwrap();
    assert_eq!(pa_rate(&uniform, 0.0, 0.5).unwrap().l, 1);
    let r = pa_rate(&copied_to_e(2), 0.0, 0.75).unwrap();
    assert!(r.hmin.abs() < 1e-6);
    assert_eq!(r.l, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_probs(4, &mut rng);
    let psi = CqState::new(&p, (0..4).map(|_| random_density(2, &mut rng)).collect(), layout(&[("E", 2)])).unwrap();
    let a = pa_rate(&psi, 0.0, 0.5).unwrap();
    let b = pa_rate(&psi, 0.2, 0.5).unwrap();
    assert!(b.l >= a.l && b.hmin >= a.hmin - 1e-7);
}

#[test]
fn leftover_hashing_on_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let states = (0..8).map(|_| random_density(2, &mut rng)).collect();
    let psi = CqState::new(&[0.125; 8], states, layout(&[("E", 2)])).unwrap();
    let eps2 = 0.7;
    let r = pa_rate(&psi, 0.0, eps2).unwrap();
    assert!(r.l >= 1);
    let fam = HashFamily::for_alphabet(HashKind::Toeplitz, 8, r.l).unwrap();
    let avg = average_pa_distance(&psi, &fam, &AveragingMode::Exhaustive).unwrap();
    assert!(avg.mean <= eps2, "{}", avg.mean);
}

fn correlated_pair() -> CqState {
    // X uniform bit, B a copy, E trivial
    CqState::new(
        &[0.5, 0.5],
        vec![basis(2, 0), basis(2, 1)],
        layout(&[("B", 2), ("E", 1)]),
    )
    .unwrap()
}

fn params() -> DistillParams {
    DistillParams {
        eps1: 0.05,
        eps2: 0.1,
        epsp1: 0.05,
    }
}

#[test]
fn distill_common_randomness() {
    let psi = correlated_pair();
    let parties = Parties::new(&["B"], &["E"]);
    let strong = DistillParams { eps1: 0.0, eps2: 0.75, epsp1: 0.0 };
    let rep = distill(&psi, &parties, strong, &PreprocessChannel::identity(2), &Default::default()).unwrap();
    assert_eq!(rep.key_length, 1);
    assert!(rep.measured_distance <= strong.budget());
    assert!(rep.key_length as f64 >= rep.lower_bound);

    let rep = distill(&psi, &parties, params(), &PreprocessChannel::identity(2), &Default::default()).unwrap();
    assert!(rep.measured_distance <= rep.bound_distance);
    assert!(rep.key_length as f64 >= rep.lower_bound);
    assert!((rep.bound_distance - 0.3).abs() < 1e-12);
}

#[test]
fn distill_degenerate_cases() {
    // Bob has nothing, Eve holds a copy
    let psi = CqState::new(
        &[0.5, 0.5],
        vec![basis(2, 0), basis(2, 1)],
        layout(&[("B", 1), ("E", 2)]),
    )
    .unwrap();
    let parties = Parties::new(&["B"], &["E"]);
    let rep = distill(&psi, &parties, params(), &PreprocessChannel::identity(2), &Default::default()).unwrap();
    assert_eq!(rep.key_length, 0);

    let rep = distill(&correlated_pair(), &Parties::new(&["B"], &["E"]), params(), &PreprocessChannel::constant(2), &Default::default()).unwrap();
    assert_eq!(rep.key_length, 0);
    assert!(rep.measured_distance.abs() < 1e-12);

    assert!(distill(&psi, &Parties::new(&["B"], &[]), params(), &PreprocessChannel::identity(2), &Default::default()).is_err());
}

#[test]
fn converse_values() {
    let psi = correlated_pair();
    let parties = Parties::new(&["B"], &["E"]);
    let id = [PreprocessChannel::identity(2)];
    assert!((secr_upper(&psi, &parties, 0.0, &id).unwrap() - 1.0).abs() < 1e-6);

    let leaked = CqState::new(
        &[0.5, 0.5],
        vec![basis(2, 0), basis(2, 1)],
        layout(&[("B", 1), ("E", 2)]),
    )
    .unwrap();
    assert!(secr_upper(&leaked, &parties, 0.0, &id).unwrap() <= 1e-6);
    let both = [PreprocessChannel::identity(2), PreprocessChannel::constant(2)];
    let a = secr_upper(&leaked, &parties, 0.0, &id).unwrap();
    let b = secr_upper(&leaked, &parties, 0.0, &both).unwrap();
    assert!(b >= a && b.abs() < 1e-6);
}

#[test]
fn block_quality_matches_dense_trace_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut ks = KeyState::new(2, 2, 2);
    let mut total = 0.0;
    let mut parts = vec![];
    for ka in 0..2 {
        for kb in 0..2 {
            for t in 0..2 {
                let w = random_density(2, &mut rng) * cr(if ka == kb { 1.0 } else { 0.1 });
                total += crate::linalg::real_trace(&w);
                parts.push((ka, kb, t, w));
            }
        }
    }
    for (ka, kb, t, w) in parts {
        ks.add(ka, kb, t, &(w * cr(1.0 / total)));
    }
    let dense = key_quality(&ks.to_density().unwrap(), "KA", "KB").unwrap();
    assert!((dense - ks.quality()).abs() < 1e-10);
}

#[test]
fn channels_validate_and_roundtrip() {
    assert!(PreprocessChannel::new("bad", 2, 1, vec![vec![0.5, 0.4]]).is_err());
    let ch = PreprocessChannel::noisy(3, 0.3).unwrap();
    let json = serde_json::to_string(&vec![ch.clone()]).unwrap();
    assert_eq!(PreprocessChannel::list_from_json(&json).unwrap(), vec![ch]);
}
