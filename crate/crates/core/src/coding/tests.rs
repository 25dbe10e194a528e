use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::c;
use crate::quantum::random::{random_density, random_probs, random_psd};
use crate::quantum::SystemLayout;

fn side(d: usize) -> SystemLayout {
    SystemLayout::single("B", d).unwrap()
}

fn basis(d: usize, i: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, i)] = cr(1.0);
    m
}

fn correlated_bit() -> CqState {
    CqState::new(&[0.5, 0.5], vec![basis(2, 0), basis(2, 1)], side(2)).unwrap()
}

fn uniform_without_side(n: usize) -> CqState {
    let p = vec![1.0 / n as f64; n];
    CqState::new(&p, vec![CMat::identity(1, 1); n], side(1)).unwrap()
}

fn constant_hash(n: u32) -> HashFunction {
    HashFamily::new(HashKind::Toeplitz, n, 0).unwrap().member(0).unwrap()
}

fn pure(theta: f64) -> CMat {
    let v = nalgebra::DVector::from_vec(vec![cr(theta.cos()), cr(theta.sin())]);
    &v * v.adjoint()
}

#[test]
fn test_operators_in_limiting_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = random_probs(3, &mut rng);
    let states: Vec<CMat> = (0..3).map(|_| random_density(2, &mut rng)).collect();
    let psi = CqState::new(&p, states, side(2)).unwrap();
    for (pi, b) in build_test_operator(&psi, 60).iter().zip(psi.full_blocks()) {
        assert!(linalg::max_abs_diff(pi, &linalg::support_projector(&b)) < 1e-9);
    }

    let mixed = CqState::new(&[0.25; 4], vec![CMat::identity(2, 2) * cr(0.5); 4], side(2)).unwrap();
    for pi in build_test_operator(&mixed, 0) {
        assert!(pi.norm() < 1e-12);
    }

    for m in 2..6 {
        let ops = build_test_operator(&correlated_bit(), m);
        for (x, pi) in ops.iter().enumerate() {
            assert!(linalg::max_abs_diff(pi, &basis(2, x)) < 1e-12);
        }
    }
    // at m = 1 the threshold equals the block weight and the strict positive part vanishes
    assert!(build_test_operator(&correlated_bit(), 1)[0].norm() < 1e-12);
}

#[test]
fn pgm_of_orthogonal_and_singleton_classes() {
    let ops = vec![basis(3, 0), basis(3, 1) + basis(3, 2)];
    let code = build_pgm_decoder(&ops, &constant_hash(1)).unwrap();
    for x in 0..2 {
        assert!(linalg::max_abs_diff(&code.povm_element(x, 0), &ops[x]) < 1e-12);
    }
    let id = HashFamily::new(HashKind::FullLinear, 1, 1).unwrap().member(1).unwrap();
    let half = vec![basis(2, 0) * cr(0.5), pure(0.3) * cr(0.7)];
    let code = build_pgm_decoder(&half, &id).unwrap();
    for x in 0..2 {
        let support = linalg::support_projector(&half[x]);
        assert!(linalg::max_abs_diff(&code.povm_element(x, x as u64), &support) < 1e-9);
        assert!(code.povm_element(x, 1 - x as u64).norm() == 0.0);
    }
    let (defect, min_abort) = code.completeness_defect();
    assert!(defect < COMPLETENESS_TOL && min_abort > -1e-9);
    assert!(linalg::max_abs_diff(&code.abort_element(7), &CMat::identity(2, 2)) == 0.0);
}

#[test]
fn error_probability_closed_forms() {
    // orthogonal conditional states, everything in one class
    let psi = correlated_bit();
    let code = build_pgm_decoder(&[basis(2, 0), basis(2, 1)], &constant_hash(1)).unwrap();
    assert!(code.error_probability(&psi).unwrap().abs() < 1e-12);

    // trivial side information, injective hash, Π_x = 1
    let psi = uniform_without_side(4);
    let id = HashFamily::new(HashKind::FullLinear, 2, 2).unwrap().member(0b1001).unwrap();
    let code = build_pgm_decoder(&vec![CMat::identity(1, 1); 4], &id).unwrap();
    assert!(code.error_probability(&psi).unwrap().abs() < 1e-12);

    // two equiprobable pure states: PGM = Helstrom, p_err = (1 − sin θ)/2
    for theta in [0.2, 0.7, 1.1, 1.5] {
        let psi = CqState::new(&[0.5, 0.5], vec![pure(0.0), pure(theta)], side(2)).unwrap();
        let code = build_pgm_decoder(&[pure(0.0), pure(theta)], &constant_hash(1)).unwrap();
        let p = code.error_probability(&psi).unwrap();
        // Gram-matrix oracle: success amplitude (G^{1/2})_{xx}
        let g = theta.cos();
        let a = ((1.0 + g).sqrt() + (1.0 - g).sqrt()) / 2.0;
        assert!((p - (1.0 - a * a)).abs() < 1e-10);
        assert!((p - (1.0 - theta.sin()) / 2.0).abs() < 1e-10);
        assert!((code.variational_error(&psi).unwrap() - p).abs() < 1e-10);
    }
}

#[test]
fn pgm_error_bound_terms() {
    let psi = correlated_bit();
    let ops = build_test_operator(&psi, 3);
    let b = pgm_error_bound(&psi, &ops, 3);
    assert!(b.first.abs() < 1e-12);
    let zero = vec![CMat::zeros(2, 2); 2];
    let b = pgm_error_bound(&psi, &zero, 3);
    assert!((b.total - 2.0).abs() < 1e-12);
}

#[test]
fn exhaustive_average_respects_pgm_error_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fam = HashFamily::new(HashKind::FullLinear, 2, 2).unwrap();
    for _ in 0..5 {
        let p = random_probs(4, &mut rng);
        let states = (0..4).map(|_| random_density(2, &mut rng)).collect();
        let psi = CqState::new(&p, states, side(2)).unwrap();
        let ops = build_test_operator(&psi, 2);
        let avg = average_error_over_family(&psi, &ops, &fam, &AveragingMode::Exhaustive).unwrap();
        assert_eq!(avg.count, 16);
        let bound = pgm_error_bound(&psi, &ops, 2);
        assert!(avg.mean <= bound.total, "{} > {}", avg.mean, bound.total);
        for (i, p) in &avg.per_function {
            let f = fam.member(*i).unwrap();
            let code = build_pgm_decoder(&ops, &f).unwrap();
            assert!((code.variational_error(&psi).unwrap() - p).abs() < 1e-10);
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exhaustive_on_binary_source() {
    let psi = CqState::new(&[0.3, 0.7], vec![pure(0.0), pure(0.9)], side(2)).unwrap();
    let ops = build_test_operator(&psi, 1);
    let fam = HashFamily::new(HashKind::Toeplitz, 1, 1).unwrap();
    let ex = average_error_over_family(&psi, &ops, &fam, &AveragingMode::Exhaustive).unwrap();
    let mc = average_error_over_family(
        &psi,
        &ops,
        &fam,
        &AveragingMode::MonteCarlo { samples: 4000, seed: 3 },
    )
    .unwrap();
    assert!((ex.mean - mc.mean).abs() <= 4.0 * mc.std_error + 1e-12);
    let again = average_error_over_family(
        &psi,
        &ops,
        &fam,
        &AveragingMode::MonteCarlo { samples: 4000, seed: 3 },
    )
    .unwrap();
    assert_eq!(again.mean, mc.mean);
    assert_eq!("mc:10:2".parse::<AveragingMode>().unwrap(), AveragingMode::MonteCarlo { samples: 10, seed: 2 });
    assert!("mc:x".parse::<AveragingMode>().is_err());
}

#[test]
fn direct_rate_examples() {
    let r = direct_rate(&correlated_bit(), 0.0, 0.1).unwrap();
    assert_eq!(r.m, (2.0 * 10f64.log2()).ceil() as u32 + 3);
    let r = direct_rate(&uniform_without_side(4), 0.0, 0.1).unwrap();
    assert_eq!(r.m, 2 + (2.0 * 10f64.log2()).ceil() as u32 + 3);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = random_probs(3, &mut rng);
    let states = (0..3).map(|_| random_density(2, &mut rng)).collect();
    let psi = CqState::new(&p, states, side(2)).unwrap();
    let mut prev = u32::MAX;
    for e in [0.0, 0.05, 0.1, 0.2] {
        let m = direct_rate(&psi, e, 0.1).unwrap().m;
        assert!(m <= prev);
        prev = m;
    }
}

#[test]
fn converse_examples() {
    assert!(converse_bound(&correlated_bit(), 0.0).unwrap().abs() < 1e-6);
    assert!((converse_bound(&uniform_without_side(4), 0.0).unwrap() - 2.0).abs() < 1e-6);
    let a = converse_bound(&uniform_without_side(4), 0.01).unwrap();
    let b = converse_bound(&uniform_without_side(4), 0.05).unwrap();
    assert!(b <= a + 1e-7 && a <= 2.0 + 1e-7);
    assert!(converse_bound(&correlated_bit(), 0.5).is_err());
}

#[test]
fn compress_meets_budget_on_small_source() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = random_probs(3, &mut rng);
    let states = (0..3).map(|_| random_density(2, &mut rng)).collect();
    let psi = CqState::new(&p, states, side(2)).unwrap();
    let (res, avg) = compress(&psi, &CompressOptions::new(0.1, 0.1)).unwrap();
    assert!(avg.exhaustive);
    assert!(res.mean_p_err <= 0.2, "{}", res.mean_p_err);
    assert!(res.m as f64 >= res.converse_bound.unwrap() - 1e-6);
    assert!(HashFunction::from_json(&res.best_hash).is_ok());
}

#[test]
fn audenaert_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = random_psd(3, 3, &mut rng);
    let eq = audenaert_check(&rho, &rho, 0.3).unwrap();
    assert!((eq.lhs - linalg::real_trace(&rho)).abs() < 1e-10);
    assert!((eq.rhs - eq.lhs).abs() < 1e-10);
    let orth = audenaert_check(&basis(2, 0), &basis(2, 1), 0.5).unwrap();
    assert!(orth.lhs.abs() < 1e-12 && orth.rhs.abs() < 1e-12);
    assert!(audenaert_check(&(-basis(2, 0)), &basis(2, 1), 0.5).is_err());
    assert!(audenaert_check(&basis(2, 0), &basis(2, 1), 1.5).is_err());
}

#[test]
fn unraveling_degenerate_cases() {
    let id = HashFamily::new(HashKind::FullLinear, 1, 1).unwrap().member(1).unwrap();
    let ops = vec![pure(0.4) * cr(0.8), pure(1.0)];
    assert!(unraveling_check(&ops, &id, 0, 0).unwrap().pass);
    let ortho = vec![basis(2, 0), basis(2, 1)];
    assert!(unraveling_check(&ortho, &constant_hash(1), 0, 1).unwrap().pass);
    assert!(unraveling_check(&ortho, &id, 1, 0).is_err());
}

fn random_contraction(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let a = random_psd(d, rng.random_range(1..=d), rng);
    let top = linalg::eigh(&a).max().max(1e-12);
    a * cr(rng.random_range(0.0..1.0) / top)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pgm_is_complete_and_unravels(seed in any::<u64>(), nx in 2usize..=4, d in 1usize..=3, hseed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops: Vec<CMat> = (0..nx).map(|_| random_contraction(d, &mut rng)).collect();
        let fam = HashFamily::for_alphabet(HashKind::Toeplitz, nx, 1).unwrap();
        let f = fam.sample(hseed);
        let code = build_pgm_decoder(&ops, &f).unwrap();
        let (defect, min_abort) = code.completeness_defect();
        prop_assert!(defect < COMPLETENESS_TOL);
        prop_assert!(min_abort > -1e-9);
        for x in 0..nx {
            let chk = unraveling_check(&ops, &f, f.eval(x as u64).unwrap(), x).unwrap();
            prop_assert!(chk.pass, "{:?}", chk);
        }
    }

    #[test]
    fn audenaert_holds(seed in any::<u64>(), d in 1usize..=6, s in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_psd(d, rng.random_range(1..=d), &mut rng);
        let sigma = random_psd(d, rng.random_range(1..=d), &mut rng) * c(0.5, 0.0);
        let chk = audenaert_check(&rho, &sigma, s).unwrap();
        prop_assert!(chk.holds(1e-9), "{:?}", chk);
    }
}
