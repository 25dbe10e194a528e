use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::{c, cr, kron};
use crate::quantum::random::{random_density, random_probs, random_pure};
use crate::quantum::{fidelity, generalized_fidelity};

fn layout(f: &[(&str, usize)]) -> SystemLayout {
    SystemLayout::new(f.iter().map(|&(l, d)| (l, d))).unwrap()
}

fn state(m: CMat, f: &[(&str, usize)]) -> DensityOperator {
    DensityOperator::new(m, layout(f)).unwrap()
}

fn bell() -> CMat {
    let mut m = CMat::zeros(4, 4);
    for &(r, cc) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(r, cc)] = cr(0.5);
    }
    m
}

fn diag(v: &[f64]) -> CMat {
    CMat::from_fn(v.len(), v.len(), |r, cc| if r == cc { cr(v[r]) } else { cr(0.0) })
}

/// `λ_max((1 ⊗ σ)^{-1/2} ρ (1 ⊗ σ)^{-1/2})` for full-rank `σ`.
fn lambda_for(rho: &CMat, da: usize, sigma: &CMat) -> f64 {
    let s = linalg::psd_pow(&kron(&CMat::identity(da, da), sigma), -0.5);
    linalg::eigh(&(&s * rho * &s)).max()
}

fn qubit(x: f64, y: f64, z: f64) -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = cr(0.5 * (1.0 + z));
    m[(1, 1)] = cr(0.5 * (1.0 - z));
    m[(0, 1)] = c(0.5 * x, -0.5 * y);
    m[(1, 0)] = c(0.5 * x, 0.5 * y);
    m
}

/// Bloch-ball grid: `min_σ λ_min(ρ, σ)` over interior points.
fn bloch_grid_hmin(rho: &CMat, steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    let h = 2.0 / steps as f64;
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let (x, y, z) = (-1.0 + h * i as f64, -1.0 + h * j as f64, -1.0 + h * k as f64);
                let r2 = x * x + y * y + z * z;
                if r2 >= 0.98 {
                    continue;
                }
                best = best.min(lambda_for(rho, 2, &qubit(x, y, z)));
            }
        }
    }
    -best.log2()
}

#[test]
fn product_with_uniform_qubit_has_unit_min_entropy() {
    let sigma = qubit(0.3, -0.1, 0.4);
    let rho = kron(&diag(&[0.5, 0.5]), &sigma);
    let r = hmin_cond(&state(rho, &[("A", 2), ("B", 2)]), &["B"]).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    assert!(r.gap <= 1e-7);
    assert!(r.witness_rho_bar.is_none());
}

#[test]
fn maximally_entangled_pair_and_grid_oracle() {
    let r = hmin_cond(&state(bell(), &[("A", 2), ("B", 2)]), &["B"]).unwrap();
    assert!((r.value + 1.0).abs() < 1e-6);
    let oracle = bloch_grid_hmin(&bell(), 10);
    assert!((oracle + 1.0).abs() < 1e-9, "grid oracle {oracle}");
}

#[test]
fn correlated_bits() {
    let rho = diag(&[0.5, 0.0, 0.0, 0.5]);
    let s = state(rho, &[("X", 2), ("B", 2)]);
    assert!(hmin_cond(&s, &["B"]).unwrap().value.abs() < 1e-6);
    assert!(hmax_cond(&s, &["B"]).unwrap().value.abs() < 1e-6);
}

#[test]
fn uniform_bit_without_side_information() {
    let s = state(diag(&[0.5, 0.5]), &[("X", 2)]);
    let r = hmax_cond(&s, &[]).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6);
    assert_eq!(r.witness_sigma.dim(), 1);
}

#[test]
fn random_qubit_pairs_match_bloch_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let rho = random_density(4, &mut rng);
        let v = hmin_cond(&state(rho.clone(), &[("A", 2), ("B", 2)]), &["B"]).unwrap().value;
        let grid = bloch_grid_hmin(&rho, 16);
        // the grid only evaluates feasible σ, so it bounds the optimum from below
        assert!(v >= grid - 1e-7, "{v} < {grid}");
        assert!(v - grid < 0.05, "{v} vs {grid}");
    }
}

#[test]
fn conditioning_on_independent_system_is_vacuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ra = random_density(3, &mut rng);
    let rb = random_density(2, &mut rng);
    let joint = state(kron(&ra, &rb), &[("A", 3), ("B", 2)]);
    let r = hmax_cond(&joint, &["B"]).unwrap();
    let tr_sqrt: f64 = linalg::eigvals(&ra).iter().map(|v| v.max(0.0).sqrt()).sum();
    assert!((r.value - 2.0 * tr_sqrt.log2()).abs() < 1e-6);
}

#[test]
fn duality_on_random_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dims in [[2, 2, 2], [2, 3, 2], [3, 2, 3]] {
        let v = random_pure(dims.iter().product(), &mut rng);
        let l = layout(&[("A", dims[0]), ("B", dims[1]), ("C", dims[2])]);
        let psi = crate::quantum::PureState::new(v, l).unwrap().density();
        let hmax = hmax_cond(&psi.trace_out(&["C"]).unwrap(), &["B"]).unwrap().value;
        let hmin = hmin_cond(&psi.trace_out(&["B"]).unwrap(), &["C"]).unwrap().value;
        assert!((hmax + hmin).abs() < 1e-6, "{hmax} {hmin}");
    }
}

#[test]
fn witnesses_reproduce_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rho = random_density(6, &mut rng);
    let s = state(rho.clone(), &[("A", 3), ("B", 2)]);
    let r = hmin_cond(&s, &["B"]).unwrap();
    let lam = lambda_for(&rho, 3, r.witness_sigma.matrix());
    assert!((-lam.log2() - r.value).abs() < 1e-7);

    let r = hmax_cond(&s, &["B"]).unwrap();
    let tau = kron(&CMat::identity(3, 3), r.witness_sigma.matrix());
    let f = crate::quantum::fidelity_mat(&rho, &tau);
    assert!((2.0 * f.log2() - r.value).abs() < 1e-7);
}

#[test]
fn smoothing_at_zero_and_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = state(random_density(4, &mut rng), &[("A", 2), ("B", 2)]);
    let h0 = hmin_cond(&s, &["B"]).unwrap().value;
    let g0 = hmax_cond(&s, &["B"]).unwrap().value;
    assert_eq!(hmin_smooth(&s, &["B"], 0.0).unwrap().value, h0);
    let mut prev = (h0, g0);
    for eps in [0.05, 0.1, 0.2] {
        let h = hmin_smooth(&s, &["B"], eps).unwrap();
        let g = hmax_smooth(&s, &["B"], eps).unwrap();
        assert!(h.value >= prev.0 - 1e-7);
        assert!(g.value <= prev.1 + 1e-7);
        for r in [&h, &g] {
            assert!(r.distance.unwrap() <= eps + 1e-7);
            assert!(r.rho_bar_trace().unwrap() <= 1.0 + 1e-7);
        }
        prev = (h.value, g.value);
    }
    assert!(hmin_smooth(&s, &["B"], 1.0).is_err());
}

#[test]
fn smoothing_away_small_eigenvalue() {
    let delta = 0.01;
    let eps = 0.2;
    let s = state(diag(&[1.0 - delta, delta]), &[("X", 2)]);
    let r = hmax_smooth(&s, &[], eps).unwrap();
    // oracle: ρ̄ = diag(a, b), Hmax = 2 log(√a + √b), F̄ = √((1−δ)a) + √(δ b)
    let target = (1.0 - eps * eps).sqrt();
    let mut best = f64::INFINITY;
    let n = 2000;
    for i in 0..=n {
        for j in 0..=n / 20 {
            let a = i as f64 / n as f64;
            let b = j as f64 / n as f64 * 0.2;
            if a + b > 1.0 || ((1.0 - delta) * a).sqrt() + (delta * b).sqrt() < target {
                continue;
            }
            best = best.min(2.0 * (a.sqrt() + b.sqrt()).log2());
        }
    }
    assert!(r.value <= best + 1e-6, "{} vs grid {best}", r.value);
    assert!(best - r.value < 5e-3, "{} vs grid {best}", r.value);
    assert!(r.value.abs() < 0.1);
    let bar = r.witness_rho_bar.unwrap();
    let f = generalized_fidelity(&s, &bar).unwrap();
    assert!(f >= target - 1e-7);
}

#[test]
fn cq_restricted_smoothing_matches_unrestricted() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..3 {
        let p = random_probs(2, &mut rng);
        let states = vec![random_density(2, &mut rng), random_density(2, &mut rng)];
        let cq = CqState::new(&p, states, layout(&[("B", 2)])).unwrap();
        let rho = cq.embed();
        let a = hmax_smooth(&rho, &["B"], 0.1).unwrap();
        let b = hmax_smooth_unrestricted(&rho, &["B"], 0.1).unwrap();
        assert!((a.value - b.value).abs() < 1e-5, "{} {}", a.value, b.value);
        assert!(a.witness_rho_bar.unwrap().is_classical_on("X").unwrap());
        assert!((a.witness_value.unwrap() - a.value).abs() < 1e-6);
    }
}

#[test]
fn smoothed_witness_is_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = state(random_density(4, &mut rng), &[("A", 2), ("B", 2)]);
    let r = hmax_smooth(&s, &["B"], 0.1).unwrap();
    assert!((r.witness_value.unwrap() - r.value).abs() < 1e-6);
    let h = hmin_smooth(&s, &["B"], 0.1).unwrap();
    let bar = h.witness_rho_bar.unwrap();
    let direct = hmin_cond(&bar, &["B"]).unwrap().value;
    assert!((direct - h.value).abs() < 1e-6);
}

#[test]
fn projection_fixes_cq_candidates_and_keeps_hmin() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let p = random_probs(2, &mut rng);
    let cq = CqState::new(
        &p,
        vec![random_density(2, &mut rng), random_density(2, &mut rng)],
        layout(&[("B", 2)]),
    )
    .unwrap();
    let pure = cq_purification(&cq).unwrap().density();
    let same = cq_smoothing_project(&pure, &cq).unwrap();
    assert!(linalg::max_abs_diff(same.matrix(), pure.matrix()) < 1e-12);

    let labels = pure.layout().labels();
    let noise = random_density(pure.dim(), &mut rng);
    let hat = DensityOperator::new(
        pure.matrix() * cr(0.9) + noise * cr(0.1),
        pure.layout().clone(),
    )
    .unwrap();
    let proj = cq_smoothing_project(&hat, &cq).unwrap();
    // coherences |xx⟩⟨yy| survive; the reduced state without X' is cq
    let reduced = proj.trace_out(&[labels[1]]).unwrap();
    assert!(reduced.is_classical_on("X").unwrap());
    let cond = [labels[1], labels[3]];
    let before = hmin_cond(&hat.trace_out(&[labels[2]]).unwrap(), &cond).unwrap().value;
    let after = hmin_cond(&proj.trace_out(&[labels[2]]).unwrap(), &cond).unwrap().value;
    assert!(after >= before - 1e-8);
    assert!(fidelity(&pure, &proj).unwrap() >= fidelity(&pure, &hat).unwrap() - 1e-9);
}

#[test]
fn chain_rules_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    // classical C with random conditional states on A ⊗ B
    let blocks = [random_density(4, &mut rng), random_density(4, &mut rng)];
    let p = random_probs(2, &mut rng);
    let mut m = CMat::zeros(8, 8);
    for (ci, b) in blocks.iter().enumerate() {
        let proj = diag(&[(ci == 0) as u8 as f64, (ci == 1) as u8 as f64]);
        m += kron(&(b * cr(p[ci])), &proj);
    }
    let s = state(m, &[("A", 2), ("B", 2), ("C", 2)]);
    let cm = chain_max(&s, &["A"], &["B"], "C").unwrap();
    assert!(cm.holds(1e-8), "{cm:?}");
    assert!(matches!(chain_max(&s, &["A"], &["C"], "B"), Err(Error::NotClassical(_))));

    let reordered = s.reorder(&["A", "C", "B"]).unwrap();
    let cn = chain_min(&reordered, &["A"], "C", &["B"], 0.05).unwrap();
    assert!(cn.holds(1e-8), "{cn:?}");
}

#[test]
fn copy_of_classical_register() {
    let p = [0.2, 0.3, 0.5];
    let mut m = CMat::zeros(18, 18);
    for x in 0..3 {
        let i = x * 6 + x * 2; // |x⟩_A |x⟩_C |0⟩_B with B a qubit
        m[(i, i)] = cr(p[x] * 0.5);
        m[(i + 1, i + 1)] = cr(p[x] * 0.5);
    }
    let s = state(m, &[("A", 3), ("C", 3), ("B", 2)]);
    let cm = chain_max(&s, &["A"], &["B"], "C").unwrap();
    assert!(cm.lhs.abs() < 1e-6);
    assert!(cm.holds(1e-8));
}

#[test]
fn wide_eigenvalue_spread_is_rejected() {
    assert!(check_conditioning(&diag(&[1.0, 0.5])).is_ok());
    assert!(matches!(
        check_conditioning(&diag(&[1e3, 2e-10])),
        Err(Error::IllConditioned(_))
    ));
}
