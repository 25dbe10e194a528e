//! Seeded random states: Wishart-style density operators (`G G† / Tr`),
//! Haar-like pure vectors and Dirichlet-ish probability vectors.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{c, CMat, CVec};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// `d × k` matrix of i.i.d. complex standard Gaussians.
pub fn ginibre<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> CMat {
    CMat::from_fn(d, k, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Full-rank random density matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    random_density_rank(d, d, rng)
}

/// Random density matrix of rank at most `k`.
pub fn random_density_rank<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> CMat {
    let g = ginibre(d, k.max(1), rng);
    let w = &g * g.adjoint();
    let tr: f64 = w.diagonal().iter().map(|z| z.re).sum();
    crate::linalg::hermitize(&(w / c(tr, 0.0)))
}

/// Random PSD matrix with unit-scale entries (not normalized).
pub fn random_psd<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> CMat {
    let g = ginibre(d, k.max(1), rng);
    crate::linalg::hermitize(&(&g * g.adjoint() / c(d as f64, 0.0)))
}

pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(d, |_, _| c(gaussian(rng), gaussian(rng)));
    let n = v.norm();
    v / c(n, 0.0)
}

/// Uniform point on the probability simplex.
pub fn random_probs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}
