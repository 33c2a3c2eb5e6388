//! Reference implementations used only by the tests. None of them share
//! code with the library.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::{PI, TAU};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Durand–Kerner iteration for a monic polynomial, coefficients descending
/// after the leading 1.
pub fn durand_kerner(coeffs: &[f64]) -> Vec<C> {
    let n = coeffs.len();
    let eval = |z: C| coeffs.iter().fold(C::new(1.0, 0.0), |acc, &c| acc * z + c);
    let bound = 1.0 + coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let seed = C::from_polar(0.4 * bound.min(10.0), 0.9);
    let mut z: Vec<C> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0_f64;
        for i in 0..n {
            let mut denom = C::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// `α₁α₂ + α₃α₄` and its two partners.
pub fn pairwise_products(r: &[C; 4]) -> [C; 3] {
    [
        r[0] * r[1] + r[2] * r[3],
        r[0] * r[2] + r[1] * r[3],
        r[0] * r[3] + r[1] * r[2],
    ]
}

/// Largest distance from each `a` to its nearest unused `b`, relative to
/// `max(1, |b|)`.
pub fn match_sets(a: &[C], b: &[C]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm() / y.norm().max(1.0)))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Four roots: two conjugate pairs, one pair and two reals, or four reals.
pub fn random_roots(rng: &mut StdRng) -> [C; 4] {
    let mut real = || C::new(rng.random_range(-5.0..5.0), 0.0);
    let mut out = [real(), real(), real(), real()];
    let pairs = (out[0].re.abs() * 1000.0) as usize % 3;
    for p in 0..pairs {
        let re = out[2 * p].re;
        let im = out[2 * p + 1].re.abs() + 0.05;
        out[2 * p] = C::new(re, im);
        out[2 * p + 1] = C::new(re, -im);
    }
    out
}

/// `2(1 + f²)²·[S − cos(θ + φ) − η cos 2θ]/4` at `θ = 2 arctan f`: the
/// right-hand side of `(df/ds)²` straight from the first integral.
pub fn substituted_rhs(eta: f64, phi: f64, s: f64, f: f64) -> f64 {
    let theta = 2.0 * f.atan();
    let w = 1.0 + f * f;
    2.0 * w * w * (s - (theta + phi).cos() - eta * (2.0 * theta).cos()) / 4.0
}

/// The classical `φ = 0` profiles written out directly.
pub fn csch_kink(eta: f64, sign: f64, s: f64) -> f64 {
    let k = (1.0 + 4.0 * eta).sqrt();
    2.0 * (sign * k / (k * s).sinh()).atan()
}

pub fn bubble(eta: f64, sign: f64, s: f64) -> f64 {
    let k = (4.0 * eta - 1.0).sqrt();
    2.0 * (sign * (k * s).cosh() / k).atan()
}

/// Largest `|θ₁ − θ₂|` modulo 2π. The reference formulas use plain
/// `arctan` and jump by 2π at their poles; lift continuity is tested
/// separately.
pub fn aligned_gap(theta: impl Fn(f64) -> f64, reference: impl Fn(f64) -> f64, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&s| {
            let d = (theta(s) - reference(s)).rem_euclid(TAU);
            d.min(TAU - d)
        })
        .fold(0.0, f64::max)
}

pub fn grid(half: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64)
        .collect()
}

/// V(θ; η, φ) written independently of the library.
pub fn potential(theta: f64, eta: f64, phi: f64) -> f64 {
    -(theta + phi).cos() - eta * (2.0 * theta).cos()
}

pub fn wrap(theta: f64) -> f64 {
    (theta + PI).rem_euclid(TAU) - PI
}
