//! Naive reference formulas and random instances shared by the integration
//! tests. Everything here is evaluated with plain powers and sums, no
//! log-domain tricks, so it stays independent of the library kernels.
#![allow(dead_code)]

use alphaleak_core::prob::index_labels;
use alphaleak_core::{Channel, Joint3, Pmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the simplex (normalized exponentials).
pub fn simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

pub fn random_pmf(rng: &mut impl Rng, n: usize) -> Pmf {
    Pmf::from_probs(&simplex(rng, n)).unwrap()
}

pub fn random_channel(rng: &mut impl Rng, nx: usize, ny: usize) -> Channel {
    let m: Vec<f64> = (0..nx).flat_map(|_| simplex(rng, ny)).collect();
    Channel::new(index_labels(nx), index_labels(ny), m).unwrap()
}

pub fn random_joint(rng: &mut impl Rng, nx: usize, ny: usize, nz: usize) -> Joint3 {
    Joint3::new(
        index_labels(nx),
        index_labels(ny),
        index_labels(nz),
        simplex(rng, nx * ny * nz),
    )
    .unwrap()
}

pub fn rows(ch: &Channel) -> Vec<Vec<f64>> {
    (0..ch.n_inputs()).map(|i| ch.row(i).to_vec()).collect()
}

/// Shannon MI in bits straight from the joint `p(x) W(y|x)`.
pub fn shannon_mi_bits(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let ny = w[0].len();
    let q: Vec<f64> = (0..ny)
        .map(|y| (0..p.len()).map(|x| p[x] * w[x][y]).sum())
        .collect();
    let mut mi = 0.0;
    for x in 0..p.len() {
        for y in 0..ny {
            let j = p[x] * w[x][y];
            if j > 0.0 {
                mi += j * (j / (p[x] * q[y])).log2();
            }
        }
    }
    mi
}

/// Sibson MI in bits for finite alpha != 1, direct powers.
pub fn sibson_bits(p: &[f64], w: &[Vec<f64>], a: f64) -> f64 {
    let ny = w[0].len();
    let s: f64 = (0..ny)
        .map(|y| {
            (0..p.len())
                .map(|x| p[x] * w[x][y].powf(a))
                .sum::<f64>()
                .powf(1.0 / a)
        })
        .sum();
    a / (a - 1.0) * s.log2()
}

/// Arimoto MI in bits for finite alpha != 1 via the single-ratio form
/// `α/(α-1) log Σ_y (Σ_x p^α W^α / Σ_x p^α)^(1/α)`.
pub fn arimoto_ratio_bits(p: &[f64], w: &[Vec<f64>], a: f64) -> f64 {
    let ny = w[0].len();
    let norm: f64 = p.iter().map(|v| v.powf(a)).sum();
    let s: f64 = (0..ny)
        .map(|y| {
            ((0..p.len())
                .map(|x| p[x].powf(a) * w[x][y].powf(a))
                .sum::<f64>()
                / norm)
                .powf(1.0 / a)
        })
        .sum();
    a / (a - 1.0) * s.log2()
}

pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// BSC side-information joint: X uniform, Y = BSC(p)(X), Z = BSC(q)(X).
pub fn bsc_markov_joint(p: f64, q: f64) -> Joint3 {
    let mut data = vec![0.0; 8];
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let wy = if x == y { 1.0 - p } else { p };
                let wz = if x == z { 1.0 - q } else { q };
                data[(x * 2 + y) * 2 + z] = 0.5 * wy * wz;
            }
        }
    }
    Joint3::new(index_labels(2), index_labels(2), index_labels(2), data).unwrap()
}

/// XOR side-information joint: X uniform, Z ~ Ber(p) independent, Y = X xor Z.
pub fn xor_side_information_joint(p: f64) -> Joint3 {
    let mut data = vec![0.0; 8];
    for x in 0..2 {
        for z in 0..2 {
            let y = x ^ z;
            data[(x * 2 + y) * 2 + z] = 0.5 * if z == 1 { p } else { 1.0 - p };
        }
    }
    Joint3::new(index_labels(2), index_labels(2), index_labels(2), data).unwrap()
}

/// Closed-form maximal alpha-leakage of a BSC(p) with uniform input, bits.
pub fn bsc_leakage_bits(p: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        1.0 - h2(p)
    } else if alpha.is_infinite() {
        (2.0 * (1.0 - p)).log2()
    } else {
        1.0 + (p.powf(alpha) + (1.0 - p).powf(alpha)).log2() / (alpha - 1.0)
    }
}
