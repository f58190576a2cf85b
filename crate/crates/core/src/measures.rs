//! Rényi entropy, Arimoto conditional entropy, and Sibson / Arimoto mutual
//! information, including their conditional variants.
//!
//! Finite orders are evaluated in the log domain: every inner sum of the
//! form `(Σ_x P(x) W(y|x)^α)^(1/α)` goes through a max-extracted
//! log-sum-exp, so orders up to `1e4` neither overflow nor underflow.
//! `α = 1` and `α = ∞` use the exact continuous extensions. Terms with a
//! zero probability are skipped (`0 log 0 = 0`, `0^α = 0`).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{ln, ln0, log_sum_exp, plogp_neg};
use crate::prob::{AlphaOrder, Channel, Joint2, Joint3, LogBase, Pmf};

/// A computed information quantity with the order and unit it was computed
/// for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub alpha: AlphaOrder,
    pub base: LogBase,
}

impl MeasureValue {
    pub(crate) fn from_nats(nats: f64, alpha: AlphaOrder, base: LogBase) -> Self {
        MeasureValue {
            value: base.from_nats(nats),
            alpha,
            base,
        }
    }

    /// The value converted to nats.
    pub fn nats(&self) -> f64 {
        self.base.to_nats(self.value)
    }

    pub fn bits(&self) -> f64 {
        LogBase::Bits.from_nats(self.nats())
    }
}

/// Input weights and channel rows restricted to the support of the input.
pub(crate) struct Supported<'a> {
    pub(crate) labels: Vec<&'a str>,
    pub(crate) weights: Vec<f64>,
    pub(crate) rows: Vec<&'a [f64]>,
}

pub(crate) fn supported<'a>(px: &'a Pmf, ch: &'a Channel) -> Result<Supported<'a>> {
    let map = ch.align_to(px)?;
    let mut s = Supported {
        labels: Vec::new(),
        weights: Vec::new(),
        rows: Vec::new(),
    };
    for (i, row) in map.iter().enumerate() {
        let p = px.probs()[i];
        if p > 0.0 {
            let r = row.expect("aligned rows cover the support");
            s.labels.push(&px.labels()[i]);
            s.weights.push(p);
            s.rows.push(ch.row(r));
        }
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// nats kernels

pub(crate) fn renyi_nats(p: &[f64], alpha: AlphaOrder) -> f64 {
    match alpha {
        AlphaOrder::One => p.iter().map(|&v| plogp_neg(v)).sum(),
        AlphaOrder::Infinity => -ln(p.iter().copied().fold(0.0, f64::max)),
        AlphaOrder::Finite(a) => {
            let lse = log_sum_exp(p.iter().filter(|&&v| v > 0.0).map(|&v| a * ln(v)));
            lse / (1.0 - a)
        }
    }
}

/// Shannon mutual information of the input `weights` through `rows`.
pub(crate) fn shannon_mi_nats(weights: &[f64], rows: &[&[f64]]) -> f64 {
    let ny = rows.first().map_or(0, |r| r.len());
    let mut q = alloc::vec![0.0; ny];
    for (&p, row) in weights.iter().zip(rows) {
        for (acc, &w) in q.iter_mut().zip(row.iter()) {
            *acc += p * w;
        }
    }
    let mut mi = 0.0;
    for (&p, row) in weights.iter().zip(rows) {
        if p == 0.0 {
            continue;
        }
        for (&w, &qy) in row.iter().zip(&q) {
            if w > 0.0 {
                mi += p * w * ln(w / qy);
            }
        }
    }
    mi
}

/// `ln S_y = ln Σ_x p_x W(y|x)^α` for every output `y`.
pub(crate) fn log_tilted_sums(weights: &[f64], log_rows: &[Vec<f64>], a: f64, out: &mut [f64]) {
    for (y, slot) in out.iter_mut().enumerate() {
        *slot = log_sum_exp(
            weights
                .iter()
                .zip(log_rows)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, lr)| ln(p) + a * lr[y]),
        );
    }
}

pub(crate) fn log_rows(rows: &[&[f64]]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|&w| ln0(w)).collect())
        .collect()
}

/// Sibson MI for an input supported on `weights` (no zero-mass entries
/// required) through `rows`.
pub(crate) fn sibson_nats(weights: &[f64], rows: &[&[f64]], alpha: AlphaOrder) -> f64 {
    match alpha {
        AlphaOrder::One => shannon_mi_nats(weights, rows),
        AlphaOrder::Infinity => {
            let ny = rows.first().map_or(0, |r| r.len());
            let s: f64 = (0..ny)
                .map(|y| {
                    weights
                        .iter()
                        .zip(rows)
                        .filter(|(&p, _)| p > 0.0)
                        .map(|(_, r)| r[y])
                        .fold(0.0, f64::max)
                })
                .sum();
            ln(s)
        }
        AlphaOrder::Finite(a) => {
            let lr = log_rows(rows);
            let ny = rows.first().map_or(0, |r| r.len());
            let mut ls = alloc::vec![0.0; ny];
            log_tilted_sums(weights, &lr, a, &mut ls);
            let total = log_sum_exp(ls.iter().map(|&s| s / a));
            a / (a - 1.0) * total
        }
    }
}

/// Arimoto conditional entropy `H_α(A | C)` of a dense joint `joint[a * nc + c]`.
pub(crate) fn arimoto_cond_entropy_dense(
    joint: &[f64],
    na: usize,
    nc: usize,
    alpha: AlphaOrder,
) -> f64 {
    debug_assert_eq!(joint.len(), na * nc);
    let col = |c: usize| (0..na).map(move |a| joint[a * nc + c]);
    match alpha {
        AlphaOrder::One => {
            let mut h = 0.0;
            for c in 0..nc {
                let pc: f64 = col(c).sum();
                for v in col(c) {
                    if v > 0.0 {
                        h -= v * ln(v / pc);
                    }
                }
            }
            h
        }
        AlphaOrder::Infinity => {
            let s: f64 = (0..nc).map(|c| col(c).fold(0.0, f64::max)).sum();
            -ln(s)
        }
        AlphaOrder::Finite(a) => {
            let total = log_sum_exp(
                (0..nc).map(|c| log_sum_exp(col(c).filter(|&v| v > 0.0).map(|v| a * ln(v))) / a),
            );
            a / (1.0 - a) * total
        }
    }
}

/// `H_α(X|Z) - H_α(X|Y,Z)` for a dense `(X, Y, Z)` tensor (X-major, then Y,
/// then Z), in nats. The tensor does not need to be a validated [`Joint3`];
/// this is the entry point for large explicit joints.
pub fn conditional_arimoto_mi_dense(
    data: &[f64],
    nx: usize,
    ny: usize,
    nz: usize,
    alpha: AlphaOrder,
) -> f64 {
    assert_eq!(data.len(), nx * ny * nz, "tensor shape");
    let mut xz = alloc::vec![0.0; nx * nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                xz[x * nz + z] += data[(x * ny + y) * nz + z];
            }
        }
    }
    // (y, z) pairs are contiguous within each x block
    arimoto_cond_entropy_dense(&xz, nx, nz, alpha)
        - arimoto_cond_entropy_dense(data, nx, ny * nz, alpha)
}

fn joint_of(px: &Pmf, ch: &Channel) -> Result<Joint2> {
    Joint2::from_input_and_channel(px, ch)
}

// ---------------------------------------------------------------------------
// public operations

/// Rényi entropy `H_α(X)`; Shannon entropy at `α = 1`, min-entropy at `α = ∞`.
pub fn renyi_entropy(p: &Pmf, alpha: AlphaOrder, base: LogBase) -> Result<MeasureValue> {
    let alpha = alpha.checked()?;
    Ok(MeasureValue::from_nats(
        renyi_nats(p.probs(), alpha),
        alpha,
        base,
    ))
}

/// Arimoto conditional entropy `H_α(X | Y)` of the joint `P_X · P_{Y|X}`.
pub fn arimoto_cond_entropy(
    px: &Pmf,
    ch: &Channel,
    alpha: AlphaOrder,
    base: LogBase,
) -> Result<MeasureValue> {
    let alpha = alpha.checked()?;
    let j = joint_of(px, ch)?;
    let h = arimoto_cond_entropy_dense(j.data(), px.len(), ch.n_outputs(), alpha);
    Ok(MeasureValue::from_nats(h, alpha, base))
}

/// Sibson mutual information of order α.
///
/// At `α = ∞` this is `log Σ_y max_{x ∈ supp(P_X)} W(y|x)`: symbols without
/// mass never enter the maximum.
pub fn sibson_mi(px: &Pmf, ch: &Channel, alpha: AlphaOrder, base: LogBase) -> Result<MeasureValue> {
    let alpha = alpha.checked()?;
    let s = supported(px, ch)?;
    Ok(MeasureValue::from_nats(
        sibson_nats(&s.weights, &s.rows, alpha),
        alpha,
        base,
    ))
}

/// Arimoto mutual information `H_α(X) - H_α(X | Y)`.
pub fn arimoto_mi(
    px: &Pmf,
    ch: &Channel,
    alpha: AlphaOrder,
    base: LogBase,
) -> Result<MeasureValue> {
    let alpha = alpha.checked()?;
    let j = joint_of(px, ch)?;
    let h_x = renyi_nats(px.probs(), alpha);
    let h_xy = arimoto_cond_entropy_dense(j.data(), px.len(), ch.n_outputs(), alpha);
    Ok(MeasureValue::from_nats(h_x - h_xy, alpha, base))
}

/// Sibson MI evaluated on `P_{X|Z=z}` and `P_{Y|X,Z=z}`.
pub fn event_conditional_sibson_mi(
    j: &Joint3,
    z: &str,
    alpha: AlphaOrder,
    base: LogBase,
) -> Result<MeasureValue> {
    let (px, ch) = j.condition_on_event(z)?.decompose();
    sibson_mi(&px, &ch, alpha, base)
}

/// Conditional Arimoto MI `H_α(X|Z) - H_α(X|Y,Z)`; the second term
/// conditions on the pair `(Y, Z)`.
pub fn conditional_arimoto_mi(
    j: &Joint3,
    alpha: AlphaOrder,
    base: LogBase,
) -> Result<MeasureValue> {
    let alpha = alpha.checked()?;
    let (nx, ny, nz) = j.dims();
    Ok(MeasureValue::from_nats(
        conditional_arimoto_mi_dense(j.data(), nx, ny, nz, alpha),
        alpha,
        base,
    ))
}

/// The α-loss of assigning probability `prob` to the true value, in nats at
/// `α = 1` (log-loss, `+inf` for `prob = 0`) and the probability of error
/// `1 - prob` at `α = ∞`.
pub fn alpha_loss(prob: f64, alpha: AlphaOrder) -> Result<f64> {
    let alpha = alpha.checked_leakage()?;
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::InvalidParameter(alloc::format!(
            "probability {prob} outside [0, 1]"
        )));
    }
    Ok(match alpha {
        AlphaOrder::One => {
            if prob == 0.0 {
                f64::INFINITY
            } else {
                -ln(prob)
            }
        }
        AlphaOrder::Infinity => 1.0 - prob,
        AlphaOrder::Finite(a) => a / (a - 1.0) * (1.0 - libm::pow(prob, (a - 1.0) / a)),
    })
}

/// Best expected α-gain `max_q E[q(X|C)^((α-1)/α)]` (or the expected
/// log-probability at α = 1) over estimators `q(·|c)`, for a dense joint
/// `joint[x * nc + c]`. The optimal estimator is built explicitly: the
/// α-tilted posterior for finite α, the posterior at α = 1, and a MAP guess
/// at α = ∞.
fn best_estimator_gain(joint: &[f64], nx: usize, nc: usize, alpha: AlphaOrder) -> f64 {
    let mut gain = 0.0;
    let mut w = alloc::vec![0.0; nx];
    for c in 0..nc {
        for (x, slot) in w.iter_mut().enumerate() {
            *slot = joint[x * nc + c];
        }
        let mass: f64 = w.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        match alpha {
            AlphaOrder::One => {
                for &v in &w {
                    if v > 0.0 {
                        gain += v * ln(v / mass);
                    }
                }
            }
            AlphaOrder::Infinity => {
                let guess = w
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (x, &v)| {
                        if v > best.1 {
                            (x, v)
                        } else {
                            best
                        }
                    })
                    .0;
                // E[1{X = guess}] under the deterministic estimator
                gain += w[guess];
            }
            AlphaOrder::Finite(a) => {
                let beta = (a - 1.0) / a;
                let norm = log_sum_exp(w.iter().filter(|&&v| v > 0.0).map(|&v| a * ln(v)));
                for &v in &w {
                    if v > 0.0 {
                        let log_q = a * ln(v) - norm;
                        gain += v * libm::exp(beta * log_q);
                    }
                }
            }
        }
    }
    gain
}

/// Conditional α-leakage from `X` to `Y` given `Z`, evaluated from its
/// operational definition: the ratio of the best expected α-gains of an
/// estimator that sees `(Y, Z)` and of one that sees only `Z`.
pub fn conditional_alpha_leakage_by_definition(
    j: &Joint3,
    alpha: AlphaOrder,
    base: LogBase,
) -> Result<MeasureValue> {
    let alpha = alpha.checked_leakage()?;
    let (nx, ny, nz) = j.dims();
    let mut xz = alloc::vec![0.0; nx * nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                xz[x * nz + z] += j.get(x, y, z);
            }
        }
    }
    let num = best_estimator_gain(j.data(), nx, ny * nz, alpha);
    let den = best_estimator_gain(&xz, nx, nz, alpha);
    let nats = match alpha {
        AlphaOrder::One => num - den,
        AlphaOrder::Infinity => ln(num / den),
        AlphaOrder::Finite(a) => a / (a - 1.0) * ln(num / den),
    };
    Ok(MeasureValue::from_nats(nats, alpha, base))
}
