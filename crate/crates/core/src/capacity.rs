//! Maximal α-leakage as a support-constrained channel capacity.
//!
//! For `1 < α < ∞` the Sibson objective
//! `f(p) = α/(α-1) · ln Σ_y (Σ_x p_x W(y|x)^α)^(1/α)` is concave in the input
//! `p`, so it is maximized with a pairwise Frank-Wolfe ascent: each step moves
//! mass from the worst supported vertex to the best vertex with an exact line
//! search on the 1-D concave restriction. The linearization (Frank-Wolfe) gap
//! `max_x ∂f/∂p_x - <∇f, p>` bounds the distance to the optimum and is
//! returned as the certificate.
//!
//! `α = 1` and `α = ∞` have closed forms. [`grid_oracle_capacity`] is an
//! exhaustive lattice search used to cross-check the solver.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, log_sum_exp};
use crate::measures::{
    arimoto_cond_entropy_dense, conditional_arimoto_mi, log_rows, log_tilted_sums, renyi_nats,
    shannon_mi_nats, sibson_nats, supported, MeasureValue,
};
use crate::prob::{AlphaOrder, Channel, Joint3, LogBase, Pmf};

/// Largest support accepted by the exhaustive grid oracle.
pub const ORACLE_MAX_SUPPORT: usize = 4;
/// Smallest lattice resolution accepted by the grid oracle.
pub const ORACLE_MIN_RESOLUTION: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Certificate tolerance, in the units of the requested [`LogBase`].
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iterations: 100_000,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Solver,
    ClosedForm,
    GridOracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Solver => "solver",
            Method::ClosedForm => "closed-form",
            Method::GridOracle => "grid-oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub value: MeasureValue,
    /// The maximizing input; zero outside the allowed support.
    pub argmax_input: Pmf,
    /// First-order optimality gap, in the same units as `value`.
    pub certificate_gap: f64,
    pub iterations: usize,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondCapacityResult {
    pub value: MeasureValue,
    /// The maximizing side-information value. `None` at `α = 1`, where the
    /// leakage is `I(X;Y|Z)` and has no per-event decomposition.
    pub argmax_z: Option<String>,
    /// Per-event capacities in `Z` label order, over the support of `Z`.
    pub per_z: Vec<(String, CapacityResult)>,
}

/// The Sibson objective `f(p)` of a fixed channel and finite order `α > 1`,
/// in nats, extended to any non-negative input vector.
#[derive(Debug, Clone)]
pub struct SibsonObjective {
    alpha: f64,
    log_rows: Vec<Vec<f64>>,
    ny: usize,
}

impl SibsonObjective {
    pub fn new(ch: &Channel, alpha: f64) -> Result<Self> {
        let rows: Vec<&[f64]> = (0..ch.n_inputs()).map(|i| ch.row(i)).collect();
        Self::from_rows(&rows, alpha)
    }

    pub(crate) fn from_rows(rows: &[&[f64]], alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::AlphaOutOfDomain {
                alpha,
                expected: "(1, inf)",
            });
        }
        Ok(SibsonObjective {
            alpha,
            log_rows: log_rows(rows),
            ny: rows.first().map_or(0, |r| r.len()),
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.log_rows.len()
    }

    fn log_sums(&self, p: &[f64], ls: &mut [f64]) -> f64 {
        log_tilted_sums(p, &self.log_rows, self.alpha, ls);
        log_sum_exp(ls.iter().map(|&s| s / self.alpha))
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        let mut ls = vec![0.0; self.ny];
        let lg = self.log_sums(p, &mut ls);
        self.alpha / (self.alpha - 1.0) * lg
    }

    /// Writes `(α-1) ∂f/∂p_x` into `out`. For a normalized `p` these scaled
    /// partials average to exactly one under `p`.
    fn scaled_gradient(&self, p: &[f64], ls: &mut [f64], out: &mut [f64]) {
        let a = self.alpha;
        let lg = self.log_sums(p, ls);
        for (x, slot) in out.iter_mut().enumerate() {
            let lr = &self.log_rows[x];
            let mut acc = 0.0;
            for y in 0..self.ny {
                if lr[y] == f64::NEG_INFINITY {
                    continue;
                }
                if ls[y] == f64::NEG_INFINITY {
                    // no supported mass reaches y: infinite marginal value
                    acc = f64::INFINITY;
                    break;
                }
                acc += exp(a * lr[y] + (1.0 / a - 1.0) * ls[y] - lg);
            }
            *slot = acc;
        }
    }

    /// `∂f/∂p_x` for every input.
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let mut ls = vec![0.0; self.ny];
        let mut g = vec![0.0; self.n_inputs()];
        self.scaled_gradient(p, &mut ls, &mut g);
        let s = 1.0 / (self.alpha - 1.0);
        g.iter_mut().for_each(|v| *v *= s);
        g
    }

    /// Frank-Wolfe gap at a normalized `p`, in nats.
    pub fn frank_wolfe_gap(&self, p: &[f64]) -> f64 {
        let mut ls = vec![0.0; self.ny];
        let mut h = vec![0.0; self.n_inputs()];
        self.scaled_gradient(p, &mut ls, &mut h);
        fw_gap(p, &h) / (self.alpha - 1.0)
    }
}

fn fw_gap(p: &[f64], h: &[f64]) -> f64 {
    let best = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let avg: f64 = p
        .iter()
        .zip(h)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &v)| w * v)
        .sum();
    (best - avg).max(0.0)
}

struct Solution {
    weights: Vec<f64>,
    value: f64,
    gap: f64,
    iterations: usize,
}

/// Pairwise Frank-Wolfe ascent for a finite `α > 1`; all quantities in nats.
fn pairwise_frank_wolfe(
    rows: &[&[f64]],
    alpha: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<Solution> {
    let obj = SibsonObjective::from_rows(rows, alpha)?;
    let n = rows.len();
    let scale = 1.0 / (alpha - 1.0);
    let mut p = vec![1.0 / n as f64; n];
    let mut ls = vec![0.0; obj.ny];
    let mut h = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut h_trial = vec![0.0; n];

    for it in 0..=max_iterations {
        obj.scaled_gradient(&p, &mut ls, &mut h);
        let gap = fw_gap(&p, &h) * scale;
        let toward = argmax(&h, |_| true);
        let away = argmin(&h, |x| p[x] > 0.0);
        if gap <= tol {
            return Ok(Solution {
                value: obj.value(&p),
                weights: p,
                gap,
                iterations: it,
            });
        }
        if it == max_iterations || toward == away {
            return Err(Error::NonConvergence {
                iterations: it,
                gap,
                tol,
            });
        }

        // φ'(t) ∝ h_toward(t) - h_away(t) along p + t (e_toward - e_away),
        // non-increasing in t by concavity.
        let limit = p[away];
        let mut slope_at = |t: f64| {
            trial.copy_from_slice(&p);
            trial[toward] += t;
            trial[away] -= t;
            if t == limit {
                trial[away] = 0.0;
            }
            obj.scaled_gradient(&trial, &mut ls, &mut h_trial);
            h_trial[toward] - h_trial[away]
        };
        let step = if slope_at(limit) >= 0.0 {
            limit
        } else {
            let (mut lo, mut hi) = (0.0, limit);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope_at(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        p[toward] += step;
        if step == limit {
            p[away] = 0.0;
        } else {
            p[away] -= step;
        }
    }
    unreachable!("loop returns on the final iteration")
}

fn argmax(v: &[f64], keep: impl Fn(usize) -> bool) -> usize {
    let mut best = usize::MAX;
    for (i, &x) in v.iter().enumerate() {
        if keep(i) && (best == usize::MAX || x > v[best]) {
            best = i;
        }
    }
    best
}

fn argmin(v: &[f64], keep: impl Fn(usize) -> bool) -> usize {
    let mut best = usize::MAX;
    for (i, &x) in v.iter().enumerate() {
        if keep(i) && (best == usize::MAX || x < v[best]) {
            best = i;
        }
    }
    best
}

/// Blahut-Arimoto iteration for the Shannon capacity of `rows`, in nats.
fn blahut_arimoto(rows: &[&[f64]], tol: f64, max_iterations: usize) -> Result<Solution> {
    let n = rows.len();
    let ny = rows.first().map_or(0, |r| r.len());
    let mut p = vec![1.0 / n as f64; n];
    let mut q = vec![0.0; ny];
    let mut d = vec![0.0; n];
    for it in 0..=max_iterations {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (&w, row) in p.iter().zip(rows) {
            for (acc, &r) in q.iter_mut().zip(row.iter()) {
                *acc += w * r;
            }
        }
        for (dx, row) in d.iter_mut().zip(rows) {
            *dx = row
                .iter()
                .zip(&q)
                .filter(|(&r, _)| r > 0.0)
                .map(|(&r, &qy)| r * ln(r / qy))
                .sum();
        }
        let mi: f64 = p.iter().zip(&d).map(|(&w, &dx)| w * dx).sum();
        let best = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = (best - mi).max(0.0);
        if gap <= tol {
            return Ok(Solution {
                weights: p,
                value: mi,
                gap,
                iterations: it,
            });
        }
        if it == max_iterations {
            return Err(Error::NonConvergence {
                iterations: it,
                gap,
                tol,
            });
        }
        let shift = best;
        let mut z = 0.0;
        for (w, &dx) in p.iter_mut().zip(&d) {
            *w *= exp(dx - shift);
            z += *w;
        }
        p.iter_mut().for_each(|w| *w /= z);
    }
    unreachable!("loop returns on the final iteration")
}

fn spread(px: &Pmf, support: &[&str], weights: &[f64]) -> Pmf {
    let probs = px
        .labels()
        .iter()
        .map(|l| {
            support
                .iter()
                .position(|s| s == l)
                .map_or(0.0, |i| weights[i])
        })
        .collect();
    Pmf::new(px.labels().to_vec(), probs).expect("solver weights form a distribution")
}

/// Maximal α-leakage from `X` to `Y` for `1 <= α <= ∞`.
///
/// `px` enters only through its support, except at `α = 1` where the value
/// is the Shannon MI at `px` itself. For finite `α > 1` the supremum of the
/// Sibson MI over inputs supported in `supp(px)` is computed iteratively and
/// certified to within `opts.tol`.
pub fn maximal_alpha_leakage(
    px: &Pmf,
    ch: &Channel,
    alpha: AlphaOrder,
    base: LogBase,
    opts: &SolverOptions,
) -> Result<CapacityResult> {
    let alpha = alpha.checked_leakage()?;
    opts.validate()?;
    let s = supported(px, ch)?;
    match alpha {
        AlphaOrder::One => Ok(CapacityResult {
            value: MeasureValue::from_nats(shannon_mi_nats(&s.weights, &s.rows), alpha, base),
            argmax_input: px.clone(),
            certificate_gap: 0.0,
            iterations: 0,
            method: Method::ClosedForm,
        }),
        AlphaOrder::Infinity => {
            let uniform = vec![1.0 / s.weights.len() as f64; s.weights.len()];
            Ok(CapacityResult {
                value: MeasureValue::from_nats(
                    sibson_nats(&s.weights, &s.rows, alpha),
                    alpha,
                    base,
                ),
                argmax_input: spread(px, &s.labels, &uniform),
                certificate_gap: 0.0,
                iterations: 0,
                method: Method::ClosedForm,
            })
        }
        AlphaOrder::Finite(a) => {
            let sol = pairwise_frank_wolfe(&s.rows, a, base.to_nats(opts.tol), opts.max_iterations)
                .map_err(|e| rescale_error(e, base))?;
            Ok(CapacityResult {
                value: MeasureValue::from_nats(sol.value, alpha, base),
                argmax_input: spread(px, &s.labels, &sol.weights),
                certificate_gap: base.from_nats(sol.gap),
                iterations: sol.iterations,
                method: Method::Solver,
            })
        }
    }
}

fn rescale_error(e: Error, base: LogBase) -> Error {
    match e {
        Error::NonConvergence {
            iterations,
            gap,
            tol,
        } => Error::NonConvergence {
            iterations,
            gap: base.from_nats(gap),
            tol: base.from_nats(tol),
        },
        other => other,
    }
}

/// Shannon capacity over inputs supported in `supp(px)`, by Blahut-Arimoto.
pub fn shannon_capacity(
    px: &Pmf,
    ch: &Channel,
    base: LogBase,
    opts: &SolverOptions,
) -> Result<CapacityResult> {
    opts.validate()?;
    let s = supported(px, ch)?;
    let sol = blahut_arimoto(&s.rows, base.to_nats(opts.tol), opts.max_iterations)
        .map_err(|e| rescale_error(e, base))?;
    Ok(CapacityResult {
        value: MeasureValue::from_nats(sol.value, AlphaOrder::One, base),
        argmax_input: spread(px, &s.labels, &sol.weights),
        certificate_gap: base.from_nats(sol.gap),
        iterations: sol.iterations,
        method: Method::Solver,
    })
}

/// Conditional maximal α-leakage from `X` to `Y` given `Z`.
///
/// At `α = 1` this is `I(X;Y|Z)`. Otherwise it is the largest, over `z` in
/// the support of `Z`, of the capacity of `P_{Y|X,Z=z}` restricted to inputs
/// supported in `supp(P_{X|Z=z})`. Ties go to the first `z` in label order.
pub fn conditional_maximal_alpha_leakage(
    j: &Joint3,
    alpha: AlphaOrder,
    base: LogBase,
    opts: &SolverOptions,
) -> Result<CondCapacityResult> {
    let alpha = alpha.checked_leakage()?;
    opts.validate()?;
    if alpha == AlphaOrder::One {
        return Ok(CondCapacityResult {
            value: conditional_arimoto_mi(j, alpha, base)?,
            argmax_z: None,
            per_z: Vec::new(),
        });
    }
    let pz = j.marginal(crate::prob::Axis::Z);
    let mut per_z = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for z in pz.support() {
        let (px_z, ch_z) = j.condition_on_event(&z)?.decompose();
        let r = maximal_alpha_leakage(&px_z, &ch_z, alpha, base, opts)?;
        let v = r.value.value;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((per_z.len(), v));
        }
        per_z.push((z, r));
    }
    let (k, _) = best.expect("a valid joint has at least one supported z");
    Ok(CondCapacityResult {
        value: per_z[k].1.value,
        argmax_z: Some(per_z[k].0.clone()),
        per_z,
    })
}

/// Calls `visit` with every point of the simplex lattice `{k / resolution}`
/// in `dim` dimensions.
fn for_each_lattice_point(dim: usize, resolution: usize, mut visit: impl FnMut(&[f64])) {
    let mut counts = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    fn rec(
        i: usize,
        left: usize,
        res: usize,
        counts: &mut [usize],
        point: &mut [f64],
        visit: &mut dyn FnMut(&[f64]),
    ) {
        let dim = counts.len();
        if i + 1 == dim {
            counts[i] = left;
            for (p, &c) in point.iter_mut().zip(counts.iter()) {
                *p = c as f64 / res as f64;
            }
            visit(point);
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, res, counts, point, visit);
        }
    }
    rec(
        0,
        resolution,
        resolution,
        &mut counts,
        &mut point,
        &mut visit,
    );
}

fn oracle_rows<'a, S: AsRef<str>>(
    px_support: &[S],
    ch: &'a Channel,
    resolution: usize,
) -> Result<(Vec<String>, Vec<&'a [f64]>)> {
    if px_support.is_empty() {
        return Err(Error::EmptySupport);
    }
    if px_support.len() > ORACLE_MAX_SUPPORT {
        return Err(Error::SupportTooLarge {
            size: px_support.len(),
            max: ORACLE_MAX_SUPPORT,
        });
    }
    if resolution < ORACLE_MIN_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {resolution} is below {ORACLE_MIN_RESOLUTION}"
        )));
    }
    let labels: Vec<String> = px_support.iter().map(|s| s.as_ref().to_string()).collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    let rows = labels
        .iter()
        .map(|l| ch.row_by_label(l))
        .collect::<Result<_>>()?;
    Ok((labels, rows))
}

fn grid_max(
    dim: usize,
    resolution: usize,
    mut objective: impl FnMut(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for_each_lattice_point(dim, resolution, |p| {
        let v = objective(p);
        if v > best.1 {
            best = (p.to_vec(), v);
        }
    });
    best
}

/// Exhaustive search of the Sibson MI over the simplex lattice with spacing
/// `1 / resolution` on `px_support` (at most four symbols).
pub fn grid_oracle_capacity<S: AsRef<str>>(
    px_support: &[S],
    ch: &Channel,
    alpha: AlphaOrder,
    base: LogBase,
    resolution: usize,
) -> Result<CapacityResult> {
    let alpha = alpha.checked_leakage()?;
    let (labels, rows) = oracle_rows(px_support, ch, resolution)?;
    let (weights, value) = match alpha {
        AlphaOrder::Finite(a) => {
            // reuse log rows across lattice points
            let obj = SibsonObjective::from_rows(&rows, a)?;
            grid_max(rows.len(), resolution, |p| obj.value(p))
        }
        _ => grid_max(rows.len(), resolution, |p| sibson_nats(p, &rows, alpha)),
    };
    let gap = match alpha {
        AlphaOrder::Finite(a) => SibsonObjective::from_rows(&rows, a)?.frank_wolfe_gap(&weights),
        AlphaOrder::One => shannon_gap(&weights, &rows),
        AlphaOrder::Infinity => 0.0,
    };
    Ok(CapacityResult {
        value: MeasureValue::from_nats(value, alpha, base),
        argmax_input: Pmf::new(labels, weights)?,
        certificate_gap: base.from_nats(gap),
        iterations: 0,
        method: Method::GridOracle,
    })
}

fn shannon_gap(p: &[f64], rows: &[&[f64]]) -> f64 {
    let ny = rows.first().map_or(0, |r| r.len());
    let mut q = vec![0.0; ny];
    for (&w, row) in p.iter().zip(rows) {
        for (acc, &r) in q.iter_mut().zip(row.iter()) {
            *acc += w * r;
        }
    }
    let d: Vec<f64> = rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(&q)
                .filter(|(&r, _)| r > 0.0)
                .map(|(&r, &qy)| {
                    if qy > 0.0 {
                        r * ln(r / qy)
                    } else {
                        f64::INFINITY
                    }
                })
                .sum()
        })
        .collect();
    let mi: f64 = p
        .iter()
        .zip(&d)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &dx)| w * dx)
        .sum();
    (d.iter().copied().fold(f64::NEG_INFINITY, f64::max) - mi).max(0.0)
}

/// Grid suprema of the Sibson and Arimoto MIs over the same support.
#[derive(Debug, Clone, PartialEq)]
pub struct SupEqualityReport {
    pub alpha: AlphaOrder,
    pub base: LogBase,
    pub sibson_max: f64,
    pub arimoto_max: f64,
    /// `sibson_max - arimoto_max`.
    pub difference: f64,
}

/// Grid-maximizes the Sibson and the Arimoto MI separately over the lattice
/// on `px_support` and reports both suprema.
pub fn sup_equality_check<S: AsRef<str>>(
    px_support: &[S],
    ch: &Channel,
    alpha: AlphaOrder,
    base: LogBase,
    resolution: usize,
) -> Result<SupEqualityReport> {
    let sib = grid_oracle_capacity(px_support, ch, alpha, base, resolution)?;
    let (_, rows) = oracle_rows(px_support, ch, resolution)?;
    let ny = ch.n_outputs();
    let n = rows.len();
    let mut joint = vec![0.0; n * ny];
    let lr = log_rows(&rows);
    let mut lp = vec![0.0; n];
    let mut col = vec![0.0; ny];
    let (_, ari) = grid_max(n, resolution, |p| match alpha {
        // both measures are the Shannon MI here
        AlphaOrder::One => shannon_mi_nats(p, &rows),
        AlphaOrder::Finite(a) => {
            for (l, &w) in lp.iter_mut().zip(p) {
                *l = if w > 0.0 {
                    a * ln(w)
                } else {
                    f64::NEG_INFINITY
                };
            }
            let h_x = log_sum_exp(lp.iter().copied()) / (1.0 - a);
            for (y, c) in col.iter_mut().enumerate() {
                *c = log_sum_exp(lp.iter().zip(&lr).map(|(&l, r)| l + a * r[y])) / a;
            }
            let cond = log_sum_exp(col.iter().copied());
            h_x - a / (1.0 - a) * cond
        }
        AlphaOrder::Infinity => {
            for (x, (&w, row)) in p.iter().zip(&rows).enumerate() {
                for (y, &r) in row.iter().enumerate() {
                    joint[x * ny + y] = w * r;
                }
            }
            renyi_nats(p, alpha) - arimoto_cond_entropy_dense(&joint, n, ny, alpha)
        }
    });
    let arimoto_max = base.from_nats(ari);
    Ok(SupEqualityReport {
        alpha,
        base,
        sibson_max: sib.value.value,
        arimoto_max,
        difference: sib.value.value - arimoto_max,
    })
}
