//! Seeded verification suites and the worked examples they run on.

use alphaleak_core::capacity::{
    conditional_maximal_alpha_leakage, maximal_alpha_leakage, CapacityResult,
};
use alphaleak_core::measures::{
    conditional_alpha_leakage_by_definition, conditional_arimoto_mi, conditional_arimoto_mi_dense,
    sibson_mi,
};
use alphaleak_core::prob::{index_labels, pair_label};
use alphaleak_core::{
    AlphaOrder, Axis, Channel, Error, Joint3, LogBase, MeasureValue, Pmf, Result, SolverOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub alphas: Vec<AlphaOrder>,
    pub trials: usize,
    pub seed: u64,
    /// Slack allowed before a trial counts as a violation, in `base` units.
    pub tol: f64,
    pub base: LogBase,
    pub solver: SolverOptions,
}

impl TrialConfig {
    pub fn new(
        sizes: (usize, usize, usize),
        alphas: Vec<AlphaOrder>,
        trials: usize,
        seed: u64,
    ) -> Self {
        TrialConfig {
            nx: sizes.0,
            ny: sizes.1,
            nz: sizes.2,
            alphas,
            trials,
            seed,
            tol: 1e-7,
            base: LogBase::Bits,
            solver: SolverOptions::default(),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nz == 0 {
            return Err(Error::InvalidParameter(
                "alphabet sizes must be at least 1".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter(
                "trial count must be at least 1".into(),
            ));
        }
        if self.alphas.is_empty() {
            return Err(Error::InvalidParameter("empty alpha list".into()));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} must be finite and >= 0",
                self.tol
            )));
        }
        Ok(())
    }
}

/// How `lhs` and `rhs` of each record are expected to compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs <= rhs + tol`
    Le,
    /// `|lhs - rhs| <= tol`
    Eq,
    /// `lhs < rhs - tol`
    Lt,
}

impl Relation {
    /// How far the record is from breaking the relation; positive iff broken.
    fn excess(self, lhs: f64, rhs: f64, tol: f64) -> f64 {
        match self {
            Relation::Le => lhs - rhs - tol,
            Relation::Eq => (lhs - rhs).abs() - tol,
            Relation::Lt => lhs - rhs + tol,
        }
    }

    fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Lt => self.excess(lhs, rhs, tol) < 0.0,
            _ => self.excess(lhs, rhs, tol) <= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub alpha: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub violation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub suite: String,
    /// Set for suites that test a conjecture: violations are findings.
    pub experimental: bool,
    pub relation: Relation,
    pub base: String,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub trials: usize,
    pub alpha: Vec<String>,
    pub violations: usize,
    /// Largest `lhs - rhs` (`|lhs - rhs|` for equality) among violations;
    /// 0 when there are none.
    pub max_violation: f64,
    /// Largest `lhs - rhs` (`|lhs - rhs|` for equality) over all records.
    pub max_difference: Option<f64>,
    /// Records whose evaluation failed (e.g. solver non-convergence).
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_trial: Option<Vec<TrialRecord>>,
}

impl TrialReport {
    #[allow(clippy::too_many_arguments)]
    fn build(
        suite: &str,
        experimental: bool,
        relation: Relation,
        base: LogBase,
        tol: f64,
        seed: Option<u64>,
        trials: usize,
        alphas: &[AlphaOrder],
        records: Vec<TrialRecord>,
    ) -> Self {
        let mut violations = 0;
        let mut max_violation: f64 = 0.0;
        let mut max_difference: Option<f64> = None;
        let mut failures = 0;
        for r in &records {
            let (Some(l), Some(h)) = (r.lhs, r.rhs) else {
                failures += 1;
                continue;
            };
            let d = if relation == Relation::Eq {
                (l - h).abs()
            } else {
                l - h
            };
            max_difference = Some(max_difference.map_or(d, |m| m.max(d)));
            if r.violation {
                violations += 1;
                max_violation = max_violation.max(d);
            }
        }
        TrialReport {
            suite: suite.to_string(),
            experimental,
            relation,
            base: base.name().to_string(),
            tolerance: tol,
            seed,
            trials,
            alpha: alphas.iter().map(|a| a.to_string()).collect(),
            violations,
            max_violation,
            max_difference,
            failures,
            per_trial: Some(records),
        }
    }

    /// True when no record broke the relation and none failed.
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.failures == 0
    }

    pub fn records(&self) -> &[TrialRecord] {
        self.per_trial.as_deref().unwrap_or(&[])
    }

    pub fn without_per_trial(mut self) -> Self {
        self.per_trial = None;
        self
    }
}

fn record(
    trial: usize,
    alpha: AlphaOrder,
    label: Option<String>,
    relation: Relation,
    tol: f64,
    eval: Result<(f64, f64)>,
) -> TrialRecord {
    match eval {
        Ok((lhs, rhs)) => TrialRecord {
            trial,
            alpha: alpha.to_string(),
            label,
            lhs: Some(lhs),
            rhs: Some(rhs),
            violation: !relation.holds(lhs, rhs, tol),
            error: None,
        },
        Err(e) => TrialRecord {
            trial,
            alpha: alpha.to_string(),
            label,
            lhs: None,
            rhs: None,
            violation: false,
            error: Some(e.to_string()),
        },
    }
}

/// Generator for trial `trial` of a run seeded with `seed`; independent of
/// how trials are scheduled.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Uniform draw from the probability simplex with `n` vertices.
pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

pub fn random_pmf<R: Rng>(rng: &mut R, n: usize) -> Result<Pmf> {
    Pmf::new(index_labels(n), random_simplex(rng, n))
}

pub fn random_channel<R: Rng>(rng: &mut R, n_in: usize, n_out: usize) -> Result<Channel> {
    let m: Vec<f64> = (0..n_in).flat_map(|_| random_simplex(rng, n_out)).collect();
    Channel::new(index_labels(n_in), index_labels(n_out), m)
}

pub fn random_joint<R: Rng>(rng: &mut R, nx: usize, ny: usize, nz: usize) -> Result<Joint3> {
    Joint3::new(
        index_labels(nx),
        index_labels(ny),
        index_labels(nz),
        random_simplex(rng, nx * ny * nz),
    )
}

/// `P(x, y, z) = P(x) P(y|x) P(z|x)`, so that `Z - X - Y` holds.
pub fn make_markov_joint(px: &Pmf, ch_yx: &Channel, ch_zx: &Channel) -> Result<Joint3> {
    let mut inputs = Vec::new();
    let mut m = Vec::new();
    for x in px.support() {
        let row = ch_zx.row_by_label(&x)?;
        for y in ch_yx.output_labels() {
            inputs.push(pair_label(&x, y));
            m.extend_from_slice(row);
        }
    }
    let ch_z = Channel::new(inputs, ch_zx.output_labels().to_vec(), m)?;
    Joint3::compose(px, ch_yx, &ch_z)
}

/// Uniform binary `X`, `Y = BSC_p(X)`, `Z = BSC_q(X)`.
pub fn bsc_markov_joint(p: f64, q: f64) -> Result<Joint3> {
    let px = Pmf::uniform(&index_labels(2))?;
    make_markov_joint(
        &px,
        &Channel::binary_symmetric(p)?,
        &Channel::binary_symmetric(q)?,
    )
}

/// Uniform binary `X`, `Z ~ Ber(p)` independent of `X`, `Y = X xor Z`.
pub fn xor_side_information_joint(p: f64) -> Result<Joint3> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let mut data = vec![0.0; 8];
    for x in 0..2 {
        for z in 0..2 {
            data[(x * 2 + (x ^ z)) * 2 + z] = 0.5 * if z == 1 { p } else { 1.0 - p };
        }
    }
    Joint3::new(index_labels(2), index_labels(2), index_labels(2), data)
}

fn binary_entropy_nats(p: f64) -> f64 {
    let h = |t: f64| if t > 0.0 { -t * t.ln() } else { 0.0 };
    h(p) + h(1.0 - p)
}

/// Maximal α-leakage of a BSC with crossover `p` (uniform input is optimal).
pub fn bsc_leakage_closed_form(p: f64, alpha: AlphaOrder, base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "crossover {p} outside [0, 1]"
        )));
    }
    let ln2 = std::f64::consts::LN_2;
    let nats = match alpha.value() {
        1.0 => ln2 - binary_entropy_nats(p),
        a if a.is_infinite() => (2.0 * p.max(1.0 - p)).ln(),
        a if a > 1.0 => ln2 + (p.powf(a) + (1.0 - p).powf(a)).ln() / (a - 1.0),
        a => {
            return Err(Error::AlphaOutOfDomain {
                alpha: a,
                expected: "[1, inf]",
            })
        }
    };
    Ok(base.from_nats(nats))
}

/// Conditional maximal α-leakage of the [`bsc_markov_joint`] instance.
pub fn bsc_markov_conditional_closed_form(
    p: f64,
    q: f64,
    alpha: AlphaOrder,
    base: LogBase,
) -> Result<f64> {
    if q == 0.0 {
        // Z reveals X
        return Ok(0.0);
    }
    if alpha == AlphaOrder::One {
        let r = p + q - 2.0 * p * q;
        return Ok(base.from_nats(binary_entropy_nats(r) - binary_entropy_nats(p)));
    }
    bsc_leakage_closed_form(p, alpha, base)
}

/// Conditional leakage given Markov side information never
/// exceeds the unconditional leakage (`lhs` conditional, `rhs` plain).
pub fn verify_robustness_theorem(cfg: &TrialConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let records = run_trials(cfg, Relation::Le, |rng| {
        let px = random_pmf(rng, cfg.nx)?;
        let ch_yx = random_channel(rng, cfg.nx, cfg.ny)?;
        let ch_zx = random_channel(rng, cfg.nx, cfg.nz)?;
        let j = make_markov_joint(&px, &ch_yx, &ch_zx)?;
        Ok(move |a: AlphaOrder| {
            let lhs = conditional_maximal_alpha_leakage(&j, a, cfg.base, &cfg.solver)?
                .value
                .value;
            let rhs = maximal_alpha_leakage(&px, &ch_yx, a, cfg.base, &cfg.solver)?
                .value
                .value;
            Ok((lhs, rhs))
        })
    });
    Ok(TrialReport::build(
        "robustness",
        false,
        Relation::Le,
        cfg.base,
        cfg.tol,
        Some(cfg.seed),
        cfg.trials,
        &cfg.alphas,
        records,
    ))
}

/// Sibson MI data processing: `I(X;W) <= I(X;Y)` for `X - Y - W`.
pub fn verify_sibson_dpi(cfg: &TrialConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let records = run_trials(cfg, Relation::Le, |rng| {
        let px = random_pmf(rng, cfg.nx)?;
        let ch_yx = random_channel(rng, cfg.nx, cfg.ny)?;
        let ch_wy = random_channel(rng, cfg.ny, cfg.nz)?;
        let ch_wx = ch_yx.compose(&ch_wy)?;
        Ok(move |a: AlphaOrder| {
            let lhs = sibson_mi(&px, &ch_wx, a, cfg.base)?.value;
            let rhs = sibson_mi(&px, &ch_yx, a, cfg.base)?.value;
            Ok((lhs, rhs))
        })
    });
    Ok(TrialReport::build(
        "dpi",
        false,
        Relation::Le,
        cfg.base,
        cfg.tol,
        Some(cfg.seed),
        cfg.trials,
        &cfg.alphas,
        records,
    ))
}

/// The operational conditional α-leakage equals the conditional Arimoto MI.
pub fn verify_thm1(cfg: &TrialConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let records = run_trials(cfg, Relation::Eq, |rng| {
        let j = random_joint(rng, cfg.nx, cfg.ny, cfg.nz)?;
        Ok(move |a: AlphaOrder| {
            let lhs = conditional_alpha_leakage_by_definition(&j, a, cfg.base)?.value;
            let rhs = conditional_arimoto_mi(&j, a, cfg.base)?.value;
            Ok((lhs, rhs))
        })
    });
    Ok(TrialReport::build(
        "thm1",
        false,
        Relation::Eq,
        cfg.base,
        cfg.tol,
        Some(cfg.seed),
        cfg.trials,
        &cfg.alphas,
        records,
    ))
}

/// Both sides of the conjectured composition bound for one joint: the
/// leakage of the pair `(Y, Z)`, and the leakage of `Y` plus the leakage of
/// `Z` given `Y`.
pub fn composition_sides(
    j: &Joint3,
    alpha: AlphaOrder,
    base: LogBase,
    opts: &SolverOptions,
) -> Result<(f64, f64)> {
    let (px, ch_pair) = j.merge_yz().decompose();
    let (px_y, ch_y) = j.xy_marginal().decompose();
    let swapped = j.permute([Axis::X, Axis::Z, Axis::Y])?;
    let lhs = maximal_alpha_leakage(&px, &ch_pair, alpha, base, opts)?
        .value
        .value;
    let first = maximal_alpha_leakage(&px_y, &ch_y, alpha, base, opts)?
        .value
        .value;
    let second = conditional_maximal_alpha_leakage(&swapped, alpha, base, opts)?
        .value
        .value;
    Ok((lhs, first + second))
}

/// Checks the conjectured composition bound on random joints. Never asserts:
/// the report is marked experimental and violations are findings.
pub fn verify_composition_conjecture(cfg: &TrialConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let records = run_trials(cfg, Relation::Le, |rng| {
        let j = random_joint(rng, cfg.nx, cfg.ny, cfg.nz)?;
        Ok(move |a: AlphaOrder| composition_sides(&j, a, cfg.base, &cfg.solver))
    });
    Ok(TrialReport::build(
        "composition",
        true,
        Relation::Le,
        cfg.base,
        cfg.tol,
        Some(cfg.seed),
        cfg.trials,
        &cfg.alphas,
        records,
    ))
}

/// Runs `cfg.trials` independent trials; `setup` samples an instance and
/// returns the per-α evaluation. Results are in trial order.
fn run_trials<F, E>(cfg: &TrialConfig, relation: Relation, setup: F) -> Vec<TrialRecord>
where
    F: Fn(&mut ChaCha8Rng) -> Result<E> + Sync,
    E: Fn(AlphaOrder) -> Result<(f64, f64)>,
{
    (0..cfg.trials)
        .into_par_iter()
        .flat_map_iter(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let eval = setup(&mut rng);
            cfg.alphas
                .iter()
                .map(|&a| {
                    let r = match &eval {
                        Ok(f) => f(a),
                        Err(e) => Err(e.clone()),
                    };
                    record(t, a, None, relation, cfg.tol, r)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// The side-information counterexample: given `Z`, `Y` reveals `X`
/// completely, so the conditional leakage (`rhs`) is one bit while the
/// unconditional BSC leakage (`lhs`) is smaller.
pub fn verify_counterexample_nonmarkov(
    p_grid: &[f64],
    alphas: &[AlphaOrder],
    base: LogBase,
    tol: f64,
) -> Result<TrialReport> {
    let opts = SolverOptions::default();
    let mut records = Vec::new();
    for (t, &p) in p_grid.iter().enumerate() {
        if !(p > 0.0 && p <= 0.5) {
            return Err(Error::InvalidParameter(format!("p = {p} outside (0, 0.5]")));
        }
        let j = xor_side_information_joint(p)?;
        for &a in alphas {
            let eval = (|| {
                let lhs = bsc_leakage_closed_form(p, a, base)?;
                let rhs = conditional_maximal_alpha_leakage(&j, a, base, &opts)?
                    .value
                    .value;
                Ok((lhs, rhs))
            })();
            records.push(record(
                t,
                a,
                Some(format!("p={p}")),
                Relation::Lt,
                tol,
                eval,
            ));
        }
    }
    Ok(TrialReport::build(
        "counterexample",
        false,
        Relation::Lt,
        base,
        tol,
        None,
        p_grid.len(),
        alphas,
        records,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BscRow {
    pub alpha: String,
    pub unconditional_closed: f64,
    pub unconditional_solver: f64,
    pub unconditional_diff: f64,
    pub conditional_closed: f64,
    pub conditional_solver: f64,
    pub conditional_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BscTable {
    pub p: f64,
    pub q: f64,
    pub base: String,
    pub rows: Vec<BscRow>,
}

impl BscTable {
    pub fn max_diff(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.unconditional_diff.max(r.conditional_diff))
            .fold(0.0, f64::max)
    }
}

/// Closed forms of the BSC instance of [`bsc_markov_joint`] next to solver output.
pub fn bsc_closed_forms(
    p: f64,
    q: f64,
    alpha_grid: &[AlphaOrder],
    base: LogBase,
    opts: &SolverOptions,
) -> Result<BscTable> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 0.5)")));
    }
    if !(0.0..=0.5).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 0.5]")));
    }
    let j = bsc_markov_joint(p, q)?;
    let (px, ch) = j.xy_marginal().decompose();
    let mut rows = Vec::new();
    for &a in alpha_grid {
        let uc = bsc_leakage_closed_form(p, a, base)?;
        let us = maximal_alpha_leakage(&px, &ch, a, base, opts)?.value.value;
        let cc = bsc_markov_conditional_closed_form(p, q, a, base)?;
        let cs = conditional_maximal_alpha_leakage(&j, a, base, opts)?
            .value
            .value;
        rows.push(BscRow {
            alpha: a.to_string(),
            unconditional_closed: uc,
            unconditional_solver: us,
            unconditional_diff: (uc - us).abs(),
            conditional_closed: cc,
            conditional_solver: cs,
            conditional_diff: (cc - cs).abs(),
        });
    }
    Ok(BscTable {
        p,
        q,
        base: base.name().to_string(),
        rows,
    })
}

/// [`bsc_closed_forms`] as a report: `lhs` solver, `rhs` closed form.
pub fn verify_bsc(
    p: f64,
    q: f64,
    alphas: &[AlphaOrder],
    base: LogBase,
    tol: f64,
) -> Result<TrialReport> {
    let table = bsc_closed_forms(p, q, alphas, base, &SolverOptions::default())?;
    let mut records = Vec::new();
    for (row, &a) in table.rows.iter().zip(alphas) {
        for (label, s, c) in [
            (
                "unconditional",
                row.unconditional_solver,
                row.unconditional_closed,
            ),
            (
                "conditional",
                row.conditional_solver,
                row.conditional_closed,
            ),
        ] {
            records.push(record(
                0,
                a,
                Some(label.into()),
                Relation::Eq,
                tol,
                Ok((s, c)),
            ));
        }
    }
    Ok(TrialReport::build(
        "bsc",
        false,
        Relation::Eq,
        base,
        tol,
        None,
        1,
        alphas,
        records,
    ))
}

/// Cardinalities of the auxiliary variable `U` of the lower-bound
/// construction: a block `U0` used when `Z != z*` and one block per `x` in the
/// support of `X` given `z*`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessConfig {
    pub u0_size: u64,
    pub per_x_sizes: Vec<(String, u64)>,
    /// The input distribution the block sizes approximate.
    pub target_input: Pmf,
}

impl WitnessConfig {
    pub fn new(u0_size: u64, per_x_sizes: Vec<(String, u64)>, target_input: Pmf) -> Result<Self> {
        if u0_size == 0 || per_x_sizes.iter().any(|(_, s)| *s == 0) {
            return Err(Error::InvalidParameter(
                "witness block sizes must be at least 1".into(),
            ));
        }
        Ok(WitnessConfig {
            u0_size,
            per_x_sizes,
            target_input,
        })
    }

    /// Sizes `round(C (P(x,z*)^α / target(x))^(1/(α-1)))`, with `C` the
    /// smallest scale (at least 1) making every size at least `min_size`.
    pub fn from_target(
        j: &Joint3,
        z_star: &str,
        alpha: AlphaOrder,
        target: &Pmf,
        u0_size: u64,
        min_size: u64,
    ) -> Result<Self> {
        let a = witness_alpha(alpha)?;
        let pxz = j.condition_on_event(z_star)?.marginal_a();
        let pz = z_mass(j, z_star)?;
        let mut raw = Vec::new();
        for x in pxz.support() {
            let t = target
                .prob(&x)
                .ok_or_else(|| Error::UnknownLabel(x.clone()))?;
            if t <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "target input must be positive on the support of X given z*, zero at `{x}`"
                )));
            }
            let p = pxz.prob(&x).unwrap_or(0.0) * pz;
            raw.push((x, ((a * p.ln() - t.ln()) / (a - 1.0)).exp()));
        }
        let min_raw = raw.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        let scale = (min_size.max(1) as f64 / min_raw).max(1.0);
        let sizes = raw
            .into_iter()
            .map(|(x, r)| {
                let s = (scale * r).round();
                if !(s < u64::MAX as f64) {
                    return Err(Error::InvalidParameter(format!(
                        "block size for `{x}` overflows"
                    )));
                }
                Ok((x, (s as u64).max(1)))
            })
            .collect::<Result<Vec<_>>>()?;
        WitnessConfig::new(u0_size, sizes, target.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessBound {
    /// Conditional Arimoto MI of `U` and `Y` given `Z`, from its closed form.
    pub value: MeasureValue,
    /// The same quantity evaluated on the explicit `(U, Y, Z)` joint, when
    /// that joint is small enough to materialize.
    pub direct: Option<f64>,
    pub z_star: String,
    /// The input distribution over `X` induced by the block sizes.
    pub induced_input: Pmf,
}

/// Entries above which the explicit `(U, Y, Z)` joint is not built.
pub const WITNESS_DIRECT_MAX_ENTRIES: usize = 1 << 24;

fn witness_alpha(alpha: AlphaOrder) -> Result<f64> {
    match alpha {
        AlphaOrder::Finite(a) if a > 1.0 && a.is_finite() => Ok(a),
        _ => Err(Error::AlphaOutOfDomain {
            alpha: alpha.value(),
            expected: "(1, inf)",
        }),
    }
}

fn z_mass(j: &Joint3, z: &str) -> Result<f64> {
    let pz = j.marginal(Axis::Z);
    pz.prob(z).ok_or_else(|| Error::UnknownLabel(z.to_string()))
}

/// The `z` attaining the conditional maximal α-leakage and its capacity.
pub fn witness_z_star(
    j: &Joint3,
    alpha: AlphaOrder,
    opts: &SolverOptions,
) -> Result<(String, CapacityResult)> {
    witness_alpha(alpha)?;
    let r = conditional_maximal_alpha_leakage(j, alpha, LogBase::Nats, opts)?;
    let z = r.argmax_z.expect("set for alpha > 1");
    let cap = r
        .per_z
        .into_iter()
        .find(|(l, _)| *l == z)
        .map(|(_, c)| c)
        .expect("argmax is one of the evaluated z");
    Ok((z, cap))
}

fn ln_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Lower bound on the conditional maximal α-leakage from an explicit
/// auxiliary `U` with `U - (X, Z) - Y`: uniform over `U0` when `Z != z*`,
/// uniform over the block of `x` when `Z = z*`.
pub fn appendix_witness_lower_bound(
    j: &Joint3,
    alpha: AlphaOrder,
    w: &WitnessConfig,
    base: LogBase,
) -> Result<WitnessBound> {
    let a = witness_alpha(alpha)?;
    let (z_star, _) = witness_z_star(j, alpha, &SolverOptions::default())?;
    let (nx, ny, nz) = j.dims();
    let zs = j
        .z_labels()
        .iter()
        .position(|l| *l == z_star)
        .expect("known label");
    let support: Vec<usize> = (0..nx)
        .filter(|&x| (0..ny).any(|y| j.get(x, y, zs) > 0.0))
        .collect();
    if w.per_x_sizes.len() != support.len()
        || !support
            .iter()
            .all(|&x| w.per_x_sizes.iter().any(|(l, _)| *l == j.x_labels()[x]))
    {
        return Err(Error::LabelMismatch(
            "witness block sizes must be keyed by the support of X given z*".into(),
        ));
    }
    let size_of = |x: usize| {
        w.per_x_sizes
            .iter()
            .find(|(l, _)| *l == j.x_labels()[x])
            .map(|(_, s)| *s)
            .expect("checked above")
    };
    let pz_star = z_mass(j, &z_star)?;
    let rest = 1.0 - pz_star;
    let u0 = w.u0_size as f64;

    // ln of (1 - P(z*)) |U0|^(1/α - 1); the U0 block's share of both sums
    let ln_rest = if rest > 0.0 {
        rest.ln() + (1.0 / a - 1.0) * u0.ln()
    } else {
        f64::NEG_INFINITY
    };
    let ln_block = |x: usize, p: f64| (1.0 - a) * (size_of(x) as f64).ln() + a * p.ln();
    let den_terms: Vec<f64> = support
        .iter()
        .map(|&x| ln_block(x, (0..ny).map(|y| j.get(x, y, zs)).sum()))
        .collect();
    let ln_den = ln_sum_exp(&[ln_rest, ln_sum_exp(&den_terms) / a]);
    let mut num_terms = vec![ln_rest];
    for y in 0..ny {
        let t: Vec<f64> = support
            .iter()
            .filter(|&&x| j.get(x, y, zs) > 0.0)
            .map(|&x| ln_block(x, j.get(x, y, zs)))
            .collect();
        if !t.is_empty() {
            num_terms.push(ln_sum_exp(&t) / a);
        }
    }
    let ln_num = ln_sum_exp(&num_terms);
    let nats = a / (a - 1.0) * (ln_num - ln_den);

    let mut induced = vec![0.0; nx];
    let m = den_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (&x, &t) in support.iter().zip(&den_terms) {
        induced[x] = (t - m).exp();
    }
    let s: f64 = induced.iter().sum();
    induced.iter_mut().for_each(|v| *v /= s);
    let induced_input = Pmf::new(j.x_labels().to_vec(), induced)?;

    let n_u = support
        .iter()
        .map(|&x| size_of(x))
        .try_fold(w.u0_size, u64::checked_add);
    let direct = match n_u {
        Some(n) if (n as usize).saturating_mul(ny * nz) <= WITNESS_DIRECT_MAX_ENTRIES => {
            Some(base.from_nats(direct_witness_nats(j, zs, &support, w.u0_size, size_of, a)))
        }
        _ => None,
    };
    Ok(WitnessBound {
        value: MeasureValue {
            value: base.from_nats(nats),
            alpha,
            base,
        },
        direct,
        z_star,
        induced_input,
    })
}

fn direct_witness_nats(
    j: &Joint3,
    zs: usize,
    support: &[usize],
    u0: u64,
    size_of: impl Fn(usize) -> u64,
    a: f64,
) -> f64 {
    let (nx, ny, nz) = j.dims();
    let n_u = u0 as usize + support.iter().map(|&x| size_of(x) as usize).sum::<usize>();
    let mut data = vec![0.0; n_u * ny * nz];
    let mut pyz = vec![0.0; ny * nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                pyz[y * nz + z] += j.get(x, y, z);
            }
        }
    }
    for u in 0..u0 as usize {
        for y in 0..ny {
            for z in (0..nz).filter(|&z| z != zs) {
                data[(u * ny + y) * nz + z] = pyz[y * nz + z] / u0 as f64;
            }
        }
    }
    let mut start = u0 as usize;
    for &x in support {
        let k = size_of(x) as usize;
        for u in start..start + k {
            for y in 0..ny {
                data[(u * ny + y) * nz + zs] = j.get(x, y, zs) / k as f64;
            }
        }
        start += k;
    }
    conditional_arimoto_mi_dense(&data, n_u, ny, nz, AlphaOrder::Finite(a))
}

/// Lower bounds along a sweep of `|U0|`, with block sizes matched to
/// `target` (by default the capacity-achieving input given `z*`).
pub fn witness_sweep(
    j: &Joint3,
    alpha: AlphaOrder,
    target: Option<&Pmf>,
    u0_sizes: &[u64],
    min_size: u64,
    base: LogBase,
) -> Result<Vec<WitnessBound>> {
    let (z_star, cap) = witness_z_star(j, alpha, &SolverOptions::default())?;
    let target = target.cloned().unwrap_or(cap.argmax_input);
    u0_sizes
        .iter()
        .map(|&u0| {
            let w = WitnessConfig::from_target(j, &z_star, alpha, &target, u0, min_size)?;
            appendix_witness_lower_bound(j, alpha, &w, base)
        })
        .collect()
}

/// Witness sweep as a report: each bound must stay below the conditional
/// capacity (`label = bound`) and not decrease along the sweep
/// (`label = monotone`).
pub fn verify_witness(
    j: &Joint3,
    alpha: AlphaOrder,
    u0_sizes: &[u64],
    base: LogBase,
    tol: f64,
) -> Result<TrialReport> {
    let cap = conditional_maximal_alpha_leakage(j, alpha, base, &SolverOptions::default())?
        .value
        .value;
    let bounds = witness_sweep(j, alpha, None, u0_sizes, 1, base)?;
    let mut records = Vec::new();
    for (t, (b, &u0)) in bounds.iter().zip(u0_sizes).enumerate() {
        let v = b.value.value;
        records.push(record(
            t,
            alpha,
            Some(format!("bound u0={u0}")),
            Relation::Le,
            tol,
            Ok((v, cap)),
        ));
        if t > 0 {
            let prev = bounds[t - 1].value.value;
            records.push(record(
                t,
                alpha,
                Some(format!("monotone u0={u0}")),
                Relation::Le,
                tol,
                Ok((prev, v)),
            ));
        }
    }
    Ok(TrialReport::build(
        "witness",
        false,
        Relation::Le,
        base,
        tol,
        None,
        u0_sizes.len(),
        &[alpha],
        records,
    ))
}
