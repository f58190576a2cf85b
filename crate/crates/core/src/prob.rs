//! Validated finite-alphabet probability objects.
//!
//! Every constructor runs the same validation: entries must be finite and
//! non-negative (up to [`NEGATIVE_NOISE`]), the total mass must be within
//! [`SUM_TOLERANCE`] of one, and after renormalization anything below
//! [`ZERO_CLAMP`] is snapped to an exact zero. Alignment between objects is
//! always by label, never by position.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::LN_2;

/// Entries below this value (after renormalization) are set to zero.
pub const ZERO_CLAMP: f64 = 1e-13;
/// Maximum tolerated deviation of the total mass from one.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Negative entries down to `-NEGATIVE_NOISE` are treated as round-off.
pub const NEGATIVE_NOISE: f64 = 1e-12;

/// Validates a probability vector in place.
pub(crate) fn normalize_in_place(probs: &mut [f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    for (index, p) in probs.iter_mut().enumerate() {
        if !p.is_finite() || *p < -NEGATIVE_NOISE {
            return Err(Error::InvalidEntry { index, value: *p });
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::MassMismatch { sum });
    }
    probs.iter_mut().for_each(|p| *p /= sum);
    let mut clamped = false;
    for p in probs.iter_mut() {
        if *p < ZERO_CLAMP && *p != 0.0 {
            *p = 0.0;
            clamped = true;
        }
    }
    if clamped {
        let sum: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(())
}

fn owned_labels<S: AsRef<str>>(labels: &[S]) -> Vec<String> {
    labels.iter().map(|s| s.as_ref().to_string()).collect()
}

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn position(labels: &[String], label: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

/// Label of a composite symbol `(a, b)`, used for product alphabets.
pub fn pair_label(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Default labels `"0"`, `"1"`, ... for an alphabet of size `n`.
pub fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// The order parameter α, with exact variants for the two continuous
/// extensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaOrder {
    One,
    /// A strictly positive real different from one.
    Finite(f64),
    Infinity,
}

impl AlphaOrder {
    /// Classifies a real α: exactly `1.0` maps to [`AlphaOrder::One`] and
    /// `+inf` to [`AlphaOrder::Infinity`].
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::AlphaOutOfDomain {
                alpha,
                expected: "(0, inf]",
            });
        }
        Ok(if alpha == 1.0 {
            AlphaOrder::One
        } else if alpha == f64::INFINITY {
            AlphaOrder::Infinity
        } else {
            AlphaOrder::Finite(alpha)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            AlphaOrder::One => 1.0,
            AlphaOrder::Finite(a) => a,
            AlphaOrder::Infinity => f64::INFINITY,
        }
    }

    /// Re-validates a possibly hand-built value (e.g. `Finite(1.0)`).
    pub(crate) fn checked(self) -> Result<Self> {
        match self {
            AlphaOrder::Finite(a) => AlphaOrder::new(a),
            other => Ok(other),
        }
    }

    /// Leakage quantities are only defined for `1 <= alpha <= inf`.
    pub(crate) fn checked_leakage(self) -> Result<Self> {
        let alpha = self.checked()?;
        if alpha.value() < 1.0 {
            return Err(Error::AlphaOutOfDomain {
                alpha: alpha.value(),
                expected: "[1, inf]",
            });
        }
        Ok(alpha)
    }
}

impl fmt::Display for AlphaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaOrder::One => f.write_str("1"),
            AlphaOrder::Finite(a) => write!(f, "{a}"),
            AlphaOrder::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for AlphaOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "inf" | "Inf" | "INF" | "infinity" | "+inf" | "∞" => Ok(AlphaOrder::Infinity),
            _ => {
                let a: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse alpha `{t}`")))?;
                AlphaOrder::new(a)
            }
        }
    }
}

/// Logarithm base of reported values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Bits => nats / LN_2,
            LogBase::Nats => nats,
        }
    }

    /// Converts a value in this base to nats.
    pub fn to_nats(self, v: f64) -> f64 {
        match self {
            LogBase::Bits => v * LN_2,
            LogBase::Nats => v,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bits" | "bit" | "2" => Ok(LogBase::Bits),
            "nats" | "nat" | "e" => Ok(LogBase::Nats),
            other => Err(Error::InvalidParameter(format!(
                "unknown log base `{other}` (expected bits or nats)"
            ))),
        }
    }
}

/// A labeled probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(labels: Vec<String>, mut probs: Vec<f64>) -> Result<Self> {
        check_labels(&labels)?;
        if labels.len() != probs.len() {
            return Err(Error::ShapeMismatch {
                expected: labels.len(),
                found: probs.len(),
            });
        }
        normalize_in_place(&mut probs)?;
        Ok(Pmf { labels, probs })
    }

    pub fn from_labels<S: AsRef<str>>(labels: &[S], probs: &[f64]) -> Result<Self> {
        Pmf::new(owned_labels(labels), probs.to_vec())
    }

    /// A pmf labeled `"0"`, `"1"`, ...
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        Pmf::new(index_labels(probs.len()), probs.to_vec())
    }

    pub fn uniform<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let n = labels.len().max(1);
        Pmf::new(owned_labels(labels), vec![1.0 / n as f64; labels.len()])
    }

    pub fn point_mass<S: AsRef<str>>(labels: &[S], at: &str) -> Result<Self> {
        let labels = owned_labels(labels);
        let i = position(&labels, at)?;
        let mut probs = vec![0.0; labels.len()];
        probs[i] = 1.0;
        Pmf::new(labels, probs)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Probability of `label`; `None` if the label is not in the alphabet.
    pub fn prob(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.probs[i])
    }

    /// Labels carrying strictly positive mass, in alphabet order.
    pub fn support(&self) -> Vec<String> {
        self.support_indices()
            .map(|i| self.labels[i].clone())
            .collect()
    }

    pub(crate) fn support_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }

    /// Zeroes every label outside `allowed` and renormalizes.
    pub fn restrict_support<S: AsRef<str>>(&self, allowed: &[S]) -> Result<Pmf> {
        for a in allowed {
            position(&self.labels, a.as_ref())?;
        }
        let mut probs: Vec<f64> = self
            .labels
            .iter()
            .zip(&self.probs)
            .map(|(l, &p)| {
                if allowed.iter().any(|a| a.as_ref() == l) {
                    p
                } else {
                    0.0
                }
            })
            .collect();
        let mass: f64 = probs.iter().sum();
        if mass <= 0.0 {
            return Err(Error::EmptySupport);
        }
        probs.iter_mut().for_each(|p| *p /= mass);
        Pmf::new(self.labels.clone(), probs)
    }
}

/// A row-stochastic matrix `P(output | input)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    matrix: Vec<f64>,
}

impl Channel {
    /// Builds a channel from a row-major matrix of `|inputs| * |outputs|`
    /// entries.
    pub fn new(
        input_labels: Vec<String>,
        output_labels: Vec<String>,
        mut matrix: Vec<f64>,
    ) -> Result<Self> {
        check_labels(&input_labels)?;
        check_labels(&output_labels)?;
        let ny = output_labels.len();
        let expected = input_labels.len() * ny;
        if matrix.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: matrix.len(),
            });
        }
        for row in matrix.chunks_mut(ny) {
            normalize_in_place(row)?;
        }
        Ok(Channel {
            input_labels,
            output_labels,
            matrix,
        })
    }

    pub fn from_rows<S: AsRef<str>, T: AsRef<str>>(
        input_labels: &[S],
        output_labels: &[T],
        rows: &[&[f64]],
    ) -> Result<Self> {
        let ny = output_labels.len();
        let mut matrix = Vec::with_capacity(rows.len() * ny);
        for r in rows {
            if r.len() != ny {
                return Err(Error::ShapeMismatch {
                    expected: ny,
                    found: r.len(),
                });
            }
            matrix.extend_from_slice(r);
        }
        Channel::new(
            owned_labels(input_labels),
            owned_labels(output_labels),
            matrix,
        )
    }

    /// Binary symmetric channel on `{"0", "1"}` with crossover `p`.
    pub fn binary_symmetric(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "crossover probability {p} outside [0, 1]"
            )));
        }
        Channel::new(
            index_labels(2),
            index_labels(2),
            vec![1.0 - p, p, p, 1.0 - p],
        )
    }

    /// The noiseless channel `Y = X` on the given alphabet.
    pub fn identity<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let n = labels.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        Channel::new(owned_labels(labels), owned_labels(labels), m)
    }

    /// A channel whose output ignores the input.
    pub fn constant<S: AsRef<str>>(input_labels: &[S], output: &Pmf) -> Result<Self> {
        let m = input_labels
            .iter()
            .flat_map(|_| output.probs().iter().copied())
            .collect();
        Channel::new(owned_labels(input_labels), output.labels().to_vec(), m)
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn n_inputs(&self) -> usize {
        self.input_labels.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_labels.len()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let ny = self.n_outputs();
        &self.matrix[i * ny..(i + 1) * ny]
    }

    pub fn row_by_label(&self, label: &str) -> Result<&[f64]> {
        Ok(self.row(position(&self.input_labels, label)?))
    }

    /// Applies `self` then `next`; `next`'s inputs are matched to `self`'s
    /// outputs by label.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if next.n_inputs() != self.n_outputs() {
            return Err(Error::LabelMismatch(
                "post-processing inputs differ from channel outputs".to_string(),
            ));
        }
        let idx: Vec<usize> = self
            .output_labels
            .iter()
            .map(|l| position(&next.input_labels, l))
            .collect::<Result<_>>()?;
        let nw = next.n_outputs();
        let mut m = vec![0.0; self.n_inputs() * nw];
        for x in 0..self.n_inputs() {
            for (y, &wy) in self.row(x).iter().enumerate() {
                if wy == 0.0 {
                    continue;
                }
                for (w, &v) in next.row(idx[y]).iter().enumerate() {
                    m[x * nw + w] += wy * v;
                }
            }
        }
        Channel::new(self.input_labels.clone(), next.output_labels.clone(), m)
    }

    /// For every label of `px`, the channel row index serving it, or `None`
    /// for zero-mass symbols without a row. Fails if a supported symbol has
    /// no row or the channel has rows for symbols outside `px`'s alphabet.
    pub(crate) fn align_to(&self, px: &Pmf) -> Result<Vec<Option<usize>>> {
        for l in &self.input_labels {
            if px.index_of(l).is_none() {
                return Err(Error::LabelMismatch(format!(
                    "channel input `{l}` is not in the input distribution's alphabet"
                )));
            }
        }
        px.labels()
            .iter()
            .zip(px.probs())
            .map(
                |(l, &p)| match self.input_labels.iter().position(|c| c == l) {
                    Some(i) => Ok(Some(i)),
                    None if p == 0.0 => Ok(None),
                    None => Err(Error::LabelMismatch(format!(
                        "input symbol `{l}` has positive mass but no channel row"
                    ))),
                },
            )
            .collect()
    }
}

/// A joint distribution over two labeled axes, stored row-major (first axis
/// outer).
#[derive(Debug, Clone, PartialEq)]
pub struct Joint2 {
    a_labels: Vec<String>,
    b_labels: Vec<String>,
    data: Vec<f64>,
}

impl Joint2 {
    pub fn new(a_labels: Vec<String>, b_labels: Vec<String>, mut data: Vec<f64>) -> Result<Self> {
        check_labels(&a_labels)?;
        check_labels(&b_labels)?;
        let expected = a_labels.len() * b_labels.len();
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: data.len(),
            });
        }
        normalize_in_place(&mut data)?;
        Ok(Joint2 {
            a_labels,
            b_labels,
            data,
        })
    }

    /// `P(a, b) = P(a) W(b | a)`.
    pub fn from_input_and_channel(pa: &Pmf, ch: &Channel) -> Result<Self> {
        let rows = ch.align_to(pa)?;
        let nb = ch.n_outputs();
        let mut data = vec![0.0; pa.len() * nb];
        for (a, (&p, row)) in pa.probs().iter().zip(&rows).enumerate() {
            if let Some(r) = row {
                for (b, &w) in ch.row(*r).iter().enumerate() {
                    data[a * nb + b] = p * w;
                }
            }
        }
        Joint2::new(pa.labels().to_vec(), ch.output_labels().to_vec(), data)
    }

    pub fn a_labels(&self) -> &[String] {
        &self.a_labels
    }

    pub fn b_labels(&self) -> &[String] {
        &self.b_labels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.b_labels.len() + b]
    }

    pub fn marginal_a(&self) -> Pmf {
        let nb = self.b_labels.len();
        let probs = self.data.chunks(nb).map(|r| r.iter().sum()).collect();
        Pmf::new(self.a_labels.clone(), probs).expect("marginal of a valid joint")
    }

    pub fn marginal_b(&self) -> Pmf {
        let nb = self.b_labels.len();
        let mut probs = vec![0.0; nb];
        for row in self.data.chunks(nb) {
            for (acc, &v) in probs.iter_mut().zip(row) {
                *acc += v;
            }
        }
        Pmf::new(self.b_labels.clone(), probs).expect("marginal of a valid joint")
    }

    /// Splits the joint into `P(a)` and `P(b | a)`. The channel only has
    /// rows for `a` in the support of `P(a)`.
    pub fn decompose(&self) -> (Pmf, Channel) {
        let pa = self.marginal_a();
        let nb = self.b_labels.len();
        let mut inputs = Vec::new();
        let mut matrix = Vec::new();
        for a in pa.support_indices() {
            inputs.push(self.a_labels[a].clone());
            let row = &self.data[a * nb..(a + 1) * nb];
            let mass: f64 = row.iter().sum();
            matrix.extend(row.iter().map(|v| v / mass));
        }
        let ch = Channel::new(inputs, self.b_labels.clone(), matrix)
            .expect("conditional rows of a valid joint");
        (pa, ch)
    }

    /// Swaps the two axes.
    pub fn transpose(&self) -> Joint2 {
        let (na, nb) = (self.a_labels.len(), self.b_labels.len());
        let mut data = vec![0.0; na * nb];
        for a in 0..na {
            for b in 0..nb {
                data[b * na + a] = self.data[a * nb + b];
            }
        }
        Joint2 {
            a_labels: self.b_labels.clone(),
            b_labels: self.a_labels.clone(),
            data,
        }
    }
}

/// Axis of a [`Joint3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Result of [`Joint3::marginalize`]; axes appear in X, Y, Z order.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    One(Pmf),
    Two(Joint2),
    Three(Joint3),
}

/// A joint distribution over `(X, Y, Z)`, stored X-major then Y then Z.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint3 {
    labels: [Vec<String>; 3],
    data: Vec<f64>,
}

impl Joint3 {
    pub fn new(
        x_labels: Vec<String>,
        y_labels: Vec<String>,
        z_labels: Vec<String>,
        mut data: Vec<f64>,
    ) -> Result<Self> {
        check_labels(&x_labels)?;
        check_labels(&y_labels)?;
        check_labels(&z_labels)?;
        let expected = x_labels.len() * y_labels.len() * z_labels.len();
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: data.len(),
            });
        }
        normalize_in_place(&mut data)?;
        Ok(Joint3 {
            labels: [x_labels, y_labels, z_labels],
            data,
        })
    }

    /// Treats a two-axis joint over `(X, Y)` as a Joint3 with a constant `Z`.
    pub fn from_xy(xy: &Joint2, z_label: &str) -> Joint3 {
        Joint3 {
            labels: [
                xy.a_labels.clone(),
                xy.b_labels.clone(),
                vec![z_label.to_string()],
            ],
            data: xy.data.clone(),
        }
    }

    /// `P(x, y, z) = P(x) P(y | x) P(z | x, y)`. The inputs of `ch_z_given_xy`
    /// are the pair labels `(x,y)` (see [`pair_label`]); rows are only needed
    /// for pairs with positive mass.
    pub fn compose(px: &Pmf, ch_yx: &Channel, ch_z_given_xy: &Channel) -> Result<Joint3> {
        let xy = Joint2::from_input_and_channel(px, ch_yx)?;
        let ny = ch_yx.n_outputs();
        let nz = ch_z_given_xy.n_outputs();
        let mut data = vec![0.0; px.len() * ny * nz];
        for x in 0..px.len() {
            for y in 0..ny {
                let m = xy.get(x, y);
                if m == 0.0 {
                    continue;
                }
                let key = pair_label(&px.labels()[x], &ch_yx.output_labels()[y]);
                let row = ch_z_given_xy.row_by_label(&key)?;
                for (z, &w) in row.iter().enumerate() {
                    data[(x * ny + y) * nz + z] = m * w;
                }
            }
        }
        Joint3::new(
            px.labels().to_vec(),
            ch_yx.output_labels().to_vec(),
            ch_z_given_xy.output_labels().to_vec(),
            data,
        )
    }

    pub fn labels(&self, axis: Axis) -> &[String] {
        &self.labels[axis.index()]
    }

    pub fn x_labels(&self) -> &[String] {
        &self.labels[0]
    }

    pub fn y_labels(&self) -> &[String] {
        &self.labels[1]
    }

    pub fn z_labels(&self) -> &[String] {
        &self.labels[2]
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (
            self.labels[0].len(),
            self.labels[1].len(),
            self.labels[2].len(),
        )
    }

    /// Raw tensor, X-major then Y then Z.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        let (_, ny, nz) = self.dims();
        self.data[(x * ny + y) * nz + z]
    }

    /// Sums out every axis not in `keep`.
    pub fn marginalize(&self, keep: &[Axis]) -> Result<Marginal> {
        let mut kept = [false; 3];
        for a in keep {
            kept[a.index()] = true;
        }
        let axes: Vec<usize> = (0..3).filter(|&i| kept[i]).collect();
        let dims = [
            self.labels[0].len(),
            self.labels[1].len(),
            self.labels[2].len(),
        ];
        match axes.len() {
            0 => Err(Error::EmptyAxisSet),
            3 => Ok(Marginal::Three(self.clone())),
            _ => {
                let size: usize = axes.iter().map(|&a| dims[a]).product();
                let mut out = vec![0.0; size];
                for x in 0..dims[0] {
                    for y in 0..dims[1] {
                        for z in 0..dims[2] {
                            let c = [x, y, z];
                            let idx = axes.iter().fold(0, |acc, &a| acc * dims[a] + c[a]);
                            out[idx] += self.data[(x * dims[1] + y) * dims[2] + z];
                        }
                    }
                }
                if axes.len() == 1 {
                    Pmf::new(self.labels[axes[0]].clone(), out).map(Marginal::One)
                } else {
                    Joint2::new(
                        self.labels[axes[0]].clone(),
                        self.labels[axes[1]].clone(),
                        out,
                    )
                    .map(Marginal::Two)
                }
            }
        }
    }

    /// Marginal pmf of a single axis.
    pub fn marginal(&self, axis: Axis) -> Pmf {
        match self.marginalize(&[axis]) {
            Ok(Marginal::One(p)) => p,
            _ => unreachable!("single-axis marginal"),
        }
    }

    /// Joint marginal of two distinct axes, in X, Y, Z order.
    pub fn pair_marginal(&self, a: Axis, b: Axis) -> Result<Joint2> {
        if a == b {
            return Err(Error::InvalidParameter(
                "pair marginal needs two distinct axes".to_string(),
            ));
        }
        match self.marginalize(&[a, b])? {
            Marginal::Two(j) => Ok(j),
            _ => unreachable!("two-axis marginal"),
        }
    }

    pub fn xy_marginal(&self) -> Joint2 {
        self.pair_marginal(Axis::X, Axis::Y).expect("distinct axes")
    }

    /// `P(X, Y | Z = z)`.
    pub fn condition_on_event(&self, z: &str) -> Result<Joint2> {
        let zi = position(&self.labels[2], z)?;
        let (nx, ny, nz) = self.dims();
        let mut out = Vec::with_capacity(nx * ny);
        for x in 0..nx {
            for y in 0..ny {
                out.push(self.data[(x * ny + y) * nz + zi]);
            }
        }
        let mass: f64 = out.iter().sum();
        if mass <= 0.0 {
            return Err(Error::ZeroProbabilityEvent(z.to_string()));
        }
        out.iter_mut().for_each(|v| *v /= mass);
        Joint2::new(self.labels[0].clone(), self.labels[1].clone(), out)
    }

    /// Reorders axes: `order[k]` names the source axis placed at position k.
    pub fn permute(&self, order: [Axis; 3]) -> Result<Joint3> {
        let src = order.map(Axis::index);
        let mut seen = [false; 3];
        for &s in &src {
            seen[s] = true;
        }
        if seen.contains(&false) {
            return Err(Error::InvalidParameter(
                "axis permutation must use each axis once".to_string(),
            ));
        }
        let d = [
            self.labels[0].len(),
            self.labels[1].len(),
            self.labels[2].len(),
        ];
        let nd = src.map(|s| d[s]);
        let mut data = vec![0.0; self.data.len()];
        for x in 0..d[0] {
            for y in 0..d[1] {
                for z in 0..d[2] {
                    let c = [x, y, z];
                    let n = src.map(|s| c[s]);
                    data[(n[0] * nd[1] + n[1]) * nd[2] + n[2]] =
                        self.data[(x * d[1] + y) * d[2] + z];
                }
            }
        }
        Ok(Joint3 {
            labels: src.map(|s| self.labels[s].clone()),
            data,
        })
    }

    /// The joint of `X` and the composite release `(Y, Z)`.
    pub fn merge_yz(&self) -> Joint2 {
        let b_labels = self.labels[1]
            .iter()
            .flat_map(|y| self.labels[2].iter().map(move |z| pair_label(y, z)))
            .collect();
        Joint2 {
            a_labels: self.labels[0].clone(),
            b_labels,
            data: self.data.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn bsc_markov_joint(p: f64, q: f64) -> Joint3 {
        // X uniform, Y = BSC(p)(X), Z = BSC(q)(X)
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

    #[test]
    fn rejects_bad_mass_and_negative_entries() {
        assert!(matches!(
            Pmf::from_probs(&[0.5, 0.4]),
            Err(Error::MassMismatch { .. })
        ));
        assert!(matches!(
            Pmf::from_probs(&[1.1, -0.1]),
            Err(Error::InvalidEntry { index: 1, .. })
        ));
        assert!(matches!(
            Pmf::from_probs(&[f64::NAN, 1.0]),
            Err(Error::InvalidEntry { index: 0, .. })
        ));
        // round-off is tolerated and renormalized away
        let p = Pmf::from_probs(&[0.5 + 4e-10, 0.5, -5e-13]).unwrap();
        assert_eq!(p.probs()[2], 0.0);
        assert!(close(p.probs().iter().sum::<f64>(), 1.0, 1e-15));
    }

    #[test]
    fn labels_must_be_unique_and_nonempty() {
        assert!(matches!(
            Pmf::from_labels(&["a", "a"], &[0.5, 0.5]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(Pmf::from_probs(&[]), Err(Error::EmptyAlphabet)));
        assert!(matches!(
            Pmf::from_labels(&["a"], &[0.5, 0.5]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn support_examples() {
        let p = Pmf::from_probs(&[0.5, 0.5, 0.0]).unwrap();
        assert_eq!(p.support(), ["0", "1"]);
        let p = Pmf::point_mass(&["a", "b", "c"], "b").unwrap();
        assert_eq!(p.support(), ["b"]);
        // 1e-15 falls below the zero clamp
        let p = Pmf::from_probs(&[1e-15, 1.0 - 1e-15]).unwrap();
        assert_eq!(p.support(), ["1"]);
        assert_eq!(p.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn restrict_support_examples() {
        let u = Pmf::uniform(&["a", "b", "c"]).unwrap();
        let r = u.restrict_support(&["a", "c"]).unwrap();
        assert!(close(r.probs()[0], 0.5, 1e-15));
        assert_eq!(r.probs()[1], 0.0);
        assert!(close(r.probs()[2], 0.5, 1e-15));

        let p = Pmf::from_probs(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(p.restrict_support(&["0", "1", "2"]).unwrap(), p);
        let r = p.restrict_support(&["0", "2"]).unwrap();
        assert!(close(r.probs()[0], 2.0 / 7.0, 1e-15));
        assert!(close(r.probs()[2], 5.0 / 7.0, 1e-15));

        let q = Pmf::from_probs(&[0.0, 1.0]).unwrap();
        assert_eq!(q.restrict_support(&["0"]), Err(Error::EmptySupport));
        assert!(matches!(
            q.restrict_support(&["zz"]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn marginalize_examples() {
        let u = Joint3::new(
            index_labels(2),
            index_labels(2),
            index_labels(2),
            vec![0.125; 8],
        )
        .unwrap();
        match u.marginalize(&[Axis::X]).unwrap() {
            Marginal::One(p) => assert_eq!(p.probs(), &[0.5, 0.5]),
            other => panic!("{other:?}"),
        }

        let mut data = vec![0.0; 8];
        data[(0 * 2 + 1) * 2 + 0] = 1.0;
        let pm = Joint3::new(index_labels(2), index_labels(2), index_labels(2), data).unwrap();
        assert_eq!(pm.marginal(Axis::Y).probs(), &[0.0, 1.0]);

        // BSC side information with p = q = 0.25: summing z leaves the BSC(0.25) joint
        let j = bsc_markov_joint(0.25, 0.25);
        let xy = j.xy_marginal();
        let expect = [0.375, 0.125, 0.125, 0.375];
        for (a, b) in xy.data().iter().zip(expect) {
            assert!(close(*a, b, 1e-15));
        }
        assert_eq!(u.marginalize(&[]), Err(Error::EmptyAxisSet));
        // duplicated / unordered axes are canonicalized
        match j.marginalize(&[Axis::Z, Axis::X, Axis::Z]).unwrap() {
            Marginal::Two(xz) => {
                assert_eq!(xz.a_labels(), j.x_labels());
                assert!(close(xz.get(0, 0), 0.375, 1e-15));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn condition_on_event_examples() {
        // Bayes by hand: P(X=0 | Z=1) = 0.5*0.25 / 0.5 = 0.25
        let j = bsc_markov_joint(0.25, 0.25);
        let c = j.condition_on_event("1").unwrap();
        let px = c.marginal_a();
        assert!(close(px.probs()[0], 0.25, 1e-15));
        assert!(close(px.probs()[1], 0.75, 1e-15));

        // independent Z leaves the (X, Y) joint unchanged
        let xy = Joint2::new(index_labels(2), index_labels(2), vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let mut data = Vec::new();
        for v in xy.data() {
            data.extend([v * 0.3, v * 0.7]);
        }
        let j = Joint3::new(index_labels(2), index_labels(2), index_labels(2), data).unwrap();
        for z in ["0", "1"] {
            let c = j.condition_on_event(z).unwrap();
            for (a, b) in c.data().iter().zip(xy.data()) {
                assert!(close(*a, *b, 1e-15));
            }
        }

        let mut data = vec![0.0; 8];
        data[0] = 1.0;
        let pm = Joint3::new(index_labels(2), index_labels(2), index_labels(2), data).unwrap();
        assert_eq!(
            pm.condition_on_event("1"),
            Err(Error::ZeroProbabilityEvent("1".into()))
        );
    }

    #[test]
    fn decompose_skips_zero_mass_rows() {
        let j = Joint2::new(
            index_labels(3),
            index_labels(2),
            vec![0.5, 0.0, 0.0, 0.0, 0.25, 0.25],
        )
        .unwrap();
        let (pa, ch) = j.decompose();
        assert_eq!(pa.support(), ["0", "2"]);
        assert_eq!(ch.input_labels(), ["0", "2"]);
        assert_eq!(ch.row(1), &[0.5, 0.5]);
        // and the aligned view maps symbol 1 to no row
        assert_eq!(ch.align_to(&pa).unwrap(), vec![Some(0), None, Some(1)]);
    }

    #[test]
    fn alignment_is_by_label() {
        let px = Pmf::from_labels(&["b", "a"], &[0.25, 0.75]).unwrap();
        let ch = Channel::from_rows(&["a", "b"], &["y"], &[&[1.0], &[1.0]]).unwrap();
        assert_eq!(ch.align_to(&px).unwrap(), vec![Some(1), Some(0)]);
        let ch = Channel::from_rows(&["a", "c"], &["y"], &[&[1.0], &[1.0]]).unwrap();
        assert!(matches!(ch.align_to(&px), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn alpha_parsing() {
        assert_eq!("1".parse::<AlphaOrder>().unwrap(), AlphaOrder::One);
        assert_eq!("1.0".parse::<AlphaOrder>().unwrap(), AlphaOrder::One);
        assert_eq!("inf".parse::<AlphaOrder>().unwrap(), AlphaOrder::Infinity);
        assert_eq!(
            "2.5".parse::<AlphaOrder>().unwrap(),
            AlphaOrder::Finite(2.5)
        );
        assert!("0".parse::<AlphaOrder>().is_err());
        assert!("-2".parse::<AlphaOrder>().is_err());
        assert!("abc".parse::<AlphaOrder>().is_err());
        assert_eq!(AlphaOrder::Finite(1.0).checked().unwrap(), AlphaOrder::One);
        assert!(AlphaOrder::Finite(0.5).checked_leakage().is_err());
        assert_eq!(std::format!("{}", AlphaOrder::Infinity), "inf");
    }

    #[test]
    fn permute_and_merge() {
        let j = bsc_markov_joint(0.1, 0.3);
        let p = j.permute([Axis::X, Axis::Z, Axis::Y]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    assert_eq!(p.get(x, z, y), j.get(x, y, z));
                }
            }
        }
        let m = j.merge_yz();
        assert_eq!(m.b_labels()[1], "(0,1)");
        assert!(j.permute([Axis::X, Axis::X, Axis::Y]).is_err());
    }

    #[test]
    fn channel_compose_and_constructors() {
        let a = Channel::binary_symmetric(0.1).unwrap();
        let b = Channel::binary_symmetric(0.2).unwrap();
        let c = a.compose(&b).unwrap();
        // crossover of cascade: 0.1*0.8 + 0.9*0.2
        assert!(close(c.row(0)[1], 0.26, 1e-15));
        assert!(Channel::binary_symmetric(1.5).is_err());
        let id = Channel::identity(&["a", "b"]).unwrap();
        assert_eq!(id.row_by_label("b").unwrap(), &[0.0, 1.0]);
        let k = Channel::constant(&["a", "b"], &Pmf::from_probs(&[0.3, 0.7]).unwrap()).unwrap();
        assert_eq!(k.row(0), k.row(1));
    }
}
