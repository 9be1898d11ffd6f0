//! Input-output tasks: input pseudosphere, output complex and the facet-level
//! carrier map Δ, built by enumerating `I^n × O^n` against a legality predicate.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplicial::{pseudosphere, CSimplex, ChromaticComplex, Label};

/// Exact rational number, always reduced with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub fn integer(v: i64) -> Self {
        Rational(Ratio::from_integer(v))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn label(&self) -> Label {
        Label::new(self.to_string())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad rational {s:?}"));
        match s.trim().split_once('/') {
            Some((p, q)) => Rational::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Rational::integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

macro_rules! rational_op {
    ($tr:ident, $f:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational(self.0.$f(rhs.0))
            }
        }
    };
}
rational_op!(Add, add);
rational_op!(Sub, sub);
rational_op!(Mul, mul);
rational_op!(Div, div);

/// A task `(I, O, F)` in topological form.
#[derive(Clone, Debug)]
pub struct Task {
    n: usize,
    input_values: Vec<Label>,
    output_values: Vec<Label>,
    input_complex: ChromaticComplex,
    output_complex: ChromaticComplex,
    /// Indexed by input tuple (mixed radix over `input_values`, process 0
    /// most significant); each entry lists legal output tuples as indices
    /// into `output_values`, in lexicographic order.
    delta: Vec<Vec<Vec<u16>>>,
}

fn distinct_labels<T: fmt::Display>(values: &[T]) -> Result<Vec<Label>> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    let labels: Vec<Label> = values.iter().map(|v| Label::new(v.to_string())).collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::InvalidParameter(format!("duplicate value {l}")));
        }
    }
    Ok(labels)
}

/// Decodes `idx` into `n` digits base `base`, most significant first.
pub(crate) fn decode_tuple(mut idx: usize, base: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for d in digits.iter_mut().rev() {
        *d = idx % base;
        idx /= base;
    }
    digits
}

fn tuple_count(base: usize, n: usize) -> Result<usize> {
    base.checked_pow(n as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::InvalidParameter(format!("{base}^{n} tuples is too many to enumerate")))
}

/// Builds `𝓘 = Ψ([n], I)`, `𝓞` and `Δ` by full enumeration. `legal(input,
/// output)` is the task relation `F`; an input tuple with no legal output
/// makes the task unsatisfiable.
pub fn make_task<T, U, F>(n: usize, inputs: &[T], outputs: &[U], legal: F) -> Result<Task>
where
    T: fmt::Display + Clone,
    U: fmt::Display + Clone,
    F: Fn(&[T], &[U]) -> bool,
{
    if n == 0 {
        return Err(Error::ProcessCount { n, max: usize::MAX });
    }
    let input_values = distinct_labels(inputs)?;
    let output_values = distinct_labels(outputs)?;
    if output_values.len() > u16::MAX as usize {
        return Err(Error::InvalidParameter("too many output values".into()));
    }
    let in_count = tuple_count(inputs.len(), n)?;
    let out_count = tuple_count(outputs.len(), n)?;
    let out_tuples: Vec<Vec<usize>> = (0..out_count).map(|j| decode_tuple(j, outputs.len(), n)).collect();

    let mut delta = Vec::with_capacity(in_count);
    for i in 0..in_count {
        let in_tuple: Vec<T> = decode_tuple(i, inputs.len(), n).into_iter().map(|d| inputs[d].clone()).collect();
        let legal_outputs: Vec<Vec<u16>> = out_tuples
            .iter()
            .filter(|t| {
                let out: Vec<U> = t.iter().map(|&d| outputs[d].clone()).collect();
                legal(&in_tuple, &out)
            })
            .map(|t| t.iter().map(|&d| d as u16).collect())
            .collect();
        if legal_outputs.is_empty() {
            let facet = CSimplex::from_labels(in_tuple.iter().map(|v| v.to_string()));
            return Err(Error::Unsatisfiable(facet.to_string()));
        }
        delta.push(legal_outputs);
    }

    let input_complex = pseudosphere(n, &input_values)?;
    let mut used = vec![false; out_count];
    for t in delta.iter().flatten() {
        let idx = t.iter().fold(0usize, |acc, &d| acc * outputs.len() + d as usize);
        used[idx] = true;
    }
    let output_complex = ChromaticComplex::from_facets(
        (0..out_count)
            .filter(|&j| used[j])
            .map(|j| CSimplex::from_labels(out_tuples[j].iter().map(|&d| output_values[d].clone()))),
    );
    Ok(Task { n, input_values, output_values, input_complex, output_complex, delta })
}

/// Consensus: everyone outputs the same value, which some process proposed.
pub fn consensus_task<T: fmt::Display + Clone + PartialEq>(n: usize, values: &[T]) -> Result<Task> {
    kset_task(n, values, 1)
}

/// k-set agreement: at most `k` distinct outputs, each some process's input.
pub fn kset_task<T: fmt::Display + Clone + PartialEq>(n: usize, values: &[T], k: usize) -> Result<Task> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    make_task(n, values, values, |inp, out| {
        let mut distinct: Vec<&T> = Vec::new();
        for v in out {
            if !inp.contains(v) {
                return false;
            }
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
        distinct.len() <= k
    })
}

/// The output grid `{0, 1/m, ..., 1}`.
pub fn grid(m: u64) -> Vec<Rational> {
    (0..=m as i64).map(|i| Rational::new(i, m as i64).expect("m >= 1")).collect()
}

/// ε-approximate agreement on binary inputs with outputs on the `1/m` grid:
/// unanimous inputs force that output, otherwise any outputs within `eps`.
pub fn approx_task(n: usize, m: u64, eps: Rational) -> Result<Task> {
    if m == 0 || m > i64::MAX as u64 {
        return Err(Error::InvalidParameter("grid denominator m must be at least 1".into()));
    }
    if eps <= Rational::zero() {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    if eps * Rational::integer(m as i64) < Rational::one() {
        return Err(Error::InvalidParameter(format!("eps * m = {eps} * {m} < 1")));
    }
    let inputs = [Rational::zero(), Rational::one()];
    make_task(n, &inputs, &grid(m), |inp, out| {
        let (lo, hi) = (out.iter().min().unwrap(), out.iter().max().unwrap());
        if inp.iter().all(|v| *v == inp[0]) {
            out.iter().all(|v| *v == inp[0])
        } else {
            *hi - *lo <= eps
        }
    })
}

impl Task {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn input_values(&self) -> &[Label] {
        &self.input_values
    }

    pub fn output_values(&self) -> &[Label] {
        &self.output_values
    }

    pub fn input_complex(&self) -> &ChromaticComplex {
        &self.input_complex
    }

    pub fn output_complex(&self) -> &ChromaticComplex {
        &self.output_complex
    }

    /// Number of input facets, `|I|^n`.
    pub fn input_facet_count(&self) -> usize {
        self.delta.len()
    }

    /// Value indices of input facet `idx`, process 0 first.
    pub fn input_tuple(&self, idx: usize) -> Vec<usize> {
        decode_tuple(idx, self.input_values.len(), self.n)
    }

    pub fn input_facet(&self, idx: usize) -> CSimplex {
        CSimplex::from_labels(self.input_tuple(idx).into_iter().map(|d| self.input_values[d].clone()))
    }

    /// Index of the input facet with these labels, if it is one.
    pub fn input_facet_index(&self, facet: &CSimplex) -> Option<usize> {
        if facet.len() != self.n {
            return None;
        }
        facet.vertices().iter().try_fold(0usize, |acc, v| {
            let d = self.input_values.iter().position(|l| *l == v.label)?;
            Some(acc * self.input_values.len() + d)
        })
    }

    /// Legal output tuples of input facet `idx` as output-value indices.
    pub fn delta_tuples(&self, idx: usize) -> &[Vec<u16>] {
        &self.delta[idx]
    }

    /// `Δ(σ)` as output facets, or `None` if `sigma` is not an input facet.
    pub fn delta(&self, sigma: &CSimplex) -> Option<Vec<CSimplex>> {
        let idx = self.input_facet_index(sigma)?;
        Some(
            self.delta[idx]
                .iter()
                .map(|t| CSimplex::from_labels(t.iter().map(|&d| self.output_values[d as usize].clone())))
                .collect(),
        )
    }

    pub fn output_index(&self, label: &Label) -> Option<usize> {
        self.output_values.iter().position(|l| l == label)
    }

    /// Whether the output labels (process 0 first) form a facet of `Δ(input facet idx)`.
    pub fn is_legal(&self, idx: usize, outputs: &[Label]) -> bool {
        let Some(t) = outputs
            .iter()
            .map(|l| self.output_index(l).map(|d| d as u16))
            .collect::<Option<Vec<u16>>>()
        else {
            return false;
        };
        self.delta[idx].binary_search(&t).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Consensus,
    Kset,
    Approx,
}

/// JSON task descriptor:
/// `{"kind": "consensus"|"kset"|"approx", "n": .., "values": [..], "k": .., "m": .., "eps": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskDescriptor {
    pub kind: TaskKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
}

impl TaskDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn value_labels(&self) -> Result<Vec<String>> {
        self.values
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(x) => Ok(x.to_string()),
                serde_json::Value::Bool(b) => Ok(b.to_string()),
                other => Err(Error::Parse(format!("unsupported value {other}"))),
            })
            .collect()
    }

    pub fn build(&self) -> Result<Task> {
        let missing = |what: &str| Error::InvalidParameter(format!("{what} is required for this task kind"));
        match self.kind {
            TaskKind::Consensus => consensus_task(self.n, &self.value_labels()?),
            TaskKind::Kset => kset_task(self.n, &self.value_labels()?, self.k.ok_or_else(|| missing("k"))?),
            TaskKind::Approx => {
                let labels = self.value_labels()?;
                if !labels.is_empty() && labels != ["0", "1"] {
                    return Err(Error::InvalidParameter("approximate agreement takes inputs [0, 1]".into()));
                }
                let eps: Rational = self.eps.as_deref().ok_or_else(|| missing("eps"))?.parse()?;
                approx_task(self.n, self.m.ok_or_else(|| missing("m"))?, eps)
            }
        }
    }
}
