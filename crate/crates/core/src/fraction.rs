//! Exact evaluation of the continued fractions `c(q, m)` and their weights.
//!
//! For a parameter `q > 0` and an integer vector `m = (m_0, ..., m_k)` the
//! fraction is built from the recurrence
//!
//! ```text
//! c(q, m_0) = m_0,    c(q, m_j) = m_j + 1 / (q * c(q, m_{j-1}))
//! ```
//!
//! and the weight is `w_q(m) = q^{k/2} * prod_{j<k} |c(q, m_j)|`. Weights are
//! carried as exact squares ([`WeightSq`]) so everything stays in the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QfracError, Result};

/// A positive rational parameter `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conductor(BigRational);

impl Conductor {
    pub fn new(q: BigRational) -> Result<Self> {
        if q.is_positive() {
            Ok(Conductor(q))
        } else {
            Err(QfracError::NonPositiveConductor(q.to_string()))
        }
    }

    /// `a / b`, reduced. Fails unless the quotient is positive.
    pub fn from_parts(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if b.is_zero() {
            return Err(QfracError::NonPositiveConductor(format!("{a}/0")));
        }
        Self::new(BigRational::new(a, b))
    }

    pub fn ratio(a: i64, b: i64) -> Self {
        Self::from_parts(a, b).expect("positive conductor")
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// Numerator of the reduced fraction.
    pub fn a(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator of the reduced fraction.
    pub fn b(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Conductor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Conductor {
    type Err = QfracError;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_rational(s)?;
        Conductor::new(r)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || QfracError::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// An integer vector `(m_0, ..., m_k)` with `k >= 0`.
///
/// Whether it is a path depends on `q`; see [`is_path`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<BigInt>);

impl Path {
    pub fn new(entries: Vec<BigInt>) -> Result<Self> {
        if entries.is_empty() {
            Err(QfracError::EmptyPath)
        } else {
            Ok(Path(entries))
        }
    }

    /// Panics on an empty slice.
    pub fn from_i64s(entries: &[i64]) -> Self {
        Path::new(entries.iter().map(|&e| BigInt::from(e)).collect()).expect("non-empty path")
    }

    /// The trivial loop `(0)`.
    pub fn trivial() -> Self {
        Path(vec![BigInt::zero()])
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    /// The length `k` (one less than the number of entries).
    pub fn length(&self) -> usize {
        self.0.len() - 1
    }

    pub fn last(&self) -> &BigInt {
        self.0.last().expect("non-empty")
    }

    /// The prefix `m_j = (m_0, ..., m_j)`.
    pub fn prefix(&self, j: usize) -> Path {
        Path(self.0[..=j].to_vec())
    }

    pub fn is_trivial(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_zero()
    }

    /// `(-m_0, ..., -m_k)`.
    pub fn negated(&self) -> Path {
        Path(self.0.iter().map(|e| -e).collect())
    }

    /// `(m_k, ..., m_0)`.
    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().cloned().collect())
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.0.iter().map(|e| e.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Path {
    type Err = QfracError;

    /// Accepts `1,-1,-3`, `(1, -1, -3)` or `[1,-1,-3]`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let entries = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| QfracError::Parse(format!("bad path entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Path::new(entries)
    }
}

/// The exact square of a weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightSq {
    value: BigRational,
    odd_length: bool,
}

impl WeightSq {
    pub fn new(value: BigRational, odd_length: bool) -> Self {
        debug_assert!(value.is_positive());
        WeightSq { value, odd_length }
    }

    pub fn one() -> Self {
        WeightSq::new(BigRational::one(), false)
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn odd_length(&self) -> bool {
        self.odd_length
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    /// The weight itself: `"sqrt(1/4)"` for odd length, whose weights lie in
    /// `sqrt(q) Q`; otherwise `"1/3"`, or `"sqrt(2)"` if the square is not a
    /// rational square.
    pub fn display_root(&self) -> String {
        match rational_sqrt(&self.value) {
            Some(r) if !self.odd_length => r.to_string(),
            _ => format!("sqrt({})", self.value),
        }
    }
}

impl fmt::Display for WeightSq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub(crate) fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Exact `n`-th root of a positive rational, when it exists.
pub(crate) fn rational_nth_root(r: &BigRational, n: u32) -> Option<BigRational> {
    if n == 0 || !r.is_positive() {
        return None;
    }
    let n_root = r.numer().nth_root(n);
    let d_root = r.denom().nth_root(n);
    (num_traits::pow(n_root.clone(), n as usize) == *r.numer()
        && num_traits::pow(d_root.clone(), n as usize) == *r.denom())
    .then(|| BigRational::new(n_root, d_root))
}

/// Result of evaluating all prefixes of a vector at a fixed `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEval {
    /// `c(q, m_j)` for every prefix that could be evaluated.
    pub prefix_values: Vec<BigRational>,
    /// First index whose denominator vanished, i.e. `c(q, m_{j-1}) = 0`.
    pub failed_at: Option<usize>,
    /// Present exactly when the vector is a path.
    pub weight_sq: Option<WeightSq>,
}

impl PathEval {
    pub fn is_path(&self) -> bool {
        self.failed_at.is_none()
    }

    pub fn value(&self) -> Option<&BigRational> {
        if self.is_path() {
            self.prefix_values.last()
        } else {
            None
        }
    }

    pub fn is_loop(&self) -> bool {
        self.value().is_some_and(Zero::is_zero)
    }
}

/// Evaluates `c(q, m_j)` for all prefixes together with the squared weight.
pub fn eval(q: &Conductor, m: &Path) -> PathEval {
    let q = q.value();
    let entries = m.entries();
    let mut prefix_values = Vec::with_capacity(entries.len());
    let mut weight_sq = BigRational::one();
    let mut current = BigRational::from_integer(entries[0].clone());
    prefix_values.push(current.clone());
    for (j, mj) in entries.iter().enumerate().skip(1) {
        if current.is_zero() {
            return PathEval {
                prefix_values,
                failed_at: Some(j),
                weight_sq: None,
            };
        }
        let denom = q * &current;
        weight_sq *= &denom * &current;
        current = BigRational::from_integer(mj.clone()) + denom.recip();
        prefix_values.push(current.clone());
    }
    PathEval {
        prefix_values,
        failed_at: None,
        weight_sq: Some(WeightSq::new(weight_sq, m.length() % 2 == 1)),
    }
}

/// All prefix values `c(q, m_j)`, `j < k`, are non-zero.
pub fn is_path(q: &Conductor, m: &Path) -> bool {
    eval(q, m).is_path()
}

/// `m_j != 0` for `j = 0, ..., k-1`. The last entry is unconstrained.
pub fn is_proper(m: &Path) -> bool {
    let e = m.entries();
    e[..e.len() - 1].iter().all(|x| !x.is_zero())
}

pub fn is_loop(q: &Conductor, m: &Path) -> bool {
    eval(q, m).is_loop()
}

/// Removes interior zeros with `(.., a, 0, b, ..) -> (.., a + b, ..)` until
/// none are left. Value and weight are unchanged wherever both are paths.
pub fn zero_skip(m: &Path) -> Path {
    let mut v = m.entries().to_vec();
    while let Some(j) = (1..v.len().saturating_sub(1)).find(|&j| v[j].is_zero()) {
        let next = v.remove(j + 1);
        v.remove(j);
        v[j - 1] += next;
    }
    Path(v)
}

/// The loop-group product `(m_0, ..., m_k + n_0, ..., n_l)`. No zero-skipping.
pub fn compose(m: &Path, n: &Path) -> Path {
    let mut v = m.entries().to_vec();
    let mut rest = n.entries().iter();
    let first = rest.next().expect("non-empty");
    *v.last_mut().expect("non-empty") += first;
    v.extend(rest.cloned());
    Path(v)
}

/// `(-m_k, ..., -m_0)`.
pub fn inverse(m: &Path) -> Path {
    Path(m.entries().iter().rev().map(|e| -e).collect())
}

/// For proper paths with `c(q, m) = c(q, n)`, the proper loop `u` with
/// `m = (u n)*`.
pub fn loop_difference(q: &Conductor, m: &Path, n: &Path) -> Result<Path> {
    let em = eval(q, m);
    let en = eval(q, n);
    for (p, e) in [(m, &em), (n, &en)] {
        if !e.is_path() || !is_proper(p) {
            return Err(QfracError::NotProperPath(p.to_string(), q.to_string()));
        }
    }
    let (vm, vn) = (em.value().expect("path"), en.value().expect("path"));
    if vm != vn {
        return Err(QfracError::ValueMismatch(vm.to_string(), vn.to_string()));
    }
    let ne = n.entries();
    let mut v = m.entries().to_vec();
    *v.last_mut().expect("non-empty") -= ne.last().expect("non-empty");
    v.extend(ne[..ne.len() - 1].iter().rev().map(|e| -e));
    Ok(zero_skip(&Path(v)))
}

/// Lexicographically smallest of `m`, `-m`, `rev(m)` and `-rev(m)`.
///
/// All four are loops whenever `m` is; reversal inverts the weight.
pub fn canonical_symmetry_image(m: &Path) -> Path {
    let r = m.reversed();
    [m.negated(), r.negated(), r, m.clone()]
        .into_iter()
        .min()
        .expect("four candidates")
}
