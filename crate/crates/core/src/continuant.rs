//! Continuant polynomials `P_l(x, m)`, `Q_l(x, m)` and the multilinear loop
//! equation obtained by clearing denominators at `x = a/b`.
//!
//! ```text
//! P_0 = m_0,  Q_0 = 1,  P_l = m_l x P_{l-1} + Q_{l-1},  Q_l = x P_{l-1}
//! ```
//!
//! so that `c(x, m) = P_k / Q_k` as rational functions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{QfracError, Result};
use crate::fraction::{Conductor, Path, WeightSq};

/// Dense integer polynomial in `x`; index is the power.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> BigInt {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs }
    }

    pub fn mul_x_pow(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.mul_x())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `(P_l(x, m), Q_l(x, m))` for one prefix length `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuantPair {
    pub p: IntPolynomial,
    pub q: IntPolynomial,
}

/// `(P_l, Q_l)` for `l = 0, ..., k`.
pub fn pq_polys(m: &Path) -> Vec<ContinuantPair> {
    let entries = m.entries();
    let mut out = Vec::with_capacity(entries.len());
    out.push(ContinuantPair {
        p: IntPolynomial::constant(entries[0].clone()),
        q: IntPolynomial::constant(1),
    });
    for ml in &entries[1..] {
        let prev = out.last().expect("non-empty");
        let xp = prev.p.mul_x();
        out.push(ContinuantPair {
            p: xp.scale(ml).add(&prev.q),
            q: xp,
        });
    }
    out
}

/// Path test through the continuants: `P_l(q, m) != 0` for `l < k`.
pub fn p2_is_path(q: &Conductor, m: &Path) -> bool {
    let pq = pq_polys(m);
    pq[..pq.len() - 1].iter().all(|c| !c.p.eval(q.value()).is_zero())
}

pub fn p2_is_loop(q: &Conductor, m: &Path) -> bool {
    p2_is_path(q, m) && pq_polys(m).last().expect("non-empty").p.eval(q.value()).is_zero()
}

/// `w_q(m)^2 = q^{-k} Q_k(q, m)^2`; `None` when `m` is not a path.
pub fn p2_weight_sq(q: &Conductor, m: &Path) -> Option<WeightSq> {
    if !p2_is_path(q, m) {
        return None;
    }
    let k = m.length();
    let qk = pq_polys(m).last().expect("non-empty").q.eval(q.value());
    let scale = num_traits::pow(q.value().recip(), k);
    Some(WeightSq::new(&qk * &qk * scale, k % 2 == 1))
}

/// `H(x) = P_k(x, m) Q_l(x, n) - P_l(x, n) Q_k(x, m)`; identically zero
/// exactly when `R(x, m) = R(x, n)`.
pub fn cross_polynomial(m: &Path, n: &Path) -> IntPolynomial {
    let pm = pq_polys(m).pop().expect("non-empty");
    let pn = pq_polys(n).pop().expect("non-empty");
    pm.p.mul(&pn.q).sub(&pn.p.mul(&pm.q))
}

/// Subsets `{a_0 < ... < a_{size-1}}` of `{0, ..., h}` with `a_i = i (mod 2)`.
///
/// `size` is `j + 1` for the family usually written `I(h, j)`; `size = 0`
/// yields the single empty set.
pub fn index_sets(h: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(h: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let parity = cur.len() % 2;
        let mut a = start + (start + parity) % 2;
        while a <= h {
            cur.push(a);
            rec(h, size, a + 1, cur, out);
            cur.pop();
            a += 2;
        }
    }
    let mut out = Vec::new();
    rec(h, size, 0, &mut Vec::new(), &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `|I(h, j)|`: the number of alternating-parity subsets of `{0..h}` with
/// `j + 1` elements, `C(floor((h + j) / 2) + 1, j + 1)`.
pub fn count_index_sets(h: u64, j: u64) -> BigInt {
    binomial((h + j) / 2 + 1, j + 1)
}

/// Checks `sum_{i=0}^{m} (-1)^i C(n-i, n-2i) C(n-2i, m-i) = 1` for
/// `n >= 0`, `0 <= 2m <= n`.
pub fn alt_binomial_identity(n: u64, m: u64) -> bool {
    assert!(2 * m <= n, "need 0 <= 2m <= n");
    let sum = (0..=m).fold(BigInt::zero(), |acc, i| {
        let term = binomial(n - i, n - 2 * i) * binomial(n - 2 * i, m - i);
        if i % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    });
    sum.is_one()
}

fn subset_product(m: &[BigInt], set: &[usize]) -> BigInt {
    set.iter().fold(BigInt::one(), |acc, &i| acc * &m[i])
}

/// `P_l(x, m)` from the explicit sum over alternating index sets:
///
/// ```text
/// P_{2k-1} = x^{k-1} sum_{j=0}^{k} (sum_{A in I(2k-1, 2j-1)} prod_{i in A} m_i) x^j
/// P_{2k}   = x^k     sum_{j=0}^{k} (sum_{A in I(2k, 2j)}     prod_{i in A} m_i) x^j
/// ```
pub fn closed_form_p(l: usize, m: &Path) -> IntPolynomial {
    let e = m.entries();
    assert!(e.len() > l, "path too short for P_{l}");
    let half = l.div_ceil(2);
    let even = l.is_multiple_of(2);
    let shift = if even { half } else { half - 1 };
    let size_of = |j: usize| 2 * j + usize::from(even);
    let coeffs = (0..=half)
        .map(|j| {
            index_sets(l, size_of(j))
                .iter()
                .map(|a| subset_product(e, a))
                .sum::<BigInt>()
        })
        .collect();
    IntPolynomial::from_coeffs(coeffs).mul_x_pow(shift)
}

/// An integer multilinear polynomial `sum_A c_A prod_{i in A} m_i` with the
/// subsets `A` encoded as bit masks over `num_vars` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultilinearForm {
    num_vars: usize,
    terms: BTreeMap<u64, BigInt>,
}

impl MultilinearForm {
    pub fn new(num_vars: usize) -> Self {
        assert!(num_vars <= 64, "at most 64 variables");
        MultilinearForm {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<u64, BigInt> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mask: u64) -> BigInt {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn coefficient_of(&self, vars: &[usize]) -> BigInt {
        self.coefficient(vars.iter().fold(0, |m, &v| m | (1u64 << v)))
    }

    pub fn add_term(&mut self, mask: u64, c: &BigInt) {
        debug_assert!(self.num_vars == 64 || mask >> self.num_vars == 0);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    /// Union of the variables that occur in some term.
    pub fn support(&self) -> u64 {
        self.terms.keys().fold(0, |acc, m| acc | m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, values: &[BigInt]) -> BigInt {
        assert_eq!(values.len(), self.num_vars);
        self.terms
            .iter()
            .map(|(&mask, c)| {
                (0..self.num_vars)
                    .filter(|i| mask >> i & 1 == 1)
                    .fold(c.clone(), |acc, i| acc * &values[i])
            })
            .sum()
    }

    /// Fixes variable `var` to `value`; the variable no longer occurs.
    pub fn substitute(&self, var: usize, value: &BigInt) -> MultilinearForm {
        let bit = 1u64 << var;
        let mut out = MultilinearForm::new(self.num_vars);
        for (&mask, c) in &self.terms {
            if mask & bit == 0 {
                out.add_term(mask, c);
            } else if !value.is_zero() {
                out.add_term(mask & !bit, &(c * value));
            }
        }
        out
    }

    /// Number of terms left after fixing `var` (to a non-zero value, barring
    /// cancellation).
    pub fn surviving_terms(&self, var: usize) -> usize {
        let bit = 1u64 << var;
        let reduced: std::collections::BTreeSet<u64> = self.terms.keys().map(|m| m & !bit).collect();
        reduced.len()
    }

    /// Common factor of all coefficients (zero for the zero form).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

impl fmt::Display for MultilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest degree first, like the usual display.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (std::cmp::Reverse(m.count_ones()), **m));
        for (n, (&mask, c)) in terms.into_iter().enumerate() {
            if n > 0 {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            write!(f, "{}", c.abs())?;
            for i in 0..self.num_vars {
                if mask >> i & 1 == 1 {
                    write!(f, "*m{i}")?;
                }
            }
        }
        Ok(())
    }
}

fn check_form_args(a: &BigInt, b: &BigInt, k: usize) -> Result<()> {
    if k == 0 {
        return Err(QfracError::InvalidArgument("cleared form needs k >= 1".into()));
    }
    if k > 63 {
        return Err(QfracError::InvalidArgument(format!("k = {k} exceeds 63")));
    }
    if !a.is_positive() || !b.is_positive() || !a.gcd(b).is_one() {
        return Err(QfracError::InvalidArgument(format!(
            "need coprime positive a, b; got {a}, {b}"
        )));
    }
    Ok(())
}

/// The integer form `F(m_0..m_k)` with `F = 0 <=> P_k(a/b, m) = 0`.
///
/// Built from the symbolic recurrence: each monomial `c x^e prod m_i` of
/// `P_k` becomes `c a^(e - e_min) b^(e_max - e) prod m_i`.
pub fn cleared_form(a: &BigInt, b: &BigInt, k: usize) -> Result<MultilinearForm> {
    check_form_args(a, b, k)?;
    // Symbolic P and Q: subset mask -> polynomial in x.
    type Sym = BTreeMap<u64, IntPolynomial>;
    let mut p: Sym = BTreeMap::from([(1u64, IntPolynomial::constant(1))]);
    let mut q: Sym = BTreeMap::from([(0u64, IntPolynomial::constant(1))]);
    for l in 1..=k {
        let mut next_p: Sym = BTreeMap::new();
        let mut next_q: Sym = BTreeMap::new();
        for (&mask, poly) in &p {
            let xp = poly.mul_x();
            let slot = next_p.entry(mask | 1 << l).or_default();
            *slot = slot.add(&xp);
            next_q.insert(mask, xp);
        }
        for (&mask, poly) in &q {
            let slot = next_p.entry(mask).or_default();
            *slot = slot.add(poly);
        }
        next_p.retain(|_, poly| !poly.is_zero());
        p = next_p;
        q = next_q;
    }
    let powers = p.values().flat_map(|poly| {
        poly.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, _)| e)
    });
    let (e_min, e_max) = powers.fold((usize::MAX, 0), |(lo, hi), e| (lo.min(e), hi.max(e)));
    let mut form = MultilinearForm::new(k + 1);
    for (&mask, poly) in &p {
        for (e, c) in poly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = c * num_traits::pow(a.clone(), e - e_min) * num_traits::pow(b.clone(), e_max - e);
            form.add_term(mask, &coeff);
        }
    }
    Ok(form)
}

/// The same form assembled directly from the alternating index sets.
pub fn cleared_form_from_index_sets(a: &BigInt, b: &BigInt, k: usize) -> Result<MultilinearForm> {
    check_form_args(a, b, k)?;
    let half = k.div_ceil(2);
    let mut form = MultilinearForm::new(k + 1);
    for j in 0..=half {
        let size = if k.is_multiple_of(2) { 2 * j + 1 } else { 2 * j };
        let coeff = num_traits::pow(a.clone(), j) * num_traits::pow(b.clone(), half - j);
        for set in index_sets(k, size) {
            let mask = set.iter().fold(0u64, |m, &i| m | 1 << i);
            form.add_term(mask, &coeff);
        }
    }
    Ok(form)
}
