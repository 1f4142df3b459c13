//! Floating-point evaluation for irrational conductors, the alternating-vector
//! loops at `q = 4 cos^2(pi l / (2k + 1))`, and the suffix repair that turns a
//! vanishing continuant into a genuine loop.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{QfracError, Result};
use crate::fraction::{eval, Conductor, Path};

/// Relative rounding error of one `f64` operation.
const EPS: f64 = f64::EPSILON;

/// `c(q, m)` in floating point with a forward error bound.
#[derive(Clone, Debug)]
pub struct NumericEval {
    pub prefix_values: Vec<f64>,
    /// Bound on `|c_j - prefix_values[j]|` for each prefix.
    pub error_bounds: Vec<f64>,
    /// Set when a prefix `j < k` could not be separated from zero; evaluation
    /// stops there.
    pub indeterminate_at: Option<usize>,
    pub weight_sq: Option<f64>,
}

impl NumericEval {
    pub fn value(&self) -> Option<f64> {
        match self.indeterminate_at {
            None => self.prefix_values.last().copied(),
            Some(_) => None,
        }
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bounds.last().copied().unwrap_or(0.0)
    }

    /// The final value is within its error bound of zero.
    pub fn vanishes(&self) -> bool {
        self.value().is_some_and(|v| v.abs() <= self.error_bound())
    }
}

/// Evaluates `c(q, m)` for `q` known up to `±q_err`.
///
/// Each step `c_j = m_j + 1/(q c_{j-1})` propagates the bound of the previous
/// prefix together with one rounding per operation. A prefix whose interval
/// contains zero makes the evaluation indeterminate.
pub fn eval_numeric(q: f64, q_err: f64, m: &Path) -> NumericEval {
    let entries: Vec<f64> = m.entries().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let mut values = vec![entries[0]];
    let mut errs = vec![entries[0].abs() * EPS];
    let mut weight_sq = 1.0f64;
    for (j, &mj) in entries.iter().enumerate().skip(1) {
        let (c, e) = (values[j - 1], errs[j - 1]);
        let d = q * c;
        let ed = q.abs() * e + c.abs() * q_err + q_err * e + 2.0 * EPS * d.abs();
        if d.abs() <= ed || c == 0.0 {
            return NumericEval {
                prefix_values: values,
                error_bounds: errs,
                indeterminate_at: Some(j - 1),
                weight_sq: None,
            };
        }
        let r = 1.0 / d;
        let er = ed / (d.abs() * (d.abs() - ed)) + EPS * r.abs();
        let cj = mj + r;
        weight_sq *= d * c;
        values.push(cj);
        errs.push(er + EPS * cj.abs());
    }
    NumericEval {
        prefix_values: values,
        error_bounds: errs,
        indeterminate_at: None,
        weight_sq: Some(weight_sq),
    }
}

/// For `P_k(q, m) = 0`, returns a loop: while some `P_i(q, m)`, `i < k`,
/// vanishes (first such `i`), `m` is replaced by `(m_{i+2}, ..., m_k)`.
///
/// With `P_i = 0` the recurrence gives `P_k(m) = x^2 P_{i-1}(m) P(m_{i+2}..)`,
/// and `P_{i-1} != 0` by minimality of `i`, so the tail still vanishes.
/// Removing `i + 2` entries keeps the parity of `k - i`.
pub fn suffix_repair(q: &Conductor, m: &Path) -> Result<Path> {
    let mut m = m.clone();
    loop {
        let e = eval(q, &m);
        match e.failed_at {
            None if e.is_loop() => return Ok(m),
            None => return Err(QfracError::Verification(format!("{m} does not vanish at q = {q}"))),
            Some(j) => {
                // c_{j-1} = 0, i.e. P_{j-1} = 0.
                let i = j - 1;
                if i + 2 > m.length() {
                    return Err(QfracError::Verification(format!("{m} does not vanish at q = {q}")));
                }
                m = Path::new(m.entries()[i + 2..].to_vec())?;
            }
        }
    }
}

/// `(P_j, Q_j)` for `j = 0..=k` at `q` from `P_j = m_j q P_{j-1} + Q_{j-1}`,
/// `Q_j = q P_{j-1}`, in double precision. The prefix value is `P_j / Q_j`.
fn continuants_f64(q: f64, m: &Path) -> Vec<(f64, f64)> {
    let entries: Vec<f64> = m.entries().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let (mut p, mut qq) = (entries[0], 1.0f64);
    let mut out = vec![(p, qq)];
    for &mj in &entries[1..] {
        (p, qq) = (mj * q * p + qq, q * p);
        out.push((p, qq));
    }
    out
}

/// The same recurrence with `bits`-bit software floats.
fn continuants_extended(q: &BigFloat, m: &Path, bits: usize) -> Vec<(BigFloat, BigFloat)> {
    let rm = RoundingMode::ToEven;
    let big = |x: &num_bigint::BigInt| {
        let v = x.to_i64().expect("entries fit in i64");
        BigFloat::from_i64(v, bits)
    };
    let e = m.entries();
    let mut p = big(&e[0]);
    let mut qq = BigFloat::from_u64(1, bits);
    let mut out = vec![(p.clone(), qq.clone())];
    for mj in &e[1..] {
        let qp = q.mul(&p, bits, rm);
        p = big(mj).mul(&qp, bits, rm).add(&qq, bits, rm);
        qq = qp;
        out.push((p.clone(), qq.clone()));
    }
    out
}

fn to_f64(x: &BigFloat, cc: &mut Consts) -> Result<f64> {
    let text = x
        .format(astro_float::Radix::Dec, RoundingMode::ToEven, cc)
        .map_err(|e| QfracError::InvalidArgument(format!("{e:?}")))?;
    text.parse()
        .map_err(|_| QfracError::Parse(format!("cannot read {text} as f64")))
}

/// Drops the head of `m` up to the first vanishing prefix value
/// `c_i = P_i / Q_i`, `i < k`, as in [`suffix_repair`], with `continuants`
/// supplying the prefix values numerically. Comparing `c_i` rather than
/// `P_i` with `tol` keeps the test independent of the scale of `q`.
fn repair_with(m: &Path, tol: f64, mut continuants: impl FnMut(&Path) -> Result<Vec<f64>>) -> Result<Path> {
    let mut m = m.clone();
    loop {
        let cs = continuants(&m)?;
        let k = m.length();
        if cs[k].is_nan() || cs[k].abs() > tol {
            return Err(QfracError::Verification(format!("c_{k} = {} for {m}", cs[k])));
        }
        match cs[..k].iter().position(|c| c.abs() <= tol) {
            None => return Ok(m),
            Some(i) if i + 2 <= k => m = Path::new(m.entries()[i + 2..].to_vec())?,
            Some(_) => return Err(QfracError::Verification(format!("{m} has P_{{k-1}} = 0"))),
        }
    }
}

/// [`suffix_repair`] for floating-point `q`: a prefix counts as vanishing
/// when `|c_i(q)| <= tol`.
pub fn suffix_repair_numeric(q: f64, m: &Path, tol: f64) -> Result<Path> {
    repair_with(m, tol, |m| {
        Ok(continuants_f64(q, m).iter().map(|(p, qq)| p / qq).collect())
    })
    .map_err(|e| QfracError::Verification(format!("{e} at q = {q}")))
}

/// `(1, -1, 1, ..., -1)` of length `2k`.
pub fn alternating_vector(k: usize) -> Path {
    Path::from_i64s(&(0..2 * k).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect::<Vec<_>>())
}

fn check_hecke_args(k: usize, ell: usize) -> Result<()> {
    let n = 2 * k + 1;
    if k == 0 || ell == 0 || ell >= n || ell.gcd(&n) != 1 {
        return Err(QfracError::InvalidArgument(format!(
            "need k >= 1 and 1 <= l < {n} coprime to {n}; got k = {k}, l = {ell}"
        )));
    }
    Ok(())
}

/// `4 cos^2(pi l / (2k + 1))` in double precision.
pub fn hecke_conductor(k: usize, ell: usize) -> f64 {
    let c = (std::f64::consts::PI * ell as f64 / (2 * k + 1) as f64).cos();
    4.0 * c * c
}

/// `|P_{2k-1}(q, alternating)|` at `q = 4 cos^2(pi l / (2k + 1))`, double
/// precision.
pub fn hecke_residual(k: usize, ell: usize) -> Result<f64> {
    check_hecke_args(k, ell)?;
    let ps = continuants_f64(hecke_conductor(k, ell), &alternating_vector(k));
    Ok(ps[2 * k - 1].0.abs())
}

/// `4 cos^2(pi l / (2k + 1))` with `bits`-bit software floats.
fn hecke_conductor_extended(k: usize, ell: usize, bits: usize, cc: &mut Consts) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let angle = cc
        .pi(bits, rm)
        .mul(&BigFloat::from_u64(ell as u64, bits), bits, rm)
        .div(&BigFloat::from_u64(2 * k as u64 + 1, bits), bits, rm);
    let c = angle.cos(bits, rm, cc);
    c.mul(&c, bits, rm).mul(&BigFloat::from_u64(4, bits), bits, rm)
}

fn consts() -> Result<Consts> {
    Consts::new().map_err(|e| QfracError::InvalidArgument(format!("{e:?}")))
}

/// Same as [`hecke_residual`] with `precision`-bit software floats.
pub fn hecke_residual_extended(k: usize, ell: usize, precision: usize) -> Result<f64> {
    check_hecke_args(k, ell)?;
    let bits = precision.max(64);
    let mut cc = consts()?;
    let q = hecke_conductor_extended(k, ell, bits, &mut cc);
    let ps = continuants_extended(&q, &alternating_vector(k), bits);
    Ok(to_f64(&ps[2 * k - 1].0, &mut cc)?.abs())
}

/// An odd-length loop for `q = 4 cos^2(pi l / (2k + 1))`.
#[derive(Clone, Debug)]
pub struct HeckeLoop {
    pub q: f64,
    pub path: Path,
    pub weight_sq: f64,
    /// `|P_{2k-1}(q, alternating)|` before any repair.
    pub residual: f64,
}

/// Largest `k` for which the double-precision residual stays below `1e-9`.
/// From `k = 9` on, rounding `q` to a double already moves `P_{2k-1}` by
/// more than that (about `1.4e-9` at `k = 9, l = 1`).
pub const HECKE_DOUBLE_MAX_K: usize = 8;

/// Builds the alternating vector of length `2k`, checks that its continuant
/// vanishes within `1e-9` (extended precision above [`HECKE_DOUBLE_MAX_K`])
/// and repairs it into a path if needed.
pub fn hecke_loop(k: usize, ell: usize) -> Result<HeckeLoop> {
    const TOL: f64 = 1e-9;
    let residual = if k <= HECKE_DOUBLE_MAX_K {
        hecke_residual(k, ell)?
    } else {
        hecke_residual_extended(k, ell, 256)?
    };
    if residual > TOL {
        return Err(QfracError::Verification(format!(
            "P_{} = {residual} for k = {k}, l = {ell}",
            2 * k - 1
        )));
    }
    let q = hecke_conductor(k, ell);
    let path = if k <= HECKE_DOUBLE_MAX_K {
        suffix_repair_numeric(q, &alternating_vector(k), TOL)?
    } else {
        const BITS: usize = 256;
        let mut cc = consts()?;
        let qx = hecke_conductor_extended(k, ell, BITS, &mut cc);
        repair_with(&alternating_vector(k), TOL, |m| {
            continuants_extended(&qx, m, BITS)
                .iter()
                .map(|(p, qq)| to_f64(&p.div(qq, BITS, RoundingMode::ToEven), &mut cc))
                .collect()
        })?
    };
    let e = eval_numeric(q, q * EPS, &path);
    let weight_sq = e
        .weight_sq
        .ok_or_else(|| QfracError::Verification(format!("{path} is indeterminate at q = {q}")))?;
    Ok(HeckeLoop {
        q,
        path,
        weight_sq,
        residual,
    })
}
