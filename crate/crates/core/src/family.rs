//! New loops from known ones: rescaling `q`, dividing `q` by an integer, and
//! congruence families `a/b'` with `b' = ±b (mod N)`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QfracError, Result};
use crate::fraction::{eval, loop_difference, rational_nth_root, zero_skip, Conductor, Path, WeightSq};

/// A loop carried to a new conductor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rescaled {
    pub q: Conductor,
    pub path: Path,
    pub weight_sq: WeightSq,
}

/// Scales the entries of a loop: `r m_j` where `j = k (mod 2)`, `r' m_j`
/// elsewhere. The result is a loop for `q / (r r')` with the same weight for
/// even `k` and weight squared times `r'/r` for odd `k`.
pub fn rescale_loop(q: &Conductor, m: &Path, r: &BigRational, r2: &BigRational) -> Result<Rescaled> {
    let rr = r * r2;
    if !rr.is_positive() {
        return Err(QfracError::InvalidArgument(format!("r r' = {rr} must be positive")));
    }
    let e = eval(q, m);
    if !e.is_loop() {
        return Err(QfracError::InvalidArgument(format!("{m} is not a loop for q = {q}")));
    }
    let k = m.length();
    let mut entries = Vec::with_capacity(k + 1);
    for (j, mj) in m.entries().iter().enumerate() {
        let f = if (k - j).is_multiple_of(2) { r } else { r2 };
        let v = f * BigRational::from_integer(mj.clone());
        if !v.is_integer() {
            return Err(QfracError::NonIntegralScaling(v.to_string()));
        }
        entries.push(v.to_integer());
    }
    let w = e.weight_sq.expect("loop").value().clone();
    let weight_sq = if k.is_multiple_of(2) { w } else { w * r2 / r };
    Ok(Rescaled {
        q: Conductor::new(q.value() / rr)?,
        path: Path::new(entries)?,
        weight_sq: WeightSq::new(weight_sq, k % 2 == 1),
    })
}

/// The two rescalings of an odd-length loop to `q/n`, with weights squared
/// multiplied by `n` and by `1/n`.
#[derive(Clone, Debug)]
pub struct OddByN {
    pub up: Rescaled,
    pub down: Rescaled,
}

impl OddByN {
    /// One of the two, with weight != 1 (at least one has it since `n >= 2`).
    pub fn witness(&self) -> &Rescaled {
        if self.up.weight_sq.is_one() {
            &self.down
        } else {
            &self.up
        }
    }
}

pub fn odd_by_n_witness(q: &Conductor, m: &Path, n: u64) -> Result<OddByN> {
    if m.length().is_multiple_of(2) {
        return Err(QfracError::InvalidArgument(format!("{m} has even length")));
    }
    if n < 2 {
        return Err(QfracError::InvalidArgument(format!("n = {n} must be at least 2")));
    }
    let one = BigRational::one();
    let nn = BigRational::from_integer(n.into());
    Ok(OddByN {
        up: rescale_loop(q, m, &one, &nn)?,
        down: rescale_loop(q, m, &nn, &one)?,
    })
}

/// `q, q/2, q/3, ...`: divisors of a conductor that inherit non-uniqueness.
pub fn forbidden_closure(q: &Conductor) -> impl Iterator<Item = Conductor> + '_ {
    (1u64..).map(move |n| Conductor::new(q.value() / BigRational::from_integer(n.into())).expect("positive"))
}

/// `a c(q, m_j)` as reduced `(u_j, v_j)`, `v_j > 0`, for `j = 0..=k`.
fn scaled_prefixes(q: &Conductor, m: &Path) -> Result<Vec<(BigInt, BigInt)>> {
    let e = eval(q, m);
    if !e.is_path() {
        return Err(QfracError::InvalidArgument(format!("{m} is not a path for q = {q}")));
    }
    let a = BigRational::from_integer(q.a().clone());
    Ok(e.prefix_values
        .iter()
        .map(|c| {
            let s = &a * c;
            (s.numer().clone(), s.denom().clone())
        })
        .collect())
}

/// `m'` with `a c(a/b', m'_j) = eps_j u_j / v_j`, where `u_j / v_j = a c(a/b, m_j)`.
/// Needs `b' = eps_j eps_{j+1} b (mod u_j)` for `j < k`. Then
/// `c(a/b', m') = eps_k c(a/b, m)` and the weight squared scales by `(b/b')^k`.
pub fn modify_path(q: &Conductor, m: &Path, signs: &[i8], b_new: &BigInt) -> Result<Path> {
    let k = m.length();
    if signs.len() != k + 1 || signs.iter().any(|s| s.abs() != 1) {
        return Err(QfracError::InvalidArgument(format!(
            "need {} signs of +-1, got {signs:?}",
            k + 1
        )));
    }
    if !b_new.is_positive() || !b_new.gcd(q.a()).is_one() {
        return Err(QfracError::InvalidArgument(format!(
            "b' = {b_new} must be positive and prime to {}",
            q.a()
        )));
    }
    let uv = scaled_prefixes(q, m)?;
    let b = q.b();
    let eps = |j: usize| BigInt::from(signs[j]);
    let e = m.entries();
    let mut out = Vec::with_capacity(k + 1);
    out.push(eps(0) * &e[0]);
    for j in 0..k {
        let (u, v) = &uv[j];
        let (shift, rem) = (eps(j + 1) * b - eps(j) * b_new).div_rem(u);
        if !rem.is_zero() {
            return Err(QfracError::CongruenceFailed {
                index: j,
                detail: format!("b' = {b_new} is not {} * {b} mod {u}", signs[j] * signs[j + 1]),
            });
        }
        out.push(eps(j + 1) * &e[j + 1] + shift * v);
    }
    Path::new(out)
}

/// Sign vector with `eps_k = +1` and `eps_j eps_{j+1} = +1` (`same`) or `-1`.
fn standard_signs(k: usize, same: bool) -> Vec<i8> {
    (0..=k)
        .map(|j| if same || (k - j).is_multiple_of(2) { 1 } else { -1 })
        .collect()
}

/// Every sign vector satisfying the congruences of [`modify_path`] for `b'`.
pub fn admissible_signs(q: &Conductor, m: &Path, b_new: &BigInt) -> Result<Vec<Vec<i8>>> {
    let k = m.length();
    if k >= 20 {
        return Err(QfracError::InvalidArgument(format!(
            "length {k} too long for exhaustive signs"
        )));
    }
    let uv = scaled_prefixes(q, m)?;
    let ok = |j: usize, s: i8| (b_new - BigInt::from(s) * q.b()).is_multiple_of(&uv[j].0);
    Ok((0u32..1 << (k + 1))
        .map(|bits| {
            (0..=k)
                .map(|j| if bits >> j & 1 == 1 { -1 } else { 1 })
                .collect::<Vec<i8>>()
        })
        .filter(|s| (0..k).all(|j| ok(j, s[j] * s[j + 1])))
        .collect())
}

/// Non-uniqueness for every `a/b'` with `b' = ±b (mod N)`, `gcd(a, b') = 1`
/// and `b' != exception`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCertificate {
    pub a: BigInt,
    pub b: BigInt,
    pub modulus: BigInt,
    pub exception: Option<BigInt>,
    pub witness_m: Path,
    pub witness_n: Path,
}

impl FamilyCertificate {
    pub fn base_q(&self) -> Conductor {
        Conductor::from_parts(self.a.clone(), self.b.clone()).expect("validated")
    }

    /// `w(m)^2 / w(n)^2` at the base conductor.
    pub fn weight_ratio(&self) -> BigRational {
        let q = self.base_q();
        let wm = eval(&q, &self.witness_m).weight_sq.expect("path");
        let wn = eval(&q, &self.witness_n).weight_sq.expect("path");
        wm.value() / wn.value()
    }

    pub fn covers(&self, b_new: &BigInt) -> bool {
        b_new.is_positive()
            && b_new.gcd(&self.a).is_one()
            && self.exception.as_ref() != Some(b_new)
            && ((b_new - &self.b).is_multiple_of(&self.modulus) || (b_new + &self.b).is_multiple_of(&self.modulus))
    }

    /// A loop of weight != 1 for `a/b'`, built from the modified witnesses.
    pub fn witness_for(&self, b_new: &BigInt) -> Result<(Conductor, Path, WeightSq)> {
        if !self.covers(b_new) {
            return Err(QfracError::InvalidArgument(format!(
                "b' = {b_new} is outside the family {} mod {}",
                self.b, self.modulus
            )));
        }
        let q = self.base_q();
        let same = (b_new - &self.b).is_multiple_of(&self.modulus);
        let m2 = modify_path(
            &q,
            &self.witness_m,
            &standard_signs(self.witness_m.length(), same),
            b_new,
        )?;
        let n2 = modify_path(
            &q,
            &self.witness_n,
            &standard_signs(self.witness_n.length(), same),
            b_new,
        )?;
        let q2 = Conductor::from_parts(self.a.clone(), b_new.clone())?;
        let u = loop_difference(&q2, &zero_skip(&m2), &zero_skip(&n2))?;
        let e = eval(&q2, &u);
        match e.weight_sq {
            Some(w) if e.is_loop() && !w.is_one() => Ok((q2, u, w)),
            _ => Err(QfracError::Verification(format!(
                "{u} is not a loop of weight != 1 for q = {q2}"
            ))),
        }
    }

    /// Recomputes modulus and exception from the witnesses and checks the
    /// stored values, then builds witnesses for `samples` members.
    pub fn verify(&self, samples: usize) -> Result<()> {
        let fresh = family_from_pair(&self.base_q(), &self.witness_m, &self.witness_n)?;
        if !self.modulus.is_positive() || !self.modulus.is_multiple_of(&fresh.modulus) {
            return Err(QfracError::Verification(format!(
                "modulus {} is not a multiple of {}",
                self.modulus, fresh.modulus
            )));
        }
        if self.exception != fresh.exception {
            return Err(QfracError::Verification(format!(
                "exception {:?} differs from recomputed {:?}",
                self.exception, fresh.exception
            )));
        }
        for b_new in self.members().take(samples) {
            self.witness_for(&b_new)?;
        }
        Ok(())
    }

    /// Covered `b'` in increasing order.
    pub fn members(&self) -> impl Iterator<Item = BigInt> + '_ {
        let mut b = BigInt::zero();
        std::iter::from_fn(move || loop {
            b += 1;
            if self.covers(&b) {
                return Some(b.clone());
            }
        })
    }
}

/// The family attached to two paths with `c(q, m) = c(q, n)` and different
/// lengths or weights. `N` is the lcm of the numerators of `a c(q, m_j)`,
/// `j < k`, and `a c(q, n_j)`, `j < l`.
pub fn family_from_pair(q: &Conductor, m: &Path, n: &Path) -> Result<FamilyCertificate> {
    let em = eval(q, m);
    let en = eval(q, n);
    let (Some(vm), Some(vn)) = (em.value(), en.value()) else {
        return Err(QfracError::InvalidArgument(format!(
            "{m} and {n} must be paths for q = {q}"
        )));
    };
    if vm != vn {
        return Err(QfracError::ValueMismatch(vm.to_string(), vn.to_string()));
    }
    let (k, l) = (m.length(), n.length());
    let wm = em.weight_sq.expect("path").value().clone();
    let wn = en.weight_sq.expect("path").value().clone();
    if k == l && wm == wn {
        return Err(QfracError::InvalidArgument(
            "paths of equal length need different weights".into(),
        ));
    }
    let mut modulus = BigInt::one();
    for (path, len) in [(m, k), (n, l)] {
        for (u, _) in scaled_prefixes(q, path)?.into_iter().take(len) {
            modulus = modulus.lcm(&u);
        }
    }
    let b = q.b().clone();
    let exception = if k == l {
        None
    } else {
        let ratio = &wm / &wn;
        let (base, d) = if k > l { (ratio, k - l) } else { (ratio.recip(), l - k) };
        rational_nth_root(&base, d.to_u32().expect("short paths"))
            .map(|root| root * BigRational::from_integer(b.clone()))
            .filter(|x| x.is_integer())
            .map(|x| x.to_integer())
            .filter(|x| (x - &b).is_multiple_of(&modulus) || (x + &b).is_multiple_of(&modulus))
    };
    Ok(FamilyCertificate {
        a: q.a().clone(),
        b,
        modulus,
        exception,
        witness_m: m.clone(),
        witness_n: n.clone(),
    })
}

/// Families from pairs of short paths with equal values at `q`.
///
/// Enumerates every path with at most `max_len + 1` entries in `[-bound,
/// bound]` (interior zeros allowed), groups them by value and keeps the pairs
/// of different length or weight. Returns one family per
/// `(N, b mod N, exception)`, smallest `N` first, each with the shortest
/// witnesses found.
pub fn search_pairs(q: &Conductor, max_len: usize, bound: i64) -> Vec<FamilyCertificate> {
    const BUCKET_CAP: usize = 48;
    let mut buckets: HashMap<BigRational, Vec<(Path, BigRational)>> = HashMap::new();
    let width = (2 * bound + 1) as usize;
    for len in 0..=max_len {
        let count = width.pow(len as u32 + 1);
        for code in 0..count {
            let mut c = code;
            let entries: Vec<i64> = (0..=len)
                .map(|_| {
                    let d = (c % width) as i64 - bound;
                    c /= width;
                    d
                })
                .collect();
            let m = Path::from_i64s(&entries);
            let e = eval(q, &m);
            if let (Some(v), Some(w)) = (e.value(), e.weight_sq.as_ref()) {
                let bucket = buckets.entry(v.clone()).or_default();
                if bucket.len() < BUCKET_CAP {
                    bucket.push((m.clone(), w.value().clone()));
                }
            }
        }
    }
    let mut found: Vec<FamilyCertificate> = Vec::new();
    for bucket in buckets.values() {
        for (i, (m, wm)) in bucket.iter().enumerate() {
            for (n, wn) in &bucket[i + 1..] {
                if m.length() == n.length() && wm == wn {
                    continue;
                }
                // Longer path first, as in the congruence construction.
                let (m, n) = if m.length() >= n.length() { (m, n) } else { (n, m) };
                if let Ok(f) = family_from_pair(q, m, n) {
                    found.push(f);
                }
            }
        }
    }
    let size = |f: &FamilyCertificate| f.witness_m.length() + f.witness_n.length();
    let height = |f: &FamilyCertificate| f.witness_m.max_abs_entry().max(f.witness_n.max_abs_entry());
    found.sort_by(|x, y| {
        x.modulus
            .cmp(&y.modulus)
            .then_with(|| x.exception.is_some().cmp(&y.exception.is_some()))
            .then_with(|| size(x).cmp(&size(y)))
            .then_with(|| height(x).cmp(&height(y)))
            .then_with(|| x.witness_m.cmp(&y.witness_m))
            .then_with(|| x.witness_n.cmp(&y.witness_n))
    });
    let mut seen = HashSet::new();
    found.retain(|f| seen.insert((f.modulus.clone(), f.b.mod_floor(&f.modulus), f.exception.clone())));
    found
}
