//! Self-contained certificates, one JSON object per line.
//!
//! Three kinds:
//!
//! * `loop`: a loop `path` for `q = a/b` with exact squared weight
//!   `weight_sq_num / weight_sq_den != 1`.
//! * `family`: witnesses `path`, `path2` with equal values at `a/b`; covers
//!   every `a/b'` with `b' = ±b (mod N)` except `exception`. The weight fields
//!   hold the ratio `w(path)^2 / w(path2)^2`.
//! * `closure`: `a/b = (parent_a/parent_b) / divisor`; valid when the parent is
//!   certified by another record of the same collection.
//!
//! Integers are written as bare JSON numbers of any size.

use std::collections::HashSet;
use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QfracError, Result};
use crate::family::FamilyCertificate;
use crate::fraction::{eval, Conductor, Path, WeightSq};

/// Witnesses sampled when re-verifying a family.
pub const FAMILY_SAMPLES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertKind {
    Loop,
    Family,
    Closure,
}

/// How a certificate was obtained: methods 1 to 4 or derived from another
/// certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ClosedForm,
    Family,
    Diophantine,
    Heuristic,
    Derived,
}

impl Method {
    pub fn number(self) -> Option<u8> {
        match self {
            Method::ClosedForm => Some(1),
            Method::Family => Some(2),
            Method::Diophantine => Some(3),
            Method::Heuristic => Some(4),
            Method::Derived => None,
        }
    }

    pub fn from_number(n: u8) -> Option<Method> {
        match n {
            1 => Some(Method::ClosedForm),
            2 => Some(Method::Family),
            3 => Some(Method::Diophantine),
            4 => Some(Method::Heuristic),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number() {
            Some(n) => f.pad(&n.to_string()),
            None => f.pad("derived"),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.number() {
            Some(n) => s.serialize_u8(n),
            None => s.serialize_str("derived"),
        }
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        // Through `Value`: arbitrary-precision numbers do not survive
        // `deserialize_any` directly.
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "derived" => Ok(Method::Derived),
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|n| u8::try_from(n).ok())
                .and_then(Method::from_number)
                .ok_or_else(|| D::Error::custom(format!("unknown method {n}"))),
            v => Err(D::Error::custom(format!("unknown method {v}"))),
        }
    }
}

pub(crate) mod int {
    use super::*;

    fn to_number(x: &BigInt) -> serde_json::Number {
        x.to_string().parse().expect("decimal integer is a JSON number")
    }

    fn from_number<E: serde::de::Error>(n: serde_json::Number) -> std::result::Result<BigInt, E> {
        let s = n.to_string();
        s.parse()
            .map_err(|_| E::custom(format!("expected an integer, got {s}")))
    }

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_number(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        from_number(serde_json::Number::deserialize(d)?)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
            x.as_ref().map(to_number).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigInt>, D::Error> {
            Option::<serde_json::Number>::deserialize(d)?
                .map(from_number)
                .transpose()
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
            x.as_ref()
                .map(|v| v.iter().map(to_number).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<BigInt>>, D::Error> {
            Option::<Vec<serde_json::Number>>::deserialize(d)?
                .map(|v| v.into_iter().map(from_number).collect())
                .transpose()
        }
    }
}

/// One certificate record. Field names are the on-disk schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub kind: CertKind,
    #[serde(with = "int")]
    pub a: BigInt,
    #[serde(with = "int")]
    pub b: BigInt,
    #[serde(default, with = "int::vec", skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<BigInt>>,
    #[serde(default, with = "int::vec", skip_serializing_if = "Option::is_none")]
    pub path2: Option<Vec<BigInt>>,
    #[serde(default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub weight_sq_num: Option<BigInt>,
    #[serde(default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub weight_sq_den: Option<BigInt>,
    /// The weight (or weight ratio) itself, e.g. `"sqrt(1/2)"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    pub method: Method,
    #[serde(rename = "N", default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub modulus: Option<BigInt>,
    #[serde(default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub residue: Option<BigInt>,
    #[serde(default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub exception: Option<BigInt>,
    /// No loop of weight != 1 has length at most this (Method 3, exhaustive).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive_upto: Option<usize>,
    #[serde(default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub parent_a: Option<BigInt>,
    #[serde(default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub parent_b: Option<BigInt>,
    #[serde(default, with = "int::opt", skip_serializing_if = "Option::is_none")]
    pub divisor: Option<BigInt>,
    pub version: String,
    pub timestamp: u64,
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set.
pub fn timestamp_now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return t;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn blank(kind: CertKind, q: &Conductor, method: Method) -> Certificate {
    Certificate {
        kind,
        a: q.a().clone(),
        b: q.b().clone(),
        path: None,
        path2: None,
        weight_sq_num: None,
        weight_sq_den: None,
        weight: None,
        method,
        modulus: None,
        residue: None,
        exception: None,
        exhaustive_upto: None,
        parent_a: None,
        parent_b: None,
        divisor: None,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp_now(),
    }
}

impl Certificate {
    /// A loop certificate. Fails unless `m` is a loop of weight != 1 for `q`.
    pub fn for_loop(q: &Conductor, m: &Path, method: Method) -> Result<Certificate> {
        let e = eval(q, m);
        let w = match e.weight_sq {
            Some(w) if e.is_loop() => w,
            _ => return Err(QfracError::Verification(format!("{m} is not a loop for q = {q}"))),
        };
        if w.is_one() {
            return Err(QfracError::Verification(format!("{m} has weight 1 for q = {q}")));
        }
        let mut c = blank(CertKind::Loop, q, method);
        c.path = Some(m.entries().to_vec());
        c.set_weight(&w);
        Ok(c)
    }

    pub fn for_family(fam: &FamilyCertificate, method: Method) -> Certificate {
        let q = fam.base_q();
        let mut c = blank(CertKind::Family, &q, method);
        c.path = Some(fam.witness_m.entries().to_vec());
        c.path2 = Some(fam.witness_n.entries().to_vec());
        c.set_weight(&WeightSq::new(fam.weight_ratio(), false));
        c.modulus = Some(fam.modulus.clone());
        c.residue = Some(fam.b.mod_floor(&fam.modulus));
        c.exception = fam.exception.clone();
        c
    }

    /// `q` inherits non-uniqueness from `parent = divisor * q`.
    pub fn for_closure(q: &Conductor, parent: &Conductor, divisor: u64) -> Certificate {
        let mut c = blank(CertKind::Closure, q, Method::Derived);
        c.parent_a = Some(parent.a().clone());
        c.parent_b = Some(parent.b().clone());
        c.divisor = Some(divisor.into());
        c
    }

    pub fn with_exhaustive_upto(mut self, k: usize) -> Certificate {
        self.exhaustive_upto = Some(k);
        self
    }

    fn set_weight(&mut self, w: &WeightSq) {
        self.weight_sq_num = Some(w.value().numer().clone());
        self.weight_sq_den = Some(w.value().denom().clone());
        self.weight = Some(w.display_root());
    }

    /// `a/b`, when the stored pair is a reduced positive fraction.
    pub fn conductor(&self) -> Result<Conductor> {
        if !self.a.is_positive() || !self.b.is_positive() || !self.a.gcd(&self.b).is_one() {
            return Err(QfracError::InvalidArgument(format!(
                "{}/{} is not a reduced positive fraction",
                self.a, self.b
            )));
        }
        Conductor::from_parts(self.a.clone(), self.b.clone())
    }

    pub fn path(&self) -> Result<Path> {
        let v = self
            .path
            .clone()
            .ok_or_else(|| QfracError::Parse(format!("{:?} certificate without path", self.kind)))?;
        Path::new(v)
    }

    fn path2(&self) -> Result<Path> {
        let v = self
            .path2
            .clone()
            .ok_or_else(|| QfracError::Parse("family certificate without path2".into()))?;
        Path::new(v)
    }

    /// The stored weight, which must be written in lowest terms.
    pub fn weight_sq(&self) -> Result<BigRational> {
        let (Some(n), Some(d)) = (&self.weight_sq_num, &self.weight_sq_den) else {
            return Err(QfracError::Parse("missing weight_sq_num or weight_sq_den".into()));
        };
        if !d.is_positive() || !n.gcd(d).is_one() {
            return Err(QfracError::Verification(format!(
                "weight {n}/{d} is not in lowest terms"
            )));
        }
        Ok(BigRational::new_raw(n.clone(), d.clone()))
    }

    pub fn family(&self) -> Result<FamilyCertificate> {
        Ok(FamilyCertificate {
            a: self.a.clone(),
            b: self.b.clone(),
            modulus: self
                .modulus
                .clone()
                .ok_or_else(|| QfracError::Parse("family certificate without N".into()))?,
            exception: self.exception.clone(),
            witness_m: self.path()?,
            witness_n: self.path2()?,
        })
    }

    fn check_weight(&self, w: &WeightSq) -> Result<()> {
        let stored = self.weight_sq()?;
        if &stored != w.value() {
            return Err(QfracError::Verification(format!(
                "stored weight^2 {stored} but recomputed {}",
                w.value()
            )));
        }
        if let Some(s) = &self.weight {
            if *s != w.display_root() {
                return Err(QfracError::Verification(format!(
                    "weight shown as {s} but equals {}",
                    w.display_root()
                )));
            }
        }
        Ok(())
    }

    /// Checks a loop or family certificate on its own. Closures need the
    /// surrounding collection; see [`verify_all`].
    pub fn verify_standalone(&self) -> Result<()> {
        let q = self.conductor()?;
        match self.kind {
            CertKind::Loop => {
                let m = self.path()?;
                let e = eval(&q, &m);
                let w = match e.weight_sq {
                    Some(w) if e.is_loop() => w,
                    Some(_) => {
                        return Err(QfracError::Verification(format!(
                            "c({q}, {m}) = {} is not 0",
                            e.value().expect("path")
                        )))
                    }
                    None => {
                        return Err(QfracError::Verification(format!(
                            "{m} is not a path for q = {q}: c_{} = 0",
                            e.failed_at.expect("not a path") - 1
                        )))
                    }
                };
                if w.is_one() {
                    return Err(QfracError::Verification(format!("{m} has weight 1")));
                }
                self.check_weight(&w)
            }
            CertKind::Family => {
                let fam = self.family()?;
                let residue = self.b.mod_floor(&fam.modulus);
                if self.residue.as_ref().is_some_and(|r| *r != residue) {
                    return Err(QfracError::Verification(format!(
                        "residue {:?} differs from b mod N = {residue}",
                        self.residue
                    )));
                }
                let ratio = WeightSq::new(fam.weight_ratio(), false);
                self.check_weight(&ratio)?;
                fam.verify(FAMILY_SAMPLES)
            }
            CertKind::Closure => Err(QfracError::Verification(
                "closure certificates need their parent".into(),
            )),
        }
    }

    /// Parent conductor and divisor of a closure certificate, after checking
    /// `a/b * divisor = parent`.
    pub fn closure_parent(&self) -> Result<(Conductor, BigInt)> {
        let q = self.conductor()?;
        let (Some(pa), Some(pb), Some(n)) = (&self.parent_a, &self.parent_b, &self.divisor) else {
            return Err(QfracError::Parse(
                "closure without parent_a, parent_b or divisor".into(),
            ));
        };
        if *n < BigInt::from(2) {
            return Err(QfracError::Verification(format!("divisor {n} must be at least 2")));
        }
        let parent = Conductor::from_parts(pa.clone(), pb.clone())?;
        if parent.value() != &(q.value() * BigRational::from_integer(n.clone())) {
            return Err(QfracError::Verification(format!("{q} * {n} != {parent}")));
        }
        Ok((parent, n.clone()))
    }

    /// Key that ignores version and timestamp.
    pub fn identity(&self) -> String {
        let mut c = self.clone();
        c.version.clear();
        c.timestamp = 0;
        c.to_line()
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("certificates serialize")
    }

    pub fn from_line(line: &str) -> Result<Certificate> {
        Ok(serde_json::from_str(line)?)
    }
}

/// Verdicts for a collection of certificates, in input order.
///
/// Loops and families are checked on their own. A closure holds when its
/// parent is covered by a verified loop, a verified family or, recursively,
/// another verified closure.
pub fn verify_all(certs: &[Certificate]) -> Vec<Result<()>> {
    let mut verdicts: Vec<Option<Result<()>>> = certs
        .iter()
        .map(|c| (c.kind != CertKind::Closure).then(|| c.verify_standalone()))
        .collect();
    let mut certified: HashSet<Conductor> = HashSet::new();
    let mut families: Vec<FamilyCertificate> = Vec::new();
    for (c, v) in certs.iter().zip(&verdicts) {
        if let Some(Ok(())) = v {
            match c.kind {
                CertKind::Loop => {
                    certified.insert(c.conductor().expect("verified"));
                }
                CertKind::Family => families.push(c.family().expect("verified")),
                CertKind::Closure => {}
            }
        }
    }
    let covered = |q: &Conductor, certified: &HashSet<Conductor>| {
        certified.contains(q) || families.iter().any(|f| &f.a == q.a() && f.covers(q.b()))
    };
    loop {
        let mut progress = false;
        for (c, v) in certs.iter().zip(verdicts.iter_mut()) {
            if v.is_some() {
                continue;
            }
            match c.closure_parent() {
                Err(e) => {
                    *v = Some(Err(e));
                    progress = true;
                }
                Ok((parent, _)) if covered(&parent, &certified) => {
                    certified.insert(c.conductor().expect("checked by closure_parent"));
                    *v = Some(Ok(()));
                    progress = true;
                }
                Ok(_) => {}
            }
        }
        if !progress {
            break;
        }
    }
    certs
        .iter()
        .zip(verdicts)
        .map(|(c, v)| {
            v.unwrap_or_else(|| {
                Err(QfracError::Verification(format!(
                    "parent {}/{} of closure is not certified",
                    c.parent_a.as_ref().map_or_else(BigInt::zero, Clone::clone),
                    c.parent_b.as_ref().map_or_else(BigInt::zero, Clone::clone)
                )))
            })
        })
        .collect()
}

/// Parses JSONL text; blank lines are skipped. Errors carry the line number.
pub fn parse_lines(text: &str) -> Result<Vec<Certificate>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Certificate::from_line(l).map_err(|e| QfracError::Parse(format!("line {}: {e}", i + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::family_from_pair;

    fn p(v: &[i64]) -> Path {
        Path::from_i64s(v)
    }

    #[test]
    fn loop_round_trip() {
        let c = Certificate::for_loop(&Conductor::ratio(2, 3), &p(&[1, -1, -3]), Method::ClosedForm).unwrap();
        let line = c.to_line();
        assert!(line.contains("\"weight_sq_num\":1,\"weight_sq_den\":9"), "{line}");
        assert!(line.contains("\"method\":1"));
        let back = Certificate::from_line(&line).unwrap();
        assert_eq!(back, c);
        back.verify_standalone().unwrap();
    }

    #[test]
    fn huge_integers_stay_numbers() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let q = Conductor::from_parts(1, big.clone()).unwrap();
        let m = Path::new(vec![big.clone(), BigInt::from(-1)]).unwrap();
        let c = Certificate::for_loop(&q, &m, Method::ClosedForm).unwrap();
        let line = c.to_line();
        assert!(line.contains("\"path\":[123456789012345678901234567890,-1]"), "{line}");
        let back = Certificate::from_line(&line).unwrap();
        assert_eq!(back.path.unwrap()[0], big);
    }

    #[test]
    fn weight_one_rejected() {
        assert!(Certificate::for_loop(&Conductor::ratio(2, 1), &p(&[1, -1, 1]), Method::Diophantine).is_err());
    }

    #[test]
    fn tampered_weight_fails() {
        let mut c = Certificate::for_loop(&Conductor::ratio(1, 2), &p(&[1, -2]), Method::ClosedForm).unwrap();
        assert_eq!(c.weight.as_deref(), Some("sqrt(1/2)"));
        c.weight_sq_num = Some(BigInt::from(3));
        assert!(c.verify_standalone().is_err());
        let mut d = Certificate::for_loop(&Conductor::ratio(1, 2), &p(&[1, -2]), Method::ClosedForm).unwrap();
        d.weight_sq_num = Some(BigInt::from(2));
        d.weight_sq_den = Some(BigInt::from(4));
        assert!(d.verify_standalone().is_err());
    }

    #[test]
    fn malformed_lines() {
        assert!(Certificate::from_line("{\"kind\":\"loop\"}").is_err());
        let good = Certificate::for_loop(&Conductor::ratio(1, 2), &p(&[1, -2]), Method::ClosedForm)
            .unwrap()
            .to_line();
        assert!(Certificate::from_line(&good.replace("[1,-2]", "[1,-2.5]")).is_err());
        assert!(Certificate::from_line(&good.replace("\"method\":1", "\"method\":7")).is_err());
        assert!(parse_lines(&format!("{good}\n\n{good}\n")).unwrap().len() == 2);
    }

    #[test]
    fn family_round_trip() {
        let fam = family_from_pair(&Conductor::ratio(3, 1), &p(&[-1, 0, 2]), &p(&[1])).unwrap();
        let c = Certificate::for_family(&fam, Method::Family);
        let line = c.to_line();
        assert!(line.contains("\"N\":3") && line.contains("\"exception\":1"), "{line}");
        let back = Certificate::from_line(&line).unwrap();
        assert_eq!(back.family().unwrap(), fam);
        back.verify_standalone().unwrap();
    }

    #[test]
    fn closure_needs_parent() {
        let parent = Conductor::ratio(2, 3);
        let child = Conductor::ratio(1, 3);
        let loop_cert = Certificate::for_loop(&parent, &p(&[1, -1, -3]), Method::ClosedForm).unwrap();
        let closure = Certificate::for_closure(&child, &parent, 2);
        let alone = verify_all(std::slice::from_ref(&closure));
        assert!(alone[0].is_err());
        let both = verify_all(&[closure.clone(), loop_cert]);
        assert!(both.iter().all(|v| v.is_ok()));
        let mut wrong = closure;
        wrong.divisor = Some(BigInt::from(3));
        assert!(wrong.closure_parent().is_err());
    }
}
