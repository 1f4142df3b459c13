//! Tables of loops (`q = a/b`, `b <= 4`) and of congruence families, built
//! from verified certificates.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::cert::{parse_lines, verify_all, CertKind, Certificate};
use crate::error::Result;
use crate::fraction::{Conductor, Path, WeightSq};

/// Loops for every `a/b < 4` with `2 <= b <= 4`.
pub const TABLE1_FIXTURE: &str = include_str!("../fixtures/table1.jsonl");
/// The five families with their witnesses.
pub const TABLE2_FIXTURE: &str = include_str!("../fixtures/table2.jsonl");

pub fn table1_fixture() -> Result<Vec<Certificate>> {
    parse_lines(TABLE1_FIXTURE)
}

pub fn table2_fixture() -> Result<Vec<Certificate>> {
    parse_lines(TABLE2_FIXTURE)
}

/// Reduced `a/b < 4` with `2 <= b <= 4`, ordered by `b` then `a`.
pub fn table1_conductors() -> Vec<Conductor> {
    let mut out = Vec::new();
    for b in 2..=4i64 {
        for a in 1..4 * b {
            if a.gcd(&b) == 1 {
                out.push(Conductor::ratio(a, b));
            }
        }
    }
    out
}

/// Certificates of `certs` that re-verify.
fn verified(certs: &[Certificate]) -> Vec<&Certificate> {
    certs
        .iter()
        .zip(verify_all(certs))
        .filter_map(|(c, v)| v.ok().map(|_| c))
        .collect()
}

/// One row per conductor of [`table1_conductors`]: the shortest verified
/// loop, or `None` when the store has none.
pub fn table1_rows(certs: &[Certificate]) -> Vec<(Conductor, Option<Certificate>)> {
    let good = verified(certs);
    table1_conductors()
        .into_iter()
        .map(|q| {
            let best = good
                .iter()
                .filter(|c| c.kind == CertKind::Loop && c.conductor().ok().as_ref() == Some(&q))
                .min_by_key(|c| c.path.as_ref().map_or(usize::MAX, Vec::len))
                .map(|c| (*c).clone());
            (q, best)
        })
        .collect()
}

/// Verified family certificates ordered by `(a, b, N)`.
pub fn table2_rows(certs: &[Certificate]) -> Vec<Certificate> {
    let mut rows: Vec<Certificate> = verified(certs)
        .into_iter()
        .filter(|c| c.kind == CertKind::Family)
        .cloned()
        .collect();
    rows.sort_by(|x, y| (&x.a, &x.b, &x.modulus).cmp(&(&y.a, &y.b, &y.modulus)));
    rows
}

fn path_text(v: &Option<Vec<BigInt>>) -> String {
    v.clone()
        .and_then(|v| Path::new(v).ok())
        .map_or_else(|| "-".into(), |p| p.to_string())
}

fn weight_text(c: &Certificate) -> (String, String) {
    match c.weight_sq() {
        Ok(w) => {
            let odd = c.path.as_ref().is_some_and(|p| p.len() % 2 == 0);
            let ws = WeightSq::new(w.clone(), odd);
            (ws.display_root(), w.to_string())
        }
        Err(_) => ("?".into(), "?".into()),
    }
}

pub fn render_table1(rows: &[(Conductor, Option<Certificate>)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<6} {:<8} {:<12} {:<10} m", "q", "method", "w", "w^2");
    for (q, c) in rows {
        match c {
            Some(c) => {
                let (w, w2) = weight_text(c);
                let _ = writeln!(
                    out,
                    "{:<6} {:<8} {:<12} {:<10} {}",
                    q.to_string(),
                    c.method,
                    w,
                    w2,
                    path_text(&c.path)
                );
            }
            None => {
                let _ = writeln!(out, "{:<6} OPEN", q.to_string());
            }
        }
    }
    out
}

pub fn render_table2(rows: &[Certificate]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<4} {:<4} {:<6} {:<6} {:<24} n", "a", "b", "N", "b''", "m");
    for c in rows {
        let n = c.modulus.as_ref().map_or_else(|| "-".into(), ToString::to_string);
        let exc = c.exception.as_ref().map_or_else(|| "none".into(), ToString::to_string);
        let _ = writeln!(
            out,
            "{:<4} {:<4} {:<6} {:<6} {:<24} {}",
            c.a.to_string(),
            c.b.to_string(),
            n,
            exc,
            path_text(&c.path),
            path_text(&c.path2)
        );
    }
    out
}

/// The weight squared printed in the loop table for `q`, for comparing with
/// recomputed values: the printed weight is `w`, or `sqrt(w2)` written as such.
pub fn printed_weight_sq(printed: &str) -> Option<BigRational> {
    let s = printed.trim();
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
        return inner.parse().ok();
    }
    let w: BigRational = s.parse().ok()?;
    Some(&w * &w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_conductors() {
        let qs = table1_conductors();
        assert_eq!(qs.len(), 20);
        assert_eq!(qs[0], Conductor::ratio(1, 2));
        assert_eq!(qs[19], Conductor::ratio(15, 4));
    }

    #[test]
    fn fixtures_parse_and_verify() {
        let t1 = table1_fixture().unwrap();
        assert_eq!(t1.len(), 20);
        let rows = table1_rows(&t1);
        assert!(rows.iter().all(|(_, c)| c.is_some()));
        let t2 = table2_rows(&table2_fixture().unwrap());
        assert_eq!(t2.len(), 5);
    }

    #[test]
    fn empty_store_is_all_open() {
        let text = render_table1(&table1_rows(&[]));
        assert_eq!(text.matches("OPEN").count(), 20);
    }

    #[test]
    fn printed_weights() {
        assert_eq!(
            printed_weight_sq("sqrt(1/2)"),
            Some(BigRational::new(1.into(), 2.into()))
        );
        assert_eq!(printed_weight_sq("1/8"), Some(BigRational::new(1.into(), 64.into())));
    }
}
