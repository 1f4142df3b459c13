#![allow(dead_code)]

use std::sync::OnceLock;

use num_rational::Ratio;
use qfrac::search::brute_force_enum;
use qfrac::{Conductor, Path};

pub type R = Ratio<i128>;

/// Straightforward evaluation in machine rationals: `(value, weight^2)`, or
/// `None` if some denominator vanishes.
pub fn oracle(a: i64, b: i64, m: &[i64]) -> Option<(R, R)> {
    let q = R::new(a as i128, b as i128);
    let mut c = R::from_integer(m[0] as i128);
    let mut w2 = R::from_integer(1);
    for &mj in &m[1..] {
        if c == R::from_integer(0) {
            return None;
        }
        w2 = w2 * q * c * c;
        c = R::from_integer(mj as i128) + (q * c).recip();
    }
    Some((c, w2))
}

pub fn big_ratio(r: &R) -> num_rational::BigRational {
    num_rational::BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

/// Loops of length at most 4 with entries in `[-6, 6]` for a handful of
/// conductors, weight 1 included.
pub fn loop_pool() -> &'static [(Conductor, Path)] {
    static POOL: OnceLock<Vec<(Conductor, Path)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for (a, b) in [
            (1, 2),
            (1, 3),
            (2, 3),
            (3, 2),
            (4, 3),
            (3, 4),
            (5, 4),
            (2, 5),
            (1, 1),
            (2, 1),
        ] {
            let q = Conductor::ratio(a, b);
            for l in brute_force_enum(&q, 4, 6).loops_found {
                out.push((q.clone(), l.path));
            }
        }
        out
    })
}

/// Pool loops for one conductor.
pub fn loops_at(q: &Conductor) -> Vec<Path> {
    loop_pool()
        .iter()
        .filter(|(p, _)| p == q)
        .map(|(_, m)| m.clone())
        .collect()
}
