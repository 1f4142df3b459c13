use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{divisors, LoopSet, SearchOutcome};
use crate::fraction::{Conductor, Path};

/// Every loop `(m_0, m_1)`. The loop equation is `m_0 m_1 q = -1`, so loops
/// exist only for `q = 1/b`, and then they are the factorisations of `-b`.
pub fn length1_loops(q: &Conductor) -> SearchOutcome {
    let mut set = LoopSet::default();
    if q.a().is_one() {
        let b = q.b();
        for d in divisors(b, &b.clone()).expect("b >= 1") {
            let other = b / &d;
            for (x, y) in [(d.clone(), -&other), (-&d, other.clone())] {
                set.insert(q, &Path::new(vec![x, y]).expect("non-empty"));
            }
        }
    }
    SearchOutcome {
        loops_found: set.into_sorted(),
        exhaustive: true,
        ..SearchOutcome::default()
    }
}

/// Every loop `(u, -s, v)` with non-zero `u` and `s`.
///
/// The loop equation reads `s q = 1/u + 1/v`, which bounds `|s| <= 2/q`. For
/// each such `s`, with `s q = A/B` reduced, `(A u - B)(A v - B) = B^2` leaves
/// finitely many `(u, v)`.
pub fn length2_loops(q: &Conductor) -> SearchOutcome {
    let mut set = LoopSet::default();
    let two = BigRational::from_integer(2.into());
    let s_max = (two / q.value()).floor().to_integer();
    let mut s = BigInt::one();
    while s <= s_max {
        let sq = q.value() * BigRational::from_integer(s.clone());
        let (a, b) = (sq.numer().clone(), sq.denom().clone());
        let b2 = &b * &b;
        let divs = divisors(&b2, &b2).expect("b^2 >= 1");
        for d in divs.iter().flat_map(|d| [d.clone(), -d]) {
            let (u, ru) = (&d + &b).div_rem(&a);
            let (v, rv) = (&b2 / &d + &b).div_rem(&a);
            if !ru.is_zero() || !rv.is_zero() || u.is_zero() || v.is_zero() {
                continue;
            }
            // Both signs of s: (u, -s, v) and its negation (-u, s, -v).
            set.insert(q, &Path::new(vec![u, -&s, v]).expect("non-empty"));
        }
        s += 1;
    }
    SearchOutcome {
        loops_found: set.into_sorted(),
        exhaustive: true,
        ..SearchOutcome::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::{canonical_symmetry_image, eval};

    fn has(out: &SearchOutcome, v: &[i64]) -> bool {
        let c = canonical_symmetry_image(&Path::from_i64s(v));
        out.loops_found.iter().any(|l| l.path == c)
    }

    /// All length-2 loops in a box by direct evaluation.
    fn brute2(q: &Conductor, bound: i64) -> Vec<Path> {
        let mut out = std::collections::BTreeSet::new();
        for x in -bound..=bound {
            for y in -bound..=bound {
                for z in -bound..=bound {
                    if x == 0 || y == 0 {
                        continue;
                    }
                    let p = Path::from_i64s(&[x, y, z]);
                    if eval(q, &p).is_loop() {
                        out.insert(canonical_symmetry_image(&p));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn length_one() {
        let out = length1_loops(&Conductor::ratio(1, 2));
        assert!(out.exhaustive);
        assert!(has(&out, &[2, -1]) && has(&out, &[1, -2]));
        let out = length1_loops(&Conductor::ratio(1, 1));
        assert_eq!(out.loops_found.len(), 1);
        assert!(out.loops_found[0].weight_sq.is_one());
        assert!(length1_loops(&Conductor::ratio(2, 3)).loops_found.is_empty());
    }

    #[test]
    fn length_two() {
        let out = length2_loops(&Conductor::ratio(2, 3));
        assert!(has(&out, &[1, -1, -3]) && has(&out, &[3, -1, 3]));
        let out = length2_loops(&Conductor::ratio(2, 5));
        assert!(has(&out, &[1, -2, -5]));
        assert!(length2_loops(&Conductor::ratio(7, 1)).loops_found.is_empty());
    }

    #[test]
    fn length_two_matches_box() {
        for (a, b) in [(2, 3), (1, 2), (3, 4), (1, 1), (5, 6), (2, 1), (3, 2)] {
            let q = Conductor::ratio(a, b);
            let closed: Vec<Path> = length2_loops(&q)
                .loops_found
                .into_iter()
                .map(|l| l.path)
                .filter(|p| p.max_abs_entry() <= BigInt::from(12))
                .collect();
            assert_eq!(closed, brute2(&q, 12), "q = {q}");
        }
    }
}
