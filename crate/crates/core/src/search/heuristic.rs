use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{LoopSet, SearchBudget, SearchOutcome};
use crate::fraction::{loop_difference, Conductor, Path};

#[derive(Clone)]
struct Prefix {
    entries: Vec<BigInt>,
    value: BigRational,
    weight_sq: BigRational,
}

impl Prefix {
    fn start(m0: BigInt) -> Prefix {
        Prefix {
            value: BigRational::from_integer(m0.clone()),
            entries: vec![m0],
            weight_sq: BigRational::from_integer(1.into()),
        }
    }

    fn path(&self) -> Path {
        Path::new(self.entries.clone()).expect("non-empty")
    }
}

/// Beam search over proper paths whose prefix values stay below
/// `budget.value_bound` in absolute value.
///
/// Starting from `(1)` and `(b)`, every prefix with value `c` is extended by
/// each non-zero `m` with `|m + 1/(q c)| < C`; an extension to exactly zero is
/// a loop. Each generation keeps one prefix per value, preferring the earliest
/// found, and the `beam_capacity` prefixes with the smallest numerators. Two
/// prefixes reaching the same value with different weights also yield a loop,
/// by [`loop_difference`].
///
/// Runs up to length `budget.max_length` and stops after the first generation
/// that produced a loop of weight != 1. Never exhaustive.
pub fn heuristic_search(q: &Conductor, budget: &SearchBudget) -> SearchOutcome {
    let deadline = budget.time_limit.map(|d| Instant::now() + d);
    let bound = &budget.value_bound;
    let mut set = LoopSet::default();
    let mut nontrivial = false;
    let mut seen: HashMap<BigRational, (Path, BigRational)> = HashMap::new();
    let mut starts = vec![BigInt::from(1)];
    if q.b() != &BigInt::from(1) {
        starts.push(q.b().clone());
    }
    let mut frontier: Vec<Prefix> = starts.into_iter().map(Prefix::start).collect();
    let mut nodes: u64 = 0;
    for p in &frontier {
        seen.insert(p.value.clone(), (p.path(), p.weight_sq.clone()));
    }
    for _len in 1..=budget.max_length {
        let mut next: HashMap<BigRational, Prefix> = HashMap::new();
        let mut order: Vec<BigRational> = Vec::new();
        for p in &frontier {
            nodes += 1;
            if nodes > budget.node_limit || deadline.is_some_and(|d| Instant::now() > d) {
                return finish(set, nodes);
            }
            let t = (q.value() * &p.value).recip();
            let weight_sq = &p.weight_sq * q.value() * &p.value * &p.value;
            if t.is_integer() {
                let mut e = p.entries.clone();
                e.push(-t.to_integer());
                let m = Path::new(e).expect("non-empty");
                if set.insert(q, &m) && weight_sq != BigRational::from_integer(1.into()) {
                    nontrivial = true;
                }
            }
            // Integers strictly inside (-C - t, C - t).
            let lo = (-bound - &t).floor().to_integer();
            let hi = (bound - &t).ceil().to_integer();
            let mut m: BigInt = lo + 1;
            while m < hi {
                if !m.is_zero() {
                    let value = BigRational::from_integer(m.clone()) + &t;
                    if !value.is_zero() && value.abs() < *bound && !next.contains_key(&value) {
                        let mut entries = p.entries.clone();
                        entries.push(m.clone());
                        order.push(value.clone());
                        next.insert(
                            value.clone(),
                            Prefix {
                                entries,
                                value,
                                weight_sq: weight_sq.clone(),
                            },
                        );
                    }
                }
                m += 1;
            }
        }
        let mut gen: Vec<Prefix> = order.into_iter().map(|v| next.remove(&v).expect("present")).collect();
        for p in &gen {
            match seen.get(&p.value) {
                Some((other, w)) if *w != p.weight_sq => {
                    if let Ok(u) = loop_difference(q, &p.path(), other) {
                        if set.insert(q, &u) {
                            nontrivial = true;
                        }
                    }
                }
                Some(_) => {}
                None => {
                    seen.insert(p.value.clone(), (p.path(), p.weight_sq.clone()));
                }
            }
        }
        if nontrivial {
            break;
        }
        gen.sort_by(|x, y| {
            x.value
                .numer()
                .abs()
                .cmp(&y.value.numer().abs())
                .then_with(|| x.value.denom().cmp(y.value.denom()))
                .then_with(|| x.entries.cmp(&y.entries))
        });
        gen.truncate(budget.beam_capacity);
        frontier = gen;
        if frontier.is_empty() {
            break;
        }
    }
    finish(set, nodes)
}

fn finish(set: LoopSet, nodes: u64) -> SearchOutcome {
    let mut out = SearchOutcome::empty(false);
    out.loops_found = set.into_sorted();
    out.stats.nodes = nodes;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_loop_for_two_thirds() {
        let out = heuristic_search(&Conductor::ratio(2, 3), &SearchBudget::default().with_beam(1000));
        assert!(!out.exhaustive);
        assert!(out.best_nontrivial().is_some());
    }

    #[test]
    fn nothing_at_four() {
        let budget = SearchBudget::default().with_beam(2000).with_max_length(12);
        let out = heuristic_search(&Conductor::ratio(4, 1), &budget);
        assert!(out.loops_found.is_empty());
    }
}
