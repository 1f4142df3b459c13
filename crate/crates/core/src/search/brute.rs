use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{LoopSet, SearchOutcome};
use crate::fraction::{Conductor, Path};

/// Every loop `m` of length `1..=max_length` with `m_0, ..., m_{k-1}` non-zero
/// and all `|m_j| <= entry_bound`, found by walking the box directly.
///
/// For each proper prefix the only last entry closing a loop is
/// `m_k = -1/(q c)`, so the innermost coordinate is read off instead of
/// scanned.
pub fn brute_force_enum(q: &Conductor, max_length: usize, entry_bound: u64) -> SearchOutcome {
    let bound = entry_bound as i64;
    let firsts: Vec<i64> = (-bound..=bound).filter(|&x| x != 0).collect();
    let sets: Vec<LoopSet> = firsts
        .into_par_iter()
        .map(|m0| {
            let mut set = LoopSet::default();
            let mut entries = vec![BigInt::from(m0)];
            walk(
                q,
                &mut entries,
                &BigRational::from_integer(m0.into()),
                max_length,
                bound,
                &mut set,
            );
            set
        })
        .collect();
    let mut all = LoopSet::default();
    for s in sets {
        all.extend(s);
    }
    SearchOutcome {
        loops_found: all.into_sorted(),
        exhaustive: true,
        ..SearchOutcome::default()
    }
}

fn walk(q: &Conductor, entries: &mut Vec<BigInt>, value: &BigRational, max_len: usize, bound: i64, set: &mut LoopSet) {
    let t = (q.value() * value).recip();
    if t.is_integer() && t.to_integer().abs() <= BigInt::from(bound) {
        entries.push(-t.to_integer());
        set.insert(q, &Path::new(entries.clone()).expect("non-empty"));
        entries.pop();
    }
    if entries.len() >= max_len {
        return;
    }
    for m in (-bound..=bound).filter(|&m| m != 0) {
        let next = BigRational::from_integer(m.into()) + &t;
        if next.is_zero() {
            continue;
        }
        entries.push(m.into());
        walk(q, entries, &next, max_len, bound, set);
        entries.pop();
    }
}
