//! Loop searches: closed forms for lengths 1 and 2, the recursive Diophantine
//! solver, a bounded-value beam heuristic and a brute-force box enumerator.

mod brute;
mod closed_form;
mod diophantine;
mod divisors;
mod heuristic;

use std::collections::BTreeMap;
use std::time::Duration;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::fraction::{canonical_symmetry_image, eval, Conductor, Path, WeightSq};

pub use brute::brute_force_enum;
pub use closed_form::{length1_loops, length2_loops};
pub use diophantine::{diophantine_search, diophantine_search_upto, dominance_bound, DominanceBound};
pub use divisors::divisors;
pub use heuristic::heuristic_search;

/// Limits shared by the search methods.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Longest loop length `k` considered.
    pub max_length: usize,
    /// Box `|m_j| <= B`. Required by the brute-force enumerator; restricts the
    /// Diophantine solver to the box when set.
    pub entry_bound: Option<BigInt>,
    /// Beam width of the heuristic.
    pub beam_capacity: usize,
    /// The heuristic keeps only prefixes with `|c(q, m)| < value_bound`.
    pub value_bound: BigRational,
    /// Solver nodes before the Diophantine search gives up.
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    /// Largest `|R|` the base case will factor by trial division.
    pub factor_limit: BigInt,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_length: 6,
            entry_bound: None,
            beam_capacity: 100_000,
            value_bound: BigRational::from_integer(2.into()),
            node_limit: 200_000_000,
            time_limit: None,
            factor_limit: BigInt::from(10u64).pow(18),
        }
    }
}

impl SearchBudget {
    pub fn with_max_length(mut self, k: usize) -> Self {
        self.max_length = k;
        self
    }

    pub fn with_entry_bound(mut self, b: impl Into<BigInt>) -> Self {
        self.entry_bound = Some(b.into());
        self
    }

    pub fn with_beam(mut self, capacity: usize) -> Self {
        self.beam_capacity = capacity;
        self
    }

    pub fn with_node_limit(mut self, n: u64) -> Self {
        self.node_limit = n;
        self
    }
}

/// A verified loop with its exact squared weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FoundLoop {
    pub path: Path,
    pub weight_sq: WeightSq,
}

impl FoundLoop {
    /// Re-evaluates `path` at `q`; `None` unless it is a loop.
    pub fn verify(q: &Conductor, path: Path) -> Option<FoundLoop> {
        let e = eval(q, &path);
        if !e.is_loop() {
            return None;
        }
        Some(FoundLoop {
            weight_sq: e.weight_sq.expect("loop is a path"),
            path,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub base_cases: u64,
    /// Branches discarded because every solution in them is not a path.
    pub non_path_branches: u64,
    /// Solutions of the loop equation that failed the path test.
    pub non_path_solutions: u64,
    /// One-parameter families of loops, each reported by one member.
    pub families: u64,
    /// Branches the solver could not bound (counted against exhaustiveness).
    pub unresolved: u64,
}

impl SearchStats {
    pub(crate) fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.base_cases += other.base_cases;
        self.non_path_branches += other.non_path_branches;
        self.non_path_solutions += other.non_path_solutions;
        self.families += other.families;
        self.unresolved += other.unresolved;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Canonical symmetry images, sorted and free of duplicates.
    pub loops_found: Vec<FoundLoop>,
    /// The search covered every loop within its stated range.
    pub exhaustive: bool,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn empty(exhaustive: bool) -> Self {
        SearchOutcome {
            loops_found: Vec::new(),
            exhaustive,
            stats: SearchStats::default(),
        }
    }

    /// Loops whose weight differs from 1.
    pub fn nontrivial(&self) -> impl Iterator<Item = &FoundLoop> {
        self.loops_found.iter().filter(|l| !l.weight_sq.is_one())
    }

    /// Shortest loop of weight != 1, ties broken by the smallest entries.
    pub fn best_nontrivial(&self) -> Option<&FoundLoop> {
        self.nontrivial()
            .min_by_key(|l| (l.path.length(), l.path.max_abs_entry(), l.path.clone()))
    }

    pub fn merge(&mut self, other: SearchOutcome) {
        let mut set = LoopSet::default();
        for l in self.loops_found.drain(..).chain(other.loops_found) {
            set.insert_found(l);
        }
        self.loops_found = set.into_sorted();
        self.exhaustive &= other.exhaustive;
        self.stats.absorb(&other.stats);
    }
}

/// Loops keyed by their canonical symmetry image.
#[derive(Clone, Debug, Default)]
pub(crate) struct LoopSet {
    loops: BTreeMap<Path, WeightSq>,
}

impl LoopSet {
    /// Inserts the canonical image of `path` if it is a loop for `q`.
    pub fn insert(&mut self, q: &Conductor, path: &Path) -> bool {
        let canon = canonical_symmetry_image(path);
        if self.loops.contains_key(&canon) {
            return true;
        }
        match FoundLoop::verify(q, canon).or_else(|| FoundLoop::verify(q, path.clone())) {
            Some(l) => {
                self.loops.insert(l.path, l.weight_sq);
                true
            }
            None => false,
        }
    }

    fn insert_found(&mut self, l: FoundLoop) {
        self.loops.insert(l.path, l.weight_sq);
    }

    pub fn extend(&mut self, other: LoopSet) {
        self.loops.extend(other.loops);
    }

    pub fn into_sorted(self) -> Vec<FoundLoop> {
        self.loops
            .into_iter()
            .map(|(path, weight_sq)| FoundLoop { path, weight_sq })
            .collect()
    }
}
