//! Recursive solver for the cleared loop equation `F(m_0, ..., m_k) = 0`.
//!
//! Each node holds a multilinear form in the still-free slots. A dominance
//! bound caps the smallest `|slot|`; the solver branches on which slot attains
//! the minimum and its value, substitutes, and recurses down to one or two
//! slots, which are solved outright.
//!
//! Loops of a fixed length need not be finite in number: when a fixed interior
//! block has vanishing continuant, `F` sees its two neighbours only through a
//! linear combination `p x + r y`. Such a pair is merged into one slot and each
//! solution of the merged problem stands for a one-parameter family, reported
//! through a single representative.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{divisors, LoopSet, SearchBudget, SearchOutcome, SearchStats};
use crate::continuant::{cleared_form, MultilinearForm};
use crate::error::{QfracError, Result};
use crate::fraction::{eval, Conductor, Path};
use crate::numeric::suffix_repair;

/// Top-level dominance bound of a form: every solution has some
/// `|m_j| <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceBound {
    /// Smallest `t >= 1` such that `|m_j| >= t` for all `j` forces `F != 0`.
    pub threshold: BigInt,
    /// `threshold - 1`.
    pub bound: BigInt,
}

/// Dominance bound over all variables of `form`; `None` when the product of
/// all its variables has coefficient zero.
pub fn dominance_bound(form: &MultilinearForm) -> Option<DominanceBound> {
    let vars: Vec<(usize, BigInt)> = (0..form.num_vars())
        .filter(|&v| form.support() >> v & 1 == 1)
        .map(|v| (v, BigInt::zero()))
        .collect();
    let t = threshold(form, &vars)?;
    Some(DominanceBound {
        bound: &t - 1,
        threshold: t,
    })
}

/// Whether `|c_full| prod_j s_j > sum_{A != full} |c_A| prod_{j in A} s_j`
/// with `s_j = max(t, lower_j)`.
fn dominates(form: &MultilinearForm, vars: &[(usize, BigInt)], t: &BigInt) -> bool {
    let full: u64 = vars.iter().fold(0, |m, (v, _)| m | 1 << v);
    let scale: Vec<(usize, BigInt)> = vars
        .iter()
        .map(|(v, lo)| (*v, if lo > t { lo.clone() } else { t.clone() }))
        .collect();
    let prod = |mask: u64| -> BigInt {
        scale
            .iter()
            .filter(|(v, _)| mask >> v & 1 == 1)
            .fold(BigInt::one(), |acc, (_, s)| acc * s)
    };
    let mut lhs = BigInt::zero();
    let mut rhs = BigInt::zero();
    for (&mask, c) in form.terms() {
        if mask == full {
            lhs = c.abs() * prod(mask);
        } else {
            rhs += c.abs() * prod(mask);
        }
    }
    lhs > rhs
}

/// Smallest `t >= 1` for which [`dominates`] holds. Monotone in `t`, so
/// doubling followed by bisection.
fn threshold(form: &MultilinearForm, vars: &[(usize, BigInt)]) -> Option<BigInt> {
    let full: u64 = vars.iter().fold(0, |m, (v, _)| m | 1 << v);
    if form.coefficient(full).is_zero() {
        return None;
    }
    let mut hi = BigInt::one();
    while !dominates(form, vars, &hi) {
        hi *= 2;
    }
    let mut lo: BigInt = &hi / 2; // fails, or is 0
    if lo.is_zero() {
        return Some(hi);
    }
    while &hi - &lo > BigInt::one() {
        let mid = (&lo + &hi) / 2;
        if dominates(form, vars, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// A free variable of the search. Original slots are `m_0..m_k`; merged slots
/// get fresh indices above `k`.
#[derive(Clone, Debug)]
struct Slot {
    var: usize,
    allow_zero: bool,
    lower: BigInt,
}

/// `var = p * left + r * right` with `gcd(p, r) = 1`.
#[derive(Clone, Debug)]
struct Merge {
    var: usize,
    left: usize,
    right: usize,
    p: BigInt,
    r: BigInt,
}

#[derive(Clone, Debug)]
struct Node {
    form: MultilinearForm,
    slots: Vec<Slot>,
    values: Vec<(usize, BigInt)>,
    merges: Vec<Merge>,
    next_var: usize,
}

impl Node {
    fn assign(&self, idx: usize, value: BigInt, lowers: impl Fn(usize) -> Option<BigInt>) -> Node {
        let slot = &self.slots[idx];
        let mut slots = Vec::with_capacity(self.slots.len() - 1);
        for (i, s) in self.slots.iter().enumerate() {
            if i == idx {
                continue;
            }
            let mut s = s.clone();
            if let Some(lo) = lowers(i) {
                if lo > s.lower {
                    s.lower = lo;
                }
            }
            slots.push(s);
        }
        let form = normalized(&self.form.substitute(slot.var, &value));
        let mut values = self.values.clone();
        values.push((slot.var, value));
        Node {
            form,
            slots,
            values,
            merges: self.merges.clone(),
            next_var: self.next_var,
        }
    }
}

/// Divides out the content.
fn normalized(form: &MultilinearForm) -> MultilinearForm {
    let g = form.content();
    if g.is_zero() || g.is_one() {
        return form.clone();
    }
    let mut out = MultilinearForm::new(form.num_vars());
    for (&mask, c) in form.terms() {
        out.add_term(mask, &(c / &g));
    }
    out
}

struct Ctx<'a> {
    q: &'a Conductor,
    k: usize,
    budget: &'a SearchBudget,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
    deadline: Option<Instant>,
}

#[derive(Default)]
struct Acc {
    loops: LoopSet,
    stats: SearchStats,
    incomplete: bool,
}

impl Acc {
    fn absorb(&mut self, other: Acc) {
        self.loops.extend(other.loops);
        self.stats.absorb(&other.stats);
        self.incomplete |= other.incomplete;
    }
}

impl Ctx<'_> {
    fn bounded(&self) -> Option<&BigInt> {
        self.budget.entry_bound.as_ref()
    }

    fn allowed(&self, slot: &Slot, v: &BigInt) -> bool {
        if v.is_zero() && !slot.allow_zero {
            return false;
        }
        let a = v.abs();
        a >= slot.lower && self.bounded().is_none_or(|b| &a <= b)
    }

    /// Counts a node; false once the node or time budget is spent.
    fn tick(&self, acc: &mut Acc) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            acc.incomplete = true;
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        acc.stats.nodes += 1;
        let over_time = n.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() > d);
        if n >= self.budget.node_limit || over_time {
            self.stop.store(true, Ordering::Relaxed);
            acc.incomplete = true;
            return false;
        }
        true
    }

    fn solve(&self, mut node: Node, top: bool, acc: &mut Acc) {
        loop {
            if !self.tick(acc) {
                return;
            }
            if node.form.is_zero() {
                if node.slots.is_empty() {
                    self.emit(&node, acc);
                } else {
                    acc.stats.non_path_branches += 1;
                }
                return;
            }
            let support = node.form.support();
            if node.slots.iter().any(|s| support >> s.var & 1 == 0) {
                // F no longer depends on a free slot: changing it keeps F = 0,
                // which a genuine loop forbids.
                acc.stats.non_path_branches += 1;
                return;
            }
            if node.slots.is_empty() || !constant_divisible(&node.form) {
                return;
            }
            match node.slots.len() {
                1 => return self.solve_linear(&node, acc),
                2 => {
                    let (x, y) = (node.slots[0].var, node.slots[1].var);
                    if !node.form.coefficient(1 << x | 1 << y).is_zero() {
                        return self.solve_hyperbola(&node, acc);
                    }
                }
                _ => {}
            }
            let full = node.slots.iter().fold(0u64, |m, s| m | 1 << s.var);
            if !node.form.coefficient(full).is_zero() {
                return self.branch_min(&node, top, acc);
            }
            if self.bounded().is_some() {
                return self.branch_box(&node, acc);
            }
            match find_merge(&node) {
                Some(next) => node = next,
                None => {
                    acc.stats.unresolved += 1;
                    acc.incomplete = true;
                    return;
                }
            }
        }
    }

    fn solve_linear(&self, node: &Node, acc: &mut Acc) {
        acc.stats.base_cases += 1;
        let slot = &node.slots[0];
        let alpha = node.form.coefficient(1 << slot.var);
        let delta = node.form.coefficient(0);
        let (v, rem) = (-delta).div_rem(&alpha);
        if rem.is_zero() && self.allowed(slot, &v) {
            let child = node.assign(0, v, |_| None);
            self.emit(&child, acc);
        }
    }

    /// `a x y + b x + c y + d = 0`, i.e. `(a x + c)(a y + b) = b c - a d`.
    fn solve_hyperbola(&self, node: &Node, acc: &mut Acc) {
        acc.stats.base_cases += 1;
        let (sx, sy) = (&node.slots[0], &node.slots[1]);
        let f = &node.form;
        let a = f.coefficient(1 << sx.var | 1 << sy.var);
        let b = f.coefficient(1 << sx.var);
        let c = f.coefficient(1 << sy.var);
        let d = f.coefficient(0);
        let r = &b * &c - &a * &d;
        if r.is_zero() {
            // a x + c = 0 or a y + b = 0 leaves the other slot free.
            acc.stats.non_path_branches += 1;
            return;
        }
        let Some(divs) = divisors(&r, &self.budget.factor_limit) else {
            if self.bounded().is_some() {
                return self.branch_box(node, acc);
            }
            acc.stats.unresolved += 1;
            acc.incomplete = true;
            return;
        };
        for dx in divs.iter().flat_map(|d| [d.clone(), -d]) {
            let dy = &r / &dx;
            let (x, rx) = (&dx - &c).div_rem(&a);
            let (y, ry) = (&dy - &b).div_rem(&a);
            if !rx.is_zero() || !ry.is_zero() || !self.allowed(sx, &x) || !self.allowed(sy, &y) {
                continue;
            }
            let mut values = node.values.clone();
            values.push((sx.var, x));
            values.push((sy.var, y));
            let leaf = Node {
                form: MultilinearForm::new(node.form.num_vars()),
                slots: Vec::new(),
                values,
                merges: node.merges.clone(),
                next_var: node.next_var,
            };
            self.emit(&leaf, acc);
        }
    }

    /// Branches on the slot attaining `min |slot|` (first in the branching
    /// order on ties) and on its absolute value, which the dominance bound
    /// caps. Slots before it in the order get `|v| > mu`, those after `|v| >= mu`.
    fn branch_min(&self, node: &Node, top: bool, acc: &mut Acc) {
        let vars: Vec<(usize, BigInt)> = node.slots.iter().map(|s| (s.var, s.lower.clone())).collect();
        let mut cap = threshold(&node.form, &vars).expect("full term present") - 1;
        if let Some(b) = self.bounded() {
            if b < &cap {
                cap = b.clone();
            }
        }
        let mut order: Vec<usize> = (0..node.slots.len()).collect();
        order.sort_by_key(|&i| (node.form.surviving_terms(node.slots[i].var), node.slots[i].var));
        let rank: Vec<usize> = {
            let mut r = vec![0; order.len()];
            for (pos, &i) in order.iter().enumerate() {
                r[i] = pos;
            }
            r
        };
        let children = order.iter().flat_map(|&i| {
            let slot = &node.slots[i];
            let start = if slot.allow_zero {
                slot.lower.clone()
            } else {
                slot.lower.clone().max(BigInt::one())
            };
            num_iter(start, cap.clone()).flat_map(move |mu| {
                // F(-m) = +-F(m) at the root: the negative half mirrors the positive one.
                let signs: &[i8] = if top || mu.is_zero() { &[1] } else { &[1, -1] };
                signs.iter().map(move |&s| (i, if s > 0 { mu.clone() } else { -&mu }))
            })
        });
        let make = |i: usize, v: BigInt| -> Node {
            let mu = v.abs();
            let pos = rank[i];
            node.assign(i, v, |j| Some(if rank[j] < pos { &mu + 1 } else { mu.clone() }))
        };
        if top {
            let list: Vec<(usize, BigInt)> = children.collect();
            let parts: Vec<Acc> = list
                .into_par_iter()
                .map(|(i, v)| {
                    let mut a = Acc::default();
                    if self.allowed(&node.slots[i], &v) {
                        self.solve(make(i, v), false, &mut a);
                    }
                    a
                })
                .collect();
            for p in parts {
                acc.absorb(p);
            }
        } else {
            for (i, v) in children {
                if self.stop.load(Ordering::Relaxed) {
                    acc.incomplete = true;
                    return;
                }
                if self.allowed(&node.slots[i], &v) {
                    self.solve(make(i, v), false, acc);
                }
            }
        }
    }

    /// Box mode without a usable bound: try every admissible value of the
    /// slot whose substitution leaves the fewest terms.
    fn branch_box(&self, node: &Node, acc: &mut Acc) {
        let b = self.bounded().expect("box mode").clone();
        let i = (0..node.slots.len())
            .min_by_key(|&i| (node.form.surviving_terms(node.slots[i].var), node.slots[i].var))
            .expect("slots left");
        for v in num_iter(-&b, b.clone()) {
            if self.stop.load(Ordering::Relaxed) {
                acc.incomplete = true;
                return;
            }
            if self.allowed(&node.slots[i], &v) {
                self.solve(node.assign(i, v, |_| None), false, acc);
            }
        }
    }

    /// Records a complete solution: rebuilds `m`, keeps it if it is a loop,
    /// and otherwise extracts the loop hidden in its tail.
    fn emit(&self, node: &Node, acc: &mut Acc) {
        let mut vals: Vec<Option<BigInt>> = vec![None; node.next_var.max(self.k + 1)];
        for (v, x) in &node.values {
            vals[*v] = Some(x.clone());
        }
        if !node.merges.is_empty() {
            acc.stats.families += 1;
        }
        let mut fallback: Option<Path> = None;
        let found = expand(&node.merges, node.merges.len(), &mut vals, self.k, &mut |m: Path| {
            if eval(self.q, &m).is_loop() {
                acc.loops.insert(self.q, &m);
                true
            } else {
                fallback.get_or_insert(m);
                false
            }
        });
        if found {
            return;
        }
        acc.stats.non_path_solutions += 1;
        if let Some(m) = fallback {
            if let Ok(l) = suffix_repair(self.q, &m) {
                if !l.is_trivial() {
                    acc.loops.insert(self.q, &l);
                }
            }
        }
    }
}

/// `lo, lo + 1, ..., hi`.
fn num_iter(lo: BigInt, hi: BigInt) -> impl Iterator<Item = BigInt> {
    let mut cur = lo;
    std::iter::from_fn(move || {
        if cur > hi {
            return None;
        }
        let out = cur.clone();
        cur += 1;
        Some(out)
    })
}

/// The non-constant coefficients share a factor that must divide the constant.
fn constant_divisible(form: &MultilinearForm) -> bool {
    let g = form
        .terms()
        .iter()
        .filter(|(&m, _)| m != 0)
        .fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
    g.is_zero() || form.coefficient(0).is_multiple_of(&g)
}

/// Two slots that never share a term and whose partial derivatives are
/// proportional, `dF/dx = p H` and `dF/dy = r H`: `F` depends on them only
/// through `p x + r y`, which becomes a new slot.
fn find_merge(node: &Node) -> Option<Node> {
    let slots = &node.slots;
    for i in 0..slots.len() {
        for j in i + 1..slots.len() {
            let (x, y) = (slots[i].var, slots[j].var);
            if let Some((p, r)) = proportional(&node.form, x, y) {
                return Some(merge(node, i, j, p, r));
            }
        }
    }
    None
}

fn proportional(form: &MultilinearForm, x: usize, y: usize) -> Option<(BigInt, BigInt)> {
    let (bx, by) = (1u64 << x, 1u64 << y);
    let mut dx = std::collections::BTreeMap::new();
    let mut dy = std::collections::BTreeMap::new();
    for (&mask, c) in form.terms() {
        match (mask & bx != 0, mask & by != 0) {
            (true, true) => return None,
            (true, false) => {
                dx.insert(mask & !bx, c.clone());
            }
            (false, true) => {
                dy.insert(mask & !by, c.clone());
            }
            _ => {}
        }
    }
    if dx.len() != dy.len() || dx.keys().ne(dy.keys()) {
        return None;
    }
    let (m0, cx) = dx.iter().next()?;
    let cy = &dy[m0];
    let g = cx.gcd(cy);
    let (p, r) = (cx / &g, cy / &g);
    dx.iter().all(|(m, c)| c * &r == &dy[m] * &p).then_some((p, r))
}

fn merge(node: &Node, i: usize, j: usize, p: BigInt, r: BigInt) -> Node {
    let (x, y) = (node.slots[i].var, node.slots[j].var);
    let s = node.next_var;
    assert!(s < 64, "too many merged slots");
    let mut form = MultilinearForm::new(64);
    for (&mask, c) in node.form.terms() {
        if mask >> x & 1 == 1 {
            form.add_term(mask & !(1 << x) | 1 << s, &(c / &p));
        } else if mask >> y & 1 == 0 {
            form.add_term(mask, c);
        }
    }
    let mut slots: Vec<Slot> = node
        .slots
        .iter()
        .enumerate()
        .filter(|&(n, _)| n != i && n != j)
        .map(|(_, s)| s.clone())
        .collect();
    slots.push(Slot {
        var: s,
        allow_zero: true,
        lower: BigInt::zero(),
    });
    let mut merges = node.merges.clone();
    merges.push(Merge {
        var: s,
        left: x,
        right: y,
        p,
        r,
    });
    Node {
        form,
        slots,
        values: node.values.clone(),
        merges,
        next_var: s + 1,
    }
}

/// Resolves merged slots (last merge first) into values for the original
/// variables and calls `f` on each candidate `m` until it returns true.
fn expand(
    merges: &[Merge],
    upto: usize,
    vals: &mut Vec<Option<BigInt>>,
    k: usize,
    f: &mut dyn FnMut(Path) -> bool,
) -> bool {
    if upto == 0 {
        let m: Vec<BigInt> = vals[..=k].iter().map(|v| v.clone().expect("assigned")).collect();
        return f(Path::new(m).expect("non-empty"));
    }
    let mg = &merges[upto - 1];
    let s = vals[mg.var].clone().expect("merged slot assigned");
    let nonzero = |v: usize| v <= k;
    for (x, y) in split_candidates(&mg.p, &mg.r, &s, k + 3) {
        if (nonzero(mg.left) && x.is_zero()) || (nonzero(mg.right) && y.is_zero()) {
            continue;
        }
        vals[mg.left] = Some(x);
        vals[mg.right] = Some(y);
        if expand(merges, upto - 1, vals, k, f) {
            return true;
        }
    }
    false
}

/// Solutions of `p x + r y = s` near the one minimising `|x| + |y|`, at most
/// `2 w + 1` consecutive members of the line, smallest first.
fn split_candidates(p: &BigInt, r: &BigInt, s: &BigInt, w: usize) -> Vec<(BigInt, BigInt)> {
    let e = p.extended_gcd(r);
    debug_assert!(e.gcd.is_one());
    let (x0, y0) = (s * &e.x, s * &e.y);
    // x = x0 + r t, y = y0 - p t; centre on the t that zeroes the larger step.
    let t0 = if r.abs() >= p.abs() {
        round_div(&-&x0, r)
    } else {
        round_div(&y0, p)
    };
    let w = BigInt::from(w);
    let mut out: Vec<(BigInt, BigInt)> = num_iter(&t0 - &w, &t0 + &w)
        .map(|t| (&x0 + r * &t, &y0 - p * &t))
        .collect();
    out.sort_by(|a, b| (a.0.abs() + a.1.abs()).cmp(&(b.0.abs() + b.1.abs())).then(a.cmp(b)));
    out
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (num, den) = if b.is_negative() {
        (-a, -b)
    } else {
        (a.clone(), b.clone())
    };
    (BigInt::from(2) * num + &den).div_floor(&(BigInt::from(2) * den))
}

/// All loops of length exactly `k` for `q = a/b` among integer vectors with
/// non-zero entries, plus the shorter loops recovered from solutions that
/// fail the path test.
pub fn diophantine_search(
    a: impl Into<BigInt>,
    b: impl Into<BigInt>,
    k: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    let (a, b) = (a.into(), b.into());
    let q = Conductor::from_parts(a.clone(), b.clone())?;
    if !a.gcd(&b).is_one() {
        return Err(QfracError::InvalidArgument(format!("{a} and {b} are not coprime")));
    }
    let form = cleared_form(&a, &b, k)?;
    let mut wide = MultilinearForm::new(64);
    for (&mask, c) in form.terms() {
        wide.add_term(mask, c);
    }
    let root = Node {
        form: normalized(&wide),
        slots: (0..=k)
            .map(|var| Slot {
                var,
                allow_zero: false,
                lower: BigInt::one(),
            })
            .collect(),
        values: Vec::new(),
        merges: Vec::new(),
        next_var: k + 1,
    };
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let ctx = Ctx {
        q: &q,
        k,
        budget,
        nodes: &nodes,
        stop: &stop,
        deadline: budget.time_limit.map(|d| Instant::now() + d),
    };
    let mut acc = Acc::default();
    ctx.solve(root, true, &mut acc);
    Ok(SearchOutcome {
        loops_found: acc.loops.into_sorted(),
        exhaustive: !acc.incomplete,
        stats: acc.stats,
    })
}

/// [`diophantine_search`] for every length `1..=max_k`.
pub fn diophantine_search_upto(
    a: impl Into<BigInt>,
    b: impl Into<BigInt>,
    max_k: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    let (a, b) = (a.into(), b.into());
    let mut out = SearchOutcome::empty(true);
    for k in 1..=max_k {
        out.merge(diophantine_search(a.clone(), b.clone(), k, budget)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::canonical_symmetry_image;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn top_bound_for_26_over_23() {
        let f = cleared_form(&big(26), &big(23), 6).unwrap();
        let d = dominance_bound(&f).unwrap();
        assert_eq!(d.bound, big(2));
    }

    #[test]
    fn bound_is_tight_threshold() {
        let f = cleared_form(&big(7), &big(2), 6).unwrap();
        let d = dominance_bound(&f).unwrap();
        let vars: Vec<_> = (0..7).map(|v| (v, BigInt::zero())).collect();
        assert!(dominates(&f, &vars, &d.threshold));
        assert!(d.bound.is_zero() || !dominates(&f, &vars, &d.bound));
    }

    #[test]
    fn two_thirds_length_two() {
        let out = diophantine_search(2, 3, 2, &SearchBudget::default()).unwrap();
        assert!(out.exhaustive);
        let c = canonical_symmetry_image(&Path::from_i64s(&[1, -1, -3]));
        let hit = out.loops_found.iter().find(|l| l.path == c).expect("found");
        // The stored image is the reversal, of weight 9 instead of 1/9.
        assert_eq!(hit.path, Path::from_i64s(&[-3, -1, 1]));
        assert_eq!(
            hit.weight_sq.value(),
            &num_rational::BigRational::from_integer(9.into())
        );
    }

    #[test]
    fn odd_lengths_empty_for_integer_five() {
        for k in [1, 3, 5] {
            let out = diophantine_search(5, 1, k, &SearchBudget::default()).unwrap();
            assert!(out.exhaustive && out.loops_found.is_empty(), "k = {k}");
        }
    }

    #[test]
    fn split_candidates_lie_on_line() {
        let (p, r, s) = (big(3), big(-7), big(11));
        let c = split_candidates(&p, &r, &s, 5);
        assert_eq!(c.len(), 11);
        for (x, y) in &c {
            assert_eq!(&p * x + &r * y, s);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let budget = SearchBudget::default().with_node_limit(3);
        let out = diophantine_search(26, 23, 6, &budget).unwrap();
        assert!(!out.exhaustive);
    }
}
