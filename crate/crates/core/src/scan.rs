//! Method escalation for one conductor and the resumable scan over a box of
//! conductors.

use std::collections::HashMap;
use std::path::Path as FsPath;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::cert::{verify_all, CertKind, Certificate, Method};
use crate::error::{QfracError, Result};
use crate::family::{family_from_pair, search_pairs, FamilyCertificate};
use crate::fraction::{Conductor, Path};
use crate::search::{diophantine_search, heuristic_search, length1_loops, length2_loops, SearchBudget};
use crate::store::{ClassCover, CoverageLedger, Store};

/// One stage of the escalation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Loops of length 1 and 2 from their closed forms.
    ClosedForm,
    /// Stored families, then families from pairs of short paths.
    Family,
    /// Exhaustive Diophantine search, length by length.
    Diophantine,
    /// Beam search.
    Heuristic,
    /// `q = q' / n` for a certified `q'`.
    Closure,
}

pub const ESCALATION: [Step; 5] = [
    Step::ClosedForm,
    Step::Family,
    Step::Diophantine,
    Step::Heuristic,
    Step::Closure,
];

impl Step {
    /// The step for `--method n`.
    pub fn from_method(n: u8) -> Option<Step> {
        match n {
            1 => Some(Step::ClosedForm),
            2 => Some(Step::Family),
            3 => Some(Step::Diophantine),
            4 => Some(Step::Heuristic),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Method 3 reads `max_length`, `entry_bound`, `node_limit` and
    /// `time_limit`; Method 4 reads `beam_capacity`, `value_bound`,
    /// `node_limit` and `time_limit`.
    pub budget: SearchBudget,
    /// Longest prefix the beam search grows.
    pub heuristic_length: usize,
    /// Pair search for Method 2: paths with up to `pair_length + 1` entries in
    /// `[-pair_bound, pair_bound]`.
    pub pair_length: usize,
    pub pair_bound: i64,
    /// Families are kept when `N <= family_factor * a`.
    pub family_factor: u64,
    /// Largest `n` tried for `q = q' / n`.
    pub closure_limit: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            budget: SearchBudget::default(),
            heuristic_length: 32,
            pair_length: 2,
            pair_bound: 3,
            family_factor: 12,
            closure_limit: 16,
        }
    }
}

/// What escalation produced for one conductor.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub q: Conductor,
    /// The record certifying `q`, if any.
    pub certificate: Option<Certificate>,
    /// No loop of weight != 1 up to this length (exhaustive Method 3).
    pub exhaustive_upto: Option<usize>,
    /// Records written to the store while handling `q`.
    pub appended: usize,
}

/// Loops from the searches seed families; closed forms and family witnesses
/// add nothing the earlier steps do not already recompute.
fn derives_family(method: Method) -> bool {
    matches!(method, Method::Diophantine | Method::Heuristic)
}

/// Escalation over a store: verified records already in the store are
/// reused, new ones are appended as they are found.
pub struct Engine<'s> {
    store: &'s mut Store,
    config: EngineConfig,
    loops: HashMap<Conductor, Certificate>,
    closures: HashMap<Conductor, Certificate>,
    families: Vec<(Certificate, FamilyCertificate)>,
}

impl<'s> Engine<'s> {
    /// Loads every record of `store` that re-verifies; the rest are ignored.
    pub fn new(store: &'s mut Store, config: EngineConfig) -> Engine<'s> {
        let certs = store.certificates().to_vec();
        let mut engine = Engine {
            store,
            config,
            loops: HashMap::new(),
            closures: HashMap::new(),
            families: Vec::new(),
        };
        for (c, v) in certs.into_iter().zip(verify_all(engine.store.certificates())) {
            if v.is_ok() {
                engine.remember(c);
            }
        }
        engine
    }

    fn remember(&mut self, c: Certificate) {
        let q = c.conductor().expect("verified");
        match c.kind {
            CertKind::Loop => {
                let len = |c: &Certificate| c.path.as_ref().map_or(usize::MAX, Vec::len);
                let better = self.loops.get(&q).is_none_or(|old| len(&c) < len(old));
                if better {
                    self.loops.insert(q, c);
                }
            }
            CertKind::Family => {
                let f = c.family().expect("verified");
                self.families.push((c, f));
            }
            CertKind::Closure => {
                self.closures.entry(q).or_insert(c);
            }
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn store(&self) -> &Store {
        self.store
    }

    /// Verified families of numerator `a`.
    pub fn families_for(&self, a: &BigInt) -> impl Iterator<Item = &FamilyCertificate> + '_ {
        let a = a.clone();
        self.families.iter().map(|(_, f)| f).filter(move |f| f.a == a)
    }

    /// `q` is backed by a verified record: a loop, a family or a closure.
    pub fn is_certified(&self, q: &Conductor) -> bool {
        self.loops.contains_key(q) || self.closures.contains_key(q) || self.families_for(q.a()).any(|f| f.covers(q.b()))
    }

    fn append(&mut self, c: Certificate, appended: &mut usize) -> Result<()> {
        if self.store.append(c.clone())? {
            *appended += 1;
            self.remember(c);
        }
        Ok(())
    }

    fn keep_family(&self, f: &FamilyCertificate) -> bool {
        f.modulus <= &f.a * BigInt::from(self.config.family_factor)
    }

    fn record_loop(
        &mut self,
        q: &Conductor,
        m: &Path,
        method: Method,
        exhaustive_upto: Option<usize>,
        appended: &mut usize,
    ) -> Result<Certificate> {
        // -m is a loop of the same weight; store the one starting positive.
        let m = if m.entries()[0].is_negative() {
            m.negated()
        } else {
            m.clone()
        };
        let m = &m;
        let mut c = Certificate::for_loop(q, m, method)?;
        c.exhaustive_upto = exhaustive_upto.filter(|&k| k > 0);
        self.append(c.clone(), appended)?;
        if derives_family(method) {
            self.derive_family(q, m, appended)?;
        }
        Ok(c)
    }

    /// The family of a loop against the trivial loop, when its modulus is
    /// small enough to be useful.
    fn derive_family(&mut self, q: &Conductor, m: &Path, appended: &mut usize) -> Result<()> {
        if let Ok(f) = family_from_pair(q, m, &Path::trivial()) {
            if self.keep_family(&f) && f.verify(crate::cert::FAMILY_SAMPLES).is_ok() {
                self.append(Certificate::for_family(&f, Method::Derived), appended)?;
            }
        }
        Ok(())
    }

    /// Runs `steps` in order until one certifies `q`.
    pub fn certify(&mut self, q: &Conductor, steps: &[Step]) -> Result<Outcome> {
        let mut appended = 0;
        let mut exhaustive_upto = None;
        if let Some(c) = self.loops.get(q).cloned() {
            if derives_family(c.method) {
                self.derive_family(q, &c.path()?, &mut appended)?;
            }
            return Ok(Outcome {
                q: q.clone(),
                certificate: Some(c),
                exhaustive_upto: None,
                appended,
            });
        }
        for step in steps {
            let found = match step {
                Step::ClosedForm => self.closed_form(q, &mut appended)?,
                Step::Family => self.family(q, &mut appended)?,
                Step::Diophantine => self.diophantine(q, &mut exhaustive_upto, &mut appended)?,
                Step::Heuristic => self.heuristic(q, &mut appended)?,
                Step::Closure => self.closure(q, &mut appended)?,
            };
            if found.is_some() {
                return Ok(Outcome {
                    q: q.clone(),
                    certificate: found,
                    exhaustive_upto,
                    appended,
                });
            }
        }
        Ok(Outcome {
            q: q.clone(),
            certificate: None,
            exhaustive_upto,
            appended,
        })
    }

    fn closed_form(&mut self, q: &Conductor, appended: &mut usize) -> Result<Option<Certificate>> {
        let mut out = length1_loops(q);
        out.merge(length2_loops(q));
        match out.best_nontrivial() {
            Some(l) => {
                let m = l.path.clone();
                self.record_loop(q, &m, Method::ClosedForm, None, appended).map(Some)
            }
            None => Ok(None),
        }
    }

    fn family(&mut self, q: &Conductor, appended: &mut usize) -> Result<Option<Certificate>> {
        let known = self
            .families_for(q.a())
            .filter(|f| f.covers(q.b()))
            .find_map(|f| f.witness_for(q.b()).ok());
        if let Some((_, m, _)) = known {
            return self.record_loop(q, &m, Method::Family, None, appended).map(Some);
        }
        let found = search_pairs(q, self.config.pair_length, self.config.pair_bound);
        for f in &found {
            if let Ok((_, m, _)) = f.witness_for(q.b()) {
                if self.keep_family(f) {
                    self.append(Certificate::for_family(f, Method::Family), appended)?;
                }
                return self.record_loop(q, &m, Method::Family, None, appended).map(Some);
            }
        }
        if let Some(f) = found.first().filter(|f| self.keep_family(f)) {
            if f.verify(crate::cert::FAMILY_SAMPLES).is_ok() {
                self.append(Certificate::for_family(f, Method::Family), appended)?;
            }
        }
        Ok(None)
    }

    fn diophantine(
        &mut self,
        q: &Conductor,
        exhaustive_upto: &mut Option<usize>,
        appended: &mut usize,
    ) -> Result<Option<Certificate>> {
        let mut complete = true;
        for k in 1..=self.config.budget.max_length {
            let out = diophantine_search(q.a().clone(), q.b().clone(), k, &self.config.budget)?;
            let below = complete.then_some(k - 1);
            complete &= out.exhaustive;
            if let Some(l) = out.best_nontrivial() {
                let m = l.path.clone();
                return self.record_loop(q, &m, Method::Diophantine, below, appended).map(Some);
            }
            if complete {
                *exhaustive_upto = Some(k);
            }
        }
        Ok(None)
    }

    fn heuristic(&mut self, q: &Conductor, appended: &mut usize) -> Result<Option<Certificate>> {
        let budget = self.config.budget.clone().with_max_length(self.config.heuristic_length);
        let out = heuristic_search(q, &budget);
        match out.best_nontrivial() {
            Some(l) => {
                let m = l.path.clone();
                self.record_loop(q, &m, Method::Heuristic, None, appended).map(Some)
            }
            None => Ok(None),
        }
    }

    fn closure(&mut self, q: &Conductor, appended: &mut usize) -> Result<Option<Certificate>> {
        for n in 2..=self.config.closure_limit {
            let parent = Conductor::new(q.value() * BigRational::from_integer(n.into()))?;
            if self.is_certified(&parent) {
                let c = Certificate::for_closure(q, &parent, n);
                self.append(c.clone(), appended)?;
                return Ok(Some(c));
            }
        }
        Ok(None)
    }
}

/// The box of a scan: reduced `a/b` with `a <= a_max`, `b <= b_max` and
/// `a/b < min(q_max, 4)`.
#[derive(Clone, Debug)]
pub struct ScanBounds {
    pub a_max: u64,
    pub b_max: u64,
    pub q_max: Option<BigRational>,
}

impl ScanBounds {
    pub fn conductors(&self) -> Vec<Conductor> {
        let four = BigRational::from_integer(4.into());
        let cap = match &self.q_max {
            Some(q) if *q < four => q.clone(),
            _ => four,
        };
        let mut out = Vec::new();
        for a in 1..=self.a_max {
            for b in 1..=self.b_max {
                if a.gcd(&b) != 1 {
                    continue;
                }
                let q = BigRational::new(a.into(), b.into());
                if q < cap {
                    out.push(Conductor::new(q).expect("positive"));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScanSummary {
    pub certified: usize,
    pub open: Vec<Conductor>,
    /// Conductors already settled in the ledger.
    pub skipped: usize,
    /// Ledger claims dropped on resume for lack of a verifying record.
    pub dropped: usize,
}

fn small(x: &BigInt) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| QfracError::InvalidArgument(format!("{x} is too large for a scan")))
}

fn record_classes(engine: &Engine<'_>, ledger: &mut CoverageLedger, a: &BigInt) -> Result<()> {
    let a64 = small(a)?;
    for f in engine.families_for(a) {
        ledger.add_class(
            a64,
            ClassCover {
                modulus: f.modulus.clone(),
                residue: f.b.mod_floor(&f.modulus),
                exception: f.exception.clone(),
            },
        );
    }
    Ok(())
}

/// Runs the full escalation on every conductor of `bounds`, saving the
/// ledger after each one. With `resume`, conductors already settled in the
/// ledger are skipped, after dropping certified entries the store does not
/// back.
pub fn scan(
    engine: &mut Engine<'_>,
    ledger: &mut CoverageLedger,
    ledger_path: &FsPath,
    bounds: &ScanBounds,
    resume: bool,
    mut progress: impl FnMut(&Outcome),
) -> Result<ScanSummary> {
    let mut summary = ScanSummary::default();
    if resume {
        summary.dropped =
            ledger.retain_backed(|a, b| engine.is_certified(&Conductor::from_parts(a, b).expect("positive")));
    } else {
        *ledger = CoverageLedger::default();
    }
    for q in bounds.conductors() {
        let (a, b) = (small(q.a())?, small(q.b())?);
        if ledger.is_settled(a, b) {
            summary.skipped += 1;
            if !ledger.is_certified(a, b) {
                summary.open.push(q);
            } else {
                summary.certified += 1;
            }
            continue;
        }
        let out = engine.certify(&q, &ESCALATION)?;
        match &out.certificate {
            Some(c) => {
                ledger.mark_certified(a, b, c.kind, c.method);
                summary.certified += 1;
            }
            None => {
                ledger.mark_open(a, b, out.exhaustive_upto);
                summary.open.push(q.clone());
            }
        }
        record_classes(engine, ledger, q.a())?;
        ledger.save(ledger_path)?;
        progress(&out);
    }
    Ok(summary)
}

/// Default ledger location next to a store: `certificates.jsonl` gives
/// `certificates.ledger.json`.
pub fn ledger_path_for(store: &FsPath) -> std::path::PathBuf {
    store.with_extension("ledger.json")
}

/// `q = a/b` from command-line integers.
pub fn conductor_from_args(a: &BigInt, b: &BigInt) -> Result<Conductor> {
    if a <= &BigInt::from(0) || b <= &BigInt::from(0) {
        return Err(QfracError::InvalidArgument(format!("need a, b > 0, got {a}, {b}")));
    }
    if !a.gcd(b).is_one() {
        return Err(QfracError::InvalidArgument(format!("gcd({a}, {b}) != 1")));
    }
    Conductor::from_parts(a.clone(), b.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store_in(dir: &tempfile::TempDir) -> Store {
        Store::open(dir.path().join("s.jsonl")).unwrap()
    }

    #[test]
    fn bounds_enumerate_reduced_fractions() {
        let b = ScanBounds {
            a_max: 3,
            b_max: 4,
            q_max: Some(BigRational::one()),
        };
        let qs: Vec<String> = b.conductors().iter().map(|q| q.to_string()).collect();
        assert_eq!(qs, ["1/2", "1/3", "1/4", "2/3", "3/4"]);
        let all = ScanBounds {
            a_max: 20,
            b_max: 1,
            q_max: None,
        };
        assert_eq!(all.conductors().len(), 3);
    }

    #[test]
    fn escalation_stops_at_first_success() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = store_in(&dir);
        let mut e = Engine::new(&mut store, EngineConfig::default());
        let out = e.certify(&Conductor::ratio(2, 3), &ESCALATION).unwrap();
        let c = out.certificate.unwrap();
        assert_eq!(c.method, Method::ClosedForm);
        assert_eq!(c.path.as_ref().unwrap().len(), 3);
        // The second call reuses the stored loop.
        let again = e.certify(&Conductor::ratio(2, 3), &ESCALATION).unwrap();
        assert_eq!(again.certificate.unwrap().path, c.path);
        assert_eq!(again.appended, 0);
    }

    #[test]
    fn family_step_uses_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = store_in(&dir);
        let mut e = Engine::new(&mut store, EngineConfig::default());
        // 3/1 itself is the exception of its family, so nothing is certified
        // but the family is kept and then covers 3/2.
        let out = e.certify(&Conductor::ratio(3, 1), &[Step::Family]).unwrap();
        assert!(out.certificate.is_none());
        let fam: Vec<_> = e.families_for(&BigInt::from(3)).cloned().collect();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].modulus, BigInt::from(3));
        let next = e.certify(&Conductor::ratio(3, 2), &[Step::Family]).unwrap();
        assert_eq!(next.certificate.unwrap().method, Method::Family);
    }

    #[test]
    fn closure_from_parent() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = store_in(&dir);
        let mut e = Engine::new(&mut store, EngineConfig::default());
        e.certify(&Conductor::ratio(2, 3), &[Step::ClosedForm]).unwrap();
        let out = e.certify(&Conductor::ratio(1, 3), &[Step::Closure]).unwrap();
        let c = out.certificate.unwrap();
        assert_eq!(c.kind, CertKind::Closure);
        assert_eq!(c.divisor, Some(BigInt::from(2)));
        let certs = e.store().certificates().to_vec();
        assert!(verify_all(&certs).iter().all(|v| v.is_ok()));
    }

    #[test]
    fn exhaustive_note_for_seven_halves() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = store_in(&dir);
        let mut config = EngineConfig::default();
        config.budget.max_length = 4;
        let mut e = Engine::new(&mut store, config);
        let out = e.certify(&Conductor::ratio(7, 2), &[Step::Diophantine]).unwrap();
        assert!(out.certificate.is_none());
        assert_eq!(out.exhaustive_upto, Some(4));
    }
}
