//! The append-only certificate store and the scan coverage ledger.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path as FsPath, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cert::{parse_lines, CertKind, Certificate, Method};
use crate::error::{QfracError, Result};

/// Default store file when neither `--store` nor `QFRAC_STORE` is given.
pub const DEFAULT_STORE: &str = "certificates.jsonl";

/// A JSONL file of certificates with one writer at a time.
///
/// Opening takes an exclusive lock and cuts off a trailing partial line left
/// by an interrupted write. Records equal up to version and timestamp are
/// stored once.
#[derive(Debug)]
pub struct Store {
    path: PathBuf,
    file: File,
    certs: Vec<Certificate>,
    seen: HashSet<String>,
}

impl Store {
    pub fn open(path: impl AsRef<FsPath>) -> Result<Store> {
        let path = path.as_ref().to_path_buf();
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(&path)?;
        file.try_lock()
            .map_err(|e| QfracError::InvalidArgument(format!("store {} is in use: {e}", path.display())))?;
        let mut text = String::new();
        file.read_to_string(&mut text)?;
        if !text.is_empty() && !text.ends_with('\n') {
            let keep = text.rfind('\n').map_or(0, |i| i + 1);
            file.set_len(keep as u64)?;
            text.truncate(keep);
        }
        file.seek(SeekFrom::End(0))?;
        let certs = parse_lines(&text)?;
        let seen = certs.iter().map(Certificate::identity).collect();
        Ok(Store {
            path,
            file,
            certs,
            seen,
        })
    }

    /// Reads a store without locking it.
    pub fn read(path: impl AsRef<FsPath>) -> Result<Vec<Certificate>> {
        match fs::read_to_string(path.as_ref()) {
            Ok(text) => {
                // A partial last line belongs to a writer still at work.
                let complete = match text.rfind('\n') {
                    Some(i) => &text[..=i],
                    None => "",
                };
                parse_lines(complete)
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn path(&self) -> &FsPath {
        &self.path
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certs
    }

    pub fn contains(&self, c: &Certificate) -> bool {
        self.seen.contains(&c.identity())
    }

    /// Appends `c` unless an equal record is present. Returns whether it was
    /// written.
    pub fn append(&mut self, c: Certificate) -> Result<bool> {
        if !self.seen.insert(c.identity()) {
            return Ok(false);
        }
        let mut line = c.to_line();
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        self.certs.push(c);
        Ok(true)
    }

    /// Distinct record identities, sorted: equal for stores holding the same
    /// certificates in any order.
    pub fn canonical(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.seen.iter().cloned().collect();
        set.into_iter().collect()
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &FsPath, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(FsPath::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| QfracError::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `b' = ±residue (mod N)` except `exception`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassCover {
    #[serde(rename = "N", with = "crate::cert::int")]
    pub modulus: BigInt,
    #[serde(with = "crate::cert::int")]
    pub residue: BigInt,
    #[serde(default, with = "crate::cert::int::opt", skip_serializing_if = "Option::is_none")]
    pub exception: Option<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certified {
    pub kind: CertKind,
    pub method: Method,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Open {
    /// Method 3 ruled out loops of weight != 1 up to this length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive_upto: Option<usize>,
}

/// Progress for one numerator `a`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumeratorLedger {
    /// Residue classes covered by stored families.
    #[serde(default)]
    pub classes: BTreeSet<ClassCover>,
    /// Denominators certified forbidden.
    #[serde(default)]
    pub certified: BTreeMap<u64, Certified>,
    /// Denominators left open.
    #[serde(default)]
    pub open: BTreeMap<u64, Open>,
}

impl NumeratorLedger {
    /// Family exceptions in range that no certificate has settled yet.
    pub fn pending_exceptions(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self
            .classes
            .iter()
            .filter_map(|c| c.exception.clone())
            .filter(|e| u64::try_from(e).map_or(true, |b| !self.certified.contains_key(&b)))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Which `q = a/b` a scan has settled, persisted after every step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageLedger {
    pub by_a: BTreeMap<u64, NumeratorLedger>,
}

impl CoverageLedger {
    /// Loads a ledger; a missing file is an empty ledger.
    pub fn load(path: impl AsRef<FsPath>) -> Result<CoverageLedger> {
        match fs::read_to_string(path.as_ref()) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(CoverageLedger::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(path.as_ref(), text.as_bytes())
    }

    pub fn is_settled(&self, a: u64, b: u64) -> bool {
        self.by_a
            .get(&a)
            .is_some_and(|l| l.certified.contains_key(&b) || l.open.contains_key(&b))
    }

    pub fn is_certified(&self, a: u64, b: u64) -> bool {
        self.by_a.get(&a).is_some_and(|l| l.certified.contains_key(&b))
    }

    pub fn mark_certified(&mut self, a: u64, b: u64, kind: CertKind, method: Method) {
        let l = self.by_a.entry(a).or_default();
        l.open.remove(&b);
        l.certified.insert(b, Certified { kind, method });
    }

    pub fn mark_open(&mut self, a: u64, b: u64, exhaustive_upto: Option<usize>) {
        let l = self.by_a.entry(a).or_default();
        if !l.certified.contains_key(&b) {
            l.open.insert(b, Open { exhaustive_upto });
        }
    }

    pub fn add_class(&mut self, a: u64, class: ClassCover) {
        self.by_a.entry(a).or_default().classes.insert(class);
    }

    /// Drops certified entries for which `is_backed(a, b)` fails, so that a
    /// resumed scan never trusts a claim the store cannot back. Returns the
    /// number dropped.
    pub fn retain_backed(&mut self, mut is_backed: impl FnMut(u64, u64) -> bool) -> usize {
        let mut dropped = 0;
        for (&a, l) in self.by_a.iter_mut() {
            l.certified.retain(|&b, _| {
                let keep = is_backed(a, b);
                dropped += usize::from(!keep);
                keep
            });
        }
        dropped
    }

    pub fn counts(&self) -> (usize, usize) {
        self.by_a
            .values()
            .fold((0, 0), |(c, o), l| (c + l.certified.len(), o + l.open.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::{Conductor, Path};

    fn cert() -> Certificate {
        Certificate::for_loop(&Conductor::ratio(1, 2), &Path::from_i64s(&[1, -2]), Method::ClosedForm).unwrap()
    }

    #[test]
    fn append_dedupes_and_reopens() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.jsonl");
        {
            let mut s = Store::open(&p).unwrap();
            assert!(s.append(cert()).unwrap());
            let mut later = cert();
            later.timestamp += 10;
            assert!(!s.append(later).unwrap());
        }
        let s = Store::open(&p).unwrap();
        assert_eq!(s.certificates().len(), 1);
        assert_eq!(Store::read(&p).unwrap(), s.certificates());
    }

    #[test]
    fn partial_line_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.jsonl");
        let line = cert().to_line();
        fs::write(&p, format!("{line}\n{}", &line[..20])).unwrap();
        assert_eq!(Store::read(&p).unwrap().len(), 1);
        let s = Store::open(&p).unwrap();
        assert_eq!(s.certificates().len(), 1);
        drop(s);
        assert_eq!(fs::read_to_string(&p).unwrap(), format!("{line}\n"));
    }

    #[test]
    fn second_writer_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.jsonl");
        let _s = Store::open(&p).unwrap();
        assert!(Store::open(&p).is_err());
    }

    #[test]
    fn ledger_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ledger.json");
        let mut l = CoverageLedger::default();
        l.mark_certified(3, 2, CertKind::Loop, Method::Family);
        l.mark_open(3, 1, Some(6));
        l.add_class(
            3,
            ClassCover {
                modulus: 3.into(),
                residue: 1.into(),
                exception: Some(1.into()),
            },
        );
        l.save(&p).unwrap();
        let back = CoverageLedger::load(&p).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.by_a[&3].pending_exceptions(), vec![BigInt::from(1)]);
        assert!(back.is_settled(3, 1) && back.is_certified(3, 2));
        let mut pruned = back;
        assert_eq!(pruned.retain_backed(|_, _| false), 1);
        assert!(!pruned.is_certified(3, 2));
    }
}
