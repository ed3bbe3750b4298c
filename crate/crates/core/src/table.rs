//! Line-oriented cache of Heegner polynomials.
//!
//! ```text
//! # comment
//! D=-19 ⇥ b=64 ⇥ hprime=1 ⇥ prec=60 ⇥ height=8 ⇥ iota=<hex> ⇥ status=ok ⇥ coeffs=-81,64
//! ```
//!
//! Fields are tab-separated (⇥ above) `key=value` pairs in this order; `coeffs` lists
//! the integer coefficients of `P_D` lowest degree first. Entries that failed
//! carry `status=error:<message>` and no coefficients. An entry's hash is the
//! SHA-256 of its canonical line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use rug::Integer;
use sha2::{Digest, Sha256};

use crate::cm::{heegner_poly, HeegnerOptions, HeegnerPolynomial};
use crate::error::{Error, Result};
use crate::quaternion::{iota_fingerprint, Order};

pub const TABLE_ENV: &str = "SUPERSPECIAL_TABLE";
const BUNDLED: &str = include_str!("../data/heegner_table.tsv");
const HEADER: &str = "# Heegner polynomials P_D on the discriminant-6 Shimura curve, j-coordinate";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryStatus {
    Ok,
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub d: i64,
    pub b: Integer,
    pub hprime: usize,
    pub prec: u32,
    pub height: i64,
    pub iota: String,
    pub status: EntryStatus,
    pub coeffs: Vec<Integer>,
}

impl TableEntry {
    pub fn from_poly(p: &HeegnerPolynomial) -> Self {
        TableEntry {
            d: p.d,
            b: p.b.clone(),
            hprime: p.hprime,
            prec: p.digits,
            height: p.height,
            iota: iota_fingerprint(),
            status: EntryStatus::Ok,
            coeffs: p.coeffs.clone(),
        }
    }

    pub fn failed(d: i64, prec: u32, err: &Error) -> Self {
        let msg = err.to_string().replace(['\t', '\n'], " ");
        TableEntry {
            d,
            b: Integer::new(),
            hprime: 0,
            prec,
            height: 0,
            iota: iota_fingerprint(),
            status: EntryStatus::Error(msg),
            coeffs: Vec::new(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == EntryStatus::Ok
    }

    pub fn line(&self) -> String {
        let status = match &self.status {
            EntryStatus::Ok => "ok".to_string(),
            EntryStatus::Error(m) => format!("error:{m}"),
        };
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!(
            "D={}\tb={}\thprime={}\tprec={}\theight={}\tiota={}\tstatus={}\tcoeffs={}",
            self.d,
            self.b,
            self.hprime,
            self.prec,
            self.height,
            self.iota,
            status,
            coeffs.join(",")
        )
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.line().as_bytes());
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn parse(line: &str) -> Result<Self> {
        let bad = |m: &str| Error::Table(format!("{m} in line `{line}`"));
        let fields: Vec<(&str, &str)> = line
            .split('\t')
            .map(|f| f.split_once('=').ok_or_else(|| bad("field without `=`")))
            .collect::<Result<_>>()?;
        let keys = ["D", "b", "hprime", "prec", "height", "iota", "status", "coeffs"];
        if fields.len() != keys.len() || fields.iter().zip(keys).any(|((k, _), want)| *k != want) {
            return Err(bad("unexpected fields"));
        }
        let v = |i: usize| fields[i].1;
        let num = |i: usize| v(i).parse::<i64>().map_err(|_| bad("malformed number"));
        let int = |s: &str| Integer::from_str_radix(s, 10).map_err(|_| bad("malformed integer"));
        let status = match v(6) {
            "ok" => EntryStatus::Ok,
            s => EntryStatus::Error(s.strip_prefix("error:").ok_or_else(|| bad("unknown status"))?.to_string()),
        };
        let coeffs = if v(7).is_empty() {
            Vec::new()
        } else {
            v(7).split(',').map(int).collect::<Result<Vec<_>>>()?
        };
        let entry = TableEntry {
            d: num(0)?,
            b: int(v(1))?,
            hprime: num(2)? as usize,
            prec: num(3)? as u32,
            height: num(4)?,
            iota: v(5).to_string(),
            status,
            coeffs,
        };
        if entry.is_ok() {
            if entry.coeffs.len() != entry.hprime + 1 {
                return Err(bad("degree differs from h′"));
            }
            if entry.coeffs.last() != Some(&entry.b) {
                return Err(bad("leading coefficient differs from b"));
            }
        }
        Ok(entry)
    }

    pub fn poly(&self) -> crate::poly::QPoly {
        crate::poly::QPoly::from_ints(&self.coeffs)
    }
}

#[derive(Debug, Default)]
pub struct HeegnerTable {
    entries: Mutex<BTreeMap<i64, TableEntry>>,
    pub source: Option<PathBuf>,
}

impl Clone for HeegnerTable {
    fn clone(&self) -> Self {
        HeegnerTable { entries: Mutex::new(self.entries.lock().unwrap().clone()), source: self.source.clone() }
    }
}

impl HeegnerTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let e = TableEntry::parse(line)?;
            if map.insert(e.d, e).is_some() {
                return Err(Error::Table(format!("duplicate entry in `{line}`")));
            }
        }
        Ok(HeegnerTable { entries: Mutex::new(map), source: None })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut t = Self::parse(&std::fs::read_to_string(path)?)?;
        t.source = Some(path.to_path_buf());
        Ok(t)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled table is well formed")
    }

    /// Explicit path, else `$SUPERSPECIAL_TABLE`, else the bundled table.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => match std::env::var_os(TABLE_ENV) {
                Some(p) => Self::load(Path::new(&p)),
                None => Ok(Self::bundled()),
            },
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("{HEADER}\n");
        for e in self.entries.lock().unwrap().values() {
            s.push_str(&e.line());
            s.push('\n');
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn get(&self, d: i64) -> Option<TableEntry> {
        self.entries.lock().unwrap().get(&d).cloned()
    }

    /// A usable entry: status ok and computed with the current splitting.
    pub fn get_valid(&self, d: i64) -> Result<Option<TableEntry>> {
        match self.get(d) {
            None => Ok(None),
            Some(e) if !e.is_ok() => Ok(None),
            Some(e) if e.iota != iota_fingerprint() => {
                Err(Error::Table(format!("entry D = {d} was computed with a different splitting")))
            }
            Some(e) => Ok(Some(e)),
        }
    }

    pub fn insert(&self, e: TableEntry) {
        self.entries.lock().unwrap().insert(e.d, e);
    }

    pub fn discriminants(&self) -> Vec<i64> {
        self.entries.lock().unwrap().keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Table entry for `d`, computing and caching it if absent.
    pub fn fetch_or_compute(&self, order: &Order, d: i64, opts: HeegnerOptions) -> Result<TableEntry> {
        if let Some(e) = self.get_valid(d)? {
            return Ok(e);
        }
        let e = TableEntry::from_poly(&heegner_poly(order, d, opts)?);
        self.insert(e.clone());
        Ok(e)
    }
}

/// Compute `P_D` for every `d` and write the table; failures are recorded
/// per entry.
pub fn regenerate_table(order: &Order, ds: &[i64], opts: HeegnerOptions, out: Option<&Path>) -> Result<HeegnerTable> {
    let entries: Vec<TableEntry> = ds
        .par_iter()
        .map(|&d| match heegner_poly(order, d, opts) {
            Ok(p) => TableEntry::from_poly(&p),
            Err(e) => TableEntry::failed(d, opts.digits, &e),
        })
        .collect();
    let table = HeegnerTable::default();
    for e in entries {
        table.insert(e);
    }
    if let Some(path) = out {
        table.save(path)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_round_trip() {
        let e = TableEntry {
            d: -19,
            b: Integer::from(64),
            hprime: 1,
            prec: 60,
            height: 8,
            iota: "00ff".into(),
            status: EntryStatus::Ok,
            coeffs: vec![Integer::from(-81), Integer::from(64)],
        };
        let line = e.line();
        assert_eq!(line, "D=-19\tb=64\thprime=1\tprec=60\theight=8\tiota=00ff\tstatus=ok\tcoeffs=-81,64");
        assert_eq!(TableEntry::parse(&line).unwrap(), e);
        assert_eq!(e.hash().len(), 64);
    }

    #[test]
    fn malformed_lines() {
        assert!(TableEntry::parse("D=-19").is_err());
        assert!(TableEntry::parse("D=-19\tb=64\thprime=2\tprec=60\theight=8\tiota=0\tstatus=ok\tcoeffs=-81,64").is_err());
        assert!(TableEntry::parse("D=-19\tb=63\thprime=1\tprec=60\theight=8\tiota=0\tstatus=ok\tcoeffs=-81,64").is_err());
        let failed = "D=-11\tb=0\thprime=0\tprec=50\theight=0\tiota=0\tstatus=error:no CM points\tcoeffs=";
        assert!(!TableEntry::parse(failed).unwrap().is_ok());
    }

    #[test]
    fn bundled_parses() {
        let t = HeegnerTable::bundled();
        assert!(t.get_valid(-19).unwrap().is_some());
        assert_eq!(HeegnerTable::parse(&t.render()).unwrap().discriminants(), t.discriminants());
    }
}
