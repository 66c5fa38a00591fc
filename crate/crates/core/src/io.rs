//! Text formats for systems and certificates.
//!
//! A system file starts with a header line
//!
//! ```text
//! diagpair-system p=5 tau=1 K=11 s=3
//! ```
//!
//! followed by any number of `meta key=value` lines and then exactly `s`
//! lines `a b` of decimal residues mod `p^K`. Blank lines and lines starting
//! with `#` are skipped. A certificate file lists sorted 0-based column
//! indices, one per line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::certificate::Certificate;
use crate::error::{invalid, Result};
use crate::padic::Modulus;
use crate::system::System;

const MAGIC: &str = "diagpair-system";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDocument {
    pub p: u64,
    pub tau: u32,
    pub precision: u32,
    pub columns: Vec<[u128; 2]>,
    pub meta: BTreeMap<String, String>,
}

impl SystemDocument {
    pub fn from_system(sys: &System) -> Self {
        SystemDocument {
            p: sys.p(),
            tau: sys.tau(),
            precision: sys.precision(),
            columns: sys.columns().iter().map(|c| c.map(|x| x.value())).collect(),
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_system(&self) -> Result<System> {
        System::new(self.p, self.tau, self.precision, &self.columns)
    }

    pub fn emit(&self) -> String {
        let mut out = format!("{MAGIC} p={} tau={} K={} s={}\n", self.p, self.tau, self.precision, self.columns.len());
        for (k, v) in &self.meta {
            writeln!(out, "meta {k}={v}").unwrap();
        }
        for [a, b] in &self.columns {
            writeln!(out, "{a} {b}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| invalid("empty system file"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some(MAGIC) {
            return Err(invalid(format!("header must start with {MAGIC:?}")));
        }
        let mut header_vals: BTreeMap<&str, &str> = BTreeMap::new();
        for f in fields {
            let (k, v) = f.split_once('=').ok_or_else(|| invalid(format!("bad header field {f:?}")))?;
            if header_vals.insert(k, v).is_some() {
                return Err(invalid(format!("repeated header field {k:?}")));
            }
        }
        let get = |k: &str| -> Result<u128> {
            let v = header_vals.get(k).ok_or_else(|| invalid(format!("header lacks {k}=")))?;
            v.parse().map_err(|_| invalid(format!("header field {k}={v} is not a number")))
        };
        let p = u64::try_from(get("p")?).map_err(|_| invalid("p too large"))?;
        let tau = u32::try_from(get("tau")?).map_err(|_| invalid("tau too large"))?;
        let precision = u32::try_from(get("K")?).map_err(|_| invalid("K too large"))?;
        let s = usize::try_from(get("s")?).map_err(|_| invalid("s too large"))?;
        if header_vals.len() != 4 {
            return Err(invalid("header must hold exactly p, tau, K and s"));
        }
        let modulus = Modulus::new(p, precision)?.modulus();
        let mut meta = BTreeMap::new();
        let mut columns = Vec::with_capacity(s);
        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("meta ") {
                if !columns.is_empty() {
                    return Err(invalid(format!("line {n}: meta after the first column")));
                }
                let (k, v) = rest.split_once('=').ok_or_else(|| invalid(format!("line {n}: meta needs key=value")))?;
                meta.insert(k.trim().to_string(), v.trim().to_string());
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(invalid(format!("line {n}: expected two residues")));
            };
            let mut col = [0u128; 2];
            for (slot, digits) in col.iter_mut().zip([a, b]) {
                if !digits.bytes().all(|c| c.is_ascii_digit()) {
                    return Err(invalid(format!("line {n}: {digits:?} is not a decimal residue")));
                }
                *slot = digits.parse().map_err(|_| invalid(format!("line {n}: {digits:?} overflows")))?;
                if *slot >= modulus {
                    return Err(invalid(format!("line {n}: {digits} is not below p^K = {modulus}")));
                }
            }
            columns.push(col);
        }
        if columns.len() != s {
            return Err(invalid(format!("header says s={s} but {} columns follow", columns.len())));
        }
        Ok(SystemDocument { p, tau, precision, columns, meta })
    }
}

pub fn emit_certificate(cert: &Certificate) -> String {
    cert.support.iter().map(|i| format!("{i}\n")).collect()
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut support = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let i: usize = line.parse().map_err(|_| invalid(format!("line {}: {line:?} is not an index", n + 1)))?;
        if support.last().is_some_and(|&last| last >= i) {
            return Err(invalid(format!("line {}: indices must be strictly increasing", n + 1)));
        }
        support.push(i);
    }
    Ok(Certificate { support })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let doc = SystemDocument {
            p: 3,
            tau: 1,
            precision: 4,
            columns: vec![[1, 3], [80, 0], [5, 5]],
            meta: BTreeMap::new(),
        }
        .with_meta("seed", 7);
        let text = doc.emit();
        assert!(text.starts_with("diagpair-system p=3 tau=1 K=4 s=3\nmeta seed=7\n1 3\n"));
        assert_eq!(SystemDocument::parse(&text).unwrap(), doc);
        assert!(doc.to_system().is_ok());
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "system p=3 tau=1 K=4 s=1\n1 1\n",
            "diagpair-system p=3 tau=1 K=4 s=2\n1 1\n",
            "diagpair-system p=3 tau=1 K=4 s=1\n81 1\n",
            "diagpair-system p=3 tau=1 K=4 s=1\n-1 1\n",
            "diagpair-system p=3 tau=1 K=4 s=1\n1 1 1\n",
            "diagpair-system p=3 tau=1 s=1\n1 1\n",
            "diagpair-system p=4 tau=1 K=4 s=1\n1 1\n",
        ] {
            assert!(SystemDocument::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn certificates() {
        let cert = parse_certificate("# support\n0\n3\n\n5\n").unwrap();
        assert_eq!(cert.support, vec![0, 3, 5]);
        assert_eq!(parse_certificate(&emit_certificate(&cert)).unwrap(), cert);
        assert!(parse_certificate("3\n1\n").is_err());
        assert!(parse_certificate("x\n").is_err());
    }
}
