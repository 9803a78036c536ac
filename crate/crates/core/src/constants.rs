//! Coarse constants with provenance, and the flat `key = value` file they
//! are frozen into.
//!
//! ```text
//! # delta [fitted]: four-point condition over ...
//! delta = 1
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hierarchy::HierarchyConstants;

/// Frozen constants shipped with the crate.
pub const FROZEN: &str = include_str!("../constants/frozen.txt");

/// Environment variable that points the CLI at another constants file.
pub const CONSTANTS_ENV: &str = "TORUS_MM_CONSTANTS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Fitted,
    Assumed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tagged {
    pub value: f64,
    pub source: Source,
    pub provenance: String,
}

impl Tagged {
    pub fn fitted(value: f64, provenance: impl Into<String>) -> Tagged {
        Tagged { value, source: Source::Fitted, provenance: provenance.into() }
    }

    pub fn assumed(value: f64, provenance: impl Into<String>) -> Tagged {
        Tagged { value, source: Source::Assumed, provenance: provenance.into() }
    }
}

pub const KEYS: [&str; 17] = [
    "delta", "B0", "frame_error", "M1", "M2", "M3", "K_H", "c1", "c2", "c1_S", "c2_S", "K", "N", "R0", "C", "D", "K0",
];

/// All coarse constants used by the experiments, keyed by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoarseConstants {
    values: BTreeMap<String, Tagged>,
}

impl CoarseConstants {
    pub fn new() -> CoarseConstants {
        CoarseConstants::default()
    }

    pub fn set(&mut self, key: &str, t: Tagged) {
        self.values.insert(key.to_string(), t);
    }

    pub fn get(&self, key: &str) -> Result<&Tagged> {
        self.values.get(key).ok_or_else(|| Error::Invalid(format!("missing constant {key}")))
    }

    pub fn value(&self, key: &str) -> Result<f64> {
        Ok(self.get(key)?.value)
    }

    /// Integer-valued constant.
    pub fn int(&self, key: &str) -> Result<u64> {
        let v = self.value(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Invalid(format!("constant {key} = {v} is not a nonnegative integer")));
        }
        Ok(v as u64)
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.values.keys()
    }

    pub fn hierarchy(&self) -> Result<HierarchyConstants> {
        let h = HierarchyConstants {
            m1: self.int("M1")?,
            m2: self.int("M2")?,
            m3: self.int("M3")?,
            c1: self.value("c1")?,
            c2: self.value("c2")?,
            k_h: self.value("K_H")?,
        };
        h.validate()?;
        Ok(h)
    }

    /// Compares values only; provenance text may differ.
    pub fn same_values(&self, other: &CoarseConstants) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().all(|(k, v)| other.values.get(k).is_some_and(|w| w.value == v.value && w.source == v.source))
    }

    pub fn parse(text: &str) -> Result<CoarseConstants> {
        let mut tags: BTreeMap<String, (Source, String)> = BTreeMap::new();
        let mut out = CoarseConstants::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some((head, prov)) = c.split_once("]:") {
                    if let Some((key, src)) = head.trim().split_once('[') {
                        let source = match src.trim() {
                            "fitted" => Source::Fitted,
                            "assumed" => Source::Assumed,
                            other => return Err(Error::Parse(format!("line {}: unknown source {other:?}", n + 1))),
                        };
                        tags.insert(key.trim().to_string(), (source, prov.trim().to_string()));
                    }
                }
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            let value: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad number {:?}", n + 1, v.trim())))?;
            let (source, provenance) = tags
                .remove(k)
                .ok_or_else(|| Error::Parse(format!("line {}: constant {k} has no provenance comment", n + 1)))?;
            out.set(k, Tagged { value, source, provenance });
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<CoarseConstants> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        CoarseConstants::parse(&text)
    }

    /// The constants shipped in `constants/frozen.txt`.
    pub fn frozen() -> CoarseConstants {
        CoarseConstants::parse(FROZEN).expect("shipped constants parse")
    }

    /// `$TORUS_MM_CONSTANTS` if set, otherwise the shipped file.
    pub fn from_env_or_frozen() -> Result<CoarseConstants> {
        match std::env::var_os(CONSTANTS_ENV) {
            Some(p) => CoarseConstants::load(Path::new(&p)),
            None => Ok(CoarseConstants::frozen()),
        }
    }
}

impl fmt::Display for CoarseConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# torus-mm coarse constants")?;
        let ordered = KEYS.iter().map(|k| k.to_string()).filter(|k| self.values.contains_key(k));
        let rest = self.values.keys().filter(|k| !KEYS.contains(&k.as_str())).cloned();
        for k in ordered.chain(rest) {
            let t = &self.values[&k];
            let src = match t.source {
                Source::Fitted => "fitted",
                Source::Assumed => "assumed",
            };
            writeln!(f, "# {k} [{src}]: {}", t.provenance)?;
            writeln!(f, "{k} = {}", t.value)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = CoarseConstants::new();
        c.set("N", Tagged::fitted(7.0, "max over 100 samples, seed 1"));
        c.set("C", Tagged::assumed(2.0, "chosen"));
        let text = c.to_string();
        let d = CoarseConstants::parse(&text).unwrap();
        assert_eq!(c, d);
        assert_eq!(d.int("N").unwrap(), 7);
        assert!(CoarseConstants::parse("N = 3").is_err());
        assert!(d.int("missing").is_err());
    }

    #[test]
    fn shipped_file_is_complete() {
        let c = CoarseConstants::frozen();
        for k in KEYS {
            assert!(c.get(k).is_ok(), "{k}");
        }
        c.hierarchy().unwrap();
    }
}
