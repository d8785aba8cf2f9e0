//! Line-oriented catalog of explicit stabilizer codes.
//!
//! ```text
//! # optional notes, kept as the entry's provenance
//! code 6-4-2 p=2 n=6 k=4 d=2 pure=1
//! 111111|000000
//! 000000|111111
//! ```
//!
//! Entries are separated by blank lines. Each header is followed by exactly
//! `n - k` generator rows. Claimed parameters are recomputed on load and a
//! disagreement is an error.

use std::fmt::Write as _;

use serde::Serialize;

use crate::code::{Distance, StabilizerCode};
use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::symplectic::SympVector;

const BUILTIN: &str = include_str!("../data/codes.txt");

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub p: u8,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub pure: bool,
    pub generators: Vec<SympVector>,
    pub note: String,
    #[serde(skip)]
    code: StabilizerCode,
}

impl CatalogEntry {
    /// Build an entry from generators, taking every parameter from the code.
    pub fn from_code(name: &str, code: StabilizerCode, note: &str) -> Result<Self> {
        let (d, pure) = match code.distance() {
            Distance::Defined { d, pure } => (d, pure),
            Distance::Undefined => return Err(Error::DistanceUndefined),
        };
        Ok(CatalogEntry {
            name: name.to_string(),
            p: code.field().p(),
            n: code.n(),
            k: code.k(),
            d,
            pure,
            generators: code.generators(),
            note: note.to_string(),
            code,
        })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }
}

/// The catalog shipped with the crate.
pub fn builtin() -> Vec<CatalogEntry> {
    load_catalog(BUILTIN).expect("built-in catalog is valid")
}

pub fn find<'a>(entries: &'a [CatalogEntry], name: &str) -> Result<&'a CatalogEntry> {
    entries
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCode(name.to_string()))
}

struct Header {
    line: usize,
    name: String,
    field: FieldModulus,
    n: usize,
    k: usize,
    d: usize,
    pure: bool,
    note: String,
    rows: Vec<SympVector>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: usize, text: &str, note: String) -> Result<Header> {
    let mut words = text.split_whitespace();
    words.next();
    let name = words
        .next()
        .ok_or_else(|| parse_err(line, "missing code name"))?
        .to_string();
    let mut values = [0usize; 5];
    for (slot, key) in values.iter_mut().zip(["p", "n", "k", "d", "pure"]) {
        let word = words
            .next()
            .ok_or_else(|| parse_err(line, format!("missing `{key}=`")))?;
        let value = word
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| parse_err(line, format!("expected `{key}=`, found `{word}`")))?;
        *slot = value
            .parse()
            .map_err(|_| parse_err(line, format!("bad value for `{key}`: `{value}`")))?;
    }
    if let Some(extra) = words.next() {
        return Err(parse_err(line, format!("unexpected `{extra}`")));
    }
    let [p, n, k, d, pure] = values;
    let field = FieldModulus::new(p as u32).map_err(|e| parse_err(line, e.to_string()))?;
    if n == 0 || k >= n {
        return Err(parse_err(line, format!("need 0 <= k < n, got n={n} k={k}")));
    }
    if pure > 1 {
        return Err(parse_err(line, "pure must be 0 or 1"));
    }
    Ok(Header {
        line,
        name,
        field,
        n,
        k,
        d,
        pure: pure == 1,
        note,
        rows: Vec::new(),
    })
}

fn parse_row(line: usize, text: &str, h: &Header) -> Result<SympVector> {
    let (a, b) = text
        .split_once('|')
        .ok_or_else(|| parse_err(line, "generator row needs `a|b`"))?;
    let digits = |s: &str| -> Result<Vec<u8>> {
        if s.chars().count() != h.n {
            return Err(parse_err(line, format!("expected {} digits per side", h.n)));
        }
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&x| x < h.field.p() as u32)
                    .map(|x| x as u8)
                    .ok_or_else(|| {
                        parse_err(line, format!("`{c}` is not a digit below {}", h.field.p()))
                    })
            })
            .collect()
    };
    SympVector::new(h.field, &digits(a)?, &digits(b)?).map_err(|e| parse_err(line, e.to_string()))
}

fn finish(h: Header) -> Result<CatalogEntry> {
    let code =
        StabilizerCode::new(h.field, h.n, &h.rows).map_err(|e| parse_err(h.line, e.to_string()))?;
    let mismatch =
        |field: &'static str, claimed: String, recomputed: String| Error::CatalogMismatch {
            name: h.name.clone(),
            field,
            claimed,
            recomputed,
        };
    if code.k() != h.k {
        return Err(mismatch("k", h.k.to_string(), code.k().to_string()));
    }
    match code.distance() {
        Distance::Undefined => return Err(mismatch("d", h.d.to_string(), "undefined".into())),
        Distance::Defined { d, pure } => {
            if d != h.d {
                return Err(mismatch("d", h.d.to_string(), d.to_string()));
            }
            if pure != h.pure {
                return Err(mismatch(
                    "pure",
                    (h.pure as u8).to_string(),
                    (pure as u8).to_string(),
                ));
            }
        }
    }
    Ok(CatalogEntry {
        name: h.name,
        p: h.field.p(),
        n: h.n,
        k: h.k,
        d: h.d,
        pure: h.pure,
        generators: h.rows,
        note: h.note,
        code,
    })
}

/// Parse and validate a catalog.
pub fn load_catalog(source: &str) -> Result<Vec<CatalogEntry>> {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let mut note: Vec<&str> = Vec::new();
    let mut current: Option<Header> = None;

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if let Some(comment) = text.strip_prefix('#') {
            if current.is_none() {
                note.push(comment.trim());
            }
            continue;
        }
        if text.is_empty() {
            if let Some(h) = current.take() {
                if h.rows.len() < h.n - h.k {
                    return Err(parse_err(
                        line,
                        format!("`{}` has {} of {} rows", h.name, h.rows.len(), h.n - h.k),
                    ));
                }
                entries.push(finish(h)?);
            }
            note.clear();
            continue;
        }
        match current.as_mut() {
            Some(h) if h.rows.len() < h.n - h.k => {
                let row = parse_row(line, text, h)?;
                h.rows.push(row);
            }
            Some(h) => {
                return Err(parse_err(
                    line,
                    format!("`{}` already has its {} rows", h.name, h.n - h.k),
                ));
            }
            None => {
                if text.split_whitespace().next() != Some("code") {
                    return Err(parse_err(line, "expected `code <name> p= n= k= d= pure=`"));
                }
                let h = parse_header(line, text, note.join("\n"))?;
                if entries.iter().any(|e| e.name == h.name) {
                    return Err(parse_err(line, format!("duplicate entry `{}`", h.name)));
                }
                current = Some(h);
                note.clear();
            }
        }
    }
    if let Some(h) = current {
        if h.rows.len() < h.n - h.k {
            return Err(parse_err(
                source.lines().count(),
                format!("`{}` has {} of {} rows", h.name, h.rows.len(), h.n - h.k),
            ));
        }
        entries.push(finish(h)?);
    }
    Ok(entries)
}

/// Serialize one entry in catalog syntax, note first.
pub fn format_entry(e: &CatalogEntry) -> String {
    let mut out = String::new();
    for line in e.note.lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(
        out,
        "code {} p={} n={} k={} d={} pure={}",
        e.name, e.p, e.n, e.k, e.d, e.pure as u8
    );
    for g in &e.generators {
        let _ = writeln!(out, "{g}");
    }
    out
}

pub fn format_catalog(entries: &[CatalogEntry]) -> String {
    entries
        .iter()
        .map(format_entry)
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtin_entries_validate() {
        let cat = builtin();
        let params: Vec<_> = cat
            .iter()
            .map(|e| (e.name.as_str(), e.p, e.n, e.k, e.d, e.pure))
            .collect();
        assert_eq!(
            params,
            [
                ("4-2-2", 2, 4, 2, 2, true),
                ("5-1-3", 2, 5, 1, 3, true),
                ("6-4-2", 2, 6, 4, 2, true),
                ("7-1-3", 2, 7, 1, 3, true),
                ("8-3-3", 2, 8, 3, 3, true),
                ("5-1-3-qutrit", 3, 5, 1, 3, true),
            ]
        );
        assert_eq!(
            find(&cat, "6-4-2").unwrap().note,
            "Even-weight code on six qubits: rows X^6 and Z^6."
        );
        assert!(find(&cat, "9-1-3").is_err());
    }

    #[test]
    fn overclaimed_distance_is_rejected() {
        let text = "code bad p=2 n=6 k=4 d=3 pure=1\n111111|000000\n000000|111111\n";
        assert_eq!(
            load_catalog(text).unwrap_err(),
            Error::CatalogMismatch {
                name: "bad".into(),
                field: "d",
                claimed: "3".into(),
                recomputed: "2".into()
            }
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("code x p=2 n=2 k=1 d=1 pure=1\n10|0\n", 2),
            ("\n\nhello\n", 3),
            ("code x p=4 n=2 k=1 d=1 pure=1\n", 1),
            ("code x p=2 n=2 k=1 d=1 pure=1\n10|02\n", 2),
            ("code x p=2 n=2 k=1 d=1 pure=1\n10|00\n01|00\n", 3),
            ("code x p=2 n=3 k=1 d=1 pure=1\n100|000\n\n", 3),
            ("code x p=2 n=2 k=1 pure=1\n", 1),
        ];
        for (text, line) in cases {
            match load_catalog(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        // Commuting check happens at load too.
        assert!(matches!(
            load_catalog("code x p=2 n=2 k=0 d=1 pure=1\n10|00\n00|10\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_catalog() {
        assert!(load_catalog("").unwrap().is_empty());
        assert!(load_catalog("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn builtin_round_trips() {
        let cat = builtin();
        let again = load_catalog(&format_catalog(&cat)).unwrap();
        assert_eq!(format_catalog(&cat), format_catalog(&again));
    }

    proptest! {
        #[test]
        fn formatted_random_codes_reload(
            seed in any::<u64>(),
            p in prop::sample::select(vec![2u8, 3]),
            n in 2usize..5,
        ) {
            use rand::{Rng, SeedableRng};
            // Grow a self-orthogonal set greedily from random vectors.
            let f = FieldModulus::new(p as u32).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut gens: Vec<SympVector> = Vec::new();
            for _ in 0..20 {
                let coords: Vec<u8> = (0..2 * n).map(|_| rng.random_range(0..p)).collect();
                let v = SympVector::from_coords(f, coords).unwrap();
                if v.is_zero() || gens.iter().any(|g| g.symp_product(&v).unwrap() != 0) {
                    continue;
                }
                let mut trial = gens.clone();
                trial.push(v);
                if crate::SympSubspace::new(f, n, &trial).unwrap().dim() == trial.len() && trial.len() < n {
                    gens = trial;
                }
            }
            prop_assume!(!gens.is_empty());
            let code = StabilizerCode::new(f, n, &gens).unwrap();
            prop_assume!(code.distance() != Distance::Undefined);
            let entry = CatalogEntry::from_code("rand", code, "random\nsecond line").unwrap();
            let text = format_entry(&entry);
            let back = load_catalog(&text).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(format_entry(&back[0]), text);
            prop_assert_eq!(back[0].code(), entry.code());
        }
    }
}
