//! Breeding-vs-hashing comparison over a catalog.

use serde::Serialize;

use crate::catalog::CatalogEntry;
use crate::eaqecc::{convert_pure_last, BreedingProtocolSpec};
use crate::search::{search_codes, SearchQuery, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Hashing,
    Breeding,
}

/// Outcome of searching for a hashing code that would match a breeding row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// No `[[n, net, d]]` code exists, exhaustively.
    NoRival,
    Rival,
    Inconclusive,
    Refused,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub kind: ProtocolKind,
    pub code: String,
    pub p: u8,
    pub noisy: usize,
    pub c: usize,
    pub gross: usize,
    pub net: i64,
    /// Every `(t, e)` with `2t + e < d` is corrected.
    pub d: usize,
    /// Positive yield that beats every catalog hashing row with the same `p`,
    /// `n` and a guarantee at least as strong.
    pub dominates: bool,
    pub certification: Option<Certification>,
}

impl CompareRow {
    pub fn guarantees(&self, t: usize, e: usize) -> bool {
        2 * t + e < self.d
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompareFilter {
    pub noisy_pairs: Option<usize>,
    pub correction: Option<(usize, usize)>,
}

fn row(kind: ProtocolKind, name: &str, spec: &BreedingProtocolSpec) -> Option<CompareRow> {
    let p = spec.params();
    Some(CompareRow {
        kind,
        code: name.to_string(),
        p: p.p,
        noisy: p.n,
        c: p.c,
        gross: p.gross_k,
        net: p.net_yield(),
        d: p.d.value()?,
        dominates: false,
        certification: None,
    })
}

/// Every protocol the catalog offers: hashing for each code, and breeding
/// with the last `c` positions preshared for each pure code and `0 < c < d`.
pub fn protocol_rows(catalog: &[CatalogEntry]) -> Vec<CompareRow> {
    let mut rows = Vec::new();
    for e in catalog {
        let code = e.code();
        rows.extend(row(
            ProtocolKind::Hashing,
            &e.name,
            &BreedingProtocolSpec::hashing(code.clone()),
        ));
        if !e.pure {
            continue;
        }
        for c in 1..e.d.min(e.n) {
            if let Ok(spec) = convert_pure_last(code, c) {
                rows.extend(row(ProtocolKind::Breeding, &e.name, &spec));
            }
        }
    }
    rows
}

/// Dominance flags computed from the raw rows alone.
pub fn dominance_flags(rows: &[CompareRow]) -> Vec<bool> {
    rows.iter()
        .map(|b| {
            b.kind == ProtocolKind::Breeding
                && b.net > 0
                && rows
                    .iter()
                    .filter(|h| {
                        h.kind == ProtocolKind::Hashing
                            && h.p == b.p
                            && h.noisy == b.noisy
                            && h.d >= b.d
                    })
                    .all(|h| b.net > h.net)
        })
        .collect()
}

fn certify(r: &CompareRow, budget: u64, workers: usize) -> Option<Certification> {
    if r.net < 0 {
        return None;
    }
    let mut q = SearchQuery::new(r.p, r.noisy, r.net as usize, r.d);
    q.budget = budget;
    Some(match search_codes(&q, workers) {
        Ok(res) => match res.verdict {
            Verdict::NotExists => Certification::NoRival,
            Verdict::Exists { .. } => Certification::Rival,
            Verdict::Inconclusive => Certification::Inconclusive,
        },
        Err(_) => Certification::Refused,
    })
}

/// Rows after filtering, with dominance flags, and with breeding rows
/// checked by exhaustive search when `certify_budget` is given.
pub fn compare_report(
    catalog: &[CatalogEntry],
    filter: CompareFilter,
    certify_budget: Option<u64>,
    workers: usize,
) -> Vec<CompareRow> {
    let all = protocol_rows(catalog);
    let flags = dominance_flags(&all);
    all.into_iter()
        .zip(flags)
        .filter(|(r, _)| filter.noisy_pairs.is_none_or(|n| r.noisy == n))
        .filter(|(r, _)| filter.correction.is_none_or(|(t, e)| r.guarantees(t, e)))
        .map(|(mut r, flag)| {
            r.dominates = flag;
            if let (ProtocolKind::Breeding, Some(budget)) = (r.kind, certify_budget) {
                r.certification = certify(&r, budget, workers);
            }
            r
        })
        .collect()
}
