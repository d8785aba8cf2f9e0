//! Exhaustive existence search for small stabilizer codes.
//!
//! Every subspace of F_p^{2n} has exactly one reduced row echelon basis. The
//! search builds that basis one row at a time: each new row has a leading 1
//! in a fresh pivot column, is zero on the earlier pivots, and the earlier
//! rows are zero on its pivot. Rows are added in increasing (or decreasing)
//! key order, where the key is the row read as a base-`p` number, so every
//! self-orthogonal subspace of the target dimension is visited once.
//!
//! Pruning: rows must commute with the rows already chosen, and with purity
//! required every new span element must have weight at least `d_min`.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::engine::par_map;
use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::symplectic::{for_each_of_weight, symp_dot, weight_of, SympVector};

/// Queries whose naive node bound `(p^{2n})^{n-k}` exceeds this are refused.
pub const FEASIBILITY_CAP: u128 = 100_000_000;

pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchQuery {
    pub p: u8,
    pub n: usize,
    pub k: usize,
    pub d_min: usize,
    pub purity_required: bool,
    /// Node cap; the verdict is inconclusive when it is hit.
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyOrder {
    Forward,
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Exists { generators: Vec<SympVector> },
    NotExists,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub nodes: u64,
    pub projected: u128,
}

impl SearchQuery {
    pub fn new(p: u8, n: usize, k: usize, d_min: usize) -> Self {
        SearchQuery {
            p,
            n,
            k,
            d_min,
            purity_required: false,
            budget: DEFAULT_BUDGET,
        }
    }

    /// Naive node bound before pruning.
    pub fn projected_nodes(&self) -> u128 {
        let space = (self.p as u128).checked_pow(2 * self.n as u32);
        space
            .and_then(|s| s.checked_pow(self.n.saturating_sub(self.k) as u32))
            .unwrap_or(u128::MAX)
    }

    fn check(&self) -> Result<FieldModulus> {
        let field = FieldModulus::new(self.p as u32)?;
        if self.n == 0 || self.k >= self.n {
            return Err(Error::Precondition(format!(
                "need n - k >= 1, got n={} k={}",
                self.n, self.k
            )));
        }
        let projected = self.projected_nodes();
        if projected > FEASIBILITY_CAP {
            return Err(Error::Infeasible {
                what: "projected search nodes",
                required: projected,
                cap: FEASIBILITY_CAP,
            });
        }
        Ok(field)
    }
}

struct Ctx {
    field: FieldModulus,
    n: usize,
    dim: usize,
    d_min: usize,
    purity: bool,
    order: KeyOrder,
    space: u64,
    /// Every vector of weight `1..d_min`.
    light: Vec<Vec<u8>>,
}

#[derive(Default)]
struct State {
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    span: Vec<Vec<u8>>,
    nodes: u64,
}

enum Outcome {
    Found(Vec<Vec<u8>>),
    Exhausted,
    Capped,
}

impl Ctx {
    fn vector(&self, index: u64) -> Vec<u8> {
        let p = self.field.p() as u64;
        let mut v = vec![0u8; 2 * self.n];
        let mut x = index;
        for c in v.iter_mut().rev() {
            *c = (x % p) as u8;
            x /= p;
        }
        v
    }

    /// Whether `v` may extend the current echelon rows.
    fn admissible(&self, st: &State, v: &[u8]) -> bool {
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        v[pivot] == 1
            && st.pivots.iter().all(|&q| v[q] == 0)
            && st.rows.iter().all(|r| r[pivot] == 0)
            && st
                .rows
                .iter()
                .all(|r| symp_dot(self.field, self.n, r, v) == 0)
    }

    /// New span elements `x + c v`; `None` if purity fails.
    fn grow_span(&self, span: &[Vec<u8>], v: &[u8]) -> Option<Vec<Vec<u8>>> {
        let mut added = Vec::with_capacity(span.len() * (self.field.order() - 1));
        for c in 1..self.field.p() {
            for x in span {
                let mut y = x.clone();
                self.field.axpy(c, v, &mut y);
                if weight_of(self.n, &y) < self.d_min {
                    return None;
                }
                added.push(y);
            }
        }
        Some(added)
    }

    fn in_span(&self, st: &State, e: &[u8]) -> bool {
        let mut r = e.to_vec();
        for (row, &q) in st.rows.iter().zip(&st.pivots) {
            let c = self.field.neg(r[q]);
            self.field.axpy(c, row, &mut r);
        }
        r.iter().all(|&x| x == 0)
    }

    fn leaf_ok(&self, st: &State) -> bool {
        if self.dim == self.n {
            // The dual equals the code; no distance.
            return false;
        }
        self.light.iter().all(|e| {
            st.rows
                .iter()
                .any(|r| symp_dot(self.field, self.n, r, e) != 0)
                || self.in_span(st, e)
        })
    }

    fn push(&self, st: &mut State, v: Vec<u8>) -> bool {
        let added = if self.purity {
            match self.grow_span(&st.span, &v) {
                Some(a) => a,
                None => return false,
            }
        } else {
            Vec::new()
        };
        st.span.extend(added);
        st.pivots.push(v.iter().position(|&x| x != 0).unwrap());
        st.rows.push(v);
        true
    }

    fn pop(&self, st: &mut State) {
        st.rows.pop();
        st.pivots.pop();
        if self.purity {
            let keep = st.span.len() / self.field.order();
            st.span.truncate(keep);
        }
    }

    fn children(&self, last: u64) -> Box<dyn Iterator<Item = u64>> {
        match self.order {
            KeyOrder::Forward => Box::new(last + 1..self.space),
            KeyOrder::Reversed => Box::new((1..last).rev()),
        }
    }

    fn dfs(&self, st: &mut State, last: u64, cap: u64) -> ControlFlow<Outcome> {
        if st.rows.len() == self.dim {
            if self.leaf_ok(st) {
                return ControlFlow::Break(Outcome::Found(st.rows.clone()));
            }
            return ControlFlow::Continue(());
        }
        for key in self.children(last) {
            let v = self.vector(key);
            if !self.admissible(st, &v) {
                continue;
            }
            if !self.push(st, v) {
                continue;
            }
            st.nodes += 1;
            if st.nodes > cap {
                return ControlFlow::Break(Outcome::Capped);
            }
            let r = self.dfs(st, key, cap);
            self.pop(st);
            r?;
        }
        ControlFlow::Continue(())
    }

    fn subtree(&self, first: u64, cap: u64) -> (u64, Outcome) {
        let mut st = State {
            span: vec![vec![0u8; 2 * self.n]],
            ..State::default()
        };
        if !self.push(&mut st, self.vector(first)) {
            return (0, Outcome::Exhausted);
        }
        st.nodes = 1;
        if cap == 0 {
            return (1, Outcome::Capped);
        }
        match self.dfs(&mut st, first, cap) {
            ControlFlow::Break(o) => (st.nodes, o),
            ControlFlow::Continue(()) => (st.nodes, Outcome::Exhausted),
        }
    }
}

/// Search with increasing keys.
pub fn search_codes(q: &SearchQuery, workers: usize) -> Result<SearchResult> {
    search_codes_ordered(q, KeyOrder::Forward, workers)
}

/// Work is split by the first row; subtrees are merged in key order so the
/// result does not depend on `workers`.
pub fn search_codes_ordered(
    q: &SearchQuery,
    order: KeyOrder,
    workers: usize,
) -> Result<SearchResult> {
    let field = q.check()?;
    let projected = q.projected_nodes();
    let n = q.n;
    let mut light = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    for w in 1..q.d_min.min(n + 1) {
        let _ = for_each_of_weight(field, n, &all, w, |e| {
            light.push(e.to_vec());
            ControlFlow::Continue(())
        });
    }
    let ctx = Ctx {
        field,
        n,
        dim: n - q.k,
        d_min: q.d_min,
        purity: q.purity_required,
        order,
        space: (q.p as u64).pow(2 * n as u32),
        light,
    };

    let firsts: Vec<u64> = match order {
        KeyOrder::Forward => (1..ctx.space).collect(),
        KeyOrder::Reversed => (1..ctx.space).rev().collect(),
    };
    let firsts: Vec<u64> = firsts
        .into_iter()
        .filter(|&k| ctx.admissible(&State::default(), &ctx.vector(k)))
        .collect();

    let budget = q.budget;
    let merge = |results: &mut dyn Iterator<Item = (u64, Outcome)>| -> SearchResult {
        let mut total = 0u64;
        for (nodes, outcome) in results {
            total += nodes;
            if total > budget {
                return SearchResult {
                    verdict: Verdict::Inconclusive,
                    nodes: budget,
                    projected,
                };
            }
            match outcome {
                Outcome::Found(rows) => {
                    let generators = rows
                        .into_iter()
                        .map(|r| SympVector::from_coords_unchecked(field, r))
                        .collect();
                    return SearchResult {
                        verdict: Verdict::Exists { generators },
                        nodes: total,
                        projected,
                    };
                }
                Outcome::Capped => unreachable!("capped subtrees exceed the budget"),
                Outcome::Exhausted => {}
            }
        }
        SearchResult {
            verdict: Verdict::NotExists,
            nodes: total,
            projected,
        }
    };

    if workers <= 1 {
        // Lazily, with the remaining budget as each subtree's cap.
        let mut used = 0u64;
        let mut iter = firsts.into_iter().map(|first| {
            let (nodes, o) = ctx.subtree(first, budget.saturating_sub(used));
            used += nodes;
            (nodes, o)
        });
        Ok(merge(&mut iter))
    } else {
        let results = par_map(firsts, workers, |first| ctx.subtree(first, budget));
        Ok(merge(&mut results.into_iter()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{Distance, StabilizerCode};

    fn validate(q: &SearchQuery, gens: &[SympVector]) {
        let f = FieldModulus::new(q.p as u32).unwrap();
        let code = StabilizerCode::new(f, q.n, gens).unwrap();
        assert_eq!(code.k(), q.k);
        match code.distance() {
            Distance::Defined { d, pure } => {
                assert!(d >= q.d_min);
                assert!(pure || !q.purity_required);
            }
            Distance::Undefined => panic!("witness without distance"),
        }
    }

    #[test]
    fn five_three_two_does_not_exist() {
        let q = SearchQuery::new(2, 5, 3, 2);
        let fwd = search_codes(&q, 1).unwrap();
        assert_eq!(fwd.verdict, Verdict::NotExists);
        assert!(fwd.nodes > 10_000, "{}", fwd.nodes);
        let rev = search_codes_ordered(&q, KeyOrder::Reversed, 1).unwrap();
        assert_eq!(rev.verdict, Verdict::NotExists);
        // Both orders visit each subspace exactly once.
        assert_eq!(fwd.nodes, rev.nodes);
    }

    #[test]
    fn six_four_two_exists() {
        let q = SearchQuery::new(2, 6, 4, 2);
        let r = search_codes(&q, 1).unwrap();
        match &r.verdict {
            Verdict::Exists { generators } => validate(&q, generators),
            v => panic!("{v:?}"),
        }
        let mut pure = q;
        pure.purity_required = true;
        match search_codes_ordered(&pure, KeyOrder::Reversed, 1)
            .unwrap()
            .verdict
        {
            Verdict::Exists { generators } => validate(&pure, &generators),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn trivial_and_refused_queries() {
        let r = search_codes(&SearchQuery::new(2, 1, 0, 1), 1).unwrap();
        assert_eq!(r.verdict, Verdict::NotExists);
        assert!(matches!(
            search_codes(&SearchQuery::new(2, 5, 1, 3), 1),
            Err(Error::Infeasible { .. })
        ));
        assert!(search_codes(&SearchQuery::new(2, 3, 3, 1), 1).is_err());
        assert!(search_codes(&SearchQuery::new(4, 3, 1, 1), 1).is_err());
    }

    #[test]
    fn budget_gives_inconclusive_independent_of_workers() {
        let mut q = SearchQuery::new(2, 5, 3, 2);
        q.budget = 500;
        let one = search_codes(&q, 1).unwrap();
        let four = search_codes(&q, 4).unwrap();
        assert_eq!(one.verdict, Verdict::Inconclusive);
        assert_eq!(one, four);
        q.budget = DEFAULT_BUDGET;
        assert_eq!(search_codes(&q, 1).unwrap(), search_codes(&q, 3).unwrap());
    }

    /// Oracle: all sets of `n - k` vectors, independent and commuting, with
    /// distance by full enumeration.
    fn brute_exists(p: u8, n: usize, k: usize, d_min: usize, purity: bool) -> bool {
        let f = FieldModulus::new(p as u32).unwrap();
        let total = (p as usize).pow(2 * n as u32);
        let vec_of = |mut i: usize| {
            let mut c = vec![0u8; 2 * n];
            for x in c.iter_mut() {
                *x = (i % p as usize) as u8;
                i /= p as usize;
            }
            SympVector::from_coords(f, c).unwrap()
        };
        let all: Vec<SympVector> = (1..total).map(vec_of).collect();
        let r = n - k;
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            let gens: Vec<SympVector> = idx.iter().map(|&i| all[i].clone()).collect();
            if let Ok(code) = StabilizerCode::new(f, n, &gens) {
                if code.k() == k {
                    let elems: Vec<SympVector> = (0..total).map(vec_of).collect();
                    let in_c: Vec<bool> = elems
                        .iter()
                        .map(|e| code.stabilizer().contains(e))
                        .collect();
                    let in_dual: Vec<bool> =
                        elems.iter().map(|e| code.dual().contains(e)).collect();
                    let dist = (0..total)
                        .filter(|&i| in_dual[i] && !in_c[i])
                        .map(|i| elems[i].weight())
                        .min();
                    let min_c = (1..total)
                        .filter(|&i| in_c[i])
                        .map(|i| elems[i].weight())
                        .min();
                    if let Some(d) = dist {
                        if d >= d_min && (!purity || min_c.is_none_or(|w| w >= d_min)) {
                            return true;
                        }
                    }
                }
            }
            // Next combination.
            let mut i = r;
            loop {
                if i == 0 {
                    return false;
                }
                i -= 1;
                if idx[i] < all.len() - r + i {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_on_small_queries() {
        for (p, n) in [(2u8, 1usize), (2, 2), (2, 3), (3, 1), (3, 2)] {
            for k in 0..n {
                for d_min in 1..=3 {
                    for purity in [false, true] {
                        let mut q = SearchQuery::new(p, n, k, d_min);
                        q.purity_required = purity;
                        let expect = brute_exists(p, n, k, d_min, purity);
                        for order in [KeyOrder::Forward, KeyOrder::Reversed] {
                            let got = search_codes_ordered(&q, order, 1).unwrap();
                            if let Verdict::Exists { generators } = &got.verdict {
                                validate(&q, generators);
                            }
                            assert_eq!(
                                matches!(got.verdict, Verdict::Exists { .. }),
                                expect,
                                "{q:?} {order:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn finds_catalog_parameters() {
        for e in crate::catalog::builtin() {
            let q = SearchQuery::new(e.p, e.n, e.k, e.d);
            if q.projected_nodes() > FEASIBILITY_CAP {
                continue;
            }
            let r = search_codes(&q, 2).unwrap();
            assert!(matches!(r.verdict, Verdict::Exists { .. }), "{}", e.name);
        }
    }
}
