//! Exact coset-leader decoding with erasures.
//!
//! The decoder returns, among all errors supported on the allowed positions
//! whose syndrome matches, one of minimal weight outside the erased
//! positions; ties go to the lexicographically smallest `(a|b)` tuple.

use std::ops::ControlFlow;

use crate::code::{StabilizerCode, Syndrome};
use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::matrix::{lexmin_solution, Matrix};
use crate::symplectic::{for_each_of_weight, weight_of, SympVector};

/// Coset-leader tables are built when both the error space on the allowed
/// positions and the syndrome space have at most this many elements.
pub const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct Decoder {
    field: FieldModulus,
    n: usize,
    /// Sorted 0-based positions that may carry errors.
    allowed: Vec<usize>,
    /// Syndrome contribution of the unit vector at each of the `2n`
    /// coordinates.
    columns: Vec<Vec<u8>>,
    rank: usize,
    table: Option<Vec<Option<(u32, u32)>>>,
}

impl Decoder {
    pub fn new(code: &StabilizerCode, mut allowed: Vec<usize>) -> Self {
        allowed.sort_unstable();
        allowed.dedup();
        let field = code.field();
        let n = code.n();
        let columns = (0..2 * n)
            .map(|j| {
                let mut unit = vec![0u8; 2 * n];
                unit[j] = 1;
                code.syndrome_raw(&unit).0
            })
            .collect();
        let mut dec = Decoder {
            field,
            n,
            allowed,
            columns,
            rank: code.stabilizer().dim(),
            table: None,
        };
        dec.table = dec.build_table();
        dec
    }

    pub fn allowed(&self) -> &[usize] {
        &self.allowed
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// Coordinates of the allowed positions in global `(a|b)` order.
    fn allowed_coords(&self) -> Vec<usize> {
        self.allowed
            .iter()
            .copied()
            .chain(self.allowed.iter().map(|&i| self.n + i))
            .collect()
    }

    fn syndrome_index(&self, s: &[u8]) -> usize {
        let p = self.field.p() as usize;
        s.iter().rev().fold(0usize, |acc, &x| acc * p + x as usize)
    }

    /// Enumerate every error on the allowed coordinates in increasing
    /// lexicographic order and keep the first of minimal weight per syndrome.
    fn build_table(&self) -> Option<Vec<Option<(u32, u32)>>> {
        let p = self.field.p() as u64;
        let coords = self.allowed_coords();
        let space = p.checked_pow(coords.len() as u32)?;
        let syndromes = p.checked_pow(self.rank as u32)?;
        if space > TABLE_LIMIT || syndromes > TABLE_LIMIT {
            return None;
        }
        let mut table = vec![None; syndromes as usize];
        let mut digits = vec![0u8; coords.len()];
        let mut v = vec![0u8; 2 * self.n];
        let mut s = vec![0u8; self.rank];
        for index in 0..space as u32 {
            let w = weight_of(self.n, &v) as u32;
            let slot = &mut table[self.syndrome_index(&s)];
            match slot {
                Some((best, _)) if *best <= w => {}
                _ => *slot = Some((w, index)),
            }
            // Odometer step; the last coordinate is least significant.
            for j in (0..coords.len()).rev() {
                let c = coords[j];
                self.field.axpy(1, &self.columns[c], &mut s);
                v[c] = self.field.add(v[c], 1);
                digits[j] += 1;
                if digits[j] < self.field.p() {
                    break;
                }
                digits[j] = 0;
            }
        }
        Some(table)
    }

    fn vector_from_index(&self, mut index: u32) -> Vec<u8> {
        let p = self.field.p() as u32;
        let coords = self.allowed_coords();
        let mut v = vec![0u8; 2 * self.n];
        for &c in coords.iter().rev() {
            v[c] = (index % p) as u8;
            index /= p;
        }
        v
    }

    fn syndrome_of(&self, v: &[u8]) -> Vec<u8> {
        let mut s = vec![0u8; self.rank];
        for (j, &x) in v.iter().enumerate() {
            if x != 0 {
                self.field.axpy(x, &self.columns[j], &mut s);
            }
        }
        s
    }

    /// Decode `s` knowing the `erased` positions, which must be allowed.
    pub fn decode(&self, s: &Syndrome, erased: &[usize]) -> Result<SympVector> {
        if s.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: s.len(),
            });
        }
        let mut erased = erased.to_vec();
        erased.sort_unstable();
        erased.dedup();
        if let Some(&pos) = erased
            .iter()
            .find(|p| self.allowed.binary_search(p).is_err())
        {
            return Err(Error::Precondition(format!(
                "erased position {pos} is not an allowed error position"
            )));
        }
        let coords = match (&self.table, erased.is_empty()) {
            (Some(table), true) => {
                let (_, index) =
                    table[self.syndrome_index(&s.0)].ok_or(Error::UnreachableSyndrome)?;
                self.vector_from_index(index)
            }
            _ => self.search(&s.0, &erased)?,
        };
        Ok(SympVector::from_coords_unchecked(self.field, coords))
    }

    /// Increasing-weight search over the unerased allowed positions; the
    /// erased part is solved exactly as the lexicographically smallest
    /// solution of the remaining linear system.
    fn search(&self, s: &[u8], erased: &[usize]) -> Result<Vec<u8>> {
        let f = self.field;
        let free: Vec<usize> = self
            .allowed
            .iter()
            .copied()
            .filter(|p| erased.binary_search(p).is_err())
            .collect();
        let erased_coords: Vec<usize> = erased
            .iter()
            .copied()
            .chain(erased.iter().map(|&i| self.n + i))
            .collect();
        let a_rows = (0..self.rank)
            .map(|i| erased_coords.iter().map(|&c| self.columns[c][i]).collect())
            .collect();
        let a = Matrix::from_rows_unchecked(f, erased_coords.len(), a_rows);
        let kernel = a.kernel().rref();

        for w in 0..=free.len() {
            let mut best: Option<Vec<u8>> = None;
            let _ = for_each_of_weight(f, self.n, &free, w, |e| {
                let partial = self.syndrome_of(e);
                let target: Vec<u8> = s.iter().zip(&partial).map(|(&x, &y)| f.sub(x, y)).collect();
                if let Some(x) = lexmin_solution(&a, &kernel, &target) {
                    let mut cand = e.to_vec();
                    for (&c, &val) in erased_coords.iter().zip(&x) {
                        cand[c] = val;
                    }
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
                ControlFlow::Continue(())
            });
            if let Some(b) = best {
                return Ok(b);
            }
        }
        Err(Error::UnreachableSyndrome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::ErrorPattern;

    fn f2() -> FieldModulus {
        FieldModulus::BINARY
    }

    fn v(s: &str) -> SympVector {
        SympVector::parse(f2(), s).unwrap()
    }

    fn six_four_two() -> StabilizerCode {
        StabilizerCode::new(f2(), 6, &[v("111111|000000"), v("000000|111111")]).unwrap()
    }

    fn five_one_three() -> StabilizerCode {
        let gens = ["10010|01100", "01001|00110", "10100|00011", "01010|10001"].map(v);
        StabilizerCode::new(f2(), 5, &gens).unwrap()
    }

    /// Oracle: every vector on the code's positions, keeping the best
    /// (restricted weight, lexicographic) match.
    fn brute_decode(code: &StabilizerCode, s: &Syndrome, erased: &[usize]) -> Option<Vec<u8>> {
        let f = code.field();
        let n = code.n();
        let total = (f.p() as u64).pow(2 * n as u32);
        let mut best: Option<(usize, Vec<u8>)> = None;
        for idx in 0..total {
            let mut x = idx;
            let mut coords = vec![0u8; 2 * n];
            for c in (0..2 * n).rev() {
                coords[c] = (x % f.p() as u64) as u8;
                x /= f.p() as u64;
            }
            if code.syndrome_raw(&coords) != *s {
                continue;
            }
            let w = (0..n)
                .filter(|i| !erased.contains(i) && (coords[*i] != 0 || coords[n + i] != 0))
                .count();
            if best
                .as_ref()
                .is_none_or(|(bw, bv)| (w, &coords) < (*bw, bv))
            {
                best = Some((w, coords));
            }
        }
        best.map(|(_, c)| c)
    }

    #[test]
    fn decode_examples() {
        let c = six_four_two();
        let zero = c.decode(&Syndrome(vec![0, 0]), &[]).unwrap();
        assert!(zero.is_zero());
        let e = c.decode(&Syndrome(vec![0, 1]), &[0]).unwrap();
        assert_eq!(e, v("100000|000000"));

        let five = five_one_three();
        let x2 = v("01000|00000");
        let s = five.syndrome(&x2).unwrap();
        assert_eq!(five.decode(&s, &[]).unwrap(), x2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = six_four_two();
        assert!(c.decode(&Syndrome(vec![0]), &[]).is_err());
        let restricted = Decoder::new(&c, vec![0, 1, 2]);
        assert!(restricted.decode(&Syndrome(vec![0, 0]), &[4]).is_err());
    }

    #[test]
    fn table_and_search_agree_with_oracle() {
        for code in [six_four_two(), five_one_three()] {
            let dec = code.decoder();
            assert!(dec.has_table());
            let rank = code.stabilizer().dim();
            for idx in 0..1u32 << rank {
                let s = Syndrome((0..rank).map(|i| ((idx >> i) & 1) as u8).collect());
                let oracle = brute_decode(&code, &s, &[]).unwrap();
                assert_eq!(dec.decode(&s, &[]).unwrap().coords(), &oracle[..]);
                assert_eq!(dec.search(&s.0, &[]).unwrap(), oracle);
                for erased in [vec![0], vec![1, 3], vec![2, 4]] {
                    let oracle = brute_decode(&code, &s, &erased).unwrap();
                    assert_eq!(dec.decode(&s, &erased).unwrap().coords(), &oracle[..]);
                }
            }
        }
    }

    #[test]
    fn oracle_agreement_over_f3() {
        let f3 = FieldModulus::new(3).unwrap();
        let gens = [
            SympVector::parse(f3, "120|000").unwrap(),
            SympVector::parse(f3, "000|112").unwrap(),
        ];
        let code = StabilizerCode::new(f3, 3, &gens).unwrap();
        let dec = code.decoder();
        for a in 0..3 {
            for b in 0..3 {
                let s = Syndrome(vec![a, b]);
                for erased in [vec![], vec![1], vec![0, 2]] {
                    let oracle = brute_decode(&code, &s, &erased).unwrap();
                    assert_eq!(dec.decode(&s, &erased).unwrap().coords(), &oracle[..]);
                }
            }
        }
    }

    #[test]
    fn single_errors_corrected_by_five_qubit_code() {
        let code = five_one_three();
        let all: Vec<usize> = (0..5).collect();
        let _ = for_each_of_weight(f2(), 5, &all, 1, |e| {
            let err = SympVector::from_coords(f2(), e.to_vec()).unwrap();
            let pat = ErrorPattern::errors_only(err.clone());
            let s = code.syndrome(&pat.error).unwrap();
            let est = code.decode(&s, &[]).unwrap();
            assert!(code.logical_class(&err.sub(&est).unwrap()).is_identity());
            ControlFlow::Continue(())
        });
    }
}
