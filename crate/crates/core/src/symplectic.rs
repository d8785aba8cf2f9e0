//! Symplectic geometry of F_p^{2n}.
//!
//! A vector `(a|b)` is stored as one coordinate slice of length `2n`: the
//! X-part `a` in `[0, n)` and the Z-part `b` in `[n, 2n)`. Positions are
//! 0-based throughout the library.

use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::matrix::{for_each_in_span, Matrix, Reduced};

/// `<a_u, b_v> - <b_u, a_v>` on raw coordinate slices of length `2n`.
#[inline]
pub(crate) fn symp_dot(field: FieldModulus, n: usize, u: &[u8], v: &[u8]) -> u8 {
    let x = field.dot(&u[..n], &v[n..]);
    let z = field.dot(&u[n..], &v[..n]);
    field.sub(x, z)
}

#[inline]
pub(crate) fn weight_of(n: usize, v: &[u8]) -> usize {
    (0..n).filter(|&i| v[i] != 0 || v[n + i] != 0).count()
}

/// An element `(a|b)` of F_p^{2n}: a Pauli operator modulo phase.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SympVector {
    field: FieldModulus,
    coords: Vec<u8>,
}

impl SympVector {
    pub fn new(field: FieldModulus, a: &[u8], b: &[u8]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let mut coords = a.to_vec();
        coords.extend_from_slice(b);
        Self::from_coords(field, coords)
    }

    pub fn from_coords(field: FieldModulus, coords: Vec<u8>) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: coords.len() + 1,
                found: coords.len(),
            });
        }
        if let Some(&value) = coords.iter().find(|&&x| x >= field.p()) {
            return Err(Error::UnreducedEntry {
                value,
                p: field.p(),
            });
        }
        Ok(SympVector { field, coords })
    }

    pub(crate) fn from_coords_unchecked(field: FieldModulus, coords: Vec<u8>) -> Self {
        debug_assert!(coords.len().is_multiple_of(2) && coords.iter().all(|&x| x < field.p()));
        SympVector { field, coords }
    }

    pub fn zero(field: FieldModulus, n: usize) -> Self {
        SympVector {
            field,
            coords: vec![0; 2 * n],
        }
    }

    /// The single-position operator with X-exponent `x` and Z-exponent `z`
    /// at `position`.
    pub fn single(field: FieldModulus, n: usize, position: usize, x: u8, z: u8) -> Result<Self> {
        if position >= n {
            return Err(Error::PositionOutOfRange { position, n });
        }
        let mut coords = vec![0; 2 * n];
        coords[position] = field.reduce(x as u32);
        coords[n + position] = field.reduce(z as u32);
        Ok(SympVector { field, coords })
    }

    /// Parse `"<a-digits>|<b-digits>"`, one decimal digit per position.
    pub fn parse(field: FieldModulus, s: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse { line: 0, message };
        let (a, b) = s
            .trim()
            .split_once('|')
            .ok_or_else(|| bad(format!("`{s}` has no `|` separator")))?;
        if a.len() != b.len() {
            return Err(bad(format!(
                "`{s}`: X-part has {} digits, Z-part {}",
                a.len(),
                b.len()
            )));
        }
        let digits = |part: &str| -> Result<Vec<u8>> {
            part.chars()
                .map(|c| match c.to_digit(10) {
                    Some(d) if d < field.p() as u32 => Ok(d as u8),
                    _ => Err(bad(format!("`{c}` is not a digit in [0, {})", field.p()))),
                })
                .collect()
        };
        SympVector::new(field, &digits(a)?, &digits(b)?)
    }

    pub fn field(&self) -> FieldModulus {
        self.field
    }

    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn a(&self) -> &[u8] {
        &self.coords[..self.n()]
    }

    pub fn b(&self) -> &[u8] {
        &self.coords[self.n()..]
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<u8> {
        self.coords
    }

    /// The `(x, z)` pair at one position.
    pub fn at(&self, position: usize) -> (u8, u8) {
        (self.coords[position], self.coords[self.n() + position])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    /// Positions where `(a_i, b_i) != (0, 0)`.
    pub fn support(&self) -> Vec<usize> {
        let n = self.n();
        (0..n)
            .filter(|&i| self.coords[i] != 0 || self.coords[n + i] != 0)
            .collect()
    }

    pub fn weight(&self) -> usize {
        weight_of(self.n(), &self.coords)
    }

    /// `(a|b) -> (a|-b)`.
    pub fn star(&self) -> SympVector {
        let n = self.n();
        let mut coords = self.coords.clone();
        for x in &mut coords[n..] {
            *x = self.field.neg(*x);
        }
        SympVector {
            field: self.field,
            coords,
        }
    }

    fn check_compatible(&self, other: &SympVector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.p(),
                right: other.field.p(),
            });
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }

    pub fn symp_product(&self, other: &SympVector) -> Result<u8> {
        self.check_compatible(other)?;
        Ok(symp_dot(self.field, self.n(), &self.coords, &other.coords))
    }

    pub fn add(&self, other: &SympVector) -> Result<SympVector> {
        self.check_compatible(other)?;
        let mut coords = self.coords.clone();
        self.field.axpy(1, &other.coords, &mut coords);
        Ok(SympVector {
            field: self.field,
            coords,
        })
    }

    pub fn sub(&self, other: &SympVector) -> Result<SympVector> {
        self.check_compatible(other)?;
        let mut coords = self.coords.clone();
        self.field
            .axpy(self.field.neg(1), &other.coords, &mut coords);
        Ok(SympVector {
            field: self.field,
            coords,
        })
    }

    pub fn scale(&self, c: u8) -> SympVector {
        let f = self.field;
        SympVector {
            field: f,
            coords: self.coords.iter().map(|&x| f.mul(c, x)).collect(),
        }
    }

    /// Delete the given positions from both halves.
    pub fn puncture(&self, positions: &[usize]) -> Result<SympVector> {
        let n = self.n();
        let keep = kept_positions(n, positions)?;
        Ok(SympVector {
            field: self.field,
            coords: select(&self.coords, n, &keep),
        })
    }

    /// Append `extra` zero positions.
    pub fn extend_zero(&self, extra: usize) -> SympVector {
        let n = self.n();
        let mut coords = Vec::with_capacity(2 * (n + extra));
        coords.extend_from_slice(&self.coords[..n]);
        coords.extend(std::iter::repeat_n(0, extra));
        coords.extend_from_slice(&self.coords[n..]);
        coords.extend(std::iter::repeat_n(0, extra));
        SympVector {
            field: self.field,
            coords,
        }
    }
}

impl fmt::Display for SympVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |xs: &[u8]| -> String {
            if self.field.p() <= 10 {
                xs.iter().map(|x| char::from(b'0' + x)).collect()
            } else {
                xs.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            }
        };
        write!(f, "{}|{}", digits(self.a()), digits(self.b()))
    }
}

impl fmt::Debug for SympVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

fn kept_positions(n: usize, removed: &[usize]) -> Result<Vec<usize>> {
    let mut drop = vec![false; n];
    for &p in removed {
        if p >= n {
            return Err(Error::PositionOutOfRange { position: p, n });
        }
        drop[p] = true;
    }
    Ok((0..n).filter(|&i| !drop[i]).collect())
}

fn select(coords: &[u8], n: usize, keep: &[usize]) -> Vec<u8> {
    keep.iter()
        .map(|&i| coords[i])
        .chain(keep.iter().map(|&i| coords[n + i]))
        .collect()
}

/// Antisymmetric matrix of pairwise symplectic products of a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix(Matrix);

impl GramMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_alternating(&self) -> bool {
        let f = self.0.field();
        let m = self.0.nrows();
        (0..m).all(|i| {
            self.0.get(i, i) == 0 && (0..m).all(|j| self.0.get(i, j) == f.neg(self.0.get(j, i)))
        })
    }
}

/// An F_p-linear subspace of F_p^{2n}, held as its canonical reduced basis.
///
/// Two subspaces are equal iff their reduced bases are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympSubspace {
    n: usize,
    basis: Reduced,
}

/// Result of [`SympSubspace::symp_extend`]: a self-orthogonal subspace on
/// `n + added` positions whose puncturing at the appended positions is the
/// original subspace.
#[derive(Clone, Debug)]
pub struct Extension {
    pub extended: SympSubspace,
    pub added: usize,
}

impl SympSubspace {
    pub fn new(field: FieldModulus, n: usize, generators: &[SympVector]) -> Result<Self> {
        let mut rows = Vec::with_capacity(generators.len());
        for g in generators {
            if g.field != field {
                return Err(Error::FieldMismatch {
                    left: field.p(),
                    right: g.field.p(),
                });
            }
            if g.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.n(),
                });
            }
            rows.push(g.coords.clone());
        }
        Ok(Self::from_rows(field, n, rows))
    }

    pub(crate) fn from_rows(field: FieldModulus, n: usize, rows: Vec<Vec<u8>>) -> Self {
        SympSubspace {
            n,
            basis: Matrix::from_rows_unchecked(field, 2 * n, rows).rref(),
        }
    }

    pub fn zero(field: FieldModulus, n: usize) -> Self {
        Self::from_rows(field, n, Vec::new())
    }

    pub fn full(field: FieldModulus, n: usize) -> Self {
        SympSubspace {
            n,
            basis: Matrix::identity(field, 2 * n).rref(),
        }
    }

    pub fn field(&self) -> FieldModulus {
        self.basis.matrix.field()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis.matrix
    }

    pub(crate) fn reduced(&self) -> &Reduced {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<SympVector> {
        self.basis
            .matrix
            .rows()
            .iter()
            .map(|r| SympVector::from_coords_unchecked(self.field(), r.clone()))
            .collect()
    }

    pub fn contains(&self, v: &SympVector) -> bool {
        v.field == self.field() && v.n() == self.n && self.basis.contains(&v.coords)
    }

    /// Reduce `v` modulo the subspace: zero at every pivot coordinate.
    pub fn reduce(&self, v: &SympVector) -> SympVector {
        let mut coords = v.coords.clone();
        self.basis.reduce(&mut coords);
        SympVector::from_coords_unchecked(self.field(), coords)
    }

    /// `{v : <v, s> = 0 for all s}`.
    pub fn symp_dual(&self) -> SympSubspace {
        let f = self.field();
        let n = self.n;
        // <v, s> = <a_v, b_s> - <b_v, a_s>, so the constraint row is (b_s | -a_s).
        let rows = self
            .basis
            .matrix
            .rows()
            .iter()
            .map(|s| {
                let mut r = s[n..].to_vec();
                r.extend(s[..n].iter().map(|&x| f.neg(x)));
                r
            })
            .collect();
        let constraints = Matrix::from_rows_unchecked(f, 2 * n, rows);
        SympSubspace {
            n,
            basis: constraints.kernel().rref(),
        }
    }

    pub fn star(&self) -> SympSubspace {
        let rows = self
            .basis_vectors()
            .into_iter()
            .map(|v| v.star().coords)
            .collect();
        Self::from_rows(self.field(), self.n, rows)
    }

    pub fn gram(&self) -> GramMatrix {
        let f = self.field();
        let rows = self.basis.matrix.rows();
        let g = rows
            .iter()
            .map(|u| rows.iter().map(|v| symp_dot(f, self.n, u, v)).collect())
            .collect();
        GramMatrix(Matrix::from_rows_unchecked(f, rows.len(), g))
    }

    pub fn is_self_orthogonal(&self) -> bool {
        let f = self.field();
        let rows = self.basis.matrix.rows();
        rows.iter()
            .enumerate()
            .all(|(i, u)| rows[i + 1..].iter().all(|v| symp_dot(f, self.n, u, v) == 0))
    }

    pub fn intersect(&self, other: &SympSubspace) -> Result<SympSubspace> {
        let m = self.basis.matrix.intersect(&other.basis.matrix)?;
        Ok(SympSubspace {
            n: self.n,
            basis: m.rref(),
        })
    }

    pub fn sum(&self, other: &SympSubspace) -> Result<SympSubspace> {
        let m = self.basis.matrix.row_sum(&other.basis.matrix)?;
        Ok(SympSubspace {
            n: self.n,
            basis: m.rref(),
        })
    }

    pub fn is_subspace_of(&self, other: &SympSubspace) -> bool {
        self.n == other.n
            && self
                .basis
                .matrix
                .rows()
                .iter()
                .all(|r| other.basis.contains(r))
    }

    /// Delete the given positions from every basis vector; the dimension may
    /// drop.
    pub fn puncture(&self, positions: &[usize]) -> Result<SympSubspace> {
        let keep = kept_positions(self.n, positions)?;
        let rows = self
            .basis
            .matrix
            .rows()
            .iter()
            .map(|r| select(r, self.n, &keep))
            .collect();
        Ok(Self::from_rows(self.field(), keep.len(), rows))
    }

    /// Visit every vector of the subspace, zero included.
    pub fn for_each_element(&self, visit: impl FnMut(&[u8]) -> ControlFlow<()>) {
        let _ = for_each_in_span(self.field(), self.basis.matrix.rows(), 2 * self.n, visit);
    }

    /// Number of elements, `p^dim`, if it fits in a `u128`.
    pub fn cardinality(&self) -> Option<u128> {
        (self.field().p() as u128).checked_pow(self.dim() as u32)
    }

    /// Minimal self-orthogonal extension by appended positions.
    ///
    /// Runs symplectic Gram-Schmidt to split the basis into hyperbolic pairs
    /// `(u_j, w_j)` with `<u_j, w_j> = 1` and an isotropic remainder, then
    /// gives pair `j` a fresh position carrying `(1|0)` on `u_j` and `(0|-1)`
    /// on `w_j`, which cancels their product. The number of appended positions
    /// is half the rank of the Gram matrix.
    pub fn symp_extend(&self) -> Extension {
        let f = self.field();
        let n = self.n;
        let mut rest: Vec<Vec<u8>> = self.basis.matrix.rows().to_vec();
        let mut pairs: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();

        loop {
            let found = (0..rest.len()).find_map(|i| {
                (i + 1..rest.len()).find_map(|j| {
                    let s = symp_dot(f, n, &rest[i], &rest[j]);
                    (s != 0).then_some((i, j, s))
                })
            });
            let Some((i, j, s)) = found else { break };
            let mut w = rest.remove(j);
            let u = rest.remove(i);
            let inv = f.inv(s).expect("nonzero product");
            for x in &mut w {
                *x = f.mul(*x, inv);
            }
            for x in &mut rest {
                let xw = symp_dot(f, n, x, &w);
                let xu = symp_dot(f, n, x, &u);
                f.axpy(f.neg(xw), &u, x);
                f.axpy(xu, &w, x);
            }
            pairs.push((u, w));
        }

        let c = pairs.len();
        let rank = self.gram().rank();
        assert!(
            rank.is_multiple_of(2) && rank == 2 * c,
            "alternating Gram matrix has rank {rank}, symplectic Gram-Schmidt found {c} pairs"
        );

        let widen = |v: &[u8]| -> Vec<u8> {
            let mut out = Vec::with_capacity(2 * (n + c));
            out.extend_from_slice(&v[..n]);
            out.extend(std::iter::repeat_n(0, c));
            out.extend_from_slice(&v[n..]);
            out.extend(std::iter::repeat_n(0, c));
            out
        };
        let big_n = n + c;
        let mut rows = Vec::with_capacity(self.dim());
        for (j, (u, w)) in pairs.iter().enumerate() {
            let mut u2 = widen(u);
            u2[n + j] = 1;
            let mut w2 = widen(w);
            w2[big_n + n + j] = f.neg(1);
            rows.push(u2);
            rows.push(w2);
        }
        rows.extend(rest.iter().map(|v| widen(v)));

        let extended = Self::from_rows(f, big_n, rows);
        debug_assert!(extended.is_self_orthogonal());
        Extension { extended, added: c }
    }
}

/// Visit every vector on `2n` coordinates whose support is exactly `weight`
/// positions chosen from `positions`, with every nonzero `(x, z)` pair at
/// each chosen position.
pub(crate) fn for_each_of_weight(
    field: FieldModulus,
    n: usize,
    positions: &[usize],
    weight: usize,
    mut visit: impl FnMut(&[u8]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if weight > positions.len() {
        return ControlFlow::Continue(());
    }
    let p = field.p();
    let mut v = vec![0u8; 2 * n];
    let mut chosen = Vec::with_capacity(weight);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        p: u8,
        n: usize,
        positions: &[usize],
        start: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        v: &mut [u8],
        visit: &mut dyn FnMut(&[u8]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if left == 0 {
            return fill(p, n, chosen, 0, v, visit);
        }
        for idx in start..=positions.len() - left {
            chosen.push(positions[idx]);
            rec(p, n, positions, idx + 1, left - 1, chosen, v, visit)?;
            chosen.pop();
        }
        ControlFlow::Continue(())
    }
    fn fill(
        p: u8,
        n: usize,
        chosen: &[usize],
        k: usize,
        v: &mut [u8],
        visit: &mut dyn FnMut(&[u8]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if k == chosen.len() {
            return visit(v);
        }
        let pos = chosen[k];
        for x in 0..p {
            for z in 0..p {
                if x == 0 && z == 0 {
                    continue;
                }
                v[pos] = x;
                v[n + pos] = z;
                fill(p, n, chosen, k + 1, v, visit)?;
            }
        }
        v[pos] = 0;
        v[n + pos] = 0;
        ControlFlow::Continue(())
    }
    rec(p, n, positions, 0, weight, &mut chosen, &mut v, &mut visit)
}
