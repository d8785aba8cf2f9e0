//! Stabilizer codes as validated self-orthogonal subspaces.

use std::fmt;
use std::ops::ControlFlow;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::symplectic::{for_each_of_weight, symp_dot, SympSubspace, SympVector};

/// Minimum symplectic weight of `S^⊥s \ S`, or `Undefined` when that set is
/// empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Defined { d: usize, pure: bool },
    Undefined,
}

impl Distance {
    pub fn value(self) -> Option<usize> {
        match self {
            Distance::Defined { d, .. } => Some(d),
            Distance::Undefined => None,
        }
    }

    pub fn is_pure(self) -> bool {
        matches!(self, Distance::Defined { pure: true, .. })
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Defined { d, .. } => write!(f, "{d}"),
            Distance::Undefined => f.write_str("undefined"),
        }
    }
}

/// Exact distance of `space` by scanning vectors in increasing weight.
///
/// `space` need not be self-orthogonal. The scan stops at the first weight
/// level containing an element of `space^⊥s` outside `space`. Purity asks
/// that no nonzero element of the dual has smaller weight, which can only be
/// violated by elements of `space` seen at lower levels.
pub(crate) fn scan_distance(space: &SympSubspace) -> Distance {
    let dual = space.symp_dual();
    if dual.is_subspace_of(space) {
        return Distance::Undefined;
    }
    let f = space.field();
    let n = space.n();
    let rows = space.basis().rows();
    let all: Vec<usize> = (0..n).collect();
    let mut inside_below = false;
    for w in 1..=n {
        let mut inside_here = false;
        let mut found = false;
        let _ = for_each_of_weight(f, n, &all, w, |v| {
            if rows.iter().all(|h| symp_dot(f, n, h, v) == 0) {
                if space.reduced().contains(v) {
                    inside_here = true;
                } else {
                    found = true;
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        if found {
            return Distance::Defined {
                d: w,
                pure: !inside_below,
            };
        }
        inside_below |= inside_here;
    }
    unreachable!("dual strictly contains the space, so some dual vector lies outside it")
}

/// Syndrome values against the code's stored ordered basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Syndrome(pub Vec<u8>);

impl Syndrome {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&s| s == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An error together with the positions known to the decoder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPattern {
    pub error: SympVector,
    /// Sorted, deduplicated, 0-based.
    pub erased: Vec<usize>,
}

impl ErrorPattern {
    pub fn new(error: SympVector, mut erased: Vec<usize>) -> Result<Self> {
        erased.sort_unstable();
        erased.dedup();
        if let Some(&position) = erased.iter().find(|&&p| p >= error.n()) {
            return Err(Error::PositionOutOfRange {
                position,
                n: error.n(),
            });
        }
        Ok(ErrorPattern { error, erased })
    }

    pub fn errors_only(error: SympVector) -> Self {
        ErrorPattern {
            error,
            erased: Vec::new(),
        }
    }

    /// Symplectic weight outside the erased positions.
    pub fn unerased_weight(&self) -> usize {
        self.error
            .support()
            .into_iter()
            .filter(|p| self.erased.binary_search(p).is_err())
            .count()
    }
}

/// Class of a residual error after correction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalClass {
    /// Residual lies in the stabilizer.
    Identity,
    /// Residual lies in `C^⊥s \ C`; carries the representative reduced modulo
    /// `C`.
    Logical(SympVector),
    /// Residual anticommutes with some stabilizer.
    NonCorrectable,
}

impl LogicalClass {
    pub fn is_identity(&self) -> bool {
        matches!(self, LogicalClass::Identity)
    }
}

/// An `[[n, k, d]]_p` stabilizer code.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    stab: SympSubspace,
    dual: SympSubspace,
    distance: OnceLock<Distance>,
    full_decoder: OnceLock<Decoder>,
}

impl PartialEq for StabilizerCode {
    fn eq(&self, other: &Self) -> bool {
        self.stab == other.stab
    }
}

impl StabilizerCode {
    /// Validate pairwise commutation of `generators` and build the code.
    pub fn new(field: FieldModulus, n: usize, generators: &[SympVector]) -> Result<Self> {
        let stab = SympSubspace::new(field, n, generators)?;
        for (i, g) in generators.iter().enumerate() {
            for (j, h) in generators.iter().enumerate().skip(i + 1) {
                let value = g.symp_product(h)?;
                if value != 0 {
                    return Err(Error::NotSelfOrthogonal { i, j, value });
                }
            }
        }
        Ok(Self::from_self_orthogonal(stab))
    }

    pub fn from_subspace(stab: SympSubspace) -> Result<Self> {
        let g = stab.gram();
        let m = g.matrix();
        for i in 0..m.nrows() {
            for j in i + 1..m.nrows() {
                if m.get(i, j) != 0 {
                    return Err(Error::NotSelfOrthogonal {
                        i,
                        j,
                        value: m.get(i, j),
                    });
                }
            }
        }
        Ok(Self::from_self_orthogonal(stab))
    }

    fn from_self_orthogonal(stab: SympSubspace) -> Self {
        debug_assert!(stab.is_self_orthogonal());
        let dual = stab.symp_dual();
        StabilizerCode {
            stab,
            dual,
            distance: OnceLock::new(),
            full_decoder: OnceLock::new(),
        }
    }

    pub fn field(&self) -> FieldModulus {
        self.stab.field()
    }

    pub fn n(&self) -> usize {
        self.stab.n()
    }

    pub fn k(&self) -> usize {
        self.stab.n() - self.stab.dim()
    }

    pub fn stabilizer(&self) -> &SympSubspace {
        &self.stab
    }

    pub fn dual(&self) -> &SympSubspace {
        &self.dual
    }

    /// The ordered generators `h_1, ..., h_{n-k}` (the reduced basis).
    pub fn generators(&self) -> Vec<SympVector> {
        self.stab.basis_vectors()
    }

    /// Distance and purity, computed on first use.
    pub fn distance(&self) -> Distance {
        *self.distance.get_or_init(|| scan_distance(&self.stab))
    }

    pub fn syndrome(&self, err: &SympVector) -> Result<Syndrome> {
        if err.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: err.n(),
            });
        }
        if err.field() != self.field() {
            return Err(Error::FieldMismatch {
                left: self.field().p(),
                right: err.field().p(),
            });
        }
        Ok(self.syndrome_raw(err.coords()))
    }

    pub(crate) fn syndrome_raw(&self, coords: &[u8]) -> Syndrome {
        let f = self.field();
        let n = self.n();
        Syndrome(
            self.stab
                .basis()
                .rows()
                .iter()
                .map(|h| symp_dot(f, n, h, coords))
                .collect(),
        )
    }

    /// A decoder allowed to place errors anywhere.
    pub fn decoder(&self) -> &Decoder {
        self.full_decoder
            .get_or_init(|| Decoder::new(self, (0..self.n()).collect()))
    }

    /// Minimum-weight error consistent with `s`, free on `erased` positions.
    pub fn decode(&self, s: &Syndrome, erased: &[usize]) -> Result<SympVector> {
        self.decoder().decode(s, erased)
    }

    pub fn logical_class(&self, residual: &SympVector) -> LogicalClass {
        if !self.syndrome_raw(residual.coords()).is_zero() {
            return LogicalClass::NonCorrectable;
        }
        if self.stab.contains(residual) {
            LogicalClass::Identity
        } else {
            LogicalClass::Logical(self.stab.reduce(residual))
        }
    }
}
