//! Entanglement-assisted codes and their breeding protocols.
//!
//! A subspace `D` on `n` noisy positions that is not self-orthogonal needs
//! `c` extra positions to become a stabilizer code; in the distillation
//! protocol those positions hold `c` preshared perfect pairs. The protocol
//! produces `k` pairs (the `k` of the extended code) and consumes `c`, for a
//! net yield of `k - c`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::code::{scan_distance, Distance, StabilizerCode};
use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::symplectic::SympSubspace;

/// Number of preshared pairs needed to make `d` self-orthogonal: half the
/// rank of its Gram matrix.
pub fn ebit_count(d: &SympSubspace) -> usize {
    let rank = d.gram().rank();
    assert!(
        rank.is_multiple_of(2),
        "alternating Gram matrix with odd rank {rank}"
    );
    rank / 2
}

/// Minimum symplectic weight of `D^⊥s \ D`.
pub fn eaqecc_distance(d: &SympSubspace) -> Distance {
    scan_distance(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EaqeccParams {
    pub p: u8,
    /// Noisy pairs.
    pub n: usize,
    /// Pairs produced.
    pub gross_k: usize,
    /// Preshared pairs consumed.
    pub c: usize,
    pub d: Distance,
}

impl EaqeccParams {
    pub fn net_yield(&self) -> i64 {
        self.gross_k as i64 - self.c as i64
    }
}

/// The executable form of a breeding protocol: an extended stabilizer code on
/// `N = n + c` positions, `c` of which carry preshared perfect pairs.
#[derive(Clone, Debug)]
pub struct BreedingProtocolSpec {
    extended_code: StabilizerCode,
    ebit_positions: Vec<usize>,
    noisy_positions: Vec<usize>,
    params: EaqeccParams,
    recomputed_distance: Distance,
    decoder: OnceLock<Decoder>,
}

impl BreedingProtocolSpec {
    fn assemble(
        extended_code: StabilizerCode,
        mut ebit_positions: Vec<usize>,
        d: Distance,
        recomputed_distance: Distance,
    ) -> Self {
        ebit_positions.sort_unstable();
        let big_n = extended_code.n();
        let noisy_positions: Vec<usize> = (0..big_n)
            .filter(|p| ebit_positions.binary_search(p).is_err())
            .collect();
        let params = EaqeccParams {
            p: extended_code.field().p(),
            n: noisy_positions.len(),
            gross_k: extended_code.k(),
            c: ebit_positions.len(),
            d,
        };
        BreedingProtocolSpec {
            extended_code,
            ebit_positions,
            noisy_positions,
            params,
            recomputed_distance,
            decoder: OnceLock::new(),
        }
    }

    /// The protocol with no preshared pairs. Any code qualifies.
    pub fn hashing(code: StabilizerCode) -> Self {
        let d = code.distance();
        Self::assemble(code, Vec::new(), d, d)
    }

    pub fn extended_code(&self) -> &StabilizerCode {
        &self.extended_code
    }

    pub fn ebit_positions(&self) -> &[usize] {
        &self.ebit_positions
    }

    pub fn noisy_positions(&self) -> &[usize] {
        &self.noisy_positions
    }

    pub fn params(&self) -> &EaqeccParams {
        &self.params
    }

    pub fn field(&self) -> FieldModulus {
        self.extended_code.field()
    }

    /// The subspace `D` seen on the noisy positions.
    pub fn punctured(&self) -> SympSubspace {
        self.extended_code
            .stabilizer()
            .puncture(&self.ebit_positions)
            .expect("ebit positions are in range")
    }

    /// Distance recomputed directly from `D`.
    pub fn recomputed_distance(&self) -> Distance {
        self.recomputed_distance
    }

    /// `Some((claimed, recomputed))` when the recomputed distance disagrees
    /// with the bookkept one.
    pub fn distance_mismatch(&self) -> Option<(Distance, Distance)> {
        (self.recomputed_distance.value() != self.params.d.value())
            .then_some((self.params.d, self.recomputed_distance))
    }

    #[cfg(test)]
    pub(crate) fn with_claimed_distance(mut self, d: usize) -> Self {
        self.params.d = Distance::Defined { d, pure: true };
        self
    }

    /// Decoder that only places errors on noisy positions; preshared pairs
    /// are perfect.
    pub fn decoder(&self) -> &Decoder {
        self.decoder
            .get_or_init(|| Decoder::new(&self.extended_code, self.noisy_positions.clone()))
    }
}

/// Turn a pure `[[n, k, d]]` code into an `[[n - c, k, d; c]]` breeding
/// protocol by handing the `punctured` positions (0-based, `c < d` of them)
/// to preshared pairs.
pub fn convert_pure(code: &StabilizerCode, punctured: &[usize]) -> Result<BreedingProtocolSpec> {
    let mut positions = punctured.to_vec();
    positions.sort_unstable();
    positions.dedup();
    if let Some(&position) = positions.iter().find(|&&p| p >= code.n()) {
        return Err(Error::PositionOutOfRange {
            position,
            n: code.n(),
        });
    }
    let d = match code.distance() {
        Distance::Defined { d, pure: true } => d,
        Distance::Defined { .. } => return Err(Error::ImpureCode),
        Distance::Undefined => return Err(Error::DistanceUndefined),
    };
    if positions.len() >= d {
        return Err(Error::TooManyPunctured {
            punctured: positions.len(),
            d,
        });
    }
    let dsub = code.stabilizer().puncture(&positions)?;
    let c = ebit_count(&dsub);
    if c != positions.len() {
        return Err(Error::Precondition(format!(
            "punctured subspace needs {c} ebits, expected {}",
            positions.len()
        )));
    }
    let recomputed = eaqecc_distance(&dsub);
    Ok(BreedingProtocolSpec::assemble(
        code.clone(),
        positions,
        code.distance(),
        recomputed,
    ))
}

/// Convenience form of [`convert_pure`] that punctures the last `c`
/// positions.
pub fn convert_pure_last(code: &StabilizerCode, c: usize) -> Result<BreedingProtocolSpec> {
    let n = code.n();
    if c > n {
        return Err(Error::PositionOutOfRange { position: c, n });
    }
    let positions: Vec<usize> = (n - c..n).collect();
    convert_pure(code, &positions)
}

/// Build a breeding protocol from an arbitrary subspace by minimal
/// self-orthogonal extension. Preshared pairs sit on the appended positions.
pub fn build_from_subspace(d: &SympSubspace) -> Result<BreedingProtocolSpec> {
    let ext = d.symp_extend();
    let code = StabilizerCode::from_subspace(ext.extended)?;
    let ebits: Vec<usize> = (d.n()..d.n() + ext.added).collect();
    let dist = eaqecc_distance(d);
    Ok(BreedingProtocolSpec::assemble(code, ebits, dist, dist))
}
