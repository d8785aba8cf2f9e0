//! Bit-packed row reduction over F_2 for rows of at most 64 columns.
//!
//! Column `j` lives in bit `j`. Behaviour matches the generic path exactly.

pub(crate) fn pack(row: &[u8]) -> u64 {
    debug_assert!(row.len() <= 64);
    row.iter()
        .enumerate()
        .fold(0u64, |w, (j, &x)| w | ((x as u64 & 1) << j))
}

pub(crate) fn unpack(word: u64, cols: usize) -> Vec<u8> {
    (0..cols).map(|j| ((word >> j) & 1) as u8).collect()
}

/// Reduce `rows` in place to RREF, truncating zero rows. Returns pivots.
pub(crate) fn rref(rows: &mut Vec<u64>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let bit = 1u64 << col;
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let pivot = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= pivot;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let row = vec![1, 0, 1, 1, 0, 0, 1];
        assert_eq!(unpack(pack(&row), row.len()), row);
        let full = vec![1u8; 64];
        assert_eq!(pack(&full), u64::MAX);
    }

    #[test]
    fn reduces_dependent_rows() {
        let mut rows = vec![0b011, 0b011, 0b110];
        let piv = rref(&mut rows, 3);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(rows, vec![0b101, 0b110]);
    }
}
