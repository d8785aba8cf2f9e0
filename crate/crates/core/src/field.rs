//! Arithmetic in the prime field F_p.
//!
//! Elements are plain `u8` residues in `[0, p)`. Every operation expects
//! reduced inputs and returns a reduced output.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime modulus `2 <= p <= 251`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct FieldModulus(u8);

impl FieldModulus {
    pub const BINARY: FieldModulus = FieldModulus(2);

    pub fn new(p: u32) -> Result<Self> {
        if !(2..=251).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(FieldModulus(p as u8))
    }

    #[inline]
    pub fn p(self) -> u8 {
        self.0
    }

    /// Number of field elements, as a `usize`.
    #[inline]
    pub fn order(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn reduce(self, x: u32) -> u8 {
        (x % self.0 as u32) as u8
    }

    #[inline]
    pub fn add(self, x: u8, y: u8) -> u8 {
        let s = x as u16 + y as u16;
        let p = self.0 as u16;
        (if s >= p { s - p } else { s }) as u8
    }

    #[inline]
    pub fn sub(self, x: u8, y: u8) -> u8 {
        if x >= y {
            x - y
        } else {
            (x as u16 + self.0 as u16 - y as u16) as u8
        }
    }

    #[inline]
    pub fn neg(self, x: u8) -> u8 {
        if x == 0 {
            0
        } else {
            self.0 - x
        }
    }

    #[inline]
    pub fn mul(self, x: u8, y: u8) -> u8 {
        ((x as u16 * y as u16) % self.0 as u16) as u8
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self, x: u8) -> Result<u8> {
        if x == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(x, self.0 as u32 - 2))
    }

    pub fn pow(self, mut base: u8, mut exp: u32) -> u8 {
        let mut acc = 1u8;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `y += c * x` elementwise.
    #[inline]
    pub fn axpy(self, c: u8, x: &[u8], y: &mut [u8]) {
        debug_assert_eq!(x.len(), y.len());
        if c == 0 {
            return;
        }
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.add(*yi, self.mul(c, xi));
        }
    }

    /// Euclidean inner product of two equal-length vectors.
    #[inline]
    pub fn dot(self, x: &[u8], y: &[u8]) -> u8 {
        let p = self.0 as u32;
        let mut acc = 0u32;
        for (&a, &b) in x.iter().zip(y) {
            acc += a as u32 * b as u32;
            if acc >= 1 << 24 {
                acc %= p;
            }
        }
        (acc % p) as u8
    }
}

impl TryFrom<u8> for FieldModulus {
    type Error = Error;

    fn try_from(p: u8) -> Result<Self> {
        FieldModulus::new(p as u32)
    }
}

impl From<FieldModulus> for u8 {
    fn from(f: FieldModulus) -> u8 {
        f.0
    }
}

impl fmt::Display for FieldModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}
