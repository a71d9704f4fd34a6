//! Truth tables and their text file format.
//!
//! Assignment `α` is read with `x1` as the most significant bit, so for
//! `n = 3` the index `0b100` is `x1 = 1, x2 = 0, x3 = 0`.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    bits: Vec<bool>,
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}: {})", self.n, self.bit_string())
    }
}

impl TruthTable {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n >= usize::BITS as usize || bits.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1usize.checked_shl(n as u32).unwrap_or(0),
                found: bits.len(),
            });
        }
        Ok(Self { n, bits })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        Self {
            n,
            bits: (0..1usize << n).map(f).collect(),
        }
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self::from_fn(n, |_| value)
    }

    /// `x_1 ⊕ … ⊕ x_n`.
    pub fn parity(n: usize) -> Self {
        Self::from_fn(n, |a| a.count_ones() % 2 == 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, alpha: usize) -> bool {
        self.bits[alpha]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n_line = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "missing variable count".into(),
        })?;
        let n: usize = n_line.parse().map_err(|_| Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected a variable count, found {n_line:?}"),
        })?;
        if n > 30 {
            return Err(Error::CapExceeded {
                what: format!("truth table over {n} variables"),
                limit: 30,
            });
        }
        let body = lines.next().unwrap_or("");
        let mut bits = Vec::with_capacity(1 << n);
        for (i, ch) in body.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::Parse {
                        line: 2,
                        column: i + 1,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        if bits.len() != 1 << n {
            return Err(Error::Parse {
                line: 2,
                column: bits.len() + 1,
                message: format!("expected {} entries, found {}", 1usize << n, bits.len()),
            });
        }
        Ok(Self { n, bits })
    }

    pub fn to_file_string(&self) -> String {
        format!("{}\n{}\n", self.n, self.bit_string())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

/// Value of `x_j` (1-based) in assignment `alpha` over `n` variables.
#[inline]
pub fn bit_of(alpha: usize, n: usize, j: usize) -> bool {
    (alpha >> (n - j)) & 1 == 1
}

/// Expands an assignment index into per-variable bits, `x1` first.
pub fn assignment_bits(alpha: usize, n: usize) -> Vec<bool> {
    (1..=n).map(|j| bit_of(alpha, n, j)).collect()
}
