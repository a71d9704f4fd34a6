//! Subfunction counting over variable partitions and the Element
//! Distinctness family.
//!
//! For a block `S_j` of a partition, `Σ_j` is the set of functions on `S_j`
//! obtained by fixing every other variable; `σ_j = |Σ_j|`. The measure
//! reported is `Σ_j log₂σ_j / max(1, log₂log₂σ_j)`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::truth_table::TruthTable;

/// Largest variable count accepted for subfunction enumeration.
pub const MAX_VARIABLES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<BTreeSet<usize>>,
}

impl Partition {
    /// Blocks of 1-based variable indices; they must be nonempty, disjoint
    /// and cover `1..=n`.
    pub fn new(n: usize, blocks: Vec<BTreeSet<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidArgument(format!("block {} is empty", i + 1)));
            }
            for &x in b {
                if x == 0 || x > n {
                    return Err(Error::InvalidArgument(format!(
                        "variable {x} in block {} is outside 1..={n}",
                        i + 1
                    )));
                }
                if !seen.insert(x) {
                    return Err(Error::InvalidArgument(format!(
                        "variable {x} appears in more than one block"
                    )));
                }
            }
        }
        if let Some(missing) = (1..=n).find(|x| !seen.contains(x)) {
            return Err(Error::InvalidArgument(format!(
                "variable {missing} is in no block"
            )));
        }
        Ok(Self { n, blocks })
    }

    /// One block per variable.
    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (1..=n).map(|x| BTreeSet::from([x])).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[BTreeSet<usize>] {
        &self.blocks
    }

    /// Parses one block per line, variables separated by whitespace.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut block = BTreeSet::new();
            for tok in line.split_whitespace() {
                let x: usize = tok.parse().map_err(|_| Error::Parse {
                    line: line_no + 1,
                    column: line.find(tok).unwrap_or(0) + 1,
                    message: format!("expected a variable index, found {tok:?}"),
                })?;
                block.insert(x);
            }
            blocks.push(block);
        }
        Self::new(n, blocks)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn read(n: usize, path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(n, &std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

/// The distinct subfunctions of one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubfunctionTable {
    /// 0-based block index.
    pub block: usize,
    /// Block variables in ascending order; the first is the most
    /// significant bit of the subfunction's argument.
    pub vars: Vec<usize>,
    /// Distinct subfunctions, sorted.
    pub tables: Vec<TruthTable>,
}

impl SubfunctionTable {
    pub fn sigma(&self) -> usize {
        self.tables.len()
    }

    pub fn contains(&self, table: &TruthTable) -> bool {
        self.tables
            .binary_search_by(|t| t.bits().cmp(table.bits()))
            .is_ok()
    }
}

/// Enumerates the subfunctions of `f` on block `j` (0-based).
pub fn subfunctions(f: &TruthTable, partition: &Partition, j: usize) -> Result<SubfunctionTable> {
    let n = f.n();
    if n > MAX_VARIABLES {
        return Err(Error::CapExceeded {
            what: format!("subfunction enumeration over {n} variables"),
            limit: MAX_VARIABLES,
        });
    }
    if partition.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: partition.n(),
        });
    }
    let block = partition
        .blocks()
        .get(j)
        .ok_or_else(|| Error::InvalidArgument(format!("no block {j}")))?;
    let inside: Vec<usize> = block.iter().copied().collect();
    let outside: Vec<usize> = (1..=n).filter(|x| !block.contains(x)).collect();
    let bit = |x: usize| 1usize << (n - x);
    let spread = |value: usize, vars: &[usize]| {
        let k = vars.len();
        (0..k)
            .filter(|&i| (value >> (k - 1 - i)) & 1 == 1)
            .fold(0usize, |acc, i| acc | bit(vars[i]))
    };
    let inner: Vec<usize> = (0..1usize << inside.len())
        .map(|a| spread(a, &inside))
        .collect();
    let set: HashSet<Vec<bool>> = (0..1usize << outside.len())
        .into_par_iter()
        .map(|rho| {
            let base = spread(rho, &outside);
            inner
                .iter()
                .map(|&a| f.get(base | a))
                .collect::<Vec<bool>>()
        })
        .collect();
    let mut bits: Vec<Vec<bool>> = set.into_iter().collect();
    bits.sort();
    let tables = bits
        .into_iter()
        .map(|b| TruthTable::new(inside.len(), b))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubfunctionTable {
        block: j,
        vars: inside,
        tables,
    })
}

/// `log₂σ / max(1, log₂log₂σ)`.
pub fn nechiporuk_term(sigma: usize) -> f64 {
    let l = (sigma as f64).log2();
    if l <= 0.0 {
        return 0.0;
    }
    l / l.log2().max(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockTerm {
    /// 1-based block index.
    pub block: usize,
    pub size: usize,
    pub sigma: usize,
    pub term: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NechiporukReport {
    pub blocks: Vec<BlockTerm>,
    pub total: f64,
}

pub fn nechiporuk_bound(f: &TruthTable, partition: &Partition) -> Result<NechiporukReport> {
    let blocks = (0..partition.blocks().len())
        .map(|j| {
            let t = subfunctions(f, partition, j)?;
            Ok(BlockTerm {
                block: j + 1,
                size: t.vars.len(),
                sigma: t.sigma(),
                term: nechiporuk_term(t.sigma()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = blocks.iter().map(|b| b.term).sum();
    Ok(NechiporukReport { blocks, total })
}

/// Bits per string: `2⌈log₂ℓ⌉`.
pub fn ed_bits(ell: usize) -> usize {
    2 * ell.next_power_of_two().trailing_zeros() as usize
}

fn check_ell(ell: usize) -> Result<()> {
    if ell < 2 {
        return Err(Error::InvalidArgument(format!(
            "ℓ must be at least 2, got {ell}"
        )));
    }
    let n = ell * ed_bits(ell);
    if n > MAX_VARIABLES {
        return Err(Error::CapExceeded {
            what: format!("element distinctness with ℓ = {ell} ({n} variables)"),
            limit: MAX_VARIABLES,
        });
    }
    Ok(())
}

/// `ED` on `ℓ` strings of `2⌈log₂ℓ⌉` bits: 1 iff the strings are pairwise
/// distinct. String `i` occupies variables `i·b + 1 ..= (i+1)·b`, its first
/// variable being the most significant bit.
pub fn ed_function(ell: usize) -> Result<TruthTable> {
    check_ell(ell)?;
    let b = ed_bits(ell);
    let n = ell * b;
    let mask = (1usize << b) - 1;
    Ok(TruthTable::from_fn(n, |alpha| {
        let mut seen = 0u64;
        (0..ell).all(|i| {
            let z = (alpha >> (n - (i + 1) * b)) & mask;
            let fresh = seen & (1 << z) == 0;
            seen |= 1 << z;
            fresh
        })
    }))
}

/// One block per string.
pub fn ed_partition(ell: usize) -> Result<Partition> {
    check_ell(ell)?;
    let b = ed_bits(ell);
    Partition::new(
        ell * b,
        (0..ell)
            .map(|i| (i * b + 1..=(i + 1) * b).collect())
            .collect(),
    )
}

/// `C(n, k)`, saturating.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(u128::from(n - i)) / u128::from(i + 1);
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct EdSigmaReport {
    pub ell: usize,
    pub n: usize,
    pub sigmas: Vec<usize>,
    /// `C(ℓ², ℓ − 1)`.
    pub lower_bound: u128,
    pub meets_lower_bound: bool,
    pub symmetric: bool,
    pub total: f64,
}

pub fn ed_sigma_check(ell: usize) -> Result<EdSigmaReport> {
    let f = ed_function(ell)?;
    let p = ed_partition(ell)?;
    let report = nechiporuk_bound(&f, &p)?;
    let sigmas: Vec<usize> = report.blocks.iter().map(|b| b.sigma).collect();
    let lower_bound = binomial((ell * ell) as u64, (ell - 1) as u64);
    Ok(EdSigmaReport {
        ell,
        n: f.n(),
        meets_lower_bound: sigmas.iter().all(|&s| s as u128 >= lower_bound),
        symmetric: sigmas.windows(2).all(|w| w[0] == w[1]),
        sigmas,
        lower_bound,
        total: report.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor3_singleton_block() {
        let f = TruthTable::parity(3);
        let t = subfunctions(&f, &Partition::singletons(3), 0).unwrap();
        assert_eq!(t.sigma(), 2);
        let report = nechiporuk_bound(&f, &Partition::singletons(3)).unwrap();
        assert_eq!(report.total, 3.0);
    }

    #[test]
    fn constant_function() {
        let f = TruthTable::constant(3, false);
        let p = Partition::new(3, vec![BTreeSet::from([1, 3]), BTreeSet::from([2])]).unwrap();
        assert_eq!(subfunctions(&f, &p, 0).unwrap().sigma(), 1);
        assert_eq!(nechiporuk_bound(&f, &p).unwrap().total, 0.0);
    }

    #[test]
    fn ed2_definition_and_partition() {
        let f = ed_function(2).unwrap();
        assert_eq!(f.n(), 4);
        assert!(!f.get(0b0000));
        assert!(f.get(0b0110));
        let p = ed_partition(2).unwrap();
        assert_eq!(
            p.blocks(),
            &[BTreeSet::from([1, 2]), BTreeSet::from([3, 4])]
        );
    }

    #[test]
    fn ed3_definition() {
        let f = ed_function(3).unwrap();
        assert_eq!(f.n(), 12);
        let word = |a: usize, b: usize, c: usize| (a << 8) | (b << 4) | c;
        assert!(f.get(word(1, 2, 3)));
        assert!(!f.get(word(1, 1, 3)));
        assert!(!f.get(word(3, 2, 3)));
    }

    #[test]
    fn ed_rejects_small_ell() {
        assert!(ed_function(1).is_err());
        assert!(ed_partition(0).is_err());
        assert!(ed_function(5).is_err());
    }

    #[test]
    fn partition_validation_and_file_format() {
        assert!(Partition::new(3, vec![BTreeSet::from([1, 2])]).is_err());
        assert!(Partition::new(2, vec![BTreeSet::from([1, 2]), BTreeSet::from([2])]).is_err());
        let p = ed_partition(2).unwrap();
        assert_eq!(p.to_file_string(), "1 2\n3 4\n");
        assert_eq!(Partition::parse(4, &p.to_file_string()).unwrap(), p);
        assert!(matches!(
            Partition::parse(2, "1 x\n"),
            Err(Error::Parse {
                line: 1,
                column: 3,
                ..
            })
        ));
    }

    #[test]
    fn term_clamps_small_sigma() {
        assert_eq!(nechiporuk_term(1), 0.0);
        assert_eq!(nechiporuk_term(2), 1.0);
        assert_eq!(nechiporuk_term(4), 2.0);
        assert!((nechiporuk_term(256) - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 1), 4);
        assert_eq!(binomial(9, 2), 36);
        assert_eq!(binomial(3, 5), 0);
    }
}
