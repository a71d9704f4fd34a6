//! Dense complex linear algebra used throughout the crate.
//!
//! Vectors are plain `Vec<C64>` (a [`ComplexVector`]); matrices are stored
//! row-major in [`ComplexMatrix`]. Tensor products follow the usual
//! convention that the left factor indexes the most significant bits, so
//! `kron(|a⟩, |b⟩)[i * dim(b) + j] = a[i] * b[j]`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexVector = Vec<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Returns `log2(dim)` if `dim` is a positive power of two.
pub fn log2_exact(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Tensor product `a ⊗ b` of two register vectors.
pub fn kron(a: &[C64], b: &[C64]) -> Result<ComplexVector> {
    log2_exact(a.len())?;
    log2_exact(b.len())?;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    Ok(out)
}

/// `⟨x1|x2⟩`, conjugate-linear in the first argument.
pub fn inner_product(x1: &[C64], x2: &[C64]) -> Result<C64> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x1.len(),
            found: x2.len(),
        });
    }
    Ok(dot(x1, x2))
}

#[inline]
pub(crate) fn dot(x1: &[C64], x2: &[C64]) -> C64 {
    x1.iter().zip(x2).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    norm_sqr(x).sqrt()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `y -= coeff * x`
#[inline]
fn axpy_sub(y: &mut [C64], coeff: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= coeff * xi;
    }
}

/// Basis vector `|index⟩` in a space of dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> ComplexVector {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

/// Output of [`orthonormalize`].
#[derive(Clone, Debug)]
pub struct Orthonormalized {
    pub basis: Vec<ComplexVector>,
    pub dim: usize,
    /// Largest singular value of the input family; thresholds are relative to it.
    pub scale: f64,
    /// Smallest accepted pivot, relative to `scale`.
    pub smallest_kept: f64,
    /// Largest rejected pivot, relative to `scale` (0 when nothing was rejected).
    pub largest_dropped: f64,
}

impl Orthonormalized {
    /// True when an accepted or rejected pivot lies within two orders of
    /// magnitude of the threshold, i.e. the numerical rank is fragile.
    pub fn is_borderline(&self, tol: f64) -> bool {
        let near = |x: f64| x > 0.0 && x > tol * 1e-2 && x < tol * 1e2;
        (self.dim > 0 && near(self.smallest_kept)) || near(self.largest_dropped)
    }
}

/// Default rank threshold, relative to the largest singular value.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Column-pivoted modified Gram-Schmidt with one re-orthogonalization pass.
///
/// A residual is accepted while its norm exceeds `tol` times the largest
/// singular value of the family, so `dim` is the numerical rank at that
/// threshold. An all-zero family gives an empty basis.
pub fn orthonormalize(vectors: &[ComplexVector], tol: f64) -> Result<Orthonormalized> {
    let Some(first) = vectors.first() else {
        return Err(Error::InvalidArgument(
            "orthonormalize needs at least one vector".into(),
        ));
    };
    let n = first.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }

    let scale = largest_singular_value(vectors);
    let mut out = Orthonormalized {
        basis: Vec::new(),
        dim: 0,
        scale,
        smallest_kept: f64::INFINITY,
        largest_dropped: 0.0,
    };
    if scale == 0.0 {
        out.smallest_kept = 0.0;
        return Ok(out);
    }

    let mut residuals: Vec<ComplexVector> = vectors.to_vec();
    let mut active: Vec<usize> = (0..residuals.len()).collect();
    while !active.is_empty() && out.basis.len() < n {
        let (pos, best) = active
            .iter()
            .enumerate()
            .map(|(p, &i)| (p, norm(&residuals[i])))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let rel = best / scale;
        if rel <= tol {
            out.largest_dropped = rel;
            break;
        }
        let idx = active.swap_remove(pos);
        let mut q = std::mem::take(&mut residuals[idx]);
        // second pass against the accepted basis
        for b in &out.basis {
            let c = dot(b, &q);
            axpy_sub(&mut q, c, b);
        }
        let qn = norm(&q);
        if qn / scale <= tol {
            out.largest_dropped = out.largest_dropped.max(qn / scale);
            continue;
        }
        q.iter_mut().for_each(|x| *x /= qn);
        for &i in &active {
            let c = dot(&q, &residuals[i]);
            axpy_sub(&mut residuals[i], c, &q);
        }
        out.smallest_kept = out.smallest_kept.min(rel);
        out.basis.push(q);
    }
    if out.basis.len() == n {
        out.largest_dropped = active
            .iter()
            .map(|&i| norm(&residuals[i]) / scale)
            .fold(out.largest_dropped, f64::max);
    }
    out.dim = out.basis.len();
    Ok(out)
}

/// Spectral norm of the matrix whose columns are `vectors`, by power
/// iteration on the Gram matrix.
fn largest_singular_value(vectors: &[ComplexVector]) -> f64 {
    let k = vectors.len();
    let mut gram = vec![ZERO; k * k];
    for i in 0..k {
        for j in i..k {
            let g = dot(&vectors[i], &vectors[j]);
            gram[i * k + j] = g;
            gram[j * k + i] = g.conj();
        }
    }
    let trace: f64 = (0..k).map(|i| gram[i * k + i].re).sum();
    if trace == 0.0 {
        return 0.0;
    }
    let mut x: Vec<C64> = (0..k)
        .map(|i| C64::new(1.0 + i as f64 * 1e-3, 0.0))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..200 {
        let y: Vec<C64> = (0..k)
            .map(|i| (0..k).map(|j| gram[i * k + j] * x[j]).sum())
            .collect();
        let ny = norm(&y);
        if ny == 0.0 {
            break;
        }
        let next = ny / norm(&x);
        x = y.into_iter().map(|v| v / ny).collect();
        if (next - lambda).abs() <= 1e-14 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // power iteration converges from below; the Frobenius norm bounds from above
    lambda.max(trace / k as f64).min(trace).sqrt()
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Square matrix from a row-major slice of length `dim²`.
    pub fn square(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        Self::from_row_major(dim, dim, data)
    }

    /// Builds a square matrix of real entries, handy for permutation gates.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_row_major(dim, dim, data)
    }

    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (r, &x) in col.iter().enumerate() {
                m[(r, c)] = x;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> ComplexVector {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[C64]) -> Result<ComplexVector> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self[(r1, c1)];
                for r2 in 0..rhs.rows {
                    for c2 in 0..rhs.cols {
                        out[(r1 * rhs.rows + r2, c1 * rhs.cols + c2)] = a * rhs[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    /// `max |U†U − I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for r in 0..n {
                    s += self[(r, i)].conj() * self[(r, j)];
                }
                if i == j {
                    s -= ONE;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Extends a partial isometry to a unitary of dimension `dim`.
///
/// `specified` pins column `index` to the given vector. The pinned columns
/// must be orthonormal within `isometry_tol`; they are re-orthonormalized in
/// order, then the free columns are filled, in ascending index order, from
/// standard basis vectors `|0⟩, |1⟩, …` with the span of everything placed so
/// far projected out. The result is deterministic.
pub fn complete_to_unitary(
    dim: usize,
    specified: &[(usize, ComplexVector)],
    isometry_tol: f64,
) -> Result<ComplexMatrix> {
    complete_with_order(dim, specified, isometry_tol, 0..dim)
}

/// Like [`complete_to_unitary`], but draws candidate basis vectors in the
/// given order. Different orders give different (equally valid) completions.
pub fn complete_with_order(
    dim: usize,
    specified: &[(usize, ComplexVector)],
    isometry_tol: f64,
    candidates: impl IntoIterator<Item = usize>,
) -> Result<ComplexMatrix> {
    let mut pinned = vec![false; dim];
    for (i, (idx, col)) in specified.iter().enumerate() {
        if *idx >= dim || pinned[*idx] {
            return Err(Error::InvalidArgument(format!(
                "column {idx} pinned twice or out of range"
            )));
        }
        if col.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: col.len(),
            });
        }
        let n = norm(col);
        if (n - 1.0).abs() > isometry_tol {
            return Err(Error::Numerical(format!(
                "pinned column {idx} has norm {n:.3e}, not 1"
            )));
        }
        for (other_idx, other) in &specified[..i] {
            let overlap = dot(other, col).norm();
            if overlap > isometry_tol {
                return Err(Error::Numerical(format!(
                    "pinned columns {other_idx} and {idx} overlap by {overlap:.3e}"
                )));
            }
        }
        pinned[*idx] = true;
    }

    let mut placed: Vec<ComplexVector> = Vec::with_capacity(dim);
    let mut columns: Vec<Option<ComplexVector>> = vec![None; dim];
    for (idx, col) in specified {
        let q = project_out_and_normalize(col.clone(), &placed)
            .ok_or_else(|| Error::Numerical("pinned columns are linearly dependent".into()))?;
        placed.push(q.clone());
        columns[*idx] = Some(q);
    }

    let mut free = (0..dim).filter(|&i| !pinned[i]);
    let mut next_free = free.next();
    for cand in candidates {
        let Some(slot) = next_free else { break };
        if cand >= dim {
            continue;
        }
        if let Some(q) = project_out_and_normalize(basis_vector(dim, cand), &placed) {
            placed.push(q.clone());
            columns[slot] = Some(q);
            next_free = free.next();
        }
    }
    if next_free.is_some() {
        return Err(Error::Numerical(
            "candidate vectors did not span the complement".into(),
        ));
    }
    let cols: Vec<ComplexVector> = columns.into_iter().map(Option::unwrap).collect();
    ComplexMatrix::from_columns(&cols)
}

/// Projects `v` off the orthonormal set `basis` (twice) and normalizes it.
/// Returns `None` when the remainder is numerically zero.
fn project_out_and_normalize(
    mut v: ComplexVector,
    basis: &[ComplexVector],
) -> Option<ComplexVector> {
    let before = norm(&v);
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &v);
            axpy_sub(&mut v, c, b);
        }
    }
    let n = norm(&v);
    if n <= 1e-6 * before.max(1.0) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= n);
    Some(v)
}

/// Haar-random unitary of dimension `dim`: Gram-Schmidt on a complex
/// Ginibre matrix (the positive diagonal of the implied R fixes the phases).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let cols: Vec<ComplexVector> = (0..dim).map(|_| random_vector(dim, rng)).collect();
        let mut basis: Vec<ComplexVector> = Vec::with_capacity(dim);
        for c in cols {
            match project_out_and_normalize(c, &basis) {
                Some(q) => basis.push(q),
                None => break,
            }
        }
        if basis.len() == dim {
            return ComplexMatrix::from_columns(&basis).expect("square by construction");
        }
    }
}

/// Vector of i.i.d. standard complex Gaussian entries (not normalized).
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    let mut v = random_vector(dim, rng);
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_basis_states() {
        let zero = vec![ONE, ZERO];
        let one = vec![ZERO, ONE];
        assert_eq!(kron(&zero, &one).unwrap(), vec![ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn kron_plus_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = vec![c(h), c(h)];
        let b = vec![ONE, ZERO];
        assert_eq!(kron(&a, &b).unwrap(), vec![c(h), ZERO, c(h), ZERO]);
    }

    #[test]
    fn kron_rejects_bad_dims() {
        assert!(matches!(
            kron(&[ONE, ONE, ONE], &[ONE]),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn inner_product_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = vec![c(h), c(h)];
        let x1 = kron(&plus, &[ONE, ZERO]).unwrap();
        let x2 = kron(&plus, &[ZERO, ONE]).unwrap();
        assert_eq!(inner_product(&x1, &x2).unwrap(), ZERO);
        assert!((inner_product(&x1, &x1).unwrap() - ONE).norm() < 1e-15);
        assert!(inner_product(&x1, &plus).is_err());
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let x = vec![C64::new(0.0, 1.0), ZERO];
        let y = vec![ONE, ZERO];
        assert_eq!(inner_product(&x, &y).unwrap(), C64::new(0.0, -1.0));
    }

    #[test]
    fn orthonormalize_colinear() {
        let out = orthonormalize(&[vec![ONE, ZERO], vec![c(2.0), ZERO]], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.dim, 1);
        assert!(max_abs_diff(&out.basis[0], &[ONE, ZERO]) < 1e-15);
    }

    #[test]
    fn orthonormalize_standard_basis_unchanged() {
        let out = orthonormalize(&[vec![ONE, ZERO], vec![ZERO, ONE]], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.dim, 2);
        assert!(max_abs_diff(&out.basis[0], &[ONE, ZERO]) < 1e-15);
        assert!(max_abs_diff(&out.basis[1], &[ZERO, ONE]) < 1e-15);
    }

    #[test]
    fn orthonormalize_all_zero() {
        let out = orthonormalize(&[vec![ZERO; 4], vec![ZERO; 4]], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.dim, 0);
        assert!(out.basis.is_empty());
    }

    #[test]
    fn orthonormalize_rejects_empty_and_ragged() {
        assert!(orthonormalize(&[], 1e-9).is_err());
        assert!(orthonormalize(&[vec![ONE], vec![ONE, ZERO]], 1e-9).is_err());
    }

    #[test]
    fn unitary_completion_is_unitary_and_keeps_pinned_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(8, &mut rng);
        let pinned: Vec<(usize, ComplexVector)> = vec![(0, u.column(0)), (5, u.column(1))];
        let full = complete_to_unitary(8, &pinned, 1e-9).unwrap();
        assert!(full.unitarity_deviation() < 1e-12);
        assert!(max_abs_diff(&full.column(0), &u.column(0)) < 1e-12);
        assert!(max_abs_diff(&full.column(5), &u.column(1)) < 1e-12);
    }

    #[test]
    fn unitary_completion_rejects_non_isometry() {
        let pinned = vec![(0, vec![c(2.0), ZERO])];
        assert!(matches!(
            complete_to_unitary(2, &pinned, 1e-9),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [1, 2, 4, 16] {
            assert!(random_unitary(dim, &mut rng).unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn matrix_kron_matches_vector_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_unitary(2, &mut rng);
        let b = random_unitary(4, &mut rng);
        let x = random_unit_vector(2, &mut rng);
        let y = random_unit_vector(4, &mut rng);
        let lhs = a.kron(&b).matvec(&kron(&x, &y).unwrap()).unwrap();
        let rhs = kron(&a.matvec(&x).unwrap(), &b.matvec(&y).unwrap()).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }
}
