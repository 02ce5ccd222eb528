//! Multivariate Laurent polynomials in `z_1, ..., z_d` with complex
//! coefficients, and matrices of them.
//!
//! These are the exact spectral objects of the `Z^d` backend: every entry of a
//! polyphase matrix of a finitely supported filter is a Laurent polynomial, so
//! identities such as `R(z) E(z) = I` can be decided for all `z` on the torus
//! at once rather than by sampling.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with magnitude at or below this are dropped after each operation.
pub const PRUNE_TOL: f64 = 1e-12;

/// Default tolerance for [`LaurentMatrix::is_identity`].
pub const IDENTITY_TOL: f64 = 1e-10;

/// `sum_k c_k z^k` over finitely many integer exponent vectors `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LaurentRepr", into = "LaurentRepr")]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

/// Wire form: `{"dim": d, "terms": [[[k_1..k_d], [re, im]], ...]}`.
#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    dim: usize,
    terms: Vec<(Vec<i64>, [f64; 2])>,
}

impl TryFrom<LaurentRepr> for LaurentPoly {
    type Error = Error;

    fn try_from(r: LaurentRepr) -> Result<Self> {
        LaurentPoly::from_terms(
            r.dim,
            r.terms.into_iter().map(|(k, [re, im])| (k, Complex64::new(re, im))),
        )
    }
}

impl From<LaurentPoly> for LaurentRepr {
    fn from(p: LaurentPoly) -> Self {
        LaurentRepr {
            dim: p.dim,
            terms: p.terms.into_iter().map(|(k, c)| (k, [c.re, c.im])).collect(),
        }
    }
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = LaurentPoly::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn monomial(exponent: Vec<i64>, c: Complex64) -> Self {
        let mut p = LaurentPoly::zero(exponent.len());
        p.add_term(exponent, c);
        p
    }

    /// Sums the given terms (repeated exponents accumulate).
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        let mut p = LaurentPoly::zero(dim);
        for (k, c) in terms {
            if k.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.len() });
            }
            p.accumulate(k, c);
        }
        p.prune();
        Ok(p)
    }

    fn add_term(&mut self, k: Vec<i64>, c: Complex64) {
        self.accumulate(k, c);
        self.prune();
    }

    fn accumulate(&mut self, k: Vec<i64>, c: Complex64) {
        *self.terms.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > PRUNE_TOL);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.terms.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Some((k, c))` when the polynomial is the single term `c z^k`.
    pub fn as_monomial(&self) -> Option<(&[i64], Complex64)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(k, c)| (k.as_slice(), *c))
        } else {
            None
        }
    }

    fn check_dim(&self, other: &LaurentPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), *c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.dim);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), c * s);
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut out = LaurentPoly::zero(self.dim);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.accumulate(k, ca * cb);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Adjoint on the unit torus: `c z^k -> conj(c) z^{-k}`.
    pub fn adjoint(&self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.iter().map(|e| -e).collect(), c.conj()))
                .collect(),
        }
    }

    /// Value at `z = exp(2 pi i theta)`.
    pub fn eval(&self, theta: &[f64]) -> Result<Complex64> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: theta.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k
                    .iter()
                    .zip(theta)
                    .map(|(&e, &t)| (e as f64 * t).rem_euclid(1.0))
                    .sum();
                c * Complex64::cis(TAU * phase)
            })
            .sum())
    }
}

/// Rectangular matrix of Laurent polynomials sharing one variable count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    dim: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize, dim: usize) -> Self {
        LaurentMatrix { rows, cols, dim, entries: vec![LaurentPoly::zero(dim); rows * cols] }
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        let mut m = LaurentMatrix::zeros(n, n, dim);
        for i in 0..n {
            m.entries[i * n + i] = LaurentPoly::constant(dim, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<LaurentPoly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let dim = entries.first().map_or(1, LaurentPoly::dim);
        if let Some(bad) = entries.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(LaurentMatrix { rows, cols, dim, entries })
    }

    /// Constant matrix.
    pub fn from_constant(m: &DMatrix<Complex64>, dim: usize) -> Self {
        let entries = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| LaurentPoly::constant(dim, m[(i, j)]))
            .collect();
        LaurentMatrix { rows: m.nrows(), cols: m.ncols(), dim, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub(crate) fn get_mut(&mut self, i: usize, j: usize) -> &mut LaurentPoly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn add(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(LaurentMatrix { entries, ..*self })
    }

    pub fn mul(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = LaurentMatrix::zeros(self.rows, other.cols, self.dim);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPoly::zero(self.dim);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                *out.get_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &LaurentPoly) -> Result<LaurentMatrix> {
        let entries = self.entries.iter().map(|e| e.mul(s)).collect::<Result<_>>()?;
        Ok(LaurentMatrix { entries, ..*self })
    }

    /// Conjugate transpose on the torus.
    pub fn adjoint(&self) -> LaurentMatrix {
        let mut out = LaurentMatrix::zeros(self.cols, self.rows, self.dim);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.get_mut(j, i) = self.get(i, j).adjoint();
            }
        }
        out
    }

    /// Entrywise evaluation at `z = exp(2 pi i theta)`.
    pub fn eval(&self, theta: &[f64]) -> Result<DMatrix<Complex64>> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.get(i, j).eval(theta)?;
            }
        }
        Ok(out)
    }

    /// Largest coefficient magnitude of `self - I` (square matrices only).
    pub fn identity_residual(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                let r = if i == j {
                    e.sub(&LaurentPoly::constant(self.dim, Complex64::new(1.0, 0.0)))?
                        .max_coefficient()
                } else {
                    e.max_coefficient()
                };
                worst = worst.max(r);
            }
        }
        Ok(worst)
    }

    /// Whether the matrix equals the identity as a polynomial matrix, i.e. for
    /// every `z` on the torus simultaneously. Non-square matrices are never the
    /// identity.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.identity_residual().is_ok_and(|r| r <= tol)
    }

    /// Determinant by expansion over column subsets (exact polynomial arithmetic).
    pub fn det(&self) -> Result<LaurentPoly> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let rows: Vec<usize> = (0..self.rows).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        self.minor_det(&rows, &cols)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Result<LaurentPoly> {
        let n = rows.len();
        // table[S] = det of rows[0..|S|] against the columns selected by bitmask S
        let mut table = vec![LaurentPoly::zero(self.dim); 1 << n];
        table[0] = LaurentPoly::constant(self.dim, Complex64::new(1.0, 0.0));
        for mask in 1usize..(1 << n) {
            let r = rows[mask.count_ones() as usize - 1];
            let mut acc = LaurentPoly::zero(self.dim);
            for (pos, &c) in cols.iter().enumerate() {
                if mask & (1 << pos) == 0 {
                    continue;
                }
                let prev = &table[mask & !(1 << pos)];
                if prev.is_zero() || self.get(r, c).is_zero() {
                    continue;
                }
                let above = (mask >> (pos + 1)).count_ones();
                let term = self.get(r, c).mul(prev)?;
                acc = if above % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
            }
            table[mask] = acc;
        }
        Ok(table.pop().unwrap())
    }

    /// Adjugate, `A adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Result<LaurentMatrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(LaurentMatrix::identity(1, self.dim));
        }
        let mut out = LaurentMatrix::zeros(n, n, self.dim);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let m = self.minor_det(&rows, &cols)?;
                *out.get_mut(j, i) = if (i + j) % 2 == 0 { m } else { m.scale(Complex64::new(-1.0, 0.0)) };
            }
        }
        Ok(out)
    }
}
