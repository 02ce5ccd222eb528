//! Small dense integer matrices: determinant, adjugate and column Hermite
//! normal form. All arithmetic is exact (`i128` intermediates).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        (0..m.n).map(|i| m.row(i).to_vec()).collect()
    }
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidLattice("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::InvalidLattice("matrix must be square".into()));
            }
            data.extend(r);
        }
        Ok(IntMatrix { n, data })
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut data = vec![0; n * n];
        for (i, &e) in entries.iter().enumerate() {
            data[i * n + i] = e;
        }
        IntMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(i, j, self.get(j, i));
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn det(&self) -> i64 {
        det_i128(self.n, self.data.iter().map(|&v| v as i128).collect()) as i64
    }

    /// Adjugate, so that `M * adj(M) = det(M) * I`.
    pub fn adjugate(&self) -> IntMatrix {
        let n = self.n;
        if n == 1 {
            return IntMatrix { n, data: vec![1] };
        }
        let mut adj = IntMatrix { n, data: vec![0; n * n] };
        for i in 0..n {
            for j in 0..n {
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for r in (0..n).filter(|&r| r != i) {
                    for c in (0..n).filter(|&c| c != j) {
                        minor.push(self.get(r, c) as i128);
                    }
                }
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                // cofactor (i, j) lands at (j, i)
                adj.set(j, i, (sign * det_i128(n - 1, minor)) as i64);
            }
        }
        adj
    }

    /// Lower-triangular column Hermite normal form `H = M U` with `U`
    /// unimodular: positive diagonal, `0 <= H[i][j] < H[i][i]` for `j < i`.
    /// The columns of `H` generate the same lattice as the columns of `M`.
    pub fn column_hnf(&self) -> IntMatrix {
        let n = self.n;
        let mut h: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        let at = |i: usize, j: usize| i * n + j;
        let col_op = |h: &mut Vec<i128>, dst: usize, src: usize, k: i128| {
            for r in 0..n {
                h[at(r, dst)] -= k * h[at(r, src)];
            }
        };
        for i in 0..n {
            // Euclid on row i across columns i..n until only column i is nonzero.
            loop {
                let pivot = (i..n)
                    .filter(|&j| h[at(i, j)] != 0)
                    .min_by_key(|&j| h[at(i, j)].abs());
                let Some(p) = pivot else { break };
                if p != i {
                    for r in 0..n {
                        h.swap(at(r, i), at(r, p));
                    }
                }
                let mut done = true;
                for j in i + 1..n {
                    let q = h[at(i, j)].div_euclid(h[at(i, i)]);
                    col_op(&mut h, j, i, q);
                    if h[at(i, j)] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h[at(i, i)] < 0 {
                for r in 0..n {
                    h[at(r, i)] = -h[at(r, i)];
                }
            }
            if h[at(i, i)] != 0 {
                for j in 0..i {
                    let q = h[at(i, j)].div_euclid(h[at(i, i)]);
                    col_op(&mut h, j, i, q);
                }
            }
        }
        IntMatrix { n, data: h.into_iter().map(|v| v as i64).collect() }
    }
}

fn det_i128(n: usize, mut a: Vec<i128>) -> i128 {
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return 0;
            };
            for c in 0..n {
                a.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
            }
        }
        prev = a[k * n + k];
    }
    sign * a[n * n - 1]
}

/// `floor(a / b)` for `b > 0`.
pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}
