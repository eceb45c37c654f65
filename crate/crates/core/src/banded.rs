//! Banded LU factorization with partial pivoting.
//!
//! Row `i` of an `n x n` matrix with `kl` sub- and `ku` super-diagonals is
//! stored in a window of `2*kl + ku + 1` columns starting at column `i - kl`;
//! the extra `kl` columns on the right absorb fill-in from row interchanges.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Factorization failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularPivot {
    /// Column where no usable pivot was found.
    pub column: usize,
}

impl fmt::Display for SingularPivot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "banded matrix is singular at column {}", self.column)
    }
}

impl core::error::Error for SingularPivot {}

/// Square banded matrix, factorized in place by [`BandedMatrix::factorize`].
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
    factored: bool,
}

impl BandedMatrix {
    /// Zero matrix of order `n` with bandwidths `kl`, `ku`.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            pivots: vec![0; n],
            factored: false,
        }
    }

    /// Order of the matrix.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Reset every entry to zero, keeping the allocation.
    pub fn clear(&mut self) {
        self.data.iter_mut().for_each(|x| *x = 0.0);
        self.factored = false;
    }

    #[inline(always)]
    fn slot(&self, i: usize, j: usize) -> usize {
        // column j sits at window offset j + kl - i
        i * self.width + (j + self.kl - i)
    }

    /// Add `value` to entry `(i, j)`. Panics outside the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku && i < self.n && j < self.n,
            "entry ({i}, {j}) outside band"
        );
        let s = self.slot(i, j);
        self.data[s] += value;
    }

    /// Entry `(i, j)` before factorization; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku || i >= self.n || j >= self.n {
            return 0.0;
        }
        self.data[self.slot(i, j)]
    }

    /// `y = A x` (only valid before factorization).
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }

    /// In-place LU with partial pivoting.
    pub fn factorize(&mut self) -> Result<(), SingularPivot> {
        let (n, kl) = (self.n, self.kl);
        let reach = kl + self.ku;
        for j in 0..n {
            let last_row = (j + kl).min(n - 1);
            let mut piv = j;
            let mut best = self.data[self.slot(j, j)].abs();
            for r in j + 1..=last_row {
                let a = self.data[self.slot(r, j)].abs();
                if a > best {
                    best = a;
                    piv = r;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(SingularPivot { column: j });
            }
            self.pivots[j] = piv;
            let last_col = (j + reach).min(n - 1);
            if piv != j {
                for c in j..=last_col {
                    let (a, b) = (self.slot(j, c), self.slot(piv, c));
                    self.data.swap(a, b);
                }
            }
            let diag = self.data[self.slot(j, j)];
            for r in j + 1..=last_row {
                let sr = self.slot(r, j);
                let factor = self.data[sr] / diag;
                if factor == 0.0 {
                    continue;
                }
                self.data[sr] = factor;
                for c in j + 1..=last_col {
                    let src = self.data[self.slot(j, c)];
                    let dst = self.slot(r, c);
                    self.data[dst] -= factor * src;
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solve `A x = b` in place using the stored factors.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert!(self.factored, "factorize before solving");
        assert_eq!(b.len(), self.n);
        let (n, kl) = (self.n, self.kl);
        let reach = kl + self.ku;
        for j in 0..n {
            let piv = self.pivots[j];
            if piv != j {
                b.swap(j, piv);
            }
            let bj = b[j];
            if bj != 0.0 {
                for r in j + 1..=(j + kl).min(n - 1) {
                    b[r] -= self.data[self.slot(r, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let mut acc = b[j];
            for c in j + 1..=(j + reach).min(n - 1) {
                acc -= self.data[self.slot(j, c)] * b[c];
            }
            b[j] = acc / self.data[self.slot(j, j)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for j in 0..n {
            let p = (j..n).max_by(|&x, &y| a[x][j].abs().total_cmp(&a[y][j].abs())).unwrap();
            a.swap(j, p);
            b.swap(j, p);
            for r in j + 1..n {
                let f = a[r][j] / a[j][j];
                for c in j..n {
                    a[r][c] -= f * a[j][c];
                }
                b[r] -= f * b[j];
            }
        }
        let mut x = vec![0.0; n];
        for j in (0..n).rev() {
            let s: f64 = (j + 1..n).map(|c| a[j][c] * x[c]).sum();
            x[j] = (b[j] - s) / a[j][j];
        }
        x
    }

    #[test]
    fn matches_dense_elimination_with_pivoting() {
        let (n, kl, ku) = (17, 3, 2);
        let mut m = BandedMatrix::zeros(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        let mut seed = 12345u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // small diagonal forces row interchanges
                let v = if i == j { 0.01 * rnd() } else { rnd() };
                m.add(i, j, v);
                dense[i][j] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let expected = dense_solve(dense, b.clone());
        let before = m.clone();
        m.factorize().unwrap();
        let mut x = b.clone();
        m.solve_in_place(&mut x);
        for (a, e) in x.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-9 * (1.0 + e.abs()), "{a} vs {e}");
        }
        let back = before.mul_vec(&x);
        for (r, bi) in back.iter().zip(&b) {
            assert!((r - bi).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut m = BandedMatrix::zeros(4, 1, 1);
        m.add(0, 0, 1.0);
        m.add(1, 1, 1.0);
        m.add(3, 3, 1.0);
        assert_eq!(m.factorize(), Err(SingularPivot { column: 2 }));
    }
}
