//! Small dense linear algebra: fixed-size matrices for the 8×8 / 6×6 systems and a
//! dynamic matrix for boundary coupling design.
//!
//! Determinants use LU with partial pivoting; symmetric spectra use Householder
//! tridiagonalization followed by implicit QL (the EISPACK tred2/tql2 pair).

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::{lit, Real};

/// Square `N×N` matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMat<T, const N: usize>(pub [[T; N]; N]);

pub type Mat3<T> = SMat<T, 3>;
pub type Mat6<T> = SMat<T, 6>;
pub type Mat8<T> = SMat<T, 8>;

impl<T: Real, const N: usize> SMat<T, N> {
    pub fn zeros() -> Self {
        SMat([[T::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: [[T; N]; N]) -> Self {
        SMat(rows)
    }

    pub fn from_diag(d: [T; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn as_slice(&self) -> &[T] {
        self.0.as_flattened()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x = *x * s);
        m
    }

    pub fn matvec(&self, v: &[T; N]) -> [T; N] {
        let mut out = [T::zero(); N];
        for i in 0..N {
            let mut acc = T::zero();
            for j in 0..N {
                acc += self.0[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `vᵀ M v`.
    pub fn quad(&self, v: &[T; N]) -> T {
        let mv = self.matvec(v);
        (0..N).map(|i| v[i] * mv[i]).sum()
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// `max |M − Mᵀ|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..N {
            for j in (i + 1)..N {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }

    /// Copies the upper triangle onto the lower one.
    pub fn mirror_upper(mut self) -> Self {
        for i in 0..N {
            for j in 0..i {
                self.0[i][j] = self.0[j][i];
            }
        }
        self
    }

    pub fn count_nonzeros(&self) -> usize {
        self.0.iter().flatten().filter(|x| **x != T::zero()).count()
    }

    pub fn det(&self) -> T {
        det_slice(self.as_slice(), N)
    }

    pub fn inverse(&self) -> Option<Self> {
        let inv = inverse_slice(self.as_slice(), N)?;
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = inv[i * N + j];
            }
        }
        Some(m)
    }

    pub fn solve(&self, b: &[T; N]) -> Option<[T; N]> {
        let x = solve_slice(self.as_slice(), N, b)?;
        let mut out = [T::zero(); N];
        out.copy_from_slice(&x);
        Some(out)
    }

    /// Ascending eigenvalues of the symmetric part read from the full matrix.
    pub fn sym_eigenvalues(&self) -> [T; N] {
        let (vals, _) = sym_eigen_slice(self.as_slice(), N, false);
        let mut out = [T::zero(); N];
        out.copy_from_slice(&vals);
        out
    }

    /// Ascending eigenvalues and the matching orthonormal eigenvectors (as columns).
    pub fn sym_eigen(&self) -> ([T; N], Self) {
        let (vals, vecs) = sym_eigen_slice(self.as_slice(), N, true);
        let mut d = [T::zero(); N];
        d.copy_from_slice(&vals);
        let mut v = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                v.0[i][j] = vecs[i * N + j];
            }
        }
        (d, v)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.sym_eigenvalues()[0]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > T::zero()
    }

    pub fn to_dmat(&self) -> DMat<T> {
        DMat::from_vec(N, N, self.as_slice().to_vec())
    }
}

impl<T: Real, const N: usize> Index<(usize, usize)> for SMat<T, N> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T: Real, const N: usize> IndexMut<(usize, usize)> for SMat<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real, const N: usize> Add for SMat<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<T: Real, const N: usize> Sub for SMat<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<T: Real, const N: usize> Neg for SMat<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real, const N: usize> Mul for SMat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Row-major dynamic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> DMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        DMat { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, s: T) -> Self {
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| *x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(-T::one()))
    }

    /// `(M + Mᵀ)/2`.
    pub fn sym_part(&self) -> Self {
        self.add(&self.transpose()).scale(lit(0.5))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        inverse_slice(&self.data, self.rows).map(|d| DMat::from_vec(self.rows, self.cols, d))
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        det_slice(&self.data, self.rows)
    }

    /// Symmetric eigendecomposition; eigenvectors are the columns of the returned matrix.
    pub fn sym_eigen(&self) -> (Vec<T>, Self) {
        assert_eq!(self.rows, self.cols);
        let (vals, vecs) = sym_eigen_slice(&self.data, self.rows, true);
        (vals, DMat::from_vec(self.rows, self.rows, vecs))
    }

    /// Applies `f` to the eigenvalues of a symmetric matrix.
    pub fn sym_map(&self, f: impl Fn(T) -> T) -> Self {
        let (vals, v) = self.sym_eigen();
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for (k, &lam) in vals.iter().enumerate() {
            let fl = f(lam);
            if fl == T::zero() {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[(i, k)] * fl * v[(j, k)];
                }
            }
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }
}

impl<T> Index<(usize, usize)> for DMat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// In-place LU factorization with partial pivoting. Returns the permutation parity,
/// or `None` if a pivot is exactly zero.
fn lu_in_place<T: Real>(a: &mut [T], n: usize, perm: &mut [usize]) -> Option<T> {
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    let mut sign = T::one();
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == T::zero() {
            return None;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let d = a[k * n + k];
        for i in (k + 1)..n {
            let l = a[i * n + k] / d;
            a[i * n + k] = l;
            if l == T::zero() {
                continue;
            }
            for j in (k + 1)..n {
                let u = a[k * n + j];
                a[i * n + j] -= l * u;
            }
        }
    }
    Some(sign)
}

pub fn det_slice<T: Real>(a: &[T], n: usize) -> T {
    let mut lu = a.to_vec();
    let mut perm = vec![0; n];
    match lu_in_place(&mut lu, n, &mut perm) {
        None => T::zero(),
        Some(sign) => (0..n).fold(sign, |acc, i| acc * lu[i * n + i]),
    }
}

fn lu_solve_factored<T: Real>(lu: &[T], n: usize, perm: &[usize], b: &[T]) -> Vec<T> {
    let mut x: Vec<T> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for k in 0..i {
            let l = lu[i * n + k];
            let xk = x[k];
            x[i] -= l * xk;
        }
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let u = lu[i * n + k];
            let xk = x[k];
            x[i] -= u * xk;
        }
        x[i] /= lu[i * n + i];
    }
    x
}

pub fn solve_slice<T: Real>(a: &[T], n: usize, b: &[T]) -> Option<Vec<T>> {
    let mut lu = a.to_vec();
    let mut perm = vec![0; n];
    lu_in_place(&mut lu, n, &mut perm)?;
    Some(lu_solve_factored(&lu, n, &perm, b))
}

pub fn inverse_slice<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut lu = a.to_vec();
    let mut perm = vec![0; n];
    lu_in_place(&mut lu, n, &mut perm)?;
    let mut inv = vec![T::zero(); n * n];
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = T::zero());
        e[j] = T::one();
        let col = lu_solve_factored(&lu, n, &perm, &e);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    Some(inv)
}

/// Eigen-decomposition of the symmetric `n×n` matrix `a` (row-major). Only the lower
/// triangle is read. Eigenvalues ascend; eigenvectors are returned column-wise when
/// requested, otherwise the second slot is empty.
pub fn sym_eigen_slice<T: Real>(a: &[T], n: usize, want_vectors: bool) -> (Vec<T>, Vec<T>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if j <= i { a[i * n + j] } else { a[j * n + i] }).collect())
        .collect();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let vals: Vec<T> = order.iter().map(|&k| d[k]).collect();
    let vecs = if want_vectors {
        let mut out = vec![T::zero(); n * n];
        for (col, &k) in order.iter().enumerate() {
            for i in 0..n {
                out[i * n + col] = v[i][k];
            }
        }
        out
    } else {
        Vec::new()
    };
    (vals, vecs)
}

fn tred2<T: Real>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    d.copy_from_slice(&v[n - 1][..n]);
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = zero;
                v[j][i] = zero;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[k][j] -= upd;
                }
                d[j] = v[i - 1][j];
                v[i][j] = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[k][j] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = zero;
    }
    v[n - 1][n - 1] = T::one();
    e[0] = zero;
}

fn tql2<T: Real>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            for _iter in 0..64 {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (lit::<T>(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        let hk = row[i + 1];
                        row[i + 1] = s * row[i] + c * hk;
                        row[i] = c * row[i] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
}

/// Counts of (negative, zero, positive) eigenvalues with the zero threshold
/// `|λ| < rel_tol · max|λ|`.
pub fn inertia<T: Real>(eigs: &[T], rel_tol: T) -> (usize, usize, usize) {
    let scale = eigs.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let thr = rel_tol * scale;
    let mut neg = 0;
    let mut zer = 0;
    let mut pos = 0;
    for &l in eigs {
        if l.abs() < thr || scale == T::zero() {
            zer += 1;
        } else if l < T::zero() {
            neg += 1;
        } else {
            pos += 1;
        }
    }
    (neg, zer, pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_permuted_diagonal() {
        let m = SMat::<f64, 3>::from_rows([[0.0, 2.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, 4.0]]);
        assert!((m.det() + 24.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_round_trip() {
        let m = SMat::<f64, 3>::from_rows([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]]);
        let p = m * m.inverse().unwrap();
        assert!((p - SMat::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let m = SMat::<f64, 4>::from_rows([
            [2.0, -1.0, 0.0, 0.3],
            [-1.0, 2.0, -1.0, 0.0],
            [0.0, -1.0, 2.0, -1.0],
            [0.3, 0.0, -1.0, 2.0],
        ]);
        let (d, v) = m.sym_eigen();
        let back = v * SMat::from_diag(d) * v.transpose();
        assert!((back - m).max_abs() < 1e-13);
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigen_of_diagonal_and_zero() {
        let z = SMat::<f64, 5>::zeros();
        assert_eq!(z.sym_eigenvalues(), [0.0; 5]);
        let d = SMat::<f64, 3>::from_diag([3.0, -1.0, 2.0]);
        assert_eq!(d.sym_eigenvalues(), [-1.0, 2.0, 3.0]);
    }

    #[test]
    fn dynamic_matches_static() {
        let m = SMat::<f64, 3>::from_rows([[1.0, 2.0, 0.0], [2.0, -1.0, 0.5], [0.0, 0.5, 3.0]]);
        let dm = m.to_dmat();
        assert!((dm.det() - m.det()).abs() < 1e-13);
        let (vals, _) = dm.sym_eigen();
        let svals = m.sym_eigenvalues();
        for i in 0..3 {
            assert!((vals[i] - svals[i]).abs() < 1e-13);
        }
        let pos = dm.sym_map(|l| l.max(0.0));
        let neg = dm.sym_map(|l| l.min(0.0));
        assert!((pos.add(&neg).sub(&dm)).max_abs() < 1e-13);
    }

    #[test]
    fn inertia_thresholds_small_values() {
        assert_eq!(inertia(&[-2.0, 1e-14, 0.0, 3.0], 1e-9), (1, 2, 1));
    }
}
