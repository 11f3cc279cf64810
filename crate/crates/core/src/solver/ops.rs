//! Stencil kernels on `(n1p × n2 × n3)` grids of `N`-component vectors stored point-major
//! (`data[p·N + c]`, `p = (i1·n2 + i2)·n3 + i3`).
//!
//! `D₁` is the second-order summation-by-parts operator with first-order one-sided closures
//! and norm `h·diag(½, 1, …, 1, ½)`; `D₂`, `D₃` are periodic central differences.

use rayon::prelude::*;

use crate::linalg::SMat;
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dims<T> {
    pub n1p: usize,
    pub n2: usize,
    pub n3: usize,
    pub h: [T; 3],
}

impl<T: Real> Dims<T> {
    pub fn len(&self) -> usize {
        self.n1p * self.n2 * self.n3
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn plane(&self) -> usize {
        self.n2 * self.n3
    }

    /// SBP norm weight of row `i1` times the tangential cell area.
    pub fn weight(&self, i1: usize) -> T {
        let w = if i1 == 0 || i1 + 1 == self.n1p { lit(0.5) } else { T::one() };
        w * self.h[0] * self.h[1] * self.h[2]
    }
}

/// `(D_j f)` at one point for every component; `j = 0` uses the SBP closure.
#[inline]
fn derivative_at<T: Real, const N: usize>(f: &[T], d: &Dims<T>, i1: usize, i2: usize, i3: usize, j: usize) -> [T; N] {
    let (n2, n3) = (d.n2, d.n3);
    let at = |a: usize, b: usize, c: usize| ((a * n2 + b) * n3 + c) * N;
    let (lo, hi, scale) = match j {
        0 => {
            if i1 == 0 {
                (at(0, i2, i3), at(1, i2, i3), d.h[0].recip())
            } else if i1 + 1 == d.n1p {
                (at(i1 - 1, i2, i3), at(i1, i2, i3), d.h[0].recip())
            } else {
                (at(i1 - 1, i2, i3), at(i1 + 1, i2, i3), (d.h[0] + d.h[0]).recip())
            }
        }
        1 => (
            at(i1, (i2 + n2 - 1) % n2, i3),
            at(i1, (i2 + 1) % n2, i3),
            (d.h[1] + d.h[1]).recip(),
        ),
        _ => (
            at(i1, i2, (i3 + n3 - 1) % n3),
            at(i1, i2, (i3 + 1) % n3),
            (d.h[2] + d.h[2]).recip(),
        ),
    };
    let mut out = [T::zero(); N];
    for c in 0..N {
        out[c] = (f[hi + c] - f[lo + c]) * scale;
    }
    out
}

/// Nonzero entries `(row, col, value)` of the three transport coefficients. The matrices are
/// sparse (about a quarter of the entries are nonzero), which dominates the cost of a step.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseCoef<T> {
    pub terms: [Vec<(usize, usize, T)>; 3],
}

impl<T: Real> SparseCoef<T> {
    pub fn from_dense<const N: usize>(coef: &[SMat<T, N>; 3]) -> Self {
        let pick = |c: &SMat<T, N>| {
            let mut v = Vec::new();
            for r in 0..N {
                for k in 0..N {
                    if c.0[r][k] != T::zero() {
                        v.push((r, k, c.0[r][k]));
                    }
                }
            }
            v
        };
        SparseCoef {
            terms: [pick(&coef[0]), pick(&coef[1]), pick(&coef[2])],
        }
    }
}

/// `out = −Σ_j C_j D_j f`, one `x₁` plane per task.
pub fn transport<T: Real, const N: usize>(f: &[T], d: &Dims<T>, coef: &SparseCoef<T>, out: &mut [T]) {
    assert_eq!(f.len(), d.len() * N);
    assert_eq!(out.len(), f.len());
    out.par_chunks_mut(d.plane() * N).enumerate().for_each(|(i1, plane)| {
        for i2 in 0..d.n2 {
            for i3 in 0..d.n3 {
                let p = (i2 * d.n3 + i3) * N;
                let mut acc = [T::zero(); N];
                for (j, terms) in coef.terms.iter().enumerate() {
                    let dj = derivative_at::<T, N>(f, d, i1, i2, i3, j);
                    for &(r, k, c) in terms {
                        acc[r] -= c * dj[k];
                    }
                }
                plane[p..p + N].copy_from_slice(&acc);
            }
        }
    });
}

/// Discrete divergence of the 3-vector stored at component offset `off` of an `N`-vector field.
pub fn divergence<T: Real, const N: usize>(f: &[T], d: &Dims<T>, off: usize) -> Vec<T> {
    let mut out = vec![T::zero(); d.len()];
    for i1 in 0..d.n1p {
        for i2 in 0..d.n2 {
            for i3 in 0..d.n3 {
                let mut s = T::zero();
                for j in 0..3 {
                    s += derivative_at::<T, N>(f, d, i1, i2, i3, j)[off + j];
                }
                out[(i1 * d.n2 + i2) * d.n3 + i3] = s;
            }
        }
    }
    out
}

/// Periodic central difference of a scalar plane field along `x₂` (`axis = 1`) or `x₃`.
pub fn plane_derivative<T: Real>(f: &[T], n2: usize, n3: usize, h: T, axis: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n2 * n3];
    let s = (h + h).recip();
    for i2 in 0..n2 {
        for i3 in 0..n3 {
            let (a, b) = if axis == 1 {
                (((i2 + 1) % n2) * n3 + i3, ((i2 + n2 - 1) % n2) * n3 + i3)
            } else {
                (i2 * n3 + (i3 + 1) % n3, i2 * n3 + (i3 + n3 - 1) % n3)
            };
            out[i2 * n3 + i3] = (f[a] - f[b]) * s;
        }
    }
    out
}

/// One component of a vector field as a scalar field.
pub fn component<T: Real>(f: &[T], n: usize, c: usize) -> Vec<T> {
    f.iter().skip(c).step_by(n).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `⟨f, D₁g⟩_H + ⟨D₁f, g⟩_H = f_N g_N − f_0 g_0` along `x₁`.
    #[test]
    fn summation_by_parts() {
        let d = Dims {
            n1p: 9,
            n2: 1,
            n3: 1,
            h: [0.3_f64, 1.0, 1.0],
        };
        let f: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let g: Vec<f64> = (0..9).map(|i| (i as f64 * 0.4).cos() + 0.1 * i as f64).collect();
        let id = SparseCoef::from_dense(&[SMat::<f64, 1>::identity(), SMat::zeros(), SMat::zeros()]);
        let (mut df, mut dg) = (vec![0.0; 9], vec![0.0; 9]);
        transport::<f64, 1>(&f, &d, &id, &mut df);
        transport::<f64, 1>(&g, &d, &id, &mut dg);
        let lhs: f64 = (0..9).map(|i| -d.weight(i) * (f[i] * dg[i] + df[i] * g[i])).sum();
        assert!((lhs - (f[8] * g[8] - f[0] * g[0])).abs() < 1e-13);
    }
}
