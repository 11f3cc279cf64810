//! Discrete γ-weighted Sobolev norms on periodic boxes, conormal norms on half-space
//! grids, and the space-time `H^s_γ` norm of boundary traces.
//!
//! Every function returns the **squared** norm.

use num_complex::Complex;

use crate::error::{MhdError, Result};
use crate::lifting::smoothstep;
use crate::scalar::{lit, Real};
use crate::spectral::{fft_nd, to_complex, wavenumbers};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormFlavor {
    SobolevWeighted,
    Conormal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec<T> {
    pub gamma: T,
    pub order: T,
    pub flavor: NormFlavor,
}

impl<T: Real> NormSpec<T> {
    pub fn new(gamma: T, order: T, flavor: NormFlavor) -> Result<Self> {
        if !(gamma >= T::one()) {
            return Err(MhdError::Config {
                key: "reg.gamma".into(),
                reason: format!("gamma must be at least 1, got {gamma}"),
            });
        }
        if flavor == NormFlavor::Conormal && (order < T::zero() || order.fract() != T::zero()) {
            return Err(MhdError::Config {
                key: "norm.order".into(),
                reason: "conormal order must be a nonnegative integer".into(),
            });
        }
        Ok(NormSpec { gamma, order, flavor })
    }
}

/// Row-major periodic box, last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicGrid<T> {
    pub dims: Vec<usize>,
    pub lengths: Vec<T>,
}

impl<T: Real> PeriodicGrid<T> {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> T {
        self.dims
            .iter()
            .zip(&self.lengths)
            .fold(T::one(), |acc, (&n, &l)| acc * l / T::from_usize_lossy(n))
    }

    /// `|ξ|²` for every mode, in FFT order.
    fn xi_squared(&self) -> Vec<T> {
        let ks: Vec<Vec<T>> = self.dims.iter().zip(&self.lengths).map(|(&n, &l)| wavenumbers(n, l)).collect();
        let mut out = vec![T::zero(); self.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let mut rem = flat;
            for ax in (0..self.dims.len()).rev() {
                let i = rem % self.dims[ax];
                rem /= self.dims[ax];
                *o += ks[ax][i] * ks[ax][i];
            }
        }
        out
    }
}

fn multiplier_norm_sq<T: Real>(u: &[T], grid: &PeriodicGrid<T>, weight: impl Fn(T) -> T) -> T {
    assert_eq!(u.len(), grid.len(), "field does not match grid");
    let mut c = to_complex(u);
    fft_nd(&mut c, &grid.dims, false);
    let xi2 = grid.xi_squared();
    let sum: T = c.iter().zip(&xi2).map(|(v, &x)| weight(x) * v.norm_sqr()).sum();
    sum * grid.cell_volume() / T::from_usize_lossy(grid.len())
}

/// `‖u‖²_{H^s_γ} = Σ_ξ (γ² + |ξ|²)^s |û(ξ)|²` with Parseval normalization (so `s = 0` gives
/// the discrete `L²` norm).
pub fn weighted_sobolev_norm_sq<T: Real>(u: &[T], grid: &PeriodicGrid<T>, spec: &NormSpec<T>) -> T {
    let g2 = spec.gamma * spec.gamma;
    multiplier_norm_sq(u, grid, |x| (g2 + x).powf(spec.order))
}

/// `Σ_{|α|≤s} γ^{2(s−|α|)} ‖∂^α u‖²` with spectral derivatives, over distinct multi-indices.
pub fn derivative_sum_norm_sq<T: Real>(u: &[T], grid: &PeriodicGrid<T>, gamma: T, s: usize) -> T {
    let nd = grid.dims.len();
    let ks: Vec<Vec<T>> = grid.dims.iter().zip(&grid.lengths).map(|(&n, &l)| wavenumbers(n, l)).collect();
    let mut c = to_complex(u);
    fft_nd(&mut c, &grid.dims, false);
    let g2 = gamma * gamma;
    let mut total = T::zero();
    for (flat, v) in c.iter().enumerate() {
        let mut xi = vec![T::zero(); nd];
        let mut rem = flat;
        for ax in (0..nd).rev() {
            xi[ax] = ks[ax][rem % grid.dims[ax]];
            rem /= grid.dims[ax];
        }
        // Σ over multi-indices of total order k of Π ξ_i^{2α_i}: the complete homogeneous
        // symmetric polynomial in ξ_i², built by the standard recurrence.
        let sq: Vec<T> = xi.iter().map(|x| *x * *x).collect();
        let mut h = vec![T::zero(); s + 1];
        h[0] = T::one();
        for x in &sq {
            for k in 1..=s {
                h[k] = h[k] + *x * h[k - 1];
            }
        }
        let mut w = T::zero();
        for (k, hk) in h.iter().enumerate() {
            w += g2.powi((s - k) as i32) * *hk;
        }
        total += w * v.norm_sqr();
    }
    total * grid.cell_volume() / T::from_usize_lossy(grid.len())
}

/// `σ(x₁)`: equal to `x₁` near the wall, to 1 far from it, smooth and nondecreasing.
#[derive(Clone, Debug)]
pub struct ConormalWeight<T> {
    pub sigma: Vec<T>,
    pub x_star: T,
}

/// Transition point used on a half-line of depth `l1`.
pub fn transition_point<T: Real>(l1: T) -> T {
    (l1 / lit(4.0)).max(lit(0.8)).min(lit(1.6))
}

/// `σ(x) = x` for `x ≤ x*/2`; beyond, `σ′ = 1 − S((x − x*/2)/w)` with `w = 2 − x*`, so `σ`
/// reaches 1 at `x = 2 − x*/2 ≤ 2x*` and stays there.
pub fn sigma<T: Real>(x: T, x_star: T) -> T {
    let half = x_star / lit(2.0);
    let ax = x.abs();
    if ax <= half {
        return ax;
    }
    let w = lit::<T>(2.0) - x_star;
    let len = (ax - half).min(w);
    let n = 200usize;
    let h = len / T::from_usize_lossy(n);
    let f = |tau: T| T::one() - smoothstep(tau / w);
    let mut s = f(T::zero()) + f(len);
    for k in 1..n {
        let c: T = if k % 2 == 1 { lit(4.0) } else { lit(2.0) };
        s += c * f(h * T::from_usize_lossy(k));
    }
    (half + s * h / lit(3.0)).min(T::one())
}

pub fn make_conormal_weight<T: Real>(x1: &[T], l1: T) -> ConormalWeight<T> {
    let x_star = transition_point(l1);
    ConormalWeight {
        sigma: x1.iter().map(|&x| sigma(x, x_star)).collect(),
        x_star,
    }
}

/// Half-space box `x₁ = i·h₁` (`i < n1`) times a periodic `x′` torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpaceGrid<T> {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub h1: T,
    pub l2: T,
    pub l3: T,
}

impl<T: Real> HalfSpaceGrid<T> {
    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h2(&self) -> T {
        self.l2 / T::from_usize_lossy(self.n2)
    }

    pub fn h3(&self) -> T {
        self.l3 / T::from_usize_lossy(self.n3)
    }

    pub fn x1(&self) -> Vec<T> {
        (0..self.n1).map(|i| T::from_usize_lossy(i) * self.h1).collect()
    }

    /// Trapezoid weight in `x₁` times the tangential cell area.
    pub fn weight(&self, i1: usize) -> T {
        let w = if i1 == 0 || i1 + 1 == self.n1 { lit(0.5) } else { T::one() };
        w * self.h1 * self.h2() * self.h3()
    }

    /// Second-order difference along `axis` (0 = `x₁` with one-sided ends, 1, 2 periodic).
    pub fn derivative(&self, u: &[T], axis: usize) -> Vec<T> {
        let (n1, n2, n3) = (self.n1, self.n2, self.n3);
        let idx = |a: usize, b: usize, c: usize| (a * n2 + b) * n3 + c;
        let two = lit::<T>(2.0);
        let mut out = vec![T::zero(); u.len()];
        for a in 0..n1 {
            for b in 0..n2 {
                for c in 0..n3 {
                    out[idx(a, b, c)] = match axis {
                        0 => {
                            let h = self.h1;
                            if a == 0 {
                                (-lit::<T>(3.0) * u[idx(0, b, c)] + lit::<T>(4.0) * u[idx(1, b, c)] - u[idx(2, b, c)])
                                    / (two * h)
                            } else if a + 1 == n1 {
                                (lit::<T>(3.0) * u[idx(a, b, c)] - lit::<T>(4.0) * u[idx(a - 1, b, c)]
                                    + u[idx(a - 2, b, c)])
                                    / (two * h)
                            } else {
                                (u[idx(a + 1, b, c)] - u[idx(a - 1, b, c)]) / (two * h)
                            }
                        }
                        1 => (u[idx(a, (b + 1) % n2, c)] - u[idx(a, (b + n2 - 1) % n2, c)]) / (two * self.h2()),
                        _ => (u[idx(a, b, (c + 1) % n3)] - u[idx(a, b, (c + n3 - 1) % n3)]) / (two * self.h3()),
                    };
                }
            }
        }
        out
    }

    pub fn integrate_sq(&self, u: &[T]) -> T {
        let per = self.n2 * self.n3;
        u.iter().enumerate().map(|(i, v)| self.weight(i / per) * *v * *v).sum()
    }
}

/// `Z₁ = σ∂₁`, `Z₂ = ∂₂`, `Z₃ = ∂₃`.
fn apply_z<T: Real>(u: &[T], grid: &HalfSpaceGrid<T>, weight: &ConormalWeight<T>, j: usize) -> Vec<T> {
    let mut d = grid.derivative(u, j);
    if j == 0 {
        let per = grid.n2 * grid.n3;
        for (i, v) in d.iter_mut().enumerate() {
            *v *= weight.sigma[i / per];
        }
    }
    d
}

/// `Σ_{|α|≤m} γ^{2(m−|α|)} ‖Z^α u‖²` on a time slice (no `Z₀ = ∂_t`).
pub fn conormal_norm_sq<T: Real>(
    u: &[T],
    grid: &HalfSpaceGrid<T>,
    spec: &NormSpec<T>,
    weight: &ConormalWeight<T>,
) -> T {
    assert_eq!(u.len(), grid.len(), "field does not match grid");
    let m = spec.order.to_usize().unwrap_or(0);
    let g2 = spec.gamma * spec.gamma;
    let mut total = T::zero();
    for a1 in 0..=m {
        for a2 in 0..=(m - a1) {
            for a3 in 0..=(m - a1 - a2) {
                let mut f = u.to_vec();
                for _ in 0..a1 {
                    f = apply_z(&f, grid, weight, 0);
                }
                for _ in 0..a2 {
                    f = apply_z(&f, grid, weight, 1);
                }
                for _ in 0..a3 {
                    f = apply_z(&f, grid, weight, 2);
                }
                let k = a1 + a2 + a3;
                total += g2.powi((m - k) as i32) * grid.integrate_sq(&f);
            }
        }
    }
    total
}

/// `(∫|u|², ∫|Z₁u|² + |∂₂u|² + |∂₃u|²)`; with `weight = None` the full gradient is used.
pub fn gradient_integrals<T: Real>(
    u: &[T],
    grid: &HalfSpaceGrid<T>,
    weight: Option<&ConormalWeight<T>>,
) -> (T, T) {
    let l2 = grid.integrate_sq(u);
    let mut g = T::zero();
    for j in 0..3 {
        let d = match (j, weight) {
            (0, Some(w)) => apply_z(u, grid, w, 0),
            _ => grid.derivative(u, j),
        };
        g += grid.integrate_sq(&d);
    }
    (l2, g)
}

/// Space-time `‖e^{−γt}f‖²_{H^s_γ}` of a boundary history `f(t_k, x′)`, `t_k = k·dt`, with
/// `f` vanishing in the past. The window `[0, T]` is reflected evenly about `T` and
/// transformed, so no artificial jump is introduced at either end.
pub fn space_time_norm_sq<T: Real>(history: &[T], nt: usize, dt: T, n2: usize, n3: usize, l2: T, l3: T, gamma: T, s: T) -> T {
    assert_eq!(history.len(), nt * n2 * n3, "history does not match shape");
    if nt < 2 {
        return T::zero();
    }
    let per = n2 * n3;
    let np = 2 * nt - 2;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); np * per];
    for k in 0..np {
        let src = if k < nt { k } else { np - k };
        let damp = (-gamma * dt * T::from_usize_lossy(src)).exp();
        for j in 0..per {
            buf[k * per + j] = Complex::new(history[src * per + j] * damp, T::zero());
        }
    }
    let grid = PeriodicGrid {
        dims: vec![np, n2, n3],
        lengths: vec![dt * T::from_usize_lossy(np), l2, l3],
    };
    fft_nd(&mut buf, &grid.dims, false);
    let xi2 = grid.xi_squared();
    let g2 = gamma * gamma;
    let sum: T = buf.iter().zip(&xi2).map(|(v, &x)| (g2 + x).powf(s) * v.norm_sqr()).sum();
    // Half of the reflected window is the physical one.
    sum * grid.cell_volume() / T::from_usize_lossy(grid.len()) / lit(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode() {
        let n = 16;
        let tau = std::f64::consts::TAU;
        let grid = PeriodicGrid {
            dims: vec![n, n],
            lengths: vec![tau, tau],
        };
        let u: Vec<f64> = (0..n * n).map(|i| (tau * (i % n) as f64 / n as f64).cos()).collect();
        let l2 = weighted_sobolev_norm_sq(&u, &grid, &NormSpec::new(1.0, 0.0, NormFlavor::SobolevWeighted).unwrap());
        let h1 = weighted_sobolev_norm_sq(&u, &grid, &NormSpec::new(2.0, 1.0, NormFlavor::SobolevWeighted).unwrap());
        assert!((l2 - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-10);
        assert!((h1 - 5.0 * l2).abs() < 1e-10);
    }

    #[test]
    fn sigma_shape() {
        let xs = transition_point(8.0_f64);
        assert_eq!(xs, 1.6);
        assert_eq!(sigma(0.3, xs), 0.3);
        assert_eq!(sigma(2.0 * xs, xs), 1.0);
        let mut prev = 0.0;
        for i in 0..400 {
            let s = sigma(i as f64 * 0.01, xs);
            assert!(s >= prev - 1e-15);
            prev = s;
        }
    }

    #[test]
    fn gamma_must_be_at_least_one() {
        assert!(NormSpec::new(0.5_f64, 1.0, NormFlavor::Conormal).is_err());
    }
}
