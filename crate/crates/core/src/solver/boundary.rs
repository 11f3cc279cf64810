//! Interface algebra: the boundary quadratic form, the homogeneous boundary rows, the
//! energy-neutral interface penalty and characteristic splits for far-field outflow.
//!
//! The interface vector is `z = (𝒰, W) ∈ ℝ¹⁴` with `𝒰 = (q, u, h, S)` and `W = (𝕳, 𝕰)`.

use crate::basic_state::BasicStatePoint;
use crate::eos::EosParams;
use crate::error::Result;
use crate::linalg::{DMat, SMat};
use crate::plasma::{build_cal_a, build_eta, constant_e};
use crate::scalar::{lit, Real};
use crate::vacuum::{build_m, choose_ehat, choose_nu, RegularizationParams};

/// Boundary coefficient `−(𝒜₁ + ℰ₁₂)` of the plasma side, negated so that
/// `𝒜^ε = ½ zᵀ diag(−(𝒜₁+ℰ₁₂), M₁) z`.
pub fn interface_matrix<T: Real>(
    p: &BasicStatePoint<T>,
    params: &RegularizationParams<T>,
    eos: &EosParams<T>,
) -> Result<DMat<T>> {
    let a1 = build_cal_a(1, p, eos)?.entries + constant_e(2).entries;
    let m1 = build_m(1, params, &p.geometry)?.entries;
    let mut s = DMat::zeros(14, 14);
    for i in 0..8 {
        for j in 0..8 {
            s[(i, j)] = -a1.0[i][j];
        }
    }
    for i in 0..6 {
        for j in 0..6 {
            s[(8 + i, 8 + j)] = m1.0[i][j];
        }
    }
    Ok(s)
}

/// Matrix form `𝒜^ε = −½((𝒜₁+ℰ₁₂)𝒰, 𝒰) + ½(M₁W, W)`.
pub fn boundary_quadratic_form<T: Real>(
    u: &[T; 8],
    w: &[T; 6],
    p: &BasicStatePoint<T>,
    params: &RegularizationParams<T>,
    eos: &EosParams<T>,
) -> Result<T> {
    let a1 = build_cal_a(1, p, eos)?.entries + constant_e(2).entries;
    let m1 = build_m(1, params, &p.geometry)?.entries;
    Ok(lit::<T>(0.5) * (m1.quad(w) - a1.quad(u)))
}

/// `(𝓗_N, E_N)` of a curved vacuum vector at a boundary point, where `∂₁Φ̂₁ = 1`.
fn normal_parts<T: Real>(w: &[T; 6], p: &BasicStatePoint<T>) -> (T, T) {
    let eta = build_eta(&p.geometry);
    let e = eta * eta.transpose();
    let d = p.geometry.d1phi1;
    let hn = (e.0[0][0] * w[0] + e.0[0][1] * w[1] + e.0[0][2] * w[2]) / d;
    let en = (e.0[0][0] * w[3] + e.0[0][1] * w[4] + e.0[0][2] * w[5]) / d;
    (hn, en)
}

/// Expanded scalar form `−q u₁ + ε⁻¹(𝕳₃𝕰₂ − 𝕳₂𝕰₃) + (v̂₂𝕳₂ + v̂₃𝕳₃)𝓗_N + (v̂₂𝕰₂ + v̂₃𝕰₃)E_N`,
/// valid for the choice `ν₁ = v̂₂∂₂φ̂ + v̂₃∂₃φ̂`, `ν_k = v̂_k`.
pub fn boundary_quadratic_form_expanded<T: Real>(
    u: &[T; 8],
    w: &[T; 6],
    p: &BasicStatePoint<T>,
    epsilon: T,
) -> T {
    let v = p.uhat.v;
    let (hn, en) = normal_parts(w, p);
    -u[0] * u[1]
        + (w[2] * w[4] - w[1] * w[5]) / epsilon
        + (v[1] * w[1] + v[2] * w[2]) * hn
        + (v[1] * w[4] + v[2] * w[5]) * en
}

/// Rows of the reformulated boundary conditions as `G z + b φ = 0` with `G ∈ ℝ^{3×14}`.
pub fn boundary_rows<T: Real>(p: &BasicStatePoint<T>, epsilon: T) -> (DMat<T>, [T; 3]) {
    let eta = build_eta(&p.geometry);
    let e = eta * eta.transpose();
    let d = p.geometry.d1phi1;
    let ehat = choose_ehat(p);
    let hc = p.hcal;
    let fh = p.frak_h;
    let v = p.uhat.v;
    let mut g = DMat::zeros(3, 14);
    // q − 𝔥̂₂𝕳₂ − 𝔥̂₃𝕳₃ + εÊ₁E_N + [∂₁q̂]φ
    g[(0, 0)] = T::one();
    g[(0, 9)] = -fh[1];
    g[(0, 10)] = -fh[2];
    for k in 0..3 {
        g[(0, 11 + k)] = epsilon * ehat.e1 * e.0[0][k] / d;
    }
    // 𝕰₂ − ε𝓗̂₃u₁ + εv̂₃𝓗_N + εa₁φ
    g[(1, 12)] = T::one();
    g[(1, 1)] = -epsilon * hc[2];
    // 𝕰₃ + ε𝓗̂₂u₁ − εv̂₂𝓗_N + εa₂φ
    g[(2, 13)] = T::one();
    g[(2, 1)] = epsilon * hc[1];
    for k in 0..3 {
        let n = e.0[0][k] / d;
        g[(1, 8 + k)] = epsilon * v[2] * n;
        g[(2, 8 + k)] = -epsilon * v[1] * n;
    }
    (g, [p.jump_d1_q, epsilon * p.a1, epsilon * p.a2])
}

/// Regularization parameters with `ν` chosen from the basic state.
pub fn boundary_params<T: Real>(p: &BasicStatePoint<T>, epsilon: T) -> RegularizationParams<T> {
    RegularizationParams::new(epsilon, choose_nu(p))
}

/// `R = Gᵀ(GGᵀ)⁻¹`, a right inverse of `G`.
pub fn right_inverse<T: Real>(g: &DMat<T>) -> DMat<T> {
    let gt = g.transpose();
    let ggt = g.matmul(&gt);
    gt.matmul(&ggt.inverse().expect("boundary rows must be independent"))
}

/// Projection of `z` onto the homogeneous solution set `G z = 0`.
pub fn project_onto_kernel<T: Real>(g: &DMat<T>, z: &[T]) -> Vec<T> {
    let r = right_inverse(g);
    let gz = g.matvec(z);
    let corr = r.matvec(&gz);
    z.iter().zip(&corr).map(|(a, b)| *a - *b).collect()
}

/// Penalty `X ∈ ℝ^{14×3}` such that, for the boundary energy flux `−½zᵀSz`
/// (`S = diag(A′₁, −M₁)` oriented as the semi-discrete energy sees it), the identity
/// `zᵀ(½S + XG)z = −α|Gz|²` holds whenever `S` vanishes on `ker G`.
pub fn interface_penalty<T: Real>(g: &DMat<T>, s: &DMat<T>, alpha: T) -> DMat<T> {
    let n = g.cols;
    let r = right_inverse(g);
    let pi = r.matmul(g);
    let i_minus_pi_t = DMat::identity(n).sub(&pi).transpose();
    let sr = s.matmul(&r);
    let rt_s_r = r.transpose().matmul(&sr);
    let gt = g.transpose();
    i_minus_pi_t
        .matmul(&sr)
        .add(&gt.matmul(&rt_s_r).scale(lit(0.5)))
        .add(&gt.scale(alpha))
        .scale(-T::one())
}

/// Variant of [`interface_penalty`] whose plasma part has a vanishing `q` row, so that after
/// multiplication by `𝒜₀⁻¹` it never touches `h` (`𝒜₀⁻¹e_q` carries a component along `Ĥ`) and
/// the boundary row keeps the discrete `div h` of the interior scheme.
///
/// Row 0 of `G` is the only row with a `q` entry, so that residual is coupled energy-neutrally
/// and `zᵀ(½S + XG)z = −α(g₁² + g₂²)`.
pub fn interface_penalty_velocity<T: Real>(g: &DMat<T>, s: &DMat<T>, alpha: T) -> DMat<T> {
    let n = g.cols;
    let r = right_inverse(g);
    let pi = r.matmul(g);
    let x0 = DMat::identity(n).sub(&pi).transpose().matmul(&s.matmul(&r)).scale(-T::one());
    let q = r.transpose().matmul(&s.matmul(&r));
    let mut y = DMat::zeros(3, 3);
    for j in 0..3 {
        y[(0, j)] = -x0[(0, j)];
    }
    debug_assert!((y[(0, 0)] + lit::<T>(0.5) * q[(0, 0)]).abs() <= lit::<T>(1e-10) * (T::one() + q.max_abs()));
    for j in 1..3 {
        y[(j, 0)] = -q[(0, j)] - y[(0, j)];
        for i in 1..3 {
            y[(i, j)] = -lit::<T>(0.5) * q[(i, j)] - if i == j { alpha } else { T::zero() };
        }
    }
    x0.add(&g.transpose().matmul(&y))
}

/// Generalized split `A = A₊ + A₋` relative to `A₀ > 0`, with `A₀⁻¹A₊` carrying the positive
/// and `A₀⁻¹A₋` the negative characteristic speeds. Also returns the speeds.
pub fn characteristic_split<T: Real, const N: usize>(a0: &SMat<T, N>, a: &SMat<T, N>) -> (Vec<T>, SMat<T, N>, SMat<T, N>) {
    let a0d = a0.to_dmat();
    let half = a0d.sym_map(|l| l.sqrt());
    let ihalf = a0d.sym_map(|l| l.sqrt().recip());
    let b = ihalf.matmul(&a.to_dmat()).matmul(&ihalf).sym_part();
    let plus = half.matmul(&b.sym_map(|l| l.max(T::zero()))).matmul(&half).sym_part();
    let minus = half.matmul(&b.sym_map(|l| l.min(T::zero()))).matmul(&half).sym_part();
    let (speeds, _) = b.sym_eigen();
    let to_s = |m: &DMat<T>| {
        let mut s = SMat::<T, N>::zeros();
        for i in 0..N {
            for j in 0..N {
                s.0[i][j] = m[(i, j)];
            }
        }
        s
    };
    (speeds, to_s(&plus), to_s(&minus))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penalty_identity_on_toy_system() {
        // 2-d toy: S = [[0,1],[1,0]], G = [1, 0] so S vanishes on ker G = span(e₂).
        let s = DMat::from_vec(2, 2, vec![0.0_f64, 1.0, 1.0, 0.0]);
        let g = DMat::from_vec(1, 2, vec![1.0_f64, 0.0]);
        let x = interface_penalty(&g, &s, 0.7);
        let xg = x.matmul(&g);
        for z in [[1.0, 2.0], [-0.3, 0.5], [2.0, -1.0]] {
            let q = 0.5 * (z[0] * (s[(0, 0)] * z[0] + s[(0, 1)] * z[1]) + z[1] * (s[(1, 0)] * z[0] + s[(1, 1)] * z[1]))
                + z[0] * (xg[(0, 0)] * z[0] + xg[(0, 1)] * z[1])
                + z[1] * (xg[(1, 0)] * z[0] + xg[(1, 1)] * z[1]);
            assert!((q + 0.7 * z[0] * z[0]).abs() < 1e-14);
        }
    }
}
