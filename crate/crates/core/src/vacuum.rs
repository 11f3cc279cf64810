//! Vacuum-side matrices: the Maxwell-type `B_j^ε`, the secondary symmetrizer `𝔅_α^ε`
//! and its curved version `M_α^ε`, plus the boundary choices of `ν` and `Ê`.
//!
//! Unknown ordering is `W = (𝕳₁, 𝕳₂, 𝕳₃, 𝕰₁, 𝕰₂, 𝕰₃)` (curved) or `V = (𝓗, E)` (physical).

use crate::basic_state::BasicStatePoint;
use crate::bundle::{MatrixBundle, MatrixTag};
use crate::error::{MhdError, Result};
use crate::linalg::SMat;
use crate::plasma::{build_eta, InterfaceGeometry};
use crate::scalar::{cross3, dot3, norm3, Real, Vec3};

pub type Mat6<T> = SMat<T, 6>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizationParams<T> {
    pub epsilon: T,
    pub nu: Vec3<T>,
}

impl<T: Real> RegularizationParams<T> {
    pub fn new(epsilon: T, nu: Vec3<T>) -> Self {
        RegularizationParams { epsilon, nu }
    }

    /// `ε|ν| < 1`, the region where `𝔅₀^ε` is positive definite.
    pub fn is_hyperbolic(&self) -> bool {
        self.epsilon * norm3(&self.nu) < T::one()
    }

    fn require_hyperbolic(&self) -> Result<()> {
        if self.epsilon > T::zero() && self.is_hyperbolic() {
            Ok(())
        } else {
            Err(MhdError::HyperbolicityViolated {
                rho: (self.epsilon * norm3(&self.nu)).as_f64(),
                rho_p: self.epsilon.as_f64(),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VacuumField<T> {
    pub frak_h: Vec3<T>,
    pub frak_e: Vec3<T>,
}

impl<T: Real> VacuumField<T> {
    pub fn to_array(&self) -> [T; 6] {
        let (h, e) = (self.frak_h, self.frak_e);
        [h[0], h[1], h[2], e[0], e[1], e[2]]
    }

    pub fn from_array(a: &[T; 6]) -> Self {
        VacuumField {
            frak_h: [a[0], a[1], a[2]],
            frak_e: [a[3], a[4], a[5]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhatCoefficients<T> {
    pub e1: T,
    pub e2: T,
    pub e3: T,
}

impl<T: Real> EhatCoefficients<T> {
    pub fn as_vec(&self) -> Vec3<T> {
        [self.e1, self.e2, self.e3]
    }
}

/// `B_j^ε` for `j ∈ {1, 2, 3}`: the curl operator split by derivative direction, scaled by `1/ε`.
pub fn build_b<T: Real>(j: usize, eps: T) -> MatrixBundle<T, 6> {
    assert!((1..=3).contains(&j), "j must be in 1..=3");
    let e = eps.recip();
    let mut m = Mat6::<T>::zeros();
    // ∂_t𝓗 + ∇×E/ε: row i of curl picks e_{i×j}; the electric rows carry the opposite sign.
    let (a, b) = match j {
        1 => (1, 2),
        2 => (2, 0),
        _ => (0, 1),
    };
    // (∇×E)_a contains −∂_j E_b and (∇×E)_b contains +∂_j E_a.
    m.0[a][3 + b] = -e;
    m.0[b][3 + a] = e;
    m.0[3 + b][a] = -e;
    m.0[3 + a][b] = e;
    let tag = [MatrixTag::B1, MatrixTag::B2, MatrixTag::B3][j - 1];
    MatrixBundle::new(m, tag, true)
}

/// `𝔅_α^ε`, `α = 0..=3`.
pub fn build_frak_b<T: Real>(alpha: usize, params: &RegularizationParams<T>) -> MatrixBundle<T, 6> {
    assert!(alpha <= 3, "alpha must be in 0..=3");
    let [n1, n2, n3] = params.nu;
    let z = T::zero();
    let o = T::one();
    let ie = params.epsilon.recip();
    let rows = match alpha {
        0 => {
            let en = [params.epsilon * n1, params.epsilon * n2, params.epsilon * n3];
            [
                [o, z, z, z, en[2], -en[1]],
                [z, o, z, -en[2], z, en[0]],
                [z, z, o, en[1], -en[0], z],
                [z, -en[2], en[1], o, z, z],
                [en[2], z, -en[0], z, o, z],
                [-en[1], en[0], z, z, z, o],
            ]
        }
        1 => [
            [n1, n2, n3, z, z, z],
            [n2, -n1, z, z, z, -ie],
            [n3, z, -n1, z, ie, z],
            [z, z, z, n1, n2, n3],
            [z, z, ie, n2, -n1, z],
            [z, -ie, z, n3, z, -n1],
        ],
        2 => [
            [-n2, n1, z, z, z, ie],
            [n1, n2, n3, z, z, z],
            [z, n3, -n2, -ie, z, z],
            [z, z, -ie, -n2, n1, z],
            [z, z, z, n1, n2, n3],
            [ie, z, z, z, n3, -n2],
        ],
        _ => [
            [-n3, z, n1, z, -ie, z],
            [z, -n3, n2, ie, z, z],
            [n1, n2, n3, z, z, z],
            [z, ie, z, -n3, z, n1],
            [-ie, z, z, z, -n3, n2],
            [z, z, z, n1, n2, n3],
        ],
    };
    MatrixBundle::new(SMat::from_rows(rows), MatrixTag::frak_b(alpha), true)
}

/// Divergence coefficient columns `R₁ = (ν, 0)` and `R₂ = (0, ν)`.
pub fn build_r<T: Real>(params: &RegularizationParams<T>) -> ([T; 6], [T; 6]) {
    let z = T::zero();
    let [n1, n2, n3] = params.nu;
    ([n1, n2, n3, z, z, z], [z, z, z, n1, n2, n3])
}

/// Closed form `det 𝔅₁^ε = ν₁² (|ν|² − 1/ε²)²`.
pub fn det_frak_b1<T: Real>(params: &RegularizationParams<T>) -> T {
    let nu = params.nu;
    let f = dot3(&nu, &nu) - (params.epsilon * params.epsilon).recip();
    nu[0] * nu[0] * f * f
}

/// Closed form of `det M₁^ε`. At the boundary (`∂₁Φ̂₁ = 1`, `∂_kΨ̂ = ∂_kφ̂`) this is
/// `(1+|∇′φ̂|²)² (ν₁ − ν₂∂₂φ̂ − ν₃∂₃φ̂)² (|ν|² − 1/ε²)²`; in the interior an extra `(∂₁Φ̂₁)⁻⁴`
/// appears.
pub fn det_m1_closed<T: Real>(params: &RegularizationParams<T>, geom: &InterfaceGeometry<T>) -> T {
    let nu = params.nu;
    let (p2, p3) = (geom.dpsi_2, geom.dpsi_3);
    let g = T::one() + p2 * p2 + p3 * p3;
    let nn = nu[0] - nu[1] * p2 - nu[2] * p3;
    let f = dot3(&nu, &nu) - (params.epsilon * params.epsilon).recip();
    let d2 = geom.d1phi1 * geom.d1phi1;
    g * g * nn * nn * f * f / (d2 * d2)
}

/// `K = I₂ ⊗ η̂`.
pub fn build_k<T: Real>(geom: &InterfaceGeometry<T>) -> Mat6<T> {
    let eta = build_eta(geom);
    let mut k = Mat6::<T>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            k.0[i][j] = eta.0[i][j];
            k.0[3 + i][3 + j] = eta.0[i][j];
        }
    }
    k
}

/// `Kᵀ / ∂₁Φ̂₁`, the map from curved `W` to physical `V`.
pub fn k_transpose_over_d<T: Real>(geom: &InterfaceGeometry<T>) -> Mat6<T> {
    build_k(geom).transpose().scale(geom.d1phi1.recip())
}

/// `B₀ = K Kᵀ / ∂₁Φ̂₁`, mapping `W` to `(𝔥, 𝔢)`.
pub fn build_b0<T: Real>(geom: &InterfaceGeometry<T>) -> Mat6<T> {
    let k = build_k(geom);
    (k * k.transpose()).scale(geom.d1phi1.recip()).mirror_upper()
}

/// `𝔅̃₁ = (𝔅₁ − 𝔅₂∂₂Ψ̂ − 𝔅₃∂₃Ψ̂)/∂₁Φ̂₁`.
pub fn build_frak_b1_tilde<T: Real>(params: &RegularizationParams<T>, geom: &InterfaceGeometry<T>) -> Mat6<T> {
    let b1 = build_frak_b(1, params).entries;
    let b2 = build_frak_b(2, params).entries;
    let b3 = build_frak_b(3, params).entries;
    (b1 - b2.scale(geom.dpsi_2) - b3.scale(geom.dpsi_3)).scale(geom.d1phi1.recip())
}

/// `M_α^ε` for `α = 0..=3`.
pub fn build_m<T: Real>(
    alpha: usize,
    params: &RegularizationParams<T>,
    geom: &InterfaceGeometry<T>,
) -> Result<MatrixBundle<T, 6>> {
    assert!(alpha <= 3, "alpha must be in 0..=3; use build_m4 for the zero-order term");
    params.require_hyperbolic()?;
    geom.check()?;
    let inner = if alpha == 1 {
        build_frak_b1_tilde(params, geom)
    } else {
        build_frak_b(alpha, params).entries
    };
    let k = build_k(geom);
    let m = (k * inner * k.transpose()).scale(geom.d1phi1.recip()).mirror_upper();
    Ok(MatrixBundle::new(m, MatrixTag::m(alpha), true))
}

/// Convenience wrapper reading the geometry from a basic-state point.
pub fn build_m_at<T: Real>(
    alpha: usize,
    params: &RegularizationParams<T>,
    basic: &BasicStatePoint<T>,
) -> Result<MatrixBundle<T, 6>> {
    build_m(alpha, params, &basic.geometry)
}

/// Zero-order `M₄^ε = K(𝔅₀∂_t + 𝔅̃₁∂₁ + 𝔅₂∂₂ + 𝔅₃∂₃)(Kᵀ/∂₁Φ̂₁) + K𝔅₀B₄Kᵀ/∂₁Φ̂₁`.
///
/// `dkt[α]` is `∂_α(Kᵀ/∂₁Φ̂₁)` and `b4` is `∂_t B₀`, both supplied by the caller.
pub fn build_m4<T: Real>(
    params: &RegularizationParams<T>,
    geom: &InterfaceGeometry<T>,
    dkt: &[Mat6<T>; 4],
    b4: &Mat6<T>,
) -> Result<MatrixBundle<T, 6>> {
    params.require_hyperbolic()?;
    geom.check()?;
    let b0 = build_frak_b(0, params).entries;
    let inner = b0 * dkt[0]
        + build_frak_b1_tilde(params, geom) * dkt[1]
        + build_frak_b(2, params).entries * dkt[2]
        + build_frak_b(3, params).entries * dkt[3]
        + b0 * *b4 * k_transpose_over_d(geom);
    Ok(MatrixBundle::new(build_k(geom) * inner, MatrixTag::M4, false))
}

/// `ν₁ = v̂₂∂₂φ̂ + v̂₃∂₃φ̂`, `ν₂ = v̂₂`, `ν₃ = v̂₃`; the slopes are read from the point's
/// geometry, which holds `∇′φ̂` at the boundary and `∇′Ψ̂` inside.
pub fn choose_nu<T: Real>(basic: &BasicStatePoint<T>) -> Vec3<T> {
    let v = basic.uhat.v;
    let g = &basic.geometry;
    [v[1] * g.dpsi_2 + v[2] * g.dpsi_3, v[1], v[2]]
}

/// `Ê = 𝓗̂ × ν`.
pub fn choose_ehat<T: Real>(basic: &BasicStatePoint<T>) -> EhatCoefficients<T> {
    let e = cross3(&basic.hcal, &choose_nu(basic));
    EhatCoefficients {
        e1: e[0],
        e2: e[1],
        e3: e[2],
    }
}

/// Normal component `X₁ − X₂∂₂Ψ̂ − X₃∂₃Ψ̂`.
pub fn normal_component<T: Real>(x: &Vec3<T>, geom: &InterfaceGeometry<T>) -> T {
    x[0] - x[1] * geom.dpsi_2 - x[2] * geom.dpsi_3
}

/// Tangential components `X_{τk} = X₁∂_kΨ̂ + X_k`, `k = 2, 3`.
pub fn tangential_components<T: Real>(x: &Vec3<T>, geom: &InterfaceGeometry<T>) -> [T; 2] {
    [x[0] * geom.dpsi_2 + x[1], x[0] * geom.dpsi_3 + x[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b1_spectrum() {
        let ev = build_b(1, 0.25_f64).entries.sym_eigenvalues();
        let want = [-4.0, -4.0, 0.0, 0.0, 4.0, 4.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn b_matrices_are_symmetric_with_four_entries() {
        for j in 1..=3 {
            let b = build_b(j, 0.5_f64).entries;
            assert_eq!(b.asymmetry(), 0.0);
            assert_eq!(b.count_nonzeros(), 4);
            assert!(b.0.iter().flatten().all(|&x| x == 0.0 || x.abs() == 2.0));
        }
    }

    #[test]
    fn frak_b0_identity_without_nu() {
        let p = RegularizationParams::<f64>::new(0.3, [0.0; 3]);
        assert_eq!(build_frak_b(0, &p).entries, SMat::identity());
    }

    #[test]
    fn frak_b_symmetric() {
        let p = RegularizationParams::<f64>::new(0.3, [0.4, -1.1, 0.7]);
        for a in 0..4 {
            assert_eq!(build_frak_b(a, &p).entries.asymmetry(), 0.0);
        }
    }

    #[test]
    fn det_examples() {
        let p = RegularizationParams::<f64>::new(0.5, [1.0, 0.0, 0.0]);
        assert!((det_frak_b1(&p) - 9.0).abs() < 1e-12);
        assert!((build_frak_b(1, &p).entries.det() - 9.0).abs() < 1e-10);
        let p = RegularizationParams::<f64>::new(0.1, [2.0, 1.0, 1.0]);
        assert!((det_frak_b1(&p) - 35344.0).abs() < 1e-8);
        let num = build_frak_b(1, &p).entries.det();
        assert!(((num - 35344.0) / 35344.0).abs() < 1e-10);
    }

    #[test]
    fn flat_m0_without_nu_is_identity() {
        let p = RegularizationParams::<f64>::new(0.2, [0.0; 3]);
        let m0 = build_m(0, &p, &InterfaceGeometry::flat()).unwrap().entries;
        assert!((m0 - SMat::identity()).max_abs() < 1e-15);
    }

    #[test]
    fn m1_determinant_interior_scaling() {
        let p = RegularizationParams::<f64>::new(0.2, [0.7, -0.4, 1.3]);
        let g = InterfaceGeometry::<f64> {
            dpsi_t: 0.0,
            dpsi_2: 0.35,
            dpsi_3: -0.2,
            d1phi1: 0.8,
        };
        let num = build_m(1, &p, &g).unwrap().entries.det();
        let closed = det_m1_closed(&p, &g);
        assert!(((num - closed) / closed).abs() < 1e-9, "{num} vs {closed}");
    }
}
