//! Plasma-side symmetric hyperbolic matrices.
//!
//! Unknown ordering everywhere is `(q, v₁, v₂, v₃, H₁, H₂, H₃, S)` for `U` and
//! `(q, u₁, u₂, u₃, h₁, h₂, h₃, S)` for the transformed unknown `𝒰`.

use crate::basic_state::BasicStatePoint;
use crate::bundle::{MatrixBundle, MatrixTag};
use crate::eos::{density_from_total_pressure, EosParams, ThermoPoint};
use crate::error::{MhdError, Result};
use crate::linalg::{Mat3, SMat};
use crate::scalar::{lit, Real, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlasmaState<T> {
    pub q: T,
    pub v: Vec3<T>,
    pub h: Vec3<T>,
    pub s: T,
}

impl<T: Real> PlasmaState<T> {
    pub fn new(q: T, v: Vec3<T>, h: Vec3<T>, s: T) -> Self {
        PlasmaState { q, v, h, s }
    }

    pub fn to_array(&self) -> [T; 8] {
        [
            self.q, self.v[0], self.v[1], self.v[2], self.h[0], self.h[1], self.h[2], self.s,
        ]
    }

    pub fn from_array(a: &[T; 8]) -> Self {
        PlasmaState {
            q: a[0],
            v: [a[1], a[2], a[3]],
            h: [a[4], a[5], a[6]],
            s: a[7],
        }
    }

    /// Gas pressure `p = q − |H|²/2`.
    pub fn pressure(&self) -> T {
        self.q - lit::<T>(0.5) * crate::scalar::dot3(&self.h, &self.h)
    }

    pub fn thermo(&self, eos: &EosParams<T>) -> Result<ThermoPoint<T>> {
        let t = density_from_total_pressure(eos, self.q, &self.h, self.s)?;
        if !(t.rho > T::zero() && t.rho_p > T::zero()) {
            return Err(MhdError::HyperbolicityViolated {
                rho: t.rho.as_f64(),
                rho_p: t.rho_p.as_f64(),
            });
        }
        Ok(t)
    }
}

/// Pointwise derivatives of the lifting `Ψ` and of `Φ₁ = x₁ + Ψ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceGeometry<T> {
    pub dpsi_t: T,
    pub dpsi_2: T,
    pub dpsi_3: T,
    pub d1phi1: T,
}

impl<T: Real> InterfaceGeometry<T> {
    pub fn flat() -> Self {
        InterfaceGeometry {
            dpsi_t: T::zero(),
            dpsi_2: T::zero(),
            dpsi_3: T::zero(),
            d1phi1: T::one(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.d1phi1 >= lit(0.5) {
            Ok(())
        } else {
            Err(MhdError::DegenerateJacobian {
                d1phi1: self.d1phi1.as_f64(),
            })
        }
    }
}

/// `A_α(U)` of the q-based symmetric system; `alpha = 0` is the time coefficient.
pub fn build_a<T: Real>(alpha: usize, u: &PlasmaState<T>, eos: &EosParams<T>) -> Result<MatrixBundle<T, 8>> {
    assert!(alpha <= 3, "alpha must be in 0..=3");
    let t = u.thermo(eos)?;
    Ok(MatrixBundle::new(
        a_matrix(alpha, u, t.rho, t.rho_p_over_rho()),
        MatrixTag::a(alpha),
        true,
    ))
}

/// Upper-triangle assembly mirrored onto the lower triangle.
fn a_matrix<T: Real>(alpha: usize, u: &PlasmaState<T>, rho: T, c: T) -> SMat<T, 8> {
    let mut m = SMat::<T, 8>::zeros();
    let h = u.h;
    if alpha == 0 {
        m.0[0][0] = c;
        for i in 0..3 {
            m.0[1 + i][1 + i] = rho;
            m.0[0][4 + i] = -c * h[i];
            for j in i..3 {
                m.0[4 + i][4 + j] = c * h[i] * h[j];
            }
            m.0[4 + i][4 + i] += T::one();
        }
        m.0[7][7] = T::one();
    } else {
        let j = alpha - 1;
        let vj = u.v[j];
        let hj = h[j];
        m.0[0][0] = c * vj;
        m.0[0][1 + j] = T::one();
        for i in 0..3 {
            m.0[0][4 + i] = -c * h[i] * vj;
            m.0[1 + i][1 + i] = rho * vj;
            m.0[1 + i][4 + i] = -hj;
            for k in i..3 {
                m.0[4 + i][4 + k] = c * h[i] * h[k] * vj;
            }
            m.0[4 + i][4 + i] += vj;
        }
        m.0[7][7] = vj;
    }
    m.mirror_upper()
}

/// `Ã₁ = (A₁ − A₀∂_tΨ − A₂∂₂Ψ − A₃∂₃Ψ)/∂₁Φ₁`.
pub fn build_atilde1<T: Real>(
    u: &PlasmaState<T>,
    geom: &InterfaceGeometry<T>,
    eos: &EosParams<T>,
) -> Result<MatrixBundle<T, 8>> {
    geom.check()?;
    let t = u.thermo(eos)?;
    Ok(MatrixBundle::new(
        atilde1_matrix(u, geom, t.rho, t.rho_p_over_rho()),
        MatrixTag::Atilde1,
        true,
    ))
}

fn atilde1_matrix<T: Real>(u: &PlasmaState<T>, g: &InterfaceGeometry<T>, rho: T, c: T) -> SMat<T, 8> {
    let m = a_matrix(1, u, rho, c)
        - a_matrix(0, u, rho, c).scale(g.dpsi_t)
        - a_matrix(2, u, rho, c).scale(g.dpsi_2)
        - a_matrix(3, u, rho, c).scale(g.dpsi_3);
    m.scale(g.d1phi1.recip())
}

/// `η̂`, mapping physical `v, H` to the transformed `u = η̂v`, `h = η̂H`.
pub fn build_eta<T: Real>(geom: &InterfaceGeometry<T>) -> Mat3<T> {
    let z = T::zero();
    SMat::from_rows([
        [T::one(), -geom.dpsi_2, -geom.dpsi_3],
        [z, geom.d1phi1, z],
        [z, z, geom.d1phi1],
    ])
}

/// Closed-form `η̂⁻¹`.
pub fn build_eta_inv<T: Real>(geom: &InterfaceGeometry<T>) -> Mat3<T> {
    let z = T::zero();
    let r = geom.d1phi1.recip();
    SMat::from_rows([
        [T::one(), geom.dpsi_2 * r, geom.dpsi_3 * r],
        [z, r, z],
        [z, z, r],
    ])
}

/// `â₀ = η̂⁻ᵀ η̂⁻¹`.
pub fn build_a0hat<T: Real>(geom: &InterfaceGeometry<T>) -> Mat3<T> {
    let ei = build_eta_inv(geom);
    (ei.transpose() * ei).mirror_upper()
}

/// `blockdiag(1, η̂⁻¹, η̂⁻¹, 1)`, so that `U = T 𝒰`.
pub fn state_transform<T: Real>(geom: &InterfaceGeometry<T>) -> SMat<T, 8> {
    let ei = build_eta_inv(geom);
    let mut t = SMat::<T, 8>::zeros();
    t.0[0][0] = T::one();
    t.0[7][7] = T::one();
    for i in 0..3 {
        for j in 0..3 {
            t.0[1 + i][1 + j] = ei.0[i][j];
            t.0[4 + i][4 + j] = ei.0[i][j];
        }
    }
    t
}

/// Ingredients of the `𝒰`-system coefficients at one point.
#[derive(Clone, Copy, Debug)]
struct CalParts<T> {
    c: T,
    rho: T,
    d: T,
    a0: Mat3<T>,
    w: Vec3<T>,
    h: Vec3<T>,
}

fn cal_a_matrix<T: Real>(alpha: usize, p: &CalParts<T>) -> SMat<T, 8> {
    let g = p.a0.matvec(&p.h);
    let mut m = SMat::<T, 8>::zeros();
    // Common scaling: d for the time coefficient, ŵ_j for the advective parts.
    let (s, hj) = if alpha == 0 {
        (p.d, T::zero())
    } else {
        (p.w[alpha - 1], p.h[alpha - 1])
    };
    m.0[0][0] = p.c * s;
    for i in 0..3 {
        m.0[0][4 + i] = -p.c * g[i] * s;
        for k in i..3 {
            m.0[1 + i][1 + k] = p.rho * p.a0.0[i][k] * s;
            m.0[1 + i][4 + k] = -p.a0.0[i][k] * hj;
            m.0[4 + i][4 + k] = (p.a0.0[i][k] + p.c * g[i] * g[k]) * s;
        }
        for k in 0..i {
            m.0[1 + i][4 + k] = -p.a0.0[i][k] * hj;
        }
    }
    m.0[7][7] = s;
    m.mirror_upper()
}

fn cal_parts_from_state<T: Real>(
    u: &PlasmaState<T>,
    geom: &InterfaceGeometry<T>,
    eos: &EosParams<T>,
) -> Result<CalParts<T>> {
    geom.check()?;
    let t = u.thermo(eos)?;
    let eta = build_eta(geom);
    let uu = eta.matvec(&u.v);
    Ok(CalParts {
        c: t.rho_p_over_rho(),
        rho: t.rho,
        d: geom.d1phi1,
        a0: build_a0hat(geom),
        w: [uu[0] - geom.dpsi_t, uu[1], uu[2]],
        h: eta.matvec(&u.h),
    })
}

/// `𝒜_α` of the `𝒰`-system evaluated with the hat quantities stored in `basic`.
/// At boundary points `ŵ₁ = ĥ₁ = 0` are stored exactly, so `𝒜₁` is the zero matrix there.
pub fn build_cal_a<T: Real>(
    alpha: usize,
    basic: &BasicStatePoint<T>,
    eos: &EosParams<T>,
) -> Result<MatrixBundle<T, 8>> {
    assert!(alpha <= 3, "alpha must be in 0..=3");
    basic.geometry.check()?;
    let t = basic.uhat.thermo(eos)?;
    let parts = CalParts {
        c: t.rho_p_over_rho(),
        rho: t.rho,
        d: basic.geometry.d1phi1,
        a0: build_a0hat(&basic.geometry),
        w: basic.w,
        h: basic.hvec,
    };
    Ok(MatrixBundle::new(cal_a_matrix(alpha, &parts), MatrixTag::cal_a(alpha), true))
}

/// `𝒜_α` for an arbitrary state and geometry, deriving `ŵ` and `ĥ` on the fly.
pub fn build_cal_a_with_state<T: Real>(
    alpha: usize,
    u: &PlasmaState<T>,
    geom: &InterfaceGeometry<T>,
    eos: &EosParams<T>,
) -> Result<MatrixBundle<T, 8>> {
    assert!(alpha <= 3, "alpha must be in 0..=3");
    let parts = cal_parts_from_state(u, geom, eos)?;
    Ok(MatrixBundle::new(cal_a_matrix(alpha, &parts), MatrixTag::cal_a(alpha), true))
}

/// Constant coupling `ℰ_{1j}` for `j ∈ {2, 3, 4}`: ones at `(1, j)` and `(j, 1)` (1-based).
pub fn constant_e<T: Real>(j: usize) -> MatrixBundle<T, 8> {
    assert!((2..=4).contains(&j), "j must be in 2..=4");
    let mut m = SMat::<T, 8>::zeros();
    m.0[0][j - 1] = T::one();
    m.0[j - 1][0] = T::one();
    let tag = [MatrixTag::E12, MatrixTag::E13, MatrixTag::E14][j - 2];
    MatrixBundle::new(m, tag, true)
}

/// The four coefficient matrices `(A₀, Ã₁, A₂, A₃)` of the straightened plasma system.
fn straightened<T: Real>(u: &PlasmaState<T>, g: &InterfaceGeometry<T>, eos: &EosParams<T>) -> Result<[SMat<T, 8>; 4]> {
    let t = u.thermo(eos)?;
    let (rho, c) = (t.rho, t.rho_p_over_rho());
    Ok([
        a_matrix(0, u, rho, c),
        atilde1_matrix(u, g, rho, c),
        a_matrix(2, u, rho, c),
        a_matrix(3, u, rho, c),
    ])
}

/// Zero-order matrix `𝒞̂′ = ∂₁Φ̂₁ Tᵀ (Σ_α A′_α ∂_α T + 𝒞̂ T)` of the `𝒰`-system.
///
/// `du[α]` holds `∂_α Û` and `dtrans[α]` holds `∂_α T` (α = t, x₁, x₂, x₃), both supplied by
/// the caller. `𝒞̂` is formed by central differences of `A′_α` in state space.
pub fn build_c_prime<T: Real>(
    basic: &BasicStatePoint<T>,
    du: &[[T; 8]; 4],
    dtrans: &[SMat<T, 8>; 4],
    eos: &EosParams<T>,
) -> Result<SMat<T, 8>> {
    let g = &basic.geometry;
    g.check()?;
    let base = basic.uhat.to_array();
    let ap = straightened(&basic.uhat, g, eos)?;

    let mut c_hat = SMat::<T, 8>::zeros();
    for i in 0..8 {
        let step = lit::<T>(1e-6) * T::one().max(base[i].abs());
        let mut up = base;
        let mut dn = base;
        up[i] += step;
        dn[i] -= step;
        let ap_up = straightened(&PlasmaState::from_array(&up), g, eos)?;
        let ap_dn = straightened(&PlasmaState::from_array(&dn), g, eos)?;
        let mut col = [T::zero(); 8];
        for alpha in 0..4 {
            let d_a = (ap_up[alpha] - ap_dn[alpha]).scale((step + step).recip());
            let contrib = d_a.matvec(&du[alpha]);
            for r in 0..8 {
                col[r] += contrib[r];
            }
        }
        for r in 0..8 {
            c_hat.0[r][i] = col[r];
        }
    }

    let t = state_transform(g);
    let mut inner = c_hat * t;
    for alpha in 0..4 {
        inner = inner + ap[alpha] * dtrans[alpha];
    }
    Ok((t.transpose() * inner).scale(g.d1phi1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_state() -> PlasmaState<f64> {
        PlasmaState::new(2.0, [0.3, -0.2, 0.5], [0.4, 0.7, -0.6], 0.1)
    }

    #[test]
    fn a0_with_zero_field_is_diagonal() {
        let u = PlasmaState::new(1.0, [0.0; 3], [0.0; 3], 0.0);
        let a0 = build_a(0, &u, &EosParams::default()).unwrap().entries;
        let want = SMat::from_diag([0.6, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert!((a0 - want).max_abs() < 1e-15);
    }

    #[test]
    fn divergence_slot_is_unit() {
        let a2 = build_a(2, &sample_state(), &EosParams::default()).unwrap().entries;
        assert_eq!(a2.0[0][2], 1.0);
        assert_eq!(a2.0[2][0], 1.0);
        assert_eq!(a2.asymmetry(), 0.0);
    }

    #[test]
    fn flat_atilde_is_a1() {
        let eos = EosParams::default();
        let u = sample_state();
        let at = build_atilde1(&u, &InterfaceGeometry::flat(), &eos).unwrap().entries;
        assert_eq!(at, build_a(1, &u, &eos).unwrap().entries);
        let g = InterfaceGeometry {
            dpsi_t: 1.0,
            ..InterfaceGeometry::flat()
        };
        let at = build_atilde1(&u, &g, &eos).unwrap().entries;
        let want = build_a(1, &u, &eos).unwrap().entries - build_a(0, &u, &eos).unwrap().entries;
        assert!((at - want).max_abs() < 1e-15);
    }

    #[test]
    fn degenerate_jacobian_rejected() {
        let g = InterfaceGeometry {
            d1phi1: 0.4,
            ..InterfaceGeometry::flat()
        };
        assert!(matches!(
            build_atilde1(&sample_state(), &g, &EosParams::default()),
            Err(MhdError::DegenerateJacobian { .. })
        ));
    }

    #[test]
    fn eta_maps_to_normal_components() {
        let g = InterfaceGeometry::<f64> {
            dpsi_t: 0.0,
            dpsi_2: 0.3,
            dpsi_3: -0.1,
            d1phi1: 1.2,
        };
        let eta = build_eta(&g);
        assert_eq!(eta.matvec(&[1.0, 0.0, 0.0]), [1.0, 0.0, 0.0]);
        let h = [0.4, 0.7, -0.6];
        let hn = 0.4 - 0.7 * 0.3 + 0.6 * -0.1;
        let got = eta.matvec(&h);
        assert!((got[0] - hn).abs() < 1e-15);
        assert!((got[1] - 0.7 * 1.2).abs() < 1e-15);
        assert!((eta * build_eta_inv(&g) - SMat::identity()).max_abs() < 1e-15);
    }

    #[test]
    fn flat_cal_a0_is_block_diagonal() {
        let u = PlasmaState::new(1.0, [0.1, 0.2, 0.3], [0.0; 3], 0.0);
        let m = build_cal_a_with_state(0, &u, &InterfaceGeometry::flat(), &EosParams::default())
            .unwrap()
            .entries;
        let want = SMat::from_diag([0.6, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert!((m - want).max_abs() < 1e-15);
    }

    #[test]
    fn coupling_matrices() {
        let e12 = constant_e::<f64>(2).entries;
        assert_eq!(e12.0[0][1], 1.0);
        assert_eq!(e12.0[1][0], 1.0);
        assert_eq!(e12.count_nonzeros(), 2);
        let e13 = constant_e::<f64>(3).entries;
        assert_eq!(e13.0[0][2], 1.0);
        assert_eq!(e13.0[2][0], 1.0);
    }
}
