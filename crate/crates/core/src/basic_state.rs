//! Frozen-coefficient basic states `(Û, 𝓗̂, φ̂)` given in closed form, their derived "hat"
//! quantities, the admissibility checks, and the front-gradient resolution at the boundary.

use crate::eos::EosParams;
use crate::error::{MhdError, Result};
use crate::lifting::{make_cutoff, CutoffSpec};
use crate::linalg::{Mat3, SMat};
use crate::plasma::{build_eta, InterfaceGeometry, PlasmaState};
use crate::scalar::{cross3, dot3, lit, norm3, Real, Vec3};

/// Tolerance for the pointwise constraints of an accepted basic state.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Everything the matrix builders and boundary conditions need at one point.
///
/// On the vacuum side `uhat` holds the plasma trace at the same `x′`; only `v̂` is read there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicStatePoint<T> {
    pub uhat: PlasmaState<T>,
    pub hcal: Vec3<T>,
    pub geometry: InterfaceGeometry<T>,
    pub on_boundary: bool,
    /// `û = η̂v̂`.
    pub u: Vec3<T>,
    /// `ŵ = û − (∂_tΨ̂, 0, 0)`.
    pub w: Vec3<T>,
    /// `ĥ = η̂Ĥ`.
    pub hvec: Vec3<T>,
    /// `𝔥̂ = η̂𝓗̂`.
    pub frak_h: Vec3<T>,
    pub v_n: T,
    pub hcal_n: T,
    pub h_n: T,
    /// `[∂₁q̂]`, jump of the normal derivative of total pressure across the front.
    pub jump_d1_q: T,
    pub d1_vn: T,
    pub d1_hn: T,
    /// `∂₂𝓗̂₂ + ∂₃𝓗̂₃`.
    pub div_tan_hcal: T,
    /// Coefficients of `φ` in the reformulated boundary conditions.
    pub a1: T,
    pub a2: T,
    pub a3: T,
}

/// Raw pointwise data a family supplies; everything else is derived.
#[derive(Clone, Copy, Debug)]
struct RawPoint<T> {
    uhat: PlasmaState<T>,
    hcal: Vec3<T>,
    geometry: InterfaceGeometry<T>,
    on_boundary: bool,
    jump_d1_q: T,
    d1_vn: T,
    d1_hn: T,
    div_tan_hcal: T,
    dt_hcal: Vec3<T>,
    d2_e1: T,
    d3_e1: T,
}

fn normal<T: Real>(x: &Vec3<T>, g: &InterfaceGeometry<T>) -> T {
    x[0] - x[1] * g.dpsi_2 - x[2] * g.dpsi_3
}

fn derive<T: Real>(r: RawPoint<T>) -> BasicStatePoint<T> {
    let g = r.geometry;
    let eta = build_eta(&g);
    let u = eta.matvec(&r.uhat.v);
    let mut w = [u[0] - g.dpsi_t, u[1], u[2]];
    let mut hvec = eta.matvec(&r.uhat.h);
    if r.on_boundary {
        // Validated by the family to be at rounding level; stored exactly so that the
        // boundary coefficient 𝒜₁ vanishes identically.
        w[0] = T::zero();
        hvec[0] = T::zero();
    }
    let v = r.uhat.v;
    let hc = r.hcal;
    let a1 = -hc[2] * r.d1_vn - r.dt_hcal[2] + r.d2_e1 - v[2] * r.div_tan_hcal;
    let a2 = hc[1] * r.d1_vn + r.dt_hcal[1] + r.d3_e1 + v[1] * r.div_tan_hcal;
    BasicStatePoint {
        uhat: r.uhat,
        hcal: r.hcal,
        geometry: g,
        on_boundary: r.on_boundary,
        u,
        w,
        hvec,
        frak_h: eta.matvec(&r.hcal),
        v_n: normal(&v, &g),
        hcal_n: normal(&r.hcal, &g),
        h_n: normal(&r.uhat.h, &g),
        jump_d1_q: r.jump_d1_q,
        d1_vn: r.d1_vn,
        d1_hn: r.d1_hn,
        div_tan_hcal: r.div_tan_hcal,
        a1,
        a2,
        a3: v[1] * a1 + v[2] * a2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarParams<T> {
    pub q: T,
    pub v: Vec3<T>,
    pub h: Vec3<T>,
    pub hcal: Vec3<T>,
    pub s: T,
}

/// Single-mode corrugated front `φ̂ = a cos ζ`, `ζ = k₂x₂ + k₃x₃ − ωt`, `ω = k·v̂`.
///
/// `Ĥ = α(0,−k₃,k₂) + β(−|k|²a sin ζ, k₂, k₃)` is divergence-free with `Ĥ_N = 0` on the front,
/// `𝓗̂ = 𝓗₀(0,−k₃,k₂)/|k|` is constant with `𝓗̂_N = 0`, and `v̂ = (0, v₂, v₃)` is constant, so
/// the transport identity for `Ĥ` holds exactly. `Ψ̂ = χ(|x₁|⟨k⟩)φ̂`.
#[derive(Clone, Debug)]
pub struct CorrugatedParams<T> {
    pub amplitude: T,
    pub k: [T; 2],
    pub v: [T; 2],
    pub alpha: T,
    pub beta: T,
    pub hcal0: T,
    pub q: T,
    pub s: T,
    pub cutoff: CutoffSpec<T>,
}

#[derive(Clone, Debug)]
pub enum BasicFamily<T> {
    Planar(PlanarParams<T>),
    Corrugated(CorrugatedParams<T>),
}

/// Lower bounds and margins a basic state is checked against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicStateBounds<T> {
    /// Measured `W^{2,∞}`-type bound on the coefficients.
    pub k_bound: T,
    pub delta: T,
    pub rho0: T,
    pub rho1: T,
}

/// Closed-form basic state on `Q⁺ ∪ Q⁻ ∪ ω` with periodic `x′` of periods `l2, l3`.
#[derive(Clone, Debug)]
pub struct BasicState<T> {
    pub family: BasicFamily<T>,
    pub eos: EosParams<T>,
    pub l2: T,
    pub l3: T,
}

fn violated(condition: &str, residual: f64) -> MhdError {
    MhdError::ConstraintViolated {
        condition: condition.to_string(),
        residual,
    }
}

/// Constant-coefficient state over a flat front.
pub fn make_planar_state<T: Real>(
    h: Vec3<T>,
    hcal: Vec3<T>,
    v: Vec3<T>,
    q: T,
    s: T,
    eos: EosParams<T>,
) -> Result<BasicState<T>> {
    let tol = lit::<T>(CONSTRAINT_TOL);
    if h[0].abs() > tol {
        return Err(violated("H_N = 0 on the front", h[0].as_f64()));
    }
    if hcal[0].abs() > tol {
        return Err(violated("calH_N = 0 on the front", hcal[0].as_f64()));
    }
    if v[0].abs() > tol {
        return Err(violated("d_t phi - v_N = 0 on the front", v[0].as_f64()));
    }
    let state = BasicState {
        family: BasicFamily::Planar(PlanarParams { q, v, h, hcal, s }),
        eos,
        l2: T::TAU(),
        l3: T::TAU(),
    };
    state.check_thermo(&PlasmaState::new(q, v, h, s))?;
    Ok(state)
}

/// Corrugated family with `Ψ̂` built from a cutoff with support bound `m`.
#[allow(clippy::too_many_arguments)]
pub fn make_corrugated_state<T: Real>(
    amplitude: T,
    k: [T; 2],
    v: [T; 2],
    alpha: T,
    beta: T,
    hcal0: T,
    q: T,
    s: T,
    m: T,
    eos: EosParams<T>,
) -> Result<BasicState<T>> {
    let kk = (k[0] * k[0] + k[1] * k[1]).sqrt();
    if kk == T::zero() {
        return Err(MhdError::InvalidGrid("corrugation wavevector must be nonzero".into()));
    }
    let cutoff = make_cutoff(m)?;
    let state = BasicState {
        family: BasicFamily::Corrugated(CorrugatedParams {
            amplitude,
            k,
            v,
            alpha,
            beta,
            hcal0,
            q,
            s,
            cutoff,
        }),
        eos,
        l2: T::TAU(),
        l3: T::TAU(),
    };
    // Worst-case |Ĥ|² is attained where |sin ζ| = 1.
    let hmax = [beta * kk * kk * amplitude, (alpha * alpha + beta * beta).sqrt() * kk, T::zero()];
    state.check_thermo(&PlasmaState::new(q, [T::zero(), v[0], v[1]], hmax, s))?;
    Ok(state)
}

impl<T: Real> BasicState<T> {
    fn check_thermo(&self, u: &PlasmaState<T>) -> Result<()> {
        u.thermo(&self.eos).map(|_| ()).map_err(|e| match e {
            MhdError::NonPositivePressure { p } => violated("rho >= rho0 > 0 (positive pressure)", p),
            other => other,
        })
    }

    /// True when no coefficient depends on `x₃`.
    pub fn is_x3_independent(&self) -> bool {
        match &self.family {
            BasicFamily::Planar(_) => true,
            BasicFamily::Corrugated(c) => c.k[1] == T::zero(),
        }
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.family, BasicFamily::Planar(_))
    }

    /// Front position `φ̂(t, x′)` and its derivatives `(∂_t, ∂₂, ∂₃)`.
    pub fn front(&self, t: T, x2: T, x3: T) -> (T, [T; 3]) {
        match &self.family {
            BasicFamily::Planar(_) => (T::zero(), [T::zero(); 3]),
            BasicFamily::Corrugated(c) => {
                let omega = c.k[0] * c.v[0] + c.k[1] * c.v[1];
                let z = c.k[0] * x2 + c.k[1] * x3 - omega * t;
                let (s, co) = z.sin_cos();
                let a = c.amplitude;
                (a * co, [a * omega * s, -a * c.k[0] * s, -a * c.k[1] * s])
            }
        }
    }

    fn raw(&self, t: T, x: [T; 3], on_boundary: bool) -> RawPoint<T> {
        match &self.family {
            BasicFamily::Planar(p) => RawPoint {
                uhat: PlasmaState::new(p.q, p.v, p.h, p.s),
                hcal: p.hcal,
                geometry: InterfaceGeometry::flat(),
                on_boundary,
                jump_d1_q: T::zero(),
                d1_vn: T::zero(),
                d1_hn: T::zero(),
                div_tan_hcal: T::zero(),
                dt_hcal: [T::zero(); 3],
                d2_e1: T::zero(),
                d3_e1: T::zero(),
            },
            BasicFamily::Corrugated(c) => {
                let kk = (c.k[0] * c.k[0] + c.k[1] * c.k[1]).sqrt();
                let br = (T::one() + kk * kk).sqrt();
                let (ph, [pt, p2, p3]) = self.front(t, x[1], x[2]);
                let ax = x[0].abs();
                let chi = c.cutoff.eval(ax * br);
                let sgn = if x[0] < T::zero() { -T::one() } else { T::one() };
                let dchi = c.cutoff.deriv(ax * br) * br * sgn;
                let geometry = InterfaceGeometry {
                    dpsi_t: chi * pt,
                    dpsi_2: chi * p2,
                    dpsi_3: chi * p3,
                    d1phi1: T::one() + dchi * ph,
                };
                let omega = c.k[0] * c.v[0] + c.k[1] * c.v[1];
                let z = c.k[0] * x[1] + c.k[1] * x[2] - omega * t;
                let sz = z.sin();
                let h = [
                    -c.beta * kk * kk * c.amplitude * sz,
                    -c.alpha * c.k[1] + c.beta * c.k[0],
                    c.alpha * c.k[0] + c.beta * c.k[1],
                ];
                let hc = c.hcal0 / kk;
                // v̂_N = a(k·v − ω)χ sin ζ ≡ 0 and Ĥ_N = −β|k|²a sin ζ (1 − χ); both have
                // vanishing x₁-derivative at the front because χ′(0) = 0.
                let d1_hn = c.beta * kk * kk * c.amplitude * sz * dchi;
                RawPoint {
                    uhat: PlasmaState::new(c.q, [T::zero(), c.v[0], c.v[1]], h, c.s),
                    hcal: [T::zero(), -c.k[1] * hc, c.k[0] * hc],
                    geometry,
                    on_boundary,
                    jump_d1_q: T::zero(),
                    d1_vn: T::zero(),
                    d1_hn,
                    div_tan_hcal: T::zero(),
                    dt_hcal: [T::zero(); 3],
                    d2_e1: T::zero(),
                    d3_e1: T::zero(),
                }
            }
        }
    }

    /// Hat quantities at `(t, x)`; `x₁ > 0` is plasma, `x₁ < 0` vacuum, `x₁ = 0` the front.
    pub fn point(&self, t: T, x: [T; 3]) -> BasicStatePoint<T> {
        derive(self.raw(t, x, x[0] == T::zero()))
    }

    /// Boundary point after validating the front constraints.
    pub fn boundary_point(&self, t: T, x2: T, x3: T) -> Result<BasicStatePoint<T>> {
        let raw = self.raw(t, [T::zero(), x2, x3], true);
        let res = boundary_residuals(&raw, self.front(t, x2, x3).1[0]);
        let tol = lit::<T>(CONSTRAINT_TOL);
        for (name, r) in res {
            if r.abs() > tol {
                return Err(violated(name, r.as_f64()));
            }
        }
        self.check_thermo(&raw.uhat)?;
        Ok(derive(raw))
    }

    /// Checks every pointwise condition on an `n1 × n2 × n3` sampling of both sides and the front.
    pub fn validate(&self, t: T, n1: usize, n2: usize, n3: usize, depth: T) -> Result<ValidationReport<T>> {
        let mut report = ValidationReport::default();
        let (h2, h3) = (self.l2 / T::from_usize_lossy(n2), self.l3 / T::from_usize_lossy(n3));
        let h1 = depth / T::from_usize_lossy(n1.max(1));
        let mut rho_min = T::infinity();
        let mut rho_p_min = T::infinity();
        let mut d_min = T::infinity();
        for i2 in 0..n2 {
            for i3 in 0..n3 {
                let (x2, x3) = (T::from_usize_lossy(i2) * h2, T::from_usize_lossy(i3) * h3);
                let raw = self.raw(t, [T::zero(), x2, x3], true);
                for (name, r) in boundary_residuals(&raw, self.front(t, x2, x3).1[0]) {
                    report.record(name, r.abs());
                }
                for i1 in 0..=n1 {
                    for sgn in [T::one(), -T::one()] {
                        let x1 = sgn * T::from_usize_lossy(i1) * h1;
                        let p = self.raw(t, [x1, x2, x3], i1 == 0);
                        d_min = d_min.min(p.geometry.d1phi1);
                        if sgn > T::zero() {
                            let th = p.uhat.thermo(&self.eos).map_err(|e| match e {
                                MhdError::NonPositivePressure { p } => {
                                    violated("rho >= rho0 > 0 (positive pressure)", p)
                                }
                                other => other,
                            })?;
                            rho_min = rho_min.min(th.rho);
                            rho_p_min = rho_p_min.min(th.rho_p);
                        }
                    }
                }
            }
        }
        report.rho_min = rho_min;
        report.rho_p_min = rho_p_min;
        report.min_d1phi1 = d_min;
        report.transport_residual = self.transport_residual(t, [lit(0.3), lit(0.7), lit(1.1)], lit(1e-3));
        if d_min < lit(0.5) {
            return Err(MhdError::DegenerateJacobian { d1phi1: d_min.as_f64() });
        }
        if let Some((name, r)) = report.worst() {
            if r > lit(CONSTRAINT_TOL) {
                return Err(violated(name, r.as_f64()));
            }
        }
        Ok(report)
    }

    /// `max|Ĥ × 𝓗̂|`-margin check on an `n2 × n3` boundary sampling.
    pub fn check_stability(&self, t: T, n2: usize, n3: usize, delta: T) -> Result<StabilityReport<T>> {
        let (h2, h3) = (self.l2 / T::from_usize_lossy(n2), self.l3 / T::from_usize_lossy(n3));
        let mut margin = T::infinity();
        let mut location = (T::zero(), T::zero());
        let mut identity_residual = T::zero();
        for i2 in 0..n2 {
            for i3 in 0..n3 {
                let (x2, x3) = (T::from_usize_lossy(i2) * h2, T::from_usize_lossy(i3) * h3);
                let p = self.boundary_point(t, x2, x3)?;
                let (m, r) = stability_margin(&p);
                identity_residual = identity_residual.max(r);
                if m < margin {
                    margin = m;
                    location = (x2, x3);
                }
            }
        }
        if margin < delta {
            return Err(MhdError::StabilityViolated {
                margin: margin.as_f64(),
                delta: delta.as_f64(),
                location: format!("x2 = {}, x3 = {}", location.0, location.1),
            });
        }
        Ok(StabilityReport {
            margin,
            location,
            identity_residual,
        })
    }

    /// Residual of the straightened transport identity for `Ĥ`, by central differences of step `h`.
    pub fn transport_residual(&self, t: T, x: [T; 3], h: T) -> T {
        let two = lit::<T>(2.0);
        let at = |dt: T, dx: [T; 3]| {
            self.point(t + dt, [x[0] + dx[0], x[1] + dx[1], x[2] + dx[2]])
        };
        let c = at(T::zero(), [T::zero(); 3]);
        let z = T::zero();
        let dir = |k: usize| -> (BasicStatePoint<T>, BasicStatePoint<T>) {
            let mut e = [z; 3];
            e[k] = h;
            let mut m = [z; 3];
            m[k] = -h;
            (at(z, e), at(z, m))
        };
        let dt_h: Vec3<T> = {
            let (p, m) = (at(h, [z; 3]), at(-h, [z; 3]));
            [0, 1, 2].map(|i| (p.uhat.h[i] - m.uhat.h[i]) / (two * h))
        };
        let mut adv = [z; 3];
        let mut stretch = [z; 3];
        let mut div_u = z;
        for k in 0..3 {
            let (p, m) = dir(k);
            for i in 0..3 {
                let dh = (p.uhat.h[i] - m.uhat.h[i]) / (two * h);
                let dv = (p.uhat.v[i] - m.uhat.v[i]) / (two * h);
                adv[i] += c.w[k] * dh;
                stretch[i] += c.hvec[k] * dv;
            }
            div_u += (p.u[k] - m.u[k]) / (two * h);
        }
        let d = c.geometry.d1phi1;
        let mut r = z;
        for i in 0..3 {
            let e = dt_h[i] + (adv[i] - stretch[i] + c.uhat.h[i] * div_u) / d;
            r = r.max(e.abs());
        }
        r
    }
}

fn boundary_residuals<T: Real>(raw: &RawPoint<T>, dt_phi: T) -> [(&'static str, T); 4] {
    let g = &raw.geometry;
    [
        ("d_t phi - v_N = 0 on the front", dt_phi - normal(&raw.uhat.v, g)),
        ("calH_N = 0 on the front", normal(&raw.hcal, g)),
        ("H_N = 0 on the front", normal(&raw.uhat.h, g)),
        ("d1Phi1 = 1 on the front", g.d1phi1 - T::one()),
    ]
}

/// `(|Ĥ × 𝓗̂|, |  |Ĥ×𝓗̂|² − (Ĥ₂𝓗̂₃ − Ĥ₃𝓗̂₂)²⟨∇′φ̂⟩²  |)` at a boundary point.
pub fn stability_margin<T: Real>(p: &BasicStatePoint<T>) -> (T, T) {
    let h = p.uhat.h;
    let c = p.hcal;
    let cr = cross3(&h, &c);
    let lhs = dot3(&cr, &cr);
    let g = &p.geometry;
    let bracket = T::one() + g.dpsi_2 * g.dpsi_2 + g.dpsi_3 * g.dpsi_3;
    let tan = h[1] * c[2] - h[2] * c[1];
    (norm3(&cr), (lhs - tan * tan * bracket).abs())
}

#[derive(Clone, Debug)]
pub struct ValidationReport<T> {
    pub residuals: Vec<(&'static str, T)>,
    pub rho_min: T,
    pub rho_p_min: T,
    pub min_d1phi1: T,
    pub transport_residual: T,
}

impl<T: Real> Default for ValidationReport<T> {
    fn default() -> Self {
        ValidationReport {
            residuals: Vec::new(),
            rho_min: T::infinity(),
            rho_p_min: T::infinity(),
            min_d1phi1: T::infinity(),
            transport_residual: T::zero(),
        }
    }
}

impl<T: Real> ValidationReport<T> {
    fn record(&mut self, name: &'static str, r: T) {
        match self.residuals.iter_mut().find(|(n, _)| *n == name) {
            Some(e) => e.1 = e.1.max(r),
            None => self.residuals.push((name, r)),
        }
    }

    fn worst(&self) -> Option<(&'static str, T)> {
        self.residuals
            .iter()
            .copied()
            .fold(None, |acc: Option<(&'static str, T)>, e| match acc {
                Some(a) if a.1 >= e.1 => Some(a),
                _ => Some(e),
            })
    }

    pub fn bounds(&self, delta: T) -> BasicStateBounds<T> {
        BasicStateBounds {
            k_bound: T::nan(),
            delta,
            rho0: self.rho_min,
            rho1: self.rho_p_min,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StabilityReport<T> {
    pub margin: T,
    pub location: (T, T),
    pub identity_residual: T,
}

/// Coefficients of the explicit front-gradient formula
/// `∇_{t,x′}φ = a₁h₁ + a₂𝔥₁ + a₃u₁ + a₄φ + a₅γφ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontGradientCoefficients<T> {
    pub a1: Vec3<T>,
    pub a2: Vec3<T>,
    pub a3: Vec3<T>,
    pub a4: Vec3<T>,
    pub a5: Vec3<T>,
}

/// The 3×3 system linking `(∂_tφ, ∂₂φ, ∂₃φ)` to the kinematic condition and the two
/// boundary constraints on `h₁` and `𝔥₁`.
pub fn front_system<T: Real>(p: &BasicStatePoint<T>) -> Mat3<T> {
    let (v, h, c) = (p.uhat.v, p.uhat.h, p.hcal);
    let z = T::zero();
    SMat::from_rows([[T::one(), v[1], v[2]], [z, h[1], h[2]], [z, c[1], c[2]]])
}

pub fn front_gradient_coefficients<T: Real>(p: &BasicStatePoint<T>) -> Result<FrontGradientCoefficients<T>> {
    let g = front_system(p);
    let det = g.det();
    if det.abs() < lit(1e-12) {
        return Err(MhdError::SingularFrontSystem { det: det.as_f64() });
    }
    let inv = g.inverse().ok_or(MhdError::SingularFrontSystem { det: det.as_f64() })?;
    let col = |j: usize| [inv.0[0][j], inv.0[1][j], inv.0[2][j]];
    let lower = inv.matvec(&[p.d1_vn, p.d1_hn, -p.div_tan_hcal]);
    let c1 = col(0);
    Ok(FrontGradientCoefficients {
        a1: col(1),
        a2: col(2),
        a3: c1,
        a4: lower,
        a5: [-c1[0], -c1[1], -c1[2]],
    })
}

/// Solves for `(∂_tφ, ∂₂φ, ∂₃φ)` given the boundary traces `h₁, 𝔥₁, u₁` and `φ`.
///
/// `γ` enters through the weighted kinematic condition `(γ + ∂_t)φ + … = u₁`; pass `γ = 0`
/// for the unweighted problem.
pub fn resolve_front_gradient<T: Real>(
    p: &BasicStatePoint<T>,
    h1: T,
    frak_h1: T,
    u1: T,
    phi: T,
    gamma: T,
) -> Result<Vec3<T>> {
    let c = front_gradient_coefficients(p)?;
    Ok([0, 1, 2].map(|i| c.a1[i] * h1 + c.a2[i] * frak_h1 + c.a3[i] * u1 + c.a4[i] * phi + c.a5[i] * gamma * phi))
}

/// Inverse map of [`resolve_front_gradient`]: `(h₁, 𝔥₁, u₁)` from a front gradient.
pub fn front_traces_from_gradient<T: Real>(p: &BasicStatePoint<T>, grad: &Vec3<T>, phi: T, gamma: T) -> Vec3<T> {
    let g = front_system(p);
    let r = g.matvec(grad);
    [
        r[1] - phi * p.d1_hn,
        r[2] + phi * p.div_tan_hcal,
        r[0] + gamma * phi - phi * p.d1_vn,
    ]
}
