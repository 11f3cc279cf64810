//! Finite-difference solver for the linearized, hyperbolically regularized interface problem
//! about a planar basic state.
//!
//! Plasma `𝒰` lives on `x₁ ∈ [0, L₁]`, the vacuum `W` on `x₁ ∈ [−L₁, 0]`, both periodic in
//! `x′`. Interior: `𝒜₀∂_t𝒰 + Σ A′_j D_j 𝒰 = 𝓕` and `M₀∂_tW + Σ M_j D_j W = 0` with the SBP
//! operator in `x₁`. The interface conditions are imposed weakly with a penalty that makes the
//! semi-discrete boundary flux equal `−α|Gz + bφ|²`; both far ends get characteristic outflow.
//! Time stepping is classical RK4.

pub mod boundary;
pub mod energy;
pub mod equivalence;
pub mod monitor;
pub mod ops;

use crate::basic_state::{BasicState, BasicStatePoint};
use crate::config::{ForcingFamily, SolverConfig, StateFamily, TimeStep};
use crate::eos::EosParams;
use crate::error::{MhdError, Result};
use crate::linalg::{inertia, DMat, SMat};
use crate::plasma::{build_cal_a, constant_e};
use crate::scalar::{lit, Real};
use crate::vacuum::{build_b, build_m, RegularizationParams};

use boundary::{boundary_params, boundary_rows, characteristic_split, interface_matrix, interface_penalty_velocity};
use ops::{transport, Dims, SparseCoef};

/// Ratio of `dt` to `min(h)/max speed` allowed.
pub const CFL: f64 = 0.4;
/// Truncation depth of each half-line.
pub const DEPTH: f64 = 8.0;
/// Interface penalty strength in units of `1/ε`.
pub const PENALTY: f64 = 0.5;

/// Radius of the left half-disc taken as the usable RK4 stability region.
const RK4_RADIUS: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    /// Intervals per half-line; each side has `n1 + 1` points.
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub l1: T,
    pub l2: T,
    pub l3: T,
}

impl<T: Real> Grid<T> {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        if n1 < 4 {
            return Err(MhdError::InvalidGrid(format!("N1 = {n1} is too small")));
        }
        if !(n2.is_power_of_two() && n3.is_power_of_two() && n2 >= 4 && n3 >= 4) {
            return Err(MhdError::InvalidGrid(format!("N2 = {n2}, N3 = {n3} must be powers of two >= 4")));
        }
        Ok(Grid {
            n1,
            n2,
            n3,
            l1: lit(DEPTH),
            l2: T::TAU(),
            l3: T::TAU(),
        })
    }

    pub fn h(&self) -> [T; 3] {
        [
            self.l1 / T::from_usize_lossy(self.n1),
            self.l2 / T::from_usize_lossy(self.n2),
            self.l3 / T::from_usize_lossy(self.n3),
        ]
    }

    pub fn dims(&self) -> Dims<T> {
        Dims {
            n1p: self.n1 + 1,
            n2: self.n2,
            n3: self.n3,
            h: self.h(),
        }
    }

    pub fn plane(&self) -> usize {
        self.n2 * self.n3
    }

    /// Plasma `x₁` of row `i1`.
    pub fn x1_plus(&self, i1: usize) -> T {
        T::from_usize_lossy(i1) * self.h()[0]
    }

    /// Vacuum `x₁` of row `i1`; the interface is the last row.
    pub fn x1_minus(&self, i1: usize) -> T {
        -T::from_usize_lossy(self.n1 - i1) * self.h()[0]
    }

    pub fn x2(&self, i2: usize) -> T {
        T::from_usize_lossy(i2) * self.h()[1]
    }

    pub fn x3(&self, i3: usize) -> T {
        T::from_usize_lossy(i3) * self.h()[2]
    }
}

/// Compactly supported forcing on the velocity rows with a `sin²(πt/T)` clock.
#[derive(Clone, Debug)]
pub struct Forcing<T> {
    pub family: ForcingFamily,
    pub amplitude: T,
    pub t_end: T,
    pub center: [T; 3],
    /// Semi-axes of the ellipsoidal support; tangentially wide so coarse grids resolve it.
    pub radius: [T; 3],
    /// Weights of the `u₁` and `u₂` rows.
    pub direction: [T; 2],
}

impl<T: Real> Forcing<T> {
    pub fn bump(amplitude: T, t_end: T) -> Self {
        Forcing {
            family: ForcingFamily::Bump,
            amplitude,
            t_end,
            center: [T::one(), T::PI(), T::PI()],
            radius: [lit(0.95), lit(2.5), lit(2.5)],
            direction: [T::one(), lit(0.5)],
        }
    }

    pub fn zero(t_end: T) -> Self {
        Forcing {
            family: ForcingFamily::Zero,
            ..Self::bump(T::zero(), t_end)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.family == ForcingFamily::Zero || self.amplitude == T::zero()
    }

    /// Time profile and its derivative.
    pub fn clock(&self, t: T) -> (T, T) {
        if t <= T::zero() || t >= self.t_end {
            return (T::zero(), T::zero());
        }
        let w = T::PI() / self.t_end;
        let s = (w * t).sin();
        (s * s, w * (w * t + w * t).sin())
    }

    pub fn spatial(&self, x: [T; 3]) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let mut r2 = T::zero();
        for k in 0..3 {
            let d = (x[k] - self.center[k]) / self.radius[k];
            r2 += d * d;
        }
        if r2 >= T::one() {
            T::zero()
        } else {
            let s = T::one() - r2;
            self.amplitude * s * s * s * s
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledState<T> {
    /// `𝒰`, 8 components per plasma point.
    pub u: Vec<T>,
    /// `W`, 6 components per vacuum point.
    pub w: Vec<T>,
    pub phi: Vec<T>,
    pub t: T,
}

impl<T: Real> CoupledState<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        let n = grid.dims().len();
        CoupledState {
            u: vec![T::zero(); 8 * n],
            w: vec![T::zero(); 6 * n],
            phi: vec![T::zero(); grid.plane()],
            t: T::zero(),
        }
    }

    fn fields_mut(&mut self) -> [&mut Vec<T>; 3] {
        [&mut self.u, &mut self.w, &mut self.phi]
    }

    fn fields(&self) -> [&Vec<T>; 3] {
        [&self.u, &self.w, &self.phi]
    }

    /// `self = x + a·k`, clock included.
    fn set_axpy(&mut self, x: &Self, a: T, k: &Self) {
        self.t = x.t + a;
        for ((o, xv), kv) in self.fields_mut().into_iter().zip(x.fields()).zip(k.fields()) {
            for ((o, xv), kv) in o.iter_mut().zip(xv).zip(kv) {
                *o = *xv + a * *kv;
            }
        }
    }

    /// `self = x + a·k` on the fields only.
    fn set_combination(&mut self, x: &Self, a: T, k: &Self) {
        let t = self.t;
        self.set_axpy(x, a, k);
        self.t = t;
    }

    /// `self += a·k` on the fields only.
    fn add_scaled(&mut self, a: T, k: &Self) {
        for (o, kv) in self.fields_mut().into_iter().zip(k.fields()) {
            for (o, kv) in o.iter_mut().zip(kv) {
                *o += a * *kv;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.w).chain(&self.phi).all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.u
            .iter()
            .chain(&self.w)
            .chain(&self.phi)
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

/// Scratch states for [`CoupledSolver::step_in_place`].
#[derive(Clone, Debug)]
pub struct Workspace<T> {
    pub rate: CoupledState<T>,
    k: CoupledState<T>,
    stage: CoupledState<T>,
    acc: CoupledState<T>,
}

impl<T: Real> Workspace<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let z = CoupledState::zeros(grid);
        Workspace {
            rate: z.clone(),
            k: z.clone(),
            stage: z.clone(),
            acc: z,
        }
    }
}

/// Precomputed operator for one planar experiment.
#[derive(Clone, Debug)]
pub struct CoupledSolver<T> {
    pub grid: Grid<T>,
    pub dt: T,
    pub steps: usize,
    pub epsilon: T,
    pub eos: EosParams<T>,
    pub point: BasicStatePoint<T>,
    pub params: RegularizationParams<T>,
    pub forcing: Forcing<T>,
    /// `A′_j = 𝒜_j + ℰ_{1,j+1}`, `j = 1..3`, and `𝒜₀`.
    pub a: [SMat<T, 8>; 4],
    /// `M_α`, `α = 0..3`.
    pub m: [SMat<T, 6>; 4],
    pub cfl_limit: T,
    dims: Dims<T>,
    cp: SparseCoef<T>,
    cv: SparseCoef<T>,
    a0_inv: SMat<T, 8>,
    g: DMat<T>,
    b: [T; 3],
    /// `(2/h₁)𝒜₀⁻¹X_𝒰` and `(2/h₁)M₀⁻¹X_W`.
    sat_u: DMat<T>,
    sat_w: DMat<T>,
    far_u: SMat<T, 8>,
    far_w: SMat<T, 6>,
    forcing_field: Vec<(usize, T)>,
}

/// Spectral radius of `A₀⁻¹A` for symmetric `A` and `A₀ > 0`.
fn speed<T: Real, const N: usize>(a0: &SMat<T, N>, a: &SMat<T, N>) -> T {
    let (s, _, _) = characteristic_split(a0, a);
    s.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Spectral norm of `W^{-1/2} P W^{-1/2}`, the size of a boundary term `W⁻¹P` measured in the
/// energy norm with weight `W > 0`.
fn energy_norm<T: Real>(w: &DMat<T>, p: &DMat<T>) -> T {
    let wi = w.sym_map(|l| l.sqrt().recip());
    let b = wi.matmul(p).matmul(&wi);
    let (eigs, _) = b.transpose().matmul(&b).sym_eigen();
    eigs.iter().fold(T::zero(), |m, l| m.max(*l)).sqrt()
}

impl<T: Real> CoupledSolver<T> {
    /// Assembles the operator. `dt = None` picks 90% of the stability limit.
    pub fn new(
        grid: Grid<T>,
        dt: Option<T>,
        t_end: T,
        epsilon: T,
        basic: &BasicState<T>,
        forcing: Forcing<T>,
    ) -> Result<Self> {
        if !basic.is_planar() {
            // TODO: variable-coefficient assembly (𝒞̂′ and M₄ fields) for curved basic states.
            return Err(MhdError::Config {
                key: "state.family".into(),
                reason: "the time-dependent solver supports planar basic states only".into(),
            });
        }
        let eos = basic.eos;
        let point = basic.boundary_point(T::zero(), T::zero(), T::zero())?;
        let params = boundary_params(&point, epsilon);

        let mut a = [SMat::<T, 8>::zeros(); 4];
        a[0] = build_cal_a(0, &point, &eos)?.entries;
        for j in 1..4 {
            a[j] = build_cal_a(j, &point, &eos)?.entries + constant_e(j + 1).entries;
        }
        let mut m = [SMat::<T, 6>::zeros(); 4];
        for (alpha, slot) in m.iter_mut().enumerate() {
            *slot = build_m(alpha, &params, &point.geometry)?.entries;
        }

        // Incoming counts: one plasma mode, two vacuum modes.
        let tol = lit::<T>(1e-9);
        let e12 = constant_e::<T>(2).entries.sym_eigenvalues();
        assert_eq!(inertia(&e12, tol), (1, 6, 1), "E12 must have exactly one incoming mode");
        let b1 = build_b(1, epsilon).entries.sym_eigenvalues();
        assert_eq!(inertia(&b1, tol), (2, 2, 2), "B1 must have exactly two incoming modes");

        let a0_inv = a[0].inverse().ok_or(MhdError::HyperbolicityViolated {
            rho: f64::NAN,
            rho_p: f64::NAN,
        })?;
        let m0_inv = m[0].inverse().ok_or(MhdError::HyperbolicityViolated {
            rho: (epsilon * crate::scalar::norm3(&params.nu)).as_f64(),
            rho_p: epsilon.as_f64(),
        })?;
        let cp = [a0_inv * a[1], a0_inv * a[2], a0_inv * a[3]];
        let cv = [m0_inv * m[1], m0_inv * m[2], m0_inv * m[3]];

        let h = grid.h();
        let hmin = h[0].min(h[1]).min(h[2]);
        let mut vmax = T::zero();
        for j in 1..4 {
            vmax = vmax.max(speed(&a[0], &a[j])).max(speed(&m[0], &m[j]));
        }
        let s_energy = interface_matrix(&point, &params, &eos)?.scale(-T::one());
        let (g, b) = boundary_rows(&point, epsilon);
        let x = interface_penalty_velocity(&g, &s_energy, lit::<T>(PENALTY) / epsilon);
        let two_h = lit::<T>(2.0) / h[0];
        let sat_u = a0_inv.to_dmat().matmul(&x.block(0, 0, 8, 3)).scale(two_h);
        let sat_w = m0_inv.to_dmat().matmul(&x.block(8, 0, 6, 3)).scale(two_h);
        let (_, _, a_minus) = characteristic_split(&a[0], &a[1]);
        let (_, m_plus, _) = characteristic_split(&m[0], &m[1]);

        // Eigenvalues stay in the left half plane (energy stability); bound their modulus by the
        // interior symbol plus the energy-norm size of the interface and far-field terms.
        let mut weight = DMat::zeros(14, 14);
        weight.set_block(0, 0, &a[0].to_dmat());
        weight.set_block(8, 8, &m[0].to_dmat());
        let mut far = DMat::zeros(14, 14);
        far.set_block(0, 0, &a_minus.to_dmat());
        far.set_block(8, 8, &m_plus.to_dmat());
        let boundary = energy_norm(&weight, &x.matmul(&g)).max(energy_norm(&weight, &far));
        let mut symbol = T::zero();
        for j in 1..4 {
            symbol += speed(&a[0], &a[j]).max(speed(&m[0], &m[j])) / h[j - 1];
        }
        let stiff = symbol + boundary * two_h;
        let cfl_limit = (lit::<T>(CFL) * hmin / vmax).min(lit::<T>(RK4_RADIUS) / stiff);
        let dt_req = dt.unwrap_or(cfl_limit * lit(0.9));
        if dt_req > cfl_limit * lit(1.0 + 1e-12) {
            return Err(MhdError::CflViolated {
                dt: dt_req.as_f64(),
                limit: cfl_limit.as_f64(),
            });
        }
        let steps = (t_end / dt_req - lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
        let dt_eff = t_end / T::from_usize_lossy(steps);

        let far_u = (a0_inv * a_minus).scale(two_h);
        let far_w = (m0_inv * m_plus).scale(-two_h);

        let dims = grid.dims();
        let mut forcing_field = Vec::new();
        for i1 in 0..dims.n1p {
            for i2 in 0..grid.n2 {
                for i3 in 0..grid.n3 {
                    let f = forcing.spatial([grid.x1_plus(i1), grid.x2(i2), grid.x3(i3)]);
                    if f != T::zero() {
                        forcing_field.push(((i1 * grid.n2 + i2) * grid.n3 + i3, f));
                    }
                }
            }
        }

        Ok(CoupledSolver {
            grid,
            dt: dt_eff,
            steps,
            epsilon,
            eos,
            point,
            params,
            forcing,
            a,
            m,
            cfl_limit,
            dims,
            cp: SparseCoef::from_dense(&cp),
            cv: SparseCoef::from_dense(&cv),
            a0_inv,
            g,
            b,
            sat_u,
            sat_w,
            far_u,
            far_w,
            forcing_field,
        })
    }

    /// Builds the planar experiment described by a config.
    pub fn from_config(cfg: &SolverConfig) -> Result<Self> {
        let basic = reference_state::<T>(cfg.state_family)?;
        let grid = Grid::new(cfg.n1, cfg.n2, cfg.n3)?;
        let t_end = lit::<T>(cfg.t_end);
        let forcing = match cfg.forcing_family {
            ForcingFamily::Bump => Forcing::bump(lit(cfg.forcing_amplitude), t_end),
            ForcingFamily::Zero => Forcing::zero(t_end),
        };
        let dt = match cfg.dt {
            TimeStep::Auto => None,
            TimeStep::Fixed(v) => Some(lit(v)),
        };
        Self::new(grid, dt, t_end, lit(cfg.epsilon), &basic, forcing)
    }

    /// Rounds the step count up so that it splits into about `records` equal strides; the
    /// time step only shrinks, so the stability limit still holds.
    pub fn align_steps(&mut self, records: usize) {
        let t_end = self.forcing.t_end;
        let stride = self.steps.div_ceil(records.max(1));
        self.steps = stride * self.steps.div_ceil(stride);
        self.dt = t_end / T::from_usize_lossy(self.steps);
    }

    pub fn dims(&self) -> &Dims<T> {
        &self.dims
    }

    /// Boundary-condition residual `Gz + bφ` at one interface point.
    pub fn boundary_residual(&self, state: &CoupledState<T>, k: usize) -> [T; 3] {
        let n = self.dims.len();
        let plane = self.grid.plane();
        let mut z = [T::zero(); 14];
        z[..8].copy_from_slice(&state.u[8 * k..8 * k + 8]);
        let kw = (n - plane) + k;
        z[8..].copy_from_slice(&state.w[6 * kw..6 * kw + 6]);
        let mut r = [T::zero(); 3];
        for (i, ri) in r.iter_mut().enumerate() {
            let mut s = self.b[i] * state.phi[k];
            for j in 0..14 {
                s += self.g[(i, j)] * z[j];
            }
            *ri = s;
        }
        r
    }

    /// Semi-discrete right-hand side.
    pub fn rhs(&self, s: &CoupledState<T>) -> CoupledState<T> {
        let mut out = CoupledState::zeros(&self.grid);
        self.rhs_into(s, &mut out);
        out
    }

    /// [`Self::rhs`] into a preallocated state of the same shape.
    pub fn rhs_into(&self, s: &CoupledState<T>, out: &mut CoupledState<T>) {
        let d = &self.dims;
        let n = d.len();
        let plane = self.grid.plane();
        let (du, dw) = (&mut out.u, &mut out.w);
        transport::<T, 8>(&s.u, d, &self.cp, du);
        transport::<T, 6>(&s.w, d, &self.cv, dw);

        let (clock, _) = self.forcing.clock(s.t);
        if clock != T::zero() {
            let dir = self.forcing.direction;
            for &(p, f) in &self.forcing_field {
                let (f1, f2) = (clock * f * dir[0], clock * f * dir[1]);
                for r in 0..8 {
                    du[8 * p + r] += self.a0_inv.0[r][1] * f1 + self.a0_inv.0[r][2] * f2;
                }
            }
        }

        for k in 0..plane {
            let g = self.boundary_residual(s, k);
            for r in 0..8 {
                du[8 * k + r] += (0..3).map(|c| self.sat_u[(r, c)] * g[c]).sum::<T>();
            }
            let kw = (n - plane) + k;
            for r in 0..6 {
                dw[6 * kw + r] += (0..3).map(|c| self.sat_w[(r, c)] * g[c]).sum::<T>();
            }
            let ku = (n - plane) + k;
            let uf: [T; 8] = s.u[8 * ku..8 * ku + 8].try_into().unwrap();
            let corr = self.far_u.matvec(&uf);
            for r in 0..8 {
                du[8 * ku + r] += corr[r];
            }
            let wf: [T; 6] = s.w[6 * k..6 * k + 6].try_into().unwrap();
            let corr = self.far_w.matvec(&wf);
            for r in 0..6 {
                dw[6 * k + r] += corr[r];
            }
        }

        // ∂_tφ + v̂₂∂₂φ + v̂₃∂₃φ − φ∂₁v̂_N = u₁.
        let v = self.point.uhat.v;
        let h = self.grid.h();
        let d2 = ops::plane_derivative(&s.phi, self.grid.n2, self.grid.n3, h[1], 1);
        let d3 = ops::plane_derivative(&s.phi, self.grid.n2, self.grid.n3, h[2], 2);
        for k in 0..plane {
            out.phi[k] = -v[1] * d2[k] - v[2] * d3[k] + s.phi[k] * self.point.d1_vn + s.u[8 * k + 1];
        }
        out.t = T::one();
    }

    /// One RK4 step in place. Afterwards `ws.rate` holds the stage-one derivative at the
    /// incoming state.
    pub fn step_in_place(&self, s: &mut CoupledState<T>, ws: &mut Workspace<T>, index: usize) -> Result<()> {
        let dt = self.dt;
        let half = dt * lit(0.5);
        let two = lit::<T>(2.0);
        self.rhs_into(s, &mut ws.rate);
        ws.stage.set_axpy(s, half, &ws.rate);
        self.rhs_into(&ws.stage, &mut ws.k);
        ws.acc.set_combination(&ws.rate, two, &ws.k);
        ws.stage.set_axpy(s, half, &ws.k);
        self.rhs_into(&ws.stage, &mut ws.k);
        ws.acc.add_scaled(two, &ws.k);
        ws.stage.set_axpy(s, dt, &ws.k);
        self.rhs_into(&ws.stage, &mut ws.k);
        ws.acc.add_scaled(T::one(), &ws.k);
        s.add_scaled(dt / lit(6.0), &ws.acc);
        s.t += dt;
        if !s.is_finite() {
            return Err(MhdError::NanDetected { step: index });
        }
        Ok(())
    }

    /// One RK4 step; also returns the stage-one derivative `∂_t` of the incoming state.
    pub fn step_with_rate(&self, s: &CoupledState<T>, index: usize) -> Result<(CoupledState<T>, CoupledState<T>)> {
        let mut ws = Workspace::new(&self.grid);
        let mut next = s.clone();
        self.step_in_place(&mut next, &mut ws, index)?;
        Ok((next, ws.rate))
    }

    pub fn step(&self, s: &CoupledState<T>, index: usize) -> Result<CoupledState<T>> {
        self.step_with_rate(s, index).map(|(n, _)| n)
    }

    /// Discrete energy `½⟨𝒰, 𝒜₀𝒰⟩_H + ½⟨W, M₀W⟩_H`.
    pub fn energy(&self, s: &CoupledState<T>) -> T {
        let d = &self.dims;
        let plane = d.plane();
        let mut e = T::zero();
        for p in 0..d.len() {
            let w = d.weight(p / plane);
            let u: [T; 8] = s.u[8 * p..8 * p + 8].try_into().unwrap();
            let v: [T; 6] = s.w[6 * p..6 * p + 6].try_into().unwrap();
            e += w * (self.a[0].quad(&u) + self.m[0].quad(&v));
        }
        e * lit(0.5)
    }
}

/// The planar reference state used by configs: `Ĥ ⟂ 𝓗̂` tangentially, subsonic tangential flow.
pub fn reference_state<T: Real>(family: StateFamily) -> Result<BasicState<T>> {
    match family {
        StateFamily::Planar => crate::basic_state::make_planar_state(
            [T::zero(), T::one(), lit(0.2)],
            [T::zero(), lit(-0.2), T::one()],
            [T::zero(), lit(0.3), lit(0.2)],
            lit(1.5),
            T::zero(),
            EosParams::default(),
        ),
        StateFamily::Corrugated => crate::basic_state::make_corrugated_state(
            lit(0.05),
            [T::one(), T::zero()],
            [lit(0.3), lit(0.2)],
            T::one(),
            lit(0.2),
            T::one(),
            lit(1.5),
            T::zero(),
            lit(4.0),
            EosParams::default(),
        ),
    }
}
