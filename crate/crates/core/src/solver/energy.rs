//! Time histories of a forced run and the γ-weighted quantities of the energy estimate and of
//! the trace interpolation inequalities, assembled in post-processing.
//!
//! With `u_γ = e^{−γt}u`, `|∂_t u_γ|² = e^{−2γt}(|u_t|² − 2γ u·u_t + γ²|u|²)`, so one run
//! stores `∫|u|²`, `∫u·u_t`, `∫|u_t|²`, `∫|Zu|²` per record and any `γ` is evaluated later.

use super::monitor::{monitor_constraints, ConstraintResiduals};
use super::ops::{component, plane_derivative};
use super::{CoupledSolver, CoupledState, Workspace};
use crate::config::SolverConfig;
use crate::error::Result;
use crate::norms::{
    gradient_integrals, make_conormal_weight, space_time_norm_sq, weighted_sobolev_norm_sq, ConormalWeight,
    HalfSpaceGrid, NormFlavor, NormSpec, PeriodicGrid,
};
use crate::scalar::{lit, Real};

/// `(∫|u|², ∫u·u_t, ∫|u_t|², ∫|Zu|²)` summed over components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments<T> {
    pub uu: T,
    pub ut: T,
    pub tt: T,
    pub grad: T,
}

impl<T: Real> Moments<T> {
    fn add(&mut self, o: &Self) {
        self.uu += o.uu;
        self.ut += o.ut;
        self.tt += o.tt;
        self.grad += o.grad;
    }

    /// `e^{−2γt}(γ²|u|² + |∂_t u_γ|²e^{2γt} + |Zu|²)`: the `H¹_γ`-type integrand at one time.
    pub fn h1_density(&self, gamma: T, t: T) -> T {
        let g2 = gamma * gamma;
        let e2 = (-(gamma + gamma) * t).exp();
        e2 * (g2 * self.uu + (self.tt - (gamma + gamma) * self.ut + g2 * self.uu) + self.grad)
    }

    pub fn l2_density(&self, gamma: T, t: T) -> T {
        (-(gamma + gamma) * t).exp() * self.uu
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record<T> {
    pub t: T,
    pub plasma: Moments<T>,
    pub vacuum: Moments<T>,
    pub front: Moments<T>,
    pub forcing: Moments<T>,
    /// `∫_ω 𝒜^ε dx′`.
    pub boundary_form: T,
    pub residuals: ConstraintResiduals<T>,
}

/// Everything needed to evaluate the estimate for any `γ` after the run.
#[derive(Clone, Debug)]
pub struct History<T> {
    pub records: Vec<Record<T>>,
    /// Plasma traces `(q, u₁, h₁)` per record, component-major planes.
    pub trace_u: Vec<T>,
    /// Vacuum traces `W` per record, component-major planes.
    pub trace_w: Vec<T>,
    pub record_dt: T,
    pub n2: usize,
    pub n3: usize,
    pub l2: T,
    pub l3: T,
    pub epsilon: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport<T> {
    pub gamma: T,
    pub epsilon: T,
    pub plasma_h1tan: T,
    pub vacuum_h1: T,
    pub trace_plasma_h12: T,
    pub trace_vacuum_h12: T,
    pub front_h1: T,
    pub forcing_h1tan: T,
    /// `γ(‖𝒰‖² + ‖W‖² + traces) + γ²‖φ‖²`.
    pub lhs: T,
    /// `‖𝓕‖²/γ`.
    pub rhs: T,
    pub ratio: T,
    /// `∫∫ 𝒜^ε dx′dt`, unweighted.
    pub boundary_form: T,
    pub constraint_residuals: ConstraintResiduals<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceReport<T> {
    pub gamma: T,
    pub plasma_lhs: T,
    pub plasma_rhs: T,
    pub vacuum_lhs: T,
    pub vacuum_rhs: T,
}

impl<T: Real> TraceReport<T> {
    fn ratio(a: T, b: T) -> T {
        if b == T::zero() {
            T::zero()
        } else {
            a / b
        }
    }

    pub fn plasma_ratio(&self) -> T {
        Self::ratio(self.plasma_lhs, self.plasma_rhs)
    }

    pub fn vacuum_ratio(&self) -> T {
        Self::ratio(self.vacuum_lhs, self.vacuum_rhs)
    }
}

struct Recorder<T> {
    hs: HalfSpaceGrid<T>,
    sigma: ConormalWeight<T>,
    forcing_static: Moments<T>,
}

fn field_moments<T: Real>(
    f: &[T],
    rate: &[T],
    nc: usize,
    hs: &HalfSpaceGrid<T>,
    weight: Option<&ConormalWeight<T>>,
) -> Moments<T> {
    let per = hs.n2 * hs.n3;
    let mut m = Moments::default();
    for c in 0..nc {
        let fc = component(f, nc, c);
        let rc = component(rate, nc, c);
        let (uu, grad) = gradient_integrals(&fc, hs, weight);
        let mut ut = T::zero();
        let mut tt = T::zero();
        for (i, (a, b)) in fc.iter().zip(&rc).enumerate() {
            let w = hs.weight(i / per);
            ut += w * *a * *b;
            tt += w * *b * *b;
        }
        m.add(&Moments { uu, ut, tt, grad });
    }
    m
}

impl<T: Real> Recorder<T> {
    fn new(solver: &CoupledSolver<T>) -> Self {
        let g = &solver.grid;
        let hs = HalfSpaceGrid {
            n1: g.n1 + 1,
            n2: g.n2,
            n3: g.n3,
            h1: g.h()[0],
            l2: g.l2,
            l3: g.l3,
        };
        let x1: Vec<T> = (0..=g.n1).map(|i| g.x1_plus(i)).collect();
        let sigma = make_conormal_weight(&x1, g.l1);
        // The forcing is clock(t)·B(x); its moments are clock², clock·clock′, clock′² times ∫|B|².
        let mut b = vec![T::zero(); 8 * hs.len()];
        for i1 in 0..=g.n1 {
            for i2 in 0..g.n2 {
                for i3 in 0..g.n3 {
                    let p = (i1 * g.n2 + i2) * g.n3 + i3;
                    let f = solver.forcing.spatial([g.x1_plus(i1), g.x2(i2), g.x3(i3)]);
                    b[8 * p + 1] = f * solver.forcing.direction[0];
                    b[8 * p + 2] = f * solver.forcing.direction[1];
                }
            }
        }
        let zero = vec![T::zero(); b.len()];
        let forcing_static = field_moments(&b, &zero, 8, &hs, Some(&sigma));
        Recorder {
            hs,
            sigma,
            forcing_static,
        }
    }

    fn record(&self, solver: &CoupledSolver<T>, s: &CoupledState<T>, rate: &CoupledState<T>) -> Record<T> {
        let g = &solver.grid;
        let plane = g.plane();
        let h = g.h();
        let plasma = field_moments(&s.u, &rate.u, 8, &self.hs, Some(&self.sigma));
        let vacuum = field_moments(&s.w, &rate.w, 6, &self.hs, None);

        let area = h[1] * h[2];
        let d2 = plane_derivative(&s.phi, g.n2, g.n3, h[1], 1);
        let d3 = plane_derivative(&s.phi, g.n2, g.n3, h[2], 2);
        let mut front = Moments::default();
        for k in 0..plane {
            front.uu += area * s.phi[k] * s.phi[k];
            front.ut += area * s.phi[k] * rate.phi[k];
            front.tt += area * rate.phi[k] * rate.phi[k];
            front.grad += area * (d2[k] * d2[k] + d3[k] * d3[k]);
        }

        let (c, cd) = solver.forcing.clock(s.t);
        let fs = &self.forcing_static;
        let forcing = Moments {
            uu: c * c * fs.uu,
            ut: c * cd * fs.uu,
            tt: cd * cd * fs.uu,
            grad: c * c * fs.grad,
        };

        let n = solver.dims().len();
        let half = lit::<T>(0.5);
        let mut bf = T::zero();
        for k in 0..plane {
            let u: [T; 8] = s.u[8 * k..8 * k + 8].try_into().unwrap();
            let kw = n - plane + k;
            let w: [T; 6] = s.w[6 * kw..6 * kw + 6].try_into().unwrap();
            bf += area * half * (solver.m[1].quad(&w) - solver.a[1].quad(&u));
        }

        Record {
            t: s.t,
            plasma,
            vacuum,
            front,
            forcing,
            boundary_form: bf,
            residuals: monitor_constraints(solver, s),
        }
    }
}

/// Runs from zero data to `T`, recording about `target_records` snapshots.
pub fn run_history<T: Real>(solver: &CoupledSolver<T>, target_records: usize) -> Result<History<T>> {
    let g = &solver.grid;
    let plane = g.plane();
    let n = solver.dims().len();
    let every = record_stride(solver.steps, target_records);
    let recorder = Recorder::new(solver);
    let mut hist = History {
        records: Vec::new(),
        trace_u: Vec::new(),
        trace_w: Vec::new(),
        record_dt: solver.dt * T::from_usize_lossy(every),
        n2: g.n2,
        n3: g.n3,
        l2: g.l2,
        l3: g.l3,
        epsilon: solver.epsilon,
    };
    let push_traces = |hist: &mut History<T>, s: &CoupledState<T>| {
        for c in [0usize, 1, 4] {
            hist.trace_u.extend((0..plane).map(|k| s.u[8 * k + c]));
        }
        for c in 0..6 {
            hist.trace_w.extend((0..plane).map(|k| s.w[6 * (n - plane + k) + c]));
        }
    };
    let mut state = CoupledState::zeros(g);
    let mut ws = Workspace::new(g);
    for i in 0..solver.steps {
        if i % every == 0 {
            let before = state.clone();
            solver.step_in_place(&mut state, &mut ws, i)?;
            hist.records.push(recorder.record(solver, &before, &ws.rate));
            push_traces(&mut hist, &before);
        } else {
            solver.step_in_place(&mut state, &mut ws, i)?;
        }
    }
    {
        let rate = solver.rhs(&state);
        hist.records.push(recorder.record(solver, &state, &rate));
        push_traces(&mut hist, &state);
    }
    Ok(hist)
}

/// Divisor of `steps` giving the record count closest to `target`, so the last record lands
/// exactly on `T`.
fn record_stride(steps: usize, target: usize) -> usize {
    let target = target.max(1);
    (1..=steps.max(1))
        .filter(|e| steps.is_multiple_of(*e))
        .min_by_key(|e| (steps / e).abs_diff(target))
        .unwrap_or(1)
}

fn trapezoid<T: Real>(vals: &[T], dt: T) -> T {
    if vals.len() < 2 {
        return T::zero();
    }
    let inner: T = vals[1..vals.len() - 1].iter().copied().sum();
    dt * (inner + lit::<T>(0.5) * (vals[0] + vals[vals.len() - 1]))
}

impl<T: Real> History<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn integrate(&self, f: impl Fn(&Record<T>) -> T) -> T {
        let v: Vec<T> = self.records.iter().map(f).collect();
        trapezoid(&v, self.record_dt)
    }

    /// Space-time `H^s_γ` norm of the stored traces, summed over components.
    fn trace_norm(&self, data: &[T], nc: usize, gamma: T, s: T) -> T {
        let nt = self.len();
        let plane = self.n2 * self.n3;
        let mut total = T::zero();
        for c in 0..nc {
            let mut hist = Vec::with_capacity(nt * plane);
            for r in 0..nt {
                let off = (r * nc + c) * plane;
                hist.extend_from_slice(&data[off..off + plane]);
            }
            total += space_time_norm_sq(&hist, nt, self.record_dt, self.n2, self.n3, self.l2, self.l3, gamma, s);
        }
        total
    }

    pub fn residuals(&self) -> ConstraintResiduals<T> {
        self.records
            .iter()
            .fold(ConstraintResiduals::default(), |acc, r| acc.merge(&r.residuals))
    }

    pub fn energy_report(&self, gamma: T) -> EnergyReport<T> {
        let plasma = self.integrate(|r| r.plasma.h1_density(gamma, r.t));
        let vacuum = self.integrate(|r| r.vacuum.h1_density(gamma, r.t));
        let front = self.integrate(|r| r.front.h1_density(gamma, r.t));
        let forcing = self.integrate(|r| r.forcing.h1_density(gamma, r.t));
        let half = lit::<T>(0.5);
        let tu = self.trace_norm(&self.trace_u, 3, gamma, half);
        let tw = self.trace_norm(&self.trace_w, 6, gamma, half);
        let lhs = gamma * (plasma + vacuum + tu + tw) + gamma * gamma * front;
        let rhs = forcing / gamma;
        EnergyReport {
            gamma,
            epsilon: self.epsilon,
            plasma_h1tan: plasma,
            vacuum_h1: vacuum,
            trace_plasma_h12: tu,
            trace_vacuum_h12: tw,
            front_h1: front,
            forcing_h1tan: forcing,
            lhs,
            rhs,
            ratio: if rhs == T::zero() { T::zero() } else { lhs / rhs },
            boundary_form: self.integrate(|r| r.boundary_form),
            constraint_residuals: self.residuals(),
        }
    }

    /// Both sides of the two trace interpolation inequalities at `γ`.
    pub fn trace_report(&self, gamma: T) -> TraceReport<T> {
        let half = lit::<T>(0.5);
        let plasma = self.integrate(|r| r.plasma.h1_density(gamma, r.t));
        let vacuum = self.integrate(|r| r.vacuum.h1_density(gamma, r.t));
        let forcing_l2 = self.integrate(|r| r.forcing.l2_density(gamma, r.t));
        TraceReport {
            gamma,
            plasma_lhs: gamma * self.trace_norm(&self.trace_u, 3, gamma, T::zero())
                + self.trace_norm(&self.trace_u, 3, gamma, half),
            plasma_rhs: forcing_l2 + plasma,
            vacuum_lhs: gamma * self.trace_norm(&self.trace_w, 6, gamma, T::zero())
                + self.trace_norm(&self.trace_w, 6, gamma, half),
            vacuum_rhs: vacuum,
        }
    }

    /// Per-record rows `[t, plasma_h1tan, vacuum_h1, trace_h12, front_h1, boundary_form,
    /// div_h, div_frakh, div_frake]` at one `γ`.
    pub fn csv_rows(&self, gamma: T) -> Vec<[T; 9]> {
        let plane = self.n2 * self.n3;
        let grid = PeriodicGrid {
            dims: vec![self.n2, self.n3],
            lengths: vec![self.l2, self.l3],
        };
        let spec = NormSpec::new(gamma.max(T::one()), lit(0.5), NormFlavor::SobolevWeighted)
            .expect("gamma clamped to at least 1");
        self.records
            .iter()
            .enumerate()
            .map(|(r, rec)| {
                let mut trace = T::zero();
                for c in 0..3 {
                    let off = (r * 3 + c) * plane;
                    trace += weighted_sobolev_norm_sq(&self.trace_u[off..off + plane], &grid, &spec);
                }
                for c in 0..6 {
                    let off = (r * 6 + c) * plane;
                    trace += weighted_sobolev_norm_sq(&self.trace_w[off..off + plane], &grid, &spec);
                }
                let e2 = (-(gamma + gamma) * rec.t).exp();
                [
                    rec.t,
                    rec.plasma.h1_density(gamma, rec.t),
                    rec.vacuum.h1_density(gamma, rec.t),
                    e2 * trace,
                    rec.front.h1_density(gamma, rec.t),
                    rec.boundary_form,
                    rec.residuals.div_h,
                    rec.residuals.div_frak_h,
                    rec.residuals.div_frak_e,
                ]
            })
            .collect()
    }
}

/// Records per run used by [`run_energy_experiment`].
pub const RECORDS: usize = 400;

/// Runs the configured experiment and evaluates the estimate at `reg.gamma`.
pub fn run_energy_experiment(cfg: &SolverConfig) -> Result<(EnergyReport<f64>, History<f64>)> {
    let mut solver = CoupledSolver::<f64>::from_config(cfg)?;
    solver.align_steps(RECORDS);
    let hist = run_history(&solver, RECORDS)?;
    Ok((hist.energy_report(cfg.gamma), hist))
}

/// Interpolation reports at several `γ` from one history.
pub fn trace_interpolation_check<T: Real>(hist: &History<T>, gammas: &[T]) -> Vec<TraceReport<T>> {
    gammas.iter().map(|&g| hist.trace_report(g)).collect()
}
