//! Seeded randomized checks of the algebraic identities: symmetry, definiteness regions,
//! determinant closed forms, characteristic counts and the boundary quadratic form.
//!
//! Every check is aggregated per identity name in first-seen order, so `draws = 0` yields an
//! empty report. The first failing draw of each identity is kept for reproduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basic_state::{make_corrugated_state, BasicStatePoint};
use crate::bundle::MatrixBundle;
use crate::eos::EosParams;
use crate::linalg::{inertia, SMat};
use crate::plasma::{build_a, build_cal_a_with_state, constant_e, InterfaceGeometry, PlasmaState};
use crate::solver::boundary::{boundary_quadratic_form, boundary_quadratic_form_expanded, boundary_rows, project_onto_kernel};
use crate::vacuum::{build_b, build_frak_b, build_m, choose_nu, det_frak_b1, det_m1_closed, RegularizationParams};

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const DET_FRAK_B1_TOL: f64 = 1e-10;
pub const DET_M1_TOL: f64 = 1e-8;
pub const SPECTRUM_TOL: f64 = 1e-12;
/// Zero threshold for eigenvalue counts, relative to the largest `|λ|`.
pub const INERTIA_TOL: f64 = 1e-9;
pub const BOUNDARY_FORM_TOL: f64 = 1e-10;
pub const EXPANDED_FORM_TOL: f64 = 1e-12;

/// Deliberate corruption of a builder, used to prove the suite can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Adds `1e-3` to the `(1,2)` entry of `A₀` only.
    AsymmetricA0,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailingDraw {
    pub draw: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// Largest observed error measure (same units as `tol`).
    pub worst: f64,
    pub tol: f64,
    pub first_failure: Option<FailingDraw>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityReport {
    pub seed: u64,
    pub draws: usize,
    pub outcomes: Vec<IdentityOutcome>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(IdentityOutcome::passed)
    }

    pub fn outcome(&self, name: &str) -> Option<&IdentityOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    /// Records one check. `err` is compared against `tol`; NaN counts as a failure.
    fn record(&mut self, name: &'static str, draw: usize, err: f64, tol: f64, detail: impl FnOnce() -> String) {
        let pos = match self.outcomes.iter().position(|o| o.name == name) {
            Some(p) => p,
            None => {
                self.outcomes.push(IdentityOutcome {
                    name,
                    checked: 0,
                    failures: 0,
                    worst: 0.0,
                    tol,
                    first_failure: None,
                });
                self.outcomes.len() - 1
            }
        };
        let o = &mut self.outcomes[pos];
        o.checked += 1;
        if err.is_nan() || err > o.worst {
            o.worst = err;
        }
        if !(err <= tol) {
            o.failures += 1;
            if o.first_failure.is_none() {
                o.first_failure = Some(FailingDraw { draw, detail: detail() });
            }
        }
    }

    /// Boolean variant of [`Self::record`].
    fn record_bool(&mut self, name: &'static str, draw: usize, ok: bool, detail: impl FnOnce() -> String) {
        self.record(name, draw, if ok { 0.0 } else { 1.0 }, 0.0, detail);
    }
}

/// One admissible random draw.
#[derive(Clone, Copy, Debug)]
pub struct Draw {
    pub eos: EosParams<f64>,
    pub state: PlasmaState<f64>,
    pub geometry: InterfaceGeometry<f64>,
    /// `ε|ν| < 1`.
    pub params: RegularizationParams<f64>,
    /// Same `ν` with `ε|ν| > 1`.
    pub outside: RegularizationParams<f64>,
}

fn sym_unit(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.0..1.0)
}

/// Random state, geometry and regularization parameters. Pressure, `∂₁Φ̂₁ ≥ 1/2` and
/// `|ν₁| ≥ 0.2` are enforced by construction so the closed forms are well conditioned.
pub fn random_draw(rng: &mut ChaCha8Rng) -> Draw {
    let eos = EosParams::new(rng.gen_range(1.2..2.5), rng.gen_range(0.5..2.0)).expect("admissible range");
    let h = [sym_unit(rng), sym_unit(rng), sym_unit(rng)];
    let p = rng.gen_range(0.2..2.0);
    let q = p + 0.5 * (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]);
    let v = [sym_unit(rng), sym_unit(rng), sym_unit(rng)];
    let state = PlasmaState::new(q, v, h, rng.gen_range(-0.5..0.5));
    let geometry = InterfaceGeometry {
        dpsi_t: sym_unit(rng),
        dpsi_2: sym_unit(rng),
        dpsi_3: sym_unit(rng),
        d1phi1: rng.gen_range(0.5..2.0),
    };
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let nu = [sign * rng.gen_range(0.2..1.5), 1.5 * sym_unit(rng), 1.5 * sym_unit(rng)];
    let norm = (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt();
    let inside = rng.gen_range(0.1..0.9);
    let outside = rng.gen_range(1.1..3.0);
    Draw {
        eos,
        state,
        geometry,
        params: RegularizationParams::new(inside / norm, nu),
        outside: RegularizationParams::new(outside / norm, nu),
    }
}

/// Random corrugated front point (rejection-sampled until the state is admissible) together
/// with `ε` such that `ε|ν| < 1` for `ν` from the basic state.
pub fn random_boundary_point(rng: &mut ChaCha8Rng) -> (BasicStatePoint<f64>, EosParams<f64>, f64) {
    loop {
        let eos = EosParams::new(rng.gen_range(1.2..2.5), rng.gen_range(0.5..2.0)).expect("admissible range");
        let k = [rng.gen_range(-2..=2) as f64, rng.gen_range(-2..=2) as f64];
        if k == [0.0, 0.0] {
            continue;
        }
        let state = make_corrugated_state(
            rng.gen_range(0.02..0.3),
            k,
            [sym_unit(rng), sym_unit(rng)],
            sym_unit(rng),
            sym_unit(rng),
            rng.gen_range(0.3..1.5),
            rng.gen_range(1.5..3.0),
            rng.gen_range(-0.3..0.3),
            rng.gen_range(2.0..8.0),
            eos,
        );
        let Ok(state) = state else { continue };
        let (t, x2, x3) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0));
        let Ok(p) = state.boundary_point(t, x2, x3) else { continue };
        let nu = choose_nu(&p);
        let norm = (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt();
        let eps = rng.gen_range(0.05..0.9) / norm.max(1.0);
        return (p, eos, eps);
    }
}

fn check_symmetry<const N: usize>(report: &mut IdentityReport, draw: usize, b: &MatrixBundle<f64, N>) {
    if b.symmetric_expected {
        let err = b.relative_asymmetry();
        report.record("symmetry", draw, err, SYMMETRY_TOL, || format!("{} relative asymmetry {err:.3e}", b.tag.name()));
    }
}

fn check_pd<const N: usize>(report: &mut IdentityReport, name: &'static str, draw: usize, m: &SMat<f64, N>) {
    let lmin = m.min_eigenvalue();
    report.record_bool(name, draw, m.is_positive_definite(), || format!("smallest eigenvalue {lmin:.6e}"));
}

fn rel_err(num: f64, closed: f64) -> f64 {
    (num - closed).abs() / closed.abs().max(f64::MIN_POSITIVE)
}

/// Sorted eigenvalues against a sorted target, relative to the largest target magnitude.
fn spectrum_err<const N: usize>(m: &SMat<f64, N>, target: &[f64; N]) -> f64 {
    let mut eigs = m.sym_eigenvalues();
    eigs.sort_by(f64::total_cmp);
    let scale = target.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
    eigs.iter().zip(target).fold(0.0_f64, |w, (a, b)| w.max((a - b).abs())) / scale
}

fn matrix_checks(report: &mut IdentityReport, draw: usize, d: &Draw, fault: Fault) {
    let fail = |e: crate::MhdError| move || format!("builder error: {e}");
    for alpha in 0..4 {
        match build_a(alpha, &d.state, &d.eos) {
            Ok(mut b) => {
                if alpha == 0 && fault == Fault::AsymmetricA0 {
                    b.entries.0[0][1] += 1e-3;
                }
                check_symmetry(report, draw, &b);
                if alpha == 0 {
                    check_pd(report, "A0 positive definite", draw, &b.entries);
                }
            }
            Err(e) => report.record_bool("symmetry", draw, false, fail(e)),
        }
        match build_cal_a_with_state(alpha, &d.state, &d.geometry, &d.eos) {
            Ok(b) => {
                check_symmetry(report, draw, &b);
                if alpha == 0 {
                    check_pd(report, "calA0 positive definite", draw, &b.entries);
                }
            }
            Err(e) => report.record_bool("symmetry", draw, false, fail(e)),
        }
        let fb = build_frak_b(alpha, &d.params);
        check_symmetry(report, draw, &fb);
        match build_m(alpha, &d.params, &d.geometry) {
            Ok(b) => {
                check_symmetry(report, draw, &b);
                if alpha == 0 {
                    check_pd(report, "M0 positive definite", draw, &b.entries);
                }
                if alpha == 1 {
                    let (num, closed) = (b.entries.det(), det_m1_closed(&d.params, &d.geometry));
                    let err = rel_err(num, closed);
                    report.record("det M1 closed form", draw, err, DET_M1_TOL, || {
                        format!("numeric {num:.16e} closed {closed:.16e}")
                    });
                }
            }
            Err(e) => report.record_bool("symmetry", draw, false, fail(e)),
        }
    }
    for j in 1..4 {
        check_symmetry(report, draw, &build_b(j, d.params.epsilon));
    }
    for j in 2..5 {
        check_symmetry(report, draw, &constant_e::<f64>(j));
    }

    check_pd(report, "frakB0 positive definite inside", draw, &build_frak_b(0, &d.params).entries);
    let outside = build_frak_b(0, &d.outside).entries;
    let lmin = outside.min_eigenvalue();
    report.record_bool("frakB0 not positive definite outside", draw, !outside.is_positive_definite(), || {
        format!("eps|nu| = {:.6e} but smallest eigenvalue {lmin:.6e}", d.outside.epsilon * norm(&d.outside.nu))
    });

    let (num, closed) = (build_frak_b(1, &d.params).entries.det(), det_frak_b1(&d.params));
    let err = rel_err(num, closed);
    report.record("det frakB1 closed form", draw, err, DET_FRAK_B1_TOL, || format!("numeric {num:.16e} closed {closed:.16e}"));

    let e12 = constant_e::<f64>(2).entries;
    let target = [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    let err = spectrum_err(&e12, &target);
    let counts = inertia(&e12.sym_eigenvalues(), INERTIA_TOL);
    report.record("E12 spectrum", draw, if counts == (1, 6, 1) { err } else { f64::INFINITY }, SPECTRUM_TOL, || {
        format!("inertia {counts:?}, eigenvalue error {err:.3e}")
    });

    let inv = d.params.epsilon.recip();
    let b1 = build_b(1, d.params.epsilon).entries;
    let target = [-inv, -inv, 0.0, 0.0, inv, inv];
    let err = spectrum_err(&b1, &target);
    let counts = inertia(&b1.sym_eigenvalues(), INERTIA_TOL);
    report.record("B1 spectrum", draw, if counts == (2, 2, 2) { err } else { f64::INFINITY }, SPECTRUM_TOL, || {
        format!("epsilon {:.16e}: inertia {counts:?}, eigenvalue error {err:.3e}", d.params.epsilon)
    });
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `det M₁ = 0` at a front point of a curved basic state once `ν` is chosen from it.
fn characteristic_det_check(report: &mut IdentityReport, draw: usize, rng: &mut ChaCha8Rng) {
    let (p, _, eps) = random_boundary_point(rng);
    let params = RegularizationParams::new(eps, choose_nu(&p));
    match build_m(1, &params, &p.geometry) {
        Ok(m) => {
            let scale = m.entries.max_abs().powi(6);
            let det = m.entries.det();
            let err = det.abs() / scale;
            report.record("det M1 vanishes for chosen nu", draw, err, DET_M1_TOL, || {
                format!("det {det:.6e} at scale {scale:.6e}")
            });
        }
        Err(e) => report.record_bool("det M1 vanishes for chosen nu", draw, false, || format!("builder error: {e}")),
    }
}

/// Matrix-identity suite over `draws` seeded random admissible draws.
pub fn run_identity_suite(seed: u64, draws: usize, fault: Fault) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IdentityReport {
        seed,
        draws,
        outcomes: Vec::new(),
    };
    for draw in 0..draws {
        let d = random_draw(&mut rng);
        matrix_checks(&mut report, draw, &d, fault);
        characteristic_det_check(&mut report, draw, &mut rng);
    }
    report
}

/// Boundary-form checks: on states projected onto the homogeneous boundary rows the form
/// vanishes, and on unconstrained states the matrix and expanded forms agree.
pub fn run_boundary_form_suite(seed: u64, draws: usize) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IdentityReport {
        seed,
        draws,
        outcomes: Vec::new(),
    };
    for draw in 0..draws {
        let (p, eos, eps) = random_boundary_point(&mut rng);
        let params = RegularizationParams::new(eps, choose_nu(&p));
        let z: Vec<f64> = (0..14).map(|_| sym_unit(&mut rng)).collect();
        let split = |z: &[f64]| {
            let mut u = [0.0; 8];
            let mut w = [0.0; 6];
            u.copy_from_slice(&z[..8]);
            w.copy_from_slice(&z[8..]);
            (u, w)
        };

        let (g, _) = boundary_rows(&p, eps);
        let zk = project_onto_kernel(&g, &z);
        let n2: f64 = zk.iter().map(|x| x * x).sum();
        let (u, w) = split(&zk);
        match boundary_quadratic_form(&u, &w, &p, &params, &eos) {
            Ok(form) => {
                let err = form.abs() / n2.max(f64::MIN_POSITIVE);
                report.record("boundary form vanishes on homogeneous conditions", draw, err, BOUNDARY_FORM_TOL, || {
                    format!("form {form:.6e}, state norm^2 {n2:.6e}, epsilon {eps:.6e}")
                });
            }
            Err(e) => report.record_bool("boundary form vanishes on homogeneous conditions", draw, false, || {
                format!("builder error: {e}")
            }),
        }

        let (u, w) = split(&z);
        match boundary_quadratic_form(&u, &w, &p, &params, &eos) {
            Ok(form) => {
                let expanded = boundary_quadratic_form_expanded(&u, &w, &p, eps);
                let err = (form - expanded).abs();
                report.record("matrix form matches expanded form", draw, err, EXPANDED_FORM_TOL, || {
                    format!("matrix {form:.16e} expanded {expanded:.16e}")
                });
            }
            Err(e) => report.record_bool("matrix form matches expanded form", draw, false, || format!("builder error: {e}")),
        }
    }
    report
}
