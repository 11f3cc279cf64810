use mhd_lab::config::{ForcingFamily, SolverConfig, StateFamily, TimeStep};
use mhd_lab::solver::energy::run_history;
use mhd_lab::solver::{reference_state, CoupledState, Forcing, Grid, Workspace};
use mhd_lab::{CoupledSolver, MhdError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(forcing: ForcingFamily) -> SolverConfig {
    SolverConfig {
        n1: 8,
        n2: 8,
        n3: 8,
        dt: TimeStep::Auto,
        t_end: 0.2,
        epsilon: 0.1,
        gamma: 4.0,
        state_family: StateFamily::Planar,
        forcing_family: forcing,
        forcing_amplitude: 1.0,
    }
}

/// Smooth data, vanishing near the far field so the characteristic rows stay quiet.
fn smooth_state(solver: &CoupledSolver, seed: u64) -> CoupledState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = &solver.grid;
    let mut s = CoupledState::zeros(g);
    let coeffs: Vec<f64> = (0..14).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n_plane = g.n2 * g.n3;
    let n1p = s.u.len() / (8 * n_plane);
    for i1 in 0..n1p {
        for i2 in 0..g.n2 {
            for i3 in 0..g.n3 {
                let k = (i1 * g.n2 + i2) * g.n3 + i3;
                let shape = |x1: f64| (-(x1 * x1) / 4.0).exp() * (g.x2(i2).cos() + 0.5 * g.x3(i3).sin());
                for c in 0..8 {
                    s.u[8 * k + c] = coeffs[c] * shape(g.x1_plus(i1));
                }
                for c in 0..6 {
                    s.w[6 * k + c] = coeffs[8 + c] * shape(g.x1_minus(i1));
                }
            }
        }
    }
    s
}

#[test]
fn zero_data_without_forcing_stays_exactly_zero() {
    let solver = CoupledSolver::from_config(&cfg(ForcingFamily::Zero)).unwrap();
    let mut s = CoupledState::zeros(&solver.grid);
    let mut ws = Workspace::new(&solver.grid);
    for k in 0..solver.steps {
        solver.step_in_place(&mut s, &mut ws, k).unwrap();
    }
    assert_eq!(s.max_abs(), 0.0);
    assert!((s.t - 0.2).abs() < 1e-12);
}

#[test]
fn forced_run_moves_off_zero_and_stays_finite() {
    let solver = CoupledSolver::from_config(&cfg(ForcingFamily::Bump)).unwrap();
    let hist = run_history(&solver, 10).unwrap();
    let last = hist.records.last().unwrap();
    assert!(last.plasma.h1_density(4.0, last.t) > 0.0);
    assert!(hist.records[0].residuals.max() == 0.0);
}

#[test]
fn explicit_step_above_the_limit_is_rejected() {
    let probe = CoupledSolver::from_config(&cfg(ForcingFamily::Zero)).unwrap();
    let mut c = cfg(ForcingFamily::Zero);
    c.dt = TimeStep::Fixed(probe.cfl_limit * 1.5);
    match CoupledSolver::from_config(&c) {
        Err(MhdError::CflViolated { dt, limit }) => assert!(dt > limit),
        other => panic!("expected CflViolated, got {other:?}"),
    }
    c.dt = TimeStep::Fixed(probe.cfl_limit * 0.5);
    assert!(CoupledSolver::from_config(&c).is_ok());
}

#[test]
fn auto_step_is_below_the_limit_and_divides_the_horizon() {
    let mut solver = CoupledSolver::from_config(&cfg(ForcingFamily::Zero)).unwrap();
    assert!(solver.dt <= solver.cfl_limit);
    solver.align_steps(7);
    assert!(solver.dt <= solver.cfl_limit);
    assert!((solver.dt * solver.steps as f64 - 0.2).abs() < 1e-12);
}

#[test]
fn curved_basic_states_are_a_config_error() {
    let mut c = cfg(ForcingFamily::Zero);
    c.state_family = StateFamily::Corrugated;
    match CoupledSolver::from_config(&c) {
        Err(MhdError::Config { key, .. }) => assert_eq!(key, "state.family"),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn homogeneous_step_is_linear() {
    let solver = CoupledSolver::from_config(&cfg(ForcingFamily::Zero)).unwrap();
    let x = smooth_state(&solver, 1);
    let y = smooth_state(&solver, 2);
    let mut z = x.clone();
    for (zi, yi) in z.u.iter_mut().zip(&y.u) {
        *zi = 2.0 * *zi - 3.0 * yi;
    }
    for (zi, yi) in z.w.iter_mut().zip(&y.w) {
        *zi = 2.0 * *zi - 3.0 * yi;
    }
    let (sx, sy, sz) = (solver.step(&x, 0).unwrap(), solver.step(&y, 0).unwrap(), solver.step(&z, 0).unwrap());
    let scale = sz.max_abs().max(1.0);
    for (k, v) in sz.u.iter().enumerate() {
        assert!((v - (2.0 * sx.u[k] - 3.0 * sy.u[k])).abs() <= 1e-12 * scale);
    }
    for (k, v) in sz.w.iter().enumerate() {
        assert!((v - (2.0 * sx.w[k] - 3.0 * sy.w[k])).abs() <= 1e-12 * scale);
    }
}

#[test]
fn unforced_energy_does_not_grow() {
    let solver = CoupledSolver::from_config(&cfg(ForcingFamily::Zero)).unwrap();
    let mut s = smooth_state(&solver, 7);
    let mut ws = Workspace::new(&solver.grid);
    let e0 = solver.energy(&s);
    let mut prev = e0;
    for k in 0..solver.steps {
        solver.step_in_place(&mut s, &mut ws, k).unwrap();
        let e = solver.energy(&s);
        assert!(e <= prev * (1.0 + 1e-10), "step {k}: {prev:e} -> {e:e}");
        prev = e;
    }
    assert!(prev < e0);
}

#[test]
fn direct_construction_matches_config_path() {
    let c = cfg(ForcingFamily::Bump);
    let basic = reference_state::<f64>(StateFamily::Planar).unwrap();
    let direct = CoupledSolver::new(Grid::new(8, 8, 8).unwrap(), None, 0.2, 0.1, &basic, Forcing::bump(1.0, 0.2)).unwrap();
    let via = CoupledSolver::from_config(&c).unwrap();
    assert_eq!(direct.steps, via.steps);
    assert_eq!(direct.a, via.a);
    assert_eq!(direct.m, via.m);
}
