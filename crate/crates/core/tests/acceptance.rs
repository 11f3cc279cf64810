//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the lines are always printed. Criteria 8 and 9 share
//! the three production histories (one per ε, γ applied afterwards).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use mhd_lab::config::{ForcingFamily, SolverConfig, StateFamily, TimeStep};
use mhd_lab::identities::{run_boundary_form_suite, run_identity_suite, Fault, IdentityReport};
use mhd_lab::lifting::{build_diffeomorphism, default_x1_grid, lift, make_cutoff, reference_fronts, sup_normal_derivative};
use mhd_lab::solver::energy::{run_energy_experiment, run_history, trace_interpolation_check, History};
use mhd_lab::solver::equivalence::{run_equivalence_experiment, EquivalenceConfig};
use mhd_lab::solver::CoupledSolver;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn outcome_ok(r: &IdentityReport, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in names {
        match r.outcome(n) {
            Some(o) => {
                ok &= o.passed() && o.checked > 0;
                parts.push(format!("{n} {}/{} (worst {:.2e})", o.checked - o.failures, o.checked, o.worst));
            }
            None => {
                ok = false;
                parts.push(format!("{n} missing"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn criterion_1(r: &IdentityReport, secs: f64) -> Verdict {
    let (ok, d) = outcome_ok(
        r,
        &[
            "symmetry",
            "A0 positive definite",
            "calA0 positive definite",
            "frakB0 positive definite inside",
            "M0 positive definite",
            "frakB0 not positive definite outside",
        ],
    );
    verdict(ok && secs <= 5.0, format!("{} draws in {secs:.2} s: {d}", r.draws))
}

fn criterion_2(r: &IdentityReport) -> Verdict {
    let (ok, d) = outcome_ok(r, &["det frakB1 closed form", "det M1 closed form", "det M1 vanishes for chosen nu"]);
    verdict(ok, d)
}

fn criterion_3(r: &IdentityReport) -> Verdict {
    let (ok, d) = outcome_ok(r, &["E12 spectrum", "B1 spectrum"]);
    verdict(ok, d)
}

/// Rounding floor of the one-sided wall derivative.
const FLOOR: f64 = 1e-14;

/// Observed order on the finest refinement pair whose coarse level is above the rounding floor.
/// `∂₁Ψ(0) = 0` exactly (χ is flat at the wall), so once the `x₁` step resolves the highest
/// tangential mode the stencil error drops to rounding; a fine level at the floor counts with
/// the floor value.
fn asymptotic_order(errors: &[f64]) -> Option<f64> {
    let k = errors.iter().rposition(|e| *e > 100.0 * FLOOR)?;
    let (coarse, fine) = if k + 1 < errors.len() { (k, k + 1) } else { (k.checked_sub(1)?, k) };
    Some((errors[coarse] / errors[fine].max(FLOOR)).log2())
}

fn criterion_4() -> Verdict {
    let t0 = Instant::now();
    let fronts = reference_fronts::<f64>(128, 128).expect("valid grid");
    let m = 16.0;
    let cutoff = make_cutoff(m).expect("M > 1");
    let x1 = default_x1_grid(&cutoff, 256);
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, f) in &fronts {
        let psi = lift(f, &cutoff, &x1).expect("lift");
        let trace = psi.slice(0).iter().zip(&f.phi).fold(0.0_f64, |w, (a, b)| w.max((a - b).abs()));
        let min_d1phi1 = build_diffeomorphism(&psi, None).map(|d| d.min_d1phi1).unwrap_or(f64::NAN);

        let errors: Vec<f64> = [8usize, 16, 32, 64, 128, 256]
            .iter()
            .map(|&n1| {
                let h = cutoff.support_end() / n1 as f64;
                let l = lift(f, &cutoff, &[0.0, h, 2.0 * h]).expect("lift");
                (0..f.phi.len())
                    .map(|k| ((-3.0 * l.slice(0)[k] + 4.0 * l.slice(1)[k] - l.slice(2)[k]) / (2.0 * h)).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let order = asymptotic_order(&errors).unwrap_or(f64::NAN);

        let sups: Vec<f64> = [4.0, 16.0, 64.0]
            .iter()
            .map(|&mm| {
                let c = make_cutoff(mm).expect("M > 1");
                sup_normal_derivative(f, &c, &default_x1_grid(&c, 256)).expect("lift")
            })
            .collect();
        let ratios = [sups[1] / sups[0], sups[2] / sups[1]];

        let front_ok = trace <= 1e-12
            && order >= 1.9
            && ratios.iter().all(|r| (0.4..=0.65).contains(r))
            && min_d1phi1 >= 0.5;
        ok &= front_ok;
        parts.push(format!(
            "{name}: trace {trace:.1e}, order {order:.2}, ratios {:.3}/{:.3}, min d1Phi1 {min_d1phi1:.3}",
            ratios[0], ratios[1]
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(ok && secs <= 10.0, format!("{} ({secs:.1} s)", parts.join("; ")))
}

fn criterion_5() -> Verdict {
    let r = run_boundary_form_suite(5, 1000);
    let (ok, d) = outcome_ok(&r, &["boundary form vanishes on homogeneous conditions", "matrix form matches expanded form"]);
    verdict(ok, d)
}

fn solver_config(n1: usize, n2: usize, epsilon: f64, t_end: f64) -> SolverConfig {
    SolverConfig {
        n1,
        n2,
        n3: n2,
        dt: TimeStep::Auto,
        t_end,
        epsilon,
        gamma: 4.0,
        state_family: StateFamily::Planar,
        forcing_family: ForcingFamily::Bump,
        forcing_amplitude: 1.0,
    }
}

fn criterion_6() -> Verdict {
    let t0 = Instant::now();
    let mut cs = Vec::new();
    let mut ok = true;
    let mut parts = Vec::new();
    for (n1, n2) in [(32, 16), (64, 32)] {
        let mut solver = CoupledSolver::<f64>::from_config(&solver_config(n1, n2, 0.1, 1.0)).expect("solver");
        solver.align_steps(50);
        let hist = run_history(&solver, 50).expect("run");
        let initial = hist.records[0].residuals.max();
        let h = solver.grid.h().iter().fold(0.0_f64, |m, x| m.max(*x));
        let c = hist.residuals().max() / (h * h);
        ok &= initial == 0.0 && c.is_finite();
        parts.push(format!("{n1}x{n2}^2: initial {initial:.1e}, max {:.3e}, C {c:.4}", hist.residuals().max()));
        cs.push(c);
    }
    let ratio = cs[1] / cs[0];
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        ok && (0.5..=2.0).contains(&ratio) && secs <= 120.0,
        format!("{}; C ratio {ratio:.3} ({secs:.1} s)", parts.join("; ")),
    )
}

fn criterion_7() -> Verdict {
    let run = |n: usize, seeded: f64| {
        run_equivalence_experiment(&EquivalenceConfig {
            n,
            epsilon: 0.5,
            nu: [0.0, 0.6, 0.3],
            t_end: 1.0,
            seeded_divergence: seeded,
        })
        .expect("equivalence run")
        .discrepancy
    };
    let clean: Vec<f64> = [16, 32, 64].iter().map(|&n| run(n, 0.0)).collect();
    let seeded: Vec<f64> = [16, 32, 64].iter().map(|&n| run(n, 0.3)).collect();
    let orders = [(clean[0] / clean[1]).log2(), (clean[1] / clean[2]).log2()];
    // "Does not shrink": no convergence order on the finest pair, and the finest discrepancy keeps
    // at least half of the coarsest one.
    let seeded_order = (seeded[1] / seeded[2]).log2();
    let ok = orders.iter().all(|o| *o >= 1.9) && seeded_order < 0.25 && seeded[2] >= 0.5 * seeded[0];
    verdict(
        ok,
        format!(
            "div-free {:.3e}/{:.3e}/{:.3e} orders {:.2}/{:.2}; seeded {:.3e}/{:.3e}/{:.3e} order {seeded_order:.2}",
            clean[0], clean[1], clean[2], orders[0], orders[1], seeded[0], seeded[1], seeded[2]
        ),
    )
}

fn production_config() -> SolverConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/energy_sweep.cfg");
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    SolverConfig::parse(&text).expect("shipped config parses")
}

const GAMMAS: [f64; 3] = [4.0, 8.0, 16.0];
const EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

fn criterion_8(histories: &[(f64, History<f64>)], secs: f64) -> Verdict {
    let mut ratios = Vec::new();
    let mut parts = Vec::new();
    for (eps, hist) in histories {
        let rs: Vec<f64> = GAMMAS.iter().map(|&g| hist.energy_report(g).ratio).collect();
        parts.push(format!("eps {eps:.0e}: {:.3}/{:.3}/{:.3}", rs[0], rs[1], rs[2]));
        ratios.extend(rs);
    }
    let lo = ratios.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    let hi = ratios.iter().fold(0.0_f64, |m, x| m.max(*x));
    let ok = histories.len() == EPSILONS.len() && ratios.iter().all(|r| r.is_finite() && *r > 0.0) && hi <= 10.0 * lo;
    verdict(
        ok && secs <= 900.0,
        format!("{}; spread {:.2} ({secs:.0} s)", parts.join("; "), hi / lo),
    )
}

fn criterion_9(histories: &[(f64, History<f64>)]) -> Verdict {
    let mut ok = !histories.is_empty();
    let mut parts = Vec::new();
    for (eps, hist) in histories {
        let reps = trace_interpolation_check(hist, &GAMMAS);
        let (p0, v0) = (reps[0].plasma_ratio(), reps[0].vacuum_ratio());
        let rel: Vec<(f64, f64)> = reps.iter().map(|r| (r.plasma_ratio() / p0, r.vacuum_ratio() / v0)).collect();
        ok &= rel.iter().all(|(p, v)| p.is_finite() && v.is_finite() && *p <= 5.0 && *v <= 5.0);
        let worst = rel.iter().fold(0.0_f64, |m, (p, v)| m.max(*p).max(*v));
        parts.push(format!("eps {eps:.0e}: worst {worst:.2}x baseline"));
    }
    verdict(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let mut verdicts: Vec<(u32, Verdict)> = Vec::new();
    let mut report = |n: u32, v: Verdict| {
        println!("criterion {n}: {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        verdicts.push((n, v));
    };

    let t0 = Instant::now();
    let suite = run_identity_suite(1, 100, Fault::None);
    let secs = t0.elapsed().as_secs_f64();
    report(1, criterion_1(&suite, secs));
    report(2, criterion_2(&suite));
    report(3, criterion_3(&suite));
    report(4, criterion_4());
    report(5, criterion_5());
    report(6, criterion_6());
    report(7, criterion_7());

    let base = production_config();
    let t0 = Instant::now();
    let mut histories = Vec::new();
    let mut run_error = None;
    for eps in EPSILONS {
        match run_energy_experiment(&SolverConfig { epsilon: eps, ..base.clone() }) {
            Ok((_, hist)) => histories.push((eps, hist)),
            Err(e) => run_error = Some(format!("eps {eps:.0e}: {e}")),
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    match run_error {
        None => {
            report(8, criterion_8(&histories, secs));
            report(9, criterion_9(&histories));
        }
        Some(e) => {
            report(8, verdict(false, e.clone()));
            report(9, verdict(false, e));
        }
    }

    let failed: Vec<u32> = verdicts.iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("all 9 criteria PASS");
        ExitCode::SUCCESS
    } else {
        println!("FAILED criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
