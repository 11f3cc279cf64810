//! Property tests for the module invariants.

use mhd_lab::config::{ForcingFamily, SolverConfig, StateFamily, TimeStep};
use mhd_lab::csvio::{column, float_table, parse_csv};
use mhd_lab::eos::{density, density_from_total_pressure, EosParams};
use mhd_lab::lifting::{lift, make_cutoff, FrontField};
use mhd_lab::norms::{weighted_sobolev_norm_sq, NormFlavor, NormSpec, PeriodicGrid};
use mhd_lab::plasma::{build_a, PlasmaState};
use mhd_lab::vacuum::{build_b, build_frak_b, RegularizationParams};
use proptest::prelude::*;

fn vec3(lo: f64, hi: f64) -> impl Strategy<Value = [f64; 3]> {
    [lo..hi, lo..hi, lo..hi]
}

/// Admissible plasma states: `q ≥ 2` and `|H|² ≤ 3` keep the pressure at least 1/2.
fn plasma_state() -> impl Strategy<Value = (PlasmaState<f64>, EosParams<f64>)> {
    (2.0..10.0, vec3(-1.0, 1.0), vec3(-1.0, 1.0), -0.5..0.5, 1.1..3.0, 0.5..2.0).prop_map(|(q, v, h, s, g, r)| {
        (PlasmaState::new(q, v, h, s), EosParams::new(g, r).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plasma_coefficients_are_symmetric_and_a0_is_positive((u, eos) in plasma_state()) {
        for alpha in 0..4 {
            let a = build_a(alpha, &u, &eos).unwrap().entries;
            prop_assert_eq!(a.asymmetry(), 0.0);
        }
        prop_assert!(build_a(0, &u, &eos).unwrap().entries.is_positive_definite());
    }

    #[test]
    fn frak_b0_is_positive_exactly_when_hyperbolic(eps in 0.01..1.0f64, nu in vec3(-2.0, 2.0)) {
        let params = RegularizationParams::new(eps, nu);
        let r = eps * (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt();
        prop_assume!((r - 1.0).abs() > 1e-6);
        let b0 = build_frak_b(0, &params).entries;
        prop_assert_eq!(b0.asymmetry(), 0.0);
        prop_assert_eq!(params.is_hyperbolic(), r < 1.0);
        prop_assert_eq!(b0.is_positive_definite(), r < 1.0);
    }

    #[test]
    fn maxwell_blocks_are_symmetric(eps in 0.01..1.0f64, j in 1usize..4) {
        let b = build_b(j, eps).entries;
        prop_assert_eq!(b.asymmetry(), 0.0);
        prop_assert_eq!(b.count_nonzeros(), 4);
    }

    #[test]
    fn density_is_positive_and_consistent(p in 0.01..100.0f64, s in -2.0..2.0f64, g in 1.01..3.0f64, h in vec3(-1.0, 1.0)) {
        let eos = EosParams::new(g, 1.0).unwrap();
        let t = density(&eos, p, s).unwrap();
        prop_assert!(t.rho > 0.0 && t.rho_p > 0.0);
        prop_assert!((t.rho_p - t.rho / (g * p)).abs() <= 1e-12 * t.rho_p);
        let q = p + 0.5 * (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]);
        let via_q = density_from_total_pressure(&eos, q, &h, s).unwrap();
        prop_assert!((via_q.rho - t.rho).abs() <= 1e-12 * t.rho);
    }

    #[test]
    fn cutoff_is_a_plateau_with_compact_support(m in 1.1..200.0f64, s in 0.0..1.0f64) {
        let c = make_cutoff(m).unwrap();
        prop_assert!(c.support_end() <= m);
        prop_assert_eq!(c.eval(s), 1.0);
        prop_assert_eq!(c.eval(c.support_end() + s), 0.0);
        let x = s * c.support_end();
        prop_assert!((0.0..=1.0).contains(&c.eval(x)));
        prop_assert!(c.deriv(x).abs() <= c.max_slope() * (1.0 + 1e-12));
    }

    #[test]
    fn lifting_is_linear_with_the_front_as_trace(
        a in proptest::collection::vec(-1.0..1.0f64, 64),
        b in proptest::collection::vec(-1.0..1.0f64, 64),
        alpha in -2.0..2.0f64,
        m in 2.0..40.0f64,
    ) {
        let tau = std::f64::consts::TAU;
        let c = make_cutoff(m).unwrap();
        let x1 = [0.0, 0.3, 0.9, 0.5 * (1.0 + c.support_end())];
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + y).collect();
        let fa = FrontField::new(a.clone(), 8, 8, tau, tau).unwrap();
        let fb = FrontField::new(b, 8, 8, tau, tau).unwrap();
        let fc = FrontField::new(combo, 8, 8, tau, tau).unwrap();
        let (la, lb, lc) = (lift(&fa, &c, &x1).unwrap(), lift(&fb, &c, &x1).unwrap(), lift(&fc, &c, &x1).unwrap());
        for (i, _) in x1.iter().enumerate() {
            for k in 0..64 {
                let expect = alpha * la.slice(i)[k] + lb.slice(i)[k];
                prop_assert!((lc.slice(i)[k] - expect).abs() <= 1e-12);
            }
        }
        for k in 0..64 {
            prop_assert!((la.slice(0)[k] - a[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn weighted_norm_is_quadratic_and_grows_with_gamma(
        u in proptest::collection::vec(-1.0..1.0f64, 32),
        lambda in -3.0..3.0f64,
        gamma in 1.0..8.0f64,
        order in 0.0..2.0f64,
    ) {
        let grid = PeriodicGrid { dims: vec![4, 8], lengths: vec![1.0, 2.0] };
        let spec = NormSpec::new(gamma, order, NormFlavor::SobolevWeighted).unwrap();
        let n = weighted_sobolev_norm_sq(&u, &grid, &spec);
        let scaled: Vec<f64> = u.iter().map(|x| lambda * x).collect();
        prop_assert!((weighted_sobolev_norm_sq(&scaled, &grid, &spec) - lambda * lambda * n).abs() <= 1e-10 * n.max(1e-300));
        let bigger = NormSpec::new(gamma * 2.0, order, NormFlavor::SobolevWeighted).unwrap();
        prop_assert!(weighted_sobolev_norm_sq(&u, &grid, &bigger) >= n * (1.0 - 1e-12));
        let l2 = NormSpec::new(gamma, 0.0, NormFlavor::SobolevWeighted).unwrap();
        let direct: f64 = u.iter().map(|x| x * x).sum::<f64>() * grid.cell_volume();
        prop_assert!((weighted_sobolev_norm_sq(&u, &grid, &l2) - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn csv_floats_round_trip(vals in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3)) {
        let text = float_table(&["a", "b", "c"], &[[vals[0], vals[1], vals[2]]]);
        let (h, rows) = parse_csv(&text).unwrap();
        for (i, name) in ["a", "b", "c"].iter().enumerate() {
            prop_assert_eq!(column(&h, &rows, name).unwrap()[0].to_bits(), vals[i].to_bits());
        }
    }

    #[test]
    fn configs_round_trip_through_text(
        n in (8usize..64, 2u32..7, 2u32..7),
        t_end in 0.01..10.0f64,
        eps in 0.001..1.0f64,
        gamma in 1.0..100.0f64,
        amp in 0.0..5.0f64,
        bump in any::<bool>(),
    ) {
        let cfg = SolverConfig {
            n1: n.0, n2: 1 << n.1, n3: 1 << n.2,
            dt: TimeStep::Auto,
            t_end, epsilon: eps, gamma,
            state_family: StateFamily::Planar,
            forcing_family: if bump { ForcingFamily::Bump } else { ForcingFamily::Zero },
            forcing_amplitude: amp,
        };
        prop_assert_eq!(SolverConfig::parse(&cfg.to_string()).unwrap(), cfg);
    }
}
