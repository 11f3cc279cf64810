//! `mhd-lab` command-line front end.
//!
//! Exit codes: 0 success, 1 check or solver failure, 2 configuration or usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use mhd_lab::bundle::dump_matrix;
use mhd_lab::config::SolverConfig;
use mhd_lab::csvio::{float, float_table, to_csv, ENERGY_COLUMNS};
use mhd_lab::identities::{run_boundary_form_suite, run_identity_suite, Fault, IdentityReport};
use mhd_lab::lifting::{default_x1_grid, make_cutoff, reference_fronts, sup_normal_derivative, REFERENCE_FRONTS};
use mhd_lab::linalg::SMat;
use mhd_lab::plasma::{build_a, build_cal_a, constant_e};
use mhd_lab::solver::energy::{run_energy_experiment, EnergyReport};
use mhd_lab::solver::{reference_state, DEPTH};
use mhd_lab::vacuum::{build_b, build_frak_b, build_m, choose_nu, RegularizationParams};
use mhd_lab::MhdError;

/// Margin required by `validate-state` in the stability condition.
const STABILITY_DELTA: f64 = 0.1;
/// `x₁` samples per lifting in the `M` sweep.
const LIFT_X1_POINTS: usize = 256;

#[derive(Parser)]
#[command(name = "mhd-lab", version, about = "Plasma-vacuum interface laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded randomized matrix-identity and boundary-form suite.
    Identities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        draws: usize,
        /// CSV report path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Corrupts the A0 builder so that the suite must fail.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Pointwise constraint and stability report of the configured basic state.
    ValidateState {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every system matrix at the front point of the configured basic state.
    DumpMatrices {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One energy experiment; writes `energy.csv` into the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// One row per parameter value; writes `sweep.csv` into the output directory.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Gamma,
    Epsilon,
    #[value(name = "M")]
    M,
}

enum Failure {
    /// Exit 2.
    Config(String),
    /// Exit 1.
    Check(String),
}

impl From<MhdError> for Failure {
    fn from(e: MhdError) -> Self {
        match e {
            MhdError::Config { .. } => Failure::Config(format!("ConfigError: {e}")),
            other => Failure::Check(other.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Check(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<SolverConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
    Ok(SolverConfig::parse(&text)?)
}

fn configure_threads() -> CliResult {
    let Ok(raw) = std::env::var("MHD_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Failure::Config(format!("MHD_LAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("MHD_LAB_THREADS: {e}")))
}

fn identity_csv(reports: &[&IdentityReport]) -> String {
    let mut rows = Vec::new();
    for r in reports {
        for o in &r.outcomes {
            rows.push(vec![
                o.name.to_string(),
                if o.passed() { "PASS" } else { "FAIL" }.to_string(),
                o.checked.to_string(),
                o.failures.to_string(),
                float(o.worst),
                float(o.tol),
            ]);
        }
    }
    to_csv(&["identity", "status", "checked", "failures", "worst", "tol"], &rows)
}

fn cmd_identities(seed: u64, draws: usize, out: Option<&Path>, inject_fault: bool) -> CliResult {
    let fault = if inject_fault { Fault::AsymmetricA0 } else { Fault::None };
    let matrices = run_identity_suite(seed, draws, fault);
    let boundary = run_boundary_form_suite(seed, draws);
    let reports = [&matrices, &boundary];
    for r in reports {
        for o in &r.outcomes {
            let status = if o.passed() { "PASS" } else { "FAIL" };
            println!(
                "{status} {}: {} checks, {} failures, worst {}, tol {}",
                o.name,
                o.checked,
                o.failures,
                float(o.worst),
                float(o.tol)
            );
        }
    }
    if let Some(p) = out {
        write_file(p, &identity_csv(&reports))?;
    }
    let mut failed = String::new();
    for r in reports {
        for o in r.outcomes.iter().filter(|o| !o.passed()) {
            if let Some(f) = &o.first_failure {
                let _ = writeln!(failed, "{}: first failing draw {} (seed {seed}): {}", o.name, f.draw, f.detail);
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.trim_end().to_string()))
    }
}

fn cmd_validate_state(config: &Path, out: Option<&Path>) -> CliResult {
    let cfg = load_config(config)?;
    let state = reference_state::<f64>(cfg.state_family)?;
    let rep = state.validate(0.0, cfg.n1, cfg.n2, cfg.n3, DEPTH)?;
    let stab = state.check_stability(0.0, cfg.n2, cfg.n3, STABILITY_DELTA)?;
    let mut rows: Vec<Vec<String>> = rep.residuals.iter().map(|(n, r)| vec![n.to_string(), float(*r)]).collect();
    for (name, v) in [
        ("rho_min", rep.rho_min),
        ("rho_p_min", rep.rho_p_min),
        ("min_d1phi1", rep.min_d1phi1),
        ("transport_residual", rep.transport_residual),
        ("stability_margin", stab.margin),
        ("stability_identity_residual", stab.identity_residual),
    ] {
        rows.push(vec![name.to_string(), float(v)]);
    }
    emit(out, &to_csv(&["quantity", "value"], &rows))
}

fn dump_block<const N: usize>(text: &mut String, name: &str, m: &SMat<f64, N>) {
    let _ = writeln!(text, "# {name}");
    text.push_str(&dump_matrix(m));
    if !text.ends_with('\n') {
        text.push('\n');
    }
}

fn cmd_dump_matrices(config: &Path, out: Option<&Path>) -> CliResult {
    let cfg = load_config(config)?;
    let state = reference_state::<f64>(cfg.state_family)?;
    let p = state.boundary_point(0.0, 0.0, 0.0)?;
    let params = RegularizationParams::new(cfg.epsilon, choose_nu(&p));
    let mut text = String::new();
    for a in 0..4 {
        dump_block(&mut text, &format!("A{a}"), &build_a(a, &p.uhat, &state.eos)?.entries);
    }
    for a in 0..4 {
        dump_block(&mut text, &format!("calA{a}"), &build_cal_a(a, &p, &state.eos)?.entries);
    }
    for j in 2..5 {
        dump_block(&mut text, &format!("E1{j}"), &constant_e::<f64>(j).entries);
    }
    for j in 1..4 {
        dump_block(&mut text, &format!("B{j}"), &build_b(j, cfg.epsilon).entries);
    }
    for a in 0..4 {
        dump_block(&mut text, &format!("frakB{a}"), &build_frak_b(a, &params).entries);
    }
    for a in 0..4 {
        dump_block(&mut text, &format!("M{a}"), &build_m(a, &params, &p.geometry)?.entries);
    }
    emit(out, &text)
}

fn summary_line(r: &EnergyReport<f64>) -> String {
    format!(
        "gamma={} epsilon={} lhs={} rhs={} ratio={} boundary_form={} max_residual={}",
        float(r.gamma),
        float(r.epsilon),
        float(r.lhs),
        float(r.rhs),
        float(r.ratio),
        float(r.boundary_form),
        float(r.constraint_residuals.max())
    )
}

fn cmd_run(config: &Path, out: &Path) -> CliResult {
    let cfg = load_config(config)?;
    let (report, hist) = run_energy_experiment(&cfg)?;
    write_file(&out.join("energy.csv"), &float_table(&ENERGY_COLUMNS, &hist.csv_rows(cfg.gamma)))?;
    println!("{}", summary_line(&report));
    Ok(())
}

const ENERGY_SWEEP_COLUMNS: [&str; 9] = [
    "value",
    "gamma",
    "epsilon",
    "lhs",
    "rhs",
    "ratio",
    "trace_plasma_ratio",
    "trace_vacuum_ratio",
    "max_residual",
];

fn energy_row(value: f64, r: &EnergyReport<f64>, trace: (f64, f64)) -> [f64; 9] {
    [value, r.gamma, r.epsilon, r.lhs, r.rhs, r.ratio, trace.0, trace.1, r.constraint_residuals.max()]
}

fn cmd_sweep(config: &Path, param: SweepParam, values: &[f64], out: &Path) -> CliResult {
    let cfg = load_config(config)?;
    let text = match param {
        SweepParam::Gamma => {
            for &g in values {
                SolverConfig { gamma: g, ..cfg.clone() }.validate()?;
            }
            // The forcing does not depend on γ, so one history serves every value.
            let (_, hist) = run_energy_experiment(&cfg)?;
            let rows: Vec<[f64; 9]> = values
                .par_iter()
                .map(|&g| {
                    let t = hist.trace_report(g);
                    energy_row(g, &hist.energy_report(g), (t.plasma_ratio(), t.vacuum_ratio()))
                })
                .collect();
            float_table(&ENERGY_SWEEP_COLUMNS, &rows)
        }
        SweepParam::Epsilon => {
            let cfgs: Vec<SolverConfig> = values.iter().map(|&e| SolverConfig { epsilon: e, ..cfg.clone() }).collect();
            for c in &cfgs {
                c.validate()?;
            }
            let rows: Vec<Result<[f64; 9], MhdError>> = cfgs
                .par_iter()
                .map(|c| {
                    let (r, hist) = run_energy_experiment(c)?;
                    let t = hist.trace_report(c.gamma);
                    Ok(energy_row(c.epsilon, &r, (t.plasma_ratio(), t.vacuum_ratio())))
                })
                .collect();
            let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
            float_table(&ENERGY_SWEEP_COLUMNS, &rows)
        }
        SweepParam::M => {
            let fronts = reference_fronts::<f64>(cfg.n2, cfg.n3)?;
            let rows: Vec<Result<[f64; 4], MhdError>> = values
                .par_iter()
                .map(|&m| {
                    let cutoff = make_cutoff(m)?;
                    let x1 = default_x1_grid(&cutoff, LIFT_X1_POINTS);
                    let mut row = [m, 0.0, 0.0, 0.0];
                    for (k, (_, f)) in fronts.iter().enumerate() {
                        row[k + 1] = sup_normal_derivative(f, &cutoff, &x1)?;
                    }
                    Ok(row)
                })
                .collect();
            let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
            let header = REFERENCE_FRONTS.map(|n| match n {
                "single_mode" => "sup_d1psi_single_mode",
                "multi_mode" => "sup_d1psi_multi_mode",
                _ => "sup_d1psi_bump",
            });
            float_table(&["value", header[0], header[1], header[2]], &rows)
        }
    };
    write_file(&out.join("sweep.csv"), &text)?;
    println!("{} rows written to {}", values.len(), out.join("sweep.csv").display());
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.command {
        Command::Identities {
            seed,
            draws,
            out,
            inject_fault,
        } => cmd_identities(seed, draws, out.as_deref(), inject_fault),
        Command::ValidateState { config, out } => cmd_validate_state(&config, out.as_deref()),
        Command::DumpMatrices { config, out } => cmd_dump_matrices(&config, out.as_deref()),
        Command::Run { config, out } => cmd_run(&config, &out),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => cmd_sweep(&config, param, &values, &out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
