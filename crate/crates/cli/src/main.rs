//! `pe`: batch runs, norm evaluation and verification suites for the
//! hydrostatic primitive equations.

// negated comparisons are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod sweeps;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use pe_core::analysis::{
    analytic_test_field, decay_study, energy::max_abs, energy_residual, flux_decompose,
    uniqueness_experiment, write_flux_csv,
};
use pe_core::besov::{besov_norm, BesovSpec};
use pe_core::field::project_mean_zero;
use pe_core::hydrostatic::project_h;
use pe_core::io::{fmt_f64, write_csv};
use pe_core::pe_solver::{simulate, RunConfig, Variant};
use pe_core::rng::random_field;
use pe_core::{snapshot, PeError, TorusGrid};

#[derive(Parser)]
#[command(name = "pe", version, about = "Primitive-equations spectral toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Directory receiving CSV and snapshot artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured trajectory and write its norm traces.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Print the Besov norm of a TBSF snapshot.
    Norm {
        #[arg(long)]
        field: PathBuf,
        /// e.g. "s=-0.25,p=4,q=inf,axis=z,inner=LinfH".
        #[arg(long)]
        spec: String,
    },
    /// Bony decomposition of the trilinear flux for a random pair.
    FluxCheck {
        /// Points per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        dims: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Mollification commutators and their decay in N.
    MollifyCheck {
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 2)]
        dims: usize,
        /// Field to analyse; the analytic test field when omitted.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
        n_list: Vec<i32>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 4.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.3)]
        slack: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Energy-equality residual of a configured run.
    EnergyCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Two-trajectory uniqueness experiment with a Gronwall envelope.
    Uniqueness {
        #[arg(long)]
        config: PathBuf,
        /// Overrides uniqueness.delta.
        #[arg(long)]
        delta: Option<f64>,
        /// identical | dealias | half-dt; overrides uniqueness.variant.
        #[arg(long)]
        variant: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Randomised sweeps of the structural invariants.
    Proptest {
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Bad arguments or unreadable inputs (exit code 2).
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

enum Verdict {
    Pass,
    Fail(String),
}

fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    RunConfig::from_file(path).map_err(|e| match e {
        PeError::Io(io) => usage(format!("cannot read config {}: {io}", path.display())),
        other => usage(format!("{}: {other}", path.display())),
    })
}

fn prepare_out(out: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))
}

fn grid_of(dims: usize, n: usize) -> anyhow::Result<TorusGrid> {
    match dims {
        2 => Ok(TorusGrid::plane(n, n, 1.0)?),
        3 => Ok(TorusGrid::cube(n, n, n, 1.0)?),
        d => Err(usage(format!("--dims must be 2 or 3, got {d}"))),
    }
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    match cli.command {
        Command::Simulate { config, output } => {
            let cfg = load_config(&config)?;
            prepare_out(&output.out)?;
            let v0 = cfg.init.build(&cfg.solver.grid)?;
            let series = match simulate(&cfg.solver, &v0) {
                Err(e @ PeError::BlowUp { .. }) => {
                    let hint = match &cfg.solver.snapshot_dir {
                        Some(d) => format!(
                            "; last valid state in {}",
                            d.join("last_valid.tbsf").display()
                        ),
                        None => String::new(),
                    };
                    return Ok(Verdict::Fail(format!("{e}{hint}")));
                }
                r => r?,
            };
            series.write_csv(&output.out.join("series.csv"))?;
            println!("steps recorded: {}", series.len());
            println!(
                "final energy: {}",
                fmt_f64(*series.energy.last().unwrap_or(&f64::NAN))
            );
            Ok(Verdict::Pass)
        }
        Command::Norm { field, spec } => {
            let spec: BesovSpec = spec.parse().map_err(|e: PeError| usage(e.to_string()))?;
            let u = snapshot::load(&field)
                .map_err(|e| usage(format!("cannot load {}: {e}", field.display())))?;
            println!("{}", fmt_f64(besov_norm(&u, &spec)?));
            Ok(Verdict::Pass)
        }
        Command::FluxCheck {
            grid,
            dims,
            seed,
            kmax,
            tol,
            output,
        } => {
            let g = grid_of(dims, grid)?;
            prepare_out(&output.out)?;
            let za = g.vertical_axis();
            let vd = project_mean_zero(&project_h(&random_field(&g, 2, kmax, seed))?, za)?;
            let v1 = project_mean_zero(&project_h(&random_field(&g, 2, kmax, seed + 1))?, za)?;
            let fb = flux_decompose(&vd, &v1)?;
            write_flux_csv(
                &output.out.join("flux_breakdown.csv"),
                std::slice::from_ref(&fb),
            )?;
            for (k, j) in fb.j.iter().enumerate() {
                println!("J{} = {}", k + 1, fmt_f64(*j));
            }
            println!("direct = {}", fmt_f64(fb.direct_h + fb.direct_z));
            println!("mismatch = {}", fmt_f64(fb.mismatch()));
            Ok(if fb.mismatch() <= tol {
                Verdict::Pass
            } else {
                Verdict::Fail(format!("flux mismatch {} exceeds {tol}", fb.mismatch()))
            })
        }
        Command::MollifyCheck {
            grid,
            dims,
            field,
            n_list,
            p,
            gamma,
            slack,
            output,
        } => {
            let v = match field {
                Some(f) => {
                    let u = snapshot::load(&f)
                        .map_err(|e| usage(format!("cannot load {}: {e}", f.display())))?;
                    project_h(&u)?
                }
                None => analytic_test_field(&grid_of(dims, grid)?)?,
            };
            prepare_out(&output.out)?;
            let rep = decay_study(&v, &n_list, p, gamma)?;
            rep.write_csv(&output.out.join("commutators.csv"))?;
            let bounds = rep.slope_bounds(slack);
            let mut failures = Vec::new();
            for (m, (s, b)) in rep.slopes.iter().zip(bounds).enumerate() {
                println!("slope I{} = {} (bound {})", m + 1, fmt_f64(*s), fmt_f64(b));
                if !(*s <= b) {
                    failures.push(format!("slope of I{} is {s} > {b}", m + 1));
                }
            }
            println!("slope grad_H = {}", fmt_f64(rep.slope_grad_h));
            if !(rep.slope_grad_h <= rep.grad_bound(slack)) {
                failures.push(format!("gradient growth {} too fast", rep.slope_grad_h));
            }
            // beyond N = 4 the commutators of an analytic field fall under the
            // roundoff of their own two-term evaluation
            for r in rep.rows.iter().filter(|r| r.n <= 4) {
                if !(r.residual_vv <= 1e-10 && r.residual_wv <= 1e-10) {
                    failures.push(format!("commutator identity fails at N = {}", r.n));
                }
            }
            Ok(if failures.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail(failures.join("; "))
            })
        }
        Command::EnergyCheck {
            config,
            tol,
            output,
        } => {
            let cfg = load_config(&config)?;
            prepare_out(&output.out)?;
            let v0 = cfg.init.build(&cfg.solver.grid)?;
            let series = simulate(&cfg.solver, &v0)?;
            let r = energy_residual(&series)?;
            let header = ["time", "energy", "dissipation", "residual"].map(String::from);
            let rows: Vec<Vec<f64>> = (0..series.len())
                .map(|i| {
                    vec![
                        series.times[i],
                        series.energy[i],
                        series.dissipation[i],
                        r[i],
                    ]
                })
                .collect();
            write_csv(&output.out.join("energy.csv"), &header, &rows)?;
            let m = max_abs(&r);
            println!("max |r| = {}", fmt_f64(m));
            Ok(if m <= tol {
                Verdict::Pass
            } else {
                Verdict::Fail(format!("energy residual {m} exceeds {tol}"))
            })
        }
        Command::Uniqueness {
            config,
            delta,
            variant,
            output,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(d) = delta {
                cfg.uniqueness.delta = d;
            }
            if let Some(v) = variant {
                cfg.uniqueness.variant =
                    Variant::parse(&v).ok_or_else(|| usage(format!("unknown variant {v:?}")))?;
            }
            prepare_out(&output.out)?;
            let v0 = cfg.init.build(&cfg.solver.grid)?;
            let rep = uniqueness_experiment(&cfg.solver, &v0, &cfg.uniqueness)?;
            rep.write_csv(&output.out.join("gronwall.csv"))?;
            println!("C = {}", fmt_f64(rep.c));
            println!(
                "terminal |v_d(T)| / |v_d(0)| = {}",
                fmt_f64(rep.terminal_ratio)
            );
            println!(
                "terminal |v_d(T)| / |v_0| = {}",
                fmt_f64(rep.terminal_relative)
            );
            Ok(if rep.dominated {
                Verdict::Pass
            } else {
                Verdict::Fail("|v_d|^2 exceeds the Gronwall envelope".into())
            })
        }
        Command::Proptest { cases, seed } => {
            let mut failed = Vec::new();
            for s in sweeps::all(cases, seed)? {
                println!(
                    "{:<12} checks {:>6}  violations {:>4}  worst {}",
                    s.name,
                    s.checks,
                    s.violations,
                    fmt_f64(s.worst)
                );
                if s.violations > 0 {
                    failed.push(s.name);
                }
            }
            Ok(if failed.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail(format!("violations in {}", failed.join(", ")))
            })
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("PE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        usage(format!(
            "PE_THREADS must be a non-negative integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<PeError>() {
        Some(PeError::InvalidInput(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
