//! Command-line driver: constants reports, single solves, eps sweeps,
//! the nondegeneracy kernel check, and the multi-start uniqueness test.
//! Exit code 0 only when every gate of the requested run passes.

use clap::{Parser, Subcommand};
use fracground::config::load_sweep_config;
use fracground::constants::{blowup_constants, ConstantsReport, Params};
use fracground::diagnostics::kernel_spectrum_check;
use fracground::error::Result;
use fracground::field::Grid;
use fracground::io::write_field;
use fracground::solver::solve_with_spectral;
use fracground::sweep::{concentration_check, fit_blowup_limit, run_sweep, uniqueness_test};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracground", version, about = "fractional ground-state laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the full constants report for one (N, s)
    Constants {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        s: f64,
        /// also print the CSV row
        #[arg(long)]
        csv: bool,
    },
    /// Solve a single ground state (first eps of the config schedule)
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full eps sweep with diagnostics and fits
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the nondegeneracy kernel of the linearized operator
    KernelCheck {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 40.0)]
        r#box: f64,
        #[arg(long, default_value_t = 2048)]
        points: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Multi-start local uniqueness test at the smallest eps of the config
    Uniqueness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 5)]
        starts: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("FAIL: one or more gates did not pass");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Constants { dim, s, csv } => {
            let rep = blowup_constants(&Params::new(dim, s)?)?;
            print!("{}", rep.key_value_block());
            if csv {
                println!("{}", ConstantsReport::CSV_HEADER);
                println!("{}", rep.csv_row());
            }
            Ok(true)
        }
        Cmd::Solve { config, out } => {
            let mut cfg = load_sweep_config(&config)?;
            if let Some(o) = out {
                cfg.out_dir = Some(o);
            }
            let eps = cfg.eps_schedule[0];
            let sp = fracground::fft::Spectral::new(cfg.grid);
            let gs = solve_with_spectral(&sp, &cfg.params, &cfg.potential, eps, &cfg.solver)?;
            println!(
                "eps={eps} converged={} s_v={:.12} u_max={:.6} mu={:.6e} iters={} residual={:.3e}",
                gs.converged, gs.s_v, gs.u_max, gs.mu, gs.iters, gs.residual
            );
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir)?;
                write_field(&dir.join("ground_state.bin"), &gs.u, cfg.params.s)?;
                let row = format!(
                    "eps,s_v,u_max,mu,iters,residual,converged\n{},{:.17e},{:.17e},{:.17e},{},{:.17e},{}\n",
                    eps, gs.s_v, gs.u_max, gs.mu, gs.iters, gs.residual, gs.converged
                );
                std::fs::write(dir.join("ground_state.csv"), row)?;
            }
            Ok(gs.converged)
        }
        Cmd::Sweep { config, out } => {
            let mut cfg = load_sweep_config(&config)?;
            if let Some(o) = out {
                cfg.out_dir = Some(o);
            }
            let records = run_sweep(&cfg)?;
            let mut pass = !records.is_empty();
            for r in &records {
                println!(
                    "eps={:<10} s_v={:.10} u_max={:<12.5} mu={:<12.4e} poh={:<10.3e} tail={:<10.3e} converged={} resolved={}",
                    r.eps, r.s_v, r.u_max, r.mu, r.pohozaev_rel, r.tail_mass, r.converged, r.resolved
                );
                if !r.converged {
                    pass = false;
                }
                if r.converged && r.resolved && !(r.tail_mass < 1e-3) {
                    pass = false;
                }
            }
            let mut report = String::new();
            if let Ok(consts) = blowup_constants(&cfg.params) {
                let target = consts.blowup_l
                    * cfg.potential.argmin().map(|c| cfg.potential.eval(&c)).unwrap_or(
                        match &cfg.potential.kind {
                            fracground::field::PotentialKind::Constant { value } => *value,
                            _ => f64::NAN,
                        },
                    );
                match fit_blowup_limit(&records, &cfg.params, cfg.seed) {
                    Ok((limit, ci)) => {
                        let rel = (limit - target) / target;
                        report.push_str(&format!(
                            "blowup_limit={limit:.8} ci={ci:.3e} target={target:.8} rel={rel:+.3e}\n"
                        ));
                        if rel.abs() > 0.10 {
                            pass = false;
                        }
                    }
                    Err(e) => report.push_str(&format!("blowup fit unavailable: {e}\n")),
                }
            }
            let conc = concentration_check(&records, &cfg.potential);
            if conc.applicable {
                report.push_str(&format!(
                    "concentration final_distance={:?} v_gap={:?} (2h = {:.3e})\n",
                    conc.final_distance,
                    conc.v_gap_final,
                    2.0 * cfg.grid.spacing()
                ));
            } else {
                report.push_str("concentration check: n/a (no unique argmin)\n");
            }
            print!("{report}");
            if let Some(dir) = &cfg.out_dir {
                std::fs::write(dir.join("report.txt"), report)?;
            }
            Ok(pass)
        }
        Cmd::KernelCheck { dim, s, r#box, points, seed } => {
            let p = Params::new(dim, s)?;
            let grid = Grid::new(dim, r#box, points)?;
            let rep = kernel_spectrum_check(&p, grid, seed)?;
            println!("eigenvalue,abs");
            for v in &rep.eigenvalues {
                println!("{:.10e},{:.10e}", v, v.abs());
            }
            println!(
                "near_zero={} expected={} delta={:.3e} gap={:.3e} mode_residual={:.3e} similarity={:.4}",
                rep.near_zero_count,
                dim + 1,
                rep.delta,
                rep.gap,
                rep.mode_residual,
                rep.similarity
            );
            Ok(rep.near_zero_count == dim as usize + 1
                && rep.similarity >= 0.99
                && rep.gap >= rep.delta)
        }
        Cmd::Uniqueness { config, starts, tol } => {
            let cfg = load_sweep_config(&config)?;
            let rep = uniqueness_test(&cfg, starts)?;
            println!(
                "eps={} converged={} max_rel_distance={:.3e} (tol {tol:.1e})",
                rep.eps, rep.n_converged, rep.max_rel_distance
            );
            Ok(rep.max_rel_distance < tol)
        }
    }
}
