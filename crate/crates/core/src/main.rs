use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dpg_coupling::experiment::{
    aux_path, run_convergence, Domain, ExperimentConfig, SolverChoice,
};
use dpg_coupling::Error;

/// Convergence study for the DPG / boundary element coupling of the 2D
/// Laplace transmission problem.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[arg(long, value_enum, default_value = "square")]
    domain: Domain,
    /// Number of meshes, level 0 included.
    #[arg(long, default_value_t = 5)]
    levels: usize,
    #[arg(long, value_enum, default_value = "dpg")]
    solver: SolverChoice,
    /// Output CSV; a companion `<stem>.aux.csv` is written next to it.
    #[arg(long, default_value = "convergence.csv")]
    out: PathBuf,
    /// Gauss points per direction for boundary element integrals.
    #[arg(long, default_value_t = 8)]
    quad_order: usize,
    /// Solve the plain reference coupling without rank-one stabilization.
    #[arg(long)]
    no_stabilize: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let config = ExperimentConfig {
        domain: cli.domain,
        levels: cli.levels,
        solver: cli.solver,
        quad_order: cli.quad_order,
        stabilize_jn: !cli.no_stabilize,
        output_path: Some(cli.out.clone()),
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    println!("{:>5} {:>7} {:>12} {:>12} {:>12} {:>12} {:>12}", "level", "N", "energy^2", "u^2", "sigma^2", "trace", "flux");
    let result = run_convergence(&config, |r, c| {
        println!(
            "{:>5} {:>7} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.level, r.n_triangles, r.err_energy_sq, r.err_u_l2_sq, r.err_sigma_l2_sq,
            r.err_trace_l2, r.err_flux_l2
        );
        if let Some(c) = c {
            println!(
                "      reference: trace {:.4e} flux {:.4e}; gap trace {:.4e} flux {:.4e}",
                c.jn_err_trace_l2, c.jn_err_flux_l2, c.gap_trace_l2, c.gap_flux_l2
            );
        }
    });
    match result {
        Ok(report) => {
            let (rn, rh) = (report.rates_n(), report.rates_h());
            println!("rates (energy^2, u^2, sigma^2) vs N and vs h:");
            for (k, (a, b)) in rn.iter().zip(&rh).enumerate().skip(1) {
                println!(
                    "{k:>5}  N: {:>7.3} {:>7.3} {:>7.3}   h: {:>7.3} {:>7.3} {:>7.3}",
                    a[0], a[1], a[2], b[0], b[1], b[2]
                );
            }
            println!("wrote {} and {}", cli.out.display(), aux_path(&cli.out).display());
            ExitCode::SUCCESS
        }
        Err(e @ (Error::InvalidInput(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
    }
}
