//! `tcmum` — batch CLI for the transit-centric multimodal mobility
//! design solver. Exit codes: 0 on success, 2 on validation failure,
//! 3 on solver or evaluation failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tcmum::eval::{cartesian_design_grid, evaluate_design, grid_oracle, EvaluationReport};
use tcmum::io::{load_scenario, read_design, write_design};
use tcmum::model::classify_legs;
use tcmum::optim::multi_start;
use tcmum::sweep::{emit_frequency_profile, run_sweep, SweepSpec};
use tcmum::units::KM_PER_MILE;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tcmum",
    version,
    about = "Joint transit frequency, AMoD fleet and pricing design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario bundle and report every violation.
    Validate { scenario: PathBuf },
    /// Run the multi-start design loop and write the best design.
    Solve {
        scenario: PathBuf,
        /// Override the scenario's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's number of starts.
        #[arg(long)]
        starts: Option<usize>,
        /// Output directory for design.csv, report.csv, trajectories.csv
        /// and frequency_profile.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate a design file against a scenario.
    Evaluate {
        scenario: PathBuf,
        #[arg(long)]
        design: PathBuf,
        /// Context columns for the report row.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        n_bar: Option<f64>,
    },
    /// Run a (gamma, psi, fleet) sensitivity sweep from a spec file.
    Sweep {
        spec: PathBuf,
        /// Parallel cells (defaults to TCMUM_JOBS, else 1).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Exhaustively evaluate a design grid and report the minimum.
    Oracle {
        scenario: PathBuf,
        /// JSON file with x_values, n_values and lambda_values arrays.
        #[arg(long)]
        grid: PathBuf,
        /// Write per-point objectives to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the AMoD fare for a trip.
    Fares {
        /// Trip distance in miles.
        #[arg(long)]
        d: f64,
        /// Trip time in minutes.
        #[arg(long)]
        t: f64,
        /// Discount factor applied to the fare.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                tcmum::Error::InvalidScenario(_) | tcmum::Error::Parse { .. } => EXIT_VALIDATION,
                _ => EXIT_SOLVER,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> tcmum::Result<ExitCode> {
    match cli.command {
        Command::Validate { scenario } => match load_scenario(&scenario) {
            Ok(s) => {
                println!(
                    "ok: {} lines, {} stations, {} commutes, {} routes ({} shared trips)",
                    s.lines.len(),
                    s.stations.len(),
                    s.commutes.len(),
                    s.routes.len(),
                    s.shared_trips.len()
                );
                Ok(ExitCode::SUCCESS)
            }
            Err(tcmum::Error::InvalidScenario(report)) => {
                eprintln!("scenario is not well-formed:\n{report}");
                Ok(ExitCode::from(EXIT_VALIDATION))
            }
            Err(e) => Err(e),
        },

        Command::Solve {
            scenario,
            seed,
            starts,
            out,
        } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(seed) = seed {
                s.algorithm.seed = seed;
            }
            if let Some(starts) = starts {
                s.algorithm.starts = starts;
            }
            std::fs::create_dir_all(&out)?;
            let outcome = multi_start(&s, &s.algorithm.clone())?;
            let leg_index = classify_legs(&s)?;
            let (_, report) = evaluate_design(&s, &leg_index, &outcome.best)?;

            write_design(
                &s,
                &outcome.best,
                Some(s.algorithm.seed),
                out.join("design.csv"),
            )?;
            let mut report_csv = format!("# seed: {}\n", s.algorithm.seed);
            report_csv.push_str(EvaluationReport::CSV_HEADER);
            report_csv.push('\n');
            report_csv.push_str(&report.csv_row());
            report_csv.push('\n');
            std::fs::write(out.join("report.csv"), report_csv)?;

            let mut traj_csv = format!("# seed: {}\n", s.algorithm.seed);
            traj_csv.push_str("start,iteration,q_approx,q_true,converged\n");
            for t in &outcome.trajectories {
                for (i, r) in t.iterations.iter().enumerate() {
                    traj_csv.push_str(&format!(
                        "{},{},{:.6},{:.6},{}\n",
                        t.start_index,
                        i + 1,
                        r.q_approx,
                        r.q_true,
                        t.converged
                    ));
                }
            }
            std::fs::write(out.join("trajectories.csv"), traj_csv)?;
            std::fs::write(
                out.join("frequency_profile.csv"),
                emit_frequency_profile(&s, &outcome.best),
            )?;

            let converged = outcome.trajectories.iter().filter(|t| t.converged).count();
            println!(
                "best true objective {:.3} pax-min (avg disutility {:.3} min) from start {}; {}/{} starts converged",
                outcome.best_objective,
                report.avg_disutility,
                outcome.best_start,
                converged,
                outcome.trajectories.len()
            );
            println!(
                "wrote design.csv, report.csv, trajectories.csv, frequency_profile.csv to {}",
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Evaluate {
            scenario,
            design,
            gamma,
            n_bar,
        } => {
            let s = load_scenario(&scenario)?;
            let d = read_design(&s, &design)?;
            let leg_index = classify_legs(&s)?;
            let (_, mut report) = evaluate_design(&s, &leg_index, &d)?;
            report.gamma = gamma;
            report.n_bar = n_bar.unwrap_or(s.budgets.max_vehicles);
            println!("{}", EvaluationReport::CSV_HEADER);
            println!("{}", report.csv_row());
            eprintln!(
                "objective {:.3} pax-min; disutility {:.3} = walk {:.3} + wait {:.3} + excess {:.3} min/commuter",
                report.objective,
                report.avg_disutility,
                report.avg_walking,
                report.avg_waiting,
                report.avg_excess_waiting
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Sweep { spec, jobs } => {
            let mut spec = SweepSpec::load(&spec)?;
            if jobs.is_some() {
                spec.jobs = jobs;
            }
            let rows = run_sweep(&spec)?;
            println!("wrote {rows} new rows to {}", spec.output.display());
            Ok(ExitCode::SUCCESS)
        }

        Command::Oracle {
            scenario,
            grid,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            let leg_index = classify_legs(&s)?;
            let text = std::fs::read_to_string(&grid)?;
            let spec: GridSpec = serde_json::from_str(&text).map_err(|e| tcmum::Error::Parse {
                path: grid.display().to_string(),
                message: e.to_string(),
            })?;
            let designs =
                cartesian_design_grid(&s, &spec.x_values, &spec.n_values, &spec.lambda_values)?;
            let result = grid_oracle(&s, &leg_index, &designs)?;
            println!(
                "grid minimum {:.6} at point {} of {}",
                result.best_objective, result.best_index, result.grid_size
            );
            if let Some(out) = out {
                let mut csv = String::from("point,objective\n");
                for (i, obj) in result.objectives.iter().enumerate() {
                    match obj {
                        Some(q) => csv.push_str(&format!("{i},{q:.6}\n")),
                        None => csv.push_str(&format!("{i},\n")),
                    }
                }
                std::fs::write(&out, csv)?;
                println!("wrote per-point objectives to {}", out.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Fares { d, t, lambda } => {
            // Standard TNC-style fare parameters; the CLI takes miles directly.
            let fares = tcmum::choice::FareSchedule {
                transit_flat: 2.5,
                transfer_discount: 0.0,
                f_base: 1.87,
                f_book: 1.85,
                f_min: 4.98,
                pi_d: 0.85,
                pi_t: 0.30,
                lambda_min: 0.1,
                lambda_max: 1.0,
            };
            let fare = tcmum::choice::amod_fare(&fares, d * KM_PER_MILE, t);
            println!("{:.2}", lambda * fare);
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(serde::Deserialize)]
struct GridSpec {
    #[serde(default)]
    x_values: Vec<f64>,
    #[serde(default)]
    n_values: Vec<f64>,
    #[serde(default)]
    lambda_values: Vec<f64>,
}
