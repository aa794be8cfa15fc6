use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use arcfreq::cli::{self, CliError, Corruption, Overrides, Which};
use arcfreq::fracture::ComplianceModel;
use arcfreq::model::FreeEdgeRule;

#[derive(Parser)]
#[command(name = "arcfreq", version, about = "Natural frequencies of cracked, stepped nano-arches and rings")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FreeEdgeArg {
    Consistent,
    PaperLiteral,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplianceArg {
    Paper,
    Dimarogonas,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Table1,
    Table2,
}

#[derive(clap::Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Number of modes (overrides solver.modes).
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long, value_enum)]
    free_edge: Option<FreeEdgeArg>,
    #[arg(long, value_enum)]
    compliance_model: Option<ComplianceArg>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            modes: self.modes,
            free_edge: self.free_edge.map(|f| match f {
                FreeEdgeArg::Consistent => FreeEdgeRule::Consistent,
                FreeEdgeArg::PaperLiteral => FreeEdgeRule::PaperLiteral,
            }),
            compliance_model: self.compliance_model.map(|c| match c {
                ComplianceArg::Paper => ComplianceModel::Paper,
                ComplianceArg::Dimarogonas => ComplianceModel::Dimarogonas,
            }),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Lowest modes of the base configuration.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Every sweep of the configuration, one CSV each.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Computed values next to the published tables.
    TableCompare {
        #[arg(long, value_enum)]
        which: TableArg,
    },
    /// Determinant method against the finite-difference oracle.
    OracleCheck {
        config: PathBuf,
        /// Mesh intervals (defaults to solver.oracle_nodes).
        #[arg(long)]
        nodes: Option<usize>,
        #[command(flatten)]
        common: Common,
        /// Negative control: flip crack flexibility signs in the determinant path.
        #[arg(long, hide = true)]
        corrupt_kappa_sign: bool,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Solve { config, common } => {
            let config = cli::load(&config, &common.overrides())?;
            let (set, files) = cli::run_solve(&config, &common.out)?;
            for w in &set.warnings {
                eprintln!("warning: {w}");
            }
            cli::write_modes(&set, config.scenario()?.omega_scale(), std::io::stdout())?;
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }
        Command::Sweep { config, common } => {
            let config = cli::load(&config, &common.overrides())?;
            for (result, path) in cli::run_sweeps(&config, &common.out)? {
                for w in &result.warnings {
                    eprintln!("warning: {w}");
                }
                println!("{}: {} rows -> {}", result.name, result.rows.len(), path.display());
            }
        }
        Command::TableCompare { which } => {
            let which = match which {
                TableArg::Table1 => Which::Table1,
                TableArg::Table2 => Which::Table2,
            };
            print!("{}", cli::table_compare(which)?);
        }
        Command::OracleCheck {
            config,
            nodes,
            common,
            corrupt_kappa_sign,
        } => {
            let config = cli::load(&config, &common.overrides())?;
            let problem = config
                .scenario()?
                .problem()
                .map_err(|e| CliError::Solver(e.to_string()))?;
            let corruption = if corrupt_kappa_sign {
                Corruption::NegateKappa
            } else {
                Corruption::None
            };
            let report = cli::oracle_check(
                &problem,
                nodes.unwrap_or(config.solver.oracle_nodes),
                config.solver.modes,
                &config.solver.search,
                corruption,
            )?;
            println!("{report}");
            if !report.pass() {
                return Err(CliError::OracleMismatch {
                    worst: report.worst(),
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
