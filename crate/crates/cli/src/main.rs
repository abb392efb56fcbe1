use std::path::PathBuf;
use std::process::ExitCode;

use biharm::{DumbbellSpec, Problem, SectorSpec, SectorVariant};
use biharm_cli::config::{parse_grid, parse_list};
use biharm_cli::output::write_error;
use biharm_cli::{build_mesh, run, write_mesh, CliError, Experiment, ExperimentConfig, MeshRequest, Overrides};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "biharm", version, about = "Clamped and buckling plate eigenvalues with mixed cubic elements")]
struct Cli {
    /// Output directory (for `mesh`, the mesh file; stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps, 0 for one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Relative eigenvalue change that stops inverse iteration.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true, value_parser = parse_problem)]
    problem: Option<Problem>,
    /// Write M, K, M̂ and K̂ in coordinate format into this directory.
    #[arg(long, global = true)]
    dump_matrices: Option<PathBuf>,
}

/// Parsed `a,b,c` or `start:stop:step` list, kept whole as one flag value.
#[derive(Clone)]
struct List(Vec<f64>);

fn list(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

#[derive(Clone)]
struct Grid(Vec<[usize; 2]>);

fn grid(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse().map_err(|e: biharm::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Square,
    Sector,
    Dumbbell,
}

#[derive(Subcommand)]
enum Command {
    /// Corner exponents and ratio limits.
    Exponent {
        /// Angles in degrees, `a,b,c` or `start:stop:step`.
        #[arg(long, value_parser = list)]
        theta_deg: Option<List>,
    },
    /// Generate a mesh and write it in text format.
    Mesh {
        #[arg(long, value_enum)]
        domain: Domain,
        #[arg(long, default_value_t = 90.0)]
        theta_deg: f64,
        #[arg(long, default_value_t = 0.1)]
        h1: f64,
        #[arg(long, default_value_t = 1e-6)]
        rho1: f64,
        #[arg(long, default_value = "inner")]
        variant: String,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 48)]
        nx: usize,
        #[arg(long, default_value_t = 16)]
        ny: usize,
    },
    /// Unit square: eigenvalue, zeros and extrema along the diagonal.
    Square {
        #[arg(long)]
        h1: Option<f64>,
        #[arg(long)]
        rho1: Option<f64>,
    },
    /// Inner and outer polygonal sectors over angles and mesh levels.
    Sector {
        #[arg(long, value_parser = list)]
        theta_deg: Option<List>,
        /// Mesh levels, coarse to fine.
        #[arg(long, value_parser = list)]
        h1: Option<List>,
        #[arg(long)]
        rho1: Option<f64>,
    },
    /// Parity of the two lowest eigenfunctions over the neck parameter.
    Dumbbell {
        #[arg(long, value_parser = list)]
        c: Option<List>,
        /// Grid levels `NXxNY,...`, coarse to fine.
        #[arg(long, value_parser = grid)]
        grid: Option<Grid>,
    },
    /// Unit square eigenvalue over several mesh levels.
    Converge {
        #[arg(long, value_parser = list)]
        h1: Option<List>,
        #[arg(long)]
        rho1: Option<f64>,
    },
}

fn mesh_command(cli: &Cli) -> Result<(), CliError> {
    let Command::Mesh { domain, theta_deg, h1, rho1, ref variant, c, nx, ny } = cli.command else {
        unreachable!()
    };
    let req = match domain {
        Domain::Square => MeshRequest::Square { h1, rho1 },
        Domain::Sector => {
            let variant: SectorVariant = variant.parse().map_err(|e: biharm::Error| CliError::Usage(e.to_string()))?;
            MeshRequest::Sector(SectorSpec { theta: theta_deg.to_radians(), h1, rho1, variant })
        }
        Domain::Dumbbell => MeshRequest::Dumbbell(DumbbellSpec { c, nx, ny }),
    };
    let mesh = build_mesh(req, biharm::mesh::DEFAULT_VERTEX_CAP).map_err(|e| match e {
        biharm::Error::InvalidSpec(_) | biharm::Error::DegenerateDomain(_) | biharm::Error::MeshTooLarge { .. } => {
            CliError::Usage(e.to_string())
        }
        e => CliError::Core(e),
    })?;
    write_mesh(&mesh, cli.out.as_deref())?;
    eprintln!("{}", mesh.summary());
    Ok(())
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut flags = Overrides {
        out: cli.out.clone(),
        threads: cli.threads,
        seed: cli.seed,
        tol: cli.solver.tol,
        max_iter: cli.solver.max_iter,
        problem: cli.solver.problem,
        dump_matrices: cli.solver.dump_matrices.clone(),
        ..Default::default()
    };
    let experiment = match &cli.command {
        Command::Exponent { theta_deg } => {
            flags.theta_deg = theta_deg.clone().map(|l| l.0);
            Experiment::Exponent
        }
        Command::Square { h1, rho1 } => {
            flags.h1 = h1.map(|h| vec![h]);
            flags.rho1 = *rho1;
            Experiment::Square
        }
        Command::Sector { theta_deg, h1, rho1 } => {
            flags.theta_deg = theta_deg.clone().map(|l| l.0);
            flags.h1 = h1.clone().map(|l| l.0);
            flags.rho1 = *rho1;
            Experiment::SectorSweep
        }
        Command::Dumbbell { c, grid } => {
            flags.c = c.clone().map(|l| l.0);
            flags.grid = grid.clone().map(|g| g.0);
            Experiment::DumbbellSweep
        }
        Command::Converge { h1, rho1 } => {
            flags.h1 = h1.clone().map(|l| l.0);
            flags.rho1 = *rho1;
            Experiment::Converge
        }
        Command::Mesh { .. } => unreachable!(),
    };
    let mut layers = Vec::new();
    if let Some(path) = &cli.config {
        layers.push(Overrides::load(path)?);
    }
    layers.push(flags);
    ExperimentConfig::resolve(experiment, &layers)
}

fn execute(cli: &Cli) -> Result<(), (CliError, Option<PathBuf>)> {
    if matches!(cli.command, Command::Mesh { .. }) {
        return mesh_command(cli).map_err(|e| (e, None));
    }
    let config = resolve(cli).map_err(|e| (e, None))?;
    let out = Some(config.out.clone());
    let checks = run(&config).map_err(|e| (e, out.clone()))?;
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    eprintln!("{} checks, {} failed; results in {}", checks.len(), failed.len(), config.out.display());
    if failed.is_empty() {
        Ok(())
    } else {
        Err((CliError::Invariant(failed), out))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((e, out)) => {
            eprintln!("error: {e}");
            if let Some(dir) = out {
                write_error(&dir, &e);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
