//! Command-line experiment driver for [`biharm`].
//!
//! Each experiment writes CSV tables and a `manifest.toml` into its output
//! directory. See [`config`] for the configuration file format.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::Path;

use biharm::mesh::{sector_mesh_with_cap, square_mesh_with_cap};
use biharm::{dumbbell_mesh, DumbbellSpec, Mesh, SectorSpec};

pub use config::{Experiment, ExperimentConfig, Overrides};
pub use error::CliError;
pub use experiments::{
    run, run_converge, run_dumbbell_sweep, run_exponent, run_sector_sweep, run_square, ConvergenceLevel,
    CornerRun, DumbbellResult, DumbbellSweep, Run, SectorLevel, SectorResult,
};
pub use output::{sci, Check};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshRequest {
    Square { h1: f64, rho1: f64 },
    Sector(SectorSpec),
    Dumbbell(DumbbellSpec),
}

pub fn build_mesh(req: MeshRequest, vertex_cap: usize) -> biharm::Result<Mesh> {
    match req {
        MeshRequest::Square { h1, rho1 } => square_mesh_with_cap(h1, rho1, vertex_cap),
        MeshRequest::Sector(spec) => sector_mesh_with_cap(spec, vertex_cap),
        MeshRequest::Dumbbell(spec) => dumbbell_mesh(spec),
    }
}

/// Writes the mesh in text format to `out`, or to stdout.
pub fn write_mesh(mesh: &Mesh, out: Option<&Path>) -> Result<(), CliError> {
    use error::IoContext;
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).at(dir)?;
            }
            let f = std::fs::File::create(path).at(path)?;
            mesh.write_text(std::io::BufWriter::new(f))?;
        }
        None => mesh.write_text(std::io::stdout().lock())?,
    }
    Ok(())
}
