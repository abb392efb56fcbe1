//! End-to-end runs: mesh, assemble, solve, analyse, write tables.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use biharm::analysis::samples_per_decade;
use biharm::mesh::{sector_mesh_with_cap, square_mesh_with_cap};
use biharm::solver::RESIDUAL_TARGET;
use biharm::{
    assemble_system, build_space, evaluate_on_bisector, exponent_table, factorize, find_extrema,
    find_zeros, oscillation_report, parity_row, smallest_eigenpair, solve_exponent, BlockSystem,
    CornerExponent, DumbbellSpec, Mesh, OscillationReport, ParityRow, SectorSpec, SectorVariant,
};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, IoContext};
use crate::output::{sci, sci_opt, write_manifest, Check, Table};

/// Outer end of the bisector scan.
pub const R_MAX: f64 = 0.9;

/// Relative ratio change treated as round-off when checking that dumbbell
/// discrepancies shrink.
pub const DISCREPANCY_FLOOR: f64 = 1e-10;

/// Result of a run together with the files written and the checks performed.
#[derive(Debug, Clone)]
pub struct Run<T> {
    pub data: T,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub manifest: PathBuf,
}

impl<T> Run<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }
}

fn finish<T>(config: &ExperimentConfig, data: T, files: Vec<PathBuf>, checks: Vec<Check>) -> Result<Run<T>, CliError> {
    let manifest = write_manifest(config, &files, &checks)?;
    Ok(Run { data, files, checks, manifest })
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn write(table: &Table, path: PathBuf, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    table.write(&path)?;
    files.push(path);
    Ok(())
}

fn dump_system(dir: &Path, tag: &str, system: &BlockSystem) -> Result<(), CliError> {
    fs::create_dir_all(dir).at(dir)?;
    for (name, m) in [("m", &system.m), ("k", &system.k), ("m_hat", &system.m_hat), ("k_hat", &system.k_hat)] {
        let path = dir.join(format!("{tag}{name}.txt"));
        let f = fs::File::create(&path).at(&path)?;
        m.write_coordinate(std::io::BufWriter::new(f))?;
    }
    Ok(())
}

pub fn run(config: &ExperimentConfig) -> Result<Vec<Check>, CliError> {
    Ok(match config.experiment {
        Experiment::Exponent => run_exponent(config)?.checks,
        Experiment::Square => run_square(config)?.checks,
        Experiment::SectorSweep => run_sector_sweep(config)?.checks,
        Experiment::DumbbellSweep => run_dumbbell_sweep(config)?.checks,
        Experiment::Converge => run_converge(config)?.checks,
    })
}

pub fn run_exponent(config: &ExperimentConfig) -> Result<Run<Vec<CornerExponent>>, CliError> {
    let thetas: Vec<f64> = config.theta_deg.iter().map(|d| d.to_radians()).collect();
    let table = exponent_table(&thetas)?;
    let mut t = Table::new(&["theta_deg", "alpha", "beta", "zero_ratio", "extremum_value_ratio"]);
    let mut checks = Vec::new();
    for e in &table {
        t.push(vec![
            sci(e.theta_deg()),
            sci(e.alpha),
            sci(e.beta),
            sci_opt(e.zero_ratio),
            sci_opt(e.extremum_value_ratio),
        ]);
        checks.push(Check::new(
            format!("residual at {} deg", e.theta_deg()),
            e.residual() < 1e-10,
            format!("{:e}", e.residual()),
        ));
    }
    let mut files = Vec::new();
    write(&t, config.out.join("exponent.csv"), &mut files)?;
    finish(config, table, files, checks)
}

/// Eigenpair and bisector analysis on one corner-graded mesh.
#[derive(Debug, Clone)]
pub struct CornerRun {
    pub lambda: f64,
    pub n_dofs: usize,
    pub n_triangles: usize,
    pub iterations: usize,
    pub residual: f64,
    pub exponent: CornerExponent,
    /// `Err` holds the reason the zeros and extrema failed validation.
    pub report: Result<OscillationReport, String>,
}

impl CornerRun {
    pub fn zeros(&self) -> &[f64] {
        self.report.as_ref().map(|r| r.s.as_slice()).unwrap_or(&[])
    }

    fn checks(&self, label: &str) -> Vec<Check> {
        vec![
            Check::new(
                format!("{label} residual"),
                self.residual < RESIDUAL_TARGET && self.lambda > 0.0,
                format!("lambda {} residual {:e}", self.lambda, self.residual),
            ),
            Check::new(
                format!("{label} zeros and extrema interlace"),
                self.report.is_ok(),
                match &self.report {
                    Ok(r) => format!("{} zeros, {} extrema", r.s.len(), r.t.len()),
                    Err(e) => e.clone(),
                },
            ),
        ]
    }
}

fn corner_run(
    mesh: Mesh,
    theta: f64,
    rho1: f64,
    config: &ExperimentConfig,
    dump_tag: &str,
) -> Result<CornerRun, CliError> {
    let n_triangles = mesh.n_triangles();
    let space = build_space(Arc::new(mesh))?;
    let system = assemble_system(&space)?;
    if let Some(dir) = &config.dump_matrices {
        dump_system(dir, dump_tag, &system)?;
    }
    let factorization = factorize(&system)?;
    let pair = smallest_eigenpair(&system, &factorization, &config.solver())?;
    let exponent = solve_exponent(theta)?;
    let r_min = 0.5 * rho1;
    let n = ((R_MAX / r_min).log10() * samples_per_decade(exponent.zero_ratio) as f64).ceil() as usize + 1;
    let profile = evaluate_on_bisector(&pair, &space, n, r_min, R_MAX)?;
    let zeros = find_zeros(&profile, &space, &pair)?;
    let extrema = find_extrema(&profile, &space, &pair)?;
    let report = oscillation_report(&zeros, &extrema, exponent).map_err(|e| e.to_string());
    Ok(CornerRun {
        lambda: pair.lambda,
        n_dofs: space.n_dofs(),
        n_triangles,
        iterations: pair.iterations,
        residual: pair.residual,
        exponent,
        report,
    })
}

fn eigen_table(config: &ExperimentConfig, runs: &[(f64, &CornerRun)]) -> Table {
    let mut t = Table::new(&["problem", "h1", "n_dofs", "n_triangles", "lambda", "iterations", "residual"]);
    for (h1, r) in runs {
        t.push(vec![
            config.problem.to_string(),
            sci(*h1),
            r.n_dofs.to_string(),
            r.n_triangles.to_string(),
            sci(r.lambda),
            r.iterations.to_string(),
            sci(r.residual),
        ]);
    }
    t
}

/// Zero and extremum columns for several reports side by side.
fn zeros_table(header: &[&'static str], reports: &[Option<&OscillationReport>]) -> Table {
    let mut t = Table::new(header);
    let len = reports.iter().flatten().map(|r| r.s.len()).max().unwrap_or(0);
    for n in 0..len {
        let mut row = vec![(n + 1).to_string()];
        for field in 0..3 {
            for r in reports {
                let v = r.and_then(|r| match field {
                    0 => r.s.get(n),
                    1 => r.r.get(n),
                    _ => r.t.get(n),
                });
                row.push(sci_opt(v.copied()));
            }
        }
        t.push(row);
    }
    t
}

fn ratios_table(header: &[&'static str], reports: &[Option<&OscillationReport>], exponent: &CornerExponent) -> Table {
    let mut t = Table::new(header);
    let len = reports.iter().flatten().map(|r| r.s_ratios.len()).max().unwrap_or(0);
    for n in 0..len {
        let mut row = vec![(n + 1).to_string()];
        for field in 0..3 {
            for r in reports {
                let v = r.and_then(|r| match field {
                    0 => r.s_ratios.get(n),
                    1 => r.r_ratios.get(n),
                    _ => r.t_ratios.get(n),
                });
                row.push(sci_opt(v.copied()));
            }
        }
        row.push(sci_opt(exponent.zero_ratio));
        row.push(sci_opt(exponent.extremum_value_ratio));
        t.push(row);
    }
    t
}

pub fn run_square(config: &ExperimentConfig) -> Result<Run<CornerRun>, CliError> {
    let h1 = config.h1[0];
    let mesh = square_mesh_with_cap(h1, config.rho1, config.vertex_cap)?;
    let run = corner_run(mesh, FRAC_PI_2, config.rho1, config, "square_")?;
    let mut files = Vec::new();
    write(&eigen_table(config, &[(h1, &run)]), config.out.join("eigen.csv"), &mut files)?;
    let report = run.report.as_ref().ok();
    write(&zeros_table(&["n", "s", "r", "t"], &[report]), config.out.join("zeros.csv"), &mut files)?;
    write(
        &ratios_table(
            &["n", "s_ratio", "r_ratio", "t_ratio", "predicted_zero_ratio", "predicted_extremum_value_ratio"],
            &[report],
            &run.exponent,
        ),
        config.out.join("ratios.csv"),
        &mut files,
    )?;
    let checks = run.checks("square");
    finish(config, run, files, checks)
}

/// Inner and outer polygon runs at one mesh level.
#[derive(Debug, Clone)]
pub struct SectorLevel {
    pub h1: f64,
    pub inner: CornerRun,
    pub outer: CornerRun,
}

impl SectorLevel {
    pub fn width(&self) -> f64 {
        self.inner.lambda - self.outer.lambda
    }
}

#[derive(Debug, Clone)]
pub struct SectorResult {
    pub theta_deg: f64,
    /// Coarse to fine.
    pub levels: Vec<SectorLevel>,
}

impl SectorResult {
    pub fn finest(&self) -> &SectorLevel {
        self.levels.last().expect("at least one level")
    }

    fn checks(&self) -> Vec<Check> {
        let label = format!("sector {} deg", self.theta_deg);
        let mut checks = Vec::new();
        for l in &self.levels {
            let tag = format!("{label} h1 {}", l.h1);
            checks.push(Check::new(
                format!("{tag} inner >= outer"),
                l.inner.lambda >= l.outer.lambda,
                format!("inner {} outer {}", l.inner.lambda, l.outer.lambda),
            ));
            checks.extend(l.inner.checks(&format!("{tag} inner")));
            checks.extend(l.outer.checks(&format!("{tag} outer")));
        }
        for w in self.levels.windows(2) {
            let (c, f) = (&w[0], &w[1]);
            checks.push(Check::new(
                format!("{label} h1 {} bracket inside h1 {}", f.h1, c.h1),
                f.inner.lambda <= c.inner.lambda && f.outer.lambda >= c.outer.lambda && f.width() < c.width(),
                format!(
                    "[{}, {}] vs [{}, {}]",
                    f.outer.lambda, f.inner.lambda, c.outer.lambda, c.inner.lambda
                ),
            ));
        }
        checks
    }
}

pub fn run_sector_sweep(config: &ExperimentConfig) -> Result<Run<Vec<SectorResult>>, CliError> {
    let tasks: Vec<(f64, f64, SectorVariant)> = config
        .theta_deg
        .iter()
        .flat_map(|&t| {
            config.h1.iter().flat_map(move |&h| [(t, h, SectorVariant::Inner), (t, h, SectorVariant::Outer)])
        })
        .collect();
    let runs: Vec<CornerRun> = in_pool(config.threads, || {
        tasks
            .par_iter()
            .map(|&(deg, h1, variant)| {
                let spec = SectorSpec { theta: deg.to_radians(), h1, rho1: config.rho1, variant };
                let mesh = sector_mesh_with_cap(spec, config.vertex_cap)?;
                let tag = format!("sector_{deg}_{h1}_{}_", variant.as_str());
                corner_run(mesh, spec.theta, config.rho1, config, &tag)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;
    let mut it = runs.into_iter();
    let results: Vec<SectorResult> = config
        .theta_deg
        .iter()
        .map(|&theta_deg| SectorResult {
            theta_deg,
            levels: config
                .h1
                .iter()
                .map(|&h1| SectorLevel { h1, inner: it.next().unwrap(), outer: it.next().unwrap() })
                .collect(),
        })
        .collect();

    let mut files = Vec::new();
    let mut summary = Table::new(&[
        "theta_deg", "h1", "n_dofs", "lambda_inner", "lambda_outer", "width", "zeros_inner", "zeros_outer",
    ]);
    for s in &results {
        let dir = config.out.join(format!("sector_{}", s.theta_deg));
        let mut eigen = Table::new(&["h1", "n_dofs", "lambda_inner", "lambda_outer", "width"]);
        for l in &s.levels {
            eigen.push(vec![
                sci(l.h1),
                l.inner.n_dofs.to_string(),
                sci(l.inner.lambda),
                sci(l.outer.lambda),
                sci(l.width()),
            ]);
            summary.push(vec![
                sci(s.theta_deg),
                sci(l.h1),
                l.inner.n_dofs.to_string(),
                sci(l.inner.lambda),
                sci(l.outer.lambda),
                sci(l.width()),
                l.inner.zeros().len().to_string(),
                l.outer.zeros().len().to_string(),
            ]);
        }
        write(&eigen, dir.join("eigen.csv"), &mut files)?;
        let f = s.finest();
        let reports = [f.inner.report.as_ref().ok(), f.outer.report.as_ref().ok()];
        write(
            &zeros_table(&["n", "s_inner", "s_outer", "r_inner", "r_outer", "t_inner", "t_outer"], &reports),
            dir.join("zeros.csv"),
            &mut files,
        )?;
        write(
            &ratios_table(
                &[
                    "n",
                    "s_ratio_inner",
                    "s_ratio_outer",
                    "r_ratio_inner",
                    "r_ratio_outer",
                    "t_ratio_inner",
                    "t_ratio_outer",
                    "predicted_zero_ratio",
                    "predicted_extremum_value_ratio",
                ],
                &reports,
                &f.inner.exponent,
            ),
            dir.join("ratios.csv"),
            &mut files,
        )?;
    }
    write(&summary, config.out.join("sectors.csv"), &mut files)?;
    let checks = results.iter().flat_map(SectorResult::checks).collect();
    finish(config, results, files, checks)
}

#[derive(Debug, Clone)]
pub struct DumbbellResult {
    pub c: f64,
    /// One row per grid level, coarse to fine.
    pub levels: Vec<ParityRow>,
}

impl DumbbellResult {
    pub fn finest(&self) -> &ParityRow {
        self.levels.last().expect("at least one level")
    }

    /// Relative change of `λ_even/λ_odd` between consecutive levels.
    pub fn discrepancies(&self) -> Vec<f64> {
        self.levels.windows(2).map(|w| ((w[1].ratio - w[0].ratio) / w[0].ratio).abs()).collect()
    }

    /// Discrepancies shrink, ignoring pairs that are both at round-off level.
    pub fn discrepancies_decrease(&self) -> bool {
        self.discrepancies()
            .windows(2)
            .all(|d| d[1] < d[0] || (d[0] < DISCREPANCY_FLOOR && d[1] < DISCREPANCY_FLOOR))
    }
}

#[derive(Debug, Clone)]
pub struct DumbbellSweep {
    pub results: Vec<DumbbellResult>,
    /// Index pairs `(k, k + 1)` of consecutive `c` whose finest ratios straddle 1.
    pub crossings: Vec<(usize, usize)>,
}

pub fn run_dumbbell_sweep(config: &ExperimentConfig) -> Result<Run<DumbbellSweep>, CliError> {
    let solver = config.solver();
    let tasks: Vec<(f64, [usize; 2])> =
        config.c.iter().flat_map(|&c| config.grid.iter().map(move |&g| (c, g))).collect();
    let rows: Vec<ParityRow> = in_pool(config.threads, || {
        tasks
            .par_iter()
            .map(|&(c, [nx, ny])| parity_row(DumbbellSpec { c, nx, ny }, &solver))
            .collect::<biharm::Result<Vec<_>>>()
    })??;
    let mut it = rows.into_iter();
    let results: Vec<DumbbellResult> = config
        .c
        .iter()
        .map(|&c| DumbbellResult { c, levels: (0..config.grid.len()).map(|_| it.next().unwrap()).collect() })
        .collect();
    let crossings: Vec<(usize, usize)> = results
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].finest().ratio - 1.0).signum() != (w[1].finest().ratio - 1.0).signum())
        .map(|(k, _)| (k, k + 1))
        .collect();

    let mut parity = Table::new(&[
        "c", "lambda_even", "lambda_odd", "ratio", "N", "even_score", "odd_score", "crossing",
    ]);
    let mut discrepancy = Table::new(&["c", "level", "N_coarse", "N_fine", "delta_percent"]);
    let mut checks = Vec::new();
    for (k, r) in results.iter().enumerate() {
        let f = r.finest();
        let crossing = crossings.iter().any(|&(a, _)| a == k);
        parity.push(vec![
            sci(r.c),
            sci(f.lambda_even),
            sci(f.lambda_odd),
            sci(f.ratio),
            f.n_dofs.to_string(),
            sci(f.even.even_score),
            sci(f.odd.odd_score),
            u8::from(crossing).to_string(),
        ]);
        for (j, d) in r.discrepancies().into_iter().enumerate() {
            discrepancy.push(vec![
                sci(r.c),
                (j + 1).to_string(),
                r.levels[j].n_dofs.to_string(),
                r.levels[j + 1].n_dofs.to_string(),
                sci(100.0 * d),
            ]);
        }
        checks.push(Check::new(
            format!("c {} parity", r.c),
            f.unambiguous(),
            format!("even score {:e}, odd score {:e}", f.even.even_score, f.odd.odd_score),
        ));
        checks.push(Check::new(
            format!("c {} discrepancy decreases", r.c),
            r.discrepancies_decrease(),
            format!("{:?}", r.discrepancies()),
        ));
    }
    let mut files = Vec::new();
    write(&parity, config.out.join("parity.csv"), &mut files)?;
    write(&discrepancy, config.out.join("discrepancy.csv"), &mut files)?;
    finish(config, DumbbellSweep { results, crossings }, files, checks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceLevel {
    pub h1: f64,
    pub n_dofs: usize,
    pub lambda: f64,
    /// `|λ - λ_finest|`.
    pub difference: f64,
    /// Ratio of this level's difference to the next level's; absent on the
    /// last two levels.
    pub reduction: Option<f64>,
}

pub fn run_converge(config: &ExperimentConfig) -> Result<Run<Vec<ConvergenceLevel>>, CliError> {
    let solver = config.solver();
    let solved: Vec<(usize, f64)> = in_pool(config.threads, || {
        config
            .h1
            .par_iter()
            .map(|&h1| {
                let space = build_space(Arc::new(square_mesh_with_cap(h1, config.rho1, config.vertex_cap)?))?;
                let system = assemble_system(&space)?;
                let pair = smallest_eigenpair(&system, &factorize(&system)?, &solver)?;
                Ok((space.n_dofs(), pair.lambda))
            })
            .collect::<biharm::Result<Vec<_>>>()
    })??;
    let finest = solved.last().unwrap().1;
    let diffs: Vec<f64> = solved.iter().map(|&(_, l)| (l - finest).abs()).collect();
    let levels: Vec<ConvergenceLevel> = config
        .h1
        .iter()
        .zip(&solved)
        .enumerate()
        .map(|(k, (&h1, &(n_dofs, lambda)))| ConvergenceLevel {
            h1,
            n_dofs,
            lambda,
            difference: diffs[k],
            reduction: (k + 2 < diffs.len()).then(|| diffs[k] / diffs[k + 1]),
        })
        .collect();
    let mut t = Table::new(&["level", "h1", "n_dofs", "lambda", "difference", "reduction"]);
    let mut checks = Vec::new();
    for (k, l) in levels.iter().enumerate() {
        t.push(vec![
            (k + 1).to_string(),
            sci(l.h1),
            l.n_dofs.to_string(),
            sci(l.lambda),
            sci(l.difference),
            sci_opt(l.reduction),
        ]);
        if let Some(f) = l.reduction {
            checks.push(Check::new(
                format!("reduction at h1 {}", l.h1),
                f >= 3.0 || (l.difference == 0.0 && levels[k + 1].difference == 0.0),
                format!("{f}"),
            ));
        }
    }
    let mut files = Vec::new();
    write(&t, config.out.join("order.csv"), &mut files)?;
    finish(config, levels, files, checks)
}
