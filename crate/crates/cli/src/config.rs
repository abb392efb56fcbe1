//! Experiment configuration.
//!
//! Files are flat `key = value` text (TOML syntax, no tables). Values are
//! resolved as experiment defaults, then the file, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use biharm::{Problem, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Exponent,
    Square,
    SectorSweep,
    DumbbellSweep,
    Converge,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Exponent => "exponent",
            Experiment::Square => "square",
            Experiment::SectorSweep => "sector_sweep",
            Experiment::DumbbellSweep => "dumbbell_sweep",
            Experiment::Converge => "converge",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

mod problem_str {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Problem, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(p.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Problem, D::Error> {
        let s = String::deserialize(d)?;
        Problem::from_str(&s).map_err(D::Error::custom)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(p: &Option<Problem>, s: S) -> Result<S::Ok, S::Error> {
            match p {
                Some(p) => s.serialize_str(p.as_str()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Problem>, D::Error> {
            super::deserialize(d).map(Some)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Output directory.
    pub out: PathBuf,
    /// Worker threads for sweeps, 0 for one per core.
    pub threads: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    #[serde(with = "problem_str")]
    pub problem: Problem,
    pub theta_deg: Vec<f64>,
    /// Mesh size levels, coarse to fine. The square experiment uses one.
    pub h1: Vec<f64>,
    pub rho1: f64,
    pub c: Vec<f64>,
    /// Dumbbell `[nx, ny]` levels, coarse to fine.
    pub grid: Vec<[usize; 2]>,
    pub vertex_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_matrices: Option<PathBuf>,
}

/// Any subset of [`ExperimentConfig`], as read from a file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    #[serde(default, with = "problem_str::opt", skip_serializing_if = "Option::is_none")]
    pub problem: Option<Problem>,
    pub theta_deg: Option<Vec<f64>>,
    pub h1: Option<Vec<f64>>,
    pub rho1: Option<f64>,
    pub c: Option<Vec<f64>>,
    pub grid: Option<Vec<[usize; 2]>>,
    pub vertex_cap: Option<usize>,
    pub dump_matrices: Option<PathBuf>,
}

/// Neck parameters of the dumbbell sweep.
pub const DUMBBELL_C: [f64; 22] = [
    1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.35, 0.325, 0.3, 0.275, 0.25, 0.225, 0.2, 0.175, 0.15,
    0.125, 0.1, 0.075, 0.05, 0.025, 0.01,
];

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let solver = SolverConfig::default();
        let mut c = ExperimentConfig {
            experiment,
            out: PathBuf::from("out").join(experiment.as_str()),
            threads: 0,
            seed: solver.seed,
            tol: solver.tol,
            max_iter: solver.max_iter,
            problem: solver.problem,
            theta_deg: Vec::new(),
            h1: Vec::new(),
            rho1: 1e-6,
            c: Vec::new(),
            grid: Vec::new(),
            vertex_cap: biharm::mesh::DEFAULT_VERTEX_CAP,
            dump_matrices: None,
        };
        match experiment {
            Experiment::Exponent => c.theta_deg = (1..=14).map(|k| 10.0 * k as f64).collect(),
            Experiment::Square => c.h1 = vec![0.0625],
            Experiment::SectorSweep => {
                c.theta_deg = vec![60.0, 90.0, 120.0, 147.0];
                c.h1 = vec![0.2, 0.1, 0.05];
                c.rho1 = 1e-7;
            }
            Experiment::DumbbellSweep => {
                c.c = DUMBBELL_C.to_vec();
                c.grid = vec![[48, 16], [72, 24], [96, 32], [120, 40]];
            }
            Experiment::Converge => c.h1 = vec![0.4, 0.2, 0.1, 0.05],
        }
        c
    }

    /// Defaults for `experiment`, then each layer of overrides in order.
    pub fn resolve(experiment: Experiment, layers: &[Overrides]) -> Result<Self, CliError> {
        let mut c = ExperimentConfig::defaults(experiment);
        for o in layers {
            c.apply(o.clone())?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), CliError> {
        if let Some(e) = o.experiment {
            if e != self.experiment {
                return Err(CliError::Usage(format!(
                    "config is for experiment '{e}', not '{}'",
                    self.experiment
                )));
            }
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = o.$f { self.$f = v; })* };
        }
        set!(out, threads, seed, tol, max_iter, problem, theta_deg, h1, rho1, c, grid, vertex_cap);
        if o.dump_matrices.is_some() {
            self.dump_matrices = o.dump_matrices;
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { problem: self.problem, tol: self.tol, max_iter: self.max_iter, seed: self.seed }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        self.solver().validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let angles_ok = |t: &[f64]| !t.is_empty() && t.iter().all(|&d| d > 0.0 && d < 180.0);
        let sizes_ok = |h: &[f64]| !h.is_empty() && h.iter().all(|&h| h > 0.0 && h < 1.0);
        match self.experiment {
            Experiment::Exponent if !angles_ok(&self.theta_deg) => {
                bad("theta_deg must be a nonempty list in (0, 180)".into())
            }
            Experiment::Square if self.h1.len() != 1 || !sizes_ok(&self.h1) => {
                bad(format!("square takes exactly one h1 in (0, 1), got {:?}", self.h1))
            }
            Experiment::Square | Experiment::Converge if !(self.rho1 > 0.0 && self.rho1 < 0.5) => {
                bad(format!("rho1 must lie in (0, 0.5), got {}", self.rho1))
            }
            Experiment::SectorSweep if !angles_ok(&self.theta_deg) || !sizes_ok(&self.h1) => {
                bad("sector sweep needs theta_deg in (0, 180) and h1 levels in (0, 1)".into())
            }
            Experiment::SectorSweep if !(self.rho1 > 0.0 && self.rho1 < 1.0) => {
                bad(format!("rho1 must lie in (0, 1), got {}", self.rho1))
            }
            Experiment::DumbbellSweep if self.c.is_empty() || self.c.iter().any(|&c| !(c > 0.0)) => {
                bad("c must be a nonempty list of positive values".into())
            }
            Experiment::DumbbellSweep
                if self.grid.is_empty()
                    || self.grid.iter().any(|g| g.iter().any(|&n| n < 4 || n % 2 == 1)) =>
            {
                bad(format!("grid levels must be even and at least 4, got {:?}", self.grid))
            }
            Experiment::Converge if self.h1.len() < 3 || !sizes_ok(&self.h1) => {
                bad(format!("converge needs at least 3 h1 levels in (0, 1), got {:?}", self.h1))
            }
            _ => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_text(s: &str) -> Result<Self, CliError> {
        let c: ExperimentConfig =
            toml::from_str(s).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }
}

impl Overrides {
    pub fn from_text(s: &str) -> Result<Self, CliError> {
        toml::from_str(s).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

/// Parses `a,b,c` or an inclusive range `start:stop:step`.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(format!("bad range '{s}'"));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| a + k as f64 * step).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("expected a list or start:stop:step, got '{s}'")),
    }
}

/// Parses `48x16,72x24`.
pub fn parse_grid(s: &str) -> Result<Vec<[usize; 2]>, String> {
    s.split(',')
        .map(|g| {
            let (a, b) = g.trim().split_once('x').ok_or_else(|| format!("expected NXxNY, got '{g}'"))?;
            let n = |t: &str| t.parse::<usize>().map_err(|e| format!("'{t}': {e}"));
            Ok([n(a)?, n(b)?])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        for e in [
            Experiment::Exponent,
            Experiment::Square,
            Experiment::SectorSweep,
            Experiment::DumbbellSweep,
            Experiment::Converge,
        ] {
            let mut c = ExperimentConfig::defaults(e);
            c.tol = 1.0 / 3.0 * 1e-11;
            c.dump_matrices = Some("dump".into());
            assert_eq!(ExperimentConfig::from_text(&c.to_text()).unwrap(), c);
        }
    }

    #[test]
    fn layers_apply_in_order() {
        let file = Overrides::from_text("h1 = [0.1]\nrho1 = 1e-5\nproblem = \"buckling\"").unwrap();
        let flags = Overrides { rho1: Some(1e-4), ..Default::default() };
        let c = ExperimentConfig::resolve(Experiment::Square, &[file, flags]).unwrap();
        assert_eq!((c.h1[0], c.rho1, c.problem), (0.1, 1e-4, Problem::Buckling));
    }

    #[test]
    fn rejects_wrong_experiment_and_unknown_keys() {
        let o = Overrides::from_text("experiment = \"converge\"").unwrap();
        assert!(ExperimentConfig::resolve(Experiment::Square, &[o]).is_err());
        assert!(Overrides::from_text("mesh_size = 3").is_err());
    }

    #[test]
    fn converge_needs_three_levels() {
        let o = Overrides { h1: Some(vec![0.1]), ..Default::default() };
        assert!(matches!(ExperimentConfig::resolve(Experiment::Converge, &[o]), Err(CliError::Usage(_))));
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("10:40:10").unwrap(), vec![10.0, 20.0, 30.0, 40.0]);
        assert_eq!(parse_list("60, 90").unwrap(), vec![60.0, 90.0]);
        assert!(parse_list("1:2").is_err());
        assert_eq!(parse_grid("48x16,8x4").unwrap(), vec![[48, 16], [8, 4]]);
    }
}
