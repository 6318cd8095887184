//! Run configuration: a flat sectioned key=value format.
//!
//! Sections are `[problem]`, `[discretization]`, `[solver]`, `[output]`.
//! Parsing collects every violation (unknown keys, missing required keys,
//! range errors) instead of stopping at the first.

use crate::error::{Error, Result};
use crate::fields::Grid2D;
use crate::functional::PotentialSpec;
use crate::nonlinearity::{F3Witness, Family, NonlinearitySpec};
use crate::solver::SolveConfig;
use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ProblemConfig {
    pub p: f64,
    pub a_inf: f64,
    pub well_depth: f64,
    pub well_width: f64,
    pub family: String,
    pub lambda: f64,
    pub alpha0: f64,
    pub qf: f64,
    pub theta: f64,
    pub m0: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DiscretizationConfig {
    pub half_width: f64,
    pub points_per_side: usize,
    pub radial_points: usize,
    pub radial_max: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub eta0: f64,
    pub seed_offset_x: f64,
    pub seed_offset_y: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OutputConfig {
    pub report_path: String,
    pub fields_dir: String,
    pub verbosity: u8,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub discretization: DiscretizationConfig,
    pub solver: SolverSection,
    pub output: OutputConfig,
}

impl RunConfig {
    /// The documented defaults; problem keys still count as required in
    /// config files, this is what they must equal for the stock file.
    pub fn documented_defaults() -> Self {
        RunConfig {
            problem: ProblemConfig {
                p: 1.5,
                a_inf: 1.0,
                well_depth: 0.0,
                well_width: 2.0,
                family: "power_exp".into(),
                lambda: 1.0,
                alpha0: 1.0,
                qf: 5.0,
                theta: 0.0,
                m0: 0.2,
                t0: 1.0,
            },
            discretization: DiscretizationConfig {
                half_width: 12.0,
                points_per_side: 128,
                radial_points: 2048,
                radial_max: 1.0,
            },
            solver: SolverSection {
                tol: 1e-5,
                max_iter: 5000,
                eta0: 0.1,
                seed_offset_x: 0.0,
                seed_offset_y: 0.0,
            },
            output: OutputConfig {
                report_path: String::new(),
                fields_dir: String::new(),
                verbosity: 1,
            },
        }
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.discretization.half_width, self.discretization.points_per_side)
    }

    pub fn potential(&self) -> Result<PotentialSpec> {
        if self.problem.well_depth == 0.0 {
            PotentialSpec::constant(self.problem.a_inf)
        } else {
            PotentialSpec::well(
                self.problem.a_inf,
                self.problem.well_depth,
                self.problem.well_width,
            )
        }
    }

    pub fn nonlinearity(&self) -> Result<NonlinearitySpec> {
        let spec = NonlinearitySpec {
            family: Family::PowerExp,
            lambda: self.problem.lambda,
            alpha0: self.problem.alpha0,
            q_f: self.problem.qf,
            f3: F3Witness {
                t0: self.problem.t0,
                m0: self.problem.m0,
                theta: self.problem.theta,
            },
            beta0: f64::INFINITY,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            eta0: self.solver.eta0,
            seed_offset: (self.solver.seed_offset_x, self.solver.seed_offset_y),
            ..SolveConfig::default()
        }
    }
}

const REQUIRED_PROBLEM_KEYS: [&str; 4] = ["p", "a_inf", "lambda", "alpha0"];

/// Parse and validate; on failure the error lists every violation found.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::documented_defaults();
    let mut violations: Vec<String> = Vec::new();
    let mut seen: Vec<(String, String)> = Vec::new();
    let mut section = String::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            if !matches!(section.as_str(), "problem" | "discretization" | "solver" | "output") {
                violations.push(format!("line {}: unknown section [{section}]", lineno + 1));
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            violations.push(format!("line {}: expected key = value, got {line:?}", lineno + 1));
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if section.is_empty() {
            violations.push(format!("line {}: key {key:?} outside any section", lineno + 1));
            continue;
        }
        if seen.iter().any(|(s, k)| s == &section && k == &key) {
            violations.push(format!("line {}: duplicate key {key:?} in [{section}]", lineno + 1));
            continue;
        }
        seen.push((section.clone(), key.clone()));
        apply_key(&mut cfg, &section, &key, &value, lineno + 1, &mut violations);
    }

    for key in REQUIRED_PROBLEM_KEYS {
        if !seen.iter().any(|(s, k)| s == "problem" && k == key) {
            violations.push(format!("[problem] missing required key {key:?}"));
        }
    }
    validate(&cfg, &mut violations);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(violations))
    }
}

fn apply_key(
    cfg: &mut RunConfig,
    section: &str,
    key: &str,
    value: &str,
    lineno: usize,
    violations: &mut Vec<String>,
) {
    let num = |violations: &mut Vec<String>| -> Option<f64> {
        match value.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                violations.push(format!("line {lineno}: {key} = {value:?} is not a finite number"));
                None
            }
        }
    };
    let int = |violations: &mut Vec<String>| -> Option<usize> {
        match value.parse::<usize>() {
            Ok(v) => Some(v),
            _ => {
                violations.push(format!("line {lineno}: {key} = {value:?} is not a nonnegative integer"));
                None
            }
        }
    };
    match (section, key) {
        ("problem", "p") => {
            if let Some(v) = num(violations) {
                cfg.problem.p = v;
            }
        }
        ("problem", "a_inf") => {
            if let Some(v) = num(violations) {
                cfg.problem.a_inf = v;
            }
        }
        ("problem", "well_depth") => {
            if let Some(v) = num(violations) {
                cfg.problem.well_depth = v;
            }
        }
        ("problem", "well_width") => {
            if let Some(v) = num(violations) {
                cfg.problem.well_width = v;
            }
        }
        ("problem", "family") => {
            cfg.problem.family = value.to_string();
        }
        ("problem", "lambda") => {
            if let Some(v) = num(violations) {
                cfg.problem.lambda = v;
            }
        }
        ("problem", "alpha0") => {
            if let Some(v) = num(violations) {
                cfg.problem.alpha0 = v;
            }
        }
        ("problem", "qf") => {
            if let Some(v) = num(violations) {
                cfg.problem.qf = v;
            }
        }
        ("problem", "theta") => {
            if let Some(v) = num(violations) {
                cfg.problem.theta = v;
            }
        }
        ("problem", "m0") => {
            if let Some(v) = num(violations) {
                cfg.problem.m0 = v;
            }
        }
        ("problem", "t0") => {
            if let Some(v) = num(violations) {
                cfg.problem.t0 = v;
            }
        }
        ("discretization", "half_width") => {
            if let Some(v) = num(violations) {
                cfg.discretization.half_width = v;
            }
        }
        ("discretization", "points_per_side") => {
            if let Some(v) = int(violations) {
                cfg.discretization.points_per_side = v;
            }
        }
        ("discretization", "radial_points") => {
            if let Some(v) = int(violations) {
                cfg.discretization.radial_points = v;
            }
        }
        ("discretization", "radial_max") => {
            if let Some(v) = num(violations) {
                cfg.discretization.radial_max = v;
            }
        }
        ("solver", "tol") => {
            if let Some(v) = num(violations) {
                cfg.solver.tol = v;
            }
        }
        ("solver", "max_iter") => {
            if let Some(v) = int(violations) {
                cfg.solver.max_iter = v;
            }
        }
        ("solver", "eta0") => {
            if let Some(v) = num(violations) {
                cfg.solver.eta0 = v;
            }
        }
        ("solver", "seed_offset_x") => {
            if let Some(v) = num(violations) {
                cfg.solver.seed_offset_x = v;
            }
        }
        ("solver", "seed_offset_y") => {
            if let Some(v) = num(violations) {
                cfg.solver.seed_offset_y = v;
            }
        }
        ("output", "report_path") => {
            cfg.output.report_path = value.to_string();
        }
        ("output", "fields_dir") => {
            cfg.output.fields_dir = value.to_string();
        }
        ("output", "verbosity") => match value.parse::<u8>() {
            Ok(v) if v <= 2 => cfg.output.verbosity = v,
            _ => violations.push(format!("line {lineno}: verbosity must be 0, 1 or 2, got {value:?}")),
        },
        _ => violations.push(format!("line {lineno}: unknown key {key:?} in [{section}]")),
    }
}

fn validate(cfg: &RunConfig, violations: &mut Vec<String>) {
    let pr = &cfg.problem;
    if !(pr.p > 1.0 && pr.p < 2.0) {
        violations.push(format!("p must lie in (1,2), got {}", pr.p));
    }
    if !(pr.a_inf > 0.0) {
        violations.push(format!("a_inf must be positive, got {}", pr.a_inf));
    }
    if !(pr.well_depth >= 0.0 && pr.well_depth < pr.a_inf) {
        violations.push(format!(
            "well_depth must lie in [0, a_inf), got {} with a_inf = {}",
            pr.well_depth, pr.a_inf
        ));
    }
    if !(pr.well_width > 0.0) {
        violations.push(format!("well_width must be positive, got {}", pr.well_width));
    }
    if pr.family != "power_exp" {
        violations.push(format!(
            "family must be power_exp (tabulated families are programmatic only), got {:?}",
            pr.family
        ));
    }
    if !(pr.lambda >= 0.0) {
        violations.push(format!("lambda must be >= 0, got {}", pr.lambda));
    }
    if !(pr.alpha0 > 0.0) {
        violations.push(format!("alpha0 must be positive, got {}", pr.alpha0));
    }
    if !(pr.qf > 1.0 && pr.qf <= 64.0) {
        violations.push(format!("qf must lie in (1, 64], got {}", pr.qf));
    }
    if !(pr.theta >= 0.0 && pr.theta < 1.0) {
        violations.push(format!("theta must lie in [0, 1), got {}", pr.theta));
    }
    if !(pr.m0 > 0.0) {
        violations.push(format!("m0 must be positive, got {}", pr.m0));
    }
    if !(pr.t0 > 0.0) {
        violations.push(format!("t0 must be positive, got {}", pr.t0));
    }
    let d = &cfg.discretization;
    if !(d.half_width > 0.0) {
        violations.push(format!("half_width must be positive, got {}", d.half_width));
    }
    if d.points_per_side < 8 || !d.points_per_side.is_power_of_two() {
        violations.push(format!(
            "points_per_side must be a power of two >= 8, got {}",
            d.points_per_side
        ));
    }
    if d.radial_points < 2 {
        violations.push(format!("radial_points must be >= 2, got {}", d.radial_points));
    }
    if !(d.radial_max > 0.0) {
        violations.push(format!("radial_max must be positive, got {}", d.radial_max));
    }
    let s = &cfg.solver;
    if !(s.tol > 0.0) {
        violations.push(format!("tol must be positive, got {}", s.tol));
    }
    if s.max_iter == 0 {
        violations.push("max_iter must be at least 1".into());
    }
    if !(s.eta0 > 0.0) {
        violations.push(format!("eta0 must be positive, got {}", s.eta0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULT_FILE: &str = "\
[problem]
p = 1.5
a_inf = 1.0
lambda = 1.0
alpha0 = 1.0

[discretization]
half_width = 12.0
points_per_side = 128

[solver]
tol = 1e-5
";

    #[test]
    fn default_file_round_trips_to_documented_defaults() {
        let cfg = parse_config(DEFAULT_FILE).unwrap();
        assert_eq!(cfg, RunConfig::documented_defaults());
    }

    #[test]
    fn empty_problem_section_lists_every_missing_key() {
        let err = parse_config("[problem]\n").unwrap_err();
        let Error::Config(violations) = err else {
            panic!("expected config error")
        };
        for key in REQUIRED_PROBLEM_KEYS {
            assert!(
                violations.iter().any(|v| v.contains(key)),
                "missing-key list lacks {key}: {violations:?}"
            );
        }
    }

    #[test]
    fn p_range_violation_cites_the_interval() {
        let text = DEFAULT_FILE.replace("p = 1.5", "p = 2.5");
        let err = parse_config(&text).unwrap_err();
        let Error::Config(violations) = err else {
            panic!("expected config error")
        };
        assert!(
            violations.iter().any(|v| v.contains("p must lie in (1,2)")),
            "{violations:?}"
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{DEFAULT_FILE}\nfrobnicate = 3\n");
        let err = parse_config(&text).unwrap_err();
        let Error::Config(violations) = err else {
            panic!("expected config error")
        };
        assert!(violations.iter().any(|v| v.contains("frobnicate")));
    }

    #[test]
    fn all_violations_reported_not_just_first() {
        let text = "[problem]\np = 2.5\nqf = 0.5\n";
        let Error::Config(violations) = parse_config(text).unwrap_err() else {
            panic!()
        };
        assert!(violations.len() >= 4, "want p, qf and missing-key entries: {violations:?}");
    }

    #[test]
    fn conversion_helpers_build_valid_objects() {
        let cfg = parse_config(DEFAULT_FILE).unwrap();
        assert!(cfg.grid().is_ok());
        assert!(cfg.potential().is_ok());
        assert!(cfg.nonlinearity().is_ok());
        assert_eq!(cfg.solve_config().max_iter, 5000);
    }
}
