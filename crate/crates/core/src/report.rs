//! Command implementations behind the `orlicz-lab` binary and the JSON report
//! envelope they produce.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::criteria::{check_all, implication_audit, AuditReport, CriteriaError, Outcome, Property, Verdict};
use crate::lab::{
    chaos_periodic_vector, empirical_return, orbit_norm_series, LabError, PeriodicityReport, ReturnReport,
};
use crate::orlicz::{luxemburg_norm, modular, NormError, OrliczVector};
use crate::young::{convexity_defect, delta2_probe, young_inequality_check, Delta2Report, YoungError};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "orlicz-lab";
const ORBIT_SERIES_STEPS: u64 = 128;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Young(#[from] YoungError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

fn io_error(path: &Path, e: impl ToString) -> AppError {
    AppError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// 0 = witness found, 2 = obstruction, 3 = inconclusive; errors map to 1.
pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::WitnessFound => 0,
        Outcome::ObstructionFound => 2,
        Outcome::Inconclusive => 3,
    }
}

pub const ERROR_EXIT_CODE: i32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedVerdict {
    pub property: Property,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedSeries {
    pub name: String,
    /// `values[i]` belongs to `n = i`.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub norm: f64,
    /// `ρ(f / norm)`, which is `1` up to bisection tolerance for nonzero `f`.
    pub modular_at_norm: f64,
    pub support_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungProbeReport {
    pub delta2: Delta2Report,
    /// `(y, Ψ(y))`; `None` where `Ψ(y) = ∞`.
    pub conjugate: Vec<(f64, Option<f64>)>,
    pub young_inequality_violation: f64,
    pub convexity_defect: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub outcome: Option<Outcome>,
    pub exit_code: i32,
    pub verdicts: Vec<NamedVerdict>,
    pub audit: Option<AuditReport>,
    pub returns: Vec<ReturnReport>,
    pub periodicity: Vec<PeriodicityReport>,
    pub series: Vec<NamedSeries>,
    pub norm: Option<NormReport>,
    pub young_probe: Option<YoungProbeReport>,
    pub flags: Vec<String>,
    pub timings: Timings,
}

impl ReportEnvelope {
    fn new(command: &str, config: &RunConfig) -> Self {
        ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            outcome: None,
            exit_code: 0,
            verdicts: Vec::new(),
            audit: None,
            returns: Vec::new(),
            periodicity: Vec::new(),
            series: Vec::new(),
            norm: None,
            young_probe: None,
            flags: Vec::new(),
            timings: Timings::default(),
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        self.timings.total_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }

    pub fn verdict(&self, property: Property) -> Option<&Verdict> {
        self.verdicts
            .iter()
            .find(|v| v.property == property)
            .map(|v| &v.verdict)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with timings zeroed; byte-identical across runs of the same config.
    pub fn deterministic_json(&self) -> String {
        let mut copy = self.clone();
        copy.timings = Timings::default();
        copy.to_json()
    }

    /// CSV exports keyed by file suffix.
    pub fn csv_tables(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .series
            .iter()
            .map(|s| (s.name.clone(), series_csv(&s.values)))
            .collect();
        if let Some(p) = &self.young_probe {
            let mut csv = String::from("y,psi\n");
            for (y, psi) in &p.conjugate {
                match psi {
                    Some(v) => writeln!(csv, "{y},{v}"),
                    None => writeln!(csv, "{y},inf"),
                }
                .expect("write to string");
            }
            out.push(("conjugate".to_string(), csv));
        }
        out
    }

    /// Writes the JSON report to `path` and each CSV table next to it as
    /// `<stem>.<name>.csv`.
    pub fn write_to(&self, path: &Path) -> Result<Vec<PathBuf>, AppError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        }
        fs::write(path, self.to_json()).map_err(|e| io_error(path, e))?;
        let mut written = vec![path.to_path_buf()];
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        for (name, csv) in self.csv_tables() {
            let p = path.with_file_name(format!("{stem}.{name}.csv"));
            fs::write(&p, csv).map_err(|e| io_error(&p, e))?;
            written.push(p);
        }
        Ok(written)
    }
}

/// `n,value` rows starting at `n = 0`.
pub fn series_csv(values: &[f64]) -> String {
    let mut csv = String::from("n,value\n");
    for (n, v) in values.iter().enumerate() {
        writeln!(csv, "{n},{v}").expect("write to string");
    }
    csv
}

/// Runs every checker plus the implication audit; the exit code follows the
/// configured property.
pub fn cmd_check(config: &RunConfig) -> Result<ReportEnvelope, AppError> {
    let started = Instant::now();
    let req = config.request()?;
    let all = check_all(&req)?;
    let audit = implication_audit(&all)?;
    let mut env = ReportEnvelope::new("check", config);
    let outcome = all
        .iter()
        .find(|(p, _)| *p == config.property)
        .map(|(_, v)| v.outcome)
        .expect("check_all covers every property");
    if all.iter().any(|(p, v)| *p == config.property && v.tail_unbounded) {
        env.flags.push("tail_unbounded".into());
    }
    env.outcome = Some(outcome);
    env.exit_code = exit_code(outcome);
    env.verdicts = all
        .into_iter()
        .map(|(property, verdict)| NamedVerdict { property, verdict })
        .collect();
    env.audit = Some(audit);
    Ok(env.finish(started))
}

/// Builds the lab vectors at the verdict's witness `n` values, with
/// `f = χ_K`. Return residuals are tested against `L·ε·N(f)`.
pub fn cmd_simulate(config: &RunConfig) -> Result<ReportEnvelope, AppError> {
    let started = Instant::now();
    let mut env = ReportEnvelope::new("simulate", config);
    let sys = config.system()?;
    let f = OrliczVector::indicator(&config.compact_set()?);
    let f_norm = luxemburg_norm(&f, &sys.young)?;
    env.series.push(NamedSeries {
        name: "orbit_norm".into(),
        values: orbit_norm_series(&sys, &f, config.n_max.min(ORBIT_SERIES_STEPS))?,
    });

    if config.depth == 0 {
        let eps = config.epsilons[0];
        env.returns.push(empirical_return(&sys, &f, 1, 0, eps)?);
        env.outcome = Some(Outcome::WitnessFound);
        env.exit_code = 0;
        return Ok(env.finish(started));
    }

    let req = config.request()?;
    let property = config.property;
    let all = check_all(&req)?;
    let verdict = all
        .into_iter()
        .find(|(p, _)| *p == property)
        .map(|(_, v)| v)
        .expect("check_all covers every property");
    let mut outcome = verdict.outcome;
    if verdict.tail_unbounded {
        env.flags.push("tail_unbounded".into());
    }
    if outcome == Outcome::WitnessFound {
        let depth = match property {
            Property::MultiplyRecurrent | Property::Chaotic => config.depth,
            Property::Recurrent | Property::Transitive | Property::Mixing => 1,
        };
        for w in &verdict.witness {
            let target = depth as f64 * w.epsilon * f_norm;
            let r = empirical_return(&sys, &f, w.n, depth, target)?;
            if !r.passed {
                env.flags.push(format!("return_target_missed:n={}", w.n));
            }
            env.returns.push(r);
            if property == Property::Chaotic {
                match chaos_periodic_vector(&sys, &f, w.n, None) {
                    Ok((_, rep)) => {
                        if !rep.within_bound {
                            env.flags.push(format!("periodicity_defect_exceeds_bound:n={}", w.n));
                        }
                        if rep.large_terms {
                            env.flags.push(format!("large_terms:n={}", w.n));
                        }
                        env.periodicity.push(rep);
                    }
                    Err(LabError::TailUnbounded { n }) => env.flags.push(format!("tail_unbounded:n={n}")),
                    Err(e) => return Err(e.into()),
                }
            }
        }
        if !env.flags.is_empty() {
            outcome = Outcome::Inconclusive;
        }
    }
    env.outcome = Some(outcome);
    env.exit_code = exit_code(outcome);
    env.verdicts.push(NamedVerdict { property, verdict });
    Ok(env.finish(started))
}

pub fn load_vector(path: &Path) -> Result<OrliczVector, AppError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let v: OrliczVector = serde_json::from_str(&text).map_err(ConfigError::from)?;
    Ok(v)
}

pub fn cmd_norm(config: &RunConfig, vector: &OrliczVector) -> Result<ReportEnvelope, AppError> {
    let started = Instant::now();
    let mut env = ReportEnvelope::new("norm", config);
    for g in vector.support() {
        config.group.check(g).map_err(|e| ConfigError::Field {
            field: "vector",
            message: e.to_string(),
        })?;
    }
    let norm = luxemburg_norm(vector, &config.young)?;
    let modular_at_norm = if norm > 0.0 && norm.is_finite() {
        modular(vector, &config.young, norm)?
    } else {
        0.0
    };
    env.norm = Some(NormReport {
        norm,
        modular_at_norm,
        support_size: vector.support_size(),
    });
    Ok(env.finish(started))
}

pub fn cmd_probe_young(config: &RunConfig) -> Result<ReportEnvelope, AppError> {
    let started = Instant::now();
    let mut env = ReportEnvelope::new("probe-young", config);
    let phi = &config.young;
    let p = &config.probe;
    let delta2 = delta2_probe(phi, p.t_lo, p.t_hi, p.n_grid)?;
    let rows = p.conjugate_rows;
    let conjugate = (0..rows)
        .map(|i| {
            let y = p.y_max * i as f64 / (rows - 1) as f64;
            let psi = phi.complementary(y)?;
            Ok((y, psi.is_finite().then_some(psi)))
        })
        .collect::<Result<Vec<_>, YoungError>>()?;
    env.young_probe = Some(YoungProbeReport {
        delta2,
        conjugate,
        young_inequality_violation: young_inequality_check(phi, p.samples, config.seed)?,
        convexity_defect: convexity_defect(phi, p.convexity_t_hi, 400)?,
    });
    Ok(env.finish(started))
}
