//! Timing of the folded analyses against their single-version baselines on
//! generated versionings.
//!
//! Construction of the multi-version model and precomputation of the latest
//! common predecessors happen before timing starts, for both modes.

use std::fmt::Write;
use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{mcheck_mv, pcheck_m_mv, pcheck_mv, LcpMode};
use crate::baseline::{mcheck_svm, pcheck_m_svm, pcheck_svm};
use crate::error::{GraphError, MvmError};
use crate::generator::{generate_versioning, oo_constraints, GeneratorParams, ParamError};
use crate::graph::Pattern;
use crate::mvm::{comb, MultiVersionModel};
use crate::versioning::ModelVersioning;

pub const BENCH_FORMAT: &str = "mvgraph-bench/1";
pub const BENCH_REPORT_FORMAT: &str = "mvgraph-bench-report/1";
pub const MIN_REPEAT: usize = 5;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unsupported format tag `{0}`, expected `{BENCH_FORMAT}`")]
    FormatTag(String),
    #[error("repeat must be at least {MIN_REPEAT}, got {0}")]
    Repeat(usize),
    #[error("scenario `{scenario}`: {source}")]
    Params {
        scenario: String,
        source: ParamError,
    },
    #[error("scenario `{scenario}` names unknown pattern `{pattern}`")]
    UnknownPattern { scenario: String, pattern: String },
    #[error("scenario `{scenario}`, task {task}: mvm found {mvm} results, svm found {svm}")]
    CountMismatch {
        scenario: String,
        task: Task,
        mvm: usize,
        svm: usize,
    },
    #[error(transparent)]
    Mvm(#[from] MvmError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Check,
    Conflicts,
    MergeCheck,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Check => "check",
            Task::Conflicts => "conflicts",
            Task::MergeCheck => "merge-check",
        })
    }
}

fn all_tasks() -> Vec<Task> {
    vec![Task::Check, Task::Conflicts, Task::MergeCheck]
}

fn lcp_all() -> LcpMode {
    LcpMode::All
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub generator: GeneratorParams,
    #[serde(default = "all_tasks")]
    pub tasks: Vec<Task>,
    /// Subset of the OO constraints to check; all of them when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<Vec<String>>,
    #[serde(default = "lcp_all")]
    pub lcp: LcpMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchParams {
    pub format: String,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub task: Task,
    /// Mean seconds per run.
    pub mvm_time: f64,
    pub svm_time: f64,
    pub mvm_count: usize,
    pub svm_count: usize,
    /// `svm_time / mvm_time`.
    pub speedup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub versions: usize,
    pub store_nodes: usize,
    pub store_edges: usize,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub format: &'static str,
    pub repeat: usize,
    pub scenarios: Vec<ScenarioReport>,
}

impl BenchReport {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<24} {:<12} {:>8} {:>12} {:>12} {:>9} {:>10} {:>10}\n",
            "scenario",
            "task",
            "versions",
            "mvm_time_s",
            "svm_time_s",
            "speedup",
            "mvm_count",
            "svm_count"
        );
        for s in &self.scenarios {
            for t in &s.tasks {
                let _ = writeln!(
                    out,
                    "{:<24} {:<12} {:>8} {:>12.6} {:>12.6} {:>9.2} {:>10} {:>10}",
                    s.name,
                    t.task.to_string(),
                    s.versions,
                    t.mvm_time,
                    t.svm_time,
                    t.speedup,
                    t.mvm_count,
                    t.svm_count
                );
            }
        }
        out
    }
}

fn select_patterns(s: &Scenario, v: &ModelVersioning) -> Result<Vec<Pattern>, BenchError> {
    let all = oo_constraints(v.type_graph());
    let Some(names) = &s.patterns else {
        return Ok(all);
    };
    names
        .iter()
        .map(|n| {
            all.iter()
                .find(|p| p.name() == n)
                .cloned()
                .ok_or_else(|| BenchError::UnknownPattern {
                    scenario: s.name.clone(),
                    pattern: n.clone(),
                })
        })
        .collect()
}

fn run_mvm(
    task: Task,
    mvm: &MultiVersionModel,
    patterns: &[Pattern],
    lcp: LcpMode,
) -> Result<usize, GraphError> {
    Ok(match task {
        Task::Check => {
            let mut n = 0;
            for p in patterns {
                n += black_box(pcheck_mv(mvm, p)?).len();
            }
            n
        }
        Task::Conflicts => black_box(mcheck_mv(mvm, lcp)).len(),
        Task::MergeCheck => {
            let mut n = 0;
            for p in patterns {
                n += black_box(pcheck_m_mv(mvm, p, lcp)?).len();
            }
            n
        }
    })
}

fn run_svm(
    task: Task,
    v: &ModelVersioning,
    patterns: &[Pattern],
    lcp: LcpMode,
) -> Result<usize, GraphError> {
    Ok(match task {
        Task::Check => {
            let mut n = 0;
            for p in patterns {
                n += black_box(pcheck_svm(v, p)?).len();
            }
            n
        }
        Task::Conflicts => black_box(mcheck_svm(v, lcp)).len(),
        Task::MergeCheck => {
            let mut n = 0;
            for p in patterns {
                n += black_box(pcheck_m_svm(v, p, lcp)?).len();
            }
            n
        }
    })
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Benchmarks one generated versioning. Each repetition runs the mvm variant
/// first, then the svm variant.
pub fn bench_scenario(s: &Scenario, repeat: usize) -> Result<ScenarioReport, BenchError> {
    if repeat < MIN_REPEAT {
        return Err(BenchError::Repeat(repeat));
    }
    let v = generate_versioning(&s.generator).map_err(|source| BenchError::Params {
        scenario: s.name.clone(),
        source,
    })?;
    let patterns = select_patterns(s, &v)?;
    let mvm = comb(&v)?;
    v.dag().lcp_table();

    let mut tasks = Vec::with_capacity(s.tasks.len());
    for &task in &s.tasks {
        let (mut mvm_total, mut svm_total) = (0.0, 0.0);
        let (mut mvm_count, mut svm_count) = (0, 0);
        for _ in 0..repeat {
            let (n, t) = timed(|| run_mvm(task, &mvm, &patterns, s.lcp));
            mvm_count = n?;
            mvm_total += t;
            let (n, t) = timed(|| run_svm(task, &v, &patterns, s.lcp));
            svm_count = n?;
            svm_total += t;
        }
        if mvm_count != svm_count {
            return Err(BenchError::CountMismatch {
                scenario: s.name.clone(),
                task,
                mvm: mvm_count,
                svm: svm_count,
            });
        }
        let (mvm_time, svm_time) = (mvm_total / repeat as f64, svm_total / repeat as f64);
        tasks.push(TaskReport {
            task,
            mvm_time,
            svm_time,
            mvm_count,
            svm_count,
            speedup: if mvm_time > 0.0 {
                svm_time / mvm_time
            } else {
                f64::INFINITY
            },
        });
    }
    Ok(ScenarioReport {
        name: s.name.clone(),
        versions: v.version_ids().len(),
        store_nodes: v.store().node_count(),
        store_edges: v.store().edge_count(),
        tasks,
    })
}

pub fn run_bench(params: &BenchParams, repeat: usize) -> Result<BenchReport, BenchError> {
    if params.format != BENCH_FORMAT {
        return Err(BenchError::FormatTag(params.format.clone()));
    }
    if repeat < MIN_REPEAT {
        return Err(BenchError::Repeat(repeat));
    }
    let scenarios = params
        .scenarios
        .iter()
        .map(|s| bench_scenario(s, repeat))
        .collect::<Result<_, _>>()?;
    Ok(BenchReport {
        format: BENCH_REPORT_FORMAT,
        repeat,
        scenarios,
    })
}
