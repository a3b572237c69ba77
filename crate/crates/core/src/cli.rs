//! The `mvgraph` command line.
//!
//! Exit codes: 0 on success, 1 on validation failure or a mode mismatch,
//! 2 on usage, IO or syntax errors. Reports go to stdout and diagnostics to
//! stderr; `--json` switches both to JSON.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{mcheck_mv, pcheck_m_mv, pcheck_mv, LcpMode};
use crate::baseline::{mcheck_svm, pcheck_m_svm, pcheck_svm};
use crate::bench::{run_bench, BenchError, BenchParams};
use crate::generator::{generate_versioning, GeneratorParams};
use crate::graph::Pattern;
use crate::io::report::{
    conflict_line, merge_violation_line, model_text, model_view, tagged_json, to_json,
    violation_line,
};
use crate::io::{export_mvm, parse_constraints, parse_corpus, write_corpus, FormatError};
use crate::mvm::{adapt_type_graph, comb};
use crate::versioning::ModelVersioning;

#[derive(Debug, Parser)]
#[command(
    name = "mvgraph",
    version,
    about = "Multi-version model analyses for typed graph versionings"
)]
struct Cli {
    /// Emit machine-readable JSON reports and diagnostics.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    /// Fold all versions into one multi-version model.
    Mvm,
    /// Materialize versions and merges one at a time.
    Svm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Lcp {
    /// Merge over every latest common predecessor.
    All,
    /// Merge over the smallest one by id.
    Single,
}

impl From<Lcp> for LcpMode {
    fn from(l: Lcp) -> Self {
        match l {
            Lcp::All => LcpMode::All,
            Lcp::Single => LcpMode::Single,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a corpus is a correct versioning.
    Validate { corpus: PathBuf },
    /// Print one version, extracted from the multi-version model.
    Project {
        corpus: PathBuf,
        #[arg(long = "version", value_name = "ID")]
        version: String,
    },
    /// Report constraint violations in every version.
    Check {
        corpus: PathBuf,
        constraints: PathBuf,
        #[arg(long, value_enum, default_value = "mvm")]
        mode: Mode,
    },
    /// Report insert-delete conflicts for every mergeable version pair.
    Conflicts {
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "mvm")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "all")]
        lcp: Lcp,
    },
    /// Report violations no conflict resolution avoids in hypothetical merges.
    MergeCheck {
        corpus: PathBuf,
        constraints: PathBuf,
        #[arg(long, value_enum, default_value = "mvm")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "all")]
        lcp: Lcp,
    },
    /// Run every analysis in both modes and compare the results.
    Oracle {
        corpus: PathBuf,
        constraints: PathBuf,
    },
    /// Time both modes on generated versionings.
    Bench {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
    /// Write a generated versioning as a corpus.
    Generate {
        #[arg(long)]
        params: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Write the multi-version model of a corpus.
    Export {
        corpus: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: 2,
            kind: "io",
            message: format!("{}: {e}", path.display()),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            kind: "validation",
            message: message.into(),
        }
    }

    fn format(path: &Path, e: FormatError) -> Self {
        let (code, kind) = match e {
            FormatError::Syntax { .. } | FormatError::FormatTag { .. } => (2, "syntax"),
            FormatError::Graph(_) | FormatError::Validation(_) => (1, "validation"),
        };
        Self {
            code,
            kind,
            message: format!("{}: {e}", path.display()),
        }
    }
}

type CliResult = Result<(u8, Vec<u8>), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

fn load_corpus(path: &Path) -> Result<ModelVersioning, Failure> {
    parse_corpus(&read(path)?).map_err(|e| Failure::format(path, e))
}

fn load_constraints(path: &Path, v: &ModelVersioning) -> Result<Vec<Pattern>, Failure> {
    parse_constraints(&read(path)?, v.type_graph()).map_err(|e| Failure::format(path, e))
}

fn write_output(path: Option<&Path>, bytes: Vec<u8>) -> CliResult {
    match path {
        Some(p) => {
            fs::write(p, bytes).map_err(|e| Failure::io(p, e))?;
            Ok((0, Vec::new()))
        }
        None => Ok((0, bytes)),
    }
}

fn text_lines(lines: impl IntoIterator<Item = String>) -> Vec<u8> {
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out.into_bytes()
}

fn analysis_failure(e: impl std::fmt::Display) -> Failure {
    Failure::invalid(e.to_string())
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    valid: bool,
    versions: usize,
    modifications: usize,
    root: &'a str,
}

#[derive(Serialize)]
struct OracleLine {
    analysis: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lcp: Option<LcpMode>,
    mvm: usize,
    svm: usize,
    equal: bool,
}

impl OracleLine {
    fn text(&self) -> String {
        let mut s = self.analysis.to_owned();
        if let Some(p) = &self.pattern {
            s.push(' ');
            s.push_str(p);
        }
        if let Some(l) = self.lcp {
            s.push_str(match l {
                LcpMode::All => " lcp=all",
                LcpMode::Single => " lcp=single",
            });
        }
        let verdict = if self.equal { "ok" } else { "MISMATCH" };
        format!("{s} mvm={} svm={} {verdict}", self.mvm, self.svm)
    }
}

fn oracle(v: &ModelVersioning, patterns: &[Pattern]) -> Result<Vec<OracleLine>, Failure> {
    let mvm = comb(v).map_err(analysis_failure)?;
    let mut lines = Vec::new();
    for p in patterns {
        let mut a = pcheck_mv(&mvm, p).map_err(analysis_failure)?;
        let mut b = pcheck_svm(v, p).map_err(analysis_failure)?;
        a.sort();
        b.sort();
        lines.push(OracleLine {
            analysis: "check",
            pattern: Some(p.name().to_owned()),
            lcp: None,
            mvm: a.len(),
            svm: b.len(),
            equal: a == b,
        });
    }
    for lcp in [LcpMode::All, LcpMode::Single] {
        let mut a = mcheck_mv(&mvm, lcp);
        let mut b = mcheck_svm(v, lcp);
        a.sort();
        b.sort();
        lines.push(OracleLine {
            analysis: "conflicts",
            pattern: None,
            lcp: Some(lcp),
            mvm: a.len(),
            svm: b.len(),
            equal: a == b,
        });
        for p in patterns {
            let mut a = pcheck_m_mv(&mvm, p, lcp).map_err(analysis_failure)?;
            let mut b = pcheck_m_svm(v, p, lcp).map_err(analysis_failure)?;
            a.sort();
            b.sort();
            lines.push(OracleLine {
                analysis: "merge-check",
                pattern: Some(p.name().to_owned()),
                lcp: Some(lcp),
                mvm: a.len(),
                svm: b.len(),
                equal: a == b,
            });
        }
    }
    Ok(lines)
}

fn execute(cli: Cli) -> CliResult {
    let json = cli.json;
    match cli.command {
        Command::Validate { corpus } => {
            let v = load_corpus(&corpus)?;
            // the multi-version encoding must exist for the analyses to run
            adapt_type_graph(v.type_graph()).map_err(analysis_failure)?;
            let report = ValidateReport {
                valid: true,
                versions: v.version_ids().len(),
                modifications: v.modifications().count(),
                root: v.root().as_str(),
            };
            Ok((
                0,
                if json {
                    to_json(&report)
                } else {
                    text_lines([format!(
                        "valid: {} versions, {} modifications, root {}",
                        report.versions, report.modifications, report.root
                    )])
                },
            ))
        }
        Command::Project { corpus, version } => {
            let v = load_corpus(&corpus)?;
            let mvm = comb(&v).map_err(analysis_failure)?;
            let m = mvm
                .proj(&version)
                .map_err(|e| Failure::usage(e.to_string()))?;
            Ok((
                0,
                if json {
                    to_json(&model_view(&version, &m))
                } else {
                    model_text(&version, &m).into_bytes()
                },
            ))
        }
        Command::Check {
            corpus,
            constraints,
            mode,
        } => {
            let v = load_corpus(&corpus)?;
            let patterns = load_constraints(&constraints, &v)?;
            let mvm = match mode {
                Mode::Mvm => Some(comb(&v).map_err(analysis_failure)?),
                Mode::Svm => None,
            };
            let mut results = Vec::new();
            for p in &patterns {
                let mut r = match &mvm {
                    Some(mvm) => pcheck_mv(mvm, p),
                    None => pcheck_svm(&v, p),
                }
                .map_err(analysis_failure)?;
                r.sort();
                results.push((p.name(), r));
            }
            let out = if json {
                tagged_json(&results)
            } else {
                text_lines(
                    results
                        .iter()
                        .flat_map(|(name, r)| r.iter().map(|x| violation_line(name, x))),
                )
            };
            Ok((0, out))
        }
        Command::Conflicts { corpus, mode, lcp } => {
            let v = load_corpus(&corpus)?;
            let mut r = match mode {
                Mode::Mvm => mcheck_mv(&comb(&v).map_err(analysis_failure)?, lcp.into()),
                Mode::Svm => mcheck_svm(&v, lcp.into()),
            };
            r.sort();
            Ok((
                0,
                if json {
                    to_json(&r)
                } else {
                    text_lines(r.iter().map(conflict_line))
                },
            ))
        }
        Command::MergeCheck {
            corpus,
            constraints,
            mode,
            lcp,
        } => {
            let v = load_corpus(&corpus)?;
            let patterns = load_constraints(&constraints, &v)?;
            let mvm = match mode {
                Mode::Mvm => Some(comb(&v).map_err(analysis_failure)?),
                Mode::Svm => None,
            };
            let mut results = Vec::new();
            for p in &patterns {
                let mut r = match &mvm {
                    Some(mvm) => pcheck_m_mv(mvm, p, lcp.into()),
                    None => pcheck_m_svm(&v, p, lcp.into()),
                }
                .map_err(analysis_failure)?;
                r.sort();
                results.push((p.name(), r));
            }
            let out = if json {
                tagged_json(&results)
            } else {
                text_lines(
                    results
                        .iter()
                        .flat_map(|(name, r)| r.iter().map(|x| merge_violation_line(name, x))),
                )
            };
            Ok((0, out))
        }
        Command::Oracle {
            corpus,
            constraints,
        } => {
            let v = load_corpus(&corpus)?;
            let patterns = load_constraints(&constraints, &v)?;
            let lines = oracle(&v, &patterns)?;
            let code = if lines.iter().all(|l| l.equal) { 0 } else { 1 };
            Ok((
                code,
                if json {
                    to_json(&lines)
                } else {
                    text_lines(lines.iter().map(OracleLine::text))
                },
            ))
        }
        Command::Bench { params, repeat } => {
            let bytes = read(&params)?;
            let p: BenchParams =
                serde_json::from_slice(&bytes).map_err(|e| Failure::format(&params, e.into()))?;
            let report = run_bench(&p, repeat).map_err(|e| match e {
                BenchError::Repeat(_)
                | BenchError::FormatTag(_)
                | BenchError::UnknownPattern { .. } => Failure::usage(e.to_string()),
                BenchError::Params { .. } => Failure::usage(e.to_string()),
                BenchError::CountMismatch { .. } => Failure {
                    code: 1,
                    kind: "mismatch",
                    message: e.to_string(),
                },
                BenchError::Mvm(_) | BenchError::Graph(_) => Failure::invalid(e.to_string()),
            })?;
            Ok((
                0,
                if json {
                    to_json(&report)
                } else {
                    report.to_text().into_bytes()
                },
            ))
        }
        Command::Generate { params, output } => {
            let bytes = read(&params)?;
            let p: GeneratorParams =
                serde_json::from_slice(&bytes).map_err(|e| Failure::format(&params, e.into()))?;
            let v = generate_versioning(&p).map_err(|e| Failure::usage(e.to_string()))?;
            write_output(output.as_deref(), write_corpus(&v))
        }
        Command::Export { corpus, output } => {
            let v = load_corpus(&corpus)?;
            let mvm = comb(&v).map_err(analysis_failure)?;
            write_output(output.as_deref(), export_mvm(&mvm))
        }
    }
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    message: &'a str,
}

/// Runs one invocation with `args` (program name first) and captures its output.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string().into_bytes();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: Vec::new(),
                    stderr: rendered,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: rendered,
                    stderr: Vec::new(),
                }
            };
        }
    };
    match execute(cli) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: Vec::new(),
        },
        Err(f) => {
            let stderr = if json {
                to_json(&Diagnostic {
                    error: f.kind,
                    message: &f.message,
                })
            } else {
                format!("mvgraph: {} error: {}\n", f.kind, f.message).into_bytes()
            };
            Outcome {
                code: f.code,
                stdout: Vec::new(),
                stderr,
            }
        }
    }
}

pub fn main() -> ExitCode {
    let out = run(std::env::args_os());
    // a closed pipe is not worth reporting
    let _ = std::io::stdout().write_all(&out.stdout);
    let _ = std::io::stderr().write_all(&out.stderr);
    ExitCode::from(out.code)
}
