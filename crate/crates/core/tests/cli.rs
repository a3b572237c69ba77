use std::path::PathBuf;

use mvgraph::cli::{run, Outcome};
use mvgraph::generator::{generate_versioning, oo_constraints, oo_type_graph, GeneratorParams};
use mvgraph::io::{parse_constraints, parse_corpus, write_constraints, write_corpus, FormatError};
use mvgraph::VersioningError;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn ex(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

fn mvgraph(args: &[&str]) -> Outcome {
    run(std::iter::once("mvgraph").chain(args.iter().copied()))
}

fn stdout(o: &Outcome) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mvgraph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn shipped_files_are_canonical() {
    for name in ["running.corpus", "oo.corpus"] {
        let bytes = std::fs::read(examples().join(name)).unwrap();
        let v = parse_corpus(&bytes).unwrap();
        assert_eq!(write_corpus(&v), bytes, "{name}");
    }
    for (corpus, constraints) in [
        ("running.corpus", "running.constraints"),
        ("oo.corpus", "oo.constraints"),
    ] {
        let v = parse_corpus(&std::fs::read(examples().join(corpus)).unwrap()).unwrap();
        let bytes = std::fs::read(examples().join(constraints)).unwrap();
        let patterns = parse_constraints(&bytes, v.type_graph()).unwrap();
        assert_eq!(write_constraints(&patterns), bytes, "{constraints}");
    }
}

#[test]
fn shipped_oo_constraints_are_the_builtin_ones() {
    let bytes = std::fs::read(examples().join("oo.constraints")).unwrap();
    let tg = oo_type_graph();
    let parsed = parse_constraints(&bytes, &tg).unwrap();
    assert_eq!(
        write_constraints(&oo_constraints(&tg)),
        write_constraints(&parsed)
    );
    let oo = parse_corpus(&std::fs::read(examples().join("oo.corpus")).unwrap()).unwrap();
    assert_eq!(oo.type_graph().as_ref(), tg.as_ref());
}

#[test]
fn generated_corpora_round_trip() {
    for seed in 0..10 {
        let mut p = GeneratorParams::new(seed, 25, 9);
        p.merge_prob = 0.3;
        let bytes = write_corpus(&generate_versioning(&p).unwrap());
        assert_eq!(write_corpus(&parse_corpus(&bytes).unwrap()), bytes);
    }
}

#[test]
fn undeclared_node_is_a_validation_error() {
    let text = std::fs::read_to_string(examples().join("running.corpus")).unwrap();
    let bad = text.replacen(
        "\"c1\",\n        \"c2\",\n        \"c3\"\n      ]",
        "\"c1\",\n        \"c2\",\n        \"c9\"\n      ]",
        1,
    );
    assert_ne!(bad, text);
    assert!(matches!(
        parse_corpus(bad.as_bytes()),
        Err(FormatError::Graph(_))
    ));

    let path = temp("undeclared.corpus");
    std::fs::write(&path, bad).unwrap();
    let o = mvgraph(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("c9"));
}

#[test]
fn cyclic_corpus_fails_validation() {
    let text = std::fs::read_to_string(examples().join("running.corpus")).unwrap();
    let bad = text.replace(
        "\"modifications\": [\n",
        "\"modifications\": [\n    [\n      \"M2\",\n      \"M1\"\n    ],\n",
    );
    let err = parse_corpus(bad.as_bytes()).unwrap_err();
    assert!(
        matches!(
            err,
            FormatError::Validation(VersioningError::CycleDetected(_))
        ),
        "{err}"
    );
}

#[test]
fn syntax_errors_carry_a_location() {
    let err = parse_corpus(b"{\n  \"format\": \"mvgraph-corpus/1\",\n  oops\n}").unwrap_err();
    let FormatError::Syntax { line, .. } = err else {
        panic!("expected a syntax error, got {err}");
    };
    assert_eq!(line, 3);
    let path = temp("broken.corpus");
    std::fs::write(&path, "[").unwrap();
    assert_eq!(mvgraph(&["validate", path.to_str().unwrap()]).code, 2);
}

#[test]
fn exit_codes() {
    assert_eq!(mvgraph(&["validate", &ex("running.corpus")]).code, 0);
    assert_eq!(mvgraph(&["validate", "/nonexistent/x.corpus"]).code, 2);
    assert_eq!(mvgraph(&["frobnicate"]).code, 2);
    assert_eq!(
        mvgraph(&["conflicts", &ex("running.corpus"), "--mode", "both"]).code,
        2
    );
    assert_eq!(
        mvgraph(&["project", &ex("running.corpus"), "--version", "M7"]).code,
        2
    );
    assert_eq!(mvgraph(&["--help"]).code, 0);
    // constraints typed over another type graph
    assert_eq!(
        mvgraph(&["check", &ex("running.corpus"), &ex("oo.constraints")]).code,
        1
    );
}

#[test]
fn json_diagnostics_on_stderr() {
    let o = mvgraph(&["--json", "validate", "/nonexistent/x.corpus"]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"], "io");
}

#[test]
fn validate_reports_shape() {
    let o = mvgraph(&["validate", &ex("oo.corpus")]);
    assert_eq!(stdout(&o), "valid: 5 versions, 5 modifications, root V1\n");
    let o = mvgraph(&["--json", "validate", &ex("oo.corpus")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["versions"], 5);
}

#[test]
fn project_prints_the_version() {
    let o = mvgraph(&["project", &ex("running.corpus"), "--version", "M3"]);
    assert_eq!(o.code, 0);
    assert_eq!(
        stdout(&o),
        "version M3\nnode c1 Class\nnode c2 Class\nnode c3 Class\nnode c4 Class\n\
         edge c1->c2 superclass c1 c2\nedge c4->c2 superclass c4 c2\n"
    );
}

#[test]
fn modes_print_identical_reports() {
    for (corpus, constraints) in [
        ("running.corpus", "running.constraints"),
        ("oo.corpus", "oo.constraints"),
    ] {
        let (corpus, constraints) = (ex(corpus), ex(constraints));
        for json in [false, true] {
            let flag: &[&str] = if json { &["--json"] } else { &[] };
            for cmd in ["check", "merge-check"] {
                let with = |mode: &str| {
                    let mut args = flag.to_vec();
                    args.extend([cmd, &corpus, &constraints, "--mode", mode]);
                    mvgraph(&args).stdout
                };
                assert_eq!(with("mvm"), with("svm"), "{cmd} {corpus}");
            }
            for lcp in ["all", "single"] {
                let with = |mode: &str| {
                    let mut args = flag.to_vec();
                    args.extend(["conflicts", &corpus, "--mode", mode, "--lcp", lcp]);
                    mvgraph(&args).stdout
                };
                assert_eq!(with("mvm"), with("svm"), "conflicts {corpus}");
            }
        }
    }
}

#[test]
fn oracle_passes_on_generated_corpora() {
    let constraints = temp("oo.constraints");
    std::fs::write(
        &constraints,
        write_constraints(&oo_constraints(&oo_type_graph())),
    )
    .unwrap();
    for seed in 0..50 {
        let mut p = GeneratorParams::new(seed, 12, 6);
        p.merge_prob = 0.3;
        p.root_edge_ratio = 1.5;
        let corpus = temp(&format!("gen{seed}.corpus"));
        std::fs::write(&corpus, write_corpus(&generate_versioning(&p).unwrap())).unwrap();
        let o = mvgraph(&[
            "oracle",
            corpus.to_str().unwrap(),
            constraints.to_str().unwrap(),
        ]);
        assert_eq!(o.code, 0, "seed {seed}: {}", stdout(&o));
    }
}

#[test]
fn generate_writes_the_corpus() {
    let out = temp("small.corpus");
    let o = mvgraph(&[
        "generate",
        "--params",
        &ex("small.params"),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0);
    let written = std::fs::read(&out).unwrap();
    assert_eq!(
        mvgraph(&["generate", "--params", &ex("small.params")]).stdout,
        written
    );
    assert_eq!(mvgraph(&["validate", out.to_str().unwrap()]).code, 0);
}

#[test]
fn export_lists_version_structure() {
    let o = mvgraph(&["export", &ex("running.corpus")]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["format"], "mvgraph-mvm/1");
    let edges = v["edges"].as_object().unwrap();
    let of_type = |t: &str| edges.values().filter(|e| e["type"] == t).count();
    // M1 => M2, M1 => M3
    assert_eq!(of_type("suc"), 2);
    // one source and one target incidence per base edge
    assert_eq!(of_type("superclass_src") + of_type("superclass_tgt"), 6);
}

#[test]
fn bench_rejects_short_runs() {
    let o = mvgraph(&["bench", "--params", &ex("bench.params"), "--repeat", "2"]);
    assert_eq!(o.code, 2);
}

#[test]
fn clashing_derived_type_names_are_reported() {
    let corpus = temp("clash.corpus");
    std::fs::write(
        &corpus,
        r#"{
  "format": "mvgraph-corpus/1",
  "type_graph": {"node_types": ["X"], "edge_types": {"cv_X": {"source": "X", "target": "X"}}},
  "nodes": {"a": "X"},
  "edges": {"l": {"type": "cv_X", "source": "a", "target": "a"}},
  "versions": {"v0": {"nodes": ["a"], "edges": ["l"]}},
  "modifications": [],
  "root": "v0"
}"#,
    )
    .unwrap();
    let path = corpus.to_str().unwrap();
    for args in [
        vec!["validate", path],
        vec!["export", path],
        vec!["conflicts", path],
    ] {
        let o = mvgraph(&args);
        assert_eq!(o.code, 1, "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("cv_X_mv"));
    }
}
