use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mvgraph_ffi::*;

fn example(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/examples")
        .join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { mvg_string_free(s) };
    out
}

fn last_error() -> String {
    let p = mvg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Loaded {
    corpus: *mut MvgCorpus,
    constraints: *mut MvgConstraints,
}

impl Loaded {
    fn new(corpus: &str, constraints: &str) -> Self {
        let (c, k) = (example(corpus), example(constraints));
        let mut corpus = ptr::null_mut();
        let mut constraints = ptr::null_mut();
        unsafe {
            assert_eq!(
                mvg_corpus_parse(c.as_ptr(), c.len(), &mut corpus),
                MvgStatus::Ok
            );
            assert_eq!(
                mvg_constraints_parse(corpus, k.as_ptr(), k.len(), &mut constraints),
                MvgStatus::Ok
            );
        }
        Self {
            corpus,
            constraints,
        }
    }
}

impl Drop for Loaded {
    fn drop(&mut self) {
        unsafe {
            mvg_constraints_free(self.constraints);
            mvg_corpus_free(self.corpus);
        }
    }
}

#[test]
fn running_example_conflict_through_c_abi() {
    let l = Loaded::new("running.corpus", "running.constraints");
    assert_eq!(unsafe { mvg_corpus_version_count(l.corpus) }, 3);
    let mut out = ptr::null_mut();
    let status = unsafe { mvg_conflicts(l.corpus, MvgMode::Mvm, MvgLcp::All, &mut out) };
    assert_eq!(status, MvgStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(
        v,
        serde_json::json!([{"i": "M2", "j": "M3", "c": "M1", "edge": "c4->c2", "node": "c4"}])
    );
}

#[test]
fn both_modes_agree_on_oo_example() {
    let l = Loaded::new("oo.corpus", "oo.constraints");
    for lcp in [MvgLcp::All, MvgLcp::Single] {
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        unsafe {
            assert_eq!(
                mvg_merge_check(l.corpus, l.constraints, MvgMode::Mvm, lcp, &mut a),
                MvgStatus::Ok
            );
            assert_eq!(
                mvg_merge_check(l.corpus, l.constraints, MvgMode::Svm, lcp, &mut b),
                MvgStatus::Ok
            );
        }
        assert_eq!(take(a), take(b));
    }
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(
            mvg_check(l.corpus, l.constraints, MvgMode::Mvm, &mut a),
            MvgStatus::Ok
        );
        assert_eq!(
            mvg_check(l.corpus, l.constraints, MvgMode::Svm, &mut b),
            MvgStatus::Ok
        );
    }
    let (a, b) = (take(a), take(b));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
}

#[test]
fn output_matches_cli_json() {
    let l = Loaded::new("oo.corpus", "oo.constraints");
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            mvg_check(l.corpus, l.constraints, MvgMode::Mvm, &mut out),
            MvgStatus::Ok
        );
    }
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples");
    let cli = mvgraph::cli::run([
        "mvgraph".into(),
        "--json".into(),
        "check".into(),
        dir.join("oo.corpus").into_os_string(),
        dir.join("oo.constraints").into_os_string(),
    ]);
    assert_eq!(cli.code, 0);
    assert_eq!(take(out).into_bytes(), cli.stdout);
}

#[test]
fn project_and_round_trip() {
    let l = Loaded::new("running.corpus", "running.constraints");
    let id = CString::new("M2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mvg_project(l.corpus, id.as_ptr(), &mut out) },
        MvgStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["edges"][0]["id"], "c1->c3");
    assert_eq!(v["nodes"].as_array().unwrap().len(), 3);

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mvg_corpus_write(l.corpus, &mut out) },
        MvgStatus::Ok
    );
    assert_eq!(take(out).into_bytes(), example("running.corpus"));
}

#[test]
fn errors_set_status_and_message() {
    let mut corpus = ptr::null_mut();
    let junk = b"{ not json";
    let status = unsafe { mvg_corpus_parse(junk.as_ptr(), junk.len(), &mut corpus) };
    assert_eq!(status, MvgStatus::Syntax);
    assert!(corpus.is_null());
    assert!(last_error().contains("syntax error"));

    let status = unsafe { mvg_corpus_parse(ptr::null(), 0, &mut corpus) };
    assert_eq!(status, MvgStatus::NullArgument);

    let bad = String::from_utf8(example("running.corpus"))
        .unwrap()
        .replacen("\"c1->c3\"\n      ]", "\"c9->c3\"\n      ]", 1);
    let status = unsafe { mvg_corpus_parse(bad.as_ptr(), bad.len(), &mut corpus) };
    assert_eq!(status, MvgStatus::Validation, "{}", last_error());

    let l = Loaded::new("running.corpus", "running.constraints");
    let id = CString::new("M9").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mvg_project(l.corpus, id.as_ptr(), &mut out) },
        MvgStatus::UnknownVersion
    );
    assert!(out.is_null());

    // a successful call clears the message
    assert_eq!(
        unsafe { mvg_conflicts(l.corpus, MvgMode::Svm, MvgLcp::All, &mut out) },
        MvgStatus::Ok
    );
    take(out);
    assert!(mvg_last_error().is_null());
}

#[test]
fn version_string_is_package_version() {
    let v = unsafe { CStr::from_ptr(mvg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let src = std::env::temp_dir().join(format!("mvgraph_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"mvgraph.h\"\n\
         int main(void) {\n\
           MvgCorpus *c = NULL; char *out = NULL;\n\
           MvgStatus s = mvg_corpus_parse((const uint8_t *)\"{}\", 2, &c);\n\
           if (s == MVG_STATUS_OK) { mvg_conflicts(c, MVG_MODE_MVM, MVG_LCP_ALL, &out); }\n\
           mvg_string_free(out); mvg_corpus_free(c);\n\
           return mvg_last_error() == NULL ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(dir.join("include"))
            .arg(&src)
            .status()
            .unwrap_or_else(|e| panic!("{compiler}: {e}"));
        assert!(status.success(), "{compiler} rejected mvgraph.h");
    }
    let _ = std::fs::remove_file(src);
}
