use std::path::{Path, PathBuf};

use super::*;
use crate::analyzer::Code;
use crate::learn::Outputs;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

struct Env {
    _dir: tempfile::TempDir,
    session: Session,
}

fn env(files: &[&str]) -> Env {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir_all(&data).unwrap();
    for f in files {
        std::fs::copy(fixtures().join(f), data.join(Path::new(f).file_name().unwrap())).unwrap();
    }
    let mut session = Session::new(&data, dir.path().join("out"), dir.path().join("store"));
    session.clock = Clock::Fixed(1_700_000_000);
    Env { _dir: dir, session }
}

const FIG1: &str = "GENERATE DISPLAY OF PREDICTION MEDV OVER homesNew LABEL HomeNo \
                    FEATURES CRIM, ZN, NOX, DIS, TAX, PTRATIO FROM bostonHomes";

fn error_codes(r: &Report) -> Vec<Code> {
    r.diagnostics.iter().filter(|d| d.is_error()).map(|d| d.code).collect()
}

#[test]
fn empty_program_is_clean() {
    let mut e = env(&[]);
    let r = e.session.run_text("  -- nothing here\n");
    assert!(r.outputs.is_empty() && r.diagnostics.is_empty() && !r.aborted);
}

#[test]
fn fig1_produces_four_predictions_and_plot() {
    let mut e = env(&["bostonHomes.csv", "homesNew.csv"]);
    let r = e.session.run_text(FIG1);
    assert!(!r.has_errors(), "{:?}", r.diagnostics);
    let rs = r.results().next().unwrap();
    assert_eq!(rs.row_labels(), ["1", "2", "3", "4"]);
    let Outputs::Real(p) = &rs.outputs else { panic!() };
    assert_eq!(p.len(), 4);
    assert!(p.iter().all(|v| v.is_finite()));
    let names: Vec<String> = r
        .artifacts
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, ["stmt01_result.csv", "stmt01_bar.svg"]);
    let csv = std::fs::read_to_string(&r.artifacts[0]).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("HomeNo,prediction"));
}

#[test]
fn missing_policy_changes_only_rows_with_gaps() {
    let run = |policy| {
        let mut e = env(&["bostonHomes.csv", "homesNew.csv"]);
        e.session.missing = policy;
        let r = e.session.run_text(FIG1);
        let Outputs::Real(p) = r.results().next().unwrap().outputs.clone() else { panic!() };
        p
    };
    let zero = run(MissingPolicy::Zero);
    let impute = run(MissingPolicy::Impute);
    assert_eq!(zero[0], impute[0]);
    assert!(zero[1..].iter().zip(&impute[1..]).all(|(a, b)| a != b));
}

#[test]
fn datatype_fail_aborts_program() {
    let mut e = env(&["dye/RawDyes.csv", "bostonHomes.csv", "homesNew.csv"]);
    let text = format!("GENERATE PREDICTION epsilon USING ALGORITHM LinearRegression FEATURES * FROM RawDyes;\n{FIG1};");
    let r = e.session.run_text(&text);
    assert_eq!(error_codes(&r), [Code::DatatypeFail]);
    assert!(r.aborted);
    assert!(r.outputs.is_empty());
    assert_eq!(r.diagnostics[0].statement, 1);
}

#[test]
fn transient_models_are_not_stored() {
    let mut e = env(&["bostonHomes.csv", "homesNew.csv"]);
    let r = e.session.run_text(FIG1);
    assert!(!r.has_errors());
    assert!(e.session.store.list().unwrap().is_empty());
}

#[test]
fn construct_then_use_leaves_manifest_untouched() {
    let mut e = env(&["bostonHomes.csv", "homesNew.csv"]);
    let r = e.session.run_text(
        "CONSTRUCT homes FOR PREDICTION MEDV USING DecisionTree TRAIN ON 400 TEST ON 100 \
         FEATURES CRIM, ZN, NOX, DIS, TAX, PTRATIO FROM bostonHomes;",
    );
    assert!(!r.has_errors(), "{:?}", r.diagnostics);
    let manifest = e.session.store.model_dir("homes").join("manifest.json");
    let before = std::fs::read(&manifest).unwrap();
    let r = e
        .session
        .run_text("GENERATE PREDICTION MEDV OVER homesNew USING MODEL homes LABEL HomeNo;");
    assert!(!r.has_errors(), "{:?}", r.diagnostics);
    assert_eq!(r.results().next().unwrap().len(), 4);
    assert_eq!(std::fs::read(&manifest).unwrap(), before);
}

#[test]
fn unknown_model_is_reported_against_using_model() {
    let mut e = env(&[]);
    let r = e
        .session
        .run_text("GENERATE PREDICTION Kappa OVER LipidTestData USING MODEL LipidGnn;");
    let err = r.diagnostics.iter().find(|d| d.is_error()).unwrap();
    assert_eq!(err.code, Code::UnknownModel);
    assert!(err.to_string().contains("LipidGnn"), "{err}");
}

#[test]
fn inspect_binding_feeds_later_statements() {
    let mut e = env(&["dye/High_Extinction.csv"]);
    let r = e
        .session
        .run_text("INSPECT ShouldBe NUMERIZE AS log(ShouldBe) FROM High_Extinction.csv;");
    assert!(!r.has_errors(), "{:?}", r.diagnostics);
    let t = e.session.resolve_table("High_Extinction").unwrap();
    let v = t.column("ShouldBe").unwrap().as_numeric().unwrap()[0].unwrap();
    assert!((v - 250000f64.ln()).abs() < 1e-9);
    let log = std::fs::read_to_string(e.session.out_dir.join("High_Extinction.wrangle.log")).unwrap();
    assert!(log.contains("ShouldBe NUMERIZE"), "{log}");
}

#[test]
fn train_clamp_warns() {
    let mut e = env(&["bostonHomes.csv"]);
    let r = e.session.run_text(
        "CONSTRUCT big FOR PREDICTION MEDV USING LinearRegression TRAIN ON 500 TEST ON 100 \
         FEATURES CRIM, ZN FROM bostonHomes;",
    );
    assert!(!r.has_errors(), "{:?}", r.diagnostics);
    let m = e.session.store.manifest("big").unwrap();
    assert_eq!((m.train_rows, m.test_rows), (500, 6));
    assert!(r.diagnostics.iter().any(|d| !d.is_error()));
}

#[test]
fn clustering_without_over_scores_training_rows() {
    let mut e = env(&["bostonHomes.csv"]);
    let r = e
        .session
        .run_text("GENERATE DISPLAY OF CLUSTER OF 3 FEATURES RM, LSTAT FROM bostonHomes;");
    assert!(!r.has_errors(), "{:?}", r.diagnostics);
    let rs = r.results().next().unwrap();
    let Outputs::Cluster(a) = &rs.outputs else { panic!() };
    assert_eq!(a.len(), 506);
    assert!(a.iter().all(|&c| c < 3));
    assert!(r.artifacts.iter().any(|p| p.ends_with("stmt01_clusters.svg")));
}

#[test]
fn statement_indices_continue_across_runs() {
    let mut e = env(&["bostonHomes.csv", "homesNew.csv"]);
    e.session.run_text(FIG1);
    let r = e.session.run_text(FIG1);
    assert_eq!(r.results().next().unwrap().statement, 2);
}

#[test]
fn emit_backend_writes_script_only() {
    let mut e = env(&["bostonHomes.csv", "homesNew.csv"]);
    e.session.backend = Backend::Emit;
    let r = e.session.run_text(FIG1);
    assert!(!r.has_errors(), "{:?}", r.diagnostics);
    assert_eq!(r.artifacts.len(), 1);
    let script = std::fs::read_to_string(&r.artifacts[0]).unwrap();
    assert!(script.starts_with("# mql:statement=1"), "{script}");
    assert!(script.contains("LinearRegression"));
}
