use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx::assert_abs_diff_eq;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn ecoindex(args: &[&str], config: &Path, out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ecoindex"));
    c.env_remove("ECOINDEX_OUT").args(args).arg("--config").arg(config);
    if let Some(o) = out {
        c.arg("--out").arg(o);
    }
    c.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Writes `files` into a fresh dir; returns it with the path of `run.toml`.
fn workspace(config: &str, files: &[(&str, &str)]) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in files {
        fs::write(dir.path().join(name), body).unwrap();
    }
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, config).unwrap();
    (dir, cfg)
}

#[test]
fn weights_on_printed_matrices() {
    let out = tempfile::tempdir().unwrap();
    let o = ecoindex(&["weights"], &fixtures().join("weights.toml"), Some(out.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for b in ["b1", "b2", "b3", "b4", "b5"] {
        let v = json(&out.path().join(format!("weights/{b}.json")));
        assert_eq!(v["report"]["consistent"], true, "{b}");
        let w: f64 = v["report"]["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-12);
    }
    let summary = fs::read_to_string(out.path().join("weights/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
}

#[test]
fn inconsistent_matrix_exits_2_and_names_it() {
    let out = tempfile::tempdir().unwrap();
    let o = ecoindex(&["weights"], &fixtures().join("weights_inconsistent.toml"), Some(out.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("inconsistent"), "{}", stderr(&o));
    // the report is still written
    let v = json(&out.path().join("weights/inconsistent.json"));
    assert!(v["report"]["cr"].as_f64().unwrap() > 0.1);
}

#[test]
fn empty_matrix_list_is_a_config_error() {
    let (dir, cfg) = workspace("[weights]\nmatrices = []\n", &[]);
    let o = ecoindex(&["weights"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no matrices configured"));
}

#[test]
fn malformed_matrix_reports_file_and_line() {
    let (dir, cfg) = workspace(
        "[weights]\nmatrices = [\"bad.txt\"]\n",
        &[("bad.txt", "3 raw_saaty\n1 2 3\n1/2 1 x\n1/3 1 1\n")],
    );
    let o = ecoindex(&["weights"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("bad.txt") && e.contains("line 3"), "{e}");
}

#[test]
fn ei_scores_and_bands() {
    let out = tempfile::tempdir().unwrap();
    let o = ecoindex(&["index"], &fixtures().join("ei.toml"), Some(out.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&out.path().join("index/scores.json"));
    let results = v["results"].as_array().unwrap();
    assert_abs_diff_eq!(results[0]["score"].as_f64().unwrap(), 15.5255, epsilon = 1e-4);
    assert_eq!(results[0]["band"], "not_outstanding");
    assert_abs_diff_eq!(results[1]["score"].as_f64().unwrap(), 70.3355, epsilon = 1e-4);
    assert_eq!(results[1]["band"], "outstanding");
    assert_eq!(results[1]["threshold"], 48.0);
    assert!(v["provenance"]["formula"].as_str().unwrap().starts_with("EI ="));
    let plot = fs::read_to_string(out.path().join("index/plot_ei.csv")).unwrap();
    assert!(plot.starts_with("period,EI\n1962,15.52"));
}

#[test]
fn eh_on_an_all_zero_day() {
    let zeros = r#"{"u":0,"p":0,"delta_p3":0,"t":0,"delta_t":0,"dv":0,"delta_t24":0,"tr":0,
        "u_cubed":0,"pm25":0,"nox":0,"na":0,"nm":0,"np":0}"#;
    let (dir, cfg) = workspace("[index]\nwhich = \"eh\"\ninputs = \"zero.json\"\n", &[("zero.json", zeros)]);
    let out = dir.path().join("out");
    let o = ecoindex(&["index"], &cfg, Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("index/scores.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("EH,input,0,below_warning,20,"), "{csv}");
}

#[test]
fn h_on_unit_sub_indicators() {
    let (dir, cfg) = workspace(
        "[index]\nwhich = \"h\"\ninputs = \"ones.json\"\n",
        &[("ones.json", r#"{"DV":1,"U":1,"dT":1,"TR":1,"P":1}"#)],
    );
    let out = dir.path().join("out");
    let o = ecoindex(&["index"], &cfg, Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&out.join("index/scores.json"));
    assert_abs_diff_eq!(v["results"][0]["score"].as_f64().unwrap(), 1.001, epsilon = 1e-12);
    assert_eq!(v["results"][0]["weights_used"]["DV"], 0.159);
}

#[test]
fn which_flag_overrides_config() {
    let (dir, cfg) = workspace(
        "[index]\nwhich = \"eh\"\ninputs = \"ones.json\"\n",
        &[("ones.json", r#"{"DV":1,"U":1,"dT":1,"TR":1,"P":1}"#)],
    );
    let out = dir.path().join("out");
    let o = ecoindex(&["index", "--which", "h"], &cfg, Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("index/plot_h.csv").is_file());
}

#[test]
fn missing_symbol_is_named() {
    let (dir, cfg) = workspace(
        "[index]\nwhich = \"ei\"\ninputs = \"partial.json\"\n",
        &[("partial.json", r#"{"FC":0.8,"FR":0.8,"S":0.7,"D":0.1,"DF":8}"#)],
    );
    let o = ecoindex(&["index"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("RF missing for EI"), "{}", stderr(&o));
}

#[test]
fn constants_fill_missing_symbols() {
    let (dir, cfg) = workspace(
        "[index]\nwhich = \"ei\"\ninputs = \"partial.json\"\n[index.constants]\nRF = 1.0\n",
        &[("partial.json", r#"{"FC":0,"FR":0,"S":0,"D":0,"DF":0}"#)],
    );
    let out = dir.path().join("out");
    let o = ecoindex(&["index"], &cfg, Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&out.join("index/scores.json"));
    assert_eq!(v["results"][0]["score"], 3.02);
}

#[test]
fn hazard_index_from_station_data() {
    let csv = "DATE,TEMP,SLP,VISIB,WDSP\n\
               2021-03-01,40.0,1010.0,10.0,8.0\n\
               2021-03-02,35.0,1012.0,5.0,12.0\n\
               2021-03-03,38.0,1011.0,2.0,20.0\n\
               2021-04-01,50.0,1008.0,12.0,6.0\n\
               2021-04-02,47.0,1009.0,9.0,9.0\n";
    let cfg = "[pipeline]\ndata = [\"st.csv\"]\nperiod = \"monthly\"\n\
               [index]\nwhich = \"h_expanded\"\n";
    let (dir, cfg) = workspace(cfg, &[("st.csv", csv)]);
    let out = dir.path().join("out");
    let o = ecoindex(&["index"], &cfg, Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&out.join("index/scores.json"));
    let r = v["results"].as_array().unwrap();
    // first day of each month has no 24 h difference and is skipped
    assert_eq!(r.len(), 2);
    assert_eq!(r[0]["period"], "2021-03");
    assert_eq!(r[1]["period"], "2021-04");
    assert_eq!(v["provenance"]["source"], "pipeline");

    // the April mean is a single day, so it can be recomputed by hand
    let u: f64 = 9.0;
    let tr = u - 5.0;
    let dv = (-(0.02f64).ln() / 9.0).ln();
    let dt24 = 47.0 - 50.0;
    // cooling uses the run-wide minimum Δt24 (−5 on 2021-03-02)
    let cooling = dt24 + 5.0;
    let h = 0.246 * u + 0.2 * u.powi(3) + 0.04 * 1.0 + 0.051 * 47.0 + 0.148 * cooling + 0.208 * dv
        + 0.019 * dt24 + 0.072 * tr + 0.017 * u.powi(3);
    assert_abs_diff_eq!(r[1]["score"].as_f64().unwrap(), h, epsilon = 1e-9);
}

#[test]
fn ei_cannot_come_from_station_data() {
    let (dir, cfg) = workspace(
        "[pipeline]\ndata = [\"st.csv\"]\n[index]\nwhich = \"ei\"\n",
        &[("st.csv", "DATE,WDSP\n2021-01-01,3\n")],
    );
    let o = ecoindex(&["index"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn carbon_only_report_writes_only_the_ledger() {
    let out = tempfile::tempdir().unwrap();
    let o = ecoindex(&["report"], &fixtures().join("carbon_only.toml"), Some(out.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dirs: Vec<String> = fs::read_dir(out.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let mut dirs = dirs;
    dirs.sort();
    assert_eq!(dirs, ["carbon", "manifest.json"]);
    let ledger = fs::read_to_string(out.path().join("carbon/ledger.csv")).unwrap();
    assert!(ledger.starts_with("type,area_hm2,count,carbon_stock_t,share_pct,co2_t\n"));
    assert!(ledger.lines().last().unwrap().starts_with("total,"));
}

#[test]
fn missing_input_fails_before_any_output() {
    let out = tempfile::tempdir().unwrap();
    let target = out.path().join("never");
    let o = ecoindex(&["report"], &fixtures().join("missing_file.toml"), Some(&target));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no_such_inventory.csv"));
    assert!(!target.exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let (dir, cfg) = workspace("[carbon]\ninventory = \"x.csv\"\nprise = 3\n", &[("x.csv", "type\n")]);
    let o = ecoindex(&["carbon"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("prise"));
}

#[test]
fn subcommand_needs_its_section() {
    let o = ecoindex(&["plan"], &fixtures().join("carbon_only.toml"), Some(&tempfile::tempdir().unwrap().path().join("o")));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[plan]"));
}

#[test]
fn out_dir_precedence() {
    let (dir, cfg) = workspace(
        "[output]\ndir = \"from_config\"\n[plan]\nscenarios = \"plan.json\"\n",
        &[("plan.json", &fs::read_to_string(fixtures().join("plan.json")).unwrap())],
    );
    let run = |env: Option<&Path>, out: Option<&Path>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ecoindex"));
        c.env_remove("ECOINDEX_OUT").args(["plan", "--config"]).arg(&cfg);
        if let Some(e) = env {
            c.env("ECOINDEX_OUT", e);
        }
        if let Some(o) = out {
            c.arg("--out").arg(o);
        }
        assert_eq!(c.output().unwrap().status.code(), Some(0));
    };
    run(None, None);
    assert!(dir.path().join("from_config/plan/scenarios.csv").is_file());
    let env_dir = dir.path().join("from_env");
    run(Some(&env_dir), None);
    assert!(env_dir.join("plan/scenarios.csv").is_file());
    let flag_dir = dir.path().join("from_flag");
    let ignored = dir.path().join("ignored_env");
    run(Some(&ignored), Some(&flag_dir));
    assert!(flag_dir.join("plan/scenarios.csv").is_file());
    assert!(!ignored.exists());
}

#[test]
fn format_selects_tables_but_keeps_plots() {
    let out = tempfile::tempdir().unwrap();
    let mut c = Command::new(env!("CARGO_BIN_EXE_ecoindex"));
    let o = c
        .env_remove("ECOINDEX_OUT")
        .args(["index", "--format", "json", "--config"])
        .arg(fixtures().join("ei.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.path().join("index/scores.json").is_file());
    assert!(!out.path().join("index/scores.csv").exists());
    assert!(out.path().join("index/plot_ei.csv").is_file());
}

#[test]
fn partial_failure_exits_3_and_keeps_good_sections() {
    let inventory = fs::read_to_string(fixtures().join("inventory.csv")).unwrap();
    let (dir, cfg) = workspace(
        "[carbon]\ninventory = \"inv.csv\"\n[plan]\nscenarios = \"plan.json\"\n",
        &[("inv.csv", &inventory), ("plan.json", "[{\"name\": \"broken\"")],
    );
    let out = dir.path().join("out");
    let o = ecoindex(&["report"], &cfg, Some(&out));
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("plan") && e.contains("failed"), "{e}");
    assert!(out.join("carbon/ledger.csv").is_file());
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["sections"][0]["status"], "ok");
    assert_eq!(m["sections"][1]["status"], "failed");
}

#[test]
fn inconsistent_weights_make_a_report_partial() {
    let matrix = fs::read_to_string(fixtures().join("matrices/inconsistent.txt")).unwrap();
    let (dir, cfg) = workspace("[weights]\nmatrices = [\"m.txt\"]\n", &[("m.txt", &matrix)]);
    let o = ecoindex(&["report"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(3));
    let m = json(&dir.path().join("out/manifest.json"));
    assert_eq!(m["sections"][0]["status"], "inconsistent");
}

#[test]
fn manifest_records_inputs_and_artifacts() {
    let out = tempfile::tempdir().unwrap();
    let o = ecoindex(&["report"], &fixtures().join("report.toml"), Some(out.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&out.path().join("manifest.json"));
    assert_eq!(m["tool"], "ecoindex");
    assert_eq!(m["inputs_hash"].as_str().unwrap().len(), 64);
    let inputs: Vec<&str> = m["inputs"].as_array().unwrap().iter().map(|i| i["path"].as_str().unwrap()).collect();
    assert!(inputs.contains(&"inventory.csv") && inputs.contains(&"matrices/b3.txt"));
    assert_eq!(m["sections"].as_array().unwrap().len(), 7);
    for s in m["sections"].as_array().unwrap() {
        assert_eq!(s["status"], "ok");
        for a in s["artifacts"].as_array().unwrap() {
            assert!(out.path().join(a.as_str().unwrap()).is_file());
        }
    }
    assert_eq!(m["parameters"]["carbon"]["params"]["carbon_price"], 10.0);
    let plan = fs::read_to_string(out.path().join("plan/scenarios.csv")).unwrap();
    assert!(plan.contains("source prints 48.761"));
    let forecast = fs::read_to_string(out.path().join("forecast/forecast.csv")).unwrap();
    assert_eq!(forecast.lines().count(), 1 + 10 + 10);
}

#[test]
fn sensitivity_rejects_unknown_variables() {
    let (dir, cfg) = workspace(
        "[sensitivity]\nvariables = [\"u\", \"wind\"]\n[sensitivity.base]\nu = 1\n",
        &[],
    );
    let o = ecoindex(&["sensitivity"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("wind"));
}

#[test]
fn sensitivity_report_at_unit_wind() {
    let out = tempfile::tempdir().unwrap();
    let o = ecoindex(&["sensitivity"], &fixtures().join("report.toml"), Some(out.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&out.path().join("sensitivity/report.json"));
    let u = &v["reports"][0];
    assert_eq!(u["variable"], "u");
    assert_abs_diff_eq!(u["analytic_slope"].as_f64().unwrap(), 0.246 + 0.051, epsilon = 1e-12);
    assert_abs_diff_eq!(u["delta_h"].as_f64().unwrap(), 0.030227, epsilon = 1e-6);
}

#[test]
fn usage_errors_exit_1() {
    let o = Command::new(env!("CARGO_BIN_EXE_ecoindex")).arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_ecoindex")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}
