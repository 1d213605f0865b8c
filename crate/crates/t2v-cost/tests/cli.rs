use std::path::Path;
use std::process::{Command, Output};

use t2v_cost::bundled;
use t2v_cost::config::SPEC_DIR_ENV;
use t2v_cost::core::{HardwareSpec, MeasurementRecord, ModelSpec};
use t2v_cost::ingest::MEASUREMENT_HEADER;

fn t2v(args: &[&str]) -> Output {
    t2v_env(args, None)
}

fn t2v_env(args: &[&str], spec_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_t2v-cost"));
    cmd.args(args).env_remove(SPEC_DIR_ENV);
    if let Some(dir) = spec_dir {
        cmd.env(SPEC_DIR_ENV, dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = t2v(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    assert!(
        o.stderr.is_empty(),
        "unexpected diagnostics: {}",
        stderr(&o)
    );
    stdout(&o)
}

#[test]
fn estimate_defaults() {
    let out = ok(&[
        "estimate", "--height", "720", "--width", "1280", "--frames", "81", "--steps", "50",
    ]);
    assert!(out.contains("latency: 397.81 s"), "{out}");
    assert!(out.contains("energy:  77.35 Wh"), "{out}");
    assert_eq!(out, ok(&["estimate"]));
}

#[test]
fn estimate_json_has_breakdown() {
    let out = ok(&["estimate", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in [
        "text",
        "vae_conv",
        "vae_mid_attn",
        "self_attn",
        "cross_attn",
        "mlp",
        "timestep",
        "total",
    ] {
        assert!(v["breakdown"][key].is_u64(), "{key}");
    }
    assert_eq!(
        v["breakdown"]["total"].as_u64(),
        Some(179_407_392_914_538_496)
    );
    assert!((v["latency_s"].as_f64().unwrap() - 397.8132104787276).abs() < 1e-9);
}

#[test]
fn zero_steps_is_usage_error() {
    let o = t2v(&["estimate", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("--steps"));
}

#[test]
fn mu_out_of_range_names_flag() {
    for mu in ["--mu=0", "--mu=1.5", "--mu=-0.2", "--mu=x"] {
        let o = t2v(&["estimate", mu]);
        assert!(!o.status.success());
        assert!(stderr(&o).contains("--mu"), "{}", stderr(&o));
    }
    let full = ok(&["estimate", "--mu", "0.912", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&full).unwrap();
    assert!((v["latency_s"].as_f64().unwrap() - 397.8132104787276 / 2.0).abs() < 1e-9);
}

#[test]
fn sweep_row_counts() {
    assert_eq!(
        ok(&["sweep", "--axis", "steps", "--from", "1", "--to", "200"])
            .lines()
            .count(),
        201
    );
    let frames = ok(&[
        "sweep", "--axis", "frames", "--from", "4", "--to", "100", "--step", "4",
    ]);
    assert_eq!(frames.lines().count(), 26);
    assert!(frames.lines().nth(1).unwrap().starts_with("4,"));
    assert!(frames.lines().last().unwrap().starts_with("100,"));
}

#[test]
fn sweep_unknown_axis() {
    let o = t2v(&["sweep", "--axis", "fps", "--from", "1", "--to", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--axis"));
}

#[test]
fn sweep_resolution_needs_list() {
    let o = t2v(&["sweep", "--axis", "resolution", "--from", "1", "--to", "2"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--resolutions"));
    let out = ok(&[
        "sweep",
        "--axis",
        "resolution",
        "--resolutions",
        "480x832,720x1280",
    ]);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().nth(2).unwrap().starts_with("720x1280,75600,"));
}

#[test]
fn sweep_rejects_reversed_range() {
    let o = t2v(&["sweep", "--axis", "steps", "--from", "10", "--to", "2"]);
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn svg_is_deterministic() {
    let args = [
        "sweep", "--axis", "frames", "--from", "4", "--to", "40", "--step", "4", "--format", "svg",
    ];
    let a = ok(&args);
    assert!(a.starts_with("<svg"));
    assert!(a.trim_end().ends_with("</svg>"));
    assert_eq!(a, ok(&args));
    let bars = ok(&[
        "compare",
        "--measurements",
        "table4_measurements",
        "--format",
        "svg",
    ]);
    assert!(bars.contains("AnimateDiff"));
}

#[test]
fn svg_for_estimate_is_an_error() {
    let o = t2v(&["estimate", "--format", "svg"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("svg"));
}

#[test]
fn roofline_single_hardware() {
    let out = ok(&["roofline", "--hardware", "h100"]);
    assert!(out.contains("h100: beta=295, l*=295/590"), "{out}");
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn roofline_table_flags_inconsistent_rows() {
    let out = ok(&["roofline"]);
    let l4 = out.lines().find(|l| l.starts_with("NVIDIA L4")).unwrap();
    assert!(l4.contains(" 403 ") && l4.ends_with('*'), "{l4}");
    assert!(out.contains("NVIDIA L4: published beta=605"));
    let h100 = out.lines().find(|l| l.starts_with("NVIDIA H100")).unwrap();
    assert!(!h100.ends_with('*'));
}

#[test]
fn roofline_classifies_tokens() {
    let out = ok(&["roofline", "--hardware", "a100", "--tokens", "200"]);
    assert!(
        out.contains("attention at 200 tokens") && out.contains("compute-bound"),
        "{out}"
    );
    assert!(
        out.contains("mlp       at 200 tokens") && out.contains("memory-bound"),
        "{out}"
    );
}

#[test]
fn roofline_json() {
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["roofline", "--format", "json"])).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7);
    assert_eq!(v[0]["thresholds"]["mlp"], 590);
}

#[test]
fn unknown_hardware_and_model() {
    let o = t2v(&["estimate", "--hardware", "b200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown hardware `b200`"));
    let o = t2v(&["estimate", "--model", "nope"]);
    assert!(stderr(&o).contains("unknown model spec `nope`"));
}

#[test]
fn energy_needs_power_figure() {
    let o = t2v(&["estimate", "--hardware", "a100"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("a100"), "{}", stderr(&o));
}

fn write_measurements(path: &Path, records: &[MeasurementRecord]) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(MEASUREMENT_HEADER).unwrap();
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.model_id.clone(),
            r.height_px.to_string(),
            r.width_px.to_string(),
            r.frames.to_string(),
            r.steps.to_string(),
            opt(r.latency_s),
            opt(r.latency_std_s),
            opt(r.gpu_wh),
            opt(r.gpu_wh_std),
            opt(r.cpu_wh),
            opt(r.ram_wh),
        ])
        .unwrap();
    }
    w.flush().unwrap();
}

fn synthetic(mu: f64) -> Vec<MeasurementRecord> {
    let model = ModelSpec::wan2_1_1_3b();
    let hw = HardwareSpec::h100();
    [
        (480, 832, 33, 10),
        (480, 832, 81, 25),
        (720, 1280, 49, 20),
        (720, 1280, 81, 50),
        (256, 256, 17, 100),
    ]
    .into_iter()
    .map(|(h, w, t, s)| {
        let mut r = MeasurementRecord {
            model_id: model.name.clone(),
            height_px: h,
            width_px: w,
            frames: t,
            steps: s,
            ..Default::default()
        };
        let latency = r.predicted_flops(&model).unwrap() as f64 / (mu * hw.theta_peak);
        r.latency_s = Some(latency);
        r.gpu_wh = Some(latency * 700.0 / 3600.0);
        r
    })
    .collect()
}

#[test]
fn calibrate_recovers_mu() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("synthetic.csv");
    write_measurements(&path, &synthetic(0.5));
    let out = ok(&["calibrate", "--measurements", path.to_str().unwrap()]);
    assert!(out.contains("mu:          0.5\n"), "{out}");
    assert!(out.contains("r_squared:   1\n"), "{out}");
    assert!(out.contains("mpe_latency: 0.000%"), "{out}");

    let json = ok(&[
        "calibrate",
        "--measurements",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!((v["calibration"]["mu"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(
        v["validation"]["per_point_errors"]
            .as_array()
            .unwrap()
            .len(),
        5
    );
}

#[test]
fn calibrate_requires_measurements() {
    let o = t2v(&["calibrate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--measurements"));
    let o = t2v(&["calibrate", "--measurements", "/nonexistent/m.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/m.csv"));
}

#[test]
fn compare_ratio_line() {
    let out = ok(&["compare", "--measurements", "table4_measurements"]);
    assert!(
        out.contains("WAN2.1-T2V-14B / AnimateDiff \u{2248}2986\u{d7}"),
        "{out}"
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table4.csv");
    std::fs::write(&path, bundled::TABLE4_MEASUREMENTS_CSV).unwrap();
    assert_eq!(
        ok(&["compare", "--measurements", path.to_str().unwrap()]),
        out
    );

    let csv = ok(&[
        "compare",
        "--measurements",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn compare_unmatched_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    std::fs::write(
        &path,
        format!(
            "{}\nSora,720,1280,81,50,10,,1,,,\n",
            MEASUREMENT_HEADER.join(",")
        ),
    )
    .unwrap();
    let o = t2v(&["compare", "--measurements", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Sora"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = t2v(&[
        "sweep",
        "--axis",
        "steps",
        "--from",
        "1",
        "--to",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        written,
        ok(&["sweep", "--axis", "steps", "--from", "1", "--to", "5"])
    );
}

#[test]
fn global_flags_after_subcommand() {
    assert_eq!(
        ok(&["--format", "json", "estimate", "--steps", "10"]),
        ok(&["estimate", "--steps", "10", "--format", "json"])
    );
}

const CUSTOM_GPU: &str = r#"[{"name": "mygpu", "theta_peak": 1e15, "bandwidth": 2e12, "p_max": 1000, "scalar_bytes": 2}]"#;

#[test]
fn spec_dir_from_env_and_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    std::fs::write(env_dir.path().join("hardware.json"), CUSTOM_GPU).unwrap();
    let o = t2v_env(&["roofline", "--hardware", "mygpu"], Some(env_dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("mygpu: beta=500, l*=500/1000"));
    // bundled entries stay reachable
    assert!(
        t2v_env(&["roofline", "--hardware", "h100"], Some(env_dir.path()))
            .status
            .success()
    );

    let flag_dir = tempfile::tempdir().unwrap();
    std::fs::write(
        flag_dir.path().join("hardware.json"),
        CUSTOM_GPU.replace("2e12", "1e12"),
    )
    .unwrap();
    let o = t2v_env(
        &[
            "roofline",
            "--hardware",
            "mygpu",
            "--spec-dir",
            flag_dir.path().to_str().unwrap(),
        ],
        Some(env_dir.path()),
    );
    assert!(
        stdout(&o).contains("mygpu: beta=1000, l*=1000/2000"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn hardware_and_model_files() {
    let dir = tempfile::tempdir().unwrap();
    let hw = dir.path().join("gpu.json");
    std::fs::write(&hw, CUSTOM_GPU).unwrap();
    let base = ok(&["estimate", "--format", "json"]);
    let custom = ok(&[
        "estimate",
        "--format",
        "json",
        "--hardware",
        hw.to_str().unwrap(),
    ]);
    let lat = |s: &str| {
        serde_json::from_str::<serde_json::Value>(s).unwrap()["latency_s"]
            .as_f64()
            .unwrap()
    };
    assert!((lat(&custom) / lat(&base) - 0.989).abs() < 1e-12);

    let mut spec: serde_json::Value = serde_json::from_str(bundled::WAN_SPEC_JSON).unwrap();
    spec["name"] = "half-depth".into();
    spec["dit"]["layers"] = 16.into();
    std::fs::write(dir.path().join("half-depth.json"), spec.to_string()).unwrap();
    let by_name = t2v_env(
        &["estimate", "--model", "half-depth", "--format", "json"],
        Some(dir.path()),
    );
    assert!(by_name.status.success(), "{}", stderr(&by_name));
    let path = dir.path().join("half-depth.json");
    assert_eq!(
        stdout(&by_name),
        ok(&[
            "estimate",
            "--model",
            path.to_str().unwrap(),
            "--format",
            "json"
        ])
    );
    assert!(lat(&stdout(&by_name)) < 0.51 * lat(&base));
}

#[test]
fn malformed_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"name\": 3}").unwrap();
    let o = t2v(&["estimate", "--model", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.json"));
}
