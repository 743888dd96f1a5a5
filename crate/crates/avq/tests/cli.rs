use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

fn avq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avq"))
        .args(args)
        .output()
        .expect("spawn avq")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A small corpus and a model trained on it, shared by every test.
struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn corpus(&self) -> std::path::PathBuf {
        self.dir.path().join("corpus")
    }

    fn manifest(&self) -> std::path::PathBuf {
        self.corpus().join("manifest.csv")
    }

    fn model(&self) -> std::path::PathBuf {
        self.dir.path().join("model.json")
    }
}

fn fixture() -> &'static Fixture {
    static FIXTURE: OnceLock<Fixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let f = Fixture { dir };
        let out = avq(&["synth", "--count", "6", "--seed", "2", "--out", s(&f.corpus())]);
        assert!(out.status.success(), "{}", stderr(&out));
        let out = avq(&[
            "train",
            "--manifest",
            s(&f.manifest()),
            "--model",
            s(&f.model()),
            "--pretrain-epochs",
            "2",
            "--finetune-epochs",
            "2",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        f
    })
}

#[test]
fn synth_writes_a_loadable_manifest() {
    let f = fixture();
    let text = fs::read_to_string(f.manifest()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "id,video_path,audio_path,mos,video_distortion,audio_distortion,severity"
    );
    assert_eq!(lines.count(), 6);
    assert!(f.corpus().join("clips/src000_00.y4m").is_file());
    assert!(f.corpus().join("clips/src000_00.wav").is_file());
}

#[test]
fn predict_prints_one_bounded_number() {
    let f = fixture();
    let clips = f.corpus().join("clips");
    let out = avq(&[
        "predict",
        "--model",
        s(&f.model()),
        "--video",
        s(&clips.join("src000_01.y4m")),
        "--audio",
        s(&clips.join("src000_01.wav")),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    let score: f64 = text.trim().parse().unwrap();
    assert!((1.25..=5.0).contains(&score), "{score}");
}

#[test]
fn predict_from_extracted_features_matches_media() {
    let f = fixture();
    let clips = f.corpus().join("clips");
    let feats = f.dir.path().join("features");
    let (v, a) = (clips.join("src000_02.y4m"), clips.join("src000_02.wav"));
    let out = avq(&["extract", "--video", s(&v), "--audio", s(&a), "--id", "x", "--out", s(&feats)]);
    assert!(out.status.success(), "{}", stderr(&out));
    for suffix in ["visual", "audio", "features"] {
        assert!(feats.join(format!("x.{suffix}.csv")).is_file());
    }
    let direct = avq(&["predict", "--model", s(&f.model()), "--video", s(&v), "--audio", s(&a)]);
    let via_csv = avq(&[
        "predict",
        "--model",
        s(&f.model()),
        "--features",
        s(&feats.join("x.features.csv")),
    ]);
    assert!(direct.status.success() && via_csv.status.success());
    assert_eq!(stdout(&direct), stdout(&via_csv));

    let json = avq(&["predict", "--model", s(&f.model()), "--video", s(&v), "--audio", s(&a), "--json", "--id", "x"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc["id"], "x");
    assert_eq!(doc["score"].as_f64().unwrap(), stdout(&direct).trim().parse::<f64>().unwrap());
    let summary = &doc["per_column_summary"];
    assert!(summary["min"].as_f64().unwrap() <= summary["mean"].as_f64().unwrap());
    assert!(summary["mean"].as_f64().unwrap() <= summary["max"].as_f64().unwrap());
}

#[test]
fn extracted_tables_have_the_documented_shapes() {
    let f = fixture();
    let out_dir = f.dir.path().join("extract_all");
    let out = avq(&["extract", "--manifest", s(&f.manifest()), "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = |name: &str| -> (usize, usize) {
        let text = fs::read_to_string(out_dir.join(name)).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').count() - 1;
        (lines.count(), header)
    };
    let (vr, vc) = rows("src000_00.visual.csv");
    let (ar, ac) = rows("src000_00.audio.csv");
    let (fr, fc) = rows("src000_00.features.csv");
    assert_eq!((vr, ar, fr), (90, 25, 115));
    assert_eq!(vc, 40);
    assert_eq!(ac, fc);
    let (gr, gc) = rows("features.csv");
    assert_eq!((gr, gc), (115, 6 * fc));
    assert_eq!(rows("targets.csv"), (4, 6 * fc));
}

#[test]
fn evaluate_writes_reports() {
    let f = fixture();
    let out_dir = f.dir.path().join("eval");
    let out = avq(&[
        "evaluate",
        "--manifest",
        s(&f.manifest()),
        "--k",
        "3",
        "--seed",
        "7",
        "--pretrain-epochs",
        "1",
        "--finetune-epochs",
        "1",
        "--out",
        s(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("k=3 PCC"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["k"], 3);
    assert_eq!(report["leakage_free"], true);
    assert_eq!(report["per_fold"].as_array().unwrap().len(), 3);
    assert_eq!(report["settings"]["training"]["finetune"]["epochs"], 1);
    let predictions = fs::read_to_string(out_dir.join("predictions.csv")).unwrap();
    assert_eq!(predictions.lines().count(), 7);
    let csv = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("section,key,count,pcc,scc,rmse"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(avq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(avq(&["predict"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one_with_a_module_tag() {
    let f = fixture();
    let missing = avq(&["train", "--manifest", "/nonexistent/m.csv", "--model", "/tmp/never.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).starts_with("error [media-io]"), "{}", stderr(&missing));

    let bad = f.dir.path().join("bad.csv");
    fs::write(
        &bad,
        "id,video_path,audio_path,mos,video_distortion,audio_distortion,severity\n\
         a,clips/src000_00.y4m,clips/src000_00.wav,5.3,noise,echo,0.1\n",
    )
    .unwrap();
    let out = avq(&["train", "--manifest", s(&bad), "--model", "/tmp/never.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("5.3"), "{}", stderr(&out));

    let garbage = f.dir.path().join("garbage.json");
    fs::write(&garbage, "{\"version\": 2}").unwrap();
    let clips = f.corpus().join("clips");
    let out = avq(&[
        "predict",
        "--model",
        s(&garbage),
        "--video",
        s(&clips.join("src000_00.y4m")),
        "--audio",
        s(&clips.join("src000_00.wav")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error [neural]"), "{}", stderr(&out));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let f = fixture();
    let cfg = f.dir.path().join("settings.conf");
    fs::write(&cfg, "# reduced schedule\nk = 2\npretrain_epochs = 1\nfinetune_epochs = 1\nseed = 5\n").unwrap();
    let out_dir = f.dir.path().join("eval_cfg");
    let out = avq(&[
        "evaluate",
        "--config",
        s(&cfg),
        "--manifest",
        s(&f.manifest()),
        "--k",
        "3",
        "--out",
        s(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["k"], 3);
    assert_eq!(report["seed"], 5);

    fs::write(&cfg, "epochs = 3\n").unwrap();
    let out = avq(&["evaluate", "--config", s(&cfg), "--manifest", s(&f.manifest()), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error [cli]"), "{}", stderr(&out));
}
