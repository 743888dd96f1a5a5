//! Evaluation report files.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use avq_core::cv::{Agreement, EvalReport, Spread};

use crate::error::CliResult;
use crate::fsutil::write_atomic;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn agreement_json(a: &Agreement) -> Value {
    json!({ "count": a.count, "pcc": a.pcc, "scc": a.scc, "rmse": a.rmse })
}

fn spread_json(s: &Option<Spread>) -> Value {
    match s {
        Some(s) => json!({ "mean": s.mean, "std": s.std, "folds": s.folds }),
        None => Value::Null,
    }
}

/// Report as CSV with columns `section,key,count,pcc,scc,rmse`: one row per
/// fold, the per-fold mean and standard deviation, the pooled statistics,
/// and one row per distortion label.
pub fn write_report_csv(w: &mut dyn Write, r: &EvalReport) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["section", "key", "count", "pcc", "scc", "rmse"])?;
    let row = |wtr: &mut csv::Writer<_>, section: &str, key: &str, a: &Agreement| {
        wtr.write_record([section, key, &a.count.to_string(), &opt(a.pcc), &opt(a.scc), &opt(a.rmse)])
    };
    for f in &r.per_fold {
        row(&mut wtr, "fold", &f.fold.to_string(), &f.agreement)?;
    }
    let folds = r.aggregate.pcc.map_or(0, |s| s.folds).to_string();
    let (p, s, e) = (r.aggregate.pcc, r.aggregate.scc, r.aggregate.rmse);
    wtr.write_record(["aggregate_mean", "folds", &folds, &opt(p.map(|x| x.mean)), &opt(s.map(|x| x.mean)), &opt(e.map(|x| x.mean))])?;
    wtr.write_record(["aggregate_std", "folds", &folds, &opt(p.map(|x| x.std)), &opt(s.map(|x| x.std)), &opt(e.map(|x| x.std))])?;
    row(&mut wtr, "pooled", "all", &r.pooled)?;
    for b in &r.breakdown {
        row(&mut wtr, &format!("breakdown_{}", b.modality), &b.label, &b.agreement)?;
    }
    wtr.flush()
}

pub fn write_predictions_csv(w: &mut dyn Write, r: &EvalReport) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["id", "fold", "predicted", "mos"])?;
    for p in &r.predictions {
        wtr.write_record([p.id.clone(), p.fold.to_string(), p.predicted.to_string(), p.mos.to_string()])?;
    }
    wtr.flush()
}

pub fn report_json(r: &EvalReport, provenance: Value) -> Value {
    json!({
        "k": r.k,
        "seed": r.seed,
        "grouping": r.grouping.to_string(),
        "leakage_free": r.leakage_free,
        "per_fold": r.per_fold.iter().map(|f| {
            let mut v = agreement_json(&f.agreement);
            v["fold"] = json!(f.fold);
            v
        }).collect::<Vec<_>>(),
        "aggregate": {
            "pcc": spread_json(&r.aggregate.pcc),
            "scc": spread_json(&r.aggregate.scc),
            "rmse": spread_json(&r.aggregate.rmse),
        },
        "pooled": agreement_json(&r.pooled),
        "breakdown": r.breakdown.iter().map(|b| {
            let mut v = agreement_json(&b.agreement);
            v["modality"] = json!(b.modality);
            v["label"] = json!(b.label);
            v
        }).collect::<Vec<_>>(),
        "settings": provenance,
    })
}

/// Writes `report.csv`, `report.json` and `predictions.csv` into `dir`.
pub fn write_report_files(dir: &Path, r: &EvalReport, provenance: Value) -> CliResult<()> {
    write_atomic(&dir.join("report.csv"), |w| write_report_csv(w, r))?;
    write_atomic(&dir.join("predictions.csv"), |w| write_predictions_csv(w, r))?;
    let text = serde_json::to_string_pretty(&report_json(r, provenance)).expect("report is serializable");
    write_atomic(&dir.join("report.json"), |w| writeln!(w, "{text}"))
}

/// One-line human summary of the aggregate statistics.
pub fn aggregate_line(r: &EvalReport) -> String {
    let fmt = |s: Option<Spread>| s.map_or("n/a".to_string(), |s| format!("{:.4} ± {:.4}", s.mean, s.std));
    format!(
        "k={} PCC {} | SCC {} | RMSE {} | pooled PCC {} SCC {} RMSE {}",
        r.k,
        fmt(r.aggregate.pcc),
        fmt(r.aggregate.scc),
        fmt(r.aggregate.rmse),
        r.pooled.pcc.map_or("n/a".into(), |v| format!("{v:.4}")),
        r.pooled.scc.map_or("n/a".into(), |v| format!("{v:.4}")),
        r.pooled.rmse.map_or("n/a".into(), |v| format!("{v:.4}")),
    )
}
