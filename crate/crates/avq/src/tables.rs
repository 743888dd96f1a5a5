//! Labelled matrix CSV files: a header row of column names and one row per
//! matrix row, prefixed by its label. Values use the shortest decimal form
//! that parses back to the identical `f64`.

use std::io::{Read, Write};
use std::path::Path;

use avq_core::audio::AudioFeatures;
use avq_core::fusion::{AudiovisualFeatures, GlobalTrainingSet};
use avq_core::visual::VisualFeatures;
use avq_core::Matrix;

use crate::error::{CliError, CliResult};
use crate::fsutil::write_atomic;

pub fn write_matrix(
    w: &mut dyn Write,
    corner: &str,
    column_prefix: &str,
    row_labels: &[String],
    m: &Matrix,
) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let header = std::iter::once(corner.to_string()).chain((0..m.cols()).map(|c| format!("{column_prefix}{c}")));
    wtr.write_record(header)?;
    for (r, label) in row_labels.iter().enumerate() {
        let row = std::iter::once(label.clone()).chain(m.row(r).iter().map(f64::to_string));
        wtr.write_record(row)?;
    }
    wtr.flush()
}

/// Reads a labelled matrix, returning the row labels and the values.
pub fn read_matrix(reader: impl Read, path: &Path) -> CliResult<(Vec<String>, Matrix)> {
    let err = |message: String| CliError::Table {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_reader(reader);
    let cols = rdr.headers().map_err(|e| err(e.to_string()))?.len().saturating_sub(1);
    let mut labels = Vec::new();
    let mut data = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        labels.push(rec[0].to_string());
        for field in rec.iter().skip(1) {
            data.push(field.parse::<f64>().map_err(|e| err(format!("`{field}`: {e}")))?);
        }
    }
    let m = Matrix::from_vec(labels.len(), cols, data).map_err(|e| err(e.to_string()))?;
    Ok((labels, m))
}

pub fn read_matrix_file(path: &Path) -> CliResult<(Vec<String>, Matrix)> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_matrix(file, path)
}

pub fn audio_row_labels(a: &AudioFeatures) -> Vec<String> {
    a.band_centers.iter().map(f64::to_string).collect()
}

pub fn fused_row_labels(a: &AudioFeatures) -> Vec<String> {
    let mut labels = VisualFeatures::row_names();
    labels.extend(a.band_centers.iter().map(|hz| format!("band_{hz}")));
    labels
}

pub fn write_visual(path: &Path, v: &VisualFeatures) -> CliResult<()> {
    write_atomic(path, |w| write_matrix(w, "feature", "frame", &VisualFeatures::row_names(), &v.data))
}

pub fn write_audio(path: &Path, a: &AudioFeatures) -> CliResult<()> {
    write_atomic(path, |w| write_matrix(w, "band_hz", "t", &audio_row_labels(a), &a.data))
}

pub fn write_fused(path: &Path, labels: &[String], f: &AudiovisualFeatures) -> CliResult<()> {
    write_atomic(path, |w| write_matrix(w, "feature", "col", labels, &f.data))
}

/// Global training set as `features.csv`, `targets.csv` and
/// `provenance.csv` in `dir`.
pub fn write_global(dir: &Path, labels: &[String], set: &GlobalTrainingSet) -> CliResult<()> {
    write_atomic(&dir.join("features.csv"), |w| write_matrix(w, "feature", "col", labels, &set.features))?;
    let groups: Vec<String> = (1..=set.targets.rows()).map(|g| format!("group{g}")).collect();
    write_atomic(&dir.join("targets.csv"), |w| write_matrix(w, "target", "col", &groups, &set.targets))?;
    write_atomic(&dir.join("provenance.csv"), |w| {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["column", "clip_id"])?;
        for c in 0..set.columns() {
            wtr.write_record([c.to_string().as_str(), set.provenance(c)])?;
        }
        wtr.flush()
    })
}
