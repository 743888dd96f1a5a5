//! Dataset manifests: one CSV row per clip with its media paths, opinion
//! score and distortion labels.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MANIFEST_COLUMNS: [&str; 7] = [
    "id",
    "video_path",
    "audio_path",
    "mos",
    "video_distortion",
    "audio_distortion",
    "severity",
];

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest is missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("clip {id}: mos {mos} is outside [1, 5]")]
    MosOutOfRange { id: String, mos: f64 },
    #[error("clip {id}: severity {severity} is negative")]
    NegativeSeverity { id: String, severity: f64 },
    #[error("duplicate clip id `{0}`")]
    DuplicateId(String),
    #[error("clip {id}: media file {} does not exist", path.display())]
    MissingMedia { id: String, path: PathBuf },
    #[error("clip {id}: field `{value}` contains a comma or quote")]
    UnwritableField { id: String, value: String },
}

/// One row as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub video_path: PathBuf,
    pub audio_path: PathBuf,
    pub mos: f64,
    pub video_distortion: String,
    pub audio_distortion: String,
    pub severity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    /// Entries with media paths resolved against the manifest's directory.
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses manifest CSV. Relative media paths are joined onto `base_dir`.
/// Quoting is disabled, so a path containing a comma shifts the row's field
/// count and is rejected.
pub fn parse_manifest(reader: impl Read, base_dir: &Path) -> Result<DatasetManifest, ManifestError> {
    let mut rdr = csv::ReaderBuilder::new().quoting(false).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| ManifestError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    for col in MANIFEST_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(ManifestError::MissingColumn(col));
        }
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| ManifestError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut entry: ManifestEntry = record.deserialize(Some(&headers)).map_err(|e| ManifestError::Malformed {
            line,
            message: e.to_string(),
        })?;
        if !(1.0..=5.0).contains(&entry.mos) {
            return Err(ManifestError::MosOutOfRange {
                id: entry.id,
                mos: entry.mos,
            });
        }
        if !(entry.severity >= 0.0) {
            return Err(ManifestError::NegativeSeverity {
                id: entry.id,
                severity: entry.severity,
            });
        }
        if !seen.insert(entry.id.clone()) {
            return Err(ManifestError::DuplicateId(entry.id));
        }
        entry.video_path = base_dir.join(&entry.video_path);
        entry.audio_path = base_dir.join(&entry.audio_path);
        entries.push(entry);
    }
    Ok(DatasetManifest { entries })
}

/// Loads a manifest and checks that every referenced media file exists.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest, ManifestError> {
    let file = std::fs::File::open(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let manifest = parse_manifest(file, base)?;
    for e in &manifest.entries {
        for p in [&e.video_path, &e.audio_path] {
            if !p.is_file() {
                return Err(ManifestError::MissingMedia {
                    id: e.id.clone(),
                    path: p.clone(),
                });
            }
        }
    }
    Ok(manifest)
}

/// Serializes entries verbatim (paths are written as given).
pub fn write_manifest(w: impl Write, entries: &[ManifestEntry]) -> Result<(), ManifestError> {
    let io = |e: csv::Error| ManifestError::Io {
        path: PathBuf::from("<manifest>"),
        source: e.into(),
    };
    let mut wtr = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Never).from_writer(w);
    for e in entries {
        for value in [
            e.id.as_str(),
            &e.video_path.to_string_lossy(),
            &e.audio_path.to_string_lossy(),
            &e.video_distortion,
            &e.audio_distortion,
        ] {
            if value.contains([',', '"', '\n']) {
                return Err(ManifestError::UnwritableField {
                    id: e.id.clone(),
                    value: value.to_string(),
                });
            }
        }
        wtr.serialize(e).map_err(io)?;
    }
    wtr.flush().map_err(|e| ManifestError::Io {
        path: PathBuf::from("<manifest>"),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id,video_path,audio_path,mos,video_distortion,audio_distortion,severity\n";

    fn parse(body: &str) -> Result<DatasetManifest, ManifestError> {
        parse_manifest(format!("{HEADER}{body}").as_bytes(), Path::new("/data"))
    }

    #[test]
    fn parses_valid_rows_and_resolves_paths() {
        let m = parse("a,v/a.y4m,a.wav,3.5,blur,echo,0.2\nb,/abs/b.y4m,b.wav,1,none,none,0\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.entries[0].video_path, Path::new("/data/v/a.y4m"));
        assert_eq!(m.entries[1].video_path, Path::new("/abs/b.y4m"));
        assert_eq!(m.entries[0].mos, 3.5);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(parse("a,a.y4m,a.wav,5.3,blur,echo,0\n"), Err(ManifestError::MosOutOfRange { .. })));
        assert!(matches!(
            parse("a,a.y4m,a.wav,3,blur,echo,0\na,b.y4m,b.wav,3,blur,echo,0\n"),
            Err(ManifestError::DuplicateId(id)) if id == "a"
        ));
        assert!(matches!(parse("a,x,y.y4m,a.wav,3,blur,echo,0\n"), Err(ManifestError::Malformed { .. })));
        assert!(matches!(parse("a,\"x,y.y4m\",a.wav,3,blur,echo,0\n"), Err(ManifestError::Malformed { .. })));
        assert!(matches!(parse("a,a.y4m,a.wav,3,blur,echo,-1\n"), Err(ManifestError::NegativeSeverity { .. })));
        let missing = parse_manifest("id,video_path,audio_path,mos\n".as_bytes(), Path::new(""));
        assert!(matches!(missing, Err(ManifestError::MissingColumn("video_distortion"))));
    }

    #[test]
    fn write_then_parse_round_trips() {
        let e = ManifestEntry {
            id: "c1".into(),
            video_path: "c1.y4m".into(),
            audio_path: "c1.wav".into(),
            mos: 2.75,
            video_distortion: "freeze".into(),
            audio_distortion: "clip".into(),
            severity: 0.5625,
        };
        let mut buf = Vec::new();
        write_manifest(&mut buf, std::slice::from_ref(&e)).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with(HEADER));
        let m = parse_manifest(buf.as_slice(), Path::new("")).unwrap();
        assert_eq!(m.entries, vec![e.clone()]);
        let bad = ManifestEntry {
            video_path: "a,b.y4m".into(),
            ..e
        };
        assert!(write_manifest(Vec::new(), &[bad]).is_err());
    }
}
