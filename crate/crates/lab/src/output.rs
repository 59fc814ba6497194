//! File formats: JSON lines for samples, CSV for summaries, spectra and
//! censuses, pretty JSON for reports.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use hypertree_core::local::NeighborhoodCensus;
use hypertree_core::simplicial::format_face_list;
use hypertree_core::{face_unrank, EnumerationResult, SpectralMeasure};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{LabError, Result};

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| LabError::io(path, e))
}

pub fn write_jsonl<'a, T: Serialize + 'a>(path: &Path, items: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n").map_err(|e| LabError::io(path, e))?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| LabError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| LabError::Input(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(item);
    }
    Ok(out)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| LabError::io(path, e))?;
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn write_csv<'a, T: Serialize + 'a>(path: &Path, rows: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

/// Columns `location,weight`, one row per atom.
pub fn write_spectral_csv(path: &Path, mu: &SpectralMeasure) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["location", "weight"])?;
    for &(t, p) in mu.atoms() {
        w.write_record([t.to_string(), p.to_string()])?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

/// Columns `code,frequency`, sorted by code.
pub fn write_census_csv(path: &Path, census: &NeighborhoodCensus) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["code", "frequency"])?;
    for (code, f) in census.frequencies() {
        w.write_record([code.to_string(), f.to_string()])?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

#[derive(Debug, Serialize)]
pub struct EnumeratedEntry {
    pub faces: String,
    pub torsion: String,
}

#[derive(Debug, Serialize)]
pub struct EnumerationSummary {
    pub candidates: String,
    pub hypertrees: usize,
    pub total_weight: String,
    pub predicted: String,
    pub kalai_holds: bool,
}

/// JSON layout of an enumeration: one entry per hypertree plus the
/// `Σ|H|²` summary against `n^C(n-2,d)`.
#[derive(Debug, Serialize)]
pub struct EnumerationDocument {
    pub n: u32,
    pub d: usize,
    pub hypertrees: Vec<EnumeratedEntry>,
    pub summary: EnumerationSummary,
}

impl EnumerationDocument {
    pub fn new(res: &EnumerationResult) -> Self {
        let hypertrees = res
            .hypertrees
            .iter()
            .map(|h| {
                let faces: Vec<_> = h
                    .faces
                    .iter()
                    .map(|&f| face_unrank(res.n, res.d + 1, f).expect("enumerated rank in range"))
                    .collect();
                EnumeratedEntry { faces: format_face_list(&faces), torsion: h.order.to_string() }
            })
            .collect();
        EnumerationDocument {
            n: res.n,
            d: res.d,
            hypertrees,
            summary: EnumerationSummary {
                candidates: res.candidate_count.to_string(),
                hypertrees: res.hypertrees.len(),
                total_weight: res.total_weight.to_string(),
                predicted: res.expected_total().to_string(),
                kalai_holds: res.kalai_holds(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/x.jsonl");
        let items = vec![(1u32, "a".to_string()), (2, "b".to_string())];
        write_jsonl(&path, &items).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "[1,\"a\"]\n[2,\"b\"]\n");
        let back: Vec<(u32, String)> = read_jsonl(&path).unwrap();
        assert_eq!(back, items);
    }

    #[test]
    fn enumeration_document_for_four_vertices() {
        let res = hypertree_core::enumerate_hypertrees(4, 2).unwrap();
        let doc = EnumerationDocument::new(&res);
        assert_eq!(doc.hypertrees[0].faces, "1,2,3;1,2,4;1,3,4");
        assert!(doc.hypertrees.iter().all(|h| h.torsion == "1"));
        assert_eq!(doc.summary.total_weight, "4");
        assert_eq!(doc.summary.predicted, "4");
    }

    #[test]
    fn spectral_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.csv");
        let mu = SpectralMeasure::new(vec![(0.0, 0.5), (3.0, 0.5)]).unwrap();
        write_spectral_csv(&path, &mu).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "location,weight\n0,0.5\n3,0.5\n");
    }
}
