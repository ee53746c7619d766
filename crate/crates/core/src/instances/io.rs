use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracle::GroundTruth;

use super::{InstanceMeta, LabeledInstance};

pub const TABLE_MAGIC: &[u8; 4] = b"WSOM";
pub const TABLE_VERSION: u32 = 1;

/// Reads points from a CSV file, one point per row.
///
/// With `labeled`, the last column is an integer cluster label. A first row
/// made entirely of non-numeric cells is taken as a header.
pub fn load_points_csv(path: impl AsRef<Path>, labeled: bool) -> Result<LabeledInstance> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 1;
        if row == 0 && record.iter().all(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        if width.is_none() {
            width = Some(record.len());
        }
        if Some(record.len()) != width {
            return Err(Error::Parse { line, msg: format!("expected {} columns, found {}", width.unwrap(), record.len()) });
        }
        let coords = if labeled { record.len().saturating_sub(1) } else { record.len() };
        if coords == 0 {
            return Err(Error::Parse { line, msg: "no coordinate columns".into() });
        }
        for cell in record.iter().take(coords) {
            let v: f64 = cell.parse().map_err(|_| Error::Parse { line, msg: format!("not a number: {cell:?}") })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, msg: format!("non-finite value {cell:?}") });
            }
            data.push(v);
        }
        if labeled {
            let cell = &record[coords];
            labels.push(cell.parse::<u32>().map_err(|_| Error::Parse { line, msg: format!("bad label {cell:?}") })?);
        }
    }
    let dim = match width {
        Some(w) => w - usize::from(labeled),
        None => return Err(Error::Empty("CSV has no data rows")),
    };
    let truth = GroundTruth::from_points(dim, data)?;
    let k = if labeled {
        let mut l = labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    } else {
        0
    };
    let meta = InstanceMeta {
        kind: "csv".into(),
        n: truth.n(),
        k,
        mu: None,
        seed: 0,
        dim: Some(dim),
        aspect_ratio: truth.aspect_ratio(),
        scale: truth.scale(),
    };
    Ok(LabeledInstance { truth: Arc::new(truth), labels: labeled.then_some(labels), meta })
}

/// Writes the (normalized) coordinates, plus a trailing label column when
/// the instance has labels.
pub fn write_points_csv(path: impl AsRef<Path>, inst: &LabeledInstance) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..inst.n() {
        let coords = inst.truth.coords(i).ok_or(Error::NoCoordinates)?;
        let mut row: Vec<String> = coords.iter().map(|v| v.to_string()).collect();
        if let Some(l) = &inst.labels {
            row.push(l[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Binary distance table: `"WSOM"`, version (u32 LE), n (u64 LE), then the
/// strict upper triangle row by row as f64 LE.
pub fn write_table(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    let n = truth.n();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(TABLE_MAGIC)?;
    w.write_all(&TABLE_VERSION.to_le_bytes())?;
    w.write_all(&(n as u64).to_le_bytes())?;
    for i in 0..n {
        for j in i + 1..n {
            w.write_all(&truth.distance(i, j).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 16];
    r.read_exact(&mut header).map_err(|_| Error::BadTableFile("truncated header".into()))?;
    if &header[..4] != TABLE_MAGIC {
        return Err(Error::BadTableFile("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes"));
    if version != TABLE_VERSION {
        return Err(Error::BadTableFile(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes")) as usize;
    let len = n
        .checked_mul(n.saturating_sub(1))
        .map(|m| m / 2)
        .ok_or_else(|| Error::BadTableFile(format!("n = {n} overflows")))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != len * 8 {
        return Err(Error::BadTableFile(format!("expected {} payload bytes, found {}", len * 8, bytes.len())));
    }
    let upper = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    GroundTruth::from_table(n, upper)
}
