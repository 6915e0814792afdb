//! Reading and writing fronts, ensembles and objective tables.
//!
//! Ensembles are stored either as JSON `{"reference", "grid", "lengths"}` or
//! as CSV whose first record is `eta:[..] grid_ref:<fingerprint>` followed by
//! one row of lengths per sample. The CSV form needs the grid supplied
//! separately and checks it against the fingerprint.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polar::DirectionGrid;
use crate::stats::FrontEnsemble;

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let f = File::open(path.as_ref())?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(w.flush()?)
}

fn header_line(e: &FrontEnsemble) -> Result<String> {
    Ok(format!(
        "eta:{} grid_ref:{}",
        serde_json::to_string(e.reference())?,
        e.grid().fingerprint()
    ))
}

pub fn write_ensemble_csv<W: Write>(e: &FrontEnsemble, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    w.write_record([header_line(e)?])?;
    for row in e.lengths().rows() {
        w.write_record(row.iter().map(|x| format!("{x:?}")))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_header(h: &str) -> Result<(Vec<f64>, String)> {
    let bad = || Error::Data(format!("malformed ensemble header {h:?}"));
    let rest = h.trim().strip_prefix("eta:").ok_or_else(bad)?;
    let (eta, grid_ref) = rest.rsplit_once(" grid_ref:").ok_or_else(bad)?;
    let eta: Vec<f64> = serde_json::from_str(eta.trim()).map_err(|_| bad())?;
    Ok((eta, grid_ref.trim().to_string()))
}

pub fn read_ensemble_csv<R: Read>(reader: R, grid: Arc<DirectionGrid>) -> Result<FrontEnsemble> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Data("empty ensemble file".into()))??;
    let (eta, grid_ref) = parse_header(header.get(0).unwrap_or_default())?;
    if grid_ref != grid.fingerprint() {
        return Err(Error::Data(
            "ensemble was written for a different direction grid".into(),
        ));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Data(format!("bad length {c:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data("ensemble file has no samples".into()));
    }
    FrontEnsemble::from_rows(eta, grid, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::sample_directions;

    #[test]
    fn csv_round_trip_is_exact() {
        let grid = Arc::new(sample_directions(3, 4, 8).unwrap());
        let e = FrontEnsemble::from_rows(
            vec![-0.2, 0.0, 1.5],
            grid.clone(),
            vec![vec![0.1, 0.2, 1.0 / 3.0, 4.0], vec![0.0, 2.5, 1e-17, 7.25]],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_ensemble_csv(&e, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("\"eta:[-0.2,0.0,1.5] grid_ref:"));
        assert_eq!(read_ensemble_csv(buf.as_slice(), grid).unwrap(), e);
    }

    #[test]
    fn csv_rejects_other_grid_and_empty_files() {
        let grid = Arc::new(sample_directions(2, 3, 1).unwrap());
        let other = Arc::new(sample_directions(2, 3, 2).unwrap());
        let e = FrontEnsemble::from_rows(vec![0.0, 0.0], grid.clone(), vec![vec![1.0, 1.0, 1.0]])
            .unwrap();
        let mut buf = Vec::new();
        write_ensemble_csv(&e, &mut buf).unwrap();
        assert!(matches!(
            read_ensemble_csv(buf.as_slice(), other),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            read_ensemble_csv("".as_bytes(), grid.clone()),
            Err(Error::Data(_))
        ));
        assert!(read_ensemble_csv("nonsense\n1,2,3\n".as_bytes(), grid).is_err());
    }
}
