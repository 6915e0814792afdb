use std::collections::BTreeMap;
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};

use crate::error::{invalid, Error, Result};

/// Timestamped readings with missing values. Rows are sorted by timestamp and
/// duplicate timestamps are merged by componentwise maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDataset {
    names: Vec<String>,
    timestamps: Vec<DateTime<Utc>>,
    values: Vec<Vec<Option<f64>>>,
}

/// Componentwise maximum over one UTC day. `None` marks a column with no
/// reading that day.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyMax {
    pub day: NaiveDate,
    pub values: Vec<Option<f64>>,
}

impl DailyMax {
    /// The selected components, or `None` if any of them is missing.
    pub fn complete(&self, indices: &[usize]) -> Option<Vec<f64>> {
        indices
            .iter()
            .map(|&i| self.values.get(i).copied().flatten())
            .collect()
    }
}

pub(crate) fn parse_timestamp(s: &str) -> Result<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t.and_utc());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc());
    }
    Err(Error::Data(format!("unrecognised timestamp {s:?}")))
}

fn merge_max(into: &mut [Option<f64>], from: &[Option<f64>]) {
    for (a, b) in into.iter_mut().zip(from) {
        *a = match (*a, *b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        };
    }
}

impl SeriesDataset {
    pub fn new(names: Vec<String>, rows: Vec<(DateTime<Utc>, Vec<Option<f64>>)>) -> Result<Self> {
        if names.is_empty() {
            return invalid("a series needs at least one value column");
        }
        let mut merged: BTreeMap<DateTime<Utc>, Vec<Option<f64>>> = BTreeMap::new();
        for (t, v) in rows {
            if v.len() != names.len() {
                return Err(Error::Data(format!(
                    "row at {t} has {} values, expected {}",
                    v.len(),
                    names.len()
                )));
            }
            if v.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Data(format!("row at {t} has a non-finite value")));
            }
            match merged.get_mut(&t) {
                Some(existing) => merge_max(existing, &v),
                None => {
                    merged.insert(t, v);
                }
            }
        }
        let (timestamps, values) = merged.into_iter().unzip();
        Ok(Self {
            names,
            timestamps,
            values,
        })
    }

    /// Reads `timestamp,<name1>,...` CSV. Empty cells are missing values.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("timestamp") {
            return Err(Error::Data(
                "expected a header `timestamp,<name>,...`".into(),
            ));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let t = parse_timestamp(&rec[0])?;
            let v = rec
                .iter()
                .skip(1)
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>()
                            .map(Some)
                            .map_err(|_| Error::Data(format!("bad number {c:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((t, v));
        }
        Self::new(names, rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn values(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }
}

/// Componentwise daily maxima over UTC days. Days without any reading are
/// omitted; partially observed days keep their observed components.
pub fn daily_max(ds: &SeriesDataset) -> Result<Vec<DailyMax>> {
    if ds.is_empty() {
        return invalid("the dataset has no rows");
    }
    let mut days: BTreeMap<NaiveDate, Vec<Option<f64>>> = BTreeMap::new();
    for (t, v) in ds.timestamps.iter().zip(&ds.values) {
        let slot = days
            .entry(t.date_naive())
            .or_insert_with(|| vec![None; v.len()]);
        merge_max(slot, v);
    }
    Ok(days
        .into_iter()
        .filter(|(_, v)| v.iter().any(Option::is_some))
        .map(|(day, values)| DailyMax { day, values })
        .collect())
}

/// Groups daily maxima by calendar year.
pub fn group_by_year(days: &[DailyMax]) -> BTreeMap<i32, Vec<DailyMax>> {
    use chrono::Datelike;
    let mut out: BTreeMap<i32, Vec<DailyMax>> = BTreeMap::new();
    for d in days {
        out.entry(d.day.year()).or_default().push(d.clone());
    }
    out
}
