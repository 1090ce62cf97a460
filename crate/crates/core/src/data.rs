//! Tourist records, CSV ingestion, feature assembly and KML export.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{contract, Error, Result};

/// Column header expected on every ingested CSV file.
pub const CSV_HEADER: [&str; 7] = ["no", "lat", "lon", "alt", "name", "evaluation", "comment"];

/// Longest comment accepted at ingest, in characters.
pub const MAX_COMMENT_CHARS: usize = 140;

/// One sensed observation from a participant's phone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouristRecord {
    pub id: u64,
    pub lat: f64,
    pub lon: f64,
    pub alt: f64,
    pub name: String,
    pub evaluation: u8,
    pub comment: String,
}

impl TouristRecord {
    /// Checks the domain invariants. `line` is used for diagnostics only.
    pub fn validate(&self, line: usize) -> Result<()> {
        let fail = |message: String| Err(Error::Validation { line, message });
        if self.id == 0 {
            return fail("record id must be positive".into());
        }
        if self.evaluation > 4 {
            return fail(format!("evaluation {} outside 0..=4", self.evaluation));
        }
        if !(-90.0..=90.0).contains(&self.lat) {
            return fail(format!("latitude {} outside [-90, 90]", self.lat));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return fail(format!("longitude {} outside [-180, 180]", self.lon));
        }
        if !self.alt.is_finite() {
            return fail("altitude is not finite".into());
        }
        let len = self.comment.chars().count();
        if len > MAX_COMMENT_CHARS {
            return fail(format!("comment has {len} characters, limit is {MAX_COMMENT_CHARS}"));
        }
        Ok(())
    }
}

/// Parses CSV text with the fixed `no,lat,lon,alt,name,evaluation,comment` header.
///
/// Line numbers in errors are 1-based physical lines of the input.
pub fn parse_records(csv_text: &str) -> Result<Vec<TouristRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(csv_text.as_bytes());

    let header = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    if header.is_empty() || header.iter().map(str::trim).ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| row.get(i).unwrap_or_default();

        let record = TouristRecord {
            id: parse_field(field(0), "no", line)?,
            lat: parse_field(field(1), "lat", line)?,
            lon: parse_field(field(2), "lon", line)?,
            alt: parse_field(field(3), "alt", line)?,
            name: field(4).to_string(),
            evaluation: parse_evaluation(field(5), line)?,
            comment: field(6).to_string(),
        };
        record.validate(line)?;
        out.push(record);
    }
    Ok(out)
}

fn parse_field<T: FromStr>(raw: &str, column: &str, line: usize) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("column `{column}`: `{raw}` is not a valid number"),
    })
}

// Integers outside the u8 range are still a domain violation, not a parse failure.
fn parse_evaluation(raw: &str, line: usize) -> Result<u8> {
    let value: i64 = parse_field(raw, "evaluation", line)?;
    u8::try_from(value).ok().filter(|v| *v <= 4).ok_or_else(|| Error::Validation {
        line,
        message: format!("evaluation {value} outside 0..=4"),
    })
}

fn csv_error(err: csv::Error, fallback_line: usize) -> Error {
    let line = err.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Parse { line, message: err.to_string() }
}

/// Writes records in the ingest format. `parse_records(&render_csv(rs)) == rs`.
pub fn render_csv(records: &[TouristRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        writer
            .write_record([
                r.id.to_string(),
                r.lat.to_string(),
                r.lon.to_string(),
                r.alt.to_string(),
                r.name.clone(),
                r.evaluation.to_string(),
                r.comment.clone(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Record attributes usable as features, decision-tree inputs and rule antecedents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Lat,
    Lon,
    Alt,
    Evaluation,
    TfidfMax,
    TfidfSum,
}

impl Attribute {
    /// Default feature order.
    pub const ALL: [Attribute; 6] = [
        Attribute::Lat,
        Attribute::Lon,
        Attribute::Alt,
        Attribute::Evaluation,
        Attribute::TfidfMax,
        Attribute::TfidfSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Lat => "lat",
            Attribute::Lon => "lon",
            Attribute::Alt => "alt",
            Attribute::Evaluation => "evaluation",
            Attribute::TfidfMax => "tfidf_max",
            Attribute::TfidfSum => "tfidf_sum",
        }
    }

    pub fn parse(name: &str) -> Option<Attribute> {
        Attribute::ALL.into_iter().find(|a| a.name() == name)
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw (unnormalized) attribute values of one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordAttributes {
    pub lat: f64,
    pub lon: f64,
    pub alt: f64,
    pub evaluation: f64,
    pub tfidf_max: f64,
    pub tfidf_sum: f64,
}

impl RecordAttributes {
    pub fn new(record: &TouristRecord, tfidf_max: f64, tfidf_sum: f64) -> Self {
        RecordAttributes {
            lat: record.lat,
            lon: record.lon,
            alt: record.alt,
            evaluation: f64::from(record.evaluation),
            tfidf_max,
            tfidf_sum,
        }
    }

    pub fn get(&self, attr: Attribute) -> f64 {
        match attr {
            Attribute::Lat => self.lat,
            Attribute::Lon => self.lon,
            Attribute::Alt => self.alt,
            Attribute::Evaluation => self.evaluation,
            Attribute::TfidfMax => self.tfidf_max,
            Attribute::TfidfSum => self.tfidf_sum,
        }
    }
}

/// A numeric input vector together with the names of its components.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    schema: Arc<[String]>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, schema: Arc<[String]>) -> Result<Self> {
        if values.len() != schema.len() {
            return Err(contract(format!(
                "feature vector has {} values for {} attributes",
                values.len(),
                schema.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(contract("feature values must be finite"));
        }
        Ok(FeatureVector { values, schema })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Z-score parameters of one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Set when the attribute does not vary; its normalized value is always 0.
    pub constant: bool,
}

impl Normalization {
    fn fit(column: impl Iterator<Item = f64> + Clone) -> Self {
        let n = column.clone().count() as f64;
        let mean = column.clone().sum::<f64>() / n;
        let var = column.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        let constant = std <= 1e-12 * mean.abs().max(1.0);
        Normalization { mean, std, constant }
    }

    pub fn apply(&self, x: f64) -> f64 {
        if self.constant {
            0.0
        } else {
            (x - self.mean) / self.std
        }
    }

    pub fn invert(&self, z: f64) -> f64 {
        if self.constant {
            self.mean
        } else {
            z * self.std + self.mean
        }
    }
}

/// Index-aligned records, raw attribute rows and normalized feature vectors.
///
/// Datasets built from plain numeric rows (no tourist records) leave `records` empty.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Arc<[String]>,
    records: Vec<TouristRecord>,
    raw: Vec<Vec<f64>>,
    features: Vec<FeatureVector>,
    normalization: Vec<Normalization>,
}

impl Dataset {
    /// Builds z-score normalized features from arbitrary numeric rows.
    pub fn from_rows(schema: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::assemble(schema, Vec::new(), rows)
    }

    fn assemble(schema: Vec<String>, records: Vec<TouristRecord>, raw: Vec<Vec<f64>>) -> Result<Self> {
        let schema: Arc<[String]> = schema.into();
        if let Some(bad) = raw.iter().position(|r| r.len() != schema.len()) {
            return Err(contract(format!("row {bad} does not match the {}-attribute schema", schema.len())));
        }
        if raw.iter().flatten().any(|v| !v.is_finite()) {
            return Err(contract("attribute values must be finite"));
        }
        let normalization: Vec<Normalization> = if raw.is_empty() {
            Vec::new()
        } else {
            (0..schema.len()).map(|j| Normalization::fit(raw.iter().map(move |r| r[j]))).collect()
        };
        let features = raw
            .iter()
            .map(|row| {
                let values = row.iter().zip(&normalization).map(|(&x, n)| n.apply(x)).collect();
                FeatureVector::new(values, schema.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { schema, records, raw, features, normalization })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.schema.len()
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn records(&self) -> &[TouristRecord] {
        &self.records
    }

    pub fn raw(&self) -> &[Vec<f64>] {
        &self.raw
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn normalization(&self) -> &[Normalization] {
        &self.normalization
    }

    /// Normalized feature values of sample `i`.
    pub fn sample(&self, i: usize) -> &[f64] {
        self.features[i].values()
    }

    /// Maps a normalized vector back to raw attribute units.
    pub fn denormalize(&self, values: &[f64]) -> Vec<f64> {
        values.iter().zip(&self.normalization).map(|(&z, n)| n.invert(z)).collect()
    }

    /// Content hash over schema, raw values and record text.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.schema.len() as u64).to_le_bytes());
        for name in self.schema.iter() {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
        }
        hasher.update((self.raw.len() as u64).to_le_bytes());
        for v in self.raw.iter().flatten() {
            hasher.update(v.to_bits().to_le_bytes());
        }
        for r in &self.records {
            hasher.update(r.id.to_le_bytes());
            hasher.update(r.name.as_bytes());
            hasher.update([0u8]);
            hasher.update(r.comment.as_bytes());
            hasher.update([0u8]);
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Assembles the default `[lat, lon, alt, evaluation, tfidf_max, tfidf_sum]` features.
pub fn build_features(records: &[TouristRecord], tfidf_per_record: &[(f64, f64)]) -> Result<Dataset> {
    build_features_masked(records, tfidf_per_record, &Attribute::ALL)
}

/// Like [`build_features`] but keeps only the attributes in `mask`, in mask order.
pub fn build_features_masked(
    records: &[TouristRecord],
    tfidf_per_record: &[(f64, f64)],
    mask: &[Attribute],
) -> Result<Dataset> {
    if records.len() != tfidf_per_record.len() {
        return Err(contract(format!(
            "{} records but {} tf-idf pairs",
            records.len(),
            tfidf_per_record.len()
        )));
    }
    if mask.is_empty() {
        return Err(contract("attribute mask selects no attributes"));
    }
    let raw = records
        .iter()
        .zip(tfidf_per_record)
        .map(|(r, &(max, sum))| {
            let attrs = RecordAttributes::new(r, max, sum);
            mask.iter().map(|&a| attrs.get(a)).collect()
        })
        .collect();
    let schema = mask.iter().map(|a| a.name().to_string()).collect();
    Dataset::assemble(schema, records.to_vec(), raw)
}

/// Renders records as a KML 2.2 document with one Placemark per record.
pub fn export_kml(records: &[TouristRecord]) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <kml xmlns=\"http://www.opengis.net/kml/2.2\">\n  <Document>\n",
    );
    for r in records {
        out.push_str("    <Placemark>\n");
        out.push_str(&format!("      <name>{}</name>\n", xml_text(&r.name)));
        out.push_str(&format!("      <description>{}</description>\n", xml_text(&r.comment)));
        out.push_str(&format!(
            "      <Point>\n        <coordinates>{},{},{}</coordinates>\n      </Point>\n",
            r.lon, r.lat, r.alt
        ));
        out.push_str("    </Placemark>\n");
    }
    out.push_str("  </Document>\n</kml>\n");
    out
}

// Drops characters XML 1.0 cannot carry, then escapes markup.
fn xml_text(s: &str) -> String {
    let legal: String = s
        .chars()
        .filter(|&c| matches!(c, '\t' | '\n' | '\r') || (c >= ' ' && c != '\u{FFFE}' && c != '\u{FFFF}'))
        .collect();
    quick_xml::escape::escape(legal.as_str()).into_owned()
}
