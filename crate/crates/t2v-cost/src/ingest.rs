//! Readers for model specs, measurement records and model defaults.

use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;
use t2v_cost_core::{MeasurementRecord, ModelDefaults, ModelSpec};

use crate::{Error, Result};

/// Column order of measurement CSV files.
pub const MEASUREMENT_HEADER: [&str; 11] = [
    "model_id",
    "height",
    "width",
    "frames",
    "steps",
    "latency_s",
    "latency_std_s",
    "gpu_wh",
    "gpu_wh_std",
    "cpu_wh",
    "ram_wh",
];

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn json_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Model spec from a JSON file, validated.
pub fn read_model_spec(path: &Path) -> Result<ModelSpec> {
    let spec: ModelSpec = json_file(path)?;
    spec.validate()?;
    Ok(spec)
}

/// CSV with a header row. Optional columns may be missing or empty.
pub fn measurements_from_csv<R: Read>(reader: R, origin: &str) -> Result<Vec<MeasurementRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let records = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<MeasurementRecord>, _>>()
        .map_err(|source| Error::Csv {
            path: origin.into(),
            source,
        })?;
    records.iter().try_for_each(MeasurementRecord::validate)?;
    Ok(records)
}

/// JSON array of records using the CSV column names as keys.
pub fn measurements_from_json(text: &str, origin: &str) -> Result<Vec<MeasurementRecord>> {
    let records: Vec<MeasurementRecord> =
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: origin.into(),
            source,
        })?;
    records.iter().try_for_each(MeasurementRecord::validate)?;
    Ok(records)
}

/// Measurements from `.json` or CSV (any other extension).
pub fn read_measurements(path: &Path) -> Result<Vec<MeasurementRecord>> {
    let origin = path.display().to_string();
    if is_json(path) {
        measurements_from_json(&read_text(path)?, &origin)
    } else {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        measurements_from_csv(file, &origin)
    }
}

/// Model defaults from a JSON array or a CSV with
/// `model_id,steps,height,width,frames,fps` columns.
pub fn read_defaults(path: &Path) -> Result<Vec<ModelDefaults>> {
    if is_json(path) {
        return json_file(path);
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file)
        .deserialize()
        .collect::<std::result::Result<Vec<ModelDefaults>, _>>()
        .map_err(|source| Error::Csv {
            path: path.into(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_missing_optional_columns() {
        let text =
            "model_id,height,width,frames,steps,latency_s\nm,256,256,4,10,1.5\nm,256,256,4,20,\n";
        let records = measurements_from_csv(text.as_bytes(), "inline").unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].latency_s, Some(1.5));
        assert_eq!(records[1].latency_s, None);
        assert_eq!(records[0].gpu_wh, None);
    }

    #[test]
    fn csv_rejects_negative_energy() {
        let text = "model_id,height,width,frames,steps,gpu_wh\nm,256,256,4,10,-1\n";
        assert!(measurements_from_csv(text.as_bytes(), "inline").is_err());
    }

    #[test]
    fn csv_rejects_missing_required_column() {
        let text = "model_id,height,width,frames\nm,256,256,4\n";
        assert!(matches!(
            measurements_from_csv(text.as_bytes(), "inline"),
            Err(Error::Csv { .. })
        ));
    }

    #[test]
    fn json_records() {
        let text = r#"[{"model_id": "m", "height": 256, "width": 256, "frames": 4, "steps": 10, "gpu_wh": 2.0}]"#;
        let records = measurements_from_json(text, "inline").unwrap();
        assert_eq!(records[0].gpu_wh, Some(2.0));
        assert_eq!(records[0].latency_s, None);
    }
}
