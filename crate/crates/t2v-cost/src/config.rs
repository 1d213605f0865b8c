//! Resolution of model specs, hardware entries and data files.
//!
//! A name is looked up first in the spec directory (the `--spec-dir` flag,
//! else the `T2V_COST_SPEC_DIR` environment variable), then in the bundled
//! data. An argument naming an existing file is always read directly.

use std::path::{Path, PathBuf};

use t2v_cost_core::{HardwareSpec, MeasurementRecord, ModelDefaults, ModelSpec};

use crate::bundled;
use crate::hardware::{HardwareDb, HardwareEntry};
use crate::ingest;
use crate::{Error, Result};

pub const SPEC_DIR_ENV: &str = "T2V_COST_SPEC_DIR";

/// Name of the hardware database file inside a spec directory.
pub const HARDWARE_FILE: &str = "hardware.json";

#[derive(Debug, Clone, Default)]
pub struct SpecSources {
    pub spec_dir: Option<PathBuf>,
}

fn existing_file(arg: &str) -> Option<&Path> {
    let p = Path::new(arg);
    p.is_file().then_some(p)
}

impl SpecSources {
    pub fn new(spec_dir: Option<PathBuf>) -> Self {
        Self { spec_dir }
    }

    pub fn from_env() -> Self {
        Self {
            spec_dir: std::env::var_os(SPEC_DIR_ENV).map(PathBuf::from),
        }
    }

    fn in_spec_dir(&self, file: &str) -> Option<PathBuf> {
        let p = self.spec_dir.as_ref()?.join(file);
        p.is_file().then_some(p)
    }

    /// Model spec by path or name; `None` picks the WAN2.1-1.3B spec.
    pub fn model(&self, query: Option<&str>) -> Result<ModelSpec> {
        let name = query.unwrap_or(ModelSpec::WAN2_1_1_3B);
        if let Some(path) = existing_file(name) {
            return ingest::read_model_spec(path);
        }
        if let Some(path) = self.in_spec_dir(&format!("{name}.json")) {
            return ingest::read_model_spec(&path);
        }
        if name.eq_ignore_ascii_case(ModelSpec::WAN2_1_1_3B) {
            return Ok(bundled::wan_model_spec());
        }
        Err(Error::UnknownModel(name.to_string()))
    }

    /// Hardware database of the spec directory, else the bundled table.
    pub fn hardware_db(&self) -> Result<HardwareDb> {
        match self.in_spec_dir(HARDWARE_FILE) {
            Some(path) => read_hardware_file(&path),
            None => Ok(bundled::hardware_db()),
        }
    }

    /// Hardware entry by path or name; `None` picks the H100.
    pub fn hardware_entry(&self, query: Option<&str>) -> Result<HardwareEntry> {
        let name = query.unwrap_or(bundled::DEFAULT_HARDWARE);
        let entry = if let Some(path) = existing_file(name) {
            let mut db = read_hardware_file(path)?;
            if db.entries.len() != 1 {
                return Err(Error::UnknownHardware(format!(
                    "{name} (file must hold exactly one entry; use --spec-dir with {HARDWARE_FILE} for a database)"
                )));
            }
            db.entries.remove(0)
        } else {
            let local = self.hardware_db()?.find(name).cloned();
            local
                .or_else(|| bundled::hardware_db().find(name).cloned())
                .ok_or_else(|| Error::UnknownHardware(name.to_string()))?
        };
        entry.spec().validate()?;
        Ok(entry)
    }

    pub fn hardware(&self, query: Option<&str>) -> Result<HardwareSpec> {
        Ok(self.hardware_entry(query)?.spec())
    }

    /// Measurements from a file or the `table4_measurements` fixture.
    pub fn measurements(&self, query: &str) -> Result<Vec<MeasurementRecord>> {
        if query == "table4_measurements" && existing_file(query).is_none() {
            return Ok(bundled::table4_measurements());
        }
        ingest::read_measurements(Path::new(query))
    }

    /// Model defaults from a file or the `table2_defaults` fixture.
    pub fn defaults(&self, query: &str) -> Result<Vec<ModelDefaults>> {
        if query == "table2_defaults" && existing_file(query).is_none() {
            return Ok(bundled::table2_defaults());
        }
        ingest::read_defaults(Path::new(query))
    }
}

pub fn read_hardware_file(path: &Path) -> Result<HardwareDb> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    HardwareDb::from_json(&text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })
}
