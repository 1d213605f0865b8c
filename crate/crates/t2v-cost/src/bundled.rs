//! Reference data shipped with the binary.
//!
//! * `wan2.1-t2v-1.3b`: WAN2.1-T2V-1.3B model spec with its VAE decoder schedule.
//! * `table2_defaults`: default generation settings of seven open T2V models.
//! * `table4_measurements`: measured latency and GPU/CPU/RAM energy for those
//!   models at their defaults on one H100.
//! * `table7_hardware`: accelerator peak throughput and bandwidth.

use t2v_cost_core::{MeasurementRecord, ModelDefaults, ModelSpec};

use crate::hardware::HardwareDb;
use crate::ingest;

pub const WAN_SPEC_JSON: &str = include_str!("../data/wan2.1-t2v-1.3b.json");
pub const TABLE2_DEFAULTS_JSON: &str = include_str!("../data/table2_defaults.json");
pub const TABLE4_MEASUREMENTS_CSV: &str = include_str!("../data/table4_measurements.csv");
pub const TABLE7_HARDWARE_JSON: &str = include_str!("../data/table7_hardware.json");

pub const DEFAULT_HARDWARE: &str = "h100";
pub const DEFAULT_MU: f64 = 0.456;

pub const FIXTURES: [&str; 4] = [
    ModelSpec::WAN2_1_1_3B,
    "table2_defaults",
    "table4_measurements",
    "table7_hardware",
];

/// Raw text of a bundled fixture.
pub fn fixture(name: &str) -> Option<&'static str> {
    match name {
        ModelSpec::WAN2_1_1_3B => Some(WAN_SPEC_JSON),
        "table2_defaults" => Some(TABLE2_DEFAULTS_JSON),
        "table4_measurements" => Some(TABLE4_MEASUREMENTS_CSV),
        "table7_hardware" => Some(TABLE7_HARDWARE_JSON),
        _ => None,
    }
}

pub fn wan_model_spec() -> ModelSpec {
    serde_json::from_str(WAN_SPEC_JSON).expect("bundled model spec parses")
}

pub fn hardware_db() -> HardwareDb {
    HardwareDb::from_json(TABLE7_HARDWARE_JSON).expect("bundled hardware table parses")
}

pub fn table2_defaults() -> Vec<ModelDefaults> {
    serde_json::from_str(TABLE2_DEFAULTS_JSON).expect("bundled defaults parse")
}

pub fn table4_measurements() -> Vec<MeasurementRecord> {
    ingest::measurements_from_csv(TABLE4_MEASUREMENTS_CSV.as_bytes(), "table4_measurements")
        .expect("bundled measurements parse")
}
