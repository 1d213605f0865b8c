//! Accelerator database and the roofline table built from it.

use serde::{Deserialize, Serialize};
use t2v_cost_core::{balance, thresholds, HardwareSpec, Thresholds};

use crate::Result;

/// Integer balance and thresholds as printed by the source of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishedRow {
    pub beta: u64,
    pub attn: u64,
    pub mlp: u64,
}

/// One accelerator in a hardware file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareEntry {
    pub name: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub theta_peak: f64,
    pub bandwidth: f64,
    #[serde(default)]
    pub p_max: Option<f64>,
    pub scalar_bytes: u32,
    #[serde(default)]
    pub published: Option<PublishedRow>,
}

impl HardwareEntry {
    pub fn spec(&self) -> HardwareSpec {
        HardwareSpec {
            name: self.name.clone(),
            theta_peak: self.theta_peak,
            bandwidth: self.bandwidth,
            p_max: self.p_max,
            scalar_bytes: self.scalar_bytes,
        }
    }

    pub fn matches(&self, query: &str) -> bool {
        let q = query.trim();
        self.name.eq_ignore_ascii_case(q)
            || self.aliases.iter().any(|a| a.eq_ignore_ascii_case(q))
            || self
                .label
                .as_deref()
                .is_some_and(|l| l.eq_ignore_ascii_case(q))
    }

    pub fn display_name(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HardwareDb {
    pub entries: Vec<HardwareEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HardwareFile {
    Many(Vec<HardwareEntry>),
    One(HardwareEntry),
}

impl HardwareDb {
    /// Parses either a list of entries or a single entry.
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        let entries = match serde_json::from_str(text)? {
            HardwareFile::Many(v) => v,
            HardwareFile::One(e) => vec![e],
        };
        Ok(Self { entries })
    }

    pub fn find(&self, query: &str) -> Option<&HardwareEntry> {
        self.entries.iter().find(|e| e.matches(query))
    }

    pub fn roofline_table(&self) -> Result<Vec<RooflineRow>> {
        self.entries.iter().map(RooflineRow::new).collect()
    }
}

/// Computed balance and thresholds for an entry, next to the published row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RooflineRow {
    pub name: String,
    pub label: String,
    pub theta_peak_tflops: f64,
    pub bandwidth_tbs: f64,
    pub beta: f64,
    pub thresholds: Thresholds,
    pub published: Option<PublishedRow>,
    /// `Some(false)` when the published integers disagree with the computed
    /// ones.
    pub consistent: Option<bool>,
}

impl RooflineRow {
    pub fn new(entry: &HardwareEntry) -> Result<Self> {
        let spec = entry.spec();
        let th = thresholds(&spec)?;
        let consistent = entry.published.map(|p| {
            p == PublishedRow {
                beta: th.beta,
                attn: th.attn,
                mlp: th.mlp,
            }
        });
        Ok(Self {
            name: entry.name.clone(),
            label: entry.display_name().to_string(),
            theta_peak_tflops: spec.theta_peak / 1e12,
            bandwidth_tbs: spec.bandwidth / 1e12,
            beta: balance(&spec),
            thresholds: th,
            published: entry.published,
            consistent,
        })
    }
}
