//! Scaling sweeps and cross-model comparisons.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::calibration::MeasurementRecord;
use crate::cost::{estimate, CostEstimate};
use crate::error::{Error, Result};
use crate::flops::{token_length, total_flops};
use crate::model::{ModelSpec, VideoJob};
use crate::roofline::HardwareSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SweepAxis {
    Resolution,
    Frames,
    Steps,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Resolution => "resolution",
            SweepAxis::Frames => "frames",
            SweepAxis::Steps => "steps",
        }
    }
}

/// One point on a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum SweepValue {
    Resolution { height: u32, width: u32 },
    Count(u32),
}

impl SweepValue {
    /// Ordering key along the axis; pixel count for resolutions.
    fn key(&self) -> u64 {
        match *self {
            SweepValue::Resolution { height, width } => u64::from(height) * u64::from(width),
            SweepValue::Count(n) => u64::from(n),
        }
    }
}

impl core::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SweepValue::Resolution { height, width } => write!(f, "{height}x{width}"),
            SweepValue::Count(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<SweepValue>,
    /// Supplies the dimensions that are not swept.
    pub fixed: VideoJob,
    pub mu: f64,
    pub hardware: HardwareSpec,
}

impl SweepSpec {
    pub fn steps(
        values: impl IntoIterator<Item = u32>,
        fixed: VideoJob,
        mu: f64,
        hardware: HardwareSpec,
    ) -> Self {
        Self {
            axis: SweepAxis::Steps,
            values: values.into_iter().map(SweepValue::Count).collect(),
            fixed,
            mu,
            hardware,
        }
    }

    pub fn frames(
        values: impl IntoIterator<Item = u32>,
        fixed: VideoJob,
        mu: f64,
        hardware: HardwareSpec,
    ) -> Self {
        Self {
            axis: SweepAxis::Frames,
            values: values.into_iter().map(SweepValue::Count).collect(),
            fixed,
            mu,
            hardware,
        }
    }

    pub fn resolutions(
        values: impl IntoIterator<Item = (u32, u32)>,
        fixed: VideoJob,
        mu: f64,
        hardware: HardwareSpec,
    ) -> Self {
        Self {
            axis: SweepAxis::Resolution,
            values: values
                .into_iter()
                .map(|(height, width)| SweepValue::Resolution { height, width })
                .collect(),
            fixed,
            mu,
            hardware,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Empty("sweep has no values"));
        }
        let kind_ok = self.values.iter().all(|v| {
            matches!(
                (self.axis, v),
                (SweepAxis::Resolution, SweepValue::Resolution { .. })
                    | (SweepAxis::Frames | SweepAxis::Steps, SweepValue::Count(_))
            )
        });
        if !kind_ok {
            return Err(Error::InvalidJob(
                "sweep values do not match the sweep axis",
            ));
        }
        if self.values.windows(2).any(|w| w[0].key() >= w[1].key()) {
            return Err(Error::NonIncreasingSweep);
        }
        Ok(())
    }

    pub fn job_at(&self, value: SweepValue) -> VideoJob {
        match value {
            SweepValue::Resolution { height, width } => self.fixed.with_resolution(height, width),
            SweepValue::Count(n) if self.axis == SweepAxis::Frames => self.fixed.with_frames(n),
            SweepValue::Count(n) => self.fixed.with_steps(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub value: SweepValue,
    pub job: VideoJob,
    pub tokens: u64,
    pub estimate: CostEstimate,
}

/// Evaluates every sweep value independently.
pub fn run_sweep(spec: &SweepSpec, model: &ModelSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    spec.values
        .iter()
        .map(|&value| {
            let job = spec.job_at(value);
            let tokens = token_length(&job, &model.dit)?;
            let breakdown = total_flops(&job, &model.dit, &model.text_encoder, &model.vae)?;
            let estimate = estimate(breakdown, &spec.hardware, spec.mu)?;
            Ok(SweepPoint {
                value,
                job,
                tokens,
                estimate,
            })
        })
        .collect()
}

/// Default generation settings published for a model.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelDefaults {
    pub model_id: String,
    pub steps: u32,
    pub height: u32,
    pub width: u32,
    pub frames: u32,
    pub fps: u32,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRow {
    pub model_id: String,
    pub latency_s: f64,
    pub gpu_wh: f64,
    pub cpu_wh: f64,
    pub ram_wh: f64,
    pub total_wh: f64,
    pub gpu_share: f64,
    pub cpu_share: f64,
    pub ram_share: f64,
}

/// `numerator.total_wh / denominator.total_wh`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyRatio {
    pub numerator: String,
    pub denominator: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    /// Sorted by total energy, largest first.
    pub rows: Vec<ComparisonRow>,
    /// Every pair of rows, larger total over smaller, in row order.
    pub ratios: Vec<EnergyRatio>,
}

impl ComparisonReport {
    /// Most over least energy-hungry model.
    pub fn max_min(&self) -> Option<&EnergyRatio> {
        let (first, last) = (self.rows.first()?, self.rows.last()?);
        self.ratios
            .iter()
            .find(|r| r.numerator == first.model_id && r.denominator == last.model_id)
    }
}

#[derive(Default)]
struct Totals {
    n: f64,
    latency: f64,
    gpu: f64,
    cpu: f64,
    ram: f64,
}

/// Averages measurements per model and ranks models by total energy
/// (GPU + CPU + RAM).
pub fn compare_models(
    defaults: &[ModelDefaults],
    measurements: &[MeasurementRecord],
) -> Result<ComparisonReport> {
    let mut per_model: BTreeMap<&str, Totals> = BTreeMap::new();
    for record in measurements {
        if !defaults.iter().any(|d| d.model_id == record.model_id) {
            return Err(Error::UnmatchedModel(record.model_id.clone()));
        }
        record.validate()?;
        let latency = record
            .latency_s
            .ok_or_else(|| Error::MissingLatency(record.label()))?;
        let gpu = record.gpu_wh.ok_or(Error::InvalidRecord {
            record: record.label(),
            reason: "comparison needs gpu_wh",
        })?;
        let t = per_model.entry(record.model_id.as_str()).or_default();
        t.n += 1.0;
        t.latency += latency;
        t.gpu += gpu;
        t.cpu += record.cpu_wh.unwrap_or(0.0);
        t.ram += record.ram_wh.unwrap_or(0.0);
    }

    let mut rows: Vec<ComparisonRow> = per_model
        .into_iter()
        .map(|(id, t)| {
            let (gpu_wh, cpu_wh, ram_wh) = (t.gpu / t.n, t.cpu / t.n, t.ram / t.n);
            let total_wh = gpu_wh + cpu_wh + ram_wh;
            let share = |v: f64| if total_wh > 0.0 { v / total_wh } else { 0.0 };
            ComparisonRow {
                model_id: String::from(id),
                latency_s: t.latency / t.n,
                gpu_wh,
                cpu_wh,
                ram_wh,
                total_wh,
                gpu_share: share(gpu_wh),
                cpu_share: share(cpu_wh),
                ram_share: share(ram_wh),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.total_wh
            .total_cmp(&a.total_wh)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });

    let mut ratios = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if b.total_wh > 0.0 {
                ratios.push(EnergyRatio {
                    numerator: a.model_id.clone(),
                    denominator: b.model_id.clone(),
                    ratio: a.total_wh / b.total_wh,
                });
            }
        }
    }
    Ok(ComparisonReport { rows, ratios })
}
