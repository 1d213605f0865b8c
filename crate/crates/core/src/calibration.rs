//! Efficiency calibration against measurements and prediction error metrics.
//!
//! The fit regresses measured latency on `F_total / theta_peak` (the latency
//! at perfect efficiency) by ordinary least squares with an intercept. The
//! slope is `1 / mu`; the intercept is fixed per-video overhead.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::{self, SECONDS_PER_HOUR};
use crate::error::{Error, Result};
use crate::flops::total_flops;
use crate::model::ModelSpec;
use crate::roofline::HardwareSpec;

/// One measured generation, typically a mean over repeated runs.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasurementRecord {
    pub model_id: String,
    #[cfg_attr(feature = "serde", serde(rename = "height"))]
    pub height_px: u32,
    #[cfg_attr(feature = "serde", serde(rename = "width"))]
    pub width_px: u32,
    pub frames: u32,
    pub steps: u32,
    #[cfg_attr(feature = "serde", serde(default))]
    pub latency_s: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub latency_std_s: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub gpu_wh: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub gpu_wh_std: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub cpu_wh: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub ram_wh: Option<f64>,
}

impl MeasurementRecord {
    /// `model_id:HxW:T:S`
    pub fn label(&self) -> String {
        format!(
            "{}:{}x{}:{}:{}",
            self.model_id, self.height_px, self.width_px, self.frames, self.steps
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason| Error::InvalidRecord {
            record: self.label(),
            reason,
        };
        if let Some(l) = self.latency_s {
            if !(l > 0.0 && l.is_finite()) {
                return Err(bad("latency_s must be positive"));
            }
        }
        let non_negative = [
            (self.latency_std_s, "latency_std_s must be non-negative"),
            (self.gpu_wh, "gpu_wh must be non-negative"),
            (self.gpu_wh_std, "gpu_wh_std must be non-negative"),
            (self.cpu_wh, "cpu_wh must be non-negative"),
            (self.ram_wh, "ram_wh must be non-negative"),
        ];
        for (value, reason) in non_negative {
            if matches!(value, Some(v) if !(v >= 0.0 && v.is_finite())) {
                return Err(bad(reason));
            }
        }
        Ok(())
    }

    /// Measured latency, or GPU energy divided by `p_max` when only energy
    /// was recorded.
    pub fn effective_latency(&self, hw: &HardwareSpec) -> Result<f64> {
        self.validate()?;
        match (self.latency_s, self.gpu_wh) {
            (Some(l), _) => Ok(l),
            (None, Some(wh)) if wh > 0.0 => Ok(wh * SECONDS_PER_HOUR / hw.power()?),
            _ => Err(Error::MissingLatency(self.label())),
        }
    }

    /// Predicted FLOPs for this record's geometry under `model`.
    pub fn predicted_flops(&self, model: &ModelSpec) -> Result<crate::Flops> {
        let job = model.job(self.height_px, self.width_px, self.frames, self.steps)?;
        Ok(total_flops(&job, &model.dit, &model.text_encoder, &model.vae)?.total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationResult {
    pub mu: f64,
    /// Fixed overhead per video, seconds.
    pub intercept_s: f64,
    pub r_squared: f64,
}

/// Fits `mu` from at least two records with distinct predicted FLOPs.
pub fn fit_mu(
    records: &[MeasurementRecord],
    model: &ModelSpec,
    hw: &HardwareSpec,
) -> Result<CalibrationResult> {
    if records.len() < 2 {
        return Err(Error::TooFewRecords {
            needed: 2,
            got: records.len(),
        });
    }
    hw.validate()?;
    let points = records
        .iter()
        .map(|r| {
            Ok((
                r.predicted_flops(model)? as f64 / hw.theta_peak,
                r.effective_latency(hw)?,
            ))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept_s = mean_y - slope * mean_x;
    let mu = 1.0 / slope;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::MuOutOfRange { mu });
    }
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept_s + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(CalibrationResult {
        mu,
        intercept_s,
        r_squared,
    })
}

/// Mean absolute percentage error, in percent.
pub fn mean_percentage_error(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    if predicted.len() != measured.len() {
        return Err(Error::LengthMismatch {
            predicted: predicted.len(),
            measured: measured.len(),
        });
    }
    if measured.is_empty() {
        return Err(Error::Empty("no points to compare"));
    }
    let mut total = 0.0;
    for (i, (&p, &m)) in predicted.iter().zip(measured).enumerate() {
        if m.is_nan() || m <= 0.0 {
            return Err(Error::NonPositiveMeasurement(i));
        }
        total += libm::fabs(p - m) / m;
    }
    Ok(100.0 * total / measured.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ValidationAxis {
    Resolution,
    Frames,
    Steps,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointError {
    pub record_id: String,
    pub predicted_latency_s: f64,
    pub latency_pct: f64,
    pub predicted_gpu_wh: f64,
    /// Absent when the record has no GPU energy.
    pub energy_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationReport {
    pub axis: ValidationAxis,
    /// Over the records that carry GPU energy; `None` if none do.
    pub mpe_energy_pct: Option<f64>,
    pub mpe_latency_pct: f64,
    pub per_point_errors: Vec<PointError>,
}

/// Compares predicted latency and GPU energy with each record.
pub fn validate(
    records: &[MeasurementRecord],
    mu: f64,
    model: &ModelSpec,
    hw: &HardwareSpec,
    axis: ValidationAxis,
) -> Result<ValidationReport> {
    if records.is_empty() {
        return Err(Error::Empty("no measurement records"));
    }
    let mut lat_pred = Vec::with_capacity(records.len());
    let mut lat_meas = Vec::with_capacity(records.len());
    let mut wh_pred = Vec::new();
    let mut wh_meas = Vec::new();
    let mut per_point_errors = Vec::with_capacity(records.len());
    for record in records {
        let predicted_latency_s = cost::latency(record.predicted_flops(model)?, hw, mu)?;
        let predicted_gpu_wh = cost::energy(predicted_latency_s, hw)?.watt_hours;
        let measured_latency = record.effective_latency(hw)?;
        let latency_pct = mean_percentage_error(&[predicted_latency_s], &[measured_latency])?;
        let energy_pct = match record.gpu_wh {
            Some(wh) => {
                let pct = mean_percentage_error(&[predicted_gpu_wh], &[wh])?;
                wh_pred.push(predicted_gpu_wh);
                wh_meas.push(wh);
                Some(pct)
            }
            None => None,
        };
        lat_pred.push(predicted_latency_s);
        lat_meas.push(measured_latency);
        per_point_errors.push(PointError {
            record_id: record.label(),
            predicted_latency_s,
            latency_pct,
            predicted_gpu_wh,
            energy_pct,
        });
    }
    let mpe_energy_pct = if wh_meas.is_empty() {
        None
    } else {
        Some(mean_percentage_error(&wh_pred, &wh_meas)?)
    };
    Ok(ValidationReport {
        axis,
        mpe_energy_pct,
        mpe_latency_pct: mean_percentage_error(&lat_pred, &lat_meas)?,
        per_point_errors,
    })
}
