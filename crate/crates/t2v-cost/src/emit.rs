//! Serialisation of reports to CSV, JSON and SVG.
//!
//! Output is deterministic: identical reports give byte-identical output.
//!
//! Sweep CSV columns:
//! `axis_value,tokens,flops_text,flops_vae_conv,flops_vae_attn,flops_self,flops_cross,flops_mlp,flops_timestep,flops_total,latency_s,energy_wh`.
//! Comparison CSV columns:
//! `model_id,latency_s,gpu_wh,cpu_wh,ram_wh,total_wh,gpu_share,cpu_share,ram_share`.

use serde::Serialize;
use t2v_cost_core::{
    CalibrationResult, ComparisonReport, CostEstimate, Operator, SweepAxis, SweepPoint,
    ValidationReport,
};

use crate::hardware::RooflineRow;
use crate::svg;
use crate::{Error, Result};

pub const SWEEP_HEADER: [&str; 12] = [
    "axis_value",
    "tokens",
    "flops_text",
    "flops_vae_conv",
    "flops_vae_attn",
    "flops_self",
    "flops_cross",
    "flops_mlp",
    "flops_timestep",
    "flops_total",
    "latency_s",
    "energy_wh",
];

pub const COMPARISON_HEADER: [&str; 9] = [
    "model_id",
    "latency_s",
    "gpu_wh",
    "cpu_wh",
    "ram_wh",
    "total_wh",
    "gpu_share",
    "cpu_share",
    "ram_share",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Calibration fit together with the validation at the fitted efficiency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSummary {
    pub records: usize,
    pub calibration: CalibrationResult,
    pub validation: ValidationReport,
}

#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Estimate(&'a CostEstimate),
    Sweep {
        axis: SweepAxis,
        points: &'a [SweepPoint],
    },
    Comparison(&'a ComparisonReport),
    Roofline(&'a [RooflineRow]),
    Calibration(&'a CalibrationSummary),
}

impl Report<'_> {
    pub fn kind(&self) -> &'static str {
        match self {
            Report::Estimate(_) => "estimate",
            Report::Sweep { .. } => "sweep",
            Report::Comparison(_) => "comparison",
            Report::Roofline(_) => "roofline",
            Report::Calibration(_) => "calibration",
        }
    }
}

pub fn emit(report: &Report<'_>, format: Format) -> Result<Vec<u8>> {
    match (report, format) {
        (_, Format::Json) => json(report),
        (Report::Estimate(e), Format::Csv) => estimate_csv(e),
        (Report::Sweep { points, .. }, Format::Csv) => sweep_csv(points),
        (Report::Comparison(c), Format::Csv) => comparison_csv(c),
        (Report::Roofline(rows), Format::Csv) => roofline_csv(rows),
        (Report::Calibration(s), Format::Csv) => calibration_csv(s),
        (Report::Sweep { axis, points }, Format::Svg) => {
            Ok(svg::stacked_sweep(*axis, points).into_bytes())
        }
        (Report::Comparison(c), Format::Svg) => Ok(svg::comparison_bars(c).into_bytes()),
        (_, Format::Svg) => Err(Error::UnsupportedFormat {
            report: report.kind(),
            format: format.as_str(),
        }),
    }
}

fn json(report: &Report<'_>) -> Result<Vec<u8>> {
    #[derive(Serialize)]
    struct SweepDoc<'a> {
        axis: SweepAxis,
        points: &'a [SweepPoint],
    }
    let out = match report {
        Report::Estimate(e) => serde_json::to_vec_pretty(e),
        Report::Sweep { axis, points } => serde_json::to_vec_pretty(&SweepDoc {
            axis: *axis,
            points,
        }),
        Report::Comparison(c) => serde_json::to_vec_pretty(c),
        Report::Roofline(rows) => serde_json::to_vec_pretty(rows),
        Report::Calibration(s) => serde_json::to_vec_pretty(s),
    };
    // u128 counts need the byte serializer; `serde_json::Value` stops at u64
    let mut out = out.map_err(|e| Error::Serialize(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    writer
        .into_inner()
        .map_err(|e| Error::Serialize(e.to_string()))
}

fn write_row<I, T>(w: &mut csv::Writer<Vec<u8>>, row: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(row)
        .map_err(|e| Error::Serialize(e.to_string()))
}

fn sweep_csv(points: &[SweepPoint]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(&mut w, SWEEP_HEADER)?;
    for p in points {
        let b = &p.estimate.breakdown;
        write_row(
            &mut w,
            [
                p.value.to_string(),
                p.tokens.to_string(),
                b.text.to_string(),
                b.vae_conv.to_string(),
                b.vae_mid_attn.to_string(),
                b.self_attn.to_string(),
                b.cross_attn.to_string(),
                b.mlp.to_string(),
                b.timestep.to_string(),
                b.total.to_string(),
                p.estimate.latency_s.to_string(),
                p.estimate.energy_wh.to_string(),
            ],
        )?;
    }
    finish(w)
}

fn comparison_csv(report: &ComparisonReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(&mut w, COMPARISON_HEADER)?;
    for r in &report.rows {
        write_row(
            &mut w,
            [
                r.model_id.clone(),
                r.latency_s.to_string(),
                r.gpu_wh.to_string(),
                r.cpu_wh.to_string(),
                r.ram_wh.to_string(),
                r.total_wh.to_string(),
                r.gpu_share.to_string(),
                r.cpu_share.to_string(),
                r.ram_share.to_string(),
            ],
        )?;
    }
    finish(w)
}

fn estimate_csv(e: &CostEstimate) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(&mut w, ["operator", "flops", "latency_s", "energy_wh"])?;
    for op in Operator::ALL {
        write_row(
            &mut w,
            [
                op.as_str().to_string(),
                e.breakdown.get(op).to_string(),
                e.operator_latency_s[&op].to_string(),
                e.operator_energy_wh[&op].to_string(),
            ],
        )?;
    }
    write_row(
        &mut w,
        [
            "total".to_string(),
            e.breakdown.total.to_string(),
            e.latency_s.to_string(),
            e.energy_wh.to_string(),
        ],
    )?;
    finish(w)
}

fn roofline_csv(rows: &[RooflineRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(
        &mut w,
        [
            "name",
            "theta_peak_tflops",
            "bandwidth_tbs",
            "beta",
            "beta_rounded",
            "attn_threshold",
            "mlp_threshold",
            "published_beta",
            "consistent",
        ],
    )?;
    for r in rows {
        write_row(
            &mut w,
            [
                r.label.clone(),
                r.theta_peak_tflops.to_string(),
                r.bandwidth_tbs.to_string(),
                r.beta.to_string(),
                r.thresholds.beta.to_string(),
                r.thresholds.attn.to_string(),
                r.thresholds.mlp.to_string(),
                r.published.map(|p| p.beta.to_string()).unwrap_or_default(),
                r.consistent.map(|c| c.to_string()).unwrap_or_default(),
            ],
        )?;
    }
    finish(w)
}

fn calibration_csv(s: &CalibrationSummary) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(
        &mut w,
        [
            "record_id",
            "predicted_latency_s",
            "latency_pct",
            "predicted_gpu_wh",
            "energy_pct",
        ],
    )?;
    for p in &s.validation.per_point_errors {
        write_row(
            &mut w,
            [
                p.record_id.clone(),
                p.predicted_latency_s.to_string(),
                p.latency_pct.to_string(),
                p.predicted_gpu_wh.to_string(),
                p.energy_pct.map(|v| v.to_string()).unwrap_or_default(),
            ],
        )?;
    }
    finish(w)
}
