//! `t2v-cost` command line.
//!
//! Data goes to stdout or `--out`; diagnostics go to stderr.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use t2v_cost_core::{
    classify, compare_models, estimate, fit_mu, run_sweep, total_flops, validate, ComparisonReport,
    CostEstimate, ModelSpec, Operator, SweepAxis, SweepPoint, SweepSpec, ValidationAxis, VideoJob,
};

use crate::bundled::DEFAULT_MU;
use crate::config::{SpecSources, SPEC_DIR_ENV};
use crate::emit::{self, CalibrationSummary, Format, Report};
use crate::hardware::RooflineRow;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "t2v-cost",
    version,
    about = "FLOP, latency and energy cost model for text-to-video diffusion inference"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Model spec: a JSON file or a name resolved in the spec directory.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Hardware name (h100, a100, ...) or a single-entry JSON file.
    #[arg(long, global = true)]
    pub hardware: Option<String>,
    /// Achieved fraction of peak throughput, in (0, 1].
    #[arg(long, global = true, value_parser = parse_mu)]
    pub mu: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory searched for `<model>.json` and `hardware.json`.
    #[arg(long, global = true, env = SPEC_DIR_ENV)]
    pub spec_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    #[arg(long, default_value_t = 720, value_parser = clap::value_parser!(u32).range(16..))]
    pub height: u32,
    #[arg(long, default_value_t = 1280, value_parser = clap::value_parser!(u32).range(16..))]
    pub width: u32,
    #[arg(long, default_value_t = 81, value_parser = clap::value_parser!(u32).range(1..))]
    pub frames: u32,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
    /// Denoiser passes per step; defaults to the model's value.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub cfg_passes: Option<u32>,
}

impl JobArgs {
    fn job(&self, model: &ModelSpec) -> Result<VideoJob> {
        let g = self.cfg_passes.unwrap_or(model.cfg_passes);
        Ok(VideoJob::new(
            self.height,
            self.width,
            self.frames,
            self.steps,
            g,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Resolution,
    Frames,
    Steps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValidationAxisArg {
    Resolution,
    Frames,
    Steps,
    Custom,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// FLOP breakdown, latency and energy of one job.
    Estimate(JobArgs),
    /// Evaluate a job along one axis.
    Sweep {
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, required_unless_present = "resolutions", value_parser = clap::value_parser!(u32).range(1..))]
        from: Option<u32>,
        #[arg(long, required_unless_present = "resolutions", value_parser = clap::value_parser!(u32).range(1..))]
        to: Option<u32>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        step: u32,
        /// Comma-separated `HxW` list for the resolution axis.
        #[arg(long, value_delimiter = ',', value_parser = parse_resolution)]
        resolutions: Option<Vec<(u32, u32)>>,
        #[command(flatten)]
        fixed: JobArgs,
    },
    /// Balance and compute-bound thresholds of accelerators.
    Roofline {
        /// Classify attention and MLP at this token length.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        tokens: Option<u64>,
    },
    /// Fit the efficiency factor to measured latencies.
    Calibrate {
        /// CSV or JSON measurement file.
        #[arg(long)]
        measurements: String,
        #[arg(long, value_enum, default_value = "custom")]
        axis: ValidationAxisArg,
    },
    /// Rank models by measured energy per video.
    Compare {
        /// Measurement file, or `table4_measurements` for the bundled one.
        #[arg(long)]
        measurements: String,
        /// Defaults file, or `table2_defaults` for the bundled one.
        #[arg(long, default_value = "table2_defaults")]
        defaults: String,
    },
}

fn parse_mu(s: &str) -> std::result::Result<f64, String> {
    let mu: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if mu > 0.0 && mu <= 1.0 {
        Ok(mu)
    } else {
        Err(format!("{mu} is outside (0, 1]"))
    }
}

fn parse_resolution(s: &str) -> std::result::Result<(u32, u32), String> {
    let (h, w) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("`{s}`: {e}"));
    Ok((parse(h)?, parse(w)?))
}

/// Runs a parsed command and returns the bytes to write.
pub fn run(cli: &Cli) -> Result<Vec<u8>> {
    let g = &cli.global;
    let sources = SpecSources::new(g.spec_dir.clone());
    let mu = g.mu.unwrap_or(DEFAULT_MU);
    match &cli.command {
        Command::Estimate(args) => {
            let model = sources.model(g.model.as_deref())?;
            let hw = sources.hardware(g.hardware.as_deref())?;
            let job = args.job(&model)?;
            let breakdown = total_flops(&job, &model.dit, &model.text_encoder, &model.vae)?;
            let est = estimate(breakdown, &hw, mu)?;
            match g.format.unwrap_or(OutputFormat::Table) {
                OutputFormat::Table => {
                    Ok(estimate_table(&model, &hw.name, mu, &job, &est).into_bytes())
                }
                f => emit::emit(&Report::Estimate(&est), data_format(f)),
            }
        }
        Command::Sweep {
            axis,
            from,
            to,
            step,
            resolutions,
            fixed,
        } => {
            let model = sources.model(g.model.as_deref())?;
            let hw = sources.hardware(g.hardware.as_deref())?;
            let job = fixed.job(&model)?;
            let counts = || -> Result<Vec<u32>> {
                match (from, to) {
                    (Some(a), Some(b)) if a <= b => Ok((*a..=*b).step_by(*step as usize).collect()),
                    (Some(_), Some(_)) => Err(Error::Usage("--from must not exceed --to".into())),
                    _ => Err(Error::Usage(
                        "--from and --to are required for this axis".into(),
                    )),
                }
            };
            let spec = match axis {
                AxisArg::Steps => SweepSpec::steps(counts()?, job, mu, hw),
                AxisArg::Frames => SweepSpec::frames(counts()?, job, mu, hw),
                AxisArg::Resolution => {
                    let list = resolutions.clone().ok_or_else(|| {
                        Error::Usage("--resolutions is required for --axis resolution".into())
                    })?;
                    SweepSpec::resolutions(list, job, mu, hw)
                }
            };
            let points = run_sweep(&spec, &model)?;
            match g.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Table => Ok(sweep_table(spec.axis, &points).into_bytes()),
                f => emit::emit(
                    &Report::Sweep {
                        axis: spec.axis,
                        points: &points,
                    },
                    data_format(f),
                ),
            }
        }
        Command::Roofline { tokens } => {
            let rows = match g.hardware.as_deref() {
                Some(q) => vec![RooflineRow::new(&sources.hardware_entry(Some(q))?)?],
                None => sources.hardware_db()?.roofline_table()?,
            };
            let format = g.format.unwrap_or(OutputFormat::Table);
            if tokens.is_none() && format != OutputFormat::Table {
                return emit::emit(&Report::Roofline(&rows), data_format(format));
            }
            let mut out = roofline_table(&rows);
            if let Some(l) = tokens {
                let model = sources.model(g.model.as_deref())?;
                let hw = sources.hardware(g.hardware.as_deref())?;
                out.push('\n');
                for c in classify(*l, &hw, &model.dit)? {
                    let _ = writeln!(
                        out,
                        "{:<9} at {} tokens: intensity {:.1} FLOP/B, threshold {}, {}",
                        format!("{:?}", c.operator).to_lowercase(),
                        c.tokens,
                        c.intensity,
                        c.threshold,
                        match c.regime {
                            t2v_cost_core::Regime::ComputeBound => "compute-bound",
                            t2v_cost_core::Regime::MemoryBound => "memory-bound",
                        }
                    );
                }
            }
            Ok(out.into_bytes())
        }
        Command::Calibrate { measurements, axis } => {
            let model = sources.model(g.model.as_deref())?;
            let hw = sources.hardware(g.hardware.as_deref())?;
            let records = sources.measurements(measurements)?;
            let calibration = fit_mu(&records, &model, &hw)?;
            let axis = match axis {
                ValidationAxisArg::Resolution => ValidationAxis::Resolution,
                ValidationAxisArg::Frames => ValidationAxis::Frames,
                ValidationAxisArg::Steps => ValidationAxis::Steps,
                ValidationAxisArg::Custom => ValidationAxis::Custom,
            };
            let validation = validate(&records, calibration.mu, &model, &hw, axis)?;
            let summary = CalibrationSummary {
                records: records.len(),
                calibration,
                validation,
            };
            match g.format.unwrap_or(OutputFormat::Table) {
                OutputFormat::Table => Ok(calibration_table(&summary).into_bytes()),
                f => emit::emit(&Report::Calibration(&summary), data_format(f)),
            }
        }
        Command::Compare {
            measurements,
            defaults,
        } => {
            let defaults = sources.defaults(defaults)?;
            let records = sources.measurements(measurements)?;
            let report = compare_models(&defaults, &records)?;
            match g.format.unwrap_or(OutputFormat::Table) {
                OutputFormat::Table => Ok(comparison_table(&report).into_bytes()),
                f => emit::emit(&Report::Comparison(&report), data_format(f)),
            }
        }
    }
}

fn data_format(f: OutputFormat) -> Format {
    match f {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
        OutputFormat::Svg | OutputFormat::Table => Format::Svg,
    }
}

/// Writes `bytes` to `--out` or stdout.
pub fn write_output(cli: &Cli, bytes: &[u8]) -> Result<()> {
    match &cli.global.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn estimate_table(
    model: &ModelSpec,
    hardware: &str,
    mu: f64,
    job: &VideoJob,
    e: &CostEstimate,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} on {hardware}, mu = {mu}: {}x{}, {} frames, {} steps, {} passes/step",
        model.name, job.height_px, job.width_px, job.frames, job.steps, job.cfg_passes
    );
    let _ = writeln!(
        out,
        "{:<14} {:>28} {:>8} {:>12} {:>12}",
        "operator", "flops", "share", "latency_s", "energy_wh"
    );
    let total = e.breakdown.total as f64;
    for op in Operator::ALL {
        let flops = e.breakdown.get(op);
        let _ = writeln!(
            out,
            "{:<14} {:>28} {:>7.3}% {:>12.4} {:>12.5}",
            op.as_str(),
            flops,
            if total > 0.0 {
                100.0 * flops as f64 / total
            } else {
                0.0
            },
            e.operator_latency_s[&op],
            e.operator_energy_wh[&op]
        );
    }
    let _ = writeln!(
        out,
        "{:<14} {:>28} {:>7.3}% {:>12.4} {:>12.5}",
        "total", e.breakdown.total, 100.0, e.latency_s, e.energy_wh
    );
    let _ = writeln!(out, "latency: {:.2} s", e.latency_s);
    let _ = writeln!(out, "energy:  {:.2} Wh ({:.0} J)", e.energy_wh, e.energy_j);
    out
}

fn sweep_table(axis: SweepAxis, points: &[SweepPoint]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>11} {:>9} {:>28} {:>12} {:>12}",
        axis.as_str(),
        "tokens",
        "flops",
        "latency_s",
        "energy_wh"
    );
    for p in points {
        let _ = writeln!(
            out,
            "{:>11} {:>9} {:>28} {:>12.4} {:>12.5}",
            p.value.to_string(),
            p.tokens,
            p.estimate.breakdown.total,
            p.estimate.latency_s,
            p.estimate.energy_wh
        );
    }
    out
}

fn roofline_table(rows: &[RooflineRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<28} {:>10} {:>8} {:>9} {:>6} {:>7} {:>7}",
        "hardware", "TFLOP/s", "TB/s", "beta", "round", "attn", "mlp"
    );
    let mut flagged = Vec::new();
    for r in rows {
        let mark = if r.consistent == Some(false) {
            " *"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "{:<28} {:>10} {:>8} {:>9.2} {:>6} {:>7} {:>7}{mark}",
            r.label,
            r.theta_peak_tflops,
            r.bandwidth_tbs,
            r.beta,
            r.thresholds.beta,
            r.thresholds.attn,
            r.thresholds.mlp
        );
        if let (Some(false), Some(p)) = (r.consistent, r.published) {
            flagged.push(format!(
                "* {}: published beta={}, attn={}, mlp={} disagree with the computed row",
                r.label, p.beta, p.attn, p.mlp
            ));
        }
    }
    if rows.len() == 1 {
        let r = &rows[0];
        let _ = writeln!(
            out,
            "{}: beta={}, l*={}/{}",
            r.name, r.thresholds.beta, r.thresholds.attn, r.thresholds.mlp
        );
    }
    for line in flagged {
        let _ = writeln!(out, "{line}");
    }
    out
}

fn calibration_table(s: &CalibrationSummary) -> String {
    let mut out = String::new();
    let c = &s.calibration;
    let _ = writeln!(out, "records:     {}", s.records);
    let _ = writeln!(out, "mu:          {}", fmt_sig(c.mu));
    let _ = writeln!(out, "intercept_s: {}", fmt_sig(c.intercept_s));
    let _ = writeln!(out, "r_squared:   {}", fmt_sig(c.r_squared));
    let _ = writeln!(out, "mpe_latency: {:.3}%", s.validation.mpe_latency_pct);
    if let Some(e) = s.validation.mpe_energy_pct {
        let _ = writeln!(out, "mpe_energy:  {e:.3}%");
    }
    for p in &s.validation.per_point_errors {
        let _ = write!(
            out,
            "  {:<32} predicted {:>10.3} s ({:.2}%)",
            p.record_id, p.predicted_latency_s, p.latency_pct
        );
        if let Some(e) = p.energy_pct {
            let _ = write!(out, ", {:.4} Wh ({e:.2}%)", p.predicted_gpu_wh);
        }
        out.push('\n');
    }
    out
}

/// Shortest decimal with at most 9 significant digits.
fn fmt_sig(v: f64) -> String {
    let s = format!("{v:.9e}");
    let v: f64 = s.parse().unwrap_or(v);
    v.to_string()
}

fn comparison_table(c: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:>10} {:>10} {:>9} {:>9} {:>10} {:>7}",
        "model", "latency_s", "gpu_wh", "cpu_wh", "ram_wh", "total_wh", "gpu%"
    );
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{:<18} {:>10} {:>10} {:>9} {:>9} {:>10} {:>6.1}%",
            r.model_id,
            r.latency_s,
            r.gpu_wh,
            r.cpu_wh,
            r.ram_wh,
            fmt_sig(r.total_wh),
            100.0 * r.gpu_share
        );
    }
    if let Some(r) = c.max_min() {
        let _ = writeln!(
            out,
            "{} / {} \u{2248}{:.0}\u{d7}",
            r.numerator, r.denominator, r.ratio
        );
    }
    out
}
