//! Analytical cost model for text-to-video diffusion inference.
//!
//! Counts FLOPs per operator for a DiT-based latent video pipeline (text
//! encoder, timestep MLP, DiT blocks, VAE decoder), converts them to latency
//! and energy under a compute-bound roofline assumption, and provides the
//! calibration, roofline-threshold and sweep/report machinery built on top.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, bundled data
//! and the command-line front end live in the `t2v-cost` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod calibration;
pub mod cost;
mod error;
pub mod flops;
pub mod model;
pub mod report;
pub mod roofline;
pub mod vae;

pub use calibration::{
    fit_mu, mean_percentage_error, validate, CalibrationResult, MeasurementRecord, PointError,
    ValidationAxis, ValidationReport,
};
pub use cost::{energy, estimate, latency, CostEstimate, Energy};
pub use error::{Error, Result};
pub use flops::{
    cross_attention_flops, latent_grid, mlp_flops, self_attention_flops, text_encoder_flops,
    timestep_flops_per_pass, token_length, total_flops, FlopBreakdown, LatentGrid, Operator,
};
pub use model::{DiTSpec, ModelSpec, Rational, TextEncoderSpec, VideoJob};
pub use report::{
    compare_models, run_sweep, ComparisonReport, ComparisonRow, EnergyRatio, ModelDefaults,
    SweepAxis, SweepPoint, SweepSpec, SweepValue,
};
pub use roofline::{
    attn_intensity, balance, classify, exact_mlp_threshold, mlp_intensity, thresholds,
    BoundClassification, BoundOperator, HardwareSpec, Regime, Thresholds,
};
pub use vae::{
    conv3d_flops, decoder_flops, mid_attention_flops, LayerKind, MidGrid, TimeRule,
    VaeDecoderFlops, VaeDecoderLayer, VaeDecoderSchedule,
};

/// Exact FLOP count. 128 bits keeps every formula exact for token lengths
/// up to 10^8 at the reference model size.
pub type Flops = u128;
