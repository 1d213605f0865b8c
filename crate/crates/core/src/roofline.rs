//! Roofline balance, arithmetic intensities and compute-bound thresholds
//! for the DiT attention and MLP blocks.
//!
//! Traffic assumes each tensor moves once between HBM and the compute units.
//! Attention counts only `QK^T` and `PV` (flash-style, projections excluded):
//! `4 l^2 d` FLOPs against `2 l d s` bytes. The MLP is taken as a single GEMM
//! of `f l d^2` FLOPs against `(f d^2 + l d + f l d) s` bytes.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::DiTSpec;

/// Accelerator constants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HardwareSpec {
    pub name: String,
    /// Dense peak throughput, FLOP/s.
    pub theta_peak: f64,
    /// Memory bandwidth, byte/s.
    pub bandwidth: f64,
    /// Sustained board power in watts, when known.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub p_max: Option<f64>,
    /// Bytes per scalar (2 for BF16).
    pub scalar_bytes: u32,
}

impl HardwareSpec {
    /// NVIDIA H100 SXM, dense BF16.
    pub fn h100() -> Self {
        Self {
            name: String::from("h100"),
            theta_peak: 989e12,
            bandwidth: 3.35e12,
            p_max: Some(700.0),
            scalar_bytes: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason| Error::InvalidHardware {
            name: self.name.clone(),
            reason,
        };
        if !(self.theta_peak > 0.0 && self.theta_peak.is_finite()) {
            return Err(invalid("theta_peak must be positive"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(invalid("bandwidth must be positive"));
        }
        if let Some(p) = self.p_max {
            if !(p > 0.0 && p.is_finite()) {
                return Err(invalid("p_max must be positive"));
            }
        }
        if !matches!(self.scalar_bytes, 1 | 2 | 4) {
            return Err(invalid("scalar_bytes must be 1, 2 or 4"));
        }
        Ok(())
    }

    /// Power draw, or an error when the entry carries none.
    pub fn power(&self) -> Result<f64> {
        self.validate()?;
        self.p_max
            .ok_or_else(|| Error::MissingPower(self.name.clone()))
    }
}

/// Hardware balance `theta_peak / bandwidth`, FLOP/byte.
pub fn balance(hw: &HardwareSpec) -> f64 {
    hw.theta_peak / hw.bandwidth
}

/// Attention intensity `2 l / s`.
pub fn attn_intensity(tokens: u64, scalar_bytes: u32) -> f64 {
    2.0 * tokens as f64 / f64::from(scalar_bytes)
}

/// MLP intensity `f l d / ((f d + l (1 + f)) s)`. Saturates at
/// `f d / ((1 + f) s)` as `l` grows.
pub fn mlp_intensity(tokens: u64, spec: &DiTSpec, scalar_bytes: u32) -> f64 {
    let f = spec.mlp_expansion.to_f64();
    let d = f64::from(spec.hidden);
    let l = tokens as f64;
    f * l * d / ((f * d + l * (1.0 + f)) * f64::from(scalar_bytes))
}

/// Balance and thresholds as integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Thresholds {
    /// `beta` rounded to the nearest integer.
    pub beta: u64,
    pub attn: u64,
    pub mlp: u64,
}

/// Compute-bound thresholds `l*_attn = s beta / 2` and `l*_mlp = s beta`.
///
/// `beta` is rounded first and both thresholds derive from the rounded
/// value. The MLP threshold is the weight-dominated approximation; see
/// [`exact_mlp_threshold`] for the exact crossing.
pub fn thresholds(hw: &HardwareSpec) -> Result<Thresholds> {
    hw.validate()?;
    let beta = libm::round(balance(hw)) as u64;
    let s = u64::from(hw.scalar_bytes);
    Ok(Thresholds {
        beta,
        attn: (s * beta).div_ceil(2),
        mlp: s * beta,
    })
}

/// Token length at which `mlp_intensity` equals the exact balance, or
/// `None` when the MLP saturates below the balance and never turns
/// compute-bound.
pub fn exact_mlp_threshold(hw: &HardwareSpec, spec: &DiTSpec) -> Option<f64> {
    let f = spec.mlp_expansion.to_f64();
    let d = f64::from(spec.hidden);
    let sb = f64::from(hw.scalar_bytes) * balance(hw);
    let denom = f * d - sb * (1.0 + f);
    (denom > 0.0).then(|| sb * f * d / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundOperator {
    Attention,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    ComputeBound,
    MemoryBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundClassification {
    pub operator: BoundOperator,
    pub tokens: u64,
    pub intensity: f64,
    pub threshold: u64,
    pub regime: Regime,
}

/// Regime of the attention and MLP blocks at `tokens`.
pub fn classify(
    tokens: u64,
    hw: &HardwareSpec,
    spec: &DiTSpec,
) -> Result<Vec<BoundClassification>> {
    if tokens == 0 {
        return Err(Error::InvalidJob("token length must be at least 1"));
    }
    let th = thresholds(hw)?;
    let s = hw.scalar_bytes;
    let regime = |threshold| {
        if tokens > threshold {
            Regime::ComputeBound
        } else {
            Regime::MemoryBound
        }
    };
    Ok(alloc::vec![
        BoundClassification {
            operator: BoundOperator::Attention,
            tokens,
            intensity: attn_intensity(tokens, s),
            threshold: th.attn,
            regime: regime(th.attn),
        },
        BoundClassification {
            operator: BoundOperator::Mlp,
            tokens,
            intensity: mlp_intensity(tokens, spec, s),
            threshold: th.mlp,
            regime: regime(th.mlp),
        },
    ])
}
