//! VAE decoder layer schedule and its FLOPs.
//!
//! Each row is one accounted operator with a kernel, channel counts and a
//! rule mapping the video size `(T, H, W)` to the row's output grid.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flops::{ceil_div, product, sum};
use crate::model::VideoJob;
use crate::Flops;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LayerKind {
    Conv3d,
    Attn2d,
}

/// Output temporal size of a decoder row as a function of the frame count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TimeRule {
    #[cfg_attr(feature = "serde", serde(rename = "ceil_T_over_4"))]
    CeilTOver4,
    #[cfg_attr(feature = "serde", serde(rename = "ceil_T_over_2"))]
    CeilTOver2,
    #[cfg_attr(feature = "serde", serde(rename = "full_T"))]
    FullT,
}

impl TimeRule {
    pub fn apply(&self, frames: u32) -> u64 {
        let t = u64::from(frames);
        match self {
            TimeRule::CeilTOver4 => ceil_div(t, 4),
            TimeRule::CeilTOver2 => ceil_div(t, 2),
            TimeRule::FullT => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VaeDecoderLayer {
    pub name: String,
    pub kind: LayerKind,
    /// `(k_t, k_h, k_w)`; absent for attention rows.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub kernel: Option<[u32; 3]>,
    pub c_in: u32,
    pub c_out: u32,
    pub t_rule: TimeRule,
    /// Output height is `ceil(H / h_div)`.
    pub h_div: u32,
    pub w_div: u32,
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub repeat: u32,
}

#[cfg(feature = "serde")]
fn one() -> u32 {
    1
}

impl VaeDecoderLayer {
    pub fn conv(
        name: &str,
        kernel: [u32; 3],
        c_in: u32,
        c_out: u32,
        t_rule: TimeRule,
        div: u32,
    ) -> Self {
        Self {
            name: String::from(name),
            kind: LayerKind::Conv3d,
            kernel: Some(kernel),
            c_in,
            c_out,
            t_rule,
            h_div: div,
            w_div: div,
            repeat: 1,
        }
    }

    pub fn attn(name: &str, channels: u32, t_rule: TimeRule, div: u32) -> Self {
        Self {
            name: String::from(name),
            kind: LayerKind::Attn2d,
            kernel: None,
            c_in: channels,
            c_out: channels,
            t_rule,
            h_div: div,
            w_div: div,
            repeat: 1,
        }
    }

    /// Output grid `(T', H', W')` for a job.
    pub fn output_grid(&self, job: &VideoJob) -> (u64, u64, u64) {
        (
            self.t_rule.apply(job.frames),
            ceil_div(u64::from(job.height_px), u64::from(self.h_div)),
            ceil_div(u64::from(job.width_px), u64::from(self.w_div)),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_in == 0 || self.c_out == 0 || self.h_div == 0 || self.w_div == 0 {
            return Err(Error::InvalidSpec(
                "VAE layer channels and divisors must be positive",
            ));
        }
        if self.repeat == 0 {
            return Err(Error::InvalidSpec("VAE layer repeat must be at least 1"));
        }
        match (self.kind, self.kernel) {
            (LayerKind::Conv3d, Some(k)) if k.iter().all(|&v| v >= 1) => Ok(()),
            (LayerKind::Conv3d, _) => Err(Error::InvalidSpec(
                "conv3d layer needs a kernel with all dims >= 1",
            )),
            (LayerKind::Attn2d, None) => Ok(()),
            (LayerKind::Attn2d, Some(_)) => Err(Error::InvalidSpec("attn2d layer takes no kernel")),
        }
    }
}

/// Grid of the 2D middle attention block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MidGrid {
    pub t_rule: TimeRule,
    pub h_div: u32,
    pub w_div: u32,
}

impl Default for MidGrid {
    fn default() -> Self {
        Self {
            t_rule: TimeRule::CeilTOver4,
            h_div: 8,
            w_div: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VaeDecoderSchedule {
    /// Rows in decoder order. Attention rows are listed for completeness and
    /// skipped by the convolution sum.
    pub layers: Vec<VaeDecoderLayer>,
    /// Channel width of the middle attention block.
    pub mid_channels: u32,
    pub latent_channels: u32,
    #[cfg_attr(feature = "serde", serde(default))]
    pub mid_grid: MidGrid,
}

impl VaeDecoderSchedule {
    /// WAN2.1 decoder: one accounted row per stage, "2x384" channel rows
    /// taken as 768.
    pub fn wan2_1() -> Self {
        use TimeRule::*;
        let z = 16;
        let c = 384;
        Self {
            layers: vec![
                VaeDecoderLayer::conv("D0", [3, 3, 3], z, c, CeilTOver4, 8),
                VaeDecoderLayer::conv("Middle (RBs)", [3, 3, 3], c, c, CeilTOver4, 8),
                VaeDecoderLayer::attn("Middle (attn 2D)", c, CeilTOver4, 8),
                VaeDecoderLayer::conv("D1 (RBs)", [3, 3, 3], c, c, CeilTOver4, 8),
                VaeDecoderLayer::conv("Up (time)", [3, 1, 1], c, 2 * c, CeilTOver2, 8),
                VaeDecoderLayer::conv("Up (space)", [1, 3, 3], c, 192, CeilTOver2, 4),
                VaeDecoderLayer::conv("D2 (RBs)", [3, 3, 3], 192, c, CeilTOver2, 4),
                VaeDecoderLayer::conv("Up (time)", [3, 1, 1], c, 2 * c, FullT, 4),
                VaeDecoderLayer::conv("Up (space)", [1, 3, 3], c, 192, FullT, 2),
                VaeDecoderLayer::conv("D3 (RBs)", [3, 3, 3], 192, 192, FullT, 2),
                VaeDecoderLayer::conv("Up (space)", [1, 3, 3], 192, 96, FullT, 1),
                VaeDecoderLayer::conv("Head", [3, 3, 3], 96, 3, FullT, 1),
            ],
            mid_channels: c,
            latent_channels: z,
            mid_grid: MidGrid::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mid_channels == 0 || self.latent_channels == 0 {
            return Err(Error::InvalidSpec("VAE channel widths must be positive"));
        }
        if self.mid_grid.h_div == 0 || self.mid_grid.w_div == 0 {
            return Err(Error::InvalidSpec(
                "VAE middle grid divisors must be positive",
            ));
        }
        self.layers.iter().try_for_each(VaeDecoderLayer::validate)
    }

    pub fn conv_layers(&self) -> impl Iterator<Item = &VaeDecoderLayer> {
        self.layers.iter().filter(|l| l.kind == LayerKind::Conv3d)
    }
}

/// `repeat * 2 k_t k_h k_w C_in C_out T' H' W'` for a conv row.
pub fn conv3d_flops(layer: &VaeDecoderLayer, job: &VideoJob) -> Result<Flops> {
    let kernel = match (layer.kind, layer.kernel) {
        (LayerKind::Conv3d, Some(k)) => k,
        _ => return Err(Error::NotConvolution(layer.name.clone())),
    };
    layer.validate()?;
    job.validate()?;
    let (t, h, w) = layer.output_grid(job);
    product(&[
        u128::from(layer.repeat),
        2,
        u128::from(kernel[0]),
        u128::from(kernel[1]),
        u128::from(kernel[2]),
        u128::from(layer.c_in),
        u128::from(layer.c_out),
        u128::from(t),
        u128::from(h),
        u128::from(w),
    ])
}

/// 2D self-attention per latent time slice: `T* (8 C*^2 L* + 4 L*^2 C*)`.
pub fn mid_attention_flops(job: &VideoJob, schedule: &VaeDecoderSchedule) -> Result<Flops> {
    job.validate()?;
    let grid = schedule.mid_grid;
    let t = u128::from(grid.t_rule.apply(job.frames));
    let l = u128::from(ceil_div(u64::from(job.height_px), u64::from(grid.h_div)))
        * u128::from(ceil_div(u64::from(job.width_px), u64::from(grid.w_div)));
    let c = u128::from(schedule.mid_channels);
    let per_slice = sum(&[product(&[8, c, c, l])?, product(&[4, l, l, c])?])?;
    product(&[t, per_slice])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VaeDecoderFlops {
    pub conv: Flops,
    pub mid_attn: Flops,
}

/// Convolution and middle-attention FLOPs along the decoder path.
pub fn decoder_flops(job: &VideoJob, schedule: &VaeDecoderSchedule) -> Result<VaeDecoderFlops> {
    schedule.validate()?;
    let conv = schedule
        .conv_layers()
        .map(|layer| conv3d_flops(layer, job))
        .try_fold(0u128, |acc, f| acc.checked_add(f?).ok_or(Error::Overflow))?;
    Ok(VaeDecoderFlops {
        conv,
        mid_attn: mid_attention_flops(job, schedule)?,
    })
}
