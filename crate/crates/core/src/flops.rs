//! Per-operator FLOP formulas.
//!
//! One multiply-add counts as two FLOPs. Bias, normalisation and softmax
//! costs are lower order and not counted. All counts are exact integers.

use core::fmt;

use crate::error::{Error, Result};
use crate::model::{DiTSpec, TextEncoderSpec, VideoJob};
use crate::vae::{self, VaeDecoderSchedule};
use crate::Flops;

/// Cost-model operators, in stacking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Operator {
    Text,
    VaeConv,
    VaeMidAttn,
    SelfAttn,
    CrossAttn,
    Mlp,
    Timestep,
}

impl Operator {
    pub const ALL: [Operator; 7] = [
        Operator::Text,
        Operator::VaeConv,
        Operator::VaeMidAttn,
        Operator::SelfAttn,
        Operator::CrossAttn,
        Operator::Mlp,
        Operator::Timestep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Operator::Text => "text",
            Operator::VaeConv => "vae_conv",
            Operator::VaeMidAttn => "vae_mid_attn",
            Operator::SelfAttn => "self_attn",
            Operator::CrossAttn => "cross_attn",
            Operator::Mlp => "mlp",
            Operator::Timestep => "timestep",
        }
    }

    /// True for operators run `g * S` times per video.
    pub fn is_per_step(&self) -> bool {
        matches!(
            self,
            Operator::SelfAttn | Operator::CrossAttn | Operator::Mlp | Operator::Timestep
        )
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// FLOPs per operator for a whole video. Per-step terms already include the
/// `g * S` multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlopBreakdown {
    pub text: Flops,
    pub vae_conv: Flops,
    pub vae_mid_attn: Flops,
    pub self_attn: Flops,
    pub cross_attn: Flops,
    pub mlp: Flops,
    pub timestep: Flops,
    pub total: Flops,
}

impl FlopBreakdown {
    pub fn get(&self, op: Operator) -> Flops {
        match op {
            Operator::Text => self.text,
            Operator::VaeConv => self.vae_conv,
            Operator::VaeMidAttn => self.vae_mid_attn,
            Operator::SelfAttn => self.self_attn,
            Operator::CrossAttn => self.cross_attn,
            Operator::Mlp => self.mlp,
            Operator::Timestep => self.timestep,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Operator, Flops)> + '_ {
        Operator::ALL.into_iter().map(move |op| (op, self.get(op)))
    }

    /// DiT share of the video: self, cross, MLP and timestep.
    pub fn dit(&self) -> Flops {
        self.self_attn + self.cross_attn + self.mlp + self.timestep
    }

    /// Sum of the components; equals `total` for breakdowns built here.
    pub fn component_sum(&self) -> Flops {
        self.iter().map(|(_, v)| v).sum()
    }
}

/// Latent grid the DiT sees: latent frames and patch rows/columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatentGrid {
    pub latent_t: u64,
    pub tokens_h: u64,
    pub tokens_w: u64,
}

impl LatentGrid {
    pub fn tokens(&self) -> u64 {
        self.latent_t * self.tokens_h * self.tokens_w
    }
}

pub(crate) fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Checked product of exact factors.
pub(crate) fn product(factors: &[u128]) -> Result<Flops> {
    factors
        .iter()
        .try_fold(1u128, |acc, &f| acc.checked_mul(f))
        .ok_or(Error::Overflow)
}

pub(crate) fn sum(terms: &[Flops]) -> Result<Flops> {
    terms
        .iter()
        .try_fold(0u128, |acc, &t| acc.checked_add(t))
        .ok_or(Error::Overflow)
}

/// Latent grid for a job. Non-divisible sizes round up; the causal first
/// frame gives `1 + ceil((T - 1) / v_t)` latent frames.
pub fn latent_grid(job: &VideoJob, spec: &DiTSpec) -> Result<LatentGrid> {
    job.validate()?;
    spec.validate()?;
    let frames = u64::from(job.frames);
    let latent_t = 1 + ceil_div(frames - 1, u64::from(spec.vae_t_down));
    let tokens_h = ceil_div(
        u64::from(job.height_px),
        u64::from(spec.vae_s_down) * u64::from(spec.patch_h),
    );
    let tokens_w = ceil_div(
        u64::from(job.width_px),
        u64::from(spec.vae_s_down) * u64::from(spec.patch_w),
    );
    Ok(LatentGrid {
        latent_t,
        tokens_h,
        tokens_w,
    })
}

/// DiT sequence length.
pub fn token_length(job: &VideoJob, spec: &DiTSpec) -> Result<u64> {
    Ok(latent_grid(job, spec)?.tokens())
}

fn check_tokens(tokens: u64) -> Result<u128> {
    if tokens == 0 {
        return Err(Error::InvalidJob("token length must be at least 1"));
    }
    Ok(u128::from(tokens))
}

/// Self-attention over all layers: `N (8 l d^2 + 4 l^2 d)`.
pub fn self_attention_flops(tokens: u64, spec: &DiTSpec) -> Result<Flops> {
    let l = check_tokens(tokens)?;
    let n = u128::from(spec.layers);
    let d = u128::from(spec.hidden);
    let projections = product(&[8, l, d, d])?;
    let scores = product(&[4, l, l, d])?;
    product(&[n, sum(&[projections, scores])?])
}

/// Video-to-text cross-attention over all layers with K/V recomputed each
/// pass: `N (4 l d^2 + 4 m d^2 + 4 l m d)`.
pub fn cross_attention_flops(tokens: u64, spec: &DiTSpec) -> Result<Flops> {
    let l = check_tokens(tokens)?;
    if spec.cross_kv_cache {
        return Err(Error::Unsupported("cross-attention KV caching"));
    }
    let n = u128::from(spec.layers);
    let d = u128::from(spec.hidden);
    let m = u128::from(spec.text_tokens);
    let q_out = product(&[4, l, d, d])?;
    let kv = product(&[4, m, d, d])?;
    let scores = product(&[4, l, m, d])?;
    product(&[n, sum(&[q_out, kv, scores])?])
}

/// Two-layer MLP over all layers: `N * 4 f l d^2`.
pub fn mlp_flops(tokens: u64, spec: &DiTSpec) -> Result<Flops> {
    let l = check_tokens(tokens)?;
    let base = product(&[
        4,
        u128::from(spec.layers),
        l,
        u128::from(spec.hidden),
        u128::from(spec.hidden),
    ])?;
    spec.mlp_expansion
        .mul_exact(base)
        .ok_or(Error::NonIntegralFlops("DiT MLP"))
}

/// Timestep embedding MLP for one forward pass: `2 d_tau d + 14 d^2`.
pub fn timestep_flops_per_pass(spec: &DiTSpec) -> Result<Flops> {
    if spec.timestep_hidden == 0 || spec.hidden == 0 {
        return Err(Error::InvalidSpec("timestep MLP widths must be positive"));
    }
    let d = u128::from(spec.hidden);
    sum(&[
        product(&[2, u128::from(spec.timestep_hidden), d])?,
        product(&[14, d, d])?,
    ])
}

/// Text encoder cost per video:
/// `p L (8 m d^2 + 4 m^2 d + 4 f m d^2)`.
pub fn text_encoder_flops(tspec: &TextEncoderSpec) -> Result<Flops> {
    tspec.validate()?;
    let d = u128::from(tspec.hidden);
    let m = u128::from(tspec.tokens);
    let attn = sum(&[product(&[8, m, d, d])?, product(&[4, m, m, d])?])?;
    let ffn = tspec
        .mlp_expansion
        .mul_exact(product(&[4, m, d, d])?)
        .ok_or(Error::NonIntegralFlops("text encoder FFN"))?;
    product(&[
        u128::from(tspec.passes_per_video),
        u128::from(tspec.layers),
        sum(&[attn, ffn])?,
    ])
}

/// FLOPs for a whole video.
pub fn total_flops(
    job: &VideoJob,
    spec: &DiTSpec,
    tspec: &TextEncoderSpec,
    vae: &VaeDecoderSchedule,
) -> Result<FlopBreakdown> {
    let tokens = token_length(job, spec)?;
    let passes = u128::from(job.cfg_passes) * u128::from(job.steps);

    let text = text_encoder_flops(tspec)?;
    let decoder = vae::decoder_flops(job, vae)?;
    let self_attn = product(&[passes, self_attention_flops(tokens, spec)?])?;
    let cross_attn = product(&[passes, cross_attention_flops(tokens, spec)?])?;
    let mlp = product(&[passes, mlp_flops(tokens, spec)?])?;
    let timestep = product(&[passes, timestep_flops_per_pass(spec)?])?;

    let total = sum(&[
        text,
        decoder.conv,
        decoder.mid_attn,
        self_attn,
        cross_attn,
        mlp,
        timestep,
    ])?;
    Ok(FlopBreakdown {
        text,
        vae_conv: decoder.conv,
        vae_mid_attn: decoder.mid_attn,
        self_attn,
        cross_attn,
        mlp,
        timestep,
        total,
    })
}
