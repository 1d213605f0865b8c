//! Generation requests and architecture hyperparameters.

use alloc::string::String;
use core::fmt;

use crate::error::{Error, Result};
use crate::vae::VaeDecoderSchedule;

/// One video generation request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VideoJob {
    #[cfg_attr(feature = "serde", serde(rename = "height"))]
    pub height_px: u32,
    #[cfg_attr(feature = "serde", serde(rename = "width"))]
    pub width_px: u32,
    pub frames: u32,
    pub steps: u32,
    /// Forward passes per denoising step: 2 with classifier-free guidance.
    #[cfg_attr(feature = "serde", serde(default = "default_cfg_passes"))]
    pub cfg_passes: u32,
}

#[cfg(feature = "serde")]
fn default_cfg_passes() -> u32 {
    2
}

impl VideoJob {
    pub const MIN_SIDE_PX: u32 = 16;

    /// Builds and validates a job.
    pub fn new(
        height_px: u32,
        width_px: u32,
        frames: u32,
        steps: u32,
        cfg_passes: u32,
    ) -> Result<Self> {
        let job = Self {
            height_px,
            width_px,
            frames,
            steps,
            cfg_passes,
        };
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<()> {
        if self.height_px < Self::MIN_SIDE_PX || self.width_px < Self::MIN_SIDE_PX {
            return Err(Error::InvalidJob("height and width must be at least 16 px"));
        }
        if self.frames == 0 {
            return Err(Error::InvalidJob("frames must be at least 1"));
        }
        if self.steps == 0 {
            return Err(Error::InvalidJob("steps must be at least 1"));
        }
        if !matches!(self.cfg_passes, 1 | 2) {
            return Err(Error::InvalidJob("cfg_passes must be 1 or 2"));
        }
        Ok(())
    }

    pub fn with_steps(self, steps: u32) -> Self {
        Self { steps, ..self }
    }

    pub fn with_frames(self, frames: u32) -> Self {
        Self { frames, ..self }
    }

    pub fn with_resolution(self, height_px: u32, width_px: u32) -> Self {
        Self {
            height_px,
            width_px,
            ..self
        }
    }
}

/// Non-negative rational number, used for MLP expansion factors such as 5/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    numer: u64,
    denom: u64,
}

impl Rational {
    /// Largest denominator tried when converting a decimal into a fraction.
    const MAX_DENOM: u64 = 10_000;

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidSpec("rational with zero denominator"));
        }
        let g = gcd(numer, denom);
        Ok(Self {
            numer: numer / g,
            denom: denom / g,
        })
    }

    pub const fn integer(value: u64) -> Self {
        Self {
            numer: value,
            denom: 1,
        }
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// Exact conversion from a decimal such as `2.5`; fails if no fraction
    /// with a small denominator reproduces the value.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidSpec(
                "expansion factor must be a finite non-negative number",
            ));
        }
        for denom in 1..=Self::MAX_DENOM {
            let scaled = value * denom as f64;
            let numer = libm::round(scaled);
            if libm::fabs(scaled - numer) <= 1e-9 * scaled.max(1.0) {
                return Self::new(numer as u64, denom);
            }
        }
        Err(Error::InvalidSpec(
            "expansion factor is not a simple fraction",
        ))
    }

    /// `self * value` if the product is an integer.
    pub fn mul_exact(&self, value: u128) -> Option<u128> {
        let product = value.checked_mul(self.numer as u128)?;
        let denom = self.denom as u128;
        (product % denom == 0).then(|| product / denom)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

impl core::str::FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec("bad rational numerator"))?;
            let d = d
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec("bad rational denominator"))?;
            return Self::new(n, d);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidSpec("bad rational literal"))?;
        Self::from_f64(v)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(feature = "serde")]
mod rational_serde {
    use super::Rational;
    use core::fmt;
    use serde::de::{self, Visitor};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    impl Serialize for Rational {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            if self.denom == 1 {
                serializer.serialize_u64(self.numer)
            } else {
                serializer.serialize_f64(self.to_f64())
            }
        }
    }

    struct RationalVisitor;

    impl Visitor<'_> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a non-negative number or a \"p/q\" string")
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
            Ok(Rational::integer(v))
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
            u64::try_from(v)
                .map(Rational::integer)
                .map_err(|_| E::custom("expansion factor must be non-negative"))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
            Rational::from_f64(v).map_err(E::custom)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
            v.parse().map_err(E::custom)
        }
    }

    impl<'de> Deserialize<'de> for Rational {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            deserializer.deserialize_any(RationalVisitor)
        }
    }
}

/// DiT hyperparameters.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiTSpec {
    /// Transformer blocks (N).
    pub layers: u32,
    /// Hidden width (d).
    pub hidden: u32,
    /// MLP expansion factor (f).
    pub mlp_expansion: Rational,
    /// Text conditioning length (m).
    pub text_tokens: u32,
    /// Hidden width of the timestep embedding MLP.
    pub timestep_hidden: u32,
    pub patch_h: u32,
    pub patch_w: u32,
    /// VAE temporal downsampling factor.
    pub vae_t_down: u32,
    /// VAE spatial downsampling factor.
    pub vae_s_down: u32,
    /// Reserved: cache cross-attention K/V across steps. Only the uncached
    /// accounting is implemented.
    #[cfg_attr(feature = "serde", serde(default))]
    pub cross_kv_cache: bool,
}

impl DiTSpec {
    /// WAN2.1-T2V-1.3B.
    pub fn wan2_1_1_3b() -> Self {
        Self {
            layers: 32,
            hidden: 2048,
            mlp_expansion: Rational::integer(4),
            text_tokens: 512,
            timestep_hidden: 256,
            patch_h: 2,
            patch_w: 2,
            vae_t_down: 4,
            vae_s_down: 8,
            cross_kv_cache: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.layers, "DiT layers must be positive"),
            (self.hidden, "DiT hidden size must be positive"),
            (self.text_tokens, "text token count must be positive"),
            (
                self.timestep_hidden,
                "timestep hidden size must be positive",
            ),
            (self.patch_h, "patch height must be positive"),
            (self.patch_w, "patch width must be positive"),
            (
                self.vae_t_down,
                "VAE temporal downsampling must be positive",
            ),
            (self.vae_s_down, "VAE spatial downsampling must be positive"),
        ];
        for (value, msg) in fields {
            if value == 0 {
                return Err(Error::InvalidSpec(msg));
            }
        }
        if self.mlp_expansion.is_zero() {
            return Err(Error::InvalidSpec("MLP expansion must be positive"));
        }
        if self.cross_kv_cache {
            return Err(Error::Unsupported("cross-attention KV caching"));
        }
        Ok(())
    }
}

/// Text encoder hyperparameters.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TextEncoderSpec {
    pub layers: u32,
    pub hidden: u32,
    pub mlp_expansion: Rational,
    pub tokens: u32,
    /// Encoder calls per video (conditional and unconditional prompt).
    pub passes_per_video: u32,
}

impl TextEncoderSpec {
    /// T5-XXL encoder as used by WAN2.1.
    pub fn wan2_1_t5() -> Self {
        Self {
            layers: 24,
            hidden: 4096,
            mlp_expansion: Rational { numer: 5, denom: 2 },
            tokens: 512,
            passes_per_video: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.hidden == 0 || self.tokens == 0 || self.passes_per_video == 0 {
            return Err(Error::InvalidSpec("text encoder fields must be positive"));
        }
        if self.mlp_expansion.is_zero() {
            return Err(Error::InvalidSpec(
                "text encoder MLP expansion must be positive",
            ));
        }
        Ok(())
    }
}

/// Everything needed to cost a job for one model.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    pub name: String,
    /// CFG passes assumed when a request does not say otherwise.
    pub cfg_passes: u32,
    pub dit: DiTSpec,
    pub text_encoder: TextEncoderSpec,
    pub vae: VaeDecoderSchedule,
}

impl ModelSpec {
    pub const WAN2_1_1_3B: &'static str = "wan2.1-t2v-1.3b";

    pub fn wan2_1_1_3b() -> Self {
        Self {
            name: String::from(Self::WAN2_1_1_3B),
            cfg_passes: 2,
            dit: DiTSpec::wan2_1_1_3b(),
            text_encoder: TextEncoderSpec::wan2_1_t5(),
            vae: VaeDecoderSchedule::wan2_1(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.cfg_passes, 1 | 2) {
            return Err(Error::InvalidSpec("cfg_passes must be 1 or 2"));
        }
        self.dit.validate()?;
        self.text_encoder.validate()?;
        self.vae.validate()
    }

    /// Job at the given geometry using this model's CFG setting.
    pub fn job(&self, height_px: u32, width_px: u32, frames: u32, steps: u32) -> Result<VideoJob> {
        VideoJob::new(height_px, width_px, frames, steps, self.cfg_passes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn job_bounds() {
        assert!(VideoJob::new(16, 16, 1, 1, 1).is_ok());
        assert!(VideoJob::new(15, 16, 1, 1, 1).is_err());
        assert!(VideoJob::new(16, 16, 0, 1, 1).is_err());
        assert_eq!(
            VideoJob::new(720, 1280, 81, 0, 2),
            Err(Error::InvalidJob("steps must be at least 1"))
        );
        assert!(VideoJob::new(720, 1280, 81, 50, 3).is_err());
        assert!(VideoJob::new(720, 1280, 81, 50, 0).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(
            Rational::from_f64(2.5).unwrap(),
            Rational::new(5, 2).unwrap()
        );
        assert_eq!(
            "10/4".parse::<Rational>().unwrap(),
            Rational::new(5, 2).unwrap()
        );
        assert_eq!("4".parse::<Rational>().unwrap(), Rational::integer(4));
        assert!(Rational::new(1, 0).is_err());
        assert!(Rational::from_f64(-1.0).is_err());
        assert!(Rational::from_f64(core::f64::consts::PI).is_err());
    }

    #[test]
    fn rational_mul_exact() {
        let f = Rational::new(5, 2).unwrap();
        assert_eq!(f.mul_exact(4), Some(10));
        assert_eq!(f.mul_exact(3), None);
    }

    #[test]
    fn defaults_are_valid() {
        ModelSpec::wan2_1_1_3b().validate().unwrap();
        let dit = DiTSpec::wan2_1_1_3b();
        assert_eq!(
            (dit.layers, dit.hidden, dit.text_tokens, dit.timestep_hidden),
            (32, 2048, 512, 256)
        );
        assert_eq!(
            (dit.patch_h, dit.patch_w, dit.vae_t_down, dit.vae_s_down),
            (2, 2, 4, 8)
        );
        let t5 = TextEncoderSpec::wan2_1_t5();
        assert_eq!(
            (t5.layers, t5.hidden, t5.tokens, t5.passes_per_video),
            (24, 4096, 512, 2)
        );
        assert_eq!(t5.mlp_expansion.to_f64(), 2.5);
    }

    #[test]
    fn kv_cache_flag_is_reserved() {
        let dit = DiTSpec {
            cross_kv_cache: true,
            ..DiTSpec::wan2_1_1_3b()
        };
        assert!(matches!(dit.validate(), Err(Error::Unsupported(_))));
    }
}
