//! FLOPs to latency and energy under the compute-bound model.

use alloc::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::flops::{FlopBreakdown, Operator};
use crate::roofline::HardwareSpec;
use crate::Flops;

pub const SECONDS_PER_HOUR: f64 = 3600.0;

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidMu(mu))
    }
}

/// Seconds to execute `flops` at a sustained `mu * theta_peak`.
pub fn latency(flops: Flops, hw: &HardwareSpec, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    hw.validate()?;
    Ok(flops as f64 / (mu * hw.theta_peak))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Energy {
    pub joules: f64,
    pub watt_hours: f64,
}

/// GPU energy at constant draw `p_max` for `latency_s` seconds.
pub fn energy(latency_s: f64, hw: &HardwareSpec) -> Result<Energy> {
    if latency_s.is_nan() || latency_s < 0.0 {
        return Err(Error::InvalidJob("latency must be non-negative"));
    }
    let p_max = hw.power()?;
    let joules = p_max * latency_s;
    Ok(Energy {
        joules,
        watt_hours: joules / SECONDS_PER_HOUR,
    })
}

/// Breakdown plus derived latency and energy, totals and per operator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostEstimate {
    pub breakdown: FlopBreakdown,
    pub latency_s: f64,
    pub energy_j: f64,
    pub energy_wh: f64,
    pub operator_latency_s: BTreeMap<Operator, f64>,
    pub operator_energy_wh: BTreeMap<Operator, f64>,
}

/// Latency and energy for a breakdown. Per-operator values are prorated
/// by FLOP share.
pub fn estimate(breakdown: FlopBreakdown, hw: &HardwareSpec, mu: f64) -> Result<CostEstimate> {
    let latency_s = latency(breakdown.total, hw, mu)?;
    let Energy { joules, watt_hours } = energy(latency_s, hw)?;
    let total = breakdown.total as f64;
    let mut operator_latency_s = BTreeMap::new();
    let mut operator_energy_wh = BTreeMap::new();
    for (op, flops) in breakdown.iter() {
        let share = if breakdown.total == 0 {
            0.0
        } else {
            flops as f64 / total
        };
        operator_latency_s.insert(op, latency_s * share);
        operator_energy_wh.insert(op, watt_hours * share);
    }
    Ok(CostEstimate {
        breakdown,
        latency_s,
        energy_j: joules,
        energy_wh: watt_hours,
        operator_latency_s,
        operator_energy_wh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiTSpec, TextEncoderSpec, VideoJob};
    use crate::vae::VaeDecoderSchedule;

    fn rel(a: f64, b: f64) -> f64 {
        libm::fabs(a - b) / libm::fabs(b)
    }

    #[test]
    fn latency_examples() {
        let h100 = HardwareSpec::h100();
        assert_eq!(latency(989_000_000_000_000, &h100, 1.0).unwrap(), 1.0);
        let full = latency(1_000_000_000_000_000_000, &h100, 1.0).unwrap();
        let half = latency(1_000_000_000_000_000_000, &h100, 0.5).unwrap();
        assert!(rel(half, 2.0 * full) < 1e-15);
        assert_eq!(latency(1, &h100, 0.0), Err(Error::InvalidMu(0.0)));
        assert_eq!(latency(1, &h100, 1.5), Err(Error::InvalidMu(1.5)));
        assert!(latency(1, &h100, f64::NAN).is_err());
    }

    #[test]
    fn energy_examples() {
        let h100 = HardwareSpec::h100();
        assert_eq!(
            energy(0.0, &h100).unwrap(),
            Energy {
                joules: 0.0,
                watt_hours: 0.0
            }
        );
        let e = energy(410.0, &h100).unwrap();
        assert_eq!(e.joules, 287_000.0);
        assert!(libm::fabs(e.watt_hours - 79.722_222) < 1e-5);
        assert_eq!(energy(3600.0, &h100).unwrap().watt_hours, 700.0);
        assert!(energy(-1.0, &h100).is_err());
    }

    #[test]
    fn missing_power_is_an_error() {
        let hw = HardwareSpec {
            p_max: None,
            ..HardwareSpec::h100()
        };
        assert!(matches!(energy(1.0, &hw), Err(Error::MissingPower(_))));
    }

    #[test]
    fn default_job_estimate() {
        let job = VideoJob::new(720, 1280, 81, 50, 2).unwrap();
        let b = crate::flops::total_flops(
            &job,
            &DiTSpec::wan2_1_1_3b(),
            &TextEncoderSpec::wan2_1_t5(),
            &VaeDecoderSchedule::wan2_1(),
        )
        .unwrap();
        let est = estimate(b, &HardwareSpec::h100(), 0.456).unwrap();
        // oracle: 179407392914538496 / (0.456 * 989e12)
        assert!(rel(est.latency_s, 397.813_210_478_727_6) < 1e-12);
        assert!(rel(est.energy_wh, 77.352_568_704_197) < 1e-12);
        let lat_sum: f64 = est.operator_latency_s.values().sum();
        let wh_sum: f64 = est.operator_energy_wh.values().sum();
        assert!(rel(lat_sum, est.latency_s) < 1e-9);
        assert!(rel(wh_sum, est.energy_wh) < 1e-9);
        assert!(rel(est.energy_wh / est.latency_s, 700.0 / 3600.0) < 1e-15);
        assert_eq!(est.operator_latency_s.len(), 7);
    }
}
