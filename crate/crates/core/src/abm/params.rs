use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial model parameters. Lengths in µm; the step in minutes; the CTL
/// characteristic times in hours, as they are usually quoted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbmParams {
    #[serde(rename = "Delta_t")]
    pub dt_min: f64,
    /// Cell radius.
    pub r: f64,
    /// Maximum CTL diffusion scale: per-axis displacement per step is
    /// `sigma · sqrt(Delta_t)`.
    pub sigma_max: f64,
    #[serde(rename = "C_acc")]
    pub c_acc_h: f64,
    #[serde(rename = "C_death")]
    pub c_death_h: f64,
    #[serde(rename = "C_recruit")]
    pub c_recruit_h: f64,
    #[serde(rename = "C_kill")]
    pub c_kill_h: f64,
    /// Radius of the spherical domain.
    #[serde(rename = "R")]
    pub domain_radius: f64,
    /// Thickness of the CTL cloud; `3 · sigma_max · sqrt(Delta_t)` when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Extra centre distance beyond 2r still counted as contact.
    #[serde(default = "default_margin")]
    pub contact_margin: f64,
    /// Placement/move retries before giving up.
    #[serde(default = "default_retries")]
    pub retries: u32,
}

fn default_margin() -> f64 {
    0.5
}

fn default_retries() -> u32 {
    8
}

impl Default for AbmParams {
    fn default() -> Self {
        Self {
            dt_min: 1.0,
            r: 5.0,
            sigma_max: 12.0,
            c_acc_h: 5.0,
            c_death_h: 41.0,
            c_recruit_h: 22.0,
            c_kill_h: 24.0,
            domain_radius: 620.4,
            h: None,
            contact_margin: default_margin(),
            retries: default_retries(),
        }
    }
}

impl AbmParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("Delta_t", self.dt_min),
            ("r", self.r),
            ("sigma_max", self.sigma_max),
            ("C_acc", self.c_acc_h),
            ("C_death", self.c_death_h),
            ("C_recruit", self.c_recruit_h),
            ("C_kill", self.c_kill_h),
            ("R", self.domain_radius),
            ("h", self.cloud_thickness()),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.contact_margin < 0.0 {
            return Err(Error::config("contact_margin must be >= 0"));
        }
        if self.cloud_thickness() >= self.domain_radius {
            return Err(Error::config("h must be smaller than R"));
        }
        if self.domain_radius <= 4.0 * self.r {
            return Err(Error::config("R must exceed a few cell radii"));
        }
        Ok(())
    }

    pub fn cloud_thickness(&self) -> f64 {
        self.h.unwrap_or(3.0 * self.sigma_max * self.dt_min.sqrt())
    }

    pub fn dt_days(&self) -> f64 {
        self.dt_min / 1440.0
    }

    /// Largest admissible centre radius for an agent.
    pub fn max_center_radius(&self) -> f64 {
        self.domain_radius - self.r
    }

    pub fn contact_distance(&self) -> f64 {
        2.0 * self.r + self.contact_margin
    }

    /// Diffusion scale after `clock_min` minutes of acceleration.
    pub fn sigma_at(&self, clock_min: f64) -> f64 {
        self.sigma_max * (clock_min / (self.c_acc_h * 60.0)).min(1.0)
    }

    pub fn p_death(&self) -> f64 {
        crate::rng::per_step_probability(self.dt_min, self.c_death_h * 60.0)
    }

    pub fn p_kill(&self) -> f64 {
        crate::rng::per_step_probability(self.dt_min, self.c_kill_h * 60.0)
    }

    pub fn p_recruit(&self) -> f64 {
        crate::rng::per_step_probability(self.dt_min, self.c_recruit_h * 60.0)
    }

    /// Per-step division probability for an average division time in days.
    pub fn p_division(&self, t_div_days: f64) -> f64 {
        crate::rng::per_step_probability(self.dt_min, t_div_days * 1440.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = AbmParams::default();
        p.validate().unwrap();
        assert_eq!(p.cloud_thickness(), 36.0);
        assert!((p.p_division(1.0) - 6.942e-4).abs() < 1e-7);
        assert!((p.p_kill() - 6.942e-4).abs() < 1e-7);
    }

    #[test]
    fn acceleration_ramp() {
        let p = AbmParams::default();
        assert_eq!(p.sigma_at(0.0), 0.0);
        assert_eq!(p.sigma_at(150.0), 6.0);
        assert_eq!(p.sigma_at(300.0), 12.0);
        assert_eq!(p.sigma_at(10_000.0), 12.0);
    }
}
