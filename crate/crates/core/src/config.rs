//! Experiment configuration, read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::abm::AbmParams;
use crate::error::{Error, Result};
use crate::geometry::ball_volume;
use crate::immune::ImmuneParams;
use crate::morphology::OutcomeRule;
use crate::phenotype::{MutationConfig, PhenotypeId, PhenotypeRegistry};
use crate::therapy::TherapyProtocol;

/// Tumour cells per k/mm³ of concentration in the reference domain.
pub const CELLS_PER_CONCENTRATION_UNIT: f64 = 1000.0;

/// Radius of the reference domain, µm; its volume is about 1 mm³.
pub const REFERENCE_RADIUS: f64 = 620.4;

const UM3_PER_MM3: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialCondition {
    /// One cell at the origin.
    Single {
        #[serde(default = "default_original")]
        phenotype: PhenotypeId,
    },
    /// A close-packed ball of `N` cells centred at the origin.
    Lesion {
        #[serde(rename = "N")]
        n: usize,
        /// Each clone gets at least this share; ignored with `only`.
        #[serde(default)]
        min_fraction: f64,
        /// Make the lesion monoclonal.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        only: Option<PhenotypeId>,
    },
    Empty,
}

fn default_original() -> PhenotypeId {
    PhenotypeId::Original
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Single { phenotype: PhenotypeId::Original }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Days between time-series rows.
    #[serde(default = "default_frame_every")]
    pub frame_every_days: f64,
    /// Days between snapshot files; none when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every_days: Option<f64>,
}

fn default_frame_every() -> f64 {
    0.5
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { frame_every_days: default_frame_every(), snapshot_every_days: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub axes: Vec<SweepAxis>,
    /// Seeds run at every grid point; the config seed when empty.
    #[serde(default)]
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// The immune step at tick k sees the tumour of tick k-1.
    #[default]
    Lagged,
    /// The agent step runs first and the immune step sees its result.
    SameTick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_duration")]
    pub duration_days: f64,
    /// Linear size factor for fast runs: shrinks R, and the lesion and the
    /// population cap by its cube.
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// Runs stop, counted as escape, once the lesion reaches this size
    /// (before scaling).
    #[serde(default = "default_cap")]
    pub population_cap: usize,
    /// Accept parameters outside their published ranges.
    #[serde(default, rename = "unsafe")]
    pub allow_unsafe: bool,
    #[serde(default)]
    pub coupling: Coupling,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default)]
    pub immune: ImmuneParams,
    #[serde(default)]
    pub abm: AbmParams,
    #[serde(default)]
    pub phenotypes: PhenotypeRegistry,
    #[serde(default)]
    pub mutation: MutationConfig,
    #[serde(default)]
    pub protocol: TherapyProtocol,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub outcome: OutcomeRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_seed() -> u64 {
    1
}
fn default_duration() -> f64 {
    150.0
}
fn default_scale() -> f64 {
    1.0
}
fn default_cap() -> usize {
    40_000
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: None,
            seed: default_seed(),
            duration_days: default_duration(),
            scale: default_scale(),
            population_cap: default_cap(),
            allow_unsafe: false,
            coupling: Coupling::default(),
            initial: InitialCondition::default(),
            immune: ImmuneParams::default(),
            abm: AbmParams::default(),
            phenotypes: PhenotypeRegistry::default(),
            mutation: MutationConfig::default(),
            protocol: TherapyProtocol::default(),
            output: OutputConfig::default(),
            outcome: OutcomeRule::default(),
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
            .map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
                other => other,
            })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let strict = !self.allow_unsafe;
        if !(self.duration_days.is_finite() && self.duration_days >= 0.0) {
            return Err(Error::config("duration_days must be finite and >= 0"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0 && self.scale <= 1.0) {
            return Err(Error::config(format!("scale must lie in (0, 1], got {}", self.scale)));
        }
        if self.population_cap == 0 {
            return Err(Error::config("population_cap must be > 0"));
        }
        if !(self.output.frame_every_days.is_finite() && self.output.frame_every_days > 0.0) {
            return Err(Error::config("frame_every_days must be > 0"));
        }
        if let Some(s) = self.output.snapshot_every_days {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::config("snapshot_every_days must be > 0"));
            }
        }
        self.immune.validate()?;
        self.abm.validate()?;
        self.phenotypes.validate()?;
        self.mutation.validate()?;
        self.protocol.validate(strict)?;
        if strict {
            if !(7..=17).contains(&self.immune.m) {
                return Err(Error::config(format!(
                    "m must lie in [7, 17], got {} (set unsafe = true to override)",
                    self.immune.m
                )));
            }
            if self.abm.dt_min > self.immune.rho * 1440.0 {
                return Err(Error::config("Delta_t must not exceed rho"));
            }
        }
        if let InitialCondition::Lesion { min_fraction, only, n } = self.initial {
            if only.is_none() && !(0.0..=1.0 / 6.0).contains(&min_fraction) {
                return Err(Error::config(format!(
                    "min_fraction must lie in [0, 1/6], got {min_fraction}"
                )));
            }
            let room = ball_volume(self.scaled_radius() - self.abm.r);
            let need = n as f64 * self.scale.powi(3) * ball_volume(self.abm.r) / 0.74;
            if need > room {
                return Err(Error::config(format!("a lesion of {n} cells does not fit the domain")));
            }
        }
        if let Some(sweep) = &self.sweep {
            for axis in &sweep.axes {
                if axis.values.is_empty() {
                    return Err(Error::config(format!("sweep axis `{}` has no values", axis.param)));
                }
                let mut probe = self.clone();
                for &v in &axis.values {
                    probe.set_param(&axis.param, v)?;
                }
            }
        }
        Ok(())
    }

    fn scaled_radius(&self) -> f64 {
        self.abm.domain_radius * self.scale
    }

    /// Config with the size factor applied and reset to 1.
    pub fn scaled(&self) -> Self {
        let s = self.scale;
        let s3 = s.powi(3);
        let mut out = self.clone();
        out.abm.domain_radius *= s;
        out.population_cap = ((self.population_cap as f64) * s3).round().max(1.0) as usize;
        if let InitialCondition::Lesion { n, .. } = &mut out.initial {
            *n = ((*n as f64) * s3).round() as usize;
        }
        out.scale = 1.0;
        out
    }

    /// Domain volume in mm³.
    pub fn domain_volume_mm3(&self) -> f64 {
        ball_volume(self.scaled_radius()) / UM3_PER_MM3
    }

    /// Tumour cells per k/mm³ of concentration. The reference domain holds
    /// about 1 mm³; other domain sizes keep the same cell density.
    pub fn cells_per_concentration_unit(&self) -> f64 {
        CELLS_PER_CONCENTRATION_UNIT * (self.scaled_radius() / REFERENCE_RADIUS).powi(3)
    }

    /// Sets a named scalar parameter, as used by sweep axes.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let bad = || Error::config(format!("cannot set `{name}` to {value}"));
        let as_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(bad())
            }
        };
        if let Some((field, clone)) = name.split_once('.') {
            let id: PhenotypeId = clone.parse()?;
            let p = self.phenotypes.lookup_mut(id);
            match field {
                "P_recog" => p.p_recog = value,
                "T_div" => p.t_div = value,
                _ => return Err(Error::config(format!("unknown sweep parameter `{name}`"))),
            }
            return Ok(());
        }
        match name {
            "P_mut" => self.mutation.p_mut = value,
            "alpha" => self.immune.alpha = value,
            "mu" => self.immune.mu = value,
            "duration_days" => self.duration_days = value,
            "C_kill" => self.abm.c_kill_h = value,
            "C_recruit" => self.abm.c_recruit_h = value,
            "C_death" => self.abm.c_death_h = value,
            "C_acc" => self.abm.c_acc_h = value,
            "sigma_max" => self.abm.sigma_max = value,
            "seed" => self.seed = as_count(value)? as u64,
            "N" => match &mut self.initial {
                InitialCondition::Lesion { n, .. } => *n = as_count(value)?,
                _ => return Err(Error::config("`N` needs a lesion initial condition")),
            },
            _ => return Err(Error::config(format!("unknown sweep parameter `{name}`"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::therapy::TherapyEvent;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
        let text = ExperimentConfig::default().to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, ExperimentConfig::default());
    }

    #[test]
    fn unit_bridge() {
        let cfg = ExperimentConfig::default();
        assert!((cfg.domain_volume_mm3() - 1.0).abs() < 1e-3);
        assert_eq!(cfg.cells_per_concentration_unit(), 1000.0);
    }

    #[test]
    fn table_keys_parse() {
        let text = r#"
            seed = 9
            duration_days = 20

            [initial]
            kind = "lesion"
            N = 500
            min_fraction = 0.1

            [immune]
            s_A = 0.0003
            d_0 = 0.03
            alpha = 1e-15

            [abm]
            C_kill = 24
            C_recruit = 22
            R = 620.4

            [mutation]
            P_mut = 0.2
            graph = "all-clones"

            [[phenotypes]]
            id = "original"
            P_recog = 1
            T_div = 7

            [[protocol]]
            type = "chemo"
            start_day = 60
            Ch_time = 10
            Ch_eff = 0.25

            [sweep]
            seeds = [1, 2]
            [[sweep.axes]]
            param = "P_mut"
            values = [0.05, 0.2]
        "#;
        // a partial phenotype table is rejected
        let err = ExperimentConfig::from_toml_str(text).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let fixed = text.replace(
            "[[phenotypes]]\n            id = \"original\"\n            P_recog = 1\n            T_div = 7\n",
            "",
        );
        let cfg = ExperimentConfig::from_toml_str(&fixed).unwrap();
        assert_eq!(cfg.immune.alpha, 1e-15);
        assert_eq!(cfg.mutation.p_mut, 0.2);
        assert_eq!(cfg.protocol.events.len(), 1);
        assert_eq!(cfg.sweep.unwrap().axes[0].values, vec![0.05, 0.2]);
    }

    #[test]
    fn ranges_and_unsafe() {
        let mut cfg = ExperimentConfig::default();
        cfg.protocol = TherapyProtocol::new(vec![TherapyEvent::Chemo {
            start_day: 1.0,
            ch_time: 5.0,
            ch_eff: 0.1,
        }]);
        assert!(cfg.validate().is_err());
        cfg.allow_unsafe = true;
        cfg.validate().unwrap();
        cfg.immune.m = 30;
        cfg.immune.sigma = 1.0 + 29.0 * cfg.immune.rho;
        cfg.validate().unwrap();
        cfg.allow_unsafe = false;
        cfg.protocol = TherapyProtocol::default();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml_str("sead = 3").is_err());
        assert!(ExperimentConfig::from_toml_str("[abm]\nC_kil = 3").is_err());
    }

    #[test]
    fn scaling() {
        let cfg = ExperimentConfig {
            scale: 0.5,
            initial: InitialCondition::Lesion { n: 50_000, min_fraction: 0.1, only: None },
            ..Default::default()
        };
        cfg.validate().unwrap();
        let s = cfg.scaled();
        assert_eq!(s.population_cap, 5000);
        assert_eq!(s.abm.domain_radius, 310.2);
        assert_eq!(s.initial, InitialCondition::Lesion { n: 6250, min_fraction: 0.1, only: None });
        assert!((cfg.cells_per_concentration_unit() - 125.0).abs() < 1e-9);
        assert!((s.cells_per_concentration_unit() - 125.0).abs() < 1e-9);
    }

    #[test]
    fn set_param() {
        let mut cfg = ExperimentConfig::default();
        cfg.set_param("P_recog.c0_1", 0.3).unwrap();
        assert_eq!(cfg.phenotypes.lookup(PhenotypeId::C0_1).p_recog, 0.3);
        cfg.set_param("seed", 12.0).unwrap();
        assert_eq!(cfg.seed, 12);
        assert!(cfg.set_param("seed", 1.5).is_err());
        assert!(cfg.set_param("bogus", 1.0).is_err());
        assert!(cfg.set_param("N", 10.0).is_err());
    }
}
