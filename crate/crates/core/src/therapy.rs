//! Timed therapies: cytotoxic chemotherapy, CTL boost and radiotherapy as a
//! recognition restore.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abm::{AgentId, World};
use crate::error::{Error, Result};
use crate::immune::ImmuneParams;
use crate::phenotype::{chemo_kill_time, PhenotypeRegistry, CH_EFF_RANGE, NUM_PHENOTYPES};
use crate::rng::{chance, world_stream, WorldStream};

pub const CH_TIME_RANGE: (f64, f64) = (10.0, 50.0);
pub const BO_TIME_RANGE: (f64, f64) = (1.0, 10.0);
pub const BO_EFF_RANGE: (f64, f64) = (500.0, 1000.0);

/// Antigenicity of an immune-suppressed host.
pub const SUPPRESSED_ALPHA: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum TherapyEvent {
    Chemo {
        start_day: f64,
        #[serde(rename = "Ch_time")]
        ch_time: f64,
        #[serde(rename = "Ch_eff")]
        ch_eff: f64,
    },
    Boost {
        start_day: f64,
        #[serde(rename = "Bo_time", default = "default_bo_time")]
        bo_time: f64,
        #[serde(rename = "Bo_eff")]
        bo_eff: f64,
    },
    Radio {
        day: f64,
        #[serde(default = "default_restore")]
        restore_level: f64,
        /// Days the restore lasts; permanent when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        duration: Option<f64>,
        /// Factor applied to alpha while the restore is active.
        #[serde(default = "default_alpha_multiplier")]
        alpha_multiplier: f64,
    },
}

fn default_bo_time() -> f64 {
    3.0
}

fn default_restore() -> f64 {
    1.0
}

fn default_alpha_multiplier() -> f64 {
    1.0
}

impl TherapyEvent {
    pub fn start_day(&self) -> f64 {
        match *self {
            TherapyEvent::Chemo { start_day, .. } | TherapyEvent::Boost { start_day, .. } => start_day,
            TherapyEvent::Radio { day, .. } => day,
        }
    }

    /// Checks finiteness always and the published ranges when `strict`.
    pub fn validate(&self, strict: bool) -> Result<()> {
        let in_range = |name: &str, v: f64, (lo, hi): (f64, f64)| {
            if strict && !(lo..=hi).contains(&v) {
                Err(Error::config(format!("{name} must lie in [{lo}, {hi}], got {v}")))
            } else {
                Ok(())
            }
        };
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        match *self {
            TherapyEvent::Chemo { start_day, ch_time, ch_eff } => {
                non_negative("chemo start_day", start_day)?;
                if !(ch_time.is_finite() && ch_time > 0.0) {
                    return Err(Error::config(format!("Ch_time must be > 0, got {ch_time}")));
                }
                // the ladder itself is only defined on this range
                if !(CH_EFF_RANGE.0..=CH_EFF_RANGE.1).contains(&ch_eff) {
                    return Err(Error::config(format!("Ch_eff must lie in [0, 1/4], got {ch_eff}")));
                }
                in_range("Ch_time", ch_time, CH_TIME_RANGE)
            }
            TherapyEvent::Boost { start_day, bo_time, bo_eff } => {
                non_negative("boost start_day", start_day)?;
                non_negative("Bo_eff", bo_eff)?;
                if !(bo_time.is_finite() && bo_time > 0.0) {
                    return Err(Error::config(format!("Bo_time must be > 0, got {bo_time}")));
                }
                in_range("Bo_time", bo_time, BO_TIME_RANGE)?;
                in_range("Bo_eff", bo_eff, BO_EFF_RANGE)
            }
            TherapyEvent::Radio { day, restore_level, duration, alpha_multiplier } => {
                non_negative("radio day", day)?;
                if !(0.0..=1.0).contains(&restore_level) {
                    return Err(Error::config(format!(
                        "restore_level must lie in [0, 1], got {restore_level}"
                    )));
                }
                if let Some(d) = duration {
                    non_negative("radio duration", d)?;
                }
                if !(alpha_multiplier.is_finite() && alpha_multiplier > 0.0) {
                    return Err(Error::config("alpha_multiplier must be > 0"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TherapyProtocol {
    pub events: Vec<TherapyEvent>,
}

impl TherapyProtocol {
    pub fn new(events: Vec<TherapyEvent>) -> Self {
        Self { events }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn validate(&self, strict: bool) -> Result<()> {
        self.events.iter().try_for_each(|e| e.validate(strict))
    }
}

fn to_ticks(days: f64, dt_days: f64) -> u64 {
    (days / dt_days).round().max(0.0) as u64
}

#[derive(Debug, Clone)]
struct ChemoWindow {
    start: u64,
    end: u64,
    kill: [f64; NUM_PHENOTYPES],
}

#[derive(Debug, Clone)]
struct BoostWindow {
    start: u64,
    end: u64,
    quota: f64,
    phase: f64,
    injected: u64,
}

#[derive(Debug, Clone)]
struct RadioWindow {
    start: u64,
    end: Option<u64>,
    overrides: [f64; NUM_PHENOTYPES],
    alpha_multiplier: f64,
}

/// What the therapies ask of the current step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TherapyStep {
    pub p_recog: [f64; NUM_PHENOTYPES],
    pub chemo_kill: [f64; NUM_PHENOTYPES],
    pub boost_quota: u64,
    pub alpha_multiplier: f64,
}

/// Resolved protocol for one run, queried tick by tick.
#[derive(Debug, Clone)]
pub struct TherapyState {
    base_recog: [f64; NUM_PHENOTYPES],
    chemo: Vec<ChemoWindow>,
    boosts: Vec<BoostWindow>,
    radio: Vec<RadioWindow>,
}

impl TherapyState {
    pub fn new(
        protocol: &TherapyProtocol,
        registry: &PhenotypeRegistry,
        dt_days: f64,
        seed: u64,
    ) -> Result<Self> {
        protocol.validate(false)?;
        let mut rng = world_stream(seed, WorldStream::Therapy);
        let mut base_recog = [0.0; NUM_PHENOTYPES];
        for p in registry.iter() {
            base_recog[p.id.index()] = p.p_recog;
        }
        let mut state = Self { base_recog, chemo: Vec::new(), boosts: Vec::new(), radio: Vec::new() };
        for ev in &protocol.events {
            match *ev {
                TherapyEvent::Chemo { start_day, ch_time, ch_eff } => {
                    let mut kill = [0.0; NUM_PHENOTYPES];
                    for p in registry.iter() {
                        kill[p.id.index()] =
                            chemo_kill_time(p, ch_time, ch_eff)?.per_step_probability(dt_days);
                    }
                    let start = to_ticks(start_day, dt_days);
                    state.chemo.push(ChemoWindow { start, end: start + to_ticks(ch_time, dt_days), kill });
                }
                TherapyEvent::Boost { start_day, bo_time, bo_eff } => {
                    let start = to_ticks(start_day, dt_days);
                    let len = to_ticks(bo_time, dt_days).max(1);
                    state.boosts.push(BoostWindow {
                        start,
                        end: start + len,
                        quota: bo_eff / len as f64,
                        phase: rng.random(),
                        injected: 0,
                    });
                }
                TherapyEvent::Radio { day, restore_level, duration, alpha_multiplier } => {
                    let start = to_ticks(day, dt_days);
                    state.radio.push(RadioWindow {
                        start,
                        end: duration.map(|d| start + to_ticks(d, dt_days)),
                        overrides: radio_apply(registry, restore_level),
                        alpha_multiplier,
                    });
                }
            }
        }
        Ok(state)
    }

    /// Therapy inputs for the step starting at `tick`. Must be called once
    /// per tick in increasing order (boost bookkeeping).
    pub fn step(&mut self, tick: u64) -> TherapyStep {
        let mut p_recog = self.base_recog;
        let mut alpha_multiplier = 1.0;
        for w in &self.radio {
            if tick >= w.start && w.end.is_none_or(|e| tick < e) {
                for (p, o) in p_recog.iter_mut().zip(w.overrides) {
                    *p = p.max(o);
                }
                alpha_multiplier *= w.alpha_multiplier;
            }
        }
        let mut survive = [1.0; NUM_PHENOTYPES];
        for w in &self.chemo {
            if (w.start..w.end).contains(&tick) {
                for (s, k) in survive.iter_mut().zip(w.kill) {
                    *s *= 1.0 - k;
                }
            }
        }
        let chemo_kill = survive.map(|s| 1.0 - s);
        let mut boost_quota = 0;
        for w in &mut self.boosts {
            if (w.start..w.end).contains(&tick) {
                let n = boost_count(w.phase, w.quota, tick - w.start + 1);
                w.injected += n;
                boost_quota += n;
            }
        }
        TherapyStep { p_recog, chemo_kill, boost_quota, alpha_multiplier }
    }

    /// Boost cells released so far, per boost event.
    pub fn boost_released(&self) -> Vec<u64> {
        self.boosts.iter().map(|w| w.injected).collect()
    }
}

/// Cells released at step `k` (1-based) of a window with per-step `quota`:
/// systematic rounding with random phase, so every step draws `floor(quota)`
/// or `ceil(quota)` cells with mean `quota` and the running total never
/// strays more than one cell from `k · quota`.
pub fn boost_count(phase: f64, quota: f64, k: u64) -> u64 {
    let hi = (phase + k as f64 * quota).floor();
    let lo = (phase + (k - 1) as f64 * quota).floor();
    (hi - lo) as u64
}

/// Kills cancer cells with the given per-step probability per phenotype.
/// CTLs are never touched.
pub fn chemo_tick(world: &mut World, kill_prob: &[f64; NUM_PHENOTYPES]) -> Vec<AgentId> {
    world.cull_cancer(|p, rng| chance(rng, kill_prob[p.index()]))
}

/// Recognition overrides after radiotherapy: antigen-related clones are lifted
/// to at least `restore_level`, unrelated clones keep their own value.
pub fn radio_apply(registry: &PhenotypeRegistry, restore_level: f64) -> [f64; NUM_PHENOTYPES] {
    let mut out = [0.0; NUM_PHENOTYPES];
    for p in registry.iter() {
        out[p.id.index()] =
            if p.antigen_related { p.p_recog.max(restore_level).min(1.0) } else { p.p_recog };
    }
    out
}

pub fn immune_suppression(params: &ImmuneParams) -> ImmuneParams {
    ImmuneParams { alpha: SUPPRESSED_ALPHA, ..params.clone() }
}
