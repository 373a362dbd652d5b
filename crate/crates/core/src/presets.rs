//! Named experiment configurations.

use crate::config::{ExperimentConfig, InitialCondition, SweepAxis, SweepConfig};
use crate::error::{Error, Result};
use crate::phenotype::{MutationGraph, PhenotypeId};
use crate::therapy::{immune_suppression, TherapyEvent, TherapyProtocol};

pub const PRESET_NAMES: [&str; 11] = [
    "untreated",
    "chemo-only",
    "boost-only",
    "chemo+boost",
    "abscopal-combo",
    "abscopal-rt-only",
    "abscopal-boost-only",
    "abscopal-control",
    "abscopal-unrelated",
    "abscopal-suppressed",
    "pmut-sweep",
];

/// Seed whose untreated history is a fast, nearly monoclonal lesion by the
/// start of chemotherapy.
pub const CHEMO_ONLY_SEED: u64 = 1043;

/// Seed whose untreated history is a fast, heterogeneous lesion by day 50.
pub const CHEMO_BOOST_SEED: u64 = 94;

const LESION_CELLS: usize = 50_000;
const LARGE_CAP: usize = 200_000;

pub fn chemo_event() -> TherapyEvent {
    TherapyEvent::Chemo { start_day: 60.0, ch_time: 10.0, ch_eff: 0.25 }
}

pub fn boost_event() -> TherapyEvent {
    TherapyEvent::Boost { start_day: 50.0, bo_time: 3.0, bo_eff: 1000.0 }
}

fn radio_event() -> TherapyEvent {
    TherapyEvent::Radio { day: 1.0, restore_level: 1.0, duration: None, alpha_multiplier: 1.0 }
}

fn abscopal_boost() -> TherapyEvent {
    TherapyEvent::Boost { start_day: 1.0, bo_time: 10.0, bo_eff: 1000.0 }
}

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "untreated" => "single original cell, no therapy, 150 days",
        "chemo-only" => "untreated history, chemotherapy from day 60 for 10 days",
        "boost-only" => "untreated history, 1000 CTLs injected over days 50-53",
        "chemo+boost" => "boost at day 50 for 3 days, then chemotherapy at day 60 for 10 days",
        "abscopal-combo" => "50k-cell mixed lesion, recognition restored at day 1, 10-day boost",
        "abscopal-rt-only" => "50k-cell mixed lesion, recognition restored at day 1",
        "abscopal-boost-only" => "50k-cell mixed lesion, 10-day boost from day 1",
        "abscopal-control" => "50k-cell mixed lesion, no therapy",
        "abscopal-unrelated" => "combination on a lesion whose mutant clones are antigen-unrelated",
        "abscopal-suppressed" => "combination in an immune-suppressed host (alpha = 1e-15)",
        "pmut-sweep" => "combination on a 50k-cell original lesion, swept over P_mut",
        _ => return None,
    })
}

fn base(name: &str) -> ExperimentConfig {
    ExperimentConfig { name: Some(name.to_string()), ..Default::default() }
}

fn abscopal(name: &str, events: Vec<TherapyEvent>) -> ExperimentConfig {
    let mut cfg = base(name);
    cfg.initial = InitialCondition::Lesion { n: LESION_CELLS, min_fraction: 0.1, only: None };
    cfg.duration_days = 40.0;
    cfg.population_cap = LARGE_CAP;
    cfg.protocol = TherapyProtocol::new(events);
    cfg
}

pub fn load_preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "untreated" => base(name),
        "chemo-only" => {
            let mut cfg = base(name);
            cfg.seed = CHEMO_ONLY_SEED;
            cfg.duration_days = 100.0;
            cfg.population_cap = LARGE_CAP;
            cfg.protocol = TherapyProtocol::new(vec![chemo_event()]);
            cfg
        }
        "boost-only" => {
            let mut cfg = base(name);
            cfg.duration_days = 100.0;
            cfg.population_cap = LARGE_CAP;
            cfg.protocol = TherapyProtocol::new(vec![boost_event()]);
            cfg
        }
        "chemo+boost" => {
            let mut cfg = base(name);
            cfg.seed = CHEMO_BOOST_SEED;
            cfg.duration_days = 100.0;
            cfg.population_cap = LARGE_CAP;
            cfg.protocol = TherapyProtocol::new(vec![boost_event(), chemo_event()]);
            cfg
        }
        "abscopal-combo" => abscopal(name, vec![radio_event(), abscopal_boost()]),
        "abscopal-rt-only" => abscopal(name, vec![radio_event()]),
        "abscopal-boost-only" => abscopal(name, vec![abscopal_boost()]),
        "abscopal-control" => abscopal(name, vec![]),
        "abscopal-unrelated" => {
            let mut cfg = abscopal(name, vec![radio_event(), abscopal_boost()]);
            for id in PhenotypeId::MUTANTS {
                cfg.phenotypes.lookup_mut(id).antigen_related = false;
            }
            cfg
        }
        "abscopal-suppressed" => {
            let mut cfg = abscopal(name, vec![radio_event(), abscopal_boost()]);
            cfg.immune = immune_suppression(&cfg.immune);
            cfg
        }
        "pmut-sweep" => {
            let mut cfg = abscopal(name, vec![radio_event(), abscopal_boost()]);
            cfg.initial =
                InitialCondition::Lesion { n: LESION_CELLS, min_fraction: 0.0, only: Some(PhenotypeId::Original) };
            // the primary lesion only carried the original clone's antigens
            for id in PhenotypeId::MUTANTS {
                cfg.phenotypes.lookup_mut(id).antigen_related = false;
            }
            cfg.mutation.graph = MutationGraph::AllClones;
            cfg.sweep = Some(SweepConfig {
                axes: vec![SweepAxis {
                    param: "P_mut".into(),
                    values: vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0],
                }],
                seeds: vec![1, 2, 3],
            });
            cfg
        }
        _ => {
            return Err(Error::UnknownPreset { name: name.to_string(), valid: PRESET_NAMES.to_vec() })
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_loads_and_round_trips() {
        for name in PRESET_NAMES {
            let cfg = load_preset(name).unwrap();
            assert!(describe(name).is_some());
            let text = cfg.to_toml_string().unwrap();
            assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg, "{name}");
        }
    }

    #[test]
    fn unknown_preset_lists_names() {
        match load_preset("chemo") {
            Err(Error::UnknownPreset { valid, .. }) => assert_eq!(valid.len(), 11),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn protocols() {
        let c = load_preset("chemo-only").unwrap();
        assert_eq!(
            c.protocol.events,
            vec![TherapyEvent::Chemo { start_day: 60.0, ch_time: 10.0, ch_eff: 0.25 }]
        );
        let cb = load_preset("chemo+boost").unwrap();
        assert_eq!(cb.protocol.events[0].start_day(), 50.0);
        assert_eq!(cb.protocol.events[1].start_day(), 60.0);
        let combo = load_preset("abscopal-combo").unwrap();
        let sup = load_preset("abscopal-suppressed").unwrap();
        assert_eq!(sup.immune.alpha, 1e-15);
        assert_eq!(sup.protocol, combo.protocol);
        assert_eq!(sup.initial, combo.initial);
    }
}
