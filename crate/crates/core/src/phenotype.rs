//! Clonal phenotypes, the mutation kernel and the chemotherapy kill-time ladder.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::chance;

pub const NUM_PHENOTYPES: usize = 6;

/// Chemotherapy ladder index given to the original clone: it shares its
/// division time with the (0.5, 0.5) clone.
pub const ORIGINAL_CHEMO_INDEX: u8 = 2;

/// Allowed range of average division times, days.
pub const T_DIV_RANGE: (f64, f64) = (1.0, 39.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhenotypeId {
    #[serde(rename = "original")]
    Original,
    #[serde(rename = "c05_05")]
    C05_05,
    #[serde(rename = "c0_1")]
    C0_1,
    #[serde(rename = "c025_075")]
    C025_075,
    #[serde(rename = "c075_025")]
    C075_025,
    #[serde(rename = "c1_0")]
    C1_0,
}

impl PhenotypeId {
    /// Column order used in every output file.
    pub const ALL: [PhenotypeId; NUM_PHENOTYPES] = [
        PhenotypeId::Original,
        PhenotypeId::C05_05,
        PhenotypeId::C0_1,
        PhenotypeId::C025_075,
        PhenotypeId::C075_025,
        PhenotypeId::C1_0,
    ];

    pub const MUTANTS: [PhenotypeId; 5] = [
        PhenotypeId::C05_05,
        PhenotypeId::C0_1,
        PhenotypeId::C025_075,
        PhenotypeId::C075_025,
        PhenotypeId::C1_0,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PhenotypeId::Original => "original",
            PhenotypeId::C05_05 => "c05_05",
            PhenotypeId::C0_1 => "c0_1",
            PhenotypeId::C025_075 => "c025_075",
            PhenotypeId::C075_025 => "c075_025",
            PhenotypeId::C1_0 => "c1_0",
        }
    }
}

impl fmt::Display for PhenotypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhenotypeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhenotypeId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::config(format!("unknown phenotype id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phenotype {
    pub id: PhenotypeId,
    /// Recognition probability per minute of contact.
    #[serde(rename = "P_recog")]
    pub p_recog: f64,
    /// Average division time, days.
    #[serde(rename = "T_div")]
    pub t_div: f64,
    /// Position on the chemotherapy ladder; absent for the original clone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chemo_index: Option<u8>,
    /// Shares antigens with the primary lesion.
    #[serde(default = "default_true")]
    pub antigen_related: bool,
}

fn default_true() -> bool {
    true
}

impl Phenotype {
    pub fn effective_chemo_index(&self) -> u8 {
        self.chemo_index.unwrap_or(ORIGINAL_CHEMO_INDEX)
    }
}

/// The six clones available to a lesion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhenotypeRegistry {
    entries: Vec<Phenotype>,
}

impl Default for PhenotypeRegistry {
    fn default() -> Self {
        let ph = |id, p_recog, t_div, chemo_index| Phenotype {
            id,
            p_recog,
            t_div,
            chemo_index,
            antigen_related: true,
        };
        Self {
            entries: vec![
                ph(PhenotypeId::Original, 1.0, 7.0, None),
                ph(PhenotypeId::C05_05, 0.5, 7.0, Some(2)),
                ph(PhenotypeId::C0_1, 0.0, 13.0, Some(0)),
                ph(PhenotypeId::C025_075, 0.25, 10.0, Some(1)),
                ph(PhenotypeId::C075_025, 0.75, 4.0, Some(3)),
                ph(PhenotypeId::C1_0, 1.0, 1.0, Some(4)),
            ],
        }
    }
}

impl PhenotypeRegistry {
    /// Builds a registry from an arbitrary list; every id must appear once.
    pub fn from_entries(entries: Vec<Phenotype>) -> Result<Self> {
        let mut slots: [Option<Phenotype>; NUM_PHENOTYPES] = [None; NUM_PHENOTYPES];
        for e in entries {
            let slot = &mut slots[e.id.index()];
            if slot.is_some() {
                return Err(Error::config(format!("phenotype `{}` listed twice", e.id)));
            }
            *slot = Some(e);
        }
        let entries = slots
            .into_iter()
            .zip(PhenotypeId::ALL)
            .map(|(s, id)| s.ok_or_else(|| Error::config(format!("phenotype `{id}` missing"))))
            .collect::<Result<Vec<_>>>()?;
        let reg = Self { entries };
        reg.validate()?;
        Ok(reg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != NUM_PHENOTYPES {
            return Err(Error::config("phenotype table must list all six clones"));
        }
        for (e, id) in self.entries.iter().zip(PhenotypeId::ALL) {
            if e.id != id {
                return Err(Error::config(format!("phenotype table out of order at `{}`", e.id)));
            }
            if !(0.0..=1.0).contains(&e.p_recog) {
                return Err(Error::config(format!(
                    "P_recog of `{}` must lie in [0, 1], got {}",
                    e.id, e.p_recog
                )));
            }
            if !(T_DIV_RANGE.0..=T_DIV_RANGE.1).contains(&e.t_div) {
                return Err(Error::config(format!(
                    "T_div of `{}` must lie in [{}, {}] days, got {}",
                    e.id, T_DIV_RANGE.0, T_DIV_RANGE.1, e.t_div
                )));
            }
            if let Some(i) = e.chemo_index {
                if i > 4 {
                    return Err(Error::config(format!("chemo_index of `{}` must be 0..=4", e.id)));
                }
            }
        }
        Ok(())
    }

    pub fn lookup(&self, id: PhenotypeId) -> &Phenotype {
        &self.entries[id.index()]
    }

    pub fn lookup_name(&self, name: &str) -> Result<&Phenotype> {
        Ok(self.lookup(name.parse()?))
    }

    pub fn lookup_mut(&mut self, id: PhenotypeId) -> &mut Phenotype {
        &mut self.entries[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Phenotype> {
        self.entries.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationGraph {
    /// Only the original clone mutates; mutants breed true.
    OriginalOnly,
    /// Every clone may mutate into any of the five others.
    AllClones,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationConfig {
    /// Mutation scale; multiplied by the step length in minutes and clamped
    /// to [0, 1] to give the per-division probability.
    #[serde(rename = "P_mut")]
    pub p_mut: f64,
    #[serde(default = "default_graph")]
    pub graph: MutationGraph,
}

fn default_graph() -> MutationGraph {
    MutationGraph::OriginalOnly
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self { p_mut: 0.01, graph: MutationGraph::OriginalOnly }
    }
}

impl MutationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_mut.is_finite() && self.p_mut >= 0.0) {
            return Err(Error::config(format!("P_mut must be >= 0, got {}", self.p_mut)));
        }
        Ok(())
    }

    pub fn per_division_probability(&self, dt_min: f64) -> f64 {
        (self.p_mut * dt_min).clamp(0.0, 1.0)
    }

    /// Phenotype of a daughter cell. Draws nothing when the parent cannot mutate.
    pub fn mutate<R: Rng + ?Sized>(
        &self,
        parent: PhenotypeId,
        dt_min: f64,
        rng: &mut R,
    ) -> PhenotypeId {
        let can_mutate = match self.graph {
            MutationGraph::OriginalOnly => parent == PhenotypeId::Original,
            MutationGraph::AllClones => true,
        };
        if !can_mutate || !chance(rng, self.per_division_probability(dt_min)) {
            return parent;
        }
        let k = rng.random_range(0..NUM_PHENOTYPES - 1);
        // uniform over the five ids different from the parent
        let mut others = PhenotypeId::ALL.into_iter().filter(|&p| p != parent);
        others.nth(k).expect("five alternatives")
    }
}

/// Mean time for chemotherapy to kill a cell of a given clone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChemoKill {
    /// Exponential waiting time with this mean, days.
    After(f64),
    /// The cell dies on the first treated step.
    Certain,
}

impl ChemoKill {
    /// Per-step death probability for a step of `dt_days`.
    pub fn per_step_probability(&self, dt_days: f64) -> f64 {
        match *self {
            ChemoKill::After(mean) => crate::rng::per_step_probability(dt_days, mean),
            ChemoKill::Certain => 1.0,
        }
    }
}

pub const CH_EFF_RANGE: (f64, f64) = (0.0, 0.25);

/// Kill time along the ladder: `Ch_time · (1 − i · Ch_eff)`, certain death
/// once that reaches zero.
pub fn chemo_kill_time(pheno: &Phenotype, ch_time: f64, ch_eff: f64) -> Result<ChemoKill> {
    if !(ch_time.is_finite() && ch_time > 0.0) {
        return Err(Error::config(format!("Ch_time must be > 0, got {ch_time}")));
    }
    if !(CH_EFF_RANGE.0..=CH_EFF_RANGE.1).contains(&ch_eff) {
        return Err(Error::config(format!("Ch_eff must lie in [0, 1/4], got {ch_eff}")));
    }
    let i = f64::from(pheno.effective_chemo_index());
    let kill = ch_time * (1.0 - i * ch_eff);
    Ok(if kill <= 0.0 { ChemoKill::Certain } else { ChemoKill::After(kill) })
}
