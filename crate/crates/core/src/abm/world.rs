//! Agent world: cancer cells and CTLs as hard spheres in a spherical domain.
//!
//! One call to [`World::step`] advances a single time step in fixed
//! sub-phases: boundary influx, CTL rules in agent-id order, due cancer
//! divisions in agent-id order, therapy kills. Removals are batched at the
//! end of each sub-phase.
//!
//! Cancer division uses an exponential clock per cell: the number of steps to
//! the next division attempt is geometric with the per-step division
//! probability, which is the same law as a Bernoulli draw every step.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::grid::SpatialIndex;
use super::lattice;
use super::params::AbmParams;
use crate::error::{Error, Result};
use crate::geometry::{shell_volume, Vec3};
use crate::phenotype::{MutationConfig, PhenotypeId, PhenotypeRegistry, NUM_PHENOTYPES};
use crate::rng::{agent_stream, chance, stochastic_round, world_stream, StreamRng, WorldStream};

pub type AgentId = u64;

/// Tolerance on hard-sphere distances.
pub const OVERLAP_TOL: f64 = 1e-9;

const UM3_PER_MM3: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKindTag {
    Cancer,
    Ctl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub id: AgentId,
    slot: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CtlState {
    pub engaged: Option<Target>,
    /// Minutes since the CTL last (re)started moving.
    pub accel_clock: f64,
    /// Last target that failed recognition; ignored while still in contact.
    pub rejected: Option<AgentId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentKind {
    Cancer(PhenotypeId),
    Ctl(CtlState),
}

#[derive(Debug, Clone)]
pub struct CellAgent {
    pub id: AgentId,
    pub pos: Vec3,
    pub kind: AgentKind,
    pub birth_tick: u64,
    alive: bool,
    rng: StreamRng,
}

impl CellAgent {
    pub fn tag(&self) -> AgentKindTag {
        match self.kind {
            AgentKind::Cancer(_) => AgentKindTag::Cancer,
            AgentKind::Ctl(_) => AgentKindTag::Ctl,
        }
    }

    pub fn phenotype(&self) -> Option<PhenotypeId> {
        match self.kind {
            AgentKind::Cancer(p) => Some(p),
            AgentKind::Ctl(_) => None,
        }
    }

    pub fn is_alive(&self) -> bool {
        self.alive
    }
}

/// Per-step inputs coming from the immune compartment and the therapy engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInputs {
    /// Peripheral CTL concentration, k/mm³.
    pub c2: f64,
    /// Effective recognition probability per minute, by phenotype index.
    pub p_recog: [f64; NUM_PHENOTYPES],
    /// Chemotherapy death probability for this step, by phenotype index.
    pub chemo_kill: [f64; NUM_PHENOTYPES],
    /// Extra CTLs to inject into the cloud this step.
    pub boost_quota: u64,
}

impl StepInputs {
    pub fn untreated(c2: f64, registry: &PhenotypeRegistry) -> Self {
        let mut p_recog = [0.0; NUM_PHENOTYPES];
        for p in registry.iter() {
            p_recog[p.id.index()] = p.p_recog;
        }
        Self { c2, p_recog, chemo_kill: [0.0; NUM_PHENOTYPES], boost_quota: 0 }
    }
}

/// Counters for one step; the sequence of these is the run's event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub influx: u32,
    pub boost_injected: u32,
    pub ctl_deaths: u32,
    pub ctl_exits: u32,
    pub recognitions: u32,
    pub rejections: u32,
    pub ctl_kills: u32,
    pub recruits: u32,
    pub divisions: u32,
    pub failed_divisions: u32,
    pub mutations: u32,
    pub chemo_kills: u32,
}

/// What happened to one CTL during its rule update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CtlEvent {
    pub died: bool,
    pub exited: bool,
    pub moved: bool,
    pub recognised: Option<AgentId>,
    pub rejected: Option<AgentId>,
    pub killed: Option<AgentId>,
    pub recruited: Option<AgentId>,
}

#[derive(Debug, Clone)]
pub struct World {
    params: AbmParams,
    registry: PhenotypeRegistry,
    mutation: MutationConfig,
    seed: u64,
    tick: u64,
    next_id: AgentId,
    slots: Vec<Option<CellAgent>>,
    free: Vec<u32>,
    /// Slots of live cancer cells, ascending agent id.
    cancer: Vec<u32>,
    /// Slots of live CTLs, ascending agent id.
    ctls: Vec<u32>,
    divisions: BinaryHeap<Reverse<(u64, AgentId, u32)>>,
    division_clocks: [Option<Geometric>; NUM_PHENOTYPES],
    index: SpatialIndex,
    counts: [usize; NUM_PHENOTYPES],
    doomed: Vec<u32>,
    influx_rng: StreamRng,
    boost_rng: StreamRng,
    boost_backlog: u64,
    check_every: Option<u64>,
}

impl World {
    pub fn new(
        params: AbmParams,
        registry: PhenotypeRegistry,
        mutation: MutationConfig,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        registry.validate()?;
        mutation.validate()?;
        let mut division_clocks = [None; NUM_PHENOTYPES];
        for p in registry.iter() {
            let prob = params.p_division(p.t_div);
            division_clocks[p.id.index()] = Some(
                Geometric::new(prob)
                    .map_err(|e| Error::config(format!("division clock for {}: {e}", p.id)))?,
            );
        }
        let index = SpatialIndex::new(params.domain_radius, 2.0 * params.r + params.contact_margin);
        Ok(Self {
            influx_rng: world_stream(seed, WorldStream::Influx),
            boost_rng: world_stream(seed, WorldStream::Boost),
            params,
            registry,
            mutation,
            seed,
            tick: 0,
            next_id: 0,
            slots: Vec::new(),
            free: Vec::new(),
            cancer: Vec::new(),
            ctls: Vec::new(),
            divisions: BinaryHeap::new(),
            division_clocks,
            index,
            counts: [0; NUM_PHENOTYPES],
            doomed: Vec::new(),
            boost_backlog: 0,
            check_every: None,
        })
    }

    /// Verify the hard-sphere and containment invariants every `every` steps
    /// and panic on violation.
    pub fn set_invariant_checks(&mut self, every: Option<u64>) {
        self.check_every = every.filter(|&k| k > 0);
    }

    pub fn params(&self) -> &AbmParams {
        &self.params
    }

    pub fn registry(&self) -> &PhenotypeRegistry {
        &self.registry
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn time_days(&self) -> f64 {
        self.tick as f64 * self.params.dt_days()
    }

    pub fn cancer_count(&self) -> usize {
        self.cancer.len()
    }

    pub fn ctl_count(&self) -> usize {
        self.ctls.len()
    }

    pub fn phenotype_counts(&self) -> [usize; NUM_PHENOTYPES] {
        self.counts
    }

    pub fn cancer_positions(&self) -> Vec<Vec3> {
        self.cancer.iter().map(|&s| self.agent_at(s).pos).collect()
    }

    pub fn ctl_positions(&self) -> Vec<Vec3> {
        self.ctls.iter().map(|&s| self.agent_at(s).pos).collect()
    }

    /// All live agents in ascending id order.
    pub fn agents(&self) -> Vec<&CellAgent> {
        let mut out: Vec<&CellAgent> =
            self.cancer.iter().chain(&self.ctls).map(|&s| self.agent_at(s)).collect();
        out.sort_by_key(|a| a.id);
        out
    }

    pub fn agent(&self, id: AgentId) -> Option<&CellAgent> {
        self.cancer
            .iter()
            .chain(&self.ctls)
            .map(|&s| self.agent_at(s))
            .find(|a| a.id == id)
    }

    fn agent_at(&self, slot: u32) -> &CellAgent {
        self.slots[slot as usize].as_ref().expect("listed slot holds an agent")
    }

    fn live_at(&self, slot: u32) -> Option<&CellAgent> {
        self.slots[slot as usize].as_ref().filter(|a| a.alive)
    }

    // ---- creation and removal -------------------------------------------------

    fn alloc_slot(&mut self, agent: CellAgent) -> u32 {
        match self.free.pop() {
            Some(s) => {
                self.slots[s as usize] = Some(agent);
                s
            }
            None => {
                self.slots.push(Some(agent));
                (self.slots.len() - 1) as u32
            }
        }
    }

    fn spawn(&mut self, pos: Vec3, kind: AgentKind) -> (AgentId, u32) {
        let id = self.next_id;
        self.next_id += 1;
        let agent = CellAgent {
            id,
            pos,
            kind,
            birth_tick: self.tick,
            alive: true,
            rng: agent_stream(self.seed, id),
        };
        let slot = self.alloc_slot(agent);
        self.index.insert(slot, pos);
        match kind {
            AgentKind::Cancer(p) => {
                self.cancer.push(slot);
                self.counts[p.index()] += 1;
                self.schedule_division(slot);
            }
            AgentKind::Ctl(_) => self.ctls.push(slot),
        }
        (id, slot)
    }

    fn schedule_division(&mut self, slot: u32) {
        let agent = self.slots[slot as usize].as_mut().expect("agent");
        let AgentKind::Cancer(p) = agent.kind else { return };
        let clock = self.division_clocks[p.index()].as_ref().expect("clock per phenotype");
        let wait = clock.sample(&mut agent.rng);
        let due = self.tick.saturating_add(1).saturating_add(wait);
        self.divisions.push(Reverse((due, agent.id, slot)));
    }

    fn site_is_free(&self, site: Vec3, except: &[u32]) -> bool {
        site.norm() <= self.params.max_center_radius() + OVERLAP_TOL
            && !self.index.any_within(site, 2.0 * self.params.r - OVERLAP_TOL, except)
    }

    /// Places a cancer cell; fails if the site is outside or overlapping.
    pub fn add_cancer(&mut self, pos: Vec3, phenotype: PhenotypeId) -> Result<AgentId> {
        if !pos.is_finite() || !self.site_is_free(pos, &[]) {
            return Err(Error::config(format!("cannot place cancer cell at {pos:?}")));
        }
        Ok(self.spawn(pos, AgentKind::Cancer(phenotype)).0)
    }

    pub fn add_ctl(&mut self, pos: Vec3) -> Result<AgentId> {
        if !pos.is_finite() || !self.site_is_free(pos, &[]) {
            return Err(Error::config(format!("cannot place CTL at {pos:?}")));
        }
        Ok(self.spawn(pos, AgentKind::Ctl(CtlState::default())).0)
    }

    /// Seeds a close-packed lesion centred at the origin.
    pub fn seed_lesion(&mut self, labels: &[PhenotypeId]) -> Result<()> {
        let sites = lattice::hcp_ball(labels.len(), 2.0 * self.params.r);
        for (site, &label) in sites.into_iter().zip(labels) {
            self.add_cancer(site, label)?;
        }
        Ok(())
    }

    pub fn seeding_rng(&self) -> StreamRng {
        world_stream(self.seed, WorldStream::Seeding)
    }

    fn doom(&mut self, slot: u32) -> bool {
        match self.slots[slot as usize].as_mut() {
            Some(a) if a.alive => {
                a.alive = false;
                self.doomed.push(slot);
                true
            }
            _ => false,
        }
    }

    /// Removes agents marked dead since the last flush.
    pub fn flush_removals(&mut self) {
        if self.doomed.is_empty() {
            return;
        }
        let mut cancer_removed = false;
        let mut ctl_removed = false;
        for slot in std::mem::take(&mut self.doomed) {
            let agent = self.slots[slot as usize].take().expect("doomed slot holds an agent");
            self.index.remove(slot, agent.pos);
            match agent.kind {
                AgentKind::Cancer(p) => {
                    self.counts[p.index()] -= 1;
                    cancer_removed = true;
                }
                AgentKind::Ctl(_) => ctl_removed = true,
            }
            self.free.push(slot);
        }
        let slots = &self.slots;
        if cancer_removed {
            self.cancer.retain(|&s| slots[s as usize].is_some());
        }
        if ctl_removed {
            self.ctls.retain(|&s| slots[s as usize].is_some());
        }
    }

    // ---- cancer division -----------------------------------------------------

    /// Site for a daughter of the cell in `slot` in direction `dir`, or `None`
    /// when it would overlap another agent or leave the domain.
    pub fn division_site(&self, slot: u32, dir: Vec3) -> Option<Vec3> {
        let mother = self.live_at(slot)?;
        let site = mother.pos + dir * (2.0 * self.params.r);
        self.site_is_free(site, &[slot]).then_some(site)
    }

    pub fn slot_of(&self, id: AgentId) -> Option<u32> {
        self.cancer
            .iter()
            .chain(&self.ctls)
            .copied()
            .find(|&s| self.agent_at(s).id == id)
    }

    /// One division attempt in a uniformly random direction. Returns the
    /// daughter id on success.
    pub fn attempt_division(&mut self, slot: u32, stats: &mut StepStats) -> Option<AgentId> {
        let dt_min = self.params.dt_min;
        let (dir, parent) = {
            let mother = self.slots[slot as usize].as_mut()?;
            let AgentKind::Cancer(p) = mother.kind else { return None };
            (Vec3::random_unit(&mut mother.rng), p)
        };
        let Some(site) = self.division_site(slot, dir) else {
            stats.failed_divisions += 1;
            return None;
        };
        let daughter_pheno = {
            let mother = self.slots[slot as usize].as_mut().expect("mother");
            self.mutation.mutate(parent, dt_min, &mut mother.rng)
        };
        if daughter_pheno != parent {
            stats.mutations += 1;
        }
        stats.divisions += 1;
        Some(self.spawn(site, AgentKind::Cancer(daughter_pheno)).0)
    }

    fn run_divisions(&mut self, stats: &mut StepStats) {
        while let Some(&Reverse((due, id, slot))) = self.divisions.peek() {
            if due > self.tick {
                break;
            }
            self.divisions.pop();
            let valid = self.live_at(slot).is_some_and(|a| a.id == id);
            if !valid {
                continue;
            }
            self.attempt_division(slot, stats);
            self.schedule_division(slot);
        }
    }

    // ---- CTL rules -------------------------------------------------------------

    fn nearest_cancer_contact(&self, pos: Vec3, skip: Option<AgentId>) -> Option<(Target, PhenotypeId)> {
        let reach = self.params.contact_distance();
        let mut best: Option<(f64, AgentId, u32, PhenotypeId)> = None;
        self.index.for_each_within(pos, reach, |s, _, d2| {
            let Some(a) = self.live_at(s) else { return };
            let AgentKind::Cancer(p) = a.kind else { return };
            if Some(a.id) == skip {
                return;
            }
            let better = match best {
                None => true,
                Some((bd, bid, _, _)) => d2 < bd || (d2 == bd && a.id < bid),
            };
            if better {
                best = Some((d2, a.id, s, p));
            }
        });
        best.map(|(_, id, slot, p)| (Target { id, slot }, p))
    }

    fn still_touching(&self, pos: Vec3, id: AgentId) -> bool {
        let reach = self.params.contact_distance();
        let mut hit = false;
        self.index.for_each_within(pos, reach, |s, _, _| {
            if self.live_at(s).is_some_and(|a| a.id == id) {
                hit = true;
            }
        });
        hit
    }

    fn target_alive(&self, t: Target) -> bool {
        self.live_at(t.slot).is_some_and(|a| a.id == t.id)
    }

    fn free_tangent_site(&self, center: Vec3, rng: &mut StreamRng, except: &[u32]) -> Option<Vec3> {
        (0..self.params.retries).find_map(|_| {
            let site = center + Vec3::random_unit(rng) * (2.0 * self.params.r);
            self.site_is_free(site, except).then_some(site)
        })
    }

    /// Applies the CTL rules to the agent in `slot`.
    pub fn ctl_step(&mut self, slot: u32, p_recog: &[f64; NUM_PHENOTYPES]) -> CtlEvent {
        let mut ev = CtlEvent::default();
        let Some(mut agent) = self.slots[slot as usize].take() else { return ev };
        let AgentKind::Ctl(mut st) = agent.kind else {
            self.slots[slot as usize] = Some(agent);
            return ev;
        };
        if !agent.alive {
            self.slots[slot as usize] = Some(agent);
            return ev;
        }
        let p = &self.params;
        let dt = p.dt_min;

        if chance(&mut agent.rng, p.p_death()) {
            ev.died = true;
        } else if let Some(target) = st.engaged {
            if !self.target_alive(target) {
                st.engaged = None;
                st.accel_clock = 0.0;
            } else {
                let kill = chance(&mut agent.rng, p.p_kill());
                let recruit = chance(&mut agent.rng, p.p_recruit());
                if recruit {
                    if let Some(site) = self.free_tangent_site(agent.pos, &mut agent.rng, &[slot]) {
                        let (new_id, _) = self.spawn(site, AgentKind::Ctl(CtlState::default()));
                        ev.recruited = Some(new_id);
                    }
                }
                if kill {
                    ev.killed = Some(target.id);
                    self.doom(target.slot);
                    st.engaged = None;
                    st.accel_clock = 0.0;
                }
            }
        } else {
            let sd = p.sigma_at(st.accel_clock) * dt.sqrt();
            if sd > 0.0 {
                for _ in 0..p.retries {
                    let proposal = agent.pos + Vec3::gaussian(&mut agent.rng, sd);
                    if proposal.norm() > p.max_center_radius() {
                        ev.exited = true;
                        break;
                    }
                    if !self.index.any_within(proposal, 2.0 * p.r - OVERLAP_TOL, &[slot]) {
                        self.index.relocate(slot, agent.pos, proposal);
                        agent.pos = proposal;
                        ev.moved = true;
                        break;
                    }
                }
            }
            st.accel_clock += dt;
            if !ev.exited {
                if let Some(r) = st.rejected {
                    if !self.still_touching(agent.pos, r) {
                        st.rejected = None;
                    }
                }
                if let Some((target, pheno)) = self.nearest_cancer_contact(agent.pos, st.rejected) {
                    let p_rec = (p_recog[pheno.index()] * dt).min(1.0);
                    if chance(&mut agent.rng, p_rec) {
                        st.engaged = Some(target);
                        ev.recognised = Some(target.id);
                    } else {
                        st.rejected = Some(target.id);
                        st.accel_clock = 0.0;
                        ev.rejected = Some(target.id);
                    }
                }
            }
        }

        agent.kind = AgentKind::Ctl(st);
        self.slots[slot as usize] = Some(agent);
        if ev.died || ev.exited {
            self.doom(slot);
        }
        ev
    }

    // ---- boundary influx ----------------------------------------------------------

    pub fn shell_volume_mm3(&self) -> f64 {
        let outer = self.params.domain_radius;
        shell_volume(outer, outer - self.params.cloud_thickness()) / UM3_PER_MM3
    }

    /// Expected number of CTLs in the boundary cloud at concentration `c2`.
    pub fn cloud_target(&self, c2: f64) -> f64 {
        c2.max(0.0) * 1000.0 * self.shell_volume_mm3()
    }

    pub fn shell_ctl_count(&self) -> usize {
        let inner = self.params.domain_radius - self.params.cloud_thickness();
        self.ctls
            .iter()
            .filter(|&&s| self.live_at(s).is_some_and(|a| a.pos.norm() >= inner))
            .count()
    }

    fn random_shell_site(&self, rng: &mut StreamRng) -> Option<Vec3> {
        let outer = self.params.max_center_radius();
        let inner = self.params.domain_radius - self.params.cloud_thickness();
        let (a3, b3) = (inner.powi(3), outer.powi(3));
        (0..self.params.retries).find_map(|_| {
            let u: f64 = rng.random();
            let rad = (a3 + u * (b3 - a3)).cbrt();
            let site = Vec3::random_unit(rng) * rad;
            self.site_is_free(site, &[]).then_some(site)
        })
    }

    /// Tops the cloud up to its stochastically rounded target. Never removes
    /// CTLs. Returns the number spawned.
    pub fn boundary_influx(&mut self, c2: f64) -> u32 {
        let mut rng = self.influx_rng.clone();
        let target = stochastic_round(&mut rng, self.cloud_target(c2));
        let missing = target.saturating_sub(self.shell_ctl_count() as u64);
        let mut spawned = 0;
        for _ in 0..missing {
            if let Some(site) = self.random_shell_site(&mut rng) {
                self.spawn(site, AgentKind::Ctl(CtlState::default()));
                spawned += 1;
            }
        }
        self.influx_rng = rng;
        spawned
    }

    /// Injects boosted CTLs into the cloud; unplaced cells carry over.
    pub fn inject_boost(&mut self, quota: u64) -> u32 {
        self.boost_backlog += quota;
        let mut rng = self.boost_rng.clone();
        let mut placed = 0;
        while self.boost_backlog > 0 {
            let Some(site) = self.random_shell_site(&mut rng) else { break };
            self.spawn(site, AgentKind::Ctl(CtlState::default()));
            self.boost_backlog -= 1;
            placed += 1;
        }
        self.boost_rng = rng;
        placed
    }

    pub fn boost_backlog(&self) -> u64 {
        self.boost_backlog
    }

    // ---- therapy hook -------------------------------------------------------------

    /// Draws a kill decision for every live cancer cell (ascending id) from the
    /// cell's own stream and removes the selected cells at the end.
    pub fn cull_cancer<F>(&mut self, mut decide: F) -> Vec<AgentId>
    where
        F: FnMut(PhenotypeId, &mut StreamRng) -> bool,
    {
        let mut killed = Vec::new();
        for i in 0..self.cancer.len() {
            let slot = self.cancer[i];
            let agent = self.slots[slot as usize].as_mut().expect("agent");
            if !agent.alive {
                continue;
            }
            let AgentKind::Cancer(p) = agent.kind else { continue };
            if decide(p, &mut agent.rng) {
                killed.push(agent.id);
                self.doom(slot);
            }
        }
        self.flush_removals();
        killed
    }

    // ---- full step ----------------------------------------------------------------------

    pub fn step(&mut self, inputs: &StepInputs) -> StepStats {
        let mut stats = StepStats::default();

        stats.influx = self.boundary_influx(inputs.c2);
        if inputs.boost_quota > 0 || self.boost_backlog > 0 {
            stats.boost_injected = self.inject_boost(inputs.boost_quota);
        }

        let roster = self.ctls.clone();
        for slot in roster {
            let ev = self.ctl_step(slot, &inputs.p_recog);
            stats.ctl_deaths += u32::from(ev.died);
            stats.ctl_exits += u32::from(ev.exited);
            stats.recognitions += u32::from(ev.recognised.is_some());
            stats.rejections += u32::from(ev.rejected.is_some());
            stats.ctl_kills += u32::from(ev.killed.is_some());
            stats.recruits += u32::from(ev.recruited.is_some());
        }
        self.flush_removals();

        self.run_divisions(&mut stats);

        if inputs.chemo_kill.iter().any(|&p| p > 0.0) {
            stats.chemo_kills = crate::therapy::chemo_tick(self, &inputs.chemo_kill).len() as u32;
        }
        self.flush_removals();

        self.tick += 1;
        if let Some(k) = self.check_every {
            if self.tick.is_multiple_of(k) {
                if let Err(msg) = self.check_invariants() {
                    panic!("world invariant violated at tick {}: {msg}", self.tick);
                }
            }
        }
        stats
    }

    /// Hard-sphere, containment and index consistency checks.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let limit = self.params.max_center_radius() + OVERLAP_TOL;
        let min_d = 2.0 * self.params.r - OVERLAP_TOL;
        if self.index.len() != self.cancer.len() + self.ctls.len() + self.doomed.len() {
            return Err(format!(
                "index holds {} entries for {} agents",
                self.index.len(),
                self.cancer.len() + self.ctls.len()
            ));
        }
        if !self.index.is_consistent() {
            return Err("agent stored in the wrong bucket".into());
        }
        for &slot in self.cancer.iter().chain(&self.ctls) {
            let a = self.agent_at(slot);
            if !a.pos.is_finite() || a.pos.norm() > limit {
                return Err(format!("agent {} outside the domain at {:?}", a.id, a.pos));
            }
            if self.index.any_within(a.pos, min_d, &[slot]) {
                return Err(format!("agent {} overlaps a neighbour", a.id));
            }
        }
        Ok(())
    }
}
