//! Lock-step coupling of the immune kinetics and the agent world, output
//! files, and parameter sweeps.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abm::lattice::heterogeneous_labels;
use crate::abm::{AgentKind, StepInputs, StepStats, World};
use crate::config::{Coupling, ExperimentConfig, InitialCondition, REFERENCE_RADIUS};
use crate::error::{Error, Result};
use crate::geometry::ball_volume;
use crate::immune::{ImmuneIntegrator, ImmuneState};
use crate::morphology::{classify_outcome, MorphologyFrame, Outcome};
use crate::phenotype::{PhenotypeId, NUM_PHENOTYPES};
use crate::stats::spearman;
use crate::therapy::TherapyState;

pub const TIMESERIES_HEADER: &str = "t_days,n_original,n_c05_05,n_c0_1,n_c025_075,n_c075_025,n_c1_0,n_ctl,A0,A1,C0,C1,C2,Rg_um,M,H";
pub const SNAPSHOT_HEADER: &str = "kind,phenotype,x_um,y_um,z_um";

/// One recorded row of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimFrame {
    pub t_days: f64,
    pub counts: [usize; NUM_PHENOTYPES],
    pub n_ctl: usize,
    pub immune: ImmuneState,
    pub morphology: MorphologyFrame,
}

impl SimFrame {
    pub fn population(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), |x| format!("{x:.6}"));
        let mut row = format!("{:.6}", self.t_days);
        for c in self.counts {
            row.push_str(&format!(",{c}"));
        }
        let s = &self.immune;
        row.push_str(&format!(
            ",{},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            self.n_ctl,
            s.a0,
            s.a1,
            s.c0,
            s.c1,
            s.c2,
            opt(self.morphology.radius_of_gyration),
            opt(self.morphology.roughness),
            opt(self.morphology.shannon),
        ));
        row
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub seed: u64,
    /// Absent when the series was too short to classify.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    /// The lesion hit the population cap.
    pub capped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extinction_day: Option<f64>,
    pub final_day: f64,
    pub final_population: usize,
    pub final_ctl: usize,
    pub max_h: f64,
    pub max_m: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for time series, snapshots and the summary.
    pub out_dir: Option<PathBuf>,
    /// Check world invariants every this many ticks.
    pub invariant_check_every: Option<u64>,
    /// Keep the per-step event counters.
    pub keep_event_log: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub frames: Vec<SimFrame>,
    pub summary: RunSummary,
    pub event_log: Vec<StepStats>,
}

/// Volume of the reference domain in mm³; the 1000 cells per concentration
/// unit bridge relies on it being 1.
pub fn reference_volume_mm3() -> f64 {
    ball_volume(REFERENCE_RADIUS) / 1e9
}

fn check_unit_bridge() -> Result<()> {
    let v = reference_volume_mm3();
    if (v - 1.0).abs() >= 1e-3 {
        return Err(Error::config(format!("reference domain is {v} mm³, not 1")));
    }
    Ok(())
}

fn days_to_ticks(days: f64, dt_days: f64) -> u64 {
    ((days / dt_days).round() as u64).max(1)
}

/// A single coupled run, advanced tick by tick.
pub struct Simulation {
    cfg: ExperimentConfig,
    world: World,
    immune: ImmuneIntegrator,
    therapy: TherapyState,
    bridge: f64,
    alpha_factor: f64,
    frame_every: u64,
    snapshot_every: Option<u64>,
    end_tick: u64,
    capped: bool,
    event_log: Option<Vec<StepStats>>,
}

impl Simulation {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        check_unit_bridge()?;
        let bridge = cfg.cells_per_concentration_unit();
        let cfg = cfg.scaled();
        let dt_days = cfg.abm.dt_days();
        let mut world =
            World::new(cfg.abm.clone(), cfg.phenotypes.clone(), cfg.mutation, cfg.seed)?;
        seed_initial(&mut world, &cfg.initial)?;
        let immune =
            ImmuneIntegrator::new(cfg.immune.clone(), cfg.immune.initial_state(), dt_days)?;
        let therapy = TherapyState::new(&cfg.protocol, &cfg.phenotypes, dt_days, cfg.seed)?;
        Ok(Self {
            frame_every: days_to_ticks(cfg.output.frame_every_days, dt_days),
            snapshot_every: cfg.output.snapshot_every_days.map(|d| days_to_ticks(d, dt_days)),
            end_tick: (cfg.duration_days / dt_days).round() as u64,
            cfg,
            world,
            immune,
            therapy,
            bridge,
            alpha_factor: 1.0,
            capped: false,
            event_log: None,
        })
    }

    /// The configuration actually simulated, with scaling applied.
    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn immune_state(&self) -> ImmuneState {
        self.immune.state()
    }

    pub fn tick(&self) -> u64 {
        self.world.tick()
    }

    pub fn keep_event_log(&mut self) {
        self.event_log.get_or_insert_with(Vec::new);
    }

    /// Tumour concentration seen by the immune model.
    pub fn tumour_concentration(&self) -> f64 {
        self.world.cancer_count() as f64 / self.bridge
    }

    pub fn is_finished(&self) -> bool {
        self.world.tick() >= self.end_tick || self.world.cancer_count() == 0 || self.capped
    }

    /// Advances one step of Δt.
    pub fn step(&mut self) -> Result<StepStats> {
        let th = self.therapy.step(self.world.tick());
        if th.alpha_multiplier != self.alpha_factor {
            self.immune.scale_alpha(th.alpha_multiplier / self.alpha_factor);
            self.alpha_factor = th.alpha_multiplier;
        }
        let inputs = |c2| StepInputs {
            c2,
            p_recog: th.p_recog,
            chemo_kill: th.chemo_kill,
            boost_quota: th.boost_quota,
        };
        let stats = match self.cfg.coupling {
            Coupling::Lagged => {
                let state = self.immune.step(self.tumour_concentration())?;
                self.world.step(&inputs(state.c2))
            }
            Coupling::SameTick => {
                let stats = self.world.step(&inputs(self.immune.state().c2));
                self.immune.step(self.tumour_concentration())?;
                stats
            }
        };
        if self.world.cancer_count() >= self.cfg.population_cap {
            self.capped = true;
        }
        if let Some(log) = &mut self.event_log {
            log.push(stats);
        }
        Ok(stats)
    }

    pub fn frame(&self) -> SimFrame {
        let positions = self.world.cancer_positions();
        let counts = self.world.phenotype_counts();
        SimFrame {
            t_days: self.world.time_days(),
            counts,
            n_ctl: self.world.ctl_count(),
            immune: self.immune.state(),
            morphology: MorphologyFrame::measure(&positions, counts, self.cfg.abm.r),
        }
    }

    pub fn snapshot_rows(&self) -> Vec<String> {
        self.world
            .agents()
            .into_iter()
            .map(|a| {
                let (kind, pheno) = match a.kind {
                    AgentKind::Cancer(p) => ("cancer", p.name()),
                    AgentKind::Ctl(_) => ("ctl", ""),
                };
                format!("{kind},{pheno},{:.6},{:.6},{:.6}", a.pos.x, a.pos.y, a.pos.z)
            })
            .collect()
    }

    /// Runs to the end, writing outputs as they are produced. On an error
    /// the rows recorded so far are flushed before it is returned.
    pub fn run(mut self, opts: &RunOptions) -> Result<RunResult> {
        if opts.keep_event_log {
            self.keep_event_log();
        }
        self.world.set_invariant_checks(opts.invariant_check_every);
        let mut out = match &opts.out_dir {
            Some(dir) => Some(OutputWriter::create(dir)?),
            None => None,
        };
        let mut frames = Vec::new();
        record(&self, &mut frames, &mut out)?;
        if let (Some(w), Some(_)) = (&mut out, self.snapshot_every) {
            w.snapshot(self.world.tick(), self.world.time_days(), &self.snapshot_rows())?;
        }
        let mut failure = None;
        while !self.is_finished() {
            if let Err(e) = self.step() {
                failure = Some(e);
                break;
            }
            let tick = self.world.tick();
            if tick.is_multiple_of(self.frame_every) || self.is_finished() {
                record(&self, &mut frames, &mut out)?;
            }
            if let (Some(w), Some(every)) = (&mut out, self.snapshot_every) {
                if tick.is_multiple_of(every) {
                    w.snapshot(tick, self.world.time_days(), &self.snapshot_rows())?;
                }
            }
        }
        if let Some(w) = &mut out {
            w.flush()?;
        }
        if let Some(e) = failure {
            return Err(e);
        }
        let summary = summarize(&self.cfg, &frames, self.capped);
        if let (Some(dir), Some(_)) = (&opts.out_dir, &out) {
            fs::write(dir.join("summary.toml"), toml::to_string(&summary)?)?;
        }
        Ok(RunResult { frames, summary, event_log: self.event_log.unwrap_or_default() })
    }
}

fn record(sim: &Simulation, frames: &mut Vec<SimFrame>, out: &mut Option<OutputWriter>) -> Result<()> {
    let f = sim.frame();
    if let Some(w) = out {
        w.row(&f)?;
    }
    frames.push(f);
    Ok(())
}

fn seed_initial(world: &mut World, init: &InitialCondition) -> Result<()> {
    match *init {
        InitialCondition::Empty => Ok(()),
        InitialCondition::Single { phenotype } => {
            world.add_cancer(Default::default(), phenotype).map(|_| ())
        }
        InitialCondition::Lesion { n, min_fraction, only } => {
            let labels = match only {
                Some(p) => vec![p; n],
                None => heterogeneous_labels(n, min_fraction, &mut world.seeding_rng())?,
            };
            world.seed_lesion(&labels)
        }
    }
}

pub fn summarize(cfg: &ExperimentConfig, frames: &[SimFrame], capped: bool) -> RunSummary {
    let t: Vec<f64> = frames.iter().map(|f| f.t_days).collect();
    let n: Vec<f64> = frames.iter().map(|f| f.population() as f64).collect();
    let outcome =
        if capped { Some(Outcome::Escape) } else { classify_outcome(&t, &n, &cfg.outcome) };
    let last = frames.last();
    let fold_max = |g: fn(&SimFrame) -> Option<f64>| {
        frames.iter().filter_map(g).fold(0.0, f64::max)
    };
    RunSummary {
        name: cfg.name.clone(),
        seed: cfg.seed,
        outcome,
        capped,
        extinction_day: frames.iter().find(|f| f.population() == 0).map(|f| f.t_days),
        final_day: last.map_or(0.0, |f| f.t_days),
        final_population: last.map_or(0, |f| f.population()),
        final_ctl: last.map_or(0, |f| f.n_ctl),
        max_h: fold_max(|f| f.morphology.shannon),
        max_m: fold_max(|f| f.morphology.roughness),
    }
}

pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunResult> {
    Simulation::new(cfg)?.run(opts)
}

struct OutputWriter {
    dir: PathBuf,
    series: BufWriter<File>,
}

impl OutputWriter {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let mut series = BufWriter::new(File::create(dir.join("timeseries.csv"))?);
        writeln!(series, "{TIMESERIES_HEADER}")?;
        Ok(Self { dir: dir.to_path_buf(), series })
    }

    fn row(&mut self, f: &SimFrame) -> Result<()> {
        writeln!(self.series, "{}", f.csv_row())?;
        Ok(())
    }

    fn snapshot(&mut self, tick: u64, t_days: f64, rows: &[String]) -> Result<()> {
        let name = format!("snapshot_{tick:09}.csv");
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        writeln!(w, "# t_days={t_days:.6}")?;
        writeln!(w, "{SNAPSHOT_HEADER}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        w.flush()?;
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        self.series.flush()?;
        Ok(())
    }
}

// ---- sweeps --------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub values: Vec<(String, f64)>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub param: String,
    pub target: &'static str,
    pub rho: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub points: Vec<(SweepPoint, std::result::Result<RunSummary, String>)>,
    pub correlations: Vec<Correlation>,
}

impl SweepReport {
    /// Successful summaries at the grid value `value` of the first axis.
    pub fn at(&self, value: f64) -> Vec<&RunSummary> {
        self.points
            .iter()
            .filter(|(p, _)| p.values.first().is_some_and(|(_, v)| *v == value))
            .filter_map(|(_, r)| r.as_ref().ok())
            .collect()
    }
}

/// Every (grid point, seed) combination with its configuration, in grid
/// order with the last axis varying fastest and seeds innermost.
pub fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<(SweepPoint, ExperimentConfig)>> {
    let sweep = cfg.sweep.clone().unwrap_or_default();
    let seeds = if sweep.seeds.is_empty() { vec![cfg.seed] } else { sweep.seeds.clone() };
    let mut combos: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for axis in &sweep.axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push((axis.param.clone(), v));
                    c
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for values in combos {
        for &seed in &seeds {
            let mut point_cfg = cfg.clone();
            point_cfg.sweep = None;
            point_cfg.seed = seed;
            for (name, v) in &values {
                point_cfg.set_param(name, *v)?;
            }
            let index = out.len();
            out.push((SweepPoint { index, values: values.clone(), seed }, point_cfg));
        }
    }
    Ok(out)
}

/// Runs every sweep point; failures are recorded per point. Results do not
/// depend on `parallel`.
pub fn run_sweep(cfg: &ExperimentConfig, out_dir: Option<&Path>, parallel: bool) -> Result<SweepReport> {
    let points = sweep_points(cfg)?;
    let run_point = |(p, c): &(SweepPoint, ExperimentConfig)| {
        let opts = RunOptions {
            out_dir: out_dir.map(|d| d.join(format!("point_{:04}", p.index))),
            ..Default::default()
        };
        let res = run(c, &opts).map(|r| r.summary).map_err(|e| e.to_string());
        (p.clone(), res)
    };
    let results: Vec<_> = if parallel {
        points.par_iter().map(run_point).collect()
    } else {
        points.iter().map(run_point).collect()
    };
    let correlations = sweep_correlations(cfg, &results);
    let report = SweepReport { points: results, correlations };
    if let Some(dir) = out_dir {
        write_sweep_files(dir, cfg, &report)?;
    }
    Ok(report)
}

fn sweep_correlations(
    cfg: &ExperimentConfig,
    results: &[(SweepPoint, std::result::Result<RunSummary, String>)],
) -> Vec<Correlation> {
    let axes = cfg.sweep.as_ref().map(|s| s.axes.clone()).unwrap_or_default();
    let ok: Vec<(&SweepPoint, &RunSummary)> =
        results.iter().filter_map(|(p, r)| r.as_ref().ok().map(|s| (p, s))).collect();
    let mut out = Vec::new();
    for (k, axis) in axes.iter().enumerate() {
        let x: Vec<f64> = ok.iter().map(|(p, _)| p.values[k].1).collect();
        let pop: Vec<f64> = ok.iter().map(|(_, s)| s.final_population as f64).collect();
        // runs that never went extinct are censored at their last day
        let ext: Vec<f64> =
            ok.iter().map(|(_, s)| s.extinction_day.unwrap_or(s.final_day)).collect();
        for (target, y) in [("final_population", pop), ("extinction_day", ext)] {
            out.push(Correlation { param: axis.param.clone(), target, rho: spearman(&x, &y), n: x.len() });
        }
    }
    out
}

fn write_sweep_files(dir: &Path, cfg: &ExperimentConfig, report: &SweepReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    let axes: Vec<String> =
        cfg.sweep.as_ref().map(|s| s.axes.iter().map(|a| a.param.clone()).collect()).unwrap_or_default();
    let mut w = BufWriter::new(File::create(dir.join("sweep_summary.csv"))?);
    let mut header = vec!["point".to_string()];
    header.extend(axes.iter().cloned());
    header.extend(
        ["seed", "outcome", "capped", "final_population", "extinction_day", "max_H", "max_M", "error"]
            .map(String::from),
    );
    writeln!(w, "{}", header.join(","))?;
    for (p, r) in &report.points {
        let mut row = vec![p.index.to_string()];
        row.extend(p.values.iter().map(|(_, v)| v.to_string()));
        row.push(p.seed.to_string());
        match r {
            Ok(s) => {
                row.push(s.outcome.map_or("inconclusive".into(), |o| o.to_string()));
                row.push(s.capped.to_string());
                row.push(s.final_population.to_string());
                row.push(s.extinction_day.map_or("NaN".into(), |d| format!("{d:.6}")));
                row.push(format!("{:.6}", s.max_h));
                row.push(format!("{:.6}", s.max_m));
                row.push(String::new());
            }
            Err(e) => {
                row.extend(["error", "", "", "", "", ""].map(String::from));
                row.push(format!("\"{}\"", e.replace('"', "'")));
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    let mut c = BufWriter::new(File::create(dir.join("correlations.csv"))?);
    writeln!(c, "param,target,spearman_rho,n")?;
    for corr in &report.correlations {
        let rho = corr.rho.map_or("NaN".into(), |v| format!("{v:.6}"));
        writeln!(c, "{},{},{},{}", corr.param, corr.target, rho, corr.n)?;
    }
    c.flush()?;
    Ok(())
}

/// Phenotypes with at least one living cell in a frame.
pub fn surviving_phenotypes(frame: &SimFrame) -> Vec<PhenotypeId> {
    PhenotypeId::ALL.into_iter().filter(|p| frame.counts[p.index()] > 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_bridge_constant() {
        let v = reference_volume_mm3();
        assert!((v - 1.0).abs() < 1e-3, "{v}");
        check_unit_bridge().unwrap();
    }

    #[test]
    fn empty_lesion_is_eradicated_at_once() {
        let cfg = ExperimentConfig { initial: InitialCondition::Empty, ..Default::default() };
        let r = run(&cfg, &RunOptions::default()).unwrap();
        assert_eq!(r.frames.len(), 1);
        assert_eq!(r.frames[0].t_days, 0.0);
        assert_eq!(r.summary.outcome, Some(Outcome::Eradication));
        assert_eq!(r.summary.extinction_day, Some(0.0));
    }

    #[test]
    fn header_matches_row_width() {
        let cfg = ExperimentConfig { duration_days: 0.01, ..Default::default() };
        let r = run(&cfg, &RunOptions::default()).unwrap();
        let cols = TIMESERIES_HEADER.split(',').count();
        for f in &r.frames {
            assert_eq!(f.csv_row().split(',').count(), cols);
        }
    }

    #[test]
    fn sweep_grid_order() {
        let mut cfg = ExperimentConfig::default();
        cfg.sweep = Some(crate::config::SweepConfig {
            axes: vec![
                crate::config::SweepAxis { param: "P_mut".into(), values: vec![0.0, 0.5] },
                crate::config::SweepAxis { param: "alpha".into(), values: vec![1e-9, 1e-8, 1e-7] },
            ],
            seeds: vec![4, 5],
        });
        let pts = sweep_points(&cfg).unwrap();
        assert_eq!(pts.len(), 12);
        assert_eq!(pts[0].0.values, vec![("P_mut".into(), 0.0), ("alpha".into(), 1e-9)]);
        assert_eq!(pts[1].0.seed, 5);
        assert_eq!(pts[2].1.immune.alpha, 1e-8);
        assert_eq!(pts[11].1.mutation.p_mut, 0.5);
    }
}
