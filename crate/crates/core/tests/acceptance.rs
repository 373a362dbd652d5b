//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process fails if any check fails. Pass check numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 3 6`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use lesion_sim::abm::{AbmParams, AgentKind, StepInputs, World};
use lesion_sim::config::InitialCondition;
use lesion_sim::geometry::Vec3;
use lesion_sim::immune::{ImmuneIntegrator, ImmuneParams, ImmuneState};
use lesion_sim::morphology::{
    classify_outcome, linear_fit, radius_of_gyration, roughness, roughness_from, shannon,
    staircase_factor, Outcome, VoxelMask,
};
use lesion_sim::phenotype::{MutationConfig, PhenotypeId, PhenotypeRegistry, NUM_PHENOTYPES};
use lesion_sim::presets::{CHEMO_BOOST_SEED, CHEMO_ONLY_SEED};
use lesion_sim::rng::per_step_probability;
use lesion_sim::sim::{run_sweep, surviving_phenotypes};
use lesion_sim::therapy::{TherapyEvent, TherapyProtocol, TherapyState};
use lesion_sim::{load_preset, run, ExperimentConfig, RunOptions, RunResult, SimFrame, PRESET_NAMES};

const DESK: f64 = 0.5;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within_budget(v: Verdict, elapsed: Duration, budget_s: u64) -> Verdict {
    let secs = elapsed.as_secs_f64();
    let over = secs > budget_s as f64;
    Verdict {
        pass: v.pass && !over,
        detail: format!("{}; {secs:.1} s of {budget_s} s{}", v.detail, if over { " (too slow)" } else { "" }),
    }
}

fn run_quiet(cfg: &ExperimentConfig) -> RunResult {
    run(cfg, &RunOptions::default()).expect("run")
}

fn frame_at(frames: &[SimFrame], day: f64) -> &SimFrame {
    frames.iter().rev().find(|f| f.t_days <= day + 1e-9).unwrap_or(&frames[0])
}

// 1 -------------------------------------------------------------------------

fn dde_rest() -> Verdict {
    let p = ImmuneParams::default();
    let dt = 1.0 / 1440.0;
    let steps = (500.0 / dt) as usize;
    let mut worst: f64 = 0.0;
    for a0 in [p.initial_state().a0, 0.0, 0.02] {
        let start = ImmuneState { a0, ..p.initial_state() };
        let mut dde = ImmuneIntegrator::new(p.clone(), start, dt).unwrap();
        for _ in 0..steps {
            dde.step(0.0).unwrap();
        }
        worst = worst.max((dde.state().a0 - p.s_a / p.d0).abs());
    }
    let target = p.s_a / p.d0;
    verdict(
        (target - 0.01).abs() < 1e-15 && worst <= 1e-6,
        format!("s_A/d0 = {target}, max |A0(500) - 0.01| = {worst:.2e} from A0(0) in {{0.01, 0, 0.02}}"),
    )
}

// 2 -------------------------------------------------------------------------

struct Tally {
    name: &'static str,
    trials: u64,
    hits: u64,
    p: f64,
}

impl Tally {
    fn z(&self) -> f64 {
        let n = self.trials as f64;
        (self.hits as f64 - n * self.p) / (n * self.p * (1.0 - self.p)).sqrt()
    }
}

const TRIALS: u64 = 1_000_000;

fn isolated_world(seed: u64) -> World {
    let mutation = MutationConfig { p_mut: 0.0, ..Default::default() };
    World::new(AbmParams::default(), PhenotypeRegistry::default(), mutation, seed).unwrap()
}

fn grid_sites(n_side: i32, spacing: f64) -> Vec<Vec3> {
    let c = (n_side - 1) as f64 / 2.0;
    let mut out = Vec::new();
    for i in 0..n_side {
        for j in 0..n_side {
            for k in 0..n_side {
                out.push(Vec3::new(i as f64 - c, j as f64 - c, k as f64 - c) * spacing);
            }
        }
    }
    out
}

fn division_tally() -> Tally {
    let mut w = isolated_world(21);
    for site in grid_sites(10, 40.0) {
        w.add_cancer(site, PhenotypeId::C1_0).unwrap();
    }
    let inputs = StepInputs::untreated(0.0, w.registry());
    let (mut trials, mut hits) = (0, 0);
    while trials < TRIALS {
        trials += w.cancer_count() as u64;
        let s = w.step(&inputs);
        hits += u64::from(s.divisions + s.failed_divisions);
    }
    Tally { name: "division", trials, hits, p: w.params().p_division(1.0) }
}

/// Kill, recruitment and death draws of CTLs engaged on a tangent target.
fn ctl_tallies() -> [Tally; 3] {
    let mut w = isolated_world(22);
    let recog = [1.0; NUM_PHENOTYPES];
    for site in grid_sites(8, 60.0) {
        w.add_cancer(site, PhenotypeId::Original).unwrap();
        w.add_ctl(site + Vec3::new(10.2, 0.0, 0.0)).unwrap();
    }
    let p = w.params().clone();
    let mut kill = Tally { name: "kill", trials: 0, hits: 0, p: p.p_kill() };
    let mut recruit = Tally { name: "recruitment", trials: 0, hits: 0, p: p.p_recruit() };
    let mut death = Tally { name: "CTL death", trials: 0, hits: 0, p: p.p_death() };
    while kill.trials < TRIALS || death.trials < TRIALS {
        let roster: Vec<(u64, bool, Option<Vec3>)> = w
            .agents()
            .iter()
            .filter_map(|a| match a.kind {
                AgentKind::Ctl(st) => {
                    let target = st.engaged.and_then(|t| w.agent(t.id)).filter(|t| t.is_alive());
                    Some((a.id, target.is_some(), target.map(|t| t.pos)))
                }
                _ => None,
            })
            .collect();
        let mut refill = Vec::new();
        for (id, engaged, target_pos) in roster {
            let Some(slot) = w.slot_of(id) else { continue };
            let ev = w.ctl_step(slot, &recog);
            death.trials += 1;
            death.hits += u64::from(ev.died);
            if ev.died || !engaged {
                continue;
            }
            kill.trials += 1;
            recruit.trials += 1;
            recruit.hits += u64::from(ev.recruited.is_some());
            if ev.killed.is_some() {
                kill.hits += 1;
                refill.extend(target_pos);
            }
        }
        w.flush_removals();
        for pos in refill {
            let _ = w.add_cancer(pos, PhenotypeId::Original);
        }
        if w.ctl_count() < 256 {
            for site in grid_sites(8, 60.0) {
                let _ = w.add_ctl(site + Vec3::new(0.0, 25.0, 0.0));
            }
        }
    }
    [kill, recruit, death]
}

fn calibration() -> Verdict {
    let mut tallies = vec![division_tally()];
    tallies.extend(ctl_tallies());
    let pass = tallies.iter().all(|t| t.trials >= TRIALS && t.z().abs() <= 3.0);
    let detail = tallies
        .iter()
        .map(|t| format!("{} z = {:+.2} (n = {})", t.name, t.z(), t.trials))
        .collect::<Vec<_>>()
        .join(", ");
    let closed_form = (per_step_probability(1.0, 1440.0) - (1.0 - (-1.0f64 / 1440.0).exp())).abs() < 1e-15;
    verdict(pass && closed_form, detail)
}

// 3 -------------------------------------------------------------------------

fn metric_identities() -> Verdict {
    let h1 = shannon(&[0, 0, 7, 0, 0, 0]).unwrap();
    let h6 = shannon(&[5; 6]).unwrap();
    let h2 = shannon(&[4, 4, 0, 0, 0, 0]).unwrap();
    let rg = radius_of_gyration(&[Vec3::default(), Vec3::new(10.0, 0.0, 0.0)]).unwrap();
    let r = AbmParams::default().r;
    let ball = VoxelMask::build_with(&[Vec3::default()], 20.0 * r, r / 2.0, r).unwrap();
    let m_ball = roughness_from(ball.raw_surface() * staircase_factor(), ball.volume());
    let m_cell = roughness(&[Vec3::default()], r).unwrap();
    let pass = h1 == 0.0
        && (h6 - 1.0).abs() <= 1e-12
        && (h2 - 2f64.ln() / 6f64.ln()).abs() <= 1e-12
        && rg == 5.0
        && (m_ball - 1.0).abs() <= 0.05
        && (m_cell - 1.0).abs() <= 0.05;
    verdict(
        pass,
        format!("H = {h1}, {h6:.15}, {h2:.15}; R_g = {rg}; M(ball 20r) = {m_ball:.4}, M(one cell) = {m_cell:.4}"),
    )
}

// 4, 5 ----------------------------------------------------------------------

struct GrowthFit {
    log_r2: f64,
    rg_r2: f64,
    outcome: Option<Outcome>,
}

fn growth_fit(res: &RunResult) -> GrowthFit {
    // main growth phase: from the first frame with 20 cells to the end
    let phase: Vec<&SimFrame> = res.frames.iter().filter(|f| f.population() >= 20).collect();
    let t: Vec<f64> = phase.iter().map(|f| f.t_days).collect();
    let ln_n: Vec<f64> = phase.iter().map(|f| (f.population() as f64).ln()).collect();
    let rg: Vec<f64> = phase.iter().map(|f| f.morphology.radius_of_gyration.unwrap_or(0.0)).collect();
    GrowthFit {
        log_r2: linear_fit(&t, &ln_n).map_or(0.0, |f| f.2),
        rg_r2: linear_fit(&t, &rg).map_or(0.0, |f| f.2),
        outcome: res.summary.outcome,
    }
}

fn growth_config(seed: u64) -> ExperimentConfig {
    let mut cfg = load_preset("untreated").unwrap();
    cfg.seed = seed;
    cfg.scale = DESK;
    cfg.mutation.p_mut = 0.0;
    cfg.phenotypes.lookup_mut(PhenotypeId::Original).p_recog = 0.0;
    cfg
}

fn untreated_growth() -> (Verdict, Vec<Option<Outcome>>) {
    let fits: Vec<GrowthFit> =
        (1..=10).into_par_iter().map(|s| growth_fit(&run_quiet(&growth_config(s)))).collect();
    let cap = growth_config(1).scaled().population_cap;
    let good = fits.iter().filter(|f| f.log_r2 >= 0.95 && f.rg_r2 >= 0.95).count();
    let min_log = fits.iter().map(|f| f.log_r2).fold(1.0, f64::min);
    let min_rg = fits.iter().map(|f| f.rg_r2).fold(1.0, f64::min);
    let v = verdict(
        good >= 9 && cap == 5000,
        format!("{good}/10 runs with both R² >= 0.95 (min log-fit R² {min_log:.3}, min R_g-fit R² {min_rg:.3}); cap {cap}"),
    );
    (v, fits.iter().map(|f| f.outcome).collect())
}

fn never_stationary(growth_outcomes: &[Option<Outcome>]) -> Verdict {
    let immunogenic: Vec<Option<Outcome>> = (1..=10)
        .into_par_iter()
        .map(|seed| {
            let mut cfg = load_preset("untreated").unwrap();
            cfg.seed = seed;
            cfg.scale = DESK;
            let res = run_quiet(&cfg);
            let t: Vec<f64> = res.frames.iter().map(|f| f.t_days).collect();
            let n: Vec<f64> = res.frames.iter().map(|f| f.population() as f64).collect();
            // the summary and a fresh classification agree unless the cap was hit
            if !res.summary.capped {
                assert_eq!(classify_outcome(&t, &n, &cfg.outcome), res.summary.outcome);
            }
            res.summary.outcome.filter(|_| res.summary.final_day <= 150.0 + 1e-9)
        })
        .collect();
    let all: Vec<Option<Outcome>> = growth_outcomes.iter().chain(&immunogenic).copied().collect();
    let classified = all.iter().filter(|o| o.is_some()).count();
    let count = |o: Outcome| all.iter().filter(|x| **x == Some(o)).count();
    verdict(
        classified == 20 && all.len() == 20,
        format!(
            "{classified}/20 runs classified: {} eradication, {} oscillation, {} escape",
            count(Outcome::Eradication),
            count(Outcome::Oscillation),
            count(Outcome::Escape)
        ),
    )
}

// 6 -------------------------------------------------------------------------

fn chemo_selectivity() -> Verdict {
    let registry = PhenotypeRegistry::default();
    let index_of = |id: PhenotypeId| registry.lookup(id).effective_chemo_index() as usize;
    let mut start = [0usize; 5];
    let mut alive = [0usize; 5];
    let mut per_clone = [(0usize, 0usize); NUM_PHENOTYPES];
    for seed in 0..5u64 {
        let mut w = isolated_world(600 + seed);
        let mut labels: Vec<PhenotypeId> =
            PhenotypeId::ALL.iter().flat_map(|&id| std::iter::repeat_n(id, 1000)).collect();
        labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        w.seed_lesion(&labels).unwrap();
        let initial: Vec<(u64, PhenotypeId)> =
            w.agents().iter().filter_map(|a| a.phenotype().map(|p| (a.id, p))).collect();
        let protocol =
            TherapyProtocol::new(vec![TherapyEvent::Chemo { start_day: 0.0, ch_time: 10.0, ch_eff: 0.25 }]);
        let dt = w.params().dt_days();
        let mut therapy = TherapyState::new(&protocol, &registry, dt, seed).unwrap();
        let mut inputs = StepInputs::untreated(0.0, &registry);
        for tick in 0..(10.0 / dt).round() as u64 {
            inputs.chemo_kill = therapy.step(tick).chemo_kill;
            w.step(&inputs);
        }
        for (id, p) in initial {
            let survived = w.agent(id).is_some_and(|a| a.is_alive());
            start[index_of(p)] += 1;
            alive[index_of(p)] += usize::from(survived);
            per_clone[p.index()].0 += 1;
            per_clone[p.index()].1 += usize::from(survived);
        }
    }
    let frac: Vec<f64> = (0..5).map(|i| alive[i] as f64 / start[i] as f64).collect();
    let decreasing = frac.windows(2).all(|w| w[0] > w[1]);
    let c1_0 = per_clone[PhenotypeId::C1_0.index()];
    let expected: Vec<f64> =
        [10.0, 7.5, 5.0, 2.5].iter().map(|k: &f64| (-10.0 / k).exp()).chain([0.0]).collect();
    verdict(
        decreasing && c1_0.1 == 0,
        format!(
            "surviving fraction by chemo index 0..4: {} (exp(-Ch_time/Ch_kill): {}); (1,0) survivors {}",
            frac.iter().map(|f| format!("{f:.3}")).collect::<Vec<_>>().join(", "),
            expected.iter().map(|f| format!("{f:.3}")).collect::<Vec<_>>().join(", "),
            c1_0.1
        ),
    )
}

// 7 -------------------------------------------------------------------------

struct ChemoRun {
    seed: u64,
    h_before: f64,
    n_before: usize,
    eradicated_by_75: bool,
}

fn chemo_run(seed: u64) -> ChemoRun {
    let mut cfg = load_preset("chemo-only").unwrap();
    cfg.seed = seed;
    cfg.scale = DESK;
    let res = run_quiet(&cfg);
    let before = frame_at(&res.frames, 60.0);
    ChemoRun {
        seed,
        h_before: before.morphology.shannon.unwrap_or(0.0),
        n_before: before.population(),
        eradicated_by_75: res.summary.extinction_day.is_some_and(|d| d < 75.0),
    }
}

fn case_b() -> Verdict {
    let seeds: Vec<u64> = (CHEMO_ONLY_SEED..=CHEMO_ONLY_SEED + 10).collect();
    let runs: Vec<ChemoRun> = seeds.into_par_iter().map(chemo_run).collect();
    let preset = &runs[0];
    let low_h: Vec<&ChemoRun> = runs[1..].iter().filter(|r| r.h_before < 0.3).collect();
    let cleared = low_h.iter().filter(|r| r.eradicated_by_75).count();
    let share = if low_h.is_empty() { 0.0 } else { cleared as f64 / low_h.len() as f64 };
    verdict(
        preset.eradicated_by_75 && !low_h.is_empty() && share >= 0.6,
        format!(
            "preset seed {} (H {:.2}, {} cells at day 60) eradicated before day 75: {}; nearby seeds with H < 0.3: {}/{} eradicated [{}]",
            preset.seed,
            preset.h_before,
            preset.n_before,
            preset.eradicated_by_75,
            cleared,
            low_h.len(),
            low_h.iter().map(|r| format!("{}:{}:{}", r.seed, r.n_before, u8::from(r.eradicated_by_75))).collect::<Vec<_>>().join(" ")
        ),
    )
}

// 8 -------------------------------------------------------------------------

fn bottleneck() -> Verdict {
    let allowed: BTreeSet<PhenotypeId> =
        [PhenotypeId::C0_1, PhenotypeId::C025_075, PhenotypeId::Original].into_iter().collect();
    let results: Vec<(u64, f64, Vec<PhenotypeId>)> = (CHEMO_BOOST_SEED..CHEMO_BOOST_SEED + 10)
        .into_par_iter()
        .map(|seed| {
            let mut cfg = load_preset("chemo+boost").unwrap();
            cfg.seed = seed;
            cfg.scale = DESK;
            cfg.duration_days = 70.0;
            let res = run_quiet(&cfg);
            let h = frame_at(&res.frames, 50.0).morphology.shannon.unwrap_or(0.0);
            (seed, h, surviving_phenotypes(frame_at(&res.frames, 70.0)))
        })
        .collect();
    let ok = results.iter().filter(|(_, _, s)| s.iter().all(|p| allowed.contains(p))).count();
    verdict(
        ok >= 8,
        format!(
            "{ok}/10 seeds end chemotherapy with survivors within {{(0,1), (0.25,0.75), original}} [{}]",
            results
                .iter()
                .map(|(seed, h, s)| format!(
                    "{seed}: H50 {h:.2} -> {}",
                    s.iter().map(|p| p.name()).collect::<Vec<_>>().join("+")
                ))
                .collect::<Vec<_>>()
                .join("; ")
        ),
    )
}

// 9 -------------------------------------------------------------------------

fn abscopal_config(preset: &str, seed: u64) -> ExperimentConfig {
    let mut cfg = load_preset(preset).unwrap();
    cfg.seed = seed;
    cfg.scale = DESK;
    // 5000 cells after scaling by DESK³
    if let InitialCondition::Lesion { n, .. } = &mut cfg.initial {
        *n = (5000.0 / DESK.powi(3)).round() as usize;
    }
    assert_eq!(cfg.scaled().initial, {
        let mut i = cfg.initial.clone();
        if let InitialCondition::Lesion { n, .. } = &mut i {
            *n = 5000;
        }
        i
    });
    cfg
}

fn abscopal() -> Verdict {
    let arms = [
        "abscopal-combo",
        "abscopal-boost-only",
        "abscopal-rt-only",
        "abscopal-control",
        "abscopal-unrelated",
        "abscopal-suppressed",
    ];
    let jobs: Vec<(usize, u64)> = (0..arms.len()).flat_map(|a| (1..=3).map(move |s| (a, s))).collect();
    let results: Vec<(usize, RunResult)> =
        jobs.into_par_iter().map(|(a, s)| (a, run_quiet(&abscopal_config(arms[a], s)))).collect();
    let arm = |a: usize| results.iter().filter(move |(i, _)| *i == a).map(|(_, r)| r);
    let day30 = |a: usize| arm(a).map(|r| frame_at(&r.frames, 30.0).population() as f64).sum::<f64>() / 3.0;
    let means: Vec<f64> = (0..4).map(day30).collect();
    let ordering = means[0] < means[1] && means[1] < means[2] && means[1] < means[3];
    let min_h = arm(0)
        .flat_map(|r| r.frames.iter().filter(|f| f.population() > 0).filter_map(|f| f.morphology.shannon))
        .fold(1.0, f64::min);
    let outcomes = |a: usize| arm(a).map(|r| r.summary.outcome).collect::<Vec<_>>();
    let escaped = |a: usize| outcomes(a).iter().all(|o| *o == Some(Outcome::Escape));
    verdict(
        ordering && min_h > 0.9 && escaped(4) && escaped(5),
        format!(
            "day-30 mean population combo {:.0} < boost {:.0} < rt {:.0} / control {:.0}: {ordering}; combo min H {min_h:.3}; unrelated {:?}; suppressed {:?}",
            means[0], means[1], means[2], means[3], outcomes(4), outcomes(5)
        ),
    )
}

// 10 ------------------------------------------------------------------------

fn mutation_rate() -> Verdict {
    let mut cfg = load_preset("pmut-sweep").unwrap();
    cfg.scale = DESK;
    let sweep = cfg.sweep.as_mut().unwrap();
    sweep.axes[0].values = vec![0.05, 0.2, 0.5, 0.8];
    sweep.seeds = vec![1, 2, 3];
    let report = run_sweep(&cfg, None, true).unwrap();
    let mean = |v: f64, f: fn(&lesion_sim::RunSummary) -> f64| {
        let rs = report.at(v);
        assert_eq!(rs.len(), 3, "P_mut = {v}");
        rs.iter().map(|r| f(r)).sum::<f64>() / rs.len() as f64
    };
    let h: Vec<f64> = [0.05, 0.2, 0.5, 0.8].iter().map(|&v| mean(v, |r| r.max_h)).collect();
    let m: Vec<f64> = [0.05, 0.2, 0.5, 0.8].iter().map(|&v| mean(v, |r| r.max_m)).collect();
    let h_peak = h[1].max(h[2]) > h[0].max(h[3]);
    let m_peak = m[1] > m[3];
    verdict(
        h_peak && m_peak,
        format!(
            "mean max H at P_mut 0.05/0.2/0.5/0.8: {:.3}/{:.3}/{:.3}/{:.3}; mean max M: {:.3}/{:.3}/{:.3}/{:.3}",
            h[0], h[1], h[2], h[3], m[0], m[1], m[2], m[3]
        ),
    )
}

// 11 ------------------------------------------------------------------------

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if path.is_dir() {
            for (sub, bytes) in read_dir_sorted(&path) {
                out.push((format!("{name}/{sub}"), bytes));
            }
        } else {
            out.push((name, fs::read(&path).unwrap()));
        }
    }
    out.sort();
    out
}

fn determinism() -> Verdict {
    let mut mismatched = Vec::new();
    let mut files = 0;
    for name in PRESET_NAMES {
        let mut cfg = load_preset(name).unwrap();
        cfg.scale = DESK;
        cfg.duration_days = cfg.duration_days.min(2.0);
        cfg.output.snapshot_every_days = Some(1.0);
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            run(&cfg, &RunOptions { out_dir: Some(d.path().into()), ..Default::default() }).unwrap();
        }
        let (a, b) = (read_dir_sorted(dirs[0].path()), read_dir_sorted(dirs[1].path()));
        files += a.len();
        if a != b || !a.iter().any(|(n, _)| n.starts_with("snapshot_")) {
            mismatched.push(name);
        }
    }
    let mut cfg = load_preset("pmut-sweep").unwrap();
    cfg.scale = DESK;
    cfg.duration_days = 1.0;
    let sweep = cfg.sweep.as_mut().unwrap();
    sweep.axes[0].values = vec![0.2, 0.8];
    sweep.seeds = vec![1, 2];
    let (serial, parallel) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_sweep(&cfg, Some(serial.path()), false).unwrap();
    run_sweep(&cfg, Some(parallel.path()), true).unwrap();
    let (a, b) = (read_dir_sorted(serial.path()), read_dir_sorted(parallel.path()));
    let sweep_ok = a == b && a.iter().filter(|(n, _)| n.ends_with("timeseries.csv")).count() == 4;
    verdict(
        mismatched.is_empty() && sweep_ok,
        format!(
            "{} presets, {files} files compared, mismatches {mismatched:?}; serial vs parallel sweep ({} files) identical: {sweep_ok}",
            PRESET_NAMES.len(),
            a.len()
        ),
    )
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected = |k: u32| wanted.is_empty() || wanted.contains(&k);
    let mut failures = 0;
    let mut report = |k: u32, label: &str, v: Verdict| {
        println!("{} {k:>2} {label}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failures += usize::from(!v.pass);
    };
    let timed = |f: &dyn Fn() -> Verdict, budget: u64| {
        let t0 = Instant::now();
        let v = f();
        within_budget(v, t0.elapsed(), budget)
    };

    if selected(1) {
        report(1, "DDE rest equilibrium", timed(&dde_rest, 5));
    }
    if selected(2) {
        report(2, "probability calibration", timed(&calibration, 30));
    }
    if selected(3) {
        report(3, "metric identities", timed(&metric_identities, 5));
    }
    if selected(4) || selected(5) {
        let t0 = Instant::now();
        let (v4, outcomes) = untreated_growth();
        let t4 = t0.elapsed();
        if selected(4) {
            report(4, "untreated growth regime", within_budget(v4, t4, 300));
        }
        if selected(5) {
            let v5 = never_stationary(&outcomes);
            report(5, "never stationary", within_budget(v5, t0.elapsed(), 300));
        }
    }
    if selected(6) {
        report(6, "chemotherapy selectivity", timed(&chemo_selectivity, 120));
    }
    if selected(7) {
        report(7, "low-heterogeneity eradication", timed(&case_b, 600));
    }
    if selected(8) {
        report(8, "combination bottleneck", timed(&bottleneck, 600));
    }
    if selected(9) {
        report(9, "abscopal contrast", timed(&abscopal, 1200));
    }
    if selected(10) {
        report(10, "mutation-rate non-monotonicity", timed(&mutation_rate, 1800));
    }
    if selected(11) {
        report(11, "determinism", timed(&determinism, 300));
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance check(s) failed");
        ExitCode::FAILURE
    }
}
