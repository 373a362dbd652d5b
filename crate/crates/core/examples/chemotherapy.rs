//! Chemotherapy alone versus chemotherapy after a CTL boost.
//!
//! `cargo run --release --example chemotherapy`

use lesion_sim::presets::{CHEMO_BOOST_SEED, CHEMO_ONLY_SEED};
use lesion_sim::sim::surviving_phenotypes;
use lesion_sim::{load_preset, run, RunOptions, SimFrame};

fn at(frames: &[SimFrame], day: f64) -> &SimFrame {
    frames.iter().rev().find(|f| f.t_days <= day + 1e-9).unwrap_or(&frames[0])
}

fn main() -> lesion_sim::Result<()> {
    for (preset, seed) in [("chemo-only", CHEMO_ONLY_SEED), ("chemo+boost", CHEMO_BOOST_SEED)] {
        let mut cfg = load_preset(preset)?;
        cfg.seed = seed;
        cfg.scale = 0.5;
        let res = run(&cfg, &RunOptions::default())?;
        println!("{preset} (seed {seed})");
        for day in [50.0, 60.0, 65.0, 70.0, 80.0, 100.0] {
            let f = at(&res.frames, day);
            let names: Vec<&str> = surviving_phenotypes(f).iter().map(|p| p.name()).collect();
            println!("  day {day:>5}  N {:>6}  CTL {:>5}  {}", f.population(), f.n_ctl, names.join(" "));
        }
        println!("  extinction {:?}, outcome {:?}", res.summary.extinction_day, res.summary.outcome);
    }
    Ok(())
}
