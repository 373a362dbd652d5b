//! Distant-lesion arms: radiotherapy, boost, both, and controls.
//!
//! `cargo run --release --example abscopal -- [seed]`

use lesion_sim::config::InitialCondition;
use lesion_sim::{load_preset, run, RunOptions};

const ARMS: [&str; 6] = [
    "abscopal-control",
    "abscopal-rt-only",
    "abscopal-boost-only",
    "abscopal-combo",
    "abscopal-unrelated",
    "abscopal-suppressed",
];

fn main() -> lesion_sim::Result<()> {
    let seed = std::env::args().nth(1).map_or(1, |a| a.parse().expect("seed"));
    let scale: f64 = 0.5;
    for arm in ARMS {
        let mut cfg = load_preset(arm)?;
        cfg.seed = seed;
        cfg.scale = scale;
        // 5000 cells once scaled
        if let InitialCondition::Lesion { n, .. } = &mut cfg.initial {
            *n = (5000.0 / scale.powi(3)).round() as usize;
        }
        let res = run(&cfg, &RunOptions::default())?;
        let pop: Vec<String> = [0.0, 10.0, 20.0, 30.0, 40.0]
            .iter()
            .map(|&d| {
                res.frames
                    .iter()
                    .rev()
                    .find(|f| f.t_days <= d + 1e-9)
                    .map_or(0, |f| f.population())
                    .to_string()
            })
            .collect();
        println!("{arm:<20} N(0,10,20,30,40) {:<32} outcome {:?}", pop.join(" "), res.summary.outcome);
    }
    Ok(())
}
