//! Untreated lesion from a single original cell at half scale.
//!
//! `cargo run --release --example untreated_growth -- [seed]`

use lesion_sim::morphology::linear_fit;
use lesion_sim::{load_preset, run, RunOptions};

fn main() -> lesion_sim::Result<()> {
    let seed = std::env::args().nth(1).map_or(3, |a| a.parse().expect("seed"));
    let mut cfg = load_preset("untreated")?;
    cfg.seed = seed;
    cfg.scale = 0.5;

    let res = run(&cfg, &RunOptions::default())?;
    for f in res.frames.iter().filter(|f| (f.t_days as usize).is_multiple_of(10) && f.t_days.fract() == 0.0) {
        println!(
            "day {:>5.0}  N {:>6}  CTL {:>4}  R_g {:>6.1}  M {:>5.2}  H {:>4.2}",
            f.t_days,
            f.population(),
            f.n_ctl,
            f.morphology.radius_of_gyration.unwrap_or(0.0),
            f.morphology.roughness.unwrap_or(f64::NAN),
            f.morphology.shannon.unwrap_or(0.0)
        );
    }

    let grown: Vec<_> = res.frames.iter().filter(|f| f.population() >= 20).collect();
    let t: Vec<f64> = grown.iter().map(|f| f.t_days).collect();
    let ln_n: Vec<f64> = grown.iter().map(|f| (f.population() as f64).ln()).collect();
    let rg: Vec<f64> = grown.iter().map(|f| f.morphology.radius_of_gyration.unwrap_or(0.0)).collect();
    if let (Some(a), Some(b)) = (linear_fit(&t, &ln_n), linear_fit(&t, &rg)) {
        println!("ln N slope {:.4}/day (R² {:.3}), R_g slope {:.3} µm/day (R² {:.3})", a.0, a.2, b.0, b.2);
    }
    println!("outcome {:?}", res.summary.outcome);
    Ok(())
}
