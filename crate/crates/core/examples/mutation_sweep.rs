//! Maximum diversity and roughness across mutation scales.
//!
//! `cargo run --release --example mutation_sweep -- [out_dir]`

use std::path::PathBuf;

use lesion_sim::{load_preset, run_sweep};

fn main() -> lesion_sim::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let mut cfg = load_preset("pmut-sweep")?;
    cfg.scale = 0.5;
    let values = [0.05, 0.2, 0.5, 0.8];
    let sweep = cfg.sweep.as_mut().expect("preset has a sweep");
    sweep.axes[0].values = values.to_vec();
    sweep.seeds = vec![1, 2, 3];

    let report = run_sweep(&cfg, out.as_deref(), true)?;
    println!("{:>6} {:>8} {:>8} {:>6}", "P_mut", "max H", "max M", "runs");
    for v in values {
        let runs = report.at(v);
        let n = runs.len().max(1) as f64;
        let h = runs.iter().map(|r| r.max_h).sum::<f64>() / n;
        let m = runs.iter().map(|r| r.max_m).sum::<f64>() / n;
        println!("{v:>6} {h:>8.3} {m:>8.3} {:>6}", runs.len());
    }
    for c in &report.correlations {
        println!("spearman {} vs {}: {:?} (n = {})", c.param, c.target, c.rho, c.n);
    }
    Ok(())
}
