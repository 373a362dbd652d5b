//! Lymph-node response to a constant antigen load.
//!
//! `cargo run --release --example immune_kinetics -- [tumour k/mm³] [days]`

use lesion_sim::immune::{ImmuneIntegrator, ImmuneParams};

fn main() -> lesion_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let tumour: f64 = args.next().map_or(Ok(5.0), |a| a.parse()).expect("tumour concentration");
    let days: f64 = args.next().map_or(Ok(60.0), |a| a.parse()).expect("days");

    let params = ImmuneParams { alpha: 1e-3, ..ImmuneParams::default() };
    let dt = 1.0 / 1440.0;
    let mut dde = ImmuneIntegrator::new(params.clone(), params.initial_state(), dt)?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "day", "A0", "A1", "C0", "C1", "C2");
    let per_day = (1.0 / dt).round() as usize;
    for day in 0..=days as usize {
        let s = dde.state();
        if day % 5 == 0 {
            println!("{day:>6} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}", s.a0, s.a1, s.c0, s.c1, s.c2);
        }
        for _ in 0..per_day {
            dde.step(tumour)?;
        }
    }
    Ok(())
}
