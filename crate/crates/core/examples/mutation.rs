//! Clone table and the daughter-phenotype distribution of one division.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lesion_sim::phenotype::{MutationConfig, MutationGraph, PhenotypeId, PhenotypeRegistry};

fn main() {
    let registry = PhenotypeRegistry::default();
    println!("{:<10} {:>8} {:>6} {:>6} {:>8}", "clone", "P_recog", "T_div", "chemo", "related");
    for p in registry.iter() {
        println!(
            "{:<10} {:>8} {:>6} {:>6} {:>8}",
            p.id.name(),
            p.p_recog,
            p.t_div,
            p.effective_chemo_index(),
            p.antigen_related
        );
    }

    let dt_min = 1.0;
    let trials = 200_000;
    for graph in [MutationGraph::OriginalOnly, MutationGraph::AllClones] {
        let cfg = MutationConfig { p_mut: 0.2, graph };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for parent in [PhenotypeId::Original, PhenotypeId::C0_1] {
            let mut hist = [0usize; 6];
            for _ in 0..trials {
                hist[cfg.mutate(parent, dt_min, &mut rng).index()] += 1;
            }
            let freq: Vec<String> = hist.iter().map(|&h| format!("{:.3}", h as f64 / trials as f64)).collect();
            println!("{graph:?} parent {:<9} -> {}", parent.name(), freq.join(" "));
        }
    }
}
