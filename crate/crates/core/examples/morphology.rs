//! Roughness, radius of gyration and diversity of a few synthetic clusters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lesion_sim::abm::lattice::{hcp_ball, heterogeneous_labels};
use lesion_sim::geometry::Vec3;
use lesion_sim::morphology::{radius_of_gyration, roughness, shannon};

fn main() {
    let r = 5.0;
    let ball = hcp_ball(2000, 2.0 * r);
    let line: Vec<Vec3> = (0..200).map(|i| Vec3::new(i as f64 * 2.0 * r, 0.0, 0.0)).collect();
    let pair = [Vec3::default(), Vec3::new(60.0, 0.0, 0.0)];
    let two_balls: Vec<Vec3> = ball
        .iter()
        .take(1000)
        .flat_map(|&p| pair.iter().map(move |&o| p + o * 4.0))
        .collect();
    for (name, cells) in [("compact ball", &ball), ("line", &line), ("two lobes", &two_balls)] {
        println!(
            "{name:<13} N {:>5}  R_g {:>7.1} µm  M {:>6.2}",
            cells.len(),
            radius_of_gyration(cells).unwrap_or(0.0),
            roughness(cells, r).unwrap_or(f64::NAN)
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for min_fraction in [0.0, 0.05, 0.15] {
        let labels = heterogeneous_labels(60, min_fraction, &mut rng).expect("valid fraction");
        let mut counts = [0usize; 6];
        for p in labels {
            counts[p.index()] += 1;
        }
        println!("labels min fraction {min_fraction:<4}  counts {counts:?}  H {:.3}", shannon(&counts).unwrap());
    }
}
