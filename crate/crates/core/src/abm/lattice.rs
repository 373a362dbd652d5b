//! Close-packed seeding of multi-cell lesions.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::phenotype::{PhenotypeId, NUM_PHENOTYPES};

/// The `n` points of a hexagonal close-packed lattice with nearest-neighbour
/// distance `spacing` that lie closest to the origin (ties broken by
/// generation order, so the result is deterministic).
pub fn hcp_ball(n: usize, spacing: f64) -> Vec<Vec3> {
    if n == 0 {
        return Vec::new();
    }
    let cell_volume = spacing.powi(3) / std::f64::consts::SQRT_2;
    let radius = (3.0 * n as f64 * cell_volume / (4.0 * std::f64::consts::PI)).cbrt() + 2.0 * spacing;
    let layer = spacing * (2.0f64 / 3.0).sqrt();
    let row = spacing * 3f64.sqrt() / 2.0;
    let kmax = (radius / layer).ceil() as i64;
    let jmax = (radius / row).ceil() as i64 + 1;
    let imax = (radius / spacing).ceil() as i64 + 1;

    let mut pts = Vec::new();
    for k in -kmax..=kmax {
        let b_layer = k.rem_euclid(2) == 1;
        let (ox, oy) = if b_layer { (spacing / 2.0, row / 3.0) } else { (0.0, 0.0) };
        for j in -jmax..=jmax {
            let shift = if j.rem_euclid(2) == 1 { spacing / 2.0 } else { 0.0 };
            for i in -imax..=imax {
                let p = Vec3::new(
                    i as f64 * spacing + shift + ox,
                    j as f64 * row + oy,
                    k as f64 * layer,
                );
                if p.norm() <= radius {
                    pts.push(p);
                }
            }
        }
    }
    let mut keyed: Vec<(f64, usize, Vec3)> =
        pts.into_iter().enumerate().map(|(i, p)| (p.norm_sq(), i, p)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.truncate(n);
    keyed.into_iter().map(|(_, _, p)| p).collect()
}

/// Phenotype labels for a heterogeneous lesion: every clone gets at least
/// `min_fraction` of the cells, the remainder is drawn uniformly, and the
/// labels are shuffled over the sites.
pub fn heterogeneous_labels<R: Rng + ?Sized>(
    n: usize,
    min_fraction: f64,
    rng: &mut R,
) -> Result<Vec<PhenotypeId>> {
    if !(0.0..=1.0 / NUM_PHENOTYPES as f64).contains(&min_fraction) {
        return Err(Error::config(format!(
            "min_fraction must lie in [0, 1/6], got {min_fraction}"
        )));
    }
    let floor = (min_fraction * n as f64).ceil() as usize;
    let mut labels = Vec::with_capacity(n);
    for id in PhenotypeId::ALL {
        labels.extend(std::iter::repeat_n(id, floor.min(n / NUM_PHENOTYPES)));
    }
    while labels.len() < n {
        labels.push(PhenotypeId::ALL[rng.random_range(0..NUM_PHENOTYPES)]);
    }
    labels.shuffle(rng);
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::agent_stream;

    #[test]
    fn hcp_ball_is_dense_and_overlap_free() {
        let pts = hcp_ball(500, 10.0);
        assert_eq!(pts.len(), 500);
        let mut min_d = f64::INFINITY;
        let mut max_r: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            max_r = max_r.max(a.norm());
            for b in &pts[i + 1..] {
                min_d = min_d.min(a.dist_sq(*b).sqrt());
            }
        }
        assert!((min_d - 10.0).abs() < 1e-9, "{min_d}");
        // packing fraction 0.74 of cells of radius 5
        let expected = (500.0 * 125.0 / 0.7405f64).cbrt();
        assert!(max_r < expected * 1.15, "{max_r} vs {expected}");
    }

    #[test]
    fn heterogeneous_labels_respect_minimum() {
        let mut rng = agent_stream(9, 0);
        let labels = heterogeneous_labels(5000, 0.1, &mut rng).unwrap();
        let mut counts = [0usize; NUM_PHENOTYPES];
        for l in &labels {
            counts[l.index()] += 1;
        }
        assert_eq!(counts.iter().sum::<usize>(), 5000);
        assert!(counts.iter().all(|&c| c >= 500), "{counts:?}");
        assert!(heterogeneous_labels(10, 0.5, &mut rng).is_err());
    }
}
