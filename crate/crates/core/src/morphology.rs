//! Shape and diversity observables of a lesion, and the outcome classifier.
//!
//! Roughness uses a voxel estimate of surface and volume. Voxels have edge
//! r/2 and the grid is anchored at the centre of the cells' bounding box. The body of the lesion
//! is everything a probe sphere of one cell radius, rolling in from outside,
//! cannot reach: the interstitial gaps of a packed aggregate count as volume
//! while channels a cell could enter count as surface. Face counting
//! overestimates the area of a smooth body, so surfaces are scaled by a
//! constant fixed once so that a digital ball of radius 20r gives M = 1.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::phenotype::NUM_PHENOTYPES;

/// Normalised Shannon index of clone counts; `None` for an empty lesion.
pub fn shannon(counts: &[usize]) -> Option<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 || counts.len() < 2 {
        return if total == 0 { None } else { Some(0.0) };
    }
    let n = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    Some((h / (counts.len() as f64).ln()).clamp(0.0, 1.0) + 0.0)
}

pub fn centroid(positions: &[Vec3]) -> Option<Vec3> {
    if positions.is_empty() {
        return None;
    }
    let n = positions.len() as f64;
    let s = positions.iter().fold(Vec3::default(), |acc, &p| acc + p);
    Some(s * (1.0 / n))
}

/// Root-mean-square distance of the cells from their centroid.
pub fn radius_of_gyration(positions: &[Vec3]) -> Option<f64> {
    let c = centroid(positions)?;
    let n = positions.len() as f64;
    let ss: f64 = positions.iter().map(|p| p.dist_sq(c)).sum();
    Some((ss / n).sqrt())
}

const EMPTY: u8 = 0;
const DILATED: u8 = 1;
const OUTSIDE: u8 = 2;

/// Binary body of an aggregate of equal spheres on a cubic grid.
#[derive(Debug, Clone)]
pub struct VoxelMask {
    pub edge: f64,
    pub dims: [usize; 3],
    /// Centre of voxel (0, 0, 0).
    pub origin: Vec3,
    solid: Vec<bool>,
}

impl VoxelMask {
    /// Voxelises spheres of radius `radius` centred at `centers` with voxels
    /// of edge `radius / 2`.
    pub fn build(centers: &[Vec3], radius: f64) -> Option<Self> {
        Self::build_with(centers, radius, radius / 2.0, radius)
    }

    /// General form: `probe` is the radius of the rolling sphere.
    pub fn build_with(centers: &[Vec3], radius: f64, edge: f64, probe: f64) -> Option<Self> {
        if centers.is_empty() {
            return None;
        }
        let reach = radius + probe;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in centers {
            for (k, v) in [p.x, p.y, p.z].into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let anchor = Vec3::new(lo[0] + hi[0], lo[1] + hi[1], lo[2] + hi[2]) * 0.5;
        for k in 0..3 {
            let half = 0.5 * (hi[k] - lo[k]);
            (lo[k], hi[k]) = (-half, half);
        }
        // two voxels of padding beyond the probe reach keep the corner outside
        let pad = reach + 2.0 * edge;
        let first: [i64; 3] = std::array::from_fn(|k| ((lo[k] - pad) / edge).floor() as i64);
        let last: [i64; 3] = std::array::from_fn(|k| ((hi[k] + pad) / edge).ceil() as i64);
        let dims: [usize; 3] = std::array::from_fn(|k| (last[k] - first[k] + 1) as usize);
        let origin = anchor
            + Vec3::new(
                (first[0] as f64 + 0.5) * edge,
                (first[1] as f64 + 0.5) * edge,
                (first[2] as f64 + 0.5) * edge,
            );
        let grid = Grid { dims, origin, edge };
        let mut state = vec![EMPTY; dims[0] * dims[1] * dims[2]];

        // cells, and the zone a probe centre cannot enter
        let mut core = vec![false; state.len()];
        for &c in centers {
            grid.for_ball(c, reach, |i, d2| {
                state[i] = DILATED;
                if d2 < radius * radius {
                    core[i] = true;
                }
            });
        }

        // probe centres reachable from outside
        let mut queue = VecDeque::from([0usize]);
        state[0] = OUTSIDE;
        let mut rim = Vec::new();
        while let Some(i) = queue.pop_front() {
            let mut touches = false;
            grid.for_neighbours(i, |j| match state[j] {
                EMPTY => {
                    state[j] = OUTSIDE;
                    queue.push_back(j);
                }
                DILATED => touches = true,
                _ => {}
            });
            if touches {
                rim.push(i);
            }
        }

        // everything swept by the probe is outside; the rest is body
        let mut swept = vec![false; state.len()];
        for &i in &rim {
            grid.for_ball(grid.center(i), probe + 0.5 * edge, |j, _| swept[j] = true);
        }
        let solid = state
            .iter()
            .zip(&swept)
            .zip(&core)
            .map(|((&s, &w), &c)| c || (s != OUTSIDE && !w))
            .collect();
        Some(Self { edge, dims, origin, solid })
    }

    pub fn solid_count(&self) -> usize {
        self.solid.iter().filter(|&&s| s).count()
    }

    /// Faces between a body voxel and a non-body voxel.
    pub fn exposed_faces(&self) -> usize {
        let [nx, ny, nz] = self.dims;
        let at = |x: usize, y: usize, z: usize| self.solid[(z * ny + y) * nx + x];
        let mut faces = 0;
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let here = at(x, y, z);
                    if x + 1 < nx && here != at(x + 1, y, z) {
                        faces += 1;
                    }
                    if y + 1 < ny && here != at(x, y + 1, z) {
                        faces += 1;
                    }
                    if z + 1 < nz && here != at(x, y, z + 1) {
                        faces += 1;
                    }
                }
            }
        }
        faces
    }

    pub fn volume(&self) -> f64 {
        self.solid_count() as f64 * self.edge.powi(3)
    }

    pub fn raw_surface(&self) -> f64 {
        self.exposed_faces() as f64 * self.edge * self.edge
    }
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    dims: [usize; 3],
    origin: Vec3,
    edge: f64,
}

impl Grid {
    fn center(&self, i: usize) -> Vec3 {
        let [nx, ny, _] = self.dims;
        let x = i % nx;
        let y = (i / nx) % ny;
        let z = i / (nx * ny);
        self.origin + Vec3::new(x as f64, y as f64, z as f64) * self.edge
    }

    fn for_ball<F: FnMut(usize, f64)>(&self, c: Vec3, radius: f64, mut f: F) {
        let rel = c - self.origin;
        let span = |v: f64, n: usize| {
            let lo = ((v - radius) / self.edge).ceil().max(0.0) as usize;
            let hi = ((v + radius) / self.edge).floor().min(n as f64 - 1.0);
            (lo, if hi < 0.0 { None } else { Some(hi as usize) })
        };
        let [nx, ny, nz] = self.dims;
        let ((x0, x1), (y0, y1), (z0, z1)) = (span(rel.x, nx), span(rel.y, ny), span(rel.z, nz));
        let (Some(x1), Some(y1), Some(z1)) = (x1, y1, z1) else { return };
        let r2 = radius * radius;
        for z in z0..=z1 {
            let dz = z as f64 * self.edge - rel.z;
            for y in y0..=y1 {
                let dy = y as f64 * self.edge - rel.y;
                let dyz = dy * dy + dz * dz;
                if dyz >= r2 {
                    continue;
                }
                for x in x0..=x1 {
                    let dx = x as f64 * self.edge - rel.x;
                    let d2 = dx * dx + dyz;
                    if d2 < r2 {
                        f((z * ny + y) * nx + x, d2);
                    }
                }
            }
        }
    }

    fn for_neighbours<F: FnMut(usize)>(&self, i: usize, mut f: F) {
        let [nx, ny, nz] = self.dims;
        let x = i % nx;
        let y = (i / nx) % ny;
        let z = i / (nx * ny);
        if x > 0 {
            f(i - 1);
        }
        if x + 1 < nx {
            f(i + 1);
        }
        if y > 0 {
            f(i - nx);
        }
        if y + 1 < ny {
            f(i + nx);
        }
        if z > 0 {
            f(i - nx * ny);
        }
        if z + 1 < nz {
            f(i + nx * ny);
        }
    }
}

/// Surface correction making a digital ball of radius 20 cell radii exactly
/// spherical. Independent of the cell radius since everything scales with it.
pub fn staircase_factor() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(|| {
        let radius = 1.0;
        let ball = 20.0 * radius;
        let mask = VoxelMask::build_with(&[Vec3::default()], ball, radius / 2.0, radius)
            .expect("one sphere");
        let (s, v) = (mask.raw_surface(), mask.volume());
        // κ with sqrt(4π κ S) = cbrt(3 (4π)² V)
        let target = (3.0 * (4.0 * std::f64::consts::PI).powi(2) * v).cbrt();
        target * target / (4.0 * std::f64::consts::PI * s)
    })
}

/// Sphericity-normalised roughness of the body: 1 for a ball, larger for
/// rough or scattered masses.
pub fn roughness_from(surface: f64, volume: f64) -> f64 {
    let four_pi = 4.0 * std::f64::consts::PI;
    (four_pi * surface).sqrt() / (3.0 * four_pi * four_pi * volume).cbrt()
}

/// Roughness of an aggregate of cells of radius `radius`; `None` when empty.
pub fn roughness(positions: &[Vec3], radius: f64) -> Option<f64> {
    let mask = VoxelMask::build(positions, radius)?;
    Some(roughness_from(mask.raw_surface() * staircase_factor(), mask.volume()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorphologyFrame {
    pub roughness: Option<f64>,
    pub radius_of_gyration: Option<f64>,
    pub shannon: Option<f64>,
    pub counts: [usize; NUM_PHENOTYPES],
}

impl MorphologyFrame {
    pub fn measure(positions: &[Vec3], counts: [usize; NUM_PHENOTYPES], radius: f64) -> Self {
        Self {
            roughness: roughness(positions, radius),
            radius_of_gyration: radius_of_gyration(positions),
            shannon: shannon(&counts),
            counts,
        }
    }

    /// Same as [`measure`](Self::measure) without the voxel pass.
    pub fn measure_cheap(positions: &[Vec3], counts: [usize; NUM_PHENOTYPES]) -> Self {
        Self {
            roughness: None,
            radius_of_gyration: radius_of_gyration(positions),
            shannon: shannon(&counts),
            counts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Eradication,
    Oscillation,
    Escape,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Eradication => "eradication",
            Outcome::Oscillation => "oscillation",
            Outcome::Escape => "escape",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutcomeRule {
    /// Minimum log-growth rate of the trailing window, per day.
    #[serde(default = "default_slope")]
    pub escape_slope: f64,
    #[serde(default = "default_r2")]
    pub escape_r2: f64,
    #[serde(default = "default_window")]
    pub window_days: f64,
    #[serde(default = "default_min_days")]
    pub min_days: f64,
}

fn default_slope() -> f64 {
    0.05
}
fn default_r2() -> f64 {
    0.9
}
fn default_window() -> f64 {
    20.0
}
fn default_min_days() -> f64 {
    30.0
}

impl Default for OutcomeRule {
    fn default() -> Self {
        Self {
            escape_slope: default_slope(),
            escape_r2: default_r2(),
            window_days: default_window(),
            min_days: default_min_days(),
        }
    }
}

/// Least-squares line `y = a + b x`; returns (slope, intercept, R²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, my - slope * mx, r2))
}

/// Classifies a population series sampled at days `t`. `None` when the
/// series is too short to decide.
pub fn classify_outcome(t: &[f64], n: &[f64], rule: &OutcomeRule) -> Option<Outcome> {
    if n.iter().any(|&v| v <= 0.0) {
        return Some(Outcome::Eradication);
    }
    let (&t_first, &t_last) = (t.first()?, t.last()?);
    if t_last - t_first < rule.min_days {
        return None;
    }
    let from = t_last - rule.window_days;
    let (tx, ly): (Vec<f64>, Vec<f64>) =
        t.iter().zip(n).filter(|(&ti, _)| ti >= from).map(|(&ti, &ni)| (ti, ni.ln())).unzip();
    match linear_fit(&tx, &ly) {
        Some((slope, _, r2)) if slope > rule.escape_slope && r2 > rule.escape_r2 => {
            Some(Outcome::Escape)
        }
        _ => Some(Outcome::Oscillation),
    }
}
