//! Uniform bucket grid over the cubic bounding box of the domain.
//!
//! Buckets hold `(slot, position)` pairs so proximity tests never touch the
//! agent array. Coordinates outside the box are clamped to the border
//! buckets, which keeps queries a superset of the true neighbourhood.

use crate::geometry::Vec3;

#[derive(Debug, Clone)]
pub struct SpatialIndex {
    half_extent: f64,
    cell: f64,
    inv_cell: f64,
    dim: usize,
    buckets: Vec<Vec<(u32, Vec3)>>,
    len: usize,
}

impl SpatialIndex {
    /// Grid covering `[-half_extent, half_extent]³` with buckets of edge at
    /// least `min_cell`.
    pub fn new(half_extent: f64, min_cell: f64) -> Self {
        let span = 2.0 * half_extent;
        let dim = ((span / min_cell).floor() as usize).max(1);
        let cell = span / dim as f64;
        Self {
            half_extent,
            cell,
            inv_cell: 1.0 / cell,
            dim,
            buckets: vec![Vec::new(); dim * dim * dim],
            len: 0,
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn axis(&self, v: f64) -> usize {
        let i = ((v + self.half_extent) * self.inv_cell).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.dim - 1)
        }
    }

    fn bucket_of(&self, p: Vec3) -> usize {
        (self.axis(p.x) * self.dim + self.axis(p.y)) * self.dim + self.axis(p.z)
    }

    pub fn insert(&mut self, slot: u32, pos: Vec3) {
        let b = self.bucket_of(pos);
        self.buckets[b].push((slot, pos));
        self.len += 1;
    }

    pub fn remove(&mut self, slot: u32, pos: Vec3) -> bool {
        let b = self.bucket_of(pos);
        let bucket = &mut self.buckets[b];
        match bucket.iter().position(|(s, _)| *s == slot) {
            Some(i) => {
                bucket.swap_remove(i);
                self.len -= 1;
                true
            }
            None => false,
        }
    }

    pub fn relocate(&mut self, slot: u32, from: Vec3, to: Vec3) {
        let (a, b) = (self.bucket_of(from), self.bucket_of(to));
        if a == b {
            if let Some(e) = self.buckets[a].iter_mut().find(|(s, _)| *s == slot) {
                e.1 = to;
                return;
            }
        }
        self.remove(slot, from);
        self.insert(slot, to);
    }

    /// Calls `f(slot, pos)` for every entry in the buckets overlapping the
    /// axis-aligned box around the query sphere. Candidates are not filtered
    /// by distance.
    pub fn for_each_candidate<F: FnMut(u32, Vec3)>(&self, center: Vec3, radius: f64, mut f: F) {
        let lo = |v: f64| self.axis(v - radius);
        let hi = |v: f64| self.axis(v + radius);
        let (x0, x1) = (lo(center.x), hi(center.x));
        let (y0, y1) = (lo(center.y), hi(center.y));
        let (z0, z1) = (lo(center.z), hi(center.z));
        for ix in x0..=x1 {
            for iy in y0..=y1 {
                let row = (ix * self.dim + iy) * self.dim;
                for iz in z0..=z1 {
                    for &(s, p) in &self.buckets[row + iz] {
                        f(s, p);
                    }
                }
            }
        }
    }

    /// Entries strictly closer than `radius` to `center`.
    pub fn for_each_within<F: FnMut(u32, Vec3, f64)>(&self, center: Vec3, radius: f64, mut f: F) {
        let r2 = radius * radius;
        self.for_each_candidate(center, radius, |s, p| {
            let d2 = p.dist_sq(center);
            if d2 < r2 {
                f(s, p, d2);
            }
        });
    }

    /// True when any entry other than `except` lies closer than `radius`.
    pub fn any_within(&self, center: Vec3, radius: f64, except: &[u32]) -> bool {
        let r2 = radius * radius;
        let lo = |v: f64| self.axis(v - radius);
        let hi = |v: f64| self.axis(v + radius);
        for ix in lo(center.x)..=hi(center.x) {
            for iy in lo(center.y)..=hi(center.y) {
                let row = (ix * self.dim + iy) * self.dim;
                for iz in lo(center.z)..=hi(center.z) {
                    for &(s, p) in &self.buckets[row + iz] {
                        if p.dist_sq(center) < r2 && !except.contains(&s) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Every stored entry, bucket by bucket.
    pub fn entries(&self) -> impl Iterator<Item = (u32, Vec3)> + '_ {
        self.buckets.iter().flat_map(|b| b.iter().copied())
    }

    /// Checks that each entry sits in the bucket matching its position.
    pub fn is_consistent(&self) -> bool {
        self.buckets
            .iter()
            .enumerate()
            .all(|(i, b)| b.iter().all(|&(_, p)| self.bucket_of(p) == i))
    }
}
