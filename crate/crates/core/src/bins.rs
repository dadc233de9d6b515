//! Uniform spatial hashing of planar samples.

use rustc_hash::FxHashMap;

use crate::paths::Point2;

/// Sample indices bucketed by square cells of a fixed side.
///
/// Within a bucket, indices are stored in increasing order.
#[derive(Debug, Clone)]
pub struct SpatialBins {
    cell: f64,
    order: Vec<u32>,
    ranges: FxHashMap<u64, (u32, u32)>,
}

#[inline]
fn key(cx: i64, cy: i64) -> u64 {
    ((cx as i32 as u32 as u64) << 32) | (cy as i32 as u32 as u64)
}

impl SpatialBins {
    pub fn new(points: &[Point2], cell: f64) -> Self {
        Self::with_filter(points, cell, |_| true)
    }

    /// Bins only the indices accepted by `keep`.
    pub fn with_filter(points: &[Point2], cell: f64, keep: impl Fn(usize) -> bool) -> Self {
        assert!(cell > 0.0, "bin side must be positive");
        let mut keyed: Vec<(u64, u32)> = points
            .iter()
            .enumerate()
            .filter(|&(i, _)| keep(i))
            .map(|(i, p)| (key(Self::coord(p.x, cell), Self::coord(p.y, cell)), i as u32))
            .collect();
        keyed.sort_unstable();
        let mut ranges = FxHashMap::default();
        let mut start = 0usize;
        while start < keyed.len() {
            let k = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == k {
                end += 1;
            }
            ranges.insert(k, (start as u32, end as u32));
            start = end;
        }
        Self { cell, order: keyed.into_iter().map(|(_, i)| i).collect(), ranges }
    }

    #[inline]
    fn coord(v: f64, cell: f64) -> i64 {
        (v / cell).floor() as i64
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Calls `f` with every binned index in cells that can hold a point
    /// within `radius` of `p`. Visit order is by cell, then index.
    #[inline]
    pub fn for_each_near(&self, p: Point2, radius: f64, mut f: impl FnMut(usize)) {
        let reach = (radius / self.cell).ceil() as i64;
        let (cx, cy) = (Self::coord(p.x, self.cell), Self::coord(p.y, self.cell));
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                if let Some(&(a, b)) = self.ranges.get(&key(cx + dx, cy + dy)) {
                    for &i in &self.order[a as usize..b as usize] {
                        f(i as usize);
                    }
                }
            }
        }
    }

    /// Same candidates as [`for_each_near`](Self::for_each_near), sorted ascending.
    pub fn near_sorted(&self, p: Point2, radius: f64, out: &mut Vec<usize>) {
        out.clear();
        self.for_each_near(p, radius, |i| out.push(i));
        out.sort_unstable();
    }
}
