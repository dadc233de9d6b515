use serde::{Deserialize, Serialize};

/// A point of the integer lattice Z².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i32,
    pub y: i32,
}

/// The four unit steps of the simple random walk, indexed by two random bits.
pub const UNIT_STEPS: [LatticePoint; 4] = [
    LatticePoint { x: 1, y: 0 },
    LatticePoint { x: -1, y: 0 },
    LatticePoint { x: 0, y: 1 },
    LatticePoint { x: 0, y: -1 },
];

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Packs both coordinates into one 64-bit key (x in the high half).
    #[inline]
    pub const fn pack(self) -> u64 {
        ((self.x as u32 as u64) << 32) | (self.y as u32 as u64)
    }

    #[inline]
    pub const fn unpack(key: u64) -> Self {
        Self { x: (key >> 32) as u32 as i32, y: key as u32 as i32 }
    }

    #[inline]
    pub fn offset(self, step: LatticePoint) -> Self {
        Self { x: self.x + step.x, y: self.y + step.y }
    }

    /// Squared Euclidean distance to `other`, exact in integers.
    #[inline]
    pub fn dist2(self, other: LatticePoint) -> i64 {
        let dx = i64::from(self.x) - i64::from(other.x);
        let dy = i64::from(self.y) - i64::from(other.y);
        dx * dx + dy * dy
    }

    #[inline]
    pub fn norm2(self) -> i64 {
        self.dist2(Self::ORIGIN)
    }

    pub fn neighbors(self) -> [LatticePoint; 4] {
        UNIT_STEPS.map(|s| self.offset(s))
    }

    pub fn is_adjacent(self, other: LatticePoint) -> bool {
        self.dist2(other) == 1
    }
}

impl From<(i32, i32)> for LatticePoint {
    fn from((x, y): (i32, i32)) -> Self {
        Self { x, y }
    }
}

/// The lattice disc `D_c(r) = { z : |z - c| < r }` (open) and its outer boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeDisc {
    pub center: LatticePoint,
    pub radius: f64,
}

impl LatticeDisc {
    pub fn new(center: LatticePoint, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn centered(radius: f64) -> Self {
        Self::new(LatticePoint::ORIGIN, radius)
    }

    #[inline]
    pub fn contains(&self, z: LatticePoint) -> bool {
        (z.dist2(self.center) as f64) < self.radius * self.radius
    }

    /// `z ∈ ∂D`: outside the disc with a lattice neighbour inside it.
    pub fn on_boundary(&self, z: LatticePoint) -> bool {
        !self.contains(z) && z.neighbors().iter().any(|&n| self.contains(n))
    }

    /// Disc points in row-major order (by y, then x).
    pub fn interior_points(&self) -> Vec<LatticePoint> {
        let reach = self.radius.ceil() as i32;
        let mut out = Vec::new();
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let z = LatticePoint::new(self.center.x + dx, self.center.y + dy);
                if self.contains(z) {
                    out.push(z);
                }
            }
        }
        out
    }

    pub fn boundary_points(&self) -> Vec<LatticePoint> {
        let reach = self.radius.ceil() as i32 + 1;
        let mut out = Vec::new();
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let z = LatticePoint::new(self.center.x + dx, self.center.y + dy);
                if self.on_boundary(z) {
                    out.push(z);
                }
            }
        }
        out
    }
}
