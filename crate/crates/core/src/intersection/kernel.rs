use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::paths::Point2;

/// Radial profile `f` on the unit disc with `∫ f = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelProfile {
    /// `f(x) = (3/π)(1 - |x|)`.
    Tent,
    /// `f(x) = (2/π)(1 - |x|²)`.
    Epanechnikov,
}

impl KernelProfile {
    /// `f` at radius `r`, zero for `r >= 1`.
    #[inline]
    pub fn at_radius(self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        match self {
            KernelProfile::Tent => 3.0 / PI * (1.0 - r),
            KernelProfile::Epanechnikov => 2.0 / PI * (1.0 - r * r),
        }
    }
}

/// Approximate identity `f_ε(x) = f(x/ε)/ε²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub profile: KernelProfile,
    pub scale: f64,
}

impl KernelSpec {
    pub fn tent(scale: f64) -> Self {
        Self { profile: KernelProfile::Tent, scale }
    }

    #[inline]
    pub fn eval(&self, d: Point2) -> f64 {
        // sqrt of the exact square sum keeps power-of-two rescaling exact.
        let r = d.norm2().sqrt() / self.scale;
        if r >= 1.0 {
            return 0.0;
        }
        self.profile.at_radius(r) / (self.scale * self.scale)
    }

    /// `∫ f_ε` by the midpoint rule in the radius.
    pub fn mass(&self, panels: usize) -> f64 {
        let h = self.scale / panels as f64;
        (0..panels)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                2.0 * PI * r * self.eval(Point2::new(r, 0.0)) * h
            })
            .sum()
    }
}
