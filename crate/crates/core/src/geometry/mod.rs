//! Boundary geometry of the unit disk.
//!
//! Points of the disk and circle, finite arc unions on the circle, uniform
//! circle grids with their sampled data, harmonic measure and the
//! Poisson/Herglotz integrals used to build outer functions.

mod arcs;
mod grid;
mod harmonic;
pub mod quadrature;

pub use arcs::{Arc, ArcSet};
pub use grid::{BoundarySamples, CircleGrid, LogSingularity, DEFAULT_GRID_N};
pub(crate) use harmonic::regular_remainder;
pub use harmonic::{
    arc_measure, harmonic_measure, harmonic_measure_with, herglotz_integral, outer_from_modulus, poisson_integral,
    HarmonicOptions, OuterOptions, CLAMP_FLOOR,
};
pub use quadrature::{Estimate, QuadConfig, Singularity};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Default radius cap for interior evaluation.
pub const R_MAX: f64 = 0.999;

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// A point of the unit circle stored by its angle.
///
/// Closed forms on the circle are evaluated from the angle where that is
/// more accurate than going through the complex value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct BoundaryPoint {
    angle: f64,
    value: Complex64,
}

impl From<f64> for BoundaryPoint {
    fn from(angle: f64) -> Self {
        BoundaryPoint::from_angle(angle)
    }
}

impl From<BoundaryPoint> for f64 {
    fn from(p: BoundaryPoint) -> f64 {
        p.angle
    }
}

impl BoundaryPoint {
    pub fn from_angle(angle: f64) -> Self {
        let angle = wrap_angle(angle);
        BoundaryPoint {
            angle,
            value: Complex64::from_polar(1.0, angle),
        }
    }

    /// Project a nonzero complex number radially onto the circle.
    pub fn from_value(w: Complex64) -> Self {
        Self::from_angle(w.arg())
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }
}

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 {
            Ok(DiskPoint(z))
        } else {
            Err(LabError::OutOfDisk {
                re: z.re,
                im: z.im,
                r_max: 1.0,
            })
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn origin() -> Self {
        DiskPoint(Complex64::new(0.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    /// `1 - |z|^2`, computed as `(1 - |z|)(1 + |z|)`.
    pub fn one_minus_norm_sqr(&self) -> f64 {
        let r = self.0.norm();
        (1.0 - r) * (1.0 + r)
    }

    /// Check the evaluation cap `|z| <= r_max`.
    pub fn within(self, r_max: f64) -> Result<Self> {
        if self.modulus() <= r_max {
            Ok(self)
        } else {
            Err(LabError::OutOfDisk {
                re: self.0.re,
                im: self.0.im,
                r_max,
            })
        }
    }
}

impl TryFrom<[f64; 2]> for DiskPoint {
    type Error = LabError;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        DiskPoint::from_re_im(v[0], v[1])
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(z: DiskPoint) -> Self {
        [z.0.re, z.0.im]
    }
}

/// The disk automorphism `w -> (w - z) / (1 - conj(z) w)`, which sends `z` to 0.
pub fn automorphism(z: Complex64, w: Complex64) -> Complex64 {
    (w - z) / (Complex64::new(1.0, 0.0) - z.conj() * w)
}

/// Inverse of [`automorphism`]: `w -> (w + z) / (1 + conj(z) w)`.
pub fn automorphism_inv(z: Complex64, w: Complex64) -> Complex64 {
    (w + z) / (Complex64::new(1.0, 0.0) + z.conj() * w)
}

/// Poisson kernel `(1 - |z|^2) / |zeta - z|^2` against normalized arclength.
pub fn poisson_kernel(z: Complex64, zeta: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r) / (zeta - z).norm_sqr()
}
