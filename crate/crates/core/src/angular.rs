//! Angular derivatives from radial limits of the difference quotient and of
//! `Q_φ`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::q_ratio;
use crate::error::{LabError, Result};
use crate::geometry::{BoundaryPoint, DiskPoint};
use crate::zoo::HoloMap;

pub const DEFAULT_DEPTH: u32 = 30;
/// Beyond this `1 - r` drops near the cancellation floor of `1 - |z|²`.
pub const MAX_DEPTH: u32 = 40;
const FIRST_K: u32 = 4;
const WINDOW: usize = 3;
const STABLE_REL: f64 = 1e-6;
const AGREE_REL: f64 = 1e-4;
const DIVERGENCE: f64 = 1e6;

/// Outcome of a radial probe at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularReport {
    pub zeta: BoundaryPoint,
    pub exists: bool,
    /// Limit of `Q_φ` along the radius; `+inf` once divergence is certified.
    #[serde(with = "crate::extended_real")]
    pub liminf_estimate: f64,
    pub derivative_estimate: Option<Complex64>,
    pub radii: Vec<f64>,
    pub convergence_residual: f64,
    /// `Q_φ` at the last depth along the ray meeting the radius at angle π/4.
    #[serde(with = "crate::extended_real")]
    pub stolz_estimate: f64,
}

impl AngularReport {
    pub const CSV_HEADER: &'static str = "angle,exists,liminf,abs_deriv,residual";

    pub fn to_csv_row(&self) -> String {
        let d = self.derivative_estimate.map_or(f64::NAN, |d| d.norm());
        format!(
            "{:e},{},{:e},{:e},{:e}",
            self.zeta.angle(),
            self.exists,
            self.liminf_estimate,
            d,
            self.convergence_residual
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("angular report serializes")
    }
}

fn radius(k: u32) -> f64 {
    1.0 - (0.5f64).powi(k as i32)
}

/// Probe the radius to `ζ` at `r_k = 1 - 2^{-k}`, `k = 4..=depth`.
///
/// Existence is declared once `Q_φ(r_k ζ)` changes by less than `1e-6`
/// (relative) over three consecutive radii, `|φ|` is close to 1 and the
/// difference quotient agrees with `Q_φ` in modulus to `1e-4`. Nonexistence
/// is declared once `Q_φ` exceeds `1e6` and increases over three radii.
pub fn angular_derivative(phi: &HoloMap, zeta: BoundaryPoint, depth: u32) -> Result<AngularReport> {
    if depth > MAX_DEPTH || depth < FIRST_K + WINDOW as u32 {
        return Err(LabError::ParamOutOfDomain(format!(
            "depth {depth} outside {}..={MAX_DEPTH}",
            FIRST_K + WINDOW as u32
        )));
    }
    let zv = zeta.value();
    let at_zeta = phi.boundary_eval(zeta);
    let mut radii = Vec::new();
    let mut qs: Vec<f64> = Vec::new();
    for k in FIRST_K..=depth {
        let r = radius(k);
        let z = DiskPoint::new(r * zv)?;
        let q = q_ratio(phi, z);
        radii.push(r);
        qs.push(q);
        let n = qs.len();
        if n <= WINDOW {
            continue;
        }
        let tail = &qs[n - WINDOW..];
        if tail.iter().all(|&q| q > DIVERGENCE) && tail.windows(2).all(|w| w[1] > w[0]) {
            return Ok(AngularReport {
                zeta,
                exists: false,
                liminf_estimate: f64::INFINITY,
                derivative_estimate: None,
                radii,
                convergence_residual: 1.0 / q,
                stolz_estimate: stolz_q(phi, zv, k),
            });
        }
        let change = qs[n - WINDOW - 1..]
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / w[1].abs())
            .fold(0.0, f64::max);
        let w = phi.eval(z.value());
        if !(change < STABLE_REL) || w.norm() < 1.0 - 1e-3 {
            continue;
        }
        let d = match at_zeta {
            Some(v) => (w - v) / (z.value() - zv),
            None => phi.deriv(z.value()),
        };
        let liminf = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let gap = (liminf - d.norm()).abs();
        if gap <= AGREE_REL * liminf.max(1.0) {
            return Ok(AngularReport {
                zeta,
                exists: true,
                liminf_estimate: liminf,
                derivative_estimate: Some(d),
                radii,
                convergence_residual: gap.max(change),
                stolz_estimate: stolz_q(phi, zv, k),
            });
        }
    }
    Err(LabError::Inconclusive { depth })
}

/// `Q_φ` at distance `2^{-k}` from `ζ` on the ray at angle π/4 to the radius.
fn stolz_q(phi: &HoloMap, zv: Complex64, k: u32) -> f64 {
    let t = (0.5f64).powi(k as i32);
    let z = zv * (1.0 - t * Complex64::from_polar(1.0, FRAC_PI_4));
    DiskPoint::new(z).map_or(f64::NAN, |z| q_ratio(phi, z))
}

/// `| |φ'(ζ)| - liminf |` against the closed-form boundary derivative.
pub fn jc_consistency(phi: &HoloMap, zeta: BoundaryPoint) -> Result<f64> {
    let rep = angular_derivative(phi, zeta, DEFAULT_DEPTH)?;
    if !rep.exists {
        return Err(LabError::ParamOutOfDomain(format!(
            "no angular derivative at angle {}",
            zeta.angle()
        )));
    }
    let closed = phi
        .boundary_deriv(zeta)
        .ok_or(LabError::BoundarySingularity { angle: zeta.angle() })?;
    Ok((closed.norm() - rep.liminf_estimate).abs())
}
