//! Schwarz–Pick quantities, the reverse bound and its proof chain.

mod chain;

pub use chain::{bound_chain, chain_values, ChainReport, CSV_HEADER as CHAIN_CSV_HEADER};

use std::f64::consts::{E, TAU};

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::geometry::quadrature::{harmonic_integral, Kernel, Piece};
use crate::geometry::{automorphism, ArcSet, BoundaryPoint, CircleGrid, DiskPoint, Estimate, QuadConfig, Singularity};
use crate::zoo::{Derivative, HoloMap, LogModulus};

/// Absolute floor of every inequality tolerance.
pub const ABS_FLOOR: f64 = 1e-9;
/// Below this `1 - ω_z(E)` counts as zero.
pub const DEGENERATE_EPS: f64 = 1e-12;
/// Largest `|φ'|` accepted as a finite sup over `E`.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// `max(ABS_FLOOR, 10·quad_error)`.
pub fn tolerance(quad_error: f64) -> f64 {
    ABS_FLOOR.max(10.0 * quad_error)
}

/// Grid and quadrature settings for the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    /// Nodes used for sup norms and pointwise checks.
    pub grid: CircleGrid,
    pub quad: QuadConfig,
}

impl BoundConfig {
    pub fn new(grid: CircleGrid) -> Self {
        BoundConfig {
            grid,
            quad: QuadConfig::for_grid_n(grid.n()),
        }
    }

    /// Cheaper settings for large random samples; error estimates stay honest.
    pub fn sweep(grid: CircleGrid) -> Self {
        let quad = QuadConfig {
            panels: 64,
            tol: 1e-11,
            zone_tol: 1e-10,
            max_zone_panels: 1 << 12,
            ..QuadConfig::for_grid_n(grid.n())
        };
        BoundConfig { grid, quad }
    }
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig::new(CircleGrid::new(crate::geometry::DEFAULT_GRID_N).expect("default grid"))
    }
}

/// A point where a map is evaluated: inside the disk or on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Disk(DiskPoint),
    Boundary(BoundaryPoint),
}

impl From<DiskPoint> for Point {
    fn from(z: DiskPoint) -> Self {
        Point::Disk(z)
    }
}

impl From<BoundaryPoint> for Point {
    fn from(p: BoundaryPoint) -> Self {
        Point::Boundary(p)
    }
}

impl Point {
    pub fn value(&self) -> Complex64 {
        match self {
            Point::Disk(z) => z.value(),
            Point::Boundary(p) => p.value(),
        }
    }

    fn eval(&self, phi: &HoloMap) -> Result<Complex64> {
        match self {
            Point::Disk(z) => Ok(phi.eval(z.value())),
            Point::Boundary(p) => phi
                .boundary_eval(*p)
                .ok_or(LabError::BoundarySingularity { angle: p.angle() }),
        }
    }
}

/// `Q_φ(z) = (1 - |φ(z)|²)/(1 - |z|²)`.
pub fn q_ratio(phi: &HoloMap, z: DiskPoint) -> f64 {
    let w = phi.eval(z.value());
    let r = w.norm();
    (1.0 - r) * (1.0 + r) / z.one_minus_norm_sqr()
}

/// `Q_φ(z) - |φ'(z)|`.
pub fn schwarz_pick_slack(phi: &HoloMap, z: DiskPoint) -> f64 {
    q_ratio(phi, z) - phi.deriv(z.value()).norm()
}

/// `Q_φ(z) - (1 - |φ(0)|)/(1 + |φ(0)|)`.
pub fn lower_bound_slack(phi: &HoloMap, z: DiskPoint) -> f64 {
    let a = phi.eval(Complex64::new(0.0, 0.0)).norm();
    q_ratio(phi, z) - (1.0 - a) / (1.0 + a)
}

/// Julia's inequality at a boundary point, as right side minus left side.
pub fn julia_residual(phi: &HoloMap, z: DiskPoint, zeta: BoundaryPoint) -> Result<f64> {
    let (w, d) = phi
        .boundary_eval_with_deriv(zeta)
        .ok_or(LabError::BoundarySingularity { angle: zeta.angle() })?;
    let zc = z.value();
    let fz = phi.eval(zc);
    let r = fz.norm();
    let lhs = d.norm() * (zeta.value() - zc).norm_sqr() / z.one_minus_norm_sqr();
    Ok(lhs - (w - fz).norm_sqr() / ((1.0 - r) * (1.0 + r)))
}

/// `k_{φ,z}(w) = (1 - conj(φ(z)) φ(w))/(1 - z̄ w)`.
pub fn dbr_kernel(phi: &HoloMap, z: DiskPoint, w: impl Into<Point>) -> Result<Complex64> {
    let w = w.into();
    let zc = z.value();
    let a = phi.eval(zc);
    let one = Complex64::new(1.0, 0.0);
    Ok((one - a.conj() * w.eval(phi)?) / (one - zc.conj() * w.value()))
}

/// `F_z(w) = k_{φ,z}(w)² / k_{φ,z}(z)`; exactly `Q_φ(z)` at `w = z`.
pub fn f_z(phi: &HoloMap, z: DiskPoint, w: impl Into<Point>) -> Result<Complex64> {
    let w = w.into();
    if w == Point::Disk(z) {
        return Ok(Complex64::new(q_ratio(phi, z), 0.0));
    }
    let a = phi.eval(z.value()).norm();
    let k = dbr_kernel(phi, z, w)?;
    Ok(z.one_minus_norm_sqr() / ((1.0 - a) * (1.0 + a)) * k * k)
}

/// `ω_z(E)`, in closed form through the automorphism sending `z` to 0.
pub fn omega(z: DiskPoint, e: &ArcSet) -> f64 {
    if e.is_full() {
        return 1.0;
    }
    let zc = z.value();
    (e.map_endpoints(|w| automorphism(zc, w)).length() / TAU).clamp(0.0, 1.0)
}

/// `∫_E log|f| dω_z`.
pub fn log_integral(f: &dyn LogModulus, e: &ArcSet, z: DiskPoint, quad: &QuadConfig) -> Result<Estimate> {
    let sings = f.singularities();
    log_integral_with(&|p| f.boundary_log_abs(p), &sings, e, z, quad)
}

fn log_integral_with(
    f: &(dyn Fn(BoundaryPoint) -> Option<f64> + Sync),
    sings: &[Singularity],
    e: &ArcSet,
    z: DiskPoint,
    quad: &QuadConfig,
) -> Result<Estimate> {
    if e.is_empty() {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let g = |p: BoundaryPoint| f(p).unwrap_or(0.0);
    let est = harmonic_integral(
        z.value(),
        &[Piece {
            arcs: e,
            f: &g,
            singularities: sings,
        }],
        Kernel::Poisson,
        quad,
    )
    .re();
    if !est.value.is_finite() {
        return Err(LabError::NotLogIntegrable {
            clamped_mass: f64::INFINITY,
            threshold: 0.0,
        });
    }
    Ok(est)
}

/// `exp(i1)·{(1/(1-ω))(1+|z|)/(1-|z|)}^{1-ω}`, falling back to `exp(i1)` when
/// `1 - ω < DEGENERATE_EPS`.
pub fn main_rhs(i1: f64, omega_e: f64, z: DiskPoint) -> f64 {
    let rest = 1.0 - omega_e;
    if rest < DEGENERATE_EPS {
        return i1.exp();
    }
    let r = z.modulus();
    (i1 + rest * (((1.0 + r) / (1.0 - r)) / rest).ln()).exp()
}

/// The reverse Schwarz–Pick bound, with its absolute error estimate.
pub fn reverse_bound_rhs(phi: &HoloMap, e: &ArcSet, z: DiskPoint, cfg: &BoundConfig) -> Result<Estimate> {
    let i1 = log_integral(&Derivative(phi), e, z, &cfg.quad)?;
    let rhs = main_rhs(i1.value, omega(z, e), z);
    Ok(Estimate::new(rhs, rhs * i1.error.exp_m1()))
}

/// `exp(∫_T log|θ'| dω_z)`, the modulus of the outer factor of `θ'` at `z`.
pub fn inner_bound_rhs(theta: &HoloMap, z: DiskPoint, cfg: &BoundConfig) -> Result<Estimate> {
    if !theta.is_inner() {
        return Err(LabError::ParamOutOfDomain(format!("{} is not inner", theta.to_spec())));
    }
    reverse_bound_rhs(theta, &ArcSet::full(), z, cfg)
}

/// Largest `|φ'|` over grid nodes of `E`, refined around the best node.
pub fn sup_deriv_on(phi: &HoloMap, e: &ArcSet, grid: &CircleGrid) -> Result<f64> {
    if e.is_empty() {
        return Ok(0.0);
    }
    for s in phi.log_deriv_singularities() {
        if (s.mass > 0.0 || s.log_coeff < 0.0) && e.closure_contains(s.angle) {
            return Err(LabError::UnboundedOnE { max: f64::INFINITY });
        }
    }
    let at = |angle: f64| {
        phi.boundary_deriv(BoundaryPoint::from_angle(angle))
            .map_or(0.0, |d| d.norm())
    };
    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 0..grid.n() {
        let angle = grid.angle(j);
        if e.contains(angle) {
            let v = at(angle);
            if v > best.0 {
                best = (v, angle);
            }
        }
    }
    for arc in e.arcs() {
        for angle in [arc.start, arc.end()] {
            let v = at(angle);
            if v > best.0 {
                best = (v, angle);
            }
        }
    }
    let h = grid.spacing();
    for k in -32..=32 {
        let angle = best.1 + h * k as f64 / 32.0;
        if e.closure_contains(angle) {
            best.0 = best.0.max(at(angle));
        }
    }
    if !(best.0 <= OVERFLOW_GUARD) {
        return Err(LabError::UnboundedOnE { max: best.0 });
    }
    Ok(best.0)
}

/// `e^{1/e}·‖φ'‖_{∞,E}^{ω}·((1+|z|)/(1-|z|))^{1-ω}`.
pub fn simple_bound_rhs(phi: &HoloMap, e: &ArcSet, z: DiskPoint, cfg: &BoundConfig) -> Result<f64> {
    let sup = sup_deriv_on(phi, e, &cfg.grid)?;
    let w = omega(z, e);
    let r = z.modulus();
    let sup_part = if w == 0.0 { 1.0 } else { sup.powf(w) };
    Ok(E.powf(1.0 / E) * sup_part * ((1.0 + r) / (1.0 - r)).powf(1.0 - w))
}
