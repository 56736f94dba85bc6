use std::f64::consts::TAU;

use num_complex::Complex64;

use super::quadrature::{arc_integral, Estimate, QuadConfig};
use super::{poisson_kernel, ArcSet, BoundarySamples, CircleGrid, DiskPoint, LogSingularity};
use crate::error::{LabError, Result};
use crate::zoo::{HoloMap, OuterData};

/// Floor applied to boundary moduli before taking logarithms.
pub const CLAMP_FLOOR: f64 = 1e-300;

/// Normalized arclength `m(E)`.
pub fn arc_measure(e: &ArcSet) -> f64 {
    (e.length() / TAU).clamp(0.0, 1.0)
}

/// Controls for direct Poisson-kernel quadrature of harmonic measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicOptions {
    /// Grid spacing the resolution check is measured against.
    pub spacing: f64,
    /// Refine dyadically around `arg z` when the kernel is narrower than the grid.
    pub adaptive: bool,
    pub max_depth: u32,
    pub quad: QuadConfig,
}

impl HarmonicOptions {
    pub fn for_grid(grid: &CircleGrid) -> Self {
        HarmonicOptions {
            spacing: grid.spacing(),
            adaptive: true,
            max_depth: 12,
            quad: QuadConfig::for_grid_n(grid.n()),
        }
    }
}

/// `ω_z(E)`, integrating the Poisson kernel over the arcs of `E`.
pub fn harmonic_measure(z: DiskPoint, e: &ArcSet, grid: &CircleGrid) -> Result<Estimate> {
    harmonic_measure_with(z, e, &HarmonicOptions::for_grid(grid))
}

pub fn harmonic_measure_with(z: DiskPoint, e: &ArcSet, opts: &HarmonicOptions) -> Result<Estimate> {
    if e.is_empty() {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let zc = z.value();
    let width = 1.0 - z.modulus();
    let mut extra = Vec::new();
    if width < 4.0 * opts.spacing {
        if !opts.adaptive {
            return Err(LabError::GridTooCoarse {
                width,
                spacing: opts.spacing,
            });
        }
        // nested cells around arg z, halving down to the kernel width
        let center = zc.arg();
        let mut d = 4.0 * opts.spacing;
        for _ in 0..=opts.max_depth {
            extra.push(center - d);
            extra.push(center + d);
            d *= 0.5;
            if d < 0.25 * width {
                break;
            }
        }
        extra.push(center);
    }
    let kernel = |t: f64| Complex64::new(poisson_kernel(zc, Complex64::from_polar(1.0, t)), 0.0);
    let est = arc_integral(&kernel, e, &[], &extra, &opts.quad);
    Ok(Estimate::new(est.value.re.clamp(0.0, 1.0), est.error))
}

fn check_resolution(z: DiskPoint, grid: &CircleGrid) -> Result<()> {
    let width = 1.0 - z.modulus();
    if width < 4.0 * grid.spacing() {
        return Err(LabError::GridTooCoarse {
            width,
            spacing: grid.spacing(),
        });
    }
    Ok(())
}

/// Real sample values with declared log singularities removed.
///
/// Excluded nodes (NaN) and nodes sitting on a declared singularity get the
/// average of their neighbours' remainders.
pub(crate) fn regular_remainder(u: &BoundarySamples) -> Vec<f64> {
    let grid = u.grid;
    let n = grid.n();
    let sing_dist = |j: usize, s: &LogSingularity| (2.0 * (0.5 * (grid.angle(j) - s.angle)).sin()).abs();
    let mut rem: Vec<f64> = (0..n)
        .map(|j| {
            let v = u.values[j].re;
            if v.is_nan() {
                return f64::NAN;
            }
            let mut r = v;
            for s in &u.log_singularities {
                let d = sing_dist(j, s);
                if d < 1e-12 {
                    return f64::NAN;
                }
                r -= s.coeff * d.ln();
            }
            r
        })
        .collect();
    let holes: Vec<usize> = (0..n).filter(|&j| rem[j].is_nan()).collect();
    for j in holes {
        let l = rem[(j + n - 1) % n];
        let r = rem[(j + 1) % n];
        rem[j] = match (l.is_nan(), r.is_nan()) {
            (false, false) => 0.5 * (l + r),
            (false, true) => l,
            (true, false) => r,
            (true, true) => 0.0,
        };
    }
    rem
}

fn trapezoid_with(rem: &[f64], grid: &CircleGrid, kernel: impl Fn(Complex64) -> Complex64) -> Estimate<Complex64> {
    let n = grid.n();
    let mut full = Complex64::new(0.0, 0.0);
    let mut half = Complex64::new(0.0, 0.0);
    for (j, &r) in rem.iter().enumerate() {
        let term = kernel(grid.node(j).value()) * r;
        full += term;
        if j % 2 == 0 {
            half += term;
        }
    }
    let full = full / n as f64;
    let half = half * 2.0 / n as f64;
    let rounding = 50.0 * f64::EPSILON * full.norm().max(1.0);
    Estimate::new(full, (full - half).norm().max(rounding))
}

/// `∫ u dω_z` by kernel-weighted trapezoid quadrature of real samples.
pub fn poisson_integral(z: DiskPoint, u: &BoundarySamples) -> Result<Estimate> {
    if !u.is_real() {
        return Err(LabError::ParamOutOfDomain("Poisson integral needs real samples".into()));
    }
    check_resolution(z, &u.grid)?;
    let zc = z.value();
    let rem = regular_remainder(u);
    let est = trapezoid_with(&rem, &u.grid, |zeta| Complex64::new(poisson_kernel(zc, zeta), 0.0));
    let singular: f64 = u
        .log_singularities
        .iter()
        .map(|s| s.coeff * (zc - Complex64::from_polar(1.0, s.angle)).norm().ln())
        .sum();
    Ok(Estimate::new(est.value.re + singular, est.error))
}

/// `∫ (ζ+z)/(ζ-z) log h(ζ) dm(ζ)`, before exponentiation.
pub fn herglotz_integral(z: DiskPoint, logh: &BoundarySamples) -> Result<Estimate<Complex64>> {
    if !logh.is_real() {
        return Err(LabError::ParamOutOfDomain(
            "Herglotz integral needs real samples".into(),
        ));
    }
    check_resolution(z, &logh.grid)?;
    let zc = z.value();
    let rem = regular_remainder(logh);
    let est = trapezoid_with(&rem, &logh.grid, |zeta| (zeta + zc) / (zeta - zc));
    let one = Complex64::new(1.0, 0.0);
    let singular: Complex64 = logh
        .log_singularities
        .iter()
        .map(|s| s.coeff * (one - Complex64::from_polar(1.0, -s.angle) * zc).ln())
        .sum();
    Ok(Estimate::new(est.value + singular, est.error))
}

/// Thresholds for building outer functions from sampled moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterOptions {
    pub clamp_floor: f64,
    /// Largest normalized measure of clamped nodes tolerated.
    pub max_clamped_mass: f64,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions {
            clamp_floor: CLAMP_FLOOR,
            max_clamped_mass: 0.01,
        }
    }
}

/// The outer function with boundary modulus `h`, normalized so `O(0) > 0`.
///
/// Log singularities declared on `h` are carried over to `log h`; nodes on
/// them are excluded instead of clamped.
pub fn outer_from_modulus(h: &BoundarySamples, opts: &OuterOptions) -> Result<HoloMap> {
    if !h.is_real() {
        return Err(LabError::ParamOutOfDomain("modulus samples must be real".into()));
    }
    let grid = h.grid;
    let mut clamped = 0usize;
    let mut values = Vec::with_capacity(grid.n());
    for (j, v) in h.values.iter().enumerate() {
        let x = v.re;
        let on_sing = h
            .log_singularities
            .iter()
            .any(|s| (2.0 * (0.5 * (grid.angle(j) - s.angle)).sin()).abs() < 1e-12);
        if x.is_nan() || on_sing {
            values.push(f64::NAN);
        } else if x < 0.0 {
            return Err(LabError::ParamOutOfDomain(format!("negative modulus {x} at node {j}")));
        } else if x < opts.clamp_floor {
            clamped += 1;
            values.push(opts.clamp_floor.ln());
        } else {
            values.push(x.ln());
        }
    }
    let clamped_mass = clamped as f64 * grid.weight();
    if clamped_mass > opts.max_clamped_mass {
        return Err(LabError::NotLogIntegrable {
            clamped_mass,
            threshold: opts.max_clamped_mass,
        });
    }
    let mut logh = BoundarySamples::from_real(grid, values)?.with_log_singularities(h.log_singularities.clone());
    logh.clamped_mass = clamped_mass;
    Ok(HoloMap::outer(OuterData::from_log_samples(&logh)?))
}
