use crate::bounds::{log_integral, q_ratio};
use crate::error::Result;
use crate::geometry::quadrature::QuadConfig;
use crate::geometry::{ArcSet, DiskPoint, Estimate};
use crate::zoo::{Derivative, HoloMap, LogModulus};

use super::sampling::default_probes;

/// Relative agreement required between `|θ'|` and `Q_θ` at each probe.
pub const MOEBIUS_REL: f64 = 1e-10;
/// A log-deficit above this certifies a nontrivial inner factor.
pub const NON_OUTER_THRESHOLD: f64 = 0.1;
pub const DEFAULT_PROBES: usize = 32;
pub const DEFAULT_PROBE_RADIUS: f64 = 0.9;

fn probes_or_default(probes: &[DiskPoint]) -> Vec<DiskPoint> {
    if probes.is_empty() {
        default_probes(DEFAULT_PROBES, DEFAULT_PROBE_RADIUS)
    } else {
        probes.to_vec()
    }
}

/// Largest `| |θ'(z)| - Q_θ(z) | / Q_θ(z)` over the probes.
pub fn moebius_residual(theta: &HoloMap, probes: &[DiskPoint]) -> f64 {
    probes_or_default(probes)
        .iter()
        .map(|&z| {
            let q = q_ratio(theta, z);
            (theta.deriv(z.value()).norm() - q).abs() / q.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Whether `|θ'| = Q_θ` holds at every probe. An empty probe list means the
/// default 32 points in `|z| <= 0.9`.
pub fn moebius_detect(theta: &HoloMap, probes: &[DiskPoint]) -> bool {
    moebius_residual(theta, probes) <= MOEBIUS_REL
}

/// Largest `Q_θ(z)/|θ'(z)|` over the probes; bounded by 1 exactly for Möbius maps.
pub fn deriv_ratio_evidence(theta: &HoloMap, probes: &[DiskPoint]) -> f64 {
    probes_or_default(probes)
        .iter()
        .map(|&z| q_ratio(theta, z) / theta.deriv(z.value()).norm())
        .fold(0.0, f64::max)
}

/// `max |log|f(z)| - ∫ log|f| dω_z|` over the probes, with its quadrature error.
///
/// Infinite when `f` vanishes at a probe.
pub fn outer_check(f: &dyn LogModulus, probes: &[DiskPoint], quad: &QuadConfig) -> Result<Estimate> {
    let mut worst = Estimate::new(0.0, 0.0);
    for z in probes_or_default(probes) {
        let d = log_deficit(f, z, quad)?;
        if d.value.abs() > worst.value || !d.value.is_finite() {
            worst = Estimate::new(d.value.abs(), d.error);
            if !d.value.is_finite() {
                break;
            }
        }
    }
    Ok(worst)
}

/// `log|f(z)| - ∫ log|f| dω_z`, which is `log` of the inner factor's modulus.
fn log_deficit(f: &dyn LogModulus, z: DiskPoint, quad: &QuadConfig) -> Result<Estimate> {
    let integral = log_integral(f, &ArcSet::full(), z, quad)?;
    Ok(Estimate::new(
        f.value(z.value()).norm().ln() - integral.value,
        integral.error,
    ))
}

/// What [`inner_factor_probe`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    /// `max | |θ'| - |I|·|O_{|θ'|}| | / |θ'|`, small iff `I` is the whole inner factor.
    Relative,
    /// `max log(|θ'|/(|I|·|O_{|θ'|}|))`, nonpositive iff `I` divides the inner factor.
    LogDeficit,
}

/// Compare the inner factor of `θ'` against `candidate` at the probes.
pub fn inner_factor_probe(
    theta: &HoloMap,
    candidate: &HoloMap,
    probes: &[DiskPoint],
    mode: ProbeMode,
    quad: &QuadConfig,
) -> Result<Estimate> {
    let deriv = Derivative(theta);
    let mut worst = Estimate::new(f64::NEG_INFINITY, 0.0);
    for z in probes_or_default(probes) {
        let d = log_deficit(&deriv, z, quad)?;
        let log_cand = candidate.eval(z.value()).norm().ln();
        let v = match mode {
            // |θ'| - |I|·|O| relative to |θ'| is 1 - exp(log|I| - deficit)
            ProbeMode::Relative => {
                Estimate::new((log_cand - d.value).exp_m1().abs(), d.error * (1.0 + d.error.exp_m1()))
            }
            ProbeMode::LogDeficit => Estimate::new(d.value - log_cand, d.error),
        };
        if v.value > worst.value || v.value.is_nan() {
            worst = v;
        }
    }
    Ok(worst)
}
