use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};
use crate::geometry::{BoundaryPoint, BoundarySamples, CircleGrid, LogSingularity};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// An outer function `exp H` stored through the Taylor coefficients of `H`.
///
/// `H(z) = Σ_k c_k z^k + Σ_s c_s Log(1 - ζ̄_s z)`: the power series carries
/// the regular part of `log h` and the logarithms carry its declared
/// singularities exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterData {
    grid: CircleGrid,
    coeffs: Vec<Complex64>,
    singularities: Vec<LogSingularity>,
    sup_log: f64,
    clamped_mass: f64,
}

impl OuterData {
    /// Build from samples of `log h`; `NaN` nodes are filled from their
    /// neighbours.
    pub fn from_log_samples(logh: &BoundarySamples) -> Result<Self> {
        if !logh.is_real() {
            return Err(LabError::ParamOutOfDomain("log-modulus samples must be real".into()));
        }
        let grid = logh.grid;
        let n = grid.n();
        let rem = crate::geometry::regular_remainder(logh);
        let mut buf: Vec<Complex64> = rem.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = n / 2;
        let scale = 1.0 / n as f64;
        let mut coeffs = Vec::with_capacity(half + 1);
        coeffs.push(Complex64::new(buf[0].re * scale, 0.0));
        for b in &buf[1..half] {
            coeffs.push(2.0 * b * scale);
        }
        coeffs.push(Complex64::new(buf[half].re * scale, 0.0));
        // drop the round-off tail so evaluation stays cheap
        let floor = 1e-17 * coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= floor) {
            coeffs.pop();
        }
        let pole = logh.log_singularities.iter().any(|s| s.coeff < 0.0);
        let sup_log = if pole {
            f64::INFINITY
        } else {
            logh.values
                .iter()
                .map(|v| v.re)
                .filter(|v| !v.is_nan())
                .fold(f64::NEG_INFINITY, f64::max)
        };
        Ok(OuterData {
            grid,
            coeffs,
            singularities: logh.log_singularities.clone(),
            sup_log,
            clamped_mass: logh.clamped_mass,
        })
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn log_singularities(&self) -> &[LogSingularity] {
        &self.singularities
    }

    /// Largest sampled `log h`, `+∞` when a declared singularity is a pole.
    pub fn sup_log_modulus(&self) -> f64 {
        self.sup_log
    }

    pub fn clamped_mass(&self) -> f64 {
        self.clamped_mass
    }

    /// `H(z)` and `H'(z)`.
    fn exponent(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut h = Complex64::new(0.0, 0.0);
        let mut dh = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dh = dh * z + h;
            h = h * z + c;
        }
        for s in &self.singularities {
            let conj = Complex64::from_polar(1.0, -s.angle);
            let d = ONE - conj * z;
            h += s.coeff * d.ln();
            dh -= s.coeff * conj / d;
        }
        (h, dh)
    }

    pub fn eval_with_deriv(&self, z: Complex64) -> (Complex64, Complex64) {
        let (h, dh) = self.exponent(z);
        let v = h.exp();
        (v, v * dh)
    }

    pub fn boundary_eval_with_deriv(&self, p: BoundaryPoint) -> Option<(Complex64, Complex64)> {
        if self
            .singularities
            .iter()
            .any(|s| crate::geometry::wrap_angle(p.angle() - s.angle) == 0.0)
        {
            return None;
        }
        Some(self.eval_with_deriv(p.value()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{outer_from_modulus, OuterOptions};
    use crate::zoo::HoloMap;

    fn dist_to_one(p: BoundaryPoint) -> f64 {
        (2.0 * (0.5 * p.angle()).sin()).abs()
    }

    fn sample_points() -> Vec<Complex64> {
        let mut pts = Vec::new();
        for i in 0..8 {
            for j in 0..12 {
                let r = 0.95 * i as f64 / 7.0;
                pts.push(Complex64::from_polar(r, j as f64 * 0.5));
            }
        }
        pts
    }

    #[test]
    fn unit_modulus_gives_one() {
        let g = CircleGrid::new(256).unwrap();
        let h = BoundarySamples::sample_real(g, |_| Some(1.0));
        let o = outer_from_modulus(&h, &OuterOptions::default()).unwrap();
        for z in sample_points() {
            assert!((o.eval(z) - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn one_minus_z_is_recovered() {
        let g = CircleGrid::new(1 << 14).unwrap();
        let h = BoundarySamples::sample_real(g, |p| Some(dist_to_one(p)))
            .with_log_singularities(vec![LogSingularity { angle: 0.0, coeff: 1.0 }]);
        let o = outer_from_modulus(&h, &OuterOptions::default()).unwrap();
        for z in sample_points() {
            let want = ONE - z;
            assert!((o.eval(z) - want).norm() <= 1e-8 * want.norm(), "z = {z}");
        }
    }

    #[test]
    fn double_pole_is_recovered() {
        let g = CircleGrid::new(1 << 14).unwrap();
        let h = BoundarySamples::sample_real(g, |p| {
            let d = dist_to_one(p);
            (d > 0.0).then(|| 2.0 / (d * d))
        })
        .with_log_singularities(vec![LogSingularity {
            angle: 0.0,
            coeff: -2.0,
        }]);
        let o = outer_from_modulus(&h, &OuterOptions::default()).unwrap();
        assert!(!o.is_self_map());
        for z in sample_points() {
            let want = 2.0 / ((ONE - z) * (ONE - z));
            assert!((o.eval(z) - want).norm() <= 1e-8 * want.norm(), "z = {z}");
            let dwant = 4.0 / ((ONE - z) * (ONE - z) * (ONE - z));
            assert!((o.deriv(z) - dwant).norm() <= 1e-8 * dwant.norm());
        }
    }

    #[test]
    fn smooth_modulus_matches_exponential() {
        // h = |exp(z^3/2)| on the circle, so O = exp(z^3/2)
        let g = CircleGrid::new(128).unwrap();
        let h = BoundarySamples::sample_real(g, |p| Some((0.5 * (p.value().powi(3)).re).exp()));
        let o = outer_from_modulus(&h, &OuterOptions::default()).unwrap();
        for z in sample_points() {
            let want = (0.5 * z.powi(3)).exp();
            assert!((o.eval(z) - want).norm() < 1e-13);
        }
        assert_eq!(
            HoloMap::outer(OuterData::from_log_samples(&BoundarySamples::sample_real(g, |_| Some(0.0))).unwrap()).tag(),
            "outer"
        );
    }

    #[test]
    fn clamping_beyond_threshold_errors() {
        let g = CircleGrid::new(64).unwrap();
        let h = BoundarySamples::sample_real(g, |p| Some(if p.angle() < 1.0 { 0.0 } else { 1.0 }));
        assert!(matches!(
            outer_from_modulus(&h, &OuterOptions::default()),
            Err(LabError::NotLogIntegrable { .. })
        ));
    }
}
