use serde::{Deserialize, Serialize};

use super::{f_z, log_integral, log_integral_with, main_rhs, omega, q_ratio, simple_bound_rhs, tolerance, BoundConfig};
use crate::error::{LabError, Result};
use crate::geometry::quadrature::{harmonic_integral, Kernel, Piece};
use crate::geometry::{ArcSet, BoundaryPoint, DiskPoint, Estimate, Singularity};
use crate::zoo::{Derivative, HoloMap};

/// Every intermediate quantity of the reverse bound at one point.
///
/// `gzz = exp(i1 + i2)` is the modulus at `z` of the outer function whose
/// boundary modulus is `|φ'|` on `E` and `|F_z|` off it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub z: DiskPoint,
    pub q: f64,
    pub fzz: f64,
    pub gzz: f64,
    pub i1: f64,
    pub i2: f64,
    pub i2_bound: f64,
    pub rhs_main: f64,
    pub rhs_simple: Option<f64>,
    pub omega_e: f64,
    pub taburetka: f64,
    pub quad_error: f64,
    /// `∫ |F_z| dω_z` over the complement of `E`.
    pub tilde_integral: f64,
    /// `i2_bound` after replacing the complement integral by its bound.
    pub i2_final: f64,
    /// Largest `(|F_z(ζ)| - |φ'(ζ)|)/max(1, |φ'(ζ)|)` over grid nodes of `E`.
    pub estone_residual: f64,
}

pub const CSV_HEADER: &str = "re,im,q,fzz,gzz,i1,i2,i2_bound,rhs_main,rhs_simple,omega_e,taburetka,quad_error,tilde_integral,i2_final,estone_residual";

impl ChainReport {
    pub fn csv_header() -> &'static str {
        CSV_HEADER
    }

    /// One CSV row; an unbounded `rhs_simple` is written as `inf`.
    pub fn to_csv_row(&self) -> String {
        let z = self.z.value();
        let simple = self.rhs_simple.unwrap_or(f64::INFINITY);
        let cols = [
            z.re,
            z.im,
            self.q,
            self.fzz,
            self.gzz,
            self.i1,
            self.i2,
            self.i2_bound,
            self.rhs_main,
            simple,
            self.omega_e,
            self.taburetka,
            self.quad_error,
            self.tilde_integral,
            self.i2_final,
            self.estone_residual,
        ];
        cols.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("chain report serializes")
    }

    pub fn tolerance(&self) -> f64 {
        tolerance(self.quad_error)
    }

    /// The links of the chain as `(name, residual)`, each required `<= tol`.
    pub fn links(&self) -> Vec<(&'static str, f64)> {
        let r = self.z.modulus();
        vec![
            ("q=fzz", (self.q - self.fzz).abs()),
            ("fzz<=gzz", self.fzz - self.gzz),
            ("estone", self.estone_residual),
            ("i2<=i2_bound", self.i2 - self.i2_bound),
            ("i2_bound<=i2_final", self.i2_bound - self.i2_final),
            ("taburetka", self.taburetka - (1.0 + r) / (1.0 - r)),
            ("gzz<=rhs_main", self.gzz - self.rhs_main),
        ]
    }

    /// First link whose residual exceeds the tolerance.
    pub fn first_violation(&self) -> Option<(&'static str, f64)> {
        let tol = self.tolerance();
        self.links().into_iter().find(|&(_, res)| !(res <= tol))
    }
}

/// Build the chain at `z` and check every link.
pub fn bound_chain(phi: &HoloMap, e: &ArcSet, z: DiskPoint, cfg: &BoundConfig) -> Result<ChainReport> {
    let report = chain_values(phi, e, z, cfg)?;
    if let Some((link, residual)) = report.first_violation() {
        return Err(LabError::ChainViolation {
            link: link.to_string(),
            residual,
        });
    }
    Ok(report)
}

fn abs_f_z(phi: &HoloMap, z: DiskPoint, p: BoundaryPoint) -> Option<f64> {
    f_z(phi, z, p).ok().map(|v| v.norm())
}

/// The chain without the final checks.
pub fn chain_values(phi: &HoloMap, e: &ArcSet, z: DiskPoint, cfg: &BoundConfig) -> Result<ChainReport> {
    let q = q_ratio(phi, z);
    let fzz = f_z(phi, z, z)?.re;
    let omega_e = omega(z, e);
    let rest = 1.0 - omega_e;
    let tilde = e.complement();
    // |F_z| is bounded on T and oscillates at the atoms of φ
    let sings = phi.atom_singularities();

    let i1 = log_integral(&Derivative(phi), e, z, &cfg.quad)?;
    let i2 = log_integral_with(&|p| abs_f_z(phi, z, p).map(f64::ln), &sings, &tilde, z, &cfg.quad)?;
    let abs_f = |p: BoundaryPoint| abs_f_z(phi, z, p).unwrap_or(0.0);
    let tilde_est = modulus_integral(&abs_f, &sings, &tilde, z, cfg);
    let on_e = modulus_integral(&abs_f, &sings, e, z, cfg);
    let taburetka = Estimate::new(tilde_est.value + on_e.value, tilde_est.error + on_e.error);

    let r = z.modulus();
    let (i2_bound, i2_final) = if rest < super::DEGENERATE_EPS || tilde.is_empty() {
        (0.0, 0.0)
    } else {
        (
            rest * (tilde_est.value / rest).ln(),
            rest * (((1.0 + r) / (1.0 - r)) / rest).ln(),
        )
    };
    let i2_value = if tilde.is_empty() { 0.0 } else { i2.value };
    let gzz = (i1.value + i2_value).exp();
    let rhs_main = main_rhs(i1.value, omega_e, z);
    let rhs_simple = simple_bound_rhs(phi, e, z, cfg).ok();

    let mut estone_residual = f64::NEG_INFINITY;
    for p in cfg.grid.nodes() {
        if !e.contains(p.angle()) {
            continue;
        }
        if let (Some(d), Some(f)) = (phi.boundary_deriv(p), abs_f_z(phi, z, p)) {
            let d = d.norm();
            estone_residual = estone_residual.max((f - d) / d.max(1.0));
        }
    }
    if estone_residual == f64::NEG_INFINITY {
        estone_residual = 0.0;
    }

    let log_err = i1.error + i2.error;
    let tilde_rel = if tilde_est.value > 0.0 {
        tilde_est.error / tilde_est.value
    } else {
        0.0
    };
    let quad_error = [
        gzz * log_err.exp_m1(),
        rhs_main * i1.error.exp_m1(),
        taburetka.error,
        i2.error + rest * tilde_rel,
    ]
    .into_iter()
    .fold(0.0, f64::max);

    Ok(ChainReport {
        z,
        q,
        fzz,
        gzz,
        i1: i1.value,
        i2: i2_value,
        i2_bound,
        rhs_main,
        rhs_simple,
        omega_e,
        taburetka: taburetka.value,
        quad_error,
        tilde_integral: tilde_est.value,
        i2_final,
        estone_residual,
    })
}

fn modulus_integral(
    f: &(dyn Fn(BoundaryPoint) -> f64 + Sync),
    sings: &[Singularity],
    e: &ArcSet,
    z: DiskPoint,
    cfg: &BoundConfig,
) -> Estimate {
    if e.is_empty() {
        return Estimate::new(0.0, 0.0);
    }
    harmonic_integral(
        z.value(),
        &[Piece {
            arcs: e,
            f,
            singularities: sings,
        }],
        Kernel::Poisson,
        &cfg.quad,
    )
    .re()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dp(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    #[test]
    fn moebius_chain_is_all_equalities() {
        let m = HoloMap::moebius(c(0.6, -0.8), c(0.3, 0.5)).unwrap();
        let z = dp(-0.4, 0.2);
        let rep = bound_chain(&m, &ArcSet::full(), z, &BoundConfig::default()).unwrap();
        for (a, b) in [(rep.q, rep.fzz), (rep.fzz, rep.gzz), (rep.gzz, rep.rhs_main)] {
            assert!((a - b).abs() <= 1e-10 * b, "{rep:?}");
        }
        assert!(rep.estone_residual.abs() < 1e-12);
    }

    #[test]
    fn z_squared_chain_at_origin() {
        let sq = HoloMap::blaschke(vec![c(0.0, 0.0), c(0.0, 0.0)], c(1.0, 0.0)).unwrap();
        let rep = bound_chain(&sq, &ArcSet::full(), DiskPoint::origin(), &BoundConfig::default()).unwrap();
        assert_eq!(rep.q, 1.0);
        assert_eq!(rep.fzz, 1.0);
        assert!(rep.gzz <= 2.0 + 1e-12);
        assert!((rep.rhs_main - 2.0).abs() < 1e-12);
        assert_eq!(rep.omega_e, 1.0);
        assert_eq!(rep.i2, 0.0);
    }

    #[test]
    fn b_alpha_chain_on_half_circle() {
        let b = HoloMap::b_alpha(c(0.5, 0.0)).unwrap();
        let e = ArcSet::arc(0.5 * PI, 1.5 * PI);
        let rep = bound_chain(&b, &e, dp(0.3, 0.0), &BoundConfig::default()).unwrap();
        assert!(rep.quad_error < 1e-8, "{rep:?}");
        assert!(rep.rhs_simple.is_some());
        assert!(rep.q <= rep.rhs_main);
        let back: ChainReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert_eq!(rep.to_csv_row().split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn json_field_names() {
        let m = HoloMap::identity();
        let rep = bound_chain(&m, &ArcSet::full(), DiskPoint::origin(), &BoundConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        for key in [
            "z",
            "q",
            "fzz",
            "gzz",
            "i1",
            "i2",
            "i2_bound",
            "rhs_main",
            "rhs_simple",
            "omega_e",
            "taburetka",
            "quad_error",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
