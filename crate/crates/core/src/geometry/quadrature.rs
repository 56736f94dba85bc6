//! Adaptive quadrature on the unit circle against harmonic measure.
//!
//! Integrals `∫ w(ζ) f(ζ) dω_z(ζ)` are evaluated after pulling back by the
//! disk automorphism `φ_z(ξ) = (ξ + z)/(1 + z̄ξ)`, which carries normalized
//! arclength to `ω_z`. The Poisson kernel then disappears from the integrand
//! and near-boundary `z` costs nothing extra.
//!
//! Each arc of the (pulled-back) domain is split into panels and integrated
//! with adaptive Gauss-Kronrod (G7/K15). Panels are bounded in width both in
//! the pulled-back variable and in the original one, so features of the data
//! stay resolved after the pullback compresses them.
//!
//! Boundary atoms of singular inner factors make the data oscillate without
//! bound near one point (`exp(-iσ cot(θ/2))`). Around such a point the
//! integral is taken in `s = cot((θ - θ_k)/2)`, where the oscillation has the
//! fixed period `2π/σ`. The range `s > L` is replaced by its mean over the
//! last period times the remaining measure, after the declared logarithmic
//! singularity has been removed and integrated in closed form.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{automorphism, automorphism_inv, poisson_kernel, wrap_angle, ArcSet, BoundaryPoint};

/// A quadrature result with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T = f64> {
    pub value: T,
    pub error: f64,
}

impl<T> Estimate<T> {
    pub fn new(value: T, error: f64) -> Self {
        Estimate { value, error }
    }
}

impl Estimate<Complex64> {
    pub fn re(self) -> Estimate<f64> {
        Estimate::new(self.value.re, self.error)
    }
}

/// A boundary point where the data is not analytic.
///
/// `mass` is the weight of a singular inner atom sitting there (0 if none),
/// which fixes the oscillation period `2π/mass` in the cot variable.
/// `log_coeff` is `c` in `f(ζ) ≈ c log|ζ - ζ_k| + bounded`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub angle: f64,
    pub mass: f64,
    pub log_coeff: f64,
}

/// Resolution controls shared by every circle integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Base panel count around the circle.
    pub panels: usize,
    /// Absolute tolerance for a whole-circle integral of unit-size data.
    pub tol: f64,
    /// Maximum adaptive bisection depth below a base panel.
    pub max_depth: u32,
    /// Cutoff `L` of the cot variable near an oscillating atom.
    pub tail_cutoff: f64,
    /// Cutoff near a non-oscillating singular point.
    pub log_tail_cutoff: f64,
    /// Target change between successive tail cutoffs near a singular point.
    pub zone_tol: f64,
    /// Cap on panels spent on one side of one atom.
    pub max_zone_panels: usize,
}

impl QuadConfig {
    /// Resolution matched to an `n`-point uniform grid.
    pub fn for_grid_n(n: usize) -> Self {
        QuadConfig {
            panels: (n / 16).max(16),
            ..Self::default()
        }
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            panels: 256,
            tol: 1e-13,
            max_depth: 16,
            tail_cutoff: 4096.0,
            log_tail_cutoff: 1048576.0,
            zone_tol: 1e-12,
            max_zone_panels: 1 << 15,
        }
    }
}

/// Weight `w(ζ)` multiplying the data inside `∫ w f dω_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `∫ f dω_z`.
    Poisson,
    /// `∫ (ζ+z)/(ζ-z) f dm`.
    Herglotz,
    /// `∫ 2ζ/(ζ-z)^2 f dm`, the z-derivative of the Herglotz integral.
    HerglotzDerivative,
}

impl Kernel {
    fn weight(self, z: Complex64, zeta: Complex64) -> Complex64 {
        let r = z.norm();
        let d = (1.0 - r) * (1.0 + r);
        match self {
            Kernel::Poisson => Complex64::new(1.0, 0.0),
            Kernel::Herglotz => Complex64::new(1.0, 2.0 * (z * zeta.conj()).im / d),
            Kernel::HerglotzDerivative => 2.0 * zeta * (zeta.conj() - z.conj()) / ((zeta - z) * d),
        }
    }
}

/// Real data restricted to an arc set.
pub struct Piece<'a> {
    pub arcs: &'a ArcSet,
    pub f: &'a (dyn Fn(BoundaryPoint) -> f64 + Sync),
    pub singularities: &'a [Singularity],
}

// Gauss-Kronrod 7/15 nodes on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy)]
struct Gk {
    value: Complex64,
    error: f64,
    abs: f64,
}

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Gk {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for i in 0..7 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k += (f1 + f2) * WGK[i];
        abs += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (f1 + f2) * WG[i / 2];
        }
    }
    let value = k * h;
    let abs = abs * h.abs();
    let raw = ((k - g) * h).norm();
    // QUADPACK scaling of |K - G|, floored at accumulated rounding
    let mut error = raw;
    if abs > 0.0 && raw > 0.0 {
        error = abs * (200.0 * raw / abs).powf(1.5).min(1.0);
    }
    error = error.max(50.0 * f64::EPSILON * abs);
    Gk { value, error, abs }
}

fn adapt(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> Gk {
    refine(f, a, b, gk15(f, a, b), tol, depth)
}

fn refine(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, whole: Gk, tol: f64, depth: u32) -> Gk {
    // an estimate sitting on the rounding floor cannot be improved by bisection
    let at_floor = whole.error <= 50.0 * f64::EPSILON * whole.abs * (1.0 + 1e-9);
    if whole.error <= tol || at_floor || depth == 0 || !whole.value.re.is_finite() {
        return whole;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    let sum = |l: Gk, r: Gk| Gk {
        value: l.value + r.value,
        error: l.error + r.error,
        abs: l.abs + r.abs,
    };
    // a resolved panel whose estimate stops shrinking is limited by noise in f
    if whole.error <= 1e-8 * whole.abs && left.error + right.error > 0.5 * whole.error {
        return sum(left, right);
    }
    sum(
        refine(f, a, m, left, 0.5 * tol, depth - 1),
        refine(f, m, b, right, 0.5 * tol, depth - 1),
    )
}

/// Adaptive Gauss-Kronrod over consecutive panels `[bps[i], bps[i+1]]`.
fn integrate_panels(f: &dyn Fn(f64) -> Complex64, bps: &[f64], tol_density: f64, depth: u32) -> Estimate<Complex64> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in bps.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let r = adapt(f, a, b, tol_density * (b - a), depth);
        value += r.value;
        error += r.error;
    }
    Estimate::new(value, error)
}

/// Breakpoints in the pulled-back angle `t`: uniform in `t`, plus the
/// pullback of uniform points in the original angle.
fn base_breakpoints(z: Complex64, panels: usize) -> Vec<f64> {
    let mut bps: Vec<f64> = (0..panels).map(|j| TAU * j as f64 / panels as f64).collect();
    if z.norm() > 0.0 {
        bps.extend((0..panels).map(|j| {
            let zeta = Complex64::from_polar(1.0, TAU * j as f64 / panels as f64);
            wrap_angle(automorphism(z, zeta).arg())
        }));
    }
    bps.sort_by(f64::total_cmp);
    bps
}

/// Breakpoints strictly inside `(a, b)`, where `a < b` may exceed 2π.
fn breakpoints_between(base: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut out = vec![a];
    let turns = [0.0, TAU, 2.0 * TAU];
    for &k in &turns {
        for &t in base {
            let x = t + k;
            if x > a + 1e-14 && x < b - 1e-14 {
                out.push(x);
            }
        }
    }
    out.push(b);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    out
}

/// Pulled-back singularity data.
#[derive(Clone, Copy)]
struct PulledSingularity {
    angle: f64,
    mass: f64,
    log_coeff: Complex64,
}

/// `(1/π) ∫_0^U [log 2 - ½ log(1+u²) + log u] / (1+u²) du`, the exact
/// contribution of `log|ξ - ξ_k|` beyond cot-variable cutoff `1/U`.
fn log_tail(u: f64) -> f64 {
    let mut log_part = 0.0;
    let lu = u.ln();
    let mut pow = u;
    for k in 0..12 {
        let m = (2 * k + 1) as f64;
        let term = pow * (lu / m - 1.0 / (m * m));
        if k % 2 == 0 {
            log_part += term;
        } else {
            log_part -= term;
        }
        pow *= u * u;
    }
    let u3 = u * u * u;
    let smooth = std::f64::consts::LN_2 * u.atan() - 0.5 * (u3 / 3.0 - 0.3 * u3 * u * u);
    (smooth + log_part) / PI
}

/// Mass of `s > L` under `ds / (π(1+s²))`.
fn mass_tail(l: f64) -> f64 {
    (1.0 / l).atan() / PI
}

/// Basis `1, v, v log v, v²` of the tail model and its integrals over `[0, 1]`.
const TAIL_BASIS: usize = 4;
const TAIL_BASIS_INTEGRALS: [f64; TAIL_BASIS] = [1.0, 0.5, -0.25, 1.0 / 3.0];

fn tail_basis(v: f64) -> [f64; TAIL_BASIS] {
    [1.0, v, if v > 0.0 { v * v.ln() } else { 0.0 }, v * v]
}

/// Interpolate `m(v)` in the tail basis through four samples.
fn fit_tail_model(pts: &[(f64, Complex64)]) -> [Complex64; TAIL_BASIS] {
    let n = TAIL_BASIS;
    let mut a: Vec<[f64; TAIL_BASIS]> = pts.iter().map(|p| tail_basis(p.0)).collect();
    let mut rhs: Vec<Complex64> = pts.iter().map(|p| p.1).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row].iter_mut().zip(pivot_row.iter()).skip(col) {
                *dst -= f * src;
            }
            let r = rhs[col];
            rhs[row] -= r * f;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); TAIL_BASIS];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= x[k] * a[row][k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Window statistics of the remainder over `[end - P, end]`.
const PROBE_DEPTH: u32 = 6;

#[derive(Clone, Copy)]
struct Probe {
    v: f64,
    mean: Complex64,
    /// Zero-mean first and second antiderivatives of the oscillating part at `end`.
    f1: Complex64,
    f2: Complex64,
}

/// Integral over distances `(gap, gap + delta)` from a singular point on one
/// side; `gap = 0` includes the point itself.
fn zone_integral(
    g: &dyn Fn(f64) -> Complex64,
    sing: &PulledSingularity,
    dir: f64,
    gap: f64,
    delta: f64,
    base: &[f64],
    cfg: &QuadConfig,
) -> Estimate<Complex64> {
    let theta_of = |s: f64| sing.angle + dir * 2.0 * (1.0 / s).atan();
    let h = |s: f64| g(theta_of(s)) / (PI * (1.0 + s * s));
    let s_lo = 1.0 / (0.5 * (gap + delta)).tan();
    let oscillating = sing.mass > 0.0;
    let period = if oscillating { TAU / sing.mass } else { f64::INFINITY };
    let dtheta = TAU / cfg.panels as f64;
    let cutoff = if oscillating {
        cfg.tail_cutoff.max(64.0 * period)
    } else {
        cfg.log_tail_cutoff
    };

    // `None` once more than `cap` panels would be needed
    let panel_ends = |from: f64, to: f64, cap: usize| -> Option<Vec<f64>> {
        let mut bps = vec![from];
        let mut s = from;
        while s < to {
            if bps.len() > cap {
                return None;
            }
            let width = if oscillating {
                (0.25 * period).min(0.5 * (1.0 + s * s) * dtheta)
            } else {
                (0.5 * s.max(0.5)).min(0.5 * (1.0 + s * s) * dtheta)
            };
            s = (s + width).min(to);
            bps.push(s);
        }
        for &t in base {
            for k in [-TAU, 0.0, TAU] {
                let d = dir * (t + k - sing.angle);
                if d > gap + 1e-14 && d < gap + delta {
                    let sv = 1.0 / (0.5 * d).tan();
                    if sv > from && sv < to {
                        bps.push(sv);
                    }
                }
            }
        }
        bps.sort_by(f64::total_cmp);
        bps.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        Some(bps)
    };

    if gap > 0.0 {
        let s_hi = 1.0 / (0.5 * gap).tan();
        if let Some(bps) = panel_ends(s_lo, s_hi, cfg.max_zone_panels / 4) {
            let depth = cfg.max_depth;
            return integrate_panels(&h, &bps, cfg.tol / TAU, depth);
        }
        let outer = zone_integral(g, sing, dir, 0.0, gap + delta, base, cfg);
        let inner = zone_integral(g, sing, dir, 0.0, gap, base, cfg);
        return Estimate::new(outer.value - inner.value, outer.error + inner.error);
    }

    // Beyond the cutoff L the declared log part is integrated in closed
    // form. The remainder, averaged over one period when it oscillates, is a
    // smooth function of u = 1/s up to a u·log u term and is interpolated
    // in the basis 1, v, v log v, v² with v = uL. The oscillating part contributes
    // -F1(L)w(L) + F2(L)w'(L) after two integrations by parts.
    let remainder = |s: f64| {
        let log_dist = (2.0 / (1.0 + s * s).sqrt()).ln();
        g(theta_of(s)) - sing.log_coeff * log_dist
    };
    let probe = |end: f64, l: f64| -> Probe {
        if !oscillating {
            return Probe {
                v: l / end,
                mean: remainder(end),
                f1: Complex64::new(0.0, 0.0),
                f2: Complex64::new(0.0, 0.0),
            };
        }
        // deep enough for sharp dips within a period, shallow enough to stay
        // clear of rounding noise far out in the cot variable
        let depth = cfg.max_depth.min(PROBE_DEPTH);
        let pieces = 8;
        let step = period / pieces as f64;
        let pts: Vec<f64> = (0..=pieces).map(|i| end - period + step * i as f64).collect();
        let i0 = integrate_panels(&remainder, &pts, cfg.tol, depth).value;
        let i1 = integrate_panels(&|t| remainder(t) * (end - t), &pts, cfg.tol, depth).value;
        let i2 = integrate_panels(&|t| remainder(t) * (end - t) * (end - t), &pts, cfg.tol, depth).value;
        let mean = i0 / period;
        let f1 = -(i1 - mean * (0.5 * period * period)) / period;
        let f2 = -f1 * (0.5 * period) - (i2 - mean * (period * period * period / 3.0)) / (2.0 * period);
        Probe {
            v: l / (end - 0.5 * period),
            mean,
            f1,
            f2,
        }
    };
    let tail_at = |l: f64| -> Complex64 {
        let probes: Vec<Probe> = [1.0, 2.0, 4.0, 8.0].iter().map(|&k| probe(k * l, l)).collect();
        let pts: Vec<(f64, Complex64)> = probes.iter().map(|p| (p.v, p.mean)).collect();
        let coef = fit_tail_model(&pts);
        let u_max = 1.0 / l;
        let w = 1.0 / (PI * (1.0 + l * l));
        let dw = -2.0 * l / (PI * (1.0 + l * l) * (1.0 + l * l));
        let smooth: Complex64 = coef
            .iter()
            .zip(TAIL_BASIS_INTEGRALS)
            .skip(1)
            .map(|(c, i)| c * i)
            .sum::<Complex64>()
            * u_max
            / PI;
        sing.log_coeff * log_tail(u_max) + coef[0] * mass_tail(l) + smooth - probes[0].f1 * w + probes[0].f2 * dw
    };

    let depth = cfg.max_depth;
    let first = if oscillating { 8.0 * period } else { 64.0 };
    let mut l = first.max(4.0 * s_lo).max(8.0).min(cutoff.max(8.0 * s_lo));
    let mut core = Estimate::new(Complex64::new(0.0, 0.0), 0.0);
    let mut panels = 0;
    let mut diff = f64::INFINITY;
    let mut total = Complex64::new(0.0, 0.0);
    // the core is built in two halves so that a first difference exists
    let half = 0.5 * l;
    let split = if half > s_lo {
        vec![s_lo, half, l]
    } else {
        vec![s_lo, l]
    };
    for w in split.windows(2) {
        let Some(bps) = panel_ends(w[0], w[1], cfg.max_zone_panels.saturating_sub(panels)) else {
            break;
        };
        panels += bps.len();
        let more = integrate_panels(&h, &bps, cfg.tol / TAU, depth);
        core.value += more.value;
        core.error += more.error;
        let refined = core.value + tail_at(w[1]);
        if w[0] > s_lo {
            diff = (refined - total).norm();
        }
        total = refined;
        l = w[1];
    }
    if panels == 0 {
        // too close to the point for core panels: the tail model starts at once
        l = s_lo;
        total = tail_at(l);
    }
    loop {
        let next = 2.0 * l;
        if diff <= cfg.zone_tol || next > cutoff.max(8.0 * s_lo) {
            break;
        }
        let Some(bps) = panel_ends(l, next, cfg.max_zone_panels.saturating_sub(panels)) else {
            break;
        };
        panels += bps.len();
        let more = integrate_panels(&h, &bps, cfg.tol / TAU, depth);
        core.value += more.value;
        core.error += more.error;
        l = next;
        let refined = core.value + tail_at(l);
        diff = (refined - total).norm();
        total = refined;
    }
    Estimate::new(total, core.error + diff.min(total.norm().max(1.0)))
}

/// `∫ kernel(ζ) f(ζ) dω_z(ζ)` summed over pieces.
pub fn harmonic_integral(z: Complex64, pieces: &[Piece<'_>], kernel: Kernel, cfg: &QuadConfig) -> Estimate<Complex64> {
    let base = base_breakpoints(z, cfg.panels);
    let mut total = Estimate::new(Complex64::new(0.0, 0.0), 0.0);
    for piece in pieces {
        if piece.arcs.is_empty() {
            continue;
        }
        let g = |t: f64| {
            let zeta = automorphism_inv(z, Complex64::from_polar(1.0, t));
            let p = BoundaryPoint::from_value(zeta);
            let v = (piece.f)(p);
            if v == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                kernel.weight(z, p.value()) * v
            }
        };
        let pulled_arcs = piece.arcs.map_endpoints(|w| automorphism(z, w));
        let sings: Vec<PulledSingularity> = piece
            .singularities
            .iter()
            .map(|s| {
                let zeta = Complex64::from_polar(1.0, s.angle);
                PulledSingularity {
                    angle: wrap_angle(automorphism(z, zeta).arg()),
                    mass: s.mass * poisson_kernel(z, zeta),
                    log_coeff: kernel.weight(z, zeta) * s.log_coeff,
                }
            })
            .collect();
        let est = integrate_arcs(&g, &pulled_arcs, &sings, &base, cfg);
        total.value += est.value;
        total.error += est.error;
    }
    total
}

/// Plain `∫_E f dm` over an arc set in the original variable.
///
/// `extra` adds panel breakpoints (angles) on top of the uniform ones.
pub fn arc_integral(
    f: &dyn Fn(f64) -> Complex64,
    arcs: &ArcSet,
    singularities: &[Singularity],
    extra: &[f64],
    cfg: &QuadConfig,
) -> Estimate<Complex64> {
    let mut base = base_breakpoints(Complex64::new(0.0, 0.0), cfg.panels);
    base.extend(extra.iter().map(|&t| wrap_angle(t)));
    base.sort_by(f64::total_cmp);
    let sings: Vec<PulledSingularity> = singularities
        .iter()
        .map(|s| PulledSingularity {
            angle: wrap_angle(s.angle),
            mass: s.mass,
            log_coeff: Complex64::new(s.log_coeff, 0.0),
        })
        .collect();
    integrate_arcs(f, arcs, &sings, &base, cfg)
}

fn integrate_arcs(
    g: &dyn Fn(f64) -> Complex64,
    arcs: &ArcSet,
    sings: &[PulledSingularity],
    base: &[f64],
    cfg: &QuadConfig,
) -> Estimate<Complex64> {
    // Express every arc as [a, b] with a < b; a full circle starts at a
    // singular point when there is one so that it becomes an endpoint.
    let intervals: Vec<(f64, f64)> = if arcs.is_full() {
        let a = sings.first().map_or(0.0, |s| s.angle);
        vec![(a, a + TAU)]
    } else {
        arcs.arcs().iter().map(|a| (a.start, a.end())).collect()
    };
    let mut total = Estimate::new(Complex64::new(0.0, 0.0), 0.0);
    let density = cfg.tol / TAU;
    for (a, b) in intervals {
        // split at singular points, tagging each cut
        let mut cuts: Vec<(f64, Option<PulledSingularity>)> = vec![(a, None), (b, None)];
        for s in sings {
            for k in [0.0, TAU, 2.0 * TAU, -TAU] {
                let x = s.angle + k;
                if (x - a).abs() < 1e-12 {
                    cuts[0].1 = Some(*s);
                } else if (x - b).abs() < 1e-12 {
                    cuts[1].1 = Some(*s);
                } else if x > a && x < b {
                    cuts.push((x, Some(*s)));
                }
            }
        }
        cuts.sort_by(|p, q| p.0.total_cmp(&q.0));
        for w in cuts.windows(2) {
            let ((lo, s_lo), (hi, s_hi)) = (w[0], w[1]);
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            // a singular point just outside the segment gets a zone offset by its gap
            let nearest_outside = |edge: f64, dir: f64| {
                sings
                    .iter()
                    .map(|s| (*s, wrap_angle(dir * (edge - s.angle))))
                    .filter(|&(_, gap)| gap > 0.0 && gap < 0.5 * PI)
                    .min_by(|a, b| a.1.total_cmp(&b.1))
            };
            let lo_sing = s_lo
                .map(|s| (PulledSingularity { angle: lo, ..s }, 0.0))
                .or_else(|| nearest_outside(lo, 1.0).map(|(s, gap)| (PulledSingularity { angle: lo - gap, ..s }, gap)));
            let hi_sing = s_hi.map(|s| (PulledSingularity { angle: hi, ..s }, 0.0)).or_else(|| {
                nearest_outside(hi, -1.0).map(|(s, gap)| (PulledSingularity { angle: hi + gap, ..s }, gap))
            });
            let zone = match (lo_sing.is_some(), hi_sing.is_some()) {
                (true, true) => 0.5 * len,
                (true, false) | (false, true) => (0.5 * len).min(0.5 * PI),
                (false, false) => 0.0,
            };
            let mut reg_lo = lo;
            let mut reg_hi = hi;
            if let Some((s, gap)) = lo_sing {
                let e = zone_integral(g, &s, 1.0, gap, zone, base, cfg);
                total.value += e.value;
                total.error += e.error;
                reg_lo = lo + zone;
            }
            if let Some((s, gap)) = hi_sing {
                let e = zone_integral(g, &s, -1.0, gap, zone, base, cfg);
                total.value += e.value;
                total.error += e.error;
                reg_hi = hi - zone;
            }
            if reg_hi > reg_lo + 1e-15 {
                let bps = breakpoints_between(base, reg_lo, reg_hi);
                let e = integrate_panels(&|t| g(t) / TAU, &bps, density, cfg.max_depth);
                total.value += e.value;
                total.error += e.error;
            }
        }
    }
    total
}
