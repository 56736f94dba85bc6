//! Evaluable holomorphic maps of the disk with exact derivatives and
//! closed-form boundary traces.

mod outer;
mod spec;

pub use outer::OuterData;
pub use spec::{parse_spec, random_in_annulus, random_map, RandomFamily};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{
    automorphism_inv, wrap_angle, BoundaryPoint, BoundarySamples, CircleGrid, DiskPoint, Singularity, CLAMP_FLOOR,
};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Maximum number of zeros in a finite Blaschke product.
pub const MAX_ZEROS: usize = 64;

/// A point mass `mass · δ_{e^{i angle}}` of a singular inner factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Family {
    Moebius {
        lambda: Complex64,
        a: Complex64,
    },
    Blaschke {
        lambda: Complex64,
        zeros: Vec<Complex64>,
    },
    Singular {
        atoms: Vec<Atom>,
    },
    /// `(S - α)/(1 - ᾱS)` with `S` the unit atom at angle 0.
    QuotientBlaschke {
        alpha: Complex64,
    },
    Outer(OuterData),
    Product(Box<HoloMap>, Box<HoloMap>),
    /// `f ∘ g`.
    Compose(Box<HoloMap>, Box<HoloMap>),
}

/// A holomorphic function on the disk, usually a self-map.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloMap {
    family: Family,
}

fn check_unimodular(lambda: Complex64) -> Result<Complex64> {
    let r = lambda.norm();
    if !r.is_finite() || (r - 1.0).abs() > 1e-12 {
        return Err(LabError::ParamOutOfDomain(format!("|λ| = {r} is not 1")));
    }
    Ok(lambda / r)
}

fn check_in_disk(a: Complex64, what: &str) -> Result<Complex64> {
    if !(a.norm() < 1.0) {
        return Err(LabError::ParamOutOfDomain(format!(
            "{what} {a} is not in the open disk"
        )));
    }
    Ok(a)
}

fn unit_atom() -> [Atom; 1] {
    [Atom { angle: 0.0, mass: 1.0 }]
}

/// `Σ σ_k (z + ζ_k)/(z - ζ_k)` and its z-derivative.
fn singular_exponent(atoms: &[Atom], z: Complex64) -> (Complex64, Complex64) {
    let mut e = Complex64::new(0.0, 0.0);
    let mut de = Complex64::new(0.0, 0.0);
    for at in atoms {
        let zeta = Complex64::from_polar(1.0, at.angle);
        let d = z - zeta;
        e += at.mass * (z + zeta) / d;
        de += at.mass * (-2.0 * zeta) / (d * d);
    }
    (e, de)
}

/// Exponent on the circle, `-i Σ σ_k cot((θ - θ_k)/2)`, or `None` on an atom.
fn singular_exponent_boundary(atoms: &[Atom], p: BoundaryPoint) -> Option<Complex64> {
    let mut s = 0.0;
    for at in atoms {
        let d = wrap_angle(p.angle() - at.angle);
        if d == 0.0 {
            return None;
        }
        s += at.mass / (0.5 * d).tan();
    }
    Some(Complex64::new(0.0, -s))
}

fn blaschke_eval(lambda: Complex64, zeros: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // prefix/suffix products keep the derivative exact at the zeros
    let n = zeros.len();
    let factors: Vec<Complex64> = zeros.iter().map(|&a| (z - a) / (ONE - a.conj() * z)).collect();
    let dfactors: Vec<Complex64> = zeros
        .iter()
        .map(|&a| {
            let d = ONE - a.conj() * z;
            (1.0 - a.norm_sqr()) / (d * d)
        })
        .collect();
    let mut prefix = vec![ONE; n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] * factors[k];
    }
    let mut suffix = ONE;
    let mut deriv = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        deriv += prefix[k] * dfactors[k] * suffix;
        suffix *= factors[k];
    }
    (lambda * prefix[n], lambda * deriv)
}

impl HoloMap {
    /// `λ(z - a)/(1 - āz)`.
    pub fn moebius(lambda: Complex64, a: Complex64) -> Result<Self> {
        let lambda = check_unimodular(lambda)?;
        let a = check_in_disk(a, "Möbius parameter")?;
        Ok(HoloMap {
            family: Family::Moebius { lambda, a },
        })
    }

    pub fn identity() -> Self {
        HoloMap {
            family: Family::Moebius {
                lambda: ONE,
                a: Complex64::new(0.0, 0.0),
            },
        }
    }

    /// `λ Π (z - a_k)/(1 - ā_k z)`, zeros repeated by multiplicity.
    pub fn blaschke(zeros: Vec<Complex64>, lambda: Complex64) -> Result<Self> {
        let lambda = check_unimodular(lambda)?;
        if zeros.is_empty() || zeros.len() > MAX_ZEROS {
            return Err(LabError::ParamOutOfDomain(format!(
                "a Blaschke product needs 1..={MAX_ZEROS} zeros, got {}",
                zeros.len()
            )));
        }
        for &a in &zeros {
            check_in_disk(a, "zero")?;
        }
        Ok(HoloMap {
            family: Family::Blaschke { lambda, zeros },
        })
    }

    /// `exp(Σ σ_k (z + ζ_k)/(z - ζ_k))`.
    pub fn singular_inner(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(LabError::ParamOutOfDomain(
                "a singular inner function needs an atom".into(),
            ));
        }
        let mut merged: Vec<Atom> = Vec::new();
        for at in atoms {
            if !(at.mass > 0.0 && at.mass.is_finite() && at.angle.is_finite()) {
                return Err(LabError::ParamOutOfDomain(format!("bad atom {at:?}")));
            }
            let angle = wrap_angle(at.angle);
            match merged.iter_mut().find(|m| m.angle == angle) {
                Some(m) => m.mass += at.mass,
                None => merged.push(Atom { angle, mass: at.mass }),
            }
        }
        Ok(HoloMap {
            family: Family::Singular { atoms: merged },
        })
    }

    /// `S(z) = exp((z + 1)/(z - 1))`.
    pub fn atomic_s() -> Self {
        HoloMap {
            family: Family::Singular {
                atoms: unit_atom().to_vec(),
            },
        }
    }

    /// `B_α = (S - α)/(1 - ᾱS)`, for `0 < |α| < 1`.
    pub fn b_alpha(alpha: Complex64) -> Result<Self> {
        let alpha = check_in_disk(alpha, "α")?;
        if alpha.norm() == 0.0 {
            return Err(LabError::ParamOutOfDomain("α must be nonzero".into()));
        }
        Ok(HoloMap {
            family: Family::QuotientBlaschke { alpha },
        })
    }

    pub fn outer(data: OuterData) -> Self {
        HoloMap {
            family: Family::Outer(data),
        }
    }

    pub fn product(f: HoloMap, g: HoloMap) -> Self {
        HoloMap {
            family: Family::Product(Box::new(f), Box::new(g)),
        }
    }

    /// `f ∘ g`.
    ///
    /// When `g` is not a Möbius map, `f` must be free of boundary
    /// singularities so that the composite keeps a finite singular set.
    pub fn compose(f: HoloMap, g: HoloMap) -> Result<Self> {
        if !g.is_moebius() && !f.singular_support().is_empty() {
            return Err(LabError::ParamOutOfDomain(
                "outer map of a composition has boundary singularities; only Möbius inner maps are allowed".into(),
            ));
        }
        Ok(HoloMap {
            family: Family::Compose(Box::new(f), Box::new(g)),
        })
    }

    pub fn tag(&self) -> &'static str {
        match &self.family {
            Family::Moebius { .. } => "moebius",
            Family::Blaschke { .. } => "blaschke",
            Family::Singular { .. } => "singular",
            Family::QuotientBlaschke { .. } => "quotient_blaschke",
            Family::Outer(_) => "outer",
            Family::Product(..) => "product",
            Family::Compose(..) => "compose",
        }
    }

    pub fn is_moebius(&self) -> bool {
        matches!(self.family, Family::Moebius { .. })
    }

    /// Whether the map is inner by construction.
    pub fn is_inner(&self) -> bool {
        match &self.family {
            Family::Outer(_) => false,
            Family::Product(f, g) | Family::Compose(f, g) => f.is_inner() && g.is_inner(),
            _ => true,
        }
    }

    /// Whether `|f| <= 1` on the disk. Outer factors are checked against
    /// their boundary data.
    pub fn is_self_map(&self) -> bool {
        match &self.family {
            Family::Outer(o) => o.sup_log_modulus() <= 1e-12,
            Family::Product(f, g) => f.is_self_map() && g.is_self_map(),
            Family::Compose(f, g) => f.is_self_map() && g.is_self_map(),
            _ => true,
        }
    }

    /// Value and derivative at an interior point.
    pub fn eval_with_deriv(&self, z: Complex64) -> (Complex64, Complex64) {
        match &self.family {
            Family::Moebius { lambda, a } => {
                let d = ONE - a.conj() * z;
                (lambda * (z - a) / d, lambda * (1.0 - a.norm_sqr()) / (d * d))
            }
            Family::Blaschke { lambda, zeros } => blaschke_eval(*lambda, zeros, z),
            Family::Singular { atoms } => {
                let (e, de) = singular_exponent(atoms, z);
                let s = e.exp();
                (s, s * de)
            }
            Family::QuotientBlaschke { alpha } => {
                let (e, de) = singular_exponent(&unit_atom(), z);
                let s = e.exp();
                let d = ONE - alpha.conj() * s;
                ((s - alpha) / d, s * de * (1.0 - alpha.norm_sqr()) / (d * d))
            }
            Family::Outer(o) => o.eval_with_deriv(z),
            Family::Product(f, g) => {
                let (fv, fd) = f.eval_with_deriv(z);
                let (gv, gd) = g.eval_with_deriv(z);
                (fv * gv, fd * gv + fv * gd)
            }
            Family::Compose(f, g) => {
                let (gv, gd) = g.eval_with_deriv(z);
                let (fv, fd) = f.eval_with_deriv(gv);
                (fv, fd * gd)
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.family {
            Family::Product(f, g) => f.eval(z) * g.eval(z),
            Family::Compose(f, g) => f.eval(g.eval(z)),
            _ => self.eval_with_deriv(z).0,
        }
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.eval_with_deriv(z).1
    }

    /// Boundary value and derivative from the closed form, `None` on the
    /// singular support.
    pub fn boundary_eval_with_deriv(&self, p: BoundaryPoint) -> Option<(Complex64, Complex64)> {
        let zeta = p.value();
        match &self.family {
            Family::Moebius { .. } | Family::Blaschke { .. } => Some(self.eval_with_deriv(zeta)),
            Family::Singular { atoms } => {
                let e = singular_exponent_boundary(atoms, p)?;
                let s = e.exp();
                let (_, de) = singular_exponent(atoms, zeta);
                Some((s, s * de))
            }
            Family::QuotientBlaschke { alpha } => {
                let atoms = unit_atom();
                let s = singular_exponent_boundary(&atoms, p)?.exp();
                let (_, de) = singular_exponent(&atoms, zeta);
                let d = ONE - alpha.conj() * s;
                Some(((s - alpha) / d, s * de * (1.0 - alpha.norm_sqr()) / (d * d)))
            }
            Family::Outer(o) => o.boundary_eval_with_deriv(p),
            Family::Product(f, g) => {
                let (fv, fd) = f.boundary_eval_with_deriv(p)?;
                let (gv, gd) = g.boundary_eval_with_deriv(p)?;
                Some((fv * gv, fd * gv + fv * gd))
            }
            Family::Compose(f, g) => {
                let (gv, gd) = g.boundary_eval_with_deriv(p)?;
                let (fv, fd) = if gv.norm() < 1.0 - 1e-13 {
                    f.eval_with_deriv(gv)
                } else {
                    f.boundary_eval_with_deriv(BoundaryPoint::from_value(gv))?
                };
                Some((fv, fd * gd))
            }
        }
    }

    pub fn boundary_eval(&self, p: BoundaryPoint) -> Option<Complex64> {
        self.boundary_eval_with_deriv(p).map(|v| v.0)
    }

    pub fn boundary_deriv(&self, p: BoundaryPoint) -> Option<Complex64> {
        self.boundary_eval_with_deriv(p).map(|v| v.1)
    }

    /// Atoms of the singular inner part, as seen in the boundary data.
    pub fn atoms(&self) -> Vec<Atom> {
        self.atoms_merged(&|a, b| a + b)
    }

    /// Atoms with the rate at which boundary data oscillates there; factors
    /// sharing an atom combine through `common_rate` instead of adding.
    fn oscillation_rates(&self) -> Vec<Atom> {
        self.atoms_merged(&common_rate)
    }

    fn atoms_merged(&self, merge: &dyn Fn(f64, f64) -> f64) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        let mut push = |at: Atom| match out.iter_mut().find(|m| (m.angle - at.angle).abs() < 1e-15) {
            Some(m) => m.mass = merge(m.mass, at.mass),
            None => out.push(at),
        };
        match &self.family {
            Family::Singular { atoms } => atoms.iter().copied().for_each(&mut push),
            Family::QuotientBlaschke { .. } => push(unit_atom()[0]),
            Family::Product(f, g) => f
                .atoms_merged(merge)
                .into_iter()
                .chain(g.atoms_merged(merge))
                .for_each(&mut push),
            Family::Compose(f, g) => {
                g.atoms_merged(merge).into_iter().for_each(&mut push);
                if let Family::Moebius { lambda, a } = g.family {
                    for at in f.atoms_merged(merge) {
                        let (xi, speed) = moebius_preimage(lambda, a, at.angle);
                        push(Atom {
                            angle: xi,
                            mass: at.mass * speed,
                        });
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Declared logarithmic boundary singularities of outer factors.
    fn log_singularities(&self) -> Vec<(f64, f64)> {
        match &self.family {
            Family::Outer(o) => o
                .log_singularities()
                .iter()
                .map(|s| (wrap_angle(s.angle), s.coeff))
                .collect(),
            Family::Product(f, g) => {
                let mut out = f.log_singularities();
                for (angle, c) in g.log_singularities() {
                    match out.iter_mut().find(|s| (s.0 - angle).abs() < 1e-15) {
                        Some(s) => s.1 += c,
                        None => out.push((angle, c)),
                    }
                }
                out
            }
            Family::Compose(f, g) => {
                let mut out: Vec<(f64, f64)> = g.log_singularities().into_iter().map(|(a, _)| (a, 0.0)).collect();
                if let Family::Moebius { lambda, a } = g.family {
                    for (angle, c) in f.log_singularities() {
                        out.push((moebius_preimage(lambda, a, angle).0, c));
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Angles where the closed form does not extend to the circle.
    pub fn singular_support(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.atoms().iter().map(|a| a.angle).collect();
        for (angle, _) in self.log_singularities() {
            if !out.iter().any(|&a| (a - angle).abs() < 1e-15) {
                out.push(angle);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Quadrature hints for `log|f|` on the circle.
    pub fn log_modulus_singularities(&self) -> Vec<Singularity> {
        self.singularities_with(self.oscillation_rates(), |_, c| c)
    }

    /// Quadrature hints for bounded data that oscillates only at the atoms,
    /// such as `log|1 - ā f|`.
    pub fn atom_singularities(&self) -> Vec<Singularity> {
        self.singularities_with(self.oscillation_rates(), |_, _| 0.0)
            .into_iter()
            .filter(|s| s.mass > 0.0)
            .collect()
    }

    /// Quadrature hints for `log|f'|` on the circle.
    pub fn log_deriv_singularities(&self) -> Vec<Singularity> {
        self.singularities_with(self.deriv_oscillation_rates(), |mass, c| {
            if mass > 0.0 {
                c - 2.0
            } else if c != 0.0 {
                c - 1.0
            } else {
                0.0
            }
        })
    }

    /// Atoms where `|f'|` oscillates on the circle. For Blaschke and singular
    /// inner factors `|f'|` is a sum of positive kernels there, and for a
    /// product of inner maps `|(fg)'| = |f'| + |g'|` on the circle.
    fn deriv_oscillation_rates(&self) -> Vec<Atom> {
        match &self.family {
            Family::Moebius { .. } | Family::Blaschke { .. } | Family::Singular { .. } => Vec::new(),
            Family::Product(f, g) if f.is_inner() && g.is_inner() => {
                let mut out = f.deriv_oscillation_rates();
                for at in g.deriv_oscillation_rates() {
                    match out.iter_mut().find(|m| (m.angle - at.angle).abs() < 1e-15) {
                        Some(m) => m.mass = common_rate(m.mass, at.mass),
                        None => out.push(at),
                    }
                }
                out
            }
            _ => self.oscillation_rates(),
        }
    }

    /// One hint per point of the singular support; `coeff` sees the atom
    /// mass and the declared log coefficient, `rates` fixes the reported mass.
    fn singularities_with(&self, rates: Vec<Atom>, coeff: impl Fn(f64, f64) -> f64) -> Vec<Singularity> {
        let atoms = self.oscillation_rates();
        let logs = self.log_singularities();
        let at = |list: &[Atom], angle: f64| -> f64 {
            list.iter()
                .filter(|a| (a.angle - angle).abs() < 1e-15)
                .map(|a| a.mass)
                .sum()
        };
        self.singular_support()
            .into_iter()
            .map(|angle| {
                let c = logs.iter().filter(|s| (s.0 - angle).abs() < 1e-15).map(|s| s.1).sum();
                Singularity {
                    angle,
                    mass: at(&rates, angle),
                    log_coeff: coeff(at(&atoms, angle), c),
                }
            })
            .collect()
    }

    /// Function-spec string that reproduces this map, where one exists.
    pub fn to_spec(&self) -> String {
        let c = spec::format_complex;
        match &self.family {
            Family::Moebius { lambda, a } => format!("moebius:{},{}", c(*lambda), c(*a)),
            Family::Blaschke { lambda, zeros } => {
                let zs: Vec<String> = zeros.iter().map(|&a| c(a)).collect();
                if *lambda == ONE {
                    format!("blaschke:{}", zs.join(","))
                } else {
                    format!("blaschke:{};{}", zs.join(","), c(*lambda))
                }
            }
            Family::Singular { atoms } if atoms == &unit_atom() => "S".to_string(),
            Family::Singular { atoms } => {
                let parts: Vec<String> = atoms.iter().map(|a| format!("{}@{}", a.angle, a.mass)).collect();
                format!("singular:{}", parts.join(","))
            }
            Family::QuotientBlaschke { alpha } => format!("balpha:{}", c(*alpha)),
            Family::Outer(o) => format!("outer[n={}]", o.grid().n()),
            Family::Product(f, g) => format!("prod({},{})", f.to_spec(), g.to_spec()),
            Family::Compose(f, g) => format!("compose({},{})", f.to_spec(), g.to_spec()),
        }
    }
}

/// Oscillation rate shared by factors meeting at one atom: the largest `g`
/// with both masses integer multiples of `g`, or the larger mass when they
/// are not commensurate to within `1e-9`.
fn common_rate(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return b;
    }
    let (mut x, mut y) = (a.max(b), a.min(b));
    let scale = x;
    for _ in 0..64 {
        if y <= 1e-9 * scale {
            return if x >= 1e-3 * scale { x } else { scale };
        }
        let r = x % y;
        let r = if y - r <= 1e-9 * scale { 0.0 } else { r };
        x = y;
        y = r;
    }
    scale
}

/// Preimage angle of `e^{i angle}` under a Möbius map and `|g'|` there.
fn moebius_preimage(lambda: Complex64, a: Complex64, angle: f64) -> (f64, f64) {
    let w = Complex64::from_polar(1.0, angle) / lambda;
    let xi = automorphism_inv(a, w);
    let d = ONE - a.conj() * xi;
    (wrap_angle(xi.arg()), (1.0 - a.norm_sqr()) / d.norm_sqr())
}

/// Cauchy-integral derivative over the circle of radius
/// `min(0.1, (1 - |z|)/2)` with 256 nodes.
pub fn oracle_deriv(f: &HoloMap, z: DiskPoint) -> Result<Complex64> {
    let rho = (0.1f64).min(0.5 * (1.0 - z.modulus()));
    if rho < 1e-7 {
        return Err(LabError::ContourTooClose {
            modulus: z.modulus(),
            radius: rho,
        });
    }
    oracle_deriv_radius(f, z, rho)
}

pub fn oracle_deriv_radius(f: &HoloMap, z: DiskPoint, rho: f64) -> Result<Complex64> {
    if !(rho > 0.0) || z.modulus() + rho >= 1.0 {
        return Err(LabError::ContourTooClose {
            modulus: z.modulus(),
            radius: rho,
        });
    }
    const NODES: usize = 256;
    let zc = z.value();
    let sum: Complex64 = (0..NODES)
        .map(|j| {
            let u = Complex64::from_polar(1.0, TAU * j as f64 / NODES as f64);
            f.eval(zc + rho * u) * u.conj()
        })
        .sum();
    Ok(sum / (NODES as f64 * rho))
}

/// Closed-form boundary values on a grid; nodes on the singular support
/// hold `NaN`.
pub fn boundary_trace(f: &HoloMap, grid: &CircleGrid) -> BoundarySamples {
    let inner = f.is_inner();
    BoundarySamples::sample(*grid, |p| {
        let v = f.boundary_eval(p)?;
        debug_assert!(
            !inner || (v.norm() - 1.0).abs() <= 1e-12,
            "inner trace off the circle at {}",
            p.angle()
        );
        Some(v)
    })
}

/// Something whose boundary log-modulus can be integrated against harmonic
/// measure.
pub trait LogModulus: Sync {
    /// Value at an interior point.
    fn value(&self, z: Complex64) -> Complex64;
    /// `log|f(ζ)|`, floored at `log CLAMP_FLOOR`, or `None` on the singular support.
    fn boundary_log_abs(&self, p: BoundaryPoint) -> Option<f64>;
    fn singularities(&self) -> Vec<Singularity>;
}

fn floored_log(x: f64) -> f64 {
    x.max(CLAMP_FLOOR).ln()
}

impl LogModulus for HoloMap {
    fn value(&self, z: Complex64) -> Complex64 {
        self.eval(z)
    }

    fn boundary_log_abs(&self, p: BoundaryPoint) -> Option<f64> {
        self.boundary_eval(p).map(|v| floored_log(v.norm()))
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.log_modulus_singularities()
    }
}

/// The derivative `f'` viewed as a function on the disk.
#[derive(Debug, Clone, Copy)]
pub struct Derivative<'a>(pub &'a HoloMap);

impl LogModulus for Derivative<'_> {
    fn value(&self, z: Complex64) -> Complex64 {
        self.0.deriv(z)
    }

    fn boundary_log_abs(&self, p: BoundaryPoint) -> Option<f64> {
        self.0.boundary_deriv(p).map(|v| floored_log(v.norm()))
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.0.log_deriv_singularities()
    }
}
