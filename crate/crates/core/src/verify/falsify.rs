use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{random_point, ArcChoice, FamilySource};
use crate::bounds::{q_ratio, reverse_bound_rhs, tolerance, BoundConfig};
use crate::error::{LabError, Result};
use crate::geometry::{ArcSet, DiskPoint};

/// Knobs for [`falsify`].
#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyOptions {
    pub arcs: ArcChoice,
    pub r_max: f64,
    pub bounds: BoundConfig,
}

impl Default for FalsifyOptions {
    fn default() -> Self {
        FalsifyOptions {
            arcs: ArcChoice::Random,
            r_max: 0.99,
            bounds: BoundConfig::sweep(
                crate::geometry::CircleGrid::new(crate::geometry::DEFAULT_GRID_N).expect("grid"),
            ),
        }
    }
}

/// The sample with the smallest slack `rhs_main - Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyRecord {
    pub family: String,
    pub budget: usize,
    pub seed: u64,
    pub samples: usize,
    /// Samples whose evaluation raised an error.
    pub failures: usize,
    /// Samples with `slack < -tol`.
    pub violations: usize,
    pub min_slack: f64,
    /// Smallest `|slack|`, which locates equality cases.
    pub min_abs_slack: f64,
    pub map: String,
    pub arcs: ArcSet,
    pub z: DiskPoint,
    pub q: f64,
    pub rhs: f64,
    pub tol: f64,
    pub quad_error: f64,
}

/// Random search for the smallest slack of the reverse bound.
pub fn falsify(family: &str, budget: usize, seed: u64, opts: &FalsifyOptions) -> Result<FalsifyRecord> {
    if budget == 0 {
        return Err(LabError::ParamOutOfDomain("budget must be at least 1".into()));
    }
    let source: FamilySource = family.parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<FalsifyRecord> = None;
    let mut failures = 0;
    let mut violations = 0;
    let mut min_abs = f64::INFINITY;
    for _ in 0..budget {
        let phi = source.draw(&mut rng);
        let e = opts.arcs.draw(&mut rng);
        let z = random_point(&mut rng, opts.r_max);
        let rhs = match reverse_bound_rhs(&phi, &e, z, &opts.bounds) {
            Ok(v) => v,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let q = q_ratio(&phi, z);
        let slack = rhs.value - q;
        let tol = tolerance(rhs.error);
        violations += (slack < -tol) as usize;
        min_abs = min_abs.min(slack.abs());
        if best.as_ref().is_none_or(|b| slack < b.min_slack) {
            best = Some(FalsifyRecord {
                family: source.name(),
                budget,
                seed,
                samples: 0,
                failures: 0,
                violations: 0,
                min_slack: slack,
                min_abs_slack: 0.0,
                map: phi.to_spec(),
                arcs: e,
                z,
                q,
                rhs: rhs.value,
                tol,
                quad_error: rhs.error,
            });
        }
    }
    let mut rec = best.ok_or_else(|| LabError::ParamOutOfDomain(format!("every sample of `{family}` failed")))?;
    rec.samples = budget;
    rec.failures = failures;
    rec.violations = violations;
    rec.min_abs_slack = min_abs;
    Ok(rec)
}
