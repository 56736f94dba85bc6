use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::classify::{moebius_detect, outer_check, NON_OUTER_THRESHOLD};
use super::sampling::{default_probes, random_point, ArcChoice, FamilySource};
use crate::bounds::{
    chain_values, julia_residual, lower_bound_slack, q_ratio, reverse_bound_rhs, schwarz_pick_slack, simple_bound_rhs,
    BoundConfig,
};
use crate::error::{LabError, Result};
use crate::geometry::{ArcSet, BoundaryPoint, CircleGrid, DiskPoint};
use crate::zoo::{Derivative, HoloMap, RandomFamily};

/// Certifies `θ'` outer in the Möbius/outer consistency check.
const OUTER_TOL: f64 = 1e-6;
const JULIA_DRAWS: usize = 16;

/// Which quadrature settings the suite uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadMode {
    Default,
    Sweep,
}

impl FromStr for QuadMode {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(QuadMode::Default),
            "sweep" => Ok(QuadMode::Sweep),
            _ => Err(LabError::Config(format!(
                "quad must be `default` or `sweep`, got `{s}`"
            ))),
        }
    }
}

/// Everything that determines a suite run.
///
/// Parsed from `key = value` lines whose keys are the field names. `families`
/// and `arcs` may repeat; an empty `families =` line selects no family.
/// Lines starting with `#` are comments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Grid size, a power of two.
    pub n: usize,
    pub r_max: f64,
    /// Floor of quadrature-based tolerances.
    pub tol_floor: f64,
    /// Tolerance of the pointwise Schwarz–Pick check.
    pub pointwise_tol: f64,
    /// Random family names or function specs.
    pub families: Vec<String>,
    /// Arc choices: `random`, `full`, `empty` or `a:b c:d ...`.
    pub arcs: Vec<String>,
    /// Samples per (family, arcs) pair.
    pub samples: usize,
    /// Leading samples per pair that also build the full chain.
    pub chain_samples: usize,
    /// Probe points for the Möbius/outer consistency check.
    pub probes: usize,
    pub seed: u64,
    pub quad: QuadMode,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: crate::geometry::DEFAULT_GRID_N,
            r_max: 0.99,
            tol_floor: crate::bounds::ABS_FLOOR,
            pointwise_tol: 1e-12,
            families: RandomFamily::ALL.iter().map(RandomFamily::name).collect(),
            arcs: vec!["random".into()],
            samples: 200,
            chain_samples: 20,
            probes: 16,
            seed: 0,
            quad: QuadMode::Sweep,
            json: None,
            csv: None,
        }
    }
}

impl FromStr for SuiteConfig {
    type Err = LabError;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = SuiteConfig::default();
        let mut families: Option<Vec<String>> = None;
        let mut arcs: Option<Vec<String>> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {}: expected `key = value`", k + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| LabError::Config(format!("line {}: bad {what} `{value}`", k + 1));
            match key {
                "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
                "r_max" => cfg.r_max = value.parse().map_err(|_| bad("r_max"))?,
                "tol_floor" => cfg.tol_floor = value.parse().map_err(|_| bad("tol_floor"))?,
                "pointwise_tol" => cfg.pointwise_tol = value.parse().map_err(|_| bad("pointwise_tol"))?,
                "samples" => cfg.samples = value.parse().map_err(|_| bad("samples"))?,
                "chain_samples" => cfg.chain_samples = value.parse().map_err(|_| bad("chain_samples"))?,
                "probes" => cfg.probes = value.parse().map_err(|_| bad("probes"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "quad" => cfg.quad = value.parse()?,
                "json" => cfg.json = Some(value.into()),
                "csv" => cfg.csv = Some(value.into()),
                "families" => {
                    let list = families.get_or_insert_with(Vec::new);
                    if !value.is_empty() {
                        list.push(value.to_string());
                    }
                }
                "arcs" => arcs.get_or_insert_with(Vec::new).push(value.to_string()),
                other => return Err(LabError::Config(format!("line {}: unknown key `{other}`", k + 1))),
            }
        }
        if let Some(f) = families {
            cfg.families = f;
        }
        if let Some(a) = arcs {
            cfg.arcs = a;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        CircleGrid::new(self.n)?;
        if !(self.r_max > 0.0 && self.r_max <= crate::geometry::R_MAX) {
            return Err(LabError::Config(format!(
                "r_max must lie in (0, {}]",
                crate::geometry::R_MAX
            )));
        }
        if !(self.tol_floor > 0.0 && self.pointwise_tol > 0.0) {
            return Err(LabError::Config("tolerances must be positive".into()));
        }
        for f in &self.families {
            f.parse::<FamilySource>()?;
        }
        for a in &self.arcs {
            a.parse::<ArcChoice>()?;
        }
        Ok(())
    }

    pub fn bound_config(&self) -> Result<BoundConfig> {
        let grid = CircleGrid::new(self.n)?;
        Ok(match self.quad {
            QuadMode::Default => BoundConfig::new(grid),
            QuadMode::Sweep => BoundConfig::sweep(grid),
        })
    }

    fn tolerance(&self, quad_error: f64) -> f64 {
        self.tol_floor.max(10.0 * quad_error)
    }
}

/// The registered checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `Q - |φ'| >= 0`.
    SchwarzPick,
    /// `Q(z) >= (1 - |φ(0)|)/(1 + |φ(0)|)`.
    LowerBound,
    /// `Q <= rhs_main`.
    ReverseBound,
    /// `Q <= rhs_simple`.
    SimpleBound,
    /// `rhs_main <= rhs_simple`.
    Dominance,
    /// Every link of the chain; the slack is minus the worst residual beyond tolerance.
    Chain,
    /// Julia's inequality at a random boundary point with a finite derivative.
    Julia,
    /// `| |φ'| - Q | <= tol` for Möbius maps.
    MoebiusEquality,
    /// Möbius detection agrees with `θ'` being outer.
    MoebiusOuter,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::SchwarzPick => "schwarz_pick",
            Check::LowerBound => "lower_bound",
            Check::ReverseBound => "reverse_bound",
            Check::SimpleBound => "simple_bound",
            Check::Dominance => "dominance",
            Check::Chain => "chain",
            Check::Julia => "julia",
            Check::MoebiusEquality => "moebius_equality",
            Check::MoebiusOuter => "moebius_outer",
        }
    }
}

/// One evaluated check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub check: Check,
    pub family: String,
    pub map: String,
    pub z: Option<DiskPoint>,
    pub arcs: Option<ArcSet>,
    pub zeta: Option<BoundaryPoint>,
    #[serde(with = "crate::extended_real")]
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
    pub quad_error: f64,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

pub const SUITE_CSV_HEADER: [&str; 12] = [
    "check",
    "family",
    "map",
    "re",
    "im",
    "arcs",
    "zeta",
    "slack",
    "tol",
    "pass",
    "quad_error",
    "error",
];

impl SuiteRecord {
    fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        let arcs = self.arcs.as_ref().map_or(String::new(), |e| {
            e.arcs()
                .iter()
                .map(|a| format!("{}:{}", a.start, a.end()))
                .collect::<Vec<_>>()
                .join(" ")
        });
        vec![
            self.check.name().into(),
            self.family.clone(),
            self.map.clone(),
            opt(self.z.map(|z| z.value().re)),
            opt(self.z.map(|z| z.value().im)),
            arcs,
            opt(self.zeta.map(|p| p.angle())),
            format!("{:e}", self.slack),
            format!("{:e}", self.tol),
            self.pass.to_string(),
            format!("{:e}", self.quad_error),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Per-check aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: Check,
    pub records: usize,
    pub failed: usize,
    #[serde(with = "crate::extended_real")]
    pub min_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    /// Records that raised an error.
    pub errors: usize,
    pub checks: Vec<CheckSummary>,
    /// Largest chain link residual minus its tolerance; negative when every link holds.
    #[serde(with = "crate::extended_real")]
    pub max_chain_violation: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub records: Vec<SuiteRecord>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serializes")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| LabError::Io(e.to_string());
        w.write_record(SUITE_CSV_HEADER).map_err(io)?;
        for r in &self.records {
            w.write_record(r.csv_fields()).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Io(e.to_string()))
    }

    /// Write the JSON and CSV outputs named in `cfg`.
    pub fn write_outputs(&self, cfg: &SuiteConfig) -> Result<()> {
        let io = |e: std::io::Error| LabError::Io(e.to_string());
        if let Some(p) = &cfg.json {
            std::fs::write(p, self.to_json()).map_err(io)?;
        }
        if let Some(p) = &cfg.csv {
            std::fs::write(p, self.to_csv()?).map_err(io)?;
        }
        Ok(())
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn min_slack(&self, check: Check) -> Option<f64> {
        self.summary
            .checks
            .iter()
            .find(|c| c.check == check)
            .map(|c| c.min_slack)
    }
}

struct Sample<'a> {
    family: &'a str,
    phi: &'a HoloMap,
    e: &'a ArcSet,
    z: DiskPoint,
}

impl Sample<'_> {
    fn record(&self, check: Check, slack: f64, tol: f64, quad_error: f64) -> SuiteRecord {
        SuiteRecord {
            check,
            family: self.family.to_string(),
            map: self.phi.to_spec(),
            z: Some(self.z),
            arcs: Some(self.e.clone()),
            zeta: None,
            slack,
            tol,
            pass: slack >= -tol,
            quad_error,
            error: None,
        }
    }

    fn failed(&self, check: Check, err: LabError) -> SuiteRecord {
        SuiteRecord {
            pass: false,
            error: Some(err.to_string()),
            ..self.record(check, f64::NAN, 0.0, 0.0)
        }
    }
}

/// Run every registered check over the configured families, arc choices and
/// random points. Errors become failed records.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    cfg.validate()?;
    let bounds = cfg.bound_config()?;
    let mut records = Vec::new();
    let mut stream = 0u64;
    for family in &cfg.families {
        let source: FamilySource = family.parse()?;
        for arcs in &cfg.arcs {
            let choice: ArcChoice = arcs.parse()?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(stream);
            stream += 1;
            for k in 0..cfg.samples {
                let phi = source.draw(&mut rng);
                let e = choice.draw(&mut rng);
                let z = random_point(&mut rng, cfg.r_max);
                let zeta_angle = rng.gen_range(0.0..std::f64::consts::TAU);
                let s = Sample {
                    family,
                    phi: &phi,
                    e: &e,
                    z,
                };
                sample_checks(cfg, &bounds, &s, k < cfg.chain_samples, zeta_angle, &mut records);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        stream += 1;
        if let Some(r) = moebius_outer_record(cfg, &bounds, family, &source.draw(&mut rng)) {
            records.push(r);
        }
    }
    let summary = summarize(&records, start.elapsed().as_secs_f64());
    Ok(SuiteReport { records, summary })
}

fn sample_checks(
    cfg: &SuiteConfig,
    bounds: &BoundConfig,
    s: &Sample,
    with_chain: bool,
    zeta_angle: f64,
    out: &mut Vec<SuiteRecord>,
) {
    let (phi, z) = (s.phi, s.z);
    let q = q_ratio(phi, z);
    out.push(s.record(Check::SchwarzPick, schwarz_pick_slack(phi, z), cfg.pointwise_tol, 0.0));
    out.push(s.record(Check::LowerBound, lower_bound_slack(phi, z), cfg.tol_floor, 0.0));

    let main = reverse_bound_rhs(phi, s.e, z, bounds);
    match &main {
        Ok(rhs) => out.push(s.record(Check::ReverseBound, rhs.value - q, cfg.tolerance(rhs.error), rhs.error)),
        Err(e) => out.push(s.failed(Check::ReverseBound, e.clone())),
    }
    match simple_bound_rhs(phi, s.e, z, bounds) {
        Ok(simple) => {
            out.push(s.record(Check::SimpleBound, simple - q, cfg.tol_floor, 0.0));
            if let Ok(rhs) = &main {
                out.push(s.record(
                    Check::Dominance,
                    simple - rhs.value,
                    cfg.tolerance(rhs.error),
                    rhs.error,
                ));
            }
        }
        // an unbounded derivative on E makes the bound vacuous
        Err(LabError::UnboundedOnE { .. }) => {
            out.push(s.record(Check::SimpleBound, f64::INFINITY, cfg.tol_floor, 0.0));
        }
        Err(e) => out.push(s.failed(Check::SimpleBound, e)),
    }

    if with_chain {
        out.push(match chain_values(phi, s.e, z, bounds) {
            Ok(rep) => {
                let tol = cfg.tolerance(rep.quad_error);
                let worst = rep.links().into_iter().map(|(_, r)| r).fold(f64::NEG_INFINITY, |a, b| {
                    if b.is_nan() || a.is_nan() {
                        f64::NAN
                    } else {
                        a.max(b)
                    }
                });
                s.record(Check::Chain, -worst, tol, rep.quad_error)
            }
            Err(e) => s.failed(Check::Chain, e),
        });
    }

    if phi.is_inner() {
        let mut angle = zeta_angle;
        for _ in 0..JULIA_DRAWS {
            let zeta = BoundaryPoint::from_angle(angle);
            if let Ok(res) = julia_residual(phi, z, zeta) {
                let mut r = s.record(Check::Julia, res, cfg.tol_floor, 0.0);
                r.zeta = Some(zeta);
                out.push(r);
                break;
            }
            angle += 0.618_033_988_749_895;
        }
    }

    if phi.is_moebius() {
        let slack = -(phi.deriv(z.value()).norm() - q).abs();
        out.push(s.record(Check::MoebiusEquality, slack, 1e-10 * q.max(1.0), 0.0));
    }
}

/// Whether `moebius_detect(θ)` agrees with `outer_check(θ')` for an inner map.
fn moebius_outer_record(cfg: &SuiteConfig, bounds: &BoundConfig, family: &str, theta: &HoloMap) -> Option<SuiteRecord> {
    if !theta.is_inner() || cfg.samples == 0 {
        return None;
    }
    let probes = default_probes(cfg.probes.max(1), 0.9);
    let detected = moebius_detect(theta, &probes);
    let mut rec = SuiteRecord {
        check: Check::MoebiusOuter,
        family: family.to_string(),
        map: theta.to_spec(),
        z: None,
        arcs: None,
        zeta: None,
        slack: f64::NAN,
        tol: 0.0,
        pass: false,
        quad_error: 0.0,
        error: None,
    };
    match outer_check(&Derivative(theta), &probes, &bounds.quad) {
        Ok(v) => {
            rec.slack = if detected {
                OUTER_TOL - v.value
            } else {
                v.value - NON_OUTER_THRESHOLD
            };
            rec.quad_error = v.error;
            rec.pass = rec.slack >= 0.0;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    Some(rec)
}

fn summarize(records: &[SuiteRecord], runtime_s: f64) -> SuiteSummary {
    let mut by_check: BTreeMap<Check, CheckSummary> = BTreeMap::new();
    let mut max_chain_violation = f64::NEG_INFINITY;
    for r in records {
        let c = by_check.entry(r.check).or_insert(CheckSummary {
            check: r.check,
            records: 0,
            failed: 0,
            min_slack: f64::INFINITY,
        });
        c.records += 1;
        c.failed += (!r.pass) as usize;
        if r.slack < c.min_slack || r.slack.is_nan() {
            c.min_slack = r.slack;
        }
        if r.check == Check::Chain {
            let v = if r.error.is_some() {
                f64::INFINITY
            } else {
                -r.slack - r.tol
            };
            max_chain_violation = max_chain_violation.max(v);
        }
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    SuiteSummary {
        records: records.len(),
        passed: records.len() - failed,
        failed,
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        checks: by_check.into_values().collect(),
        max_chain_violation,
        runtime_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(families: &[&str]) -> SuiteConfig {
        SuiteConfig {
            families: families.iter().map(|s| s.to_string()).collect(),
            samples: 8,
            chain_samples: 2,
            probes: 4,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn config_round_trip() {
        let text = "# demo\nn = 1024\nr_max = 0.9\nfamilies = moebius\nfamilies = blaschke:0,0.5\narcs = full\narcs = 0:1 2:3\nsamples = 5\nseed = 7\nquad = default\njson = out.json\n";
        let cfg: SuiteConfig = text.parse().unwrap();
        assert_eq!(cfg.n, 1024);
        assert_eq!(cfg.families, vec!["moebius", "blaschke:0,0.5"]);
        assert_eq!(cfg.arcs.len(), 2);
        assert_eq!(cfg.quad, QuadMode::Default);
        assert_eq!(cfg.json, Some(PathBuf::from("out.json")));
        assert!("n = 1000".parse::<SuiteConfig>().is_err());
        assert!("bogus = 1".parse::<SuiteConfig>().is_err());
        assert!("families = nonsense(".parse::<SuiteConfig>().is_err());
        assert!("families =".parse::<SuiteConfig>().unwrap().families.is_empty());
    }

    #[test]
    fn empty_family_list() {
        let rep = run_suite(&small(&[])).unwrap();
        assert!(rep.records.is_empty());
        assert!(rep.summary.runtime_s >= 0.0);
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert!(v["summary"].get("runtime_s").is_some());
    }

    #[test]
    fn moebius_suite_equalities() {
        let rep = run_suite(&small(&["moebius"])).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.summary);
        for r in rep.records.iter().filter(|r| r.check == Check::MoebiusEquality) {
            assert!(r.slack >= -1e-10 * r.tol.max(1.0));
        }
        assert!(rep.records.iter().any(|r| r.check == Check::MoebiusOuter && r.pass));
    }

    #[test]
    fn mixed_suite_passes_and_is_deterministic() {
        let cfg = small(&["blaschke", "balpha", "S"]);
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        assert!(
            a.all_passed(),
            "{:?}",
            a.records.iter().filter(|r| !r.pass).collect::<Vec<_>>()
        );
        assert_eq!(a.records, b.records);
        assert!(a.summary.max_chain_violation < 0.0);
        let csv = a.to_csv().unwrap();
        assert_eq!(csv.lines().count(), a.records.len() + 1);
        let back: SuiteReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back.records.len(), a.records.len());
    }
}
