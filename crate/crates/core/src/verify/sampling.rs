use std::f64::consts::TAU;
use std::str::FromStr;

use rand::Rng;

use crate::error::{LabError, Result};
use crate::geometry::{ArcSet, DiskPoint};
use crate::zoo::{parse_spec, random_in_annulus, random_map, HoloMap, RandomFamily};

/// A family entry: a random family redrawn per sample, or one fixed map.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySource {
    Random(RandomFamily),
    Fixed(HoloMap),
}

impl FamilySource {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> HoloMap {
        match self {
            FamilySource::Random(f) => random_map(*f, rng),
            FamilySource::Fixed(m) => m.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            FamilySource::Random(f) => f.name(),
            FamilySource::Fixed(m) => m.to_spec(),
        }
    }
}

impl FromStr for FamilySource {
    type Err = LabError;

    /// Random family names take precedence over function specs.
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<RandomFamily>() {
            Ok(f) => Ok(FamilySource::Random(f)),
            Err(_) => parse_spec(s).map(FamilySource::Fixed),
        }
    }
}

/// How the set `E` is chosen per sample.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcChoice {
    /// One to three arcs with uniform endpoints, or all of T one time in eight.
    Random,
    Fixed(ArcSet),
}

impl ArcChoice {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> ArcSet {
        match self {
            ArcChoice::Fixed(e) => e.clone(),
            ArcChoice::Random => random_arcs(rng),
        }
    }
}

impl FromStr for ArcChoice {
    type Err = LabError;

    /// `random`, `full`, `empty`, or space-separated `start:end` pairs in radians.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random" => Ok(ArcChoice::Random),
            "full" | "T" => Ok(ArcChoice::Fixed(ArcSet::full())),
            "empty" => Ok(ArcChoice::Fixed(ArcSet::empty())),
            text => {
                let mut pairs = Vec::new();
                for part in text.split_whitespace() {
                    let (a, b) = part
                        .split_once(':')
                        .ok_or_else(|| LabError::Parse(format!("arc `{part}` is not start:end")))?;
                    let num = |t: &str| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| LabError::Parse(format!("bad angle `{t}`")))
                    };
                    pairs.push((num(a)?, num(b)?));
                }
                ArcSet::from_pairs(&pairs).map(ArcChoice::Fixed)
            }
        }
    }
}

pub fn random_arcs<R: Rng>(rng: &mut R) -> ArcSet {
    if rng.gen_range(0..8) == 0 {
        return ArcSet::full();
    }
    let k = rng.gen_range(1..=3);
    let mut ends: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(0.0..TAU)).collect();
    ends.sort_by(f64::total_cmp);
    let pairs: Vec<(f64, f64)> = ends.chunks(2).map(|p| (p[0], p[1])).collect();
    ArcSet::from_pairs(&pairs).unwrap_or_else(|_| ArcSet::arc(pairs[0].0, pairs[0].1))
}

/// Uniform by area in `|z| <= r_max`.
pub fn random_point<R: Rng>(rng: &mut R, r_max: f64) -> DiskPoint {
    DiskPoint::new(random_in_annulus(rng, 0.0, r_max)).expect("sampled inside the admissible disk")
}

/// `n` deterministic points spread over `|z| <= r_max` (sunflower pattern).
pub fn default_probes(n: usize, r_max: f64) -> Vec<DiskPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let r = r_max * ((k as f64 + 0.5) / n as f64).sqrt();
            DiskPoint::new(num_complex::Complex64::from_polar(r, golden * k as f64)).expect("probe inside disk")
        })
        .collect()
}
