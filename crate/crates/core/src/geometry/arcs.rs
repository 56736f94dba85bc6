use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::wrap_angle;
use crate::error::{LabError, Result};

/// Half-open arc `[start, start + length)` measured counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn contains(&self, angle: f64) -> bool {
        let d = wrap_angle(angle - self.start);
        d < self.length
    }

    /// Closed-arc membership, so that endpoints count.
    pub fn touches(&self, angle: f64, eps: f64) -> bool {
        let d = wrap_angle(angle - self.start);
        d <= self.length + eps || d >= TAU - eps
    }
}

/// A finite union of pairwise disjoint half-open arcs of the unit circle.
///
/// Kept in normalized form: arcs sorted by start, no two arcs overlapping or
/// abutting, and the full circle represented by a single arc of length 2π.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

const MERGE_EPS: f64 = 1e-14;

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet {
            arcs: vec![Arc {
                start: 0.0,
                length: TAU,
            }],
        }
    }

    /// The arc running counterclockwise from `start` to `end`.
    ///
    /// `end - start` is reduced mod 2π, so `(3π/2, π/2)` is the right half
    /// circle. Equal endpoints give the empty set; use [`ArcSet::full`] for T.
    pub fn arc(start: f64, end: f64) -> Self {
        if !start.is_finite() || !end.is_finite() {
            return ArcSet::empty();
        }
        let raw = end - start;
        let length = if raw >= TAU { TAU } else { wrap_angle(raw) };
        Self::from_arcs(vec![Arc {
            start: wrap_angle(start),
            length,
        }])
    }

    /// Build from `(start, end)` pairs, validating disjointness.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let pieces: Vec<ArcSet> = pairs.iter().map(|&(a, b)| ArcSet::arc(a, b)).collect();
        let total: f64 = pieces.iter().map(|p| p.length()).sum();
        let merged = pieces.into_iter().fold(ArcSet::empty(), |acc, p| acc.union(&p));
        if (merged.length() - total).abs() > 1e-12 {
            return Err(LabError::ParamOutOfDomain("arcs overlap".into()));
        }
        Ok(merged)
    }

    fn from_arcs(raw: Vec<Arc>) -> Self {
        // split at 0 so every piece lives in [0, 2π]
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        for arc in raw {
            if arc.length <= 0.0 {
                continue;
            }
            if arc.length >= TAU {
                return ArcSet::full();
            }
            let s = wrap_angle(arc.start);
            let e = s + arc.length;
            if e > TAU {
                pieces.push((s, TAU));
                pieces.push((0.0, e - TAU));
            } else {
                pieces.push((s, e));
            }
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (s, e) in pieces {
            match merged.last_mut() {
                Some(last) if s <= last.1 + MERGE_EPS => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        if merged.len() == 1 && merged[0].0 <= MERGE_EPS && merged[0].1 >= TAU - MERGE_EPS {
            return ArcSet::full();
        }
        // rejoin an arc that wraps through angle 0
        if merged.len() >= 2 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if first.0 <= MERGE_EPS && last.1 >= TAU - MERGE_EPS {
                merged.remove(0);
                let l = merged.last_mut().unwrap();
                l.1 = TAU + first.1;
            }
        }
        let mut arcs: Vec<Arc> = merged
            .into_iter()
            .map(|(s, e)| Arc {
                start: s,
                length: e - s,
            })
            .collect();
        arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
        ArcSet { arcs }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].length >= TAU
    }

    /// Total angular length.
    pub fn length(&self) -> f64 {
        self.arcs.iter().map(|a| a.length).sum()
    }

    pub fn contains(&self, angle: f64) -> bool {
        self.arcs.iter().any(|a| a.contains(angle))
    }

    /// Whether `angle` lies in the closure of the set.
    pub fn closure_contains(&self, angle: f64) -> bool {
        self.arcs.iter().any(|a| a.touches(angle, 1e-12))
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut all = self.arcs.clone();
        all.extend_from_slice(&other.arcs);
        Self::from_arcs(all)
    }

    /// `T \ E`.
    pub fn complement(&self) -> ArcSet {
        if self.is_empty() {
            return ArcSet::full();
        }
        if self.is_full() {
            return ArcSet::empty();
        }
        let n = self.arcs.len();
        let mut gaps = Vec::with_capacity(n);
        for i in 0..n {
            let cur = self.arcs[i];
            let next = self.arcs[(i + 1) % n];
            let start = cur.end();
            let length = wrap_angle(next.start - start);
            if length > 0.0 {
                gaps.push(Arc {
                    start: wrap_angle(start),
                    length,
                });
            }
        }
        Self::from_arcs(gaps)
    }

    /// Whether `self` is contained in `other` (up to endpoint rounding).
    pub fn is_subset(&self, other: &ArcSet) -> bool {
        (self.union(other).length() - other.length()).abs() <= 1e-12
    }

    /// Image of the set under a circle homeomorphism given by a Möbius map,
    /// computed by mapping arc endpoints. The map must preserve orientation.
    pub fn map_endpoints(&self, f: impl Fn(Complex64) -> Complex64) -> ArcSet {
        if self.is_full() {
            return ArcSet::full();
        }
        let mapped = self
            .arcs
            .iter()
            .map(|a| {
                let s = f(Complex64::from_polar(1.0, a.start)).arg();
                let e = f(Complex64::from_polar(1.0, a.end())).arg();
                Arc {
                    start: wrap_angle(s),
                    length: wrap_angle(e - s),
                }
            })
            .collect();
        Self::from_arcs(mapped)
    }

    /// All arc endpoints as angles in `[0, 2π)`.
    pub fn endpoints(&self) -> Vec<f64> {
        if self.is_full() {
            return Vec::new();
        }
        self.arcs.iter().flat_map(|a| [a.start, wrap_angle(a.end())]).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for ArcSet {
    type Error = LabError;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        if v.len() == 1 && (v[0][1] - v[0][0] - TAU).abs() < 1e-12 {
            return Ok(ArcSet::full());
        }
        let pairs: Vec<(f64, f64)> = v.iter().map(|p| (p[0], p[1])).collect();
        ArcSet::from_pairs(&pairs)
    }
}

impl From<ArcSet> for Vec<[f64; 2]> {
    fn from(e: ArcSet) -> Self {
        e.arcs.iter().map(|a| [a.start, a.end()]).collect()
    }
}
