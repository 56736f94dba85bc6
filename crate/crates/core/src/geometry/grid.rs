use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BoundaryPoint;
use crate::error::{LabError, Result};

pub const DEFAULT_GRID_N: usize = 4096;

/// Uniform grid `2πj/n` on the circle with trapezoid weights `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleGrid {
    n: usize,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(LabError::Config(format!("grid size {n} must be a power of two >= 8")));
        }
        Ok(CircleGrid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    pub fn node(&self, j: usize) -> BoundaryPoint {
        BoundaryPoint::from_angle(self.angle(j))
    }

    pub fn nodes(&self) -> impl Iterator<Item = BoundaryPoint> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    /// Index of the node nearest to `angle`.
    pub fn nearest(&self, angle: f64) -> usize {
        ((super::wrap_angle(angle) / self.spacing()).round() as usize) % self.n
    }
}

impl Default for CircleGrid {
    fn default() -> Self {
        CircleGrid { n: DEFAULT_GRID_N }
    }
}

/// Known logarithmic singularity `coeff * log|zeta - e^{i angle}|` of sampled
/// log-modulus data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSingularity {
    pub angle: f64,
    pub coeff: f64,
}

/// Values of a function at the nodes of a [`CircleGrid`].
///
/// Nodes that sit on a boundary singularity hold `NaN` and are excluded from
/// quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySamples {
    pub grid: CircleGrid,
    pub values: Vec<Complex64>,
    /// `|I_n - I_{n/2}|` for the plain mean of the samples.
    pub quad_error_estimate: f64,
    #[serde(default)]
    pub log_singularities: Vec<LogSingularity>,
    /// Measure of nodes whose value had to be clamped.
    #[serde(default)]
    pub clamped_mass: f64,
}

impl BoundarySamples {
    pub fn new(grid: CircleGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(LabError::ParamOutOfDomain(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.n()
            )));
        }
        let mut s = BoundarySamples {
            grid,
            values,
            quad_error_estimate: 0.0,
            log_singularities: Vec::new(),
            clamped_mass: 0.0,
        };
        s.quad_error_estimate = s.halving_error();
        Ok(s)
    }

    pub fn from_real(grid: CircleGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Sample `f` at every node; `None` marks an excluded node.
    pub fn sample(grid: CircleGrid, f: impl Fn(BoundaryPoint) -> Option<Complex64>) -> Self {
        let values = grid
            .nodes()
            .map(|p| f(p).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
            .collect();
        Self::new(grid, values).expect("length matches by construction")
    }

    pub fn sample_real(grid: CircleGrid, f: impl Fn(BoundaryPoint) -> Option<f64>) -> Self {
        Self::sample(grid, |p| f(p).map(|v| Complex64::new(v, 0.0)))
    }

    pub fn with_log_singularities(mut self, sings: Vec<LogSingularity>) -> Self {
        self.log_singularities = sings;
        self
    }

    pub fn is_excluded(&self, j: usize) -> bool {
        self.values[j].re.is_nan()
    }

    /// Normalized measure of excluded nodes.
    pub fn excluded_measure(&self) -> f64 {
        (0..self.grid.n()).filter(|&j| self.is_excluded(j)).count() as f64 * self.grid.weight()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0 || v.im.is_nan())
    }

    /// Trapezoid mean over retained nodes.
    pub fn mean(&self) -> Complex64 {
        let w = self.grid.weight();
        self.values.iter().filter(|v| !v.re.is_nan()).map(|v| v * w).sum()
    }

    fn halving_error(&self) -> f64 {
        let full = self.mean();
        let w = 2.0 * self.grid.weight();
        let half: Complex64 = self
            .values
            .iter()
            .step_by(2)
            .filter(|v| !v.re.is_nan())
            .map(|v| v * w)
            .sum();
        (full - half).norm()
    }

    /// CSV with columns `angle,re,im,weight`; excluded nodes carry `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle,re,im,weight\n");
        let w = self.grid.weight();
        for (j, v) in self.values.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                self.grid.angle(j),
                v.re,
                v.im,
                w
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| LabError::Parse(format!("line {}: {e}", i + 1)))?;
            if cols.len() != 4 {
                return Err(LabError::Parse(format!("line {}: expected 4 columns", i + 1)));
            }
            values.push(Complex64::new(cols[1], cols[2]));
        }
        let grid = CircleGrid::new(values.len())?;
        Self::new(grid, values)
    }
}
