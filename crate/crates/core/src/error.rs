use thiserror::Error;

/// Errors raised by the laboratory's numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("point {re}+{im}i is outside the admissible disk |z| <= {r_max}")]
    OutOfDisk { re: f64, im: f64, r_max: f64 },

    #[error("grid too coarse: Poisson kernel width {width:.3e} is below 4 grid spacings ({spacing:.3e})")]
    GridTooCoarse { width: f64, spacing: f64 },

    #[error("boundary data is not log-integrable: clamped mass {clamped_mass:.3e} exceeds {threshold:.3e}")]
    NotLogIntegrable { clamped_mass: f64, threshold: f64 },

    #[error("parameter out of domain: {0}")]
    ParamOutOfDomain(String),

    #[error("Cauchy contour of radius {radius:.3e} around |z| = {modulus} leaves the disk")]
    ContourTooClose { modulus: f64, radius: f64 },

    #[error("boundary point at angle {angle} lies on the singular support")]
    BoundarySingularity { angle: f64 },

    #[error("derivative is unbounded on E (grid max {max:.3e})")]
    UnboundedOnE { max: f64 },

    #[error("proof chain link `{link}` violated by {residual:.3e}")]
    ChainViolation { link: String, residual: f64 },

    #[error("angular limit inconclusive at depth {depth}")]
    Inconclusive { depth: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(err: std::io::Error) -> Self {
        LabError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
