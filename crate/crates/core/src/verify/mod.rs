//! Randomized checks of the bounds and classification probes.

mod classify;
mod falsify;
mod sampling;
mod suite;

pub use classify::{
    deriv_ratio_evidence, inner_factor_probe, moebius_detect, moebius_residual, outer_check, ProbeMode, DEFAULT_PROBES,
    DEFAULT_PROBE_RADIUS, MOEBIUS_REL, NON_OUTER_THRESHOLD,
};
pub use falsify::{falsify, FalsifyOptions, FalsifyRecord};
pub use sampling::{default_probes, random_arcs, random_point, ArcChoice, FamilySource};
pub use suite::{
    run_suite, Check, CheckSummary, QuadMode, SuiteConfig, SuiteRecord, SuiteReport, SuiteSummary, SUITE_CSV_HEADER,
};
