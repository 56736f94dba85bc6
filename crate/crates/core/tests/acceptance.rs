//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schwarz_lab::angular::{angular_derivative, DEFAULT_DEPTH};
use schwarz_lab::bounds::{
    inner_bound_rhs, julia_residual, log_integral, q_ratio, reverse_bound_rhs, schwarz_pick_slack, BoundConfig,
};
use schwarz_lab::geometry::{
    arc_measure, automorphism, harmonic_measure, poisson_integral, ArcSet, BoundaryPoint, BoundarySamples, CircleGrid,
    DiskPoint,
};
use schwarz_lab::verify::{
    default_probes, falsify, inner_factor_probe, moebius_detect, outer_check, random_arcs, random_point, run_suite,
    Check, FalsifyOptions, ProbeMode, SuiteConfig, SuiteReport, NON_OUTER_THRESHOLD,
};
use schwarz_lab::zoo::{random_map, Derivative, HoloMap, RandomFamily};

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sq() -> HoloMap {
    HoloMap::blaschke(vec![c(0.0, 0.0), c(0.0, 0.0)], c(1.0, 0.0)).unwrap()
}

/// One shared run: 10³ samples per family with random arc sets.
fn suite() -> &'static SuiteReport {
    static REPORT: OnceLock<SuiteReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let cfg = SuiteConfig {
            samples: 1000,
            chain_samples: 40,
            seed: 2024,
            ..SuiteConfig::default()
        };
        run_suite(&cfg).expect("suite runs")
    })
}

fn records(check: Check) -> Vec<&'static schwarz_lab::verify::SuiteRecord> {
    suite().records.iter().filter(|r| r.check == check).collect()
}

fn schwarz_pick() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut min = f64::INFINITY;
    let mut count = 0;
    for fam in RandomFamily::ALL {
        for _ in 0..2000 {
            let phi = random_map(fam, &mut rng);
            let z = random_point(&mut rng, 0.99);
            min = min.min(schwarz_pick_slack(&phi, z));
            count += 1;
        }
    }
    ensure(min >= -1e-12, format!("{count} samples, min slack {min:e}"))
}

fn reverse_bound() -> Outcome {
    let recs = records(Check::ReverseBound);
    let mut worst = f64::INFINITY;
    for fam in RandomFamily::ALL {
        let n = recs.iter().filter(|r| r.family == fam.name()).count();
        if n < 1000 {
            return Err(format!("only {n} samples for {}", fam.name()));
        }
    }
    let failed = recs.iter().filter(|r| !r.pass).count();
    for r in &recs {
        worst = worst.min(r.slack + r.tol);
    }
    let mut falsified = Vec::new();
    for fam in RandomFamily::ALL {
        let rec = falsify(&fam.name(), 10_000, 7, &FalsifyOptions::default()).map_err(|e| e.to_string())?;
        if rec.violations > 0 || rec.failures > 0 {
            return Err(format!(
                "falsify {}: {} violations, {} failures",
                fam.name(),
                rec.violations,
                rec.failures
            ));
        }
        falsified.push(format!("{} {:.1e}", fam.name(), rec.min_slack));
    }
    ensure(
        failed == 0,
        format!(
            "{} suite samples, {failed} over tol, min slack+tol {worst:e}; falsify 10^4 min slack: {}",
            recs.len(),
            falsified.join(", ")
        ),
    )
}

fn chain() -> Outcome {
    let recs = records(Check::Chain);
    let failed = recs.iter().filter(|r| !r.pass).count();
    let errors = recs.iter().filter(|r| r.error.is_some()).count();
    let worst = suite().summary.max_chain_violation;
    ensure(
        failed == 0 && errors == 0 && !recs.is_empty(),
        format!(
            "{} chains, {failed} violations, {errors} errors, max residual - tol {worst:e}",
            recs.len()
        ),
    )
}

fn z_squared() -> Outcome {
    let theta = sq();
    let cfg = BoundConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut e_outer, mut e_q, mut e_slack) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let z = random_point(&mut rng, 0.99);
        let r2 = z.value().norm_sqr();
        let i1 = log_integral(&Derivative(&theta), &ArcSet::full(), z, &cfg.quad).map_err(|e| e.to_string())?;
        e_outer = e_outer.max((i1.value.exp() - 2.0).abs());
        let q = q_ratio(&theta, z);
        e_q = e_q.max((q - (1.0 + r2)).abs());
        let rhs = reverse_bound_rhs(&theta, &ArcSet::full(), z, &cfg).map_err(|e| e.to_string())?;
        e_slack = e_slack.max((rhs.value - q - (1.0 - r2)).abs());
    }
    ensure(
        e_outer <= 1e-8 && e_q <= 1e-12 && e_slack <= 1e-8,
        format!("|O-2| {e_outer:.1e}, |Q-(1+|z|^2)| {e_q:.1e}, |slack-(1-|z|^2)| {e_slack:.1e}"),
    )
}

fn atomic_s() -> Outcome {
    let s = HoloMap::atomic_s();
    let cfg = BoundConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = random_point(&mut rng, 0.99);
        let v = inner_bound_rhs(&s, z, &cfg).map_err(|e| e.to_string())?;
        let exact = 2.0 / (1.0 - z.value()).norm_sqr();
        worst = worst.max((v.value - exact).abs() / exact);
    }
    let q0 = q_ratio(&s, DiskPoint::origin());
    let e0 = (q0 - (1.0 - (-2.0f64).exp())).abs();
    ensure(
        worst <= 1e-6 && e0 <= 1e-12,
        format!("max rel err {worst:.1e} over 100 z; Q(0) = {q0:.7} (err {e0:.1e})"),
    )
}

fn equality_case() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let probes = default_probes(32, 0.9);
    let mut worst = 0.0f64;
    let mut detected = 0;
    for _ in 0..100 {
        let m = random_map(RandomFamily::Moebius, &mut rng);
        for &z in &probes {
            worst = worst.max((q_ratio(&m, z) - m.deriv(z.value()).norm()).abs());
        }
        detected += moebius_detect(&m, &probes) as usize;
    }
    let others = [
        sq(),
        HoloMap::b_alpha(c(0.5, 0.0)).unwrap(),
        HoloMap::blaschke(vec![c(0.0, 0.0), c(0.5, 0.0)], c(1.0, 0.0)).unwrap(),
    ];
    let false_pos = others.iter().filter(|t| moebius_detect(t, &probes)).count();
    ensure(
        worst <= 1e-10 && detected == 100 && false_pos == 0,
        format!("max |Q-|θ'|| {worst:.1e}, {detected}/100 detected, {false_pos}/3 false positives"),
    )
}

fn outer_equivalence() -> Outcome {
    let quad = BoundConfig::default().quad;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut moeb = 0.0f64;
    for _ in 0..10 {
        let m = random_map(RandomFamily::Moebius, &mut rng);
        moeb = moeb.max(
            outer_check(&Derivative(&m), &[], &quad)
                .map_err(|e| e.to_string())?
                .value,
        );
    }
    let b = HoloMap::b_alpha(c(0.5, 0.0)).unwrap();
    let z2 = outer_check(&Derivative(&sq()), &[], &quad)
        .map_err(|e| e.to_string())?
        .value;
    let ba = outer_check(&Derivative(&b), &[], &quad)
        .map_err(|e| e.to_string())?
        .value;
    let at0 = outer_check(&Derivative(&b), &[DiskPoint::origin()], &quad)
        .map_err(|e| e.to_string())?
        .value;
    ensure(
        moeb <= 1e-6 && z2 >= NON_OUTER_THRESHOLD && ba >= NON_OUTER_THRESHOLD && (at0 - 1.0).abs() <= 1e-3,
        format!("Möbius {moeb:.1e}, z^2 {z2:.3}, B_α {ba:.3}, B_α deficit at 0 {at0:.6}"),
    )
}

fn inner_factor() -> Outcome {
    let quad = BoundConfig::default().quad;
    let probes = default_probes(32, 0.9);
    let b = HoloMap::b_alpha(c(0.5, 0.0)).unwrap();
    let s = HoloMap::atomic_s();
    let rel = inner_factor_probe(&b, &s, &probes, ProbeMode::Relative, &quad).map_err(|e| e.to_string())?;
    let mut detail = vec![format!("B_α vs S {:.1e}", rel.value)];
    let mut ok = rel.value <= 1e-6;
    let maps = [
        ("Möbius(1,0.5)", HoloMap::moebius(c(1.0, 0.0), c(0.5, 0.0)).unwrap()),
        ("z^2", sq()),
        ("S", s),
    ];
    for (name, i) in maps {
        let theta = HoloMap::product(i.clone(), i.clone());
        let d = inner_factor_probe(&theta, &i, &probes, ProbeMode::LogDeficit, &quad).map_err(|e| e.to_string())?;
        ok &= d.value <= schwarz_lab::bounds::tolerance(d.error);
        detail.push(format!("{name} deficit {:.1e}", d.value));
    }
    ensure(ok, detail.join(", "))
}

fn julia() -> Outcome {
    let recs = records(Check::Julia);
    let min = recs.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut moeb = 0.0f64;
    for _ in 0..1000 {
        let m = random_map(RandomFamily::Moebius, &mut rng);
        let z = random_point(&mut rng, 0.99);
        let zeta = BoundaryPoint::from_angle(rng.gen_range(0.0..TAU));
        moeb = moeb.max(julia_residual(&m, z, zeta).map_err(|e| e.to_string())?.abs());
    }
    ensure(
        recs.len() >= 1000 && min >= -1e-9 && moeb <= 1e-10,
        format!(
            "{} inner samples, min residual {min:e}; Möbius max |residual| {moeb:.1e}",
            recs.len()
        ),
    )
}

fn angular_limits() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut count = 0;
    for _ in 0..20 {
        let b = random_map(RandomFamily::Blaschke { max_zeros: 8 }, &mut rng);
        for _ in 0..5 {
            let zeta = BoundaryPoint::from_angle(rng.gen_range(0.0..TAU));
            let rep = angular_derivative(&b, zeta, DEFAULT_DEPTH).map_err(|e| e.to_string())?;
            let exact = b.boundary_deriv(zeta).unwrap().norm();
            if !rep.exists {
                return Err(format!("no limit found for {} at {}", b.to_spec(), zeta.angle()));
            }
            worst = worst.max((rep.liminf_estimate - exact).abs());
            count += 1;
        }
    }
    let s = angular_derivative(&HoloMap::atomic_s(), BoundaryPoint::from_angle(0.0), DEFAULT_DEPTH)
        .map_err(|e| e.to_string())?;
    ensure(
        worst <= 1e-4 && !s.exists,
        format!(
            "{count} Blaschke limits, max err {worst:.1e}; S at 1: exists = {}",
            s.exists
        ),
    )
}

fn harmonic() -> Outcome {
    let grid = CircleGrid::new(4096).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut at0, mut full, mut invariance) = (0.0f64, 0.0f64, 0.0f64);
    let mut ok = true;
    for _ in 0..100 {
        let e = random_arcs(&mut rng);
        let w0 = harmonic_measure(DiskPoint::origin(), &e, &grid).map_err(|x| x.to_string())?;
        at0 = at0.max((w0.value - arc_measure(&e)).abs());

        let z = random_point(&mut rng, 0.95);
        let t = harmonic_measure(z, &ArcSet::full(), &grid).map_err(|x| x.to_string())?;
        full = full.max((t.value - 1.0).abs());
        ok &= (t.value - 1.0).abs() <= 2.0 * t.error.max(f64::EPSILON);

        let wz = harmonic_measure(z, &e, &grid).map_err(|x| x.to_string())?;
        let moved = e.map_endpoints(|w| automorphism(z.value(), w));
        let w_moved = harmonic_measure(DiskPoint::origin(), &moved, &grid).map_err(|x| x.to_string())?;
        let gap = (wz.value - w_moved.value).abs();
        invariance = invariance.max(gap);
        ok &= gap <= 4.0 * (wz.error + w_moved.error).max(f64::EPSILON);
    }

    // trapezoid Poisson integral of Re 1/(1.05 - ζ) at z = 0.3
    let z = DiskPoint::from_re_im(0.3, 0.0).unwrap();
    let exact = (1.0 / (1.05 - z.value())).re;
    let mut errs = Vec::new();
    for n in [128, 256, 512, 1024, 2048] {
        let g = CircleGrid::new(n).unwrap();
        let u = BoundarySamples::sample_real(g, |p| Some((1.0 / (1.05 - p.value())).re));
        errs.push((poisson_integral(z, &u).map_err(|x| x.to_string())?.value - exact).abs());
    }
    let ratios: Vec<f64> = errs
        .windows(2)
        .filter(|w| w[0] > 1e-13)
        .map(|w| w[0] / w[1].max(1e-300))
        .collect();
    ok &= !ratios.is_empty() && ratios.iter().all(|&r| r >= 4.0);
    ok &= at0 <= 1e-12;
    ensure(
        ok,
        format!(
            "|ω_0-m| {at0:.1e}, |ω_z(T)-1| {full:.1e}, invariance gap {invariance:.1e}, doubling ratios {}",
            ratios.iter().map(|r| format!("{r:.0e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn lower_bound() -> Outcome {
    let recs = records(Check::LowerBound);
    let min = recs.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    ensure(
        recs.len() >= 5000 && min >= -1e-9,
        format!("{} samples, min slack {min:e}", recs.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "Schwarz–Pick", schwarz_pick),
        (2, "reverse bound", reverse_bound),
        (3, "proof chain", chain),
        (4, "z^2 on T", z_squared),
        (5, "atomic S", atomic_s),
        (6, "Möbius equality", equality_case),
        (7, "Möbius iff outer derivative", outer_equivalence),
        (8, "inner factors", inner_factor),
        (9, "Julia", julia),
        (10, "angular limits", angular_limits),
        (11, "harmonic measure", harmonic),
        (12, "lower bound", lower_bound),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (id, name, run) in criteria {
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {id:>2} {tag} {name}: {detail} [{:.1}s]",
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of 12 criteria passed in {:.1}s (suite runtime {:.1}s)",
        12 - failed,
        start.elapsed().as_secs_f64(),
        suite().summary.runtime_s
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
