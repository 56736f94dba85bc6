use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schwarz_lab::bounds::{
    dbr_kernel, f_z, julia_residual, lower_bound_slack, omega, q_ratio, reverse_bound_rhs, schwarz_pick_slack,
    tolerance, BoundConfig,
};
use schwarz_lab::geometry::{automorphism, automorphism_inv, ArcSet, BoundaryPoint, CircleGrid, DiskPoint};
use schwarz_lab::zoo::{parse_spec, random_map, HoloMap, RandomFamily};

fn family_map() -> impl Strategy<Value = HoloMap> {
    (0..RandomFamily::ALL.len(), any::<u64>())
        .prop_map(|(k, seed)| random_map(RandomFamily::ALL[k], &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn cheap_map() -> impl Strategy<Value = HoloMap> {
    (0..2usize, any::<u64>())
        .prop_map(|(k, seed)| random_map(RandomFamily::ALL[k], &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn disk_point(r_max: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..r_max, 0.0..TAU).prop_map(|(r, t)| DiskPoint::new(Complex64::from_polar(r, t)).unwrap())
}

fn arc_set() -> impl Strategy<Value = ArcSet> {
    prop::collection::vec(0.0..TAU, 2..=6).prop_map(|mut ends| {
        ends.sort_by(f64::total_cmp);
        let pairs: Vec<(f64, f64)> = ends
            .chunks_exact(2)
            .map(|p| (p[0], p[1]))
            .filter(|p| p.1 > p.0)
            .collect();
        ArcSet::from_pairs(&pairs).unwrap_or_else(|_| ArcSet::empty())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn schwarz_pick_holds(phi in family_map(), z in disk_point(0.99)) {
        let q = q_ratio(&phi, z);
        prop_assert!(schwarz_pick_slack(&phi, z) >= -1e-12 * q.max(1.0));
    }

    #[test]
    fn lower_bound_holds(phi in family_map(), z in disk_point(0.99)) {
        prop_assert!(lower_bound_slack(&phi, z) >= -1e-9);
    }

    #[test]
    fn kernel_on_the_diagonal_is_q(phi in family_map(), z in disk_point(0.99)) {
        let q = q_ratio(&phi, z);
        let k = dbr_kernel(&phi, z, z).unwrap();
        prop_assert!((k.re - q).abs() <= 1e-12 * q.max(1.0));
        prop_assert!(k.im.abs() <= 1e-12 * q.max(1.0));
        prop_assert_eq!(f_z(&phi, z, z).unwrap().re, q);
    }

    #[test]
    fn f_z_is_dominated_by_derivative_on_circle(phi in family_map(), z in disk_point(0.95), t in 0.0..TAU) {
        let p = BoundaryPoint::from_angle(t);
        if let (Ok(f), Some(d)) = (f_z(&phi, z, p), phi.boundary_deriv(p)) {
            prop_assert!(f.norm() <= d.norm() * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn julia_holds_for_inner_maps(phi in family_map(), z in disk_point(0.99), t in 0.0..TAU) {
        if let Ok(res) = julia_residual(&phi, z, BoundaryPoint::from_angle(t)) {
            let lhs_scale = phi.boundary_deriv(BoundaryPoint::from_angle(t)).unwrap().norm() * 4.0 / z.one_minus_norm_sqr();
            prop_assert!(res >= -1e-12 * lhs_scale.max(1.0), "residual {res}");
        }
    }

    #[test]
    fn complement_partitions(e in arc_set(), t in 0.0..TAU, z in disk_point(0.9)) {
        let c = e.complement();
        prop_assert!((e.length() + c.length() - TAU).abs() < 1e-12);
        let near_end = e.endpoints().iter().any(|&a| ((t - a).rem_euclid(TAU)).min((a - t).rem_euclid(TAU)) < 1e-9);
        if !near_end {
            prop_assert!(e.contains(t) != c.contains(t));
        }
        prop_assert!((omega(z, &e) + omega(z, &c) - 1.0).abs() < 1e-12);
        prop_assert!((omega(DiskPoint::origin(), &e) - e.length() / TAU).abs() < 1e-12);
    }

    #[test]
    fn automorphism_inverse_round_trip(z in disk_point(0.95), w in disk_point(0.95)) {
        let back = automorphism_inv(z.value(), automorphism(z.value(), w.value()));
        prop_assert!((back - w.value()).norm() < 1e-12);
    }

    #[test]
    fn spec_round_trip(phi in family_map(), z in disk_point(0.9)) {
        let again = parse_spec(&phi.to_spec()).unwrap();
        prop_assert!((again.eval(z.value()) - phi.eval(z.value())).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reverse_bound_holds(phi in cheap_map(), e in arc_set(), z in disk_point(0.99)) {
        let cfg = BoundConfig::sweep(CircleGrid::new(4096).unwrap());
        let rhs = reverse_bound_rhs(&phi, &e, z, &cfg).unwrap();
        prop_assert!(q_ratio(&phi, z) <= rhs.value + tolerance(rhs.error));
    }
}
