//! Property tests for module invariants.

mod common;

use std::f64::consts::PI;

use common::*;
use nritt::calculus::{
    apply_auto, apply_extended, apply_ritt, apply_sectorial, classify_ritt, classify_sectorial, default_grid,
    CalculusParams,
};
use nritt::error::Error;
use nritt::funclass::{decompose_polynomial, library, HoloFn};
use nritt::matrixkit::{CMatrix, NormKind, Operator};
use nritt::multipliers::{carleson_delta, i_theta, multiplier, BVSequence};
use nritt::poly::Poly;
use nritt::regions::{rotation, Region, RegionKind};
use nritt::stochastics::{estimate_r_bound, rad_norm, RBoundConfig, RadMethod, RadMode};
use nritt::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| c(re, im))
}

fn vectors(max_len: usize, d: usize) -> impl Strategy<Value = Vec<Vec<Complex64>>> {
    prop::collection::vec(prop::collection::vec(complex(), d), 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regions_are_invariant_under_their_rotations(z in complex(), n in 1usize..5, frac in 0.05..0.95f64) {
        let sector = Region::n_sector(n, frac * PI / n as f64).unwrap();
        prop_assert_eq!(sector.contains(z), sector.contains(z * rotation(n, 1)));
        let stolz = Region::n_stolz(n, frac * stolz_top(n)).unwrap();
        let image = 1.0 - rotation(n, 1) * (1.0 - z);
        // Membership is tested with a margin to avoid boundary rounding.
        if stolz.boundary_distance(z) > 1e-9 {
            prop_assert_eq!(stolz.contains(z), stolz.contains(image));
        }
    }

    #[test]
    fn stolz_domains_grow_with_the_angle(z in complex(), n in 1usize..4, a in 0.05..0.5f64, b in 0.5..0.95f64) {
        let small = Region::n_stolz(n, a * stolz_top(n)).unwrap();
        let large = Region::n_stolz(n, b * stolz_top(n)).unwrap();
        prop_assert!(!small.contains(z) || large.contains(z));
        let small = Region::n_sector(n, a * PI / n as f64).unwrap();
        let large = Region::n_sector(n, b * PI / n as f64).unwrap();
        prop_assert!(!small.contains(z) || large.contains(z));
    }

    #[test]
    fn stolz_image_lies_in_sector(n in 1usize..4, frac in 0.1..0.9f64, seed in 0u64..1000) {
        let gamma = frac * stolz_top(n);
        let mut r = rng(seed);
        let lambda = stolz_point(&mut r, n, gamma, 0.01);
        let sector = Region::n_sector(n, gamma).unwrap();
        prop_assert!(sector.contains_closed(1.0 - lambda, 1e-12));
    }

    #[test]
    fn rad_norm_is_homogeneous(xs in vectors(6, 3), t in complex()) {
        for kind in [NormKind::P1, NormKind::P2, NormKind::PInf] {
            let base = rad_norm(&xs, kind, RadMode::Exhaustive).unwrap().value;
            let scaled: Vec<Vec<Complex64>> = xs.iter().map(|x| x.iter().map(|v| v * t).collect()).collect();
            let got = rad_norm(&scaled, kind, RadMode::Exhaustive).unwrap().value;
            prop_assert!((got - t.norm() * base).abs() <= 1e-12 * (1.0 + t.norm() * base));
        }
    }

    #[test]
    fn rad_norm_is_subadditive_under_concatenation(xs in vectors(5, 2), ys in vectors(5, 2)) {
        for kind in [NormKind::P1, NormKind::P2, NormKind::PInf] {
            let joined: Vec<Vec<Complex64>> = xs.iter().chain(&ys).cloned().collect();
            let lhs = rad_norm(&joined, kind, RadMode::Exhaustive).unwrap().value;
            let rhs = rad_norm(&xs, kind, RadMode::Exhaustive).unwrap().value
                + rad_norm(&ys, kind, RadMode::Exhaustive).unwrap().value;
            prop_assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn polynomial_decomposition_reconstructs(coeffs in prop::collection::vec(complex(), 0..9), z in complex()) {
        let p = Poly::new(coeffs);
        let (q, at_one) = decompose_polynomial(&p);
        let rebuilt = (z - 1.0) * q.eval(z) + at_one;
        prop_assert!((rebuilt - p.eval(z)).norm() <= 1e-9 * (1.0 + p.eval(z).norm()));
    }

    #[test]
    fn i_theta_is_even(theta in 1e-3..PI) {
        prop_assert_eq!(i_theta(theta).unwrap(), i_theta(-theta).unwrap());
    }

    #[test]
    fn multiplier_norm_is_bounded_by_variation(mut values in prop::collection::vec(0.0..1.0f64, 1..12)) {
        values.sort_by(f64::total_cmp);
        let g = BVSequence::from_real(&values).unwrap();
        for kind in [NormKind::P1, NormKind::P2, NormKind::PInf] {
            let norm = multiplier(&g, kind).op_norm();
            prop_assert!(norm <= values[0].abs() + g.bv_norm() + 1e-12);
        }
    }

    #[test]
    fn theta_sequence_variation_is_bounded_by_i_theta(
        mut values in prop::collection::vec(0.0..0.999f64, 2..12),
        theta in 1e-2..PI,
    ) {
        values.sort_by(f64::total_cmp);
        let g = BVSequence::from_real(&values).unwrap();
        let bv = g.theta_sequence(theta).unwrap().bv_norm();
        prop_assert!(bv <= i_theta(theta).unwrap() + 1e-12);
    }

    #[test]
    fn carleson_product_ignores_order(pts in prop::collection::vec((0.01..3.0f64, -3.0..3.0f64), 2..8)) {
        let pts: Vec<Complex64> = pts.into_iter().map(|(re, im)| c(re, im)).collect();
        let mut dedup = pts.clone();
        dedup.dedup();
        prop_assume!(dedup.len() == pts.len());
        let mut rev = pts.clone();
        rev.reverse();
        let last = pts.len() - 1;
        let a = carleson_delta(&pts, 0).unwrap();
        let b = carleson_delta(&rev, last).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
        prop_assert!(a <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn calculus_is_linear(seed in 0u64..10_000, n in 1usize..4) {
        let mut r = rng(seed);
        let (alpha, gamma) = (0.3 * stolz_top(n), 0.8 * stolz_top(n));
        let t = random_ritt(&mut r, n, 3, alpha);
        let region = Region::n_stolz(n, gamma).unwrap();
        let one = HoloFn::constant(c(1.0, 0.0));
        let phi = library::stolz_factor(1, &one, region).unwrap();
        let psi = library::stolz_factor(2, &HoloFn::identity(), region).unwrap();
        let (a, b) = (c(r.gen_range(-1.0..1.0), 0.3), c(0.7, r.gen_range(-1.0..1.0)));
        let combo = phi.scale(a).add(&psi.scale(b)).fit_stolz_certificate(region).unwrap();
        let tol = 1e-10;
        let params = CalculusParams::new(n, alpha, gamma, tol).unwrap();
        let x = apply_ritt(&t, &phi, &params).unwrap().operator.matrix().clone();
        let y = apply_ritt(&t, &psi, &params).unwrap().operator.matrix().clone();
        let z = apply_ritt(&t, &combo, &params).unwrap().operator.matrix().clone();
        let mut want = x.scale(a);
        want.add_scaled(&y, b);
        prop_assert!(z.max_abs_diff(&want) <= 2.0 * tol * (1.0 + a.norm() + b.norm()));
    }

    #[test]
    fn r_bound_never_decreases_when_operators_are_added(seed in 0u64..1000) {
        let mut r = rng(seed);
        let mut random_op = || {
            Operator::new(CMatrix::from_fn(2, 2, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))), NormKind::P1)
                .unwrap()
        };
        let (a, b, d) = (random_op(), random_op(), random_op());
        let cfg = RBoundConfig { trials: 3, family_size_max: 3, climb_steps: 10, seed, mode: RadMode::Exhaustive };
        let one = estimate_r_bound(&[a.clone()], &cfg).unwrap().c_lower;
        let two = estimate_r_bound(&[a.clone(), b.clone()], &cfg).unwrap().c_lower;
        let three = estimate_r_bound(&[a, b, d], &cfg).unwrap().c_lower;
        prop_assert!(one <= two && two <= three);
    }
}

#[test]
fn exhaustive_and_monte_carlo_agree_within_three_standard_errors() {
    let mut r = rng(77);
    for case in 0..20 {
        let count = r.gen_range(2..=12);
        let d = r.gen_range(1..=4);
        let xs: Vec<Vec<Complex64>> = (0..count)
            .map(|_| (0..d).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect())
            .collect();
        let kind = [NormKind::P1, NormKind::P2, NormKind::PInf][case % 3];
        let exact = rad_norm(&xs, kind, RadMode::Exhaustive).unwrap().value;
        let mc = rad_norm(&xs, kind, RadMode::MonteCarlo { samples: 100_000, seed: case as u64 }).unwrap();
        let RadMethod::MonteCarlo { stderr, .. } = mc.method else { panic!("expected Monte Carlo") };
        assert!((mc.value - exact).abs() <= 3.0 * stderr, "case {case}: {} vs {exact} (stderr {stderr})", mc.value);
    }
}

#[test]
fn ritt_classification_carries_over_to_the_sectorial_side() {
    let mut r = rng(21);
    for k in 0..20 {
        let n = k % 3 + 1;
        let t = random_ritt(&mut r, n, 4, 0.4 * stolz_top(n));
        let grid = default_grid(RegionKind::NStolz, n);
        let ritt = classify_ritt(&t, n, &grid, 8).unwrap();
        assert!(ritt.admissible);
        let sect = classify_sectorial(&t.one_minus(), n, &grid, 8).unwrap();
        assert!(sect.admissible, "case {k}");
        assert!(sect.type_angle.value() <= ritt.type_angle.value());
    }
}

#[test]
fn rational_functions_match_direct_substitution_without_spectral_data() {
    // Gershgorin-enclosed operators: diagonally dominant around points of B_{n,α}.
    let mut r = rng(31);
    for k in 0..9 {
        let n = k % 3 + 1;
        let (alpha, gamma) = (0.3 * stolz_top(n), 0.8 * stolz_top(n));
        let d = 3;
        let centers: Vec<Complex64> = (0..d).map(|_| stolz_point(&mut r, n, 0.5 * alpha, 0.3)).collect();
        let m = CMatrix::from_fn(d, d, |i, j| if i == j { centers[i] } else { c(r.gen_range(-1.0..1.0), 0.0) * 1e-3 });
        let t = Operator::new(m, NormKind::P2).unwrap();
        let grid = default_grid(RegionKind::NStolz, n);
        let report = classify_ritt(&t, n, &grid, 8).unwrap();
        assert!(report.admissible);
        // ψ(λ) = (λ + 0.5)/(λ − 4): poles well outside the closed domain.
        let psi = HoloFn::rational(Poly::from_real(&[0.5, 1.0]), Poly::from_real(&[-4.0, 1.0])).unwrap();
        let params = CalculusParams::new(n, report.type_angle.value().max(alpha), gamma, 1e-11).unwrap();
        let got = apply_extended(&t, &psi, &params).unwrap();
        let want = psi.substitute(t.matrix()).unwrap();
        assert!(got.operator.matrix().max_abs_diff(&want) < 1e-7, "case {k}");
    }
}

#[test]
fn pole_inside_the_domain_is_rejected() {
    let t = Operator::diagonal(&[c(0.5, 0.0)], NormKind::P2);
    let params = CalculusParams::new(1, 0.2, 1.2, 1e-8).unwrap();
    let psi = HoloFn::rational(Poly::from_real(&[1.0]), Poly::from_real(&[-0.3, 1.0])).unwrap();
    assert!(matches!(apply_extended(&t, &psi, &params), Err(Error::Unbounded(_))));
    let f = HoloFn::rational(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[-0.3, 1.0])).unwrap();
    assert!(matches!(apply_auto(&t, &f, RegionKind::NSector, &params), Err(Error::Unbounded(_))));
}

#[test]
fn sectorial_calculus_handles_the_vertex_and_zero_function() {
    let a = Operator::diagonal(&[c(0.0, 0.0), c(0.4, 0.1)], NormKind::P2);
    let f = library::sector_bump(1, 1, 1.5).unwrap();
    let params = CalculusParams::new(1, 0.3, 1.5, 1e-10).unwrap();
    let got = apply_sectorial(&a, &f, &params).unwrap();
    let want = CMatrix::from_diag(&[c(0.0, 0.0), f.eval(c(0.4, 0.1)).unwrap()]);
    assert!(got.operator.matrix().max_abs_diff(&want) < 1e-8);
    let zero = HoloFn::constant(c(0.0, 0.0));
    let got = apply_auto(&a, &zero, RegionKind::NSector, &params).unwrap();
    assert!(got.operator.matrix().max_abs() <= 1e-10);
}

#[test]
fn spectrum_outside_the_contour_is_a_precondition_error() {
    let t = Operator::diagonal(&[c(0.5, 0.0), c(-0.5, 0.0)], NormKind::P2);
    let phi = library::stolz_factor(1, &HoloFn::constant(c(1.0, 0.0)), Region::n_stolz(1, 1.2).unwrap()).unwrap();
    let params = CalculusParams::new(1, 0.1, 1.2, 1e-8).unwrap().with_beta(0.2).unwrap();
    assert!(matches!(apply_ritt(&t, &phi, &params), Err(Error::Precondition(_))));
}
