use std::f64::consts::PI;
use std::sync::Arc;

use fbh_core::basis::{make_quadrature, mu_distance, Domain, EigenBasis, MeasureTag, SampledFunction, StepFunction};
use fbh_core::hardy::{
    atom_constant, atomic_decompose, build_partition, random_batch, validate_atom, Family, Source, MAX_SCALE, ZETA,
};
use fbh_core::kernels::{heat_kernel_halfline, poisson_kernel_halfline, SeriesKernels};
use fbh_core::maximal::{maximal_function, KernelKind, TimeGrid};
use fbh_core::specfun::{bessel_j, bessel_j_ratio_derivative, bessel_zeros, Order};
use proptest::prelude::*;

fn order(nu: f64) -> Order {
    Order::new(nu).unwrap()
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::I), Just(Family::J)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zeros_are_roots_interlace_and_space_by_pi(nu in -0.49f64..6.0) {
        let a = bessel_zeros(order(nu), 40).unwrap();
        let b = bessel_zeros(order(nu + 1.0), 40).unwrap();
        let (za, zb) = (a.zeros(), b.zeros());
        for k in 0..40 {
            prop_assert!(bessel_j(order(nu), za[k]).unwrap().abs() < 1e-12);
            prop_assert!(za[k] < zb[k]);
            if k + 1 < 40 {
                prop_assert!(zb[k] < za[k + 1]);
            }
            if k >= 19 && k + 1 < 40 {
                prop_assert!((za[k + 1] - za[k] - PI).abs() < 0.05);
            }
        }
    }

    #[test]
    fn ratio_derivative_matches_central_difference(nu in -0.49f64..5.0, x in 0.1f64..20.0) {
        let o = order(nu);
        let g = |x: f64| bessel_j(o, x).unwrap() * x.powf(-nu);
        let h = 1e-5;
        let fd = (g(x + h) - g(x - h)) / (2.0 * h);
        prop_assert!((bessel_j_ratio_derivative(o, x).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn half_order_matches_sine_forms(x in 1e-3f64..60.0, n in 1usize..50, y in 0.0f64..1.0) {
        let j = bessel_j(order(0.5), x).unwrap();
        prop_assert!((j - (2.0 / (PI * x)).sqrt() * x.sin()).abs() < 1e-12);
        let b = EigenBasis::new(order(0.5), 50).unwrap();
        prop_assert!((b.psi(n, y).unwrap() - 2f64.sqrt() * (n as f64 * PI * y).sin()).abs() < 1e-12);
    }

    #[test]
    fn mu_distance_is_a_metric(nu in -0.49f64..4.0, x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0) {
        let o = order(nu);
        let d = |a, b| mu_distance(o, a, b);
        prop_assert_eq!(d(x, y), d(y, x));
        prop_assert!(d(x, x) == 0.0);
        prop_assert!(d(x, z) <= (d(x, y) + d(y, z)) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn quadrature_grids_are_well_formed(nu in -0.49f64..4.0, n in 16usize..600, mu in any::<bool>()) {
        let tag = if mu { MeasureTag::Mu } else { MeasureTag::Lebesgue };
        let g = make_quadrature(Domain::UnitInterval, n, tag, order(nu)).unwrap();
        let xs = g.nodes();
        prop_assert!(xs[0] > 0.0 && *xs.last().unwrap() < 1.0);
        prop_assert!(xs.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(g.weights().iter().all(|&w| w > 0.0));
        let total: f64 = g.weights().iter().sum();
        let expect = if mu { 1.0 / (2.0 * nu + 2.0) } else { 1.0 };
        prop_assert!((total - expect).abs() < 1e-10);
    }

    #[test]
    fn cover_is_exact_and_enlargements_nest(fam in family(), x in 1e-9f64..(1.0 - 1e-9), depth in 0i32..30) {
        let hits = fam.indices(48).into_iter().filter(|&j| fam.interval(j).unwrap().contains(x)).count();
        prop_assert_eq!(hits, 1);
        let j = match fam {
            Family::I => depth,
            Family::J if x < 0.5 => -(depth + 1),
            Family::J => depth + 1,
        };
        let i = fam.interval(j).unwrap();
        let (s1, s2, s3) = (i.star(), i.stars(2), i.stars(3));
        prop_assert!(s1.contains_interval(&i) && s2.contains_interval(&s1) && s3.contains_interval(&s2));
        // endpoints near 1 round at the spacing of doubles there
        prop_assert!(s1.len() <= (1.0 + ZETA) * i.len() + 4.0 * f64::EPSILON);
    }

    #[test]
    fn partition_of_unity_sums_to_one(fam in family(), x in 1e-9f64..(1.0 - 1e-9)) {
        let p = build_partition(fam);
        let act = p.active(x).unwrap();
        let s: f64 = act.iter().map(|(_, v)| v).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        prop_assert!(act.len() <= 2);
        for (j, v) in act {
            prop_assert!((0.0..=1.0 + 1e-15).contains(&v));
            prop_assert_eq!(v, p.eta(j, x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernels_are_positive_and_symmetric(
        nu in prop_oneof![Just(0.0), Just(0.5), Just(1.7)],
        t in 0.05f64..2.0,
        x in 0.01f64..0.99,
        y in 0.01f64..0.99,
    ) {
        let b = EigenBasis::new(order(nu), 600).unwrap();
        let k = SeriesKernels::new(&b);
        for (p, q) in [
            (k.poisson_kernel_l(t, x, y).unwrap().value, k.poisson_kernel_l(t, y, x).unwrap().value),
            (k.poisson_kernel_lsq(t, x, y).unwrap().value, k.poisson_kernel_lsq(t, y, x).unwrap().value),
            (k.heat_kernel_l(t, x, y).unwrap().value, k.heat_kernel_l(t, y, x).unwrap().value),
        ] {
            prop_assert!(p > 0.0);
            prop_assert!((p - q).abs() <= 1e-9 * p.abs().max(1.0));
        }
        let o = order(nu);
        prop_assert!(heat_kernel_halfline(o, t, 3.0 * x, 3.0 * y).unwrap() > 0.0);
        prop_assert!(poisson_kernel_halfline(o, t, 3.0 * x, 3.0 * y).unwrap() > 0.0);
    }

    #[test]
    fn refining_the_time_grid_never_lowers_the_maximal_function(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..6),
        bessel in any::<bool>(),
    ) {
        let o = order(0.5);
        let b = EigenBasis::new(o, 200).unwrap();
        let kind = if bessel { KernelKind::BesselPoisson } else { KernelKind::Poisson };
        let g = Arc::new(make_quadrature(Domain::UnitInterval, 256, kind.tag(), o).unwrap());
        let f = SampledFunction::from_fn(g, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * if bessel { b.phi(n + 1, x) } else { b.psi(n + 1, x) }.unwrap())
                .sum()
        });
        let grid = TimeGrid::standard();
        let coarse = maximal_function(&b, kind, &f, &grid).unwrap().function();
        let fine = maximal_function(&b, kind, &f, &grid.refined()).unwrap().function();
        for (c, r) in coarse.values().iter().zip(fine.values()) {
            prop_assert!(*r >= *c - 1e-13);
        }
        let (l0, l1) = (coarse.l1_norm(), fine.l1_norm());
        prop_assert!(l1 - l0 < 0.01 * l0);
    }

    #[test]
    fn random_atoms_are_valid(seed in any::<u64>(), fam in family(), nu in -0.4f64..3.0) {
        for r in random_batch(seed, 10, fam, order(nu), MAX_SCALE).unwrap() {
            let rep = validate_atom(&r.atom);
            prop_assert!(rep.valid, "{:?}", rep);
            prop_assert!((rep.constant - 1.0).abs() < 1e-9);
        }
    }
}

/// Step function with `n` pieces on `[a, b]`.
fn step_strategy() -> impl Strategy<Value = StepFunction> {
    (0.02f64..0.6, 0.05f64..0.35, prop::collection::vec(-2.0f64..2.0, 1..5)).prop_map(|(a, w, h)| {
        let b = (a + w).min(0.98);
        let n = h.len();
        let breaks = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        StepFunction::new(breaks, h).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn decomposition_is_homogeneous_and_reconstructs(
        f in step_strategy(),
        c in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
        fam in family(),
    ) {
        let o = order(0.5);
        let d = atomic_decompose(&Source::Step(f.clone()), fam, o, 6).unwrap();
        let e = atomic_decompose(&Source::Step(f.scaled(c)), fam, o, 6).unwrap();
        prop_assert!(d.reconstruction_l1_error < 1e-6);
        prop_assert_eq!(d.atoms.len(), e.atoms.len());
        for (x, y) in d.coefficients.iter().zip(&e.coefficients) {
            prop_assert!((c * x - y).abs() <= 1e-9 * (c * x).abs().max(1e-12));
        }
        let (constant, valid) = atom_constant(&d);
        prop_assert!(valid && constant <= 1.0 + 1e-9);
    }
}
