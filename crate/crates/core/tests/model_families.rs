mod common;

use common::{rng, total_cost, walk_instance};
use proptest::prelude::*;
use rand::Rng;
use soco_core::algorithms::{run_afhc, run_dsfhc, run_greedy, run_rsfhc_b, run_sfhc};
use soco_core::families::{estimate_condition_constants, make_glb, FamilyVariant};
use soco_core::model::{evaluate_total_cost, MovementCost, NormOrder, Point};
use soco_core::window::{GridSpec, Solver};

fn families() -> Vec<(FamilyVariant, GridSpec, f64)> {
    vec![
        (FamilyVariant::StronglyConvex { m: 1.5 }, GridSpec::new(-10.0, 10.0, 101).unwrap(), 0.0),
        (
            FamilyVariant::Polyhedral {
                alpha: 0.7,
                norm: NormOrder::L1,
            },
            GridSpec::new(-10.0, 10.0, 101).unwrap(),
            0.0,
        ),
        (
            FamilyVariant::Glb {
                e0: vec![0.5],
                beta: vec![1.0],
                mu: vec![2.0],
            },
            GridSpec::new(0.0, 10.0, 101).unwrap(),
            3.0,
        ),
        (FamilyVariant::Ripple { m: 1.0, eps: 1.0, k: 3.0 }, GridSpec::new(-6.0, 6.0, 121).unwrap(), 0.0),
    ]
}

fn movements() -> Vec<MovementCost> {
    vec![
        MovementCost::NormL1,
        MovementCost::NormL2,
        MovementCost::NormLinf,
        MovementCost::SqL2Half,
        MovementCost::RectifiedLinear { beta: vec![1.0, 2.0, 0.5] },
    ]
}

#[test]
fn movement_of_a_point_to_itself_is_free() {
    let mut g = rng(1);
    for c in movements() {
        for _ in 0..100 {
            let p = Point::from((0..3).map(|_| g.gen_range(-50.0..50.0)).collect::<Vec<f64>>());
            assert_eq!(c.eval(&p, &p), 0.0, "{}", c.kind_name());
        }
    }
}

#[test]
fn hitting_costs_vanish_at_minimizers_and_are_nonnegative() {
    let mut g = rng(2);
    for (fam, _, start) in families() {
        let inst = walk_instance(&fam, 20, vec![start], 1.0, None, 3);
        for f in inst.hitting() {
            if matches!(fam, FamilyVariant::Glb { .. }) {
                // The linear floor e0 . x is part of the cost.
                assert_eq!(f.eval(f.minimizer()), 0.5 * f.minimizer()[0]);
            } else {
                assert_eq!(f.eval(f.minimizer()), 0.0, "{}", fam.name());
            }
        }
        for _ in 0..10_000 {
            let t = g.gen_range(1..=20);
            let x = Point::scalar(g.gen_range(-20.0..20.0));
            assert!(inst.cost(t).eval(&x) >= 0.0);
        }
    }
}

#[test]
fn order_of_growth_holds_pointwise() {
    let mut g = rng(4);
    for (fam, _, start) in families() {
        let inst = walk_instance(&fam, 20, vec![start], 1.0, None, 5);
        let lambda = inst.lambda().unwrap();
        let c = inst.movement();
        for _ in 0..10_000 {
            let t = g.gen_range(1..=20);
            let f = inst.cost(t);
            let v = f.minimizer();
            let lo = if fam.nonnegative() { 0.0 } else { -20.0 };
            let x = Point::scalar(g.gen_range(lo..20.0));
            let rhs = lambda * (c.eval(&x, v) + c.eval(v, &x));
            assert!(f.eval(&x) >= rhs - 1e-9 * rhs.max(1.0), "{} at {x:?}", fam.name());
        }
    }
}

#[test]
fn glb_dominates_linear_floor() {
    let mut g = rng(6);
    let path: Vec<Point> = (0..10).map(|_| Point::from(vec![g.gen_range(0.0..5.0), g.gen_range(0.0..5.0)])).collect();
    let frag = make_glb(&[0.5, 1.0], &[1.0, 1.0], &[2.0, 3.0], &path).unwrap();
    for f in &frag.hitting {
        for _ in 0..1000 {
            let x = Point::from(vec![g.gen_range(0.0..10.0), g.gen_range(0.0..10.0)]);
            assert!(f.eval(&x) >= 0.5 * x[0] + 1.0 * x[1] - 1e-12);
        }
    }
}

#[test]
fn sampled_triangle_constant_never_exceeds_declared() {
    for (i, (fam, _, start)) in families().into_iter().enumerate() {
        let inst = walk_instance(&fam, 10, vec![start], 1.0, None, 7);
        let est = estimate_condition_constants(&inst, 5.0, 3000, &mut rng(i as u64)).unwrap();
        assert!(est.eta_hat <= inst.eta() + 1e-6, "{}", fam.name());
        assert!(est.lambda_hat >= inst.lambda().unwrap() - 1e-6, "{}", fam.name());
    }
}

#[test]
fn trajectories_recompute_to_their_totals() {
    for (fam, grid, start) in families() {
        let inst = walk_instance(&fam, 16, vec![start], 1.0, Some(&grid), 8);
        let solver = Solver::grid(grid);
        let mut runs = vec![
            run_greedy(&inst).unwrap(),
            run_sfhc(&inst, 3, 1, &solver).unwrap(),
            run_dsfhc(&inst, 3, &solver).unwrap(),
            run_afhc(&inst, 3, &solver).unwrap(),
        ];
        runs.push(run_rsfhc_b(&inst, 5, &mut rng(9), &solver).unwrap().trajectory);
        for tr in runs {
            let again = evaluate_total_cost(&inst, tr.points()).unwrap();
            assert!((again.total() - tr.total()).abs() <= 1e-9 * tr.total().max(1.0));
            assert!((total_cost(&inst, tr.points()) - tr.total()).abs() <= 1e-9 * tr.total().max(1.0));
            assert!(tr.hitting().iter().chain(tr.movement()).all(|&c| c >= 0.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn movement_costs_are_nonnegative(
        a in prop::collection::vec(-100.0f64..100.0, 3),
        b in prop::collection::vec(-100.0f64..100.0, 3),
    ) {
        let (x, y) = (Point::from(a), Point::from(b));
        for c in movements() {
            prop_assert!(c.eval(&x, &y) >= 0.0);
        }
    }

    #[test]
    fn norm_triangle_inequality(
        a in prop::collection::vec(-10.0f64..10.0, 2),
        b in prop::collection::vec(-10.0f64..10.0, 2),
        c in prop::collection::vec(-10.0f64..10.0, 2),
    ) {
        let (x, y, z) = (Point::from(a), Point::from(b), Point::from(c));
        for m in movements().into_iter().take(3) {
            prop_assert!(m.eval(&x, &z) <= m.eval(&x, &y) + m.eval(&y, &z) + 1e-12);
        }
        let sq = MovementCost::SqL2Half;
        prop_assert!(sq.eval(&x, &z) <= 2.0 * (sq.eval(&x, &y) + sq.eval(&y, &z)) + 1e-12);
    }

    #[test]
    fn quadratic_totals_match_recomputation(seed in 0u64..1000, sigma in 0.0f64..3.0) {
        let inst = walk_instance(&FamilyVariant::StronglyConvex { m: 2.0 }, 12, vec![0.0, 1.0], sigma, None, seed);
        let tr = run_dsfhc(&inst, 4, &Solver::Auto).unwrap();
        prop_assert!((total_cost(&inst, tr.points()) - tr.total()).abs() <= 1e-9 * tr.total().max(1.0));
    }
}
