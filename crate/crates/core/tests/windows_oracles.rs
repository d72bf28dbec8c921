mod common;

use common::{lattice_opt_1d, phase_anchors, quadratic_opt, rng, total_cost, walk_instance};
use proptest::prelude::*;
use rand::Rng;
use soco_core::algorithms::{run_sfhc, AnchorSet};
use soco_core::bounds::anchor_extra_cost;
use soco_core::families::{make_strongly_convex, FamilyVariant};
use soco_core::model::{NormOrder, Point};
use soco_core::oracle::{constrained_offline, offline_optimal, offline_optimal_grid};
use soco_core::window::{solve_descent, solve_grid_dp, solve_quadratic_chain, DescentOptions, GridSpec, Solver, WindowProblem};

#[test]
fn exact_grid_and_descent_agree_on_convex_windows() {
    let mut g = rng(11);
    let grid = GridSpec::new(-6.0, 6.0, 241).unwrap();
    for _ in 0..50 {
        let m = g.gen_range(0.5..3.0);
        let len = g.gen_range(2..6usize);
        let path: Vec<Point> = (0..len).map(|_| Point::scalar(g.gen_range(-3.0..3.0))).collect();
        let frag = make_strongly_convex(m, &path).unwrap();
        let left = Point::scalar(g.gen_range(-3.0..3.0));
        let right = if g.gen_bool(0.5) { Some(path[len - 1].clone()) } else { None };
        let p = WindowProblem::new(0, len, left, right, &frag.hitting, &frag.movement).unwrap();
        let exact = solve_quadratic_chain(&p).unwrap().objective;
        let lattice = solve_grid_dp(&p, &grid).unwrap().objective;
        let descent = solve_descent(&p, &DescentOptions::default()).unwrap().objective;
        // Lipschitz constant of the window objective over the box, per free point.
        let lip = (m + 2.0) * 12.0;
        assert!(lattice >= exact - 1e-12);
        assert!(lattice - exact <= grid.spacing() * lip * len as f64, "{lattice} vs {exact}");
        assert!((descent - exact).abs() <= 1e-5, "{descent} vs {exact}");
    }
}

#[test]
fn removing_the_right_anchor_never_hurts() {
    let mut g = rng(12);
    for _ in 0..30 {
        let len = g.gen_range(2..6usize);
        let path: Vec<Point> = (0..len).map(|_| Point::scalar(g.gen_range(-3.0..3.0))).collect();
        let frag = make_strongly_convex(1.0, &path).unwrap();
        let left = Point::scalar(0.0);
        let anchored = WindowProblem::new(0, len, left.clone(), Some(path[len - 1].clone()), &frag.hitting, &frag.movement)
            .unwrap();
        let free = WindowProblem::new(0, len, left, None, &frag.hitting, &frag.movement).unwrap();
        let a = solve_quadratic_chain(&anchored).unwrap();
        let f = solve_quadratic_chain(&free).unwrap();
        assert!(f.objective <= a.objective + 1e-12);
        assert!((anchored.objective(&a.free_points) - a.objective).abs() <= 1e-9 * a.objective.max(1.0));
    }
}

#[test]
fn sfhc_pins_anchors_bitwise() {
    let fam = FamilyVariant::Polyhedral {
        alpha: 1.0,
        norm: NormOrder::L2,
    };
    let grid = GridSpec::new(-10.0, 10.0, 81).unwrap();
    for seed in 0..10 {
        let inst = walk_instance(&fam, 25, vec![0.0], 1.0, Some(&grid), seed);
        for (w, h) in [(3, 0), (4, 2), (5, 4)] {
            let tr = run_sfhc(&inst, w, h, &Solver::grid(grid)).unwrap();
            for (t, pinned) in phase_anchors(25, w, h).into_iter().enumerate() {
                if pinned {
                    assert_eq!(tr.point(t + 1), inst.cost(t + 1).minimizer());
                }
            }
        }
    }
    let quad = walk_instance(&FamilyVariant::StronglyConvex { m: 2.0 }, 25, vec![0.0, 0.0], 1.0, None, 1);
    let tr = run_sfhc(&quad, 4, 1, &Solver::Auto).unwrap();
    for t in (1..=25).filter(|t| t % 4 == 1) {
        assert_eq!(tr.point(t), quad.cost(t).minimizer());
    }
}

#[test]
fn subroutine_extra_cost_is_bounded_by_anchor_terms() {
    let m = 2.0;
    let (eta, lambda) = (2.0, m / 2.0);
    for seed in 0..20 {
        let inst = walk_instance(&FamilyVariant::StronglyConvex { m }, 30, vec![0.0], 1.5, None, 40 + seed);
        let opt = quadratic_opt(m, inst.start(), &inst.minimizers(), &[false; 30]);
        let (h_star, m_star) = common::breakdown(&inst, &opt);
        let opt_cost = total_cost(&inst, &opt);
        for w in [2usize, 3, 5] {
            for h in 0..w {
                let anchors: Vec<usize> = (1..=30).filter(|t| t % w == h).collect();
                let extra = anchor_extra_cost(eta, lambda, &anchors, &h_star, &m_star);
                let cost = run_sfhc(&inst, w, h, &Solver::Auto).unwrap().total();
                assert!(cost - opt_cost <= extra + 1e-9 * opt_cost, "w={w} h={h}");
            }
        }
    }
}

#[test]
fn convex_average_is_no_worse_than_subroutine_mean() {
    for seed in 0..20 {
        let inst = walk_instance(&FamilyVariant::StronglyConvex { m: 1.0 }, 20, vec![0.0, 0.0], 1.0, None, seed);
        for w in [2usize, 4] {
            let run = soco_core::algorithms::run_dsfhc_detailed(&inst, w, &Solver::Auto, Default::default()).unwrap();
            assert!(run.trajectory.total() <= run.subroutine_mean() + 1e-8);
        }
    }
}

#[test]
fn constrained_optimum_dominates_free_optimum() {
    let mut g = rng(13);
    for seed in 0..20 {
        let inst = walk_instance(&FamilyVariant::StronglyConvex { m: 2.0 }, 15, vec![0.0], 1.0, None, seed);
        let opt = offline_optimal(&inst, None).unwrap().cost;
        let mut members = vec![0usize];
        while let Some(&last) = members.last() {
            let next = last + g.gen_range(1..5);
            if next > 15 {
                break;
            }
            members.push(next);
        }
        let set = AnchorSet::explicit_relaxed(members).unwrap();
        let c = constrained_offline(&inst, &set, &Solver::Auto).unwrap();
        assert!(c.cost >= opt - 1e-12);
    }
}

#[test]
fn grid_oracle_beats_random_lattice_paths_and_matches_reference() {
    let grid = GridSpec::new(-5.0, 5.0, 101).unwrap();
    let axis = grid.axis();
    let fam = FamilyVariant::Ripple { m: 1.0, eps: 0.5, k: 4.0 };
    let mut g = rng(14);
    for seed in 0..5 {
        let inst = walk_instance(&fam, 10, vec![0.0], 0.7, Some(&grid), seed);
        let r = offline_optimal_grid(&inst, &grid).unwrap();
        assert!((total_cost(&inst, r.trajectory.points()) - r.cost).abs() <= 1e-9 * r.cost.max(1.0));
        let (reference, _) = lattice_opt_1d(&inst, &axis, &[false; 10]);
        assert!((reference - r.cost).abs() <= 1e-9 * r.cost.max(1.0));
        for _ in 0..1000 {
            let xs: Vec<Point> = (0..10).map(|_| Point::scalar(axis[g.gen_range(0..axis.len())])).collect();
            assert!(total_cost(&inst, &xs) >= r.cost - 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn window_objective_reproduces_solution(
        vs in prop::collection::vec(-4.0f64..4.0, 2..6),
        x0 in -4.0f64..4.0,
        m in 0.2f64..4.0,
    ) {
        let path: Vec<Point> = vs.iter().map(|&v| Point::scalar(v)).collect();
        let frag = make_strongly_convex(m, &path).unwrap();
        let n = path.len();
        let p = WindowProblem::new(0, n, Point::scalar(x0), Some(path[n - 1].clone()), &frag.hitting, &frag.movement).unwrap();
        let s = solve_quadratic_chain(&p).unwrap();
        prop_assert!((p.objective(&s.free_points) - s.objective).abs() <= 1e-9 * s.objective.max(1.0));
        let pinned: Vec<bool> = (0..n).map(|i| i + 1 == n).collect();
        let inst = frag.into_instance(Point::scalar(x0)).unwrap();
        let reference = total_cost(&inst, &quadratic_opt(m, inst.start(), &inst.minimizers(), &pinned));
        prop_assert!((reference - s.objective).abs() <= 1e-9 * s.objective.max(1.0));
    }
}
