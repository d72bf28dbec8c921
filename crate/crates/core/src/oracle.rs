//! Offline optima: lattice DP, the exact quadratic chain, and the
//! anchor-constrained optimum.

use serde::{Deserialize, Serialize};

use crate::algorithms::{solve_cuts, AnchorSet};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::model::{evaluate_total_cost, Instance, Trajectory};
use crate::window::{
    lattice_dp, quadratic_chain_points, quadratic_instance, GridSpec, Solver, SolverTag,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub cost: f64,
    pub trajectory: Trajectory,
    pub method: SolverTag,
    pub resolution: Option<f64>,
}

/// Exact minimum over the lattice by forward DP with backpointers.
pub fn offline_optimal_grid(instance: &Instance, grid: &GridSpec) -> Result<OracleResult> {
    let lattice = grid.lattice(instance.dim())?;
    for t in 0..=instance.horizon() {
        if !grid.contains(instance.anchor(t)) {
            return Err(Error::input(format!(
                "grid [{}, {}] does not cover {} {:?}",
                grid.lo,
                grid.hi,
                if t == 0 { "x_0".to_string() } else { format!("v_{t}") },
                instance.anchor(t).coords()
            )));
        }
    }
    let idx = lattice_dp(
        &lattice,
        instance.start(),
        None,
        instance.hitting(),
        instance.movement(),
    );
    let points: Vec<_> = idx.into_iter().map(|j| lattice[j].clone()).collect();
    let trajectory = evaluate_total_cost(instance, &points)?;
    Ok(OracleResult {
        cost: trajectory.total(),
        trajectory,
        method: SolverTag::GridDp,
        resolution: Some(grid.spacing()),
    })
}

/// Closed-form optimum for quadratic costs with `0.5 ||.||^2` movement.
pub fn offline_optimal_quadratic(instance: &Instance) -> Result<OracleResult> {
    if !quadratic_instance(instance) {
        return Err(Error::unsupported(
            "exact oracle needs quadratic hitting costs with sq_l2_half movement",
        ));
    }
    let points = quadratic_chain_points(instance.start(), None, instance.hitting());
    let trajectory = evaluate_total_cost(instance, &points)?;
    Ok(OracleResult {
        cost: trajectory.total(),
        trajectory,
        method: SolverTag::ExactQuadratic,
        resolution: None,
    })
}

/// Exact oracle when applicable, otherwise the lattice DP on `grid` (or the
/// instance's covering grid).
pub fn offline_optimal(instance: &Instance, grid: Option<&GridSpec>) -> Result<OracleResult> {
    if quadratic_instance(instance) && grid.is_none() {
        return offline_optimal_quadratic(instance);
    }
    let g = grid.copied().unwrap_or_else(|| GridSpec::for_instance(instance));
    offline_optimal_grid(instance, &g)
}

/// Optimum subject to `x_s = v_s` for every anchor `s` in `[1, T]`, solved
/// as independent windows between consecutive anchors.
pub fn constrained_offline(
    instance: &Instance,
    anchors: &AnchorSet,
    solver: &Solver,
) -> Result<OracleResult> {
    let prepared = solver.prepare(instance);
    let cuts = anchors.cuts(instance.horizon());
    let points = solve_cuts(
        instance.horizon(),
        instance.start(),
        instance.hitting(),
        instance.movement(),
        &cuts,
        &prepared,
        None,
        ExecPolicy::default(),
    )?;
    let trajectory = evaluate_total_cost(instance, &points)?;
    let resolution = prepared.resolution_for(instance);
    let method = match (resolution, solver) {
        (Some(_), _) => SolverTag::GridDp,
        (None, Solver::Descent { .. }) => SolverTag::Descent,
        (None, _) if quadratic_instance(instance) => SolverTag::ExactQuadratic,
        _ => SolverTag::Descent,
    };
    Ok(OracleResult {
        cost: trajectory.total(),
        trajectory,
        method,
        resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::run_greedy;
    use crate::families::make_strongly_convex;
    use crate::model::{CostShape, HittingCost, MovementCost, Point};

    fn quad(vs: &[f64], x0: f64) -> Instance {
        let path: Vec<Point> = vs.iter().map(|&v| Point::scalar(v)).collect();
        make_strongly_convex(2.0, &path)
            .unwrap()
            .into_instance(Point::scalar(x0))
            .unwrap()
    }

    #[test]
    fn single_step_closed_form() {
        let inst = quad(&[3.0], 1.0);
        let r = offline_optimal_quadratic(&inst).unwrap();
        // (m v + x0) / (m + 1) with m = 2.
        assert!((r.trajectory.point(1)[0] - 7.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_path_costs_nothing() {
        let inst = quad(&[1.5; 5], 1.5);
        assert_eq!(offline_optimal_quadratic(&inst).unwrap().cost, 0.0);
        let g = offline_optimal_grid(&inst, &GridSpec::new(0.0, 3.0, 31).unwrap()).unwrap();
        assert_eq!(g.cost, 0.0);
    }

    #[test]
    fn grid_matches_exact_quadratic() {
        let inst = quad(&[1.0, 1.0], 0.0);
        let grid = GridSpec::for_instance(&inst);
        let g = offline_optimal_grid(&inst, &grid).unwrap();
        let e = offline_optimal_quadratic(&inst).unwrap();
        assert!(g.cost >= e.cost - 1e-12);
        assert!(g.cost - e.cost <= 2.0 * grid.spacing() * 2.0);
    }

    #[test]
    fn interval_chasing_shortest_path() {
        let boxes = [(1.0, 2.0), (0.0, 0.5)];
        let hitting = boxes
            .iter()
            .map(|&(lo, hi)| {
                HittingCost::new(
                    CostShape::Indicator {
                        lo: vec![lo],
                        hi: vec![hi],
                        penalty: 1e6,
                    },
                    Point::scalar((lo + hi) / 2.0),
                )
                .unwrap()
            })
            .collect();
        let inst = Instance::new(Point::scalar(0.0), hitting, MovementCost::NormL1, None).unwrap();
        let r = offline_optimal_grid(&inst, &GridSpec::new(-1.0, 3.0, 81).unwrap()).unwrap();
        assert!((r.cost - 1.5).abs() < 1e-9);
    }

    #[test]
    fn anchor_extremes() {
        let inst = quad(&[0.4, -1.2, 2.0, 0.7], 0.0);
        let all = AnchorSet::explicit_relaxed((0..=4).collect()).unwrap();
        let c = constrained_offline(&inst, &all, &Solver::Auto).unwrap();
        assert_eq!(c.cost, run_greedy(&inst).unwrap().total());
        let none = AnchorSet::explicit_relaxed(vec![0]).unwrap();
        let c = constrained_offline(&inst, &none, &Solver::Auto).unwrap();
        let opt = offline_optimal_quadratic(&inst).unwrap();
        assert!((c.cost - opt.cost).abs() <= 1e-12 * opt.cost.max(1.0));
    }

    #[test]
    fn oversized_grid_has_hint() {
        let path = vec![Point::new(vec![0.0, 0.0]).unwrap()];
        let inst = make_strongly_convex(1.0, &path)
            .unwrap()
            .into_instance(Point::new(vec![0.0, 0.0]).unwrap())
            .unwrap();
        let err = offline_optimal_grid(&inst, &GridSpec::new(-1.0, 1.0, 2000).unwrap()).unwrap_err();
        assert!(err.to_string().contains("reduce n"));
    }
}
