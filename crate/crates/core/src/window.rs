//! Window subproblems `g_{tau1,tau2}` and their solvers.
//!
//! A window fixes `y_{tau1}` to a left anchor and, when `tau2 <= T`, fixes
//! `y_{tau2} = v_{tau2}`; the points strictly between are free. When
//! `tau2 > T` the window is truncated at `T` and every point after `tau1` is
//! free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CostShape, HittingCost, Instance, MovementCost, Point};

/// Lattice size limit shared by the window solver and the offline oracle.
pub const MAX_LATTICE_POINTS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct WindowProblem<'a> {
    tau1: usize,
    tau2: usize,
    left: Point,
    right: Option<Point>,
    costs: &'a [HittingCost],
    movement: &'a MovementCost,
}

impl<'a> WindowProblem<'a> {
    /// General constructor. `costs` covers timesteps `tau1+1 ..` up to the
    /// right anchor (inclusive) when `right` is set, otherwise every free
    /// timestep.
    pub fn new(
        tau1: usize,
        tau2: usize,
        left: Point,
        right: Option<Point>,
        costs: &'a [HittingCost],
        movement: &'a MovementCost,
    ) -> Result<Self> {
        if tau1 >= tau2 {
            return Err(Error::input(format!(
                "window needs tau1 < tau2, got ({tau1}, {tau2})"
            )));
        }
        if right.is_some() && costs.len() != tau2 - tau1 {
            return Err(Error::input(format!(
                "anchored window ({tau1}, {tau2}) needs {} costs, got {}",
                tau2 - tau1,
                costs.len()
            )));
        }
        if right.is_none() && costs.len() > tau2 - tau1 {
            return Err(Error::input("truncated window has too many costs"));
        }
        let d = left.dim();
        if costs.iter().any(|f| f.dim() != d) || right.as_ref().is_some_and(|r| r.dim() != d) {
            return Err(Error::input("window dimension mismatch"));
        }
        Ok(WindowProblem {
            tau1,
            tau2,
            left,
            right,
            costs,
            movement,
        })
    }

    /// Window `(tau1, tau2)` of a full instance. The left anchor is
    /// `v_{tau1}` (the start when `tau1 = 0`) unless overridden.
    pub fn build(
        instance: &'a Instance,
        tau1: usize,
        tau2: usize,
        left_override: Option<Point>,
    ) -> Result<Self> {
        build_window_from(
            instance.horizon(),
            instance.start(),
            instance.hitting(),
            instance.movement(),
            tau1,
            tau2,
            left_override,
        )
    }

    /// An unanchored tail window starting from `left` at time `tau` over
    /// `costs` (timesteps `tau+1 ..= tau+costs.len()`).
    pub fn free_tail(
        tau: usize,
        left: Point,
        costs: &'a [HittingCost],
        movement: &'a MovementCost,
    ) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::input("tail window needs at least one cost"));
        }
        WindowProblem::new(tau, tau + costs.len(), left, None, costs, movement)
    }

    pub fn tau1(&self) -> usize {
        self.tau1
    }

    pub fn tau2(&self) -> usize {
        self.tau2
    }

    pub fn left(&self) -> &Point {
        &self.left
    }

    pub fn right(&self) -> Option<&Point> {
        self.right.as_ref()
    }

    pub fn costs(&self) -> &[HittingCost] {
        self.costs
    }

    pub fn movement(&self) -> &MovementCost {
        self.movement
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    pub fn free_count(&self) -> usize {
        match self.right {
            Some(_) => self.costs.len() - 1,
            None => self.costs.len(),
        }
    }

    /// Costs of the free timesteps.
    pub fn free_costs(&self) -> &[HittingCost] {
        &self.costs[..self.free_count()]
    }

    /// `g` at the given free assignment.
    pub fn objective(&self, free: &[Point]) -> f64 {
        debug_assert_eq!(free.len(), self.free_count());
        let mut total = 0.0;
        let mut prev = &self.left;
        for (y, f) in free.iter().zip(self.costs) {
            total += f.eval(y) + self.movement.eval(y, prev);
            prev = y;
        }
        if let Some(r) = &self.right {
            total += self.costs[self.costs.len() - 1].eval(r) + self.movement.eval(r, prev);
        }
        total
    }

    fn failure(&self, reason: impl Into<String>) -> Error {
        Error::SolverFailure {
            tau1: self.tau1,
            tau2: self.tau2,
            reason: reason.into(),
        }
    }
}

/// Window `(tau1, tau2)` from a revealed prefix of hitting costs. Reading
/// past the prefix is reported as a causality error.
pub fn build_window_from<'a>(
    horizon: usize,
    start: &Point,
    revealed: &'a [HittingCost],
    movement: &'a MovementCost,
    tau1: usize,
    tau2: usize,
    left_override: Option<Point>,
) -> Result<WindowProblem<'a>> {
    if tau1 >= tau2 {
        return Err(Error::input(format!(
            "window needs tau1 < tau2, got ({tau1}, {tau2})"
        )));
    }
    if tau1 > horizon {
        return Err(Error::input(format!("tau1 = {tau1} exceeds horizon {horizon}")));
    }
    let last = tau2.min(horizon);
    if revealed.len() < last {
        return Err(Error::NonCausal(format!(
            "window ({tau1}, {tau2}) reads f_{last} but only {} costs are revealed",
            revealed.len()
        )));
    }
    let left = match left_override {
        Some(p) => p,
        None if tau1 == 0 => start.clone(),
        None => revealed[tau1 - 1].minimizer().clone(),
    };
    let right = (tau2 <= horizon).then(|| revealed[tau2 - 1].minimizer().clone());
    WindowProblem::new(tau1, tau2, left, right, &revealed[tau1..last], movement)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    ExactQuadratic,
    GridDp,
    Descent,
}

impl SolverTag {
    pub fn name(self) -> &'static str {
        match self {
            SolverTag::ExactQuadratic => "exact_quadratic",
            SolverTag::GridDp => "grid_dp",
            SolverTag::Descent => "descent",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowSolution {
    pub free_points: Vec<Point>,
    pub objective: f64,
    pub solver_tag: SolverTag,
    pub iterations: usize,
    /// Grid spacing when a lattice solver ran.
    pub resolution: Option<f64>,
}

/// Uniform lattice `[lo, hi]^d` with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::param(format!("grid needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(Error::param("grid needs n >= 2 points per axis"));
        }
        Ok(GridSpec { lo, hi, n })
    }

    /// Default covering grid: `[min - 2 span, max + 2 span]`, 201 points.
    pub fn covering<'p>(points: impl IntoIterator<Item = &'p Point>) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in points {
            for &c in p.coords() {
                lo = lo.min(c);
                hi = hi.max(c);
            }
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 0.0;
        }
        let span = if hi > lo { hi - lo } else { 1.0 };
        GridSpec {
            lo: lo - 2.0 * span,
            hi: hi + 2.0 * span,
            n: 201,
        }
    }

    pub fn for_instance(instance: &Instance) -> Self {
        GridSpec::covering(
            std::iter::once(instance.start()).chain(instance.hitting().iter().map(|f| f.minimizer())),
        )
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn lattice_size(&self, dim: usize) -> Result<usize> {
        let size = (self.n as f64).powi(dim as i32);
        if size > MAX_LATTICE_POINTS as f64 {
            return Err(Error::GridTooLarge {
                points: size.min(usize::MAX as f64) as usize,
                limit: MAX_LATTICE_POINTS,
                hint: format!(
                    "reduce n to at most {} for d = {dim}",
                    (MAX_LATTICE_POINTS as f64).powf(1.0 / dim as f64).floor()
                ),
            });
        }
        Ok(size as usize)
    }

    /// Lattice points in row-major (first coordinate slowest) order, so the
    /// flat index order is lexicographic.
    pub fn lattice(&self, dim: usize) -> Result<Vec<Point>> {
        let size = self.lattice_size(dim)?;
        let axis = self.axis();
        let mut out = Vec::with_capacity(size);
        let mut idx = vec![0usize; dim];
        for _ in 0..size {
            out.push(Point::from(idx.iter().map(|&i| axis[i]).collect::<Vec<_>>()));
            for k in (0..dim).rev() {
                idx[k] += 1;
                if idx[k] < self.n {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(out)
    }

    pub fn contains(&self, p: &Point) -> bool {
        let slack = 1e-9 * (self.hi - self.lo);
        p.coords()
            .iter()
            .all(|&c| c >= self.lo - slack && c <= self.hi + slack)
    }

    /// Nearest lattice index along one axis.
    pub fn index_of(&self, c: f64) -> usize {
        let i = ((c - self.lo) / self.spacing()).round();
        i.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Nearest lattice point, computed with the lattice's own formula so the
    /// result is bitwise equal to a lattice coordinate.
    pub fn snap(&self, p: &Point) -> Point {
        Point::from(
            p.coords()
                .iter()
                .map(|&c| self.coord(self.index_of(c)))
                .collect::<Vec<_>>(),
        )
    }

    /// Euclidean distance from `p` to its snapped point.
    pub fn snap_distance(&self, p: &Point) -> f64 {
        p.dist_sq(&self.snap(p)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentOptions {
    /// Step size; `None` picks `1 / L` from the problem's curvature.
    pub step: Option<f64>,
    pub iters: usize,
    pub tol: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            step: None,
            iters: 200_000,
            tol: 1e-10,
        }
    }
}

/// Which window solver to use.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solver {
    /// Exact if applicable, then grid for `d <= 2`, then descent.
    #[default]
    Auto,
    ExactQuadratic,
    Grid { grid: Option<GridSpec> },
    Descent { options: DescentOptions },
}

/// A solver bound to a concrete grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreparedSolver {
    pub solver: Solver,
    pub grid: GridSpec,
}

impl Solver {
    pub fn grid(grid: GridSpec) -> Self {
        Solver::Grid { grid: Some(grid) }
    }

    /// Fix the default grid from the instance's start and minimizers.
    pub fn prepare(self, instance: &Instance) -> PreparedSolver {
        self.prepare_with(GridSpec::for_instance(instance))
    }

    pub fn prepare_with(self, default_grid: GridSpec) -> PreparedSolver {
        let grid = match self {
            Solver::Grid { grid: Some(g) } => g,
            _ => default_grid,
        };
        PreparedSolver { solver: self, grid }
    }
}

impl PreparedSolver {
    pub fn solve(&self, problem: &WindowProblem<'_>) -> Result<WindowSolution> {
        match self.solver {
            Solver::ExactQuadratic => solve_quadratic_chain(problem),
            Solver::Grid { .. } => solve_grid_dp(problem, &self.grid),
            Solver::Descent { options } => solve_descent(problem, &options),
            Solver::Auto => {
                if quadratic_chain_applicable(problem) {
                    solve_quadratic_chain(problem)
                } else if problem.dim() <= 2 {
                    solve_grid_dp(problem, &self.grid)
                } else {
                    solve_descent(problem, &DescentOptions::default())
                }
            }
        }
    }

    /// Lattice spacing when this solver may use the grid for `problem`-like
    /// inputs (`None` for exact or descent).
    pub fn resolution_for(&self, instance: &Instance) -> Option<f64> {
        match self.solver {
            Solver::Grid { .. } => Some(self.grid.spacing()),
            Solver::Auto if !quadratic_instance(instance) && instance.dim() <= 2 => {
                Some(self.grid.spacing())
            }
            _ => None,
        }
    }
}

/// Curvature `m` of a quadratic-shaped cost, if any.
fn quadratic_m(f: &HittingCost) -> Option<f64> {
    match f.shape() {
        CostShape::StronglyConvex { m } => Some(*m),
        CostShape::Ripple { m, eps, .. } if *eps == 0.0 => Some(*m),
        _ => None,
    }
}

fn quadratic_chain_applicable(problem: &WindowProblem<'_>) -> bool {
    *problem.movement() == MovementCost::SqL2Half
        && problem.costs().iter().all(|f| quadratic_m(f).is_some())
}

pub(crate) fn quadratic_instance(instance: &Instance) -> bool {
    *instance.movement() == MovementCost::SqL2Half
        && instance.hitting().iter().all(|f| quadratic_m(f).is_some())
}

/// Solve the tridiagonal system `-y_{i-1} + (m_i + 2) y_i - y_{i+1} = m_i v_i`
/// (anchors on the boundary rows) by the Thomas algorithm, coordinatewise.
pub(crate) fn quadratic_chain_points(
    left: &Point,
    right: Option<&Point>,
    free: &[HittingCost],
) -> Vec<Point> {
    let n = free.len();
    let d = left.dim();
    if n == 0 {
        return Vec::new();
    }
    let ms: Vec<f64> = free.iter().map(|f| quadratic_m(f).unwrap_or(0.0)).collect();
    let diag: Vec<f64> = (0..n)
        .map(|i| ms[i] + 1.0 + if i + 1 < n || right.is_some() { 1.0 } else { 0.0 })
        .collect();
    let mut out = vec![vec![0.0; d]; n];
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for k in 0..d {
        for i in 0..n {
            let mut rhs = ms[i] * free[i].minimizer()[k];
            if i == 0 {
                rhs += left[k];
            }
            if i + 1 == n {
                if let Some(r) = right {
                    rhs += r[k];
                }
            }
            let (denom, prev_dp) = if i == 0 {
                (diag[0], 0.0)
            } else {
                (diag[i] + cp[i - 1], dp[i - 1])
            };
            cp[i] = -1.0 / denom;
            dp[i] = (rhs + prev_dp) / denom;
        }
        out[n - 1][k] = dp[n - 1];
        for i in (0..n - 1).rev() {
            out[i][k] = dp[i] - cp[i] * out[i + 1][k];
        }
    }
    out.into_iter().map(Point::from).collect()
}

/// Exact solve for quadratic hitting costs with `0.5 ||.||^2` movement.
pub fn solve_quadratic_chain(problem: &WindowProblem<'_>) -> Result<WindowSolution> {
    if !quadratic_chain_applicable(problem) {
        return Err(Error::unsupported(format!(
            "window ({}, {}): exact chain needs quadratic costs and sq_l2_half movement",
            problem.tau1(),
            problem.tau2()
        )));
    }
    let free_points = quadratic_chain_points(problem.left(), problem.right(), problem.free_costs());
    let objective = problem.objective(&free_points);
    Ok(WindowSolution {
        free_points,
        objective,
        solver_tag: SolverTag::ExactQuadratic,
        iterations: 1,
        resolution: None,
    })
}

/// Stage-wise DP over the lattice. Anchors enter the boundary terms at
/// their true positions; they must lie inside the grid box.
pub fn solve_grid_dp(problem: &WindowProblem<'_>, grid: &GridSpec) -> Result<WindowSolution> {
    let d = problem.dim();
    for (name, p) in std::iter::once(("left", problem.left())).chain(problem.right().map(|r| ("right", r))) {
        if !grid.contains(p) {
            return Err(Error::input(format!(
                "window ({}, {}): {name} anchor {:?} lies outside the grid [{}, {}]",
                problem.tau1(),
                problem.tau2(),
                p.coords(),
                grid.lo,
                grid.hi
            )));
        }
    }
    let n_free = problem.free_count();
    if n_free == 0 {
        return Ok(WindowSolution {
            free_points: Vec::new(),
            objective: problem.objective(&[]),
            solver_tag: SolverTag::GridDp,
            iterations: 0,
            resolution: Some(grid.spacing()),
        });
    }
    let lattice = grid.lattice(d)?;
    let paths = lattice_dp(
        &lattice,
        problem.left(),
        problem.right().map(|r| (r, &problem.costs()[n_free])),
        problem.free_costs(),
        problem.movement(),
    );
    let free_points: Vec<Point> = paths.into_iter().map(|j| lattice[j].clone()).collect();
    let objective = problem.objective(&free_points);
    Ok(WindowSolution {
        free_points,
        objective,
        solver_tag: SolverTag::GridDp,
        iterations: n_free,
        resolution: Some(grid.spacing()),
    })
}

/// Forward DP with backpointers over `lattice`; returns the lattice index
/// chosen at every free stage. Ties keep the smallest index.
pub(crate) fn lattice_dp(
    lattice: &[Point],
    left: &Point,
    right: Option<(&Point, &HittingCost)>,
    free: &[HittingCost],
    movement: &MovementCost,
) -> Vec<usize> {
    let k = lattice.len();
    let dense = k.saturating_mul(k) <= 16_000_000;
    let moves: Vec<f64> = if dense {
        let mut m = Vec::with_capacity(k * k);
        for to in lattice {
            for from in lattice {
                m.push(movement.eval(to, from));
            }
        }
        m
    } else {
        Vec::new()
    };
    let mv = |to: usize, from: usize| -> f64 {
        if dense {
            moves[to * k + from]
        } else {
            movement.eval(&lattice[to], &lattice[from])
        }
    };

    let mut value: Vec<f64> = lattice
        .iter()
        .map(|p| free[0].eval(p) + movement.eval(p, left))
        .collect();
    let mut back: Vec<Vec<u32>> = Vec::with_capacity(free.len().saturating_sub(1));
    for f in &free[1..] {
        let mut next = Vec::with_capacity(k);
        let mut bp = Vec::with_capacity(k);
        for (j, p) in lattice.iter().enumerate() {
            let mut best = f64::INFINITY;
            let mut arg = 0usize;
            for (i, &v) in value.iter().enumerate() {
                let cand = v + mv(j, i);
                if cand < best {
                    best = cand;
                    arg = i;
                }
            }
            next.push(best + f.eval(p));
            bp.push(arg as u32);
        }
        value = next;
        back.push(bp);
    }
    let mut best = f64::INFINITY;
    let mut arg = 0usize;
    for (i, &v) in value.iter().enumerate() {
        let cand = match right {
            Some((r, _)) => v + movement.eval(r, &lattice[i]),
            None => v,
        };
        if cand < best {
            best = cand;
            arg = i;
        }
    }
    let mut path = vec![arg];
    for bp in back.iter().rev() {
        arg = bp[arg] as usize;
        path.push(arg);
    }
    path.reverse();
    path
}

/// Gradient descent on the stacked free variables.
pub fn solve_descent(problem: &WindowProblem<'_>, options: &DescentOptions) -> Result<WindowSolution> {
    if *problem.movement() != MovementCost::SqL2Half
        || problem.free_costs().iter().any(|f| f.gradient(f.minimizer()).is_none())
    {
        return Err(Error::unsupported(format!(
            "window ({}, {}): descent needs differentiable costs and sq_l2_half movement",
            problem.tau1(),
            problem.tau2()
        )));
    }
    let n = problem.free_count();
    let mut y: Vec<Point> = problem
        .free_costs()
        .iter()
        .map(|f| f.minimizer().clone())
        .collect();
    if n == 0 {
        return Ok(WindowSolution {
            free_points: y,
            objective: problem.objective(&[]),
            solver_tag: SolverTag::Descent,
            iterations: 0,
            resolution: None,
        });
    }
    let step = match options.step {
        Some(s) if s > 0.0 => s,
        Some(s) => return Err(Error::param(format!("descent step must be > 0, got {s}"))),
        None => 1.0 / (curvature_bound(problem.free_costs()) + 4.0),
    };
    let mut obj = problem.objective(&y);
    let mut increases = 0usize;
    let mut iters = 0usize;
    while iters < options.iters {
        let g = window_gradient(problem, &y);
        let gnorm = g.iter().map(|v| v.iter().map(|a| a * a).sum::<f64>()).sum::<f64>().sqrt();
        if gnorm < options.tol {
            break;
        }
        for (yi, gi) in y.iter_mut().zip(&g) {
            *yi = Point::from(
                yi.coords()
                    .iter()
                    .zip(gi)
                    .map(|(a, b)| a - step * b)
                    .collect::<Vec<_>>(),
            );
        }
        iters += 1;
        let next = problem.objective(&y);
        if !next.is_finite() {
            return Err(problem.failure("objective became non-finite"));
        }
        if next > obj {
            increases += 1;
            if increases >= 10 {
                return Err(problem.failure(format!(
                    "diverged: objective increased 10 consecutive steps (step {step})"
                )));
            }
        } else {
            increases = 0;
        }
        obj = next;
    }
    Ok(WindowSolution {
        free_points: y,
        objective: obj,
        solver_tag: SolverTag::Descent,
        iterations: iters,
        resolution: None,
    })
}

fn curvature_bound(costs: &[HittingCost]) -> f64 {
    costs
        .iter()
        .map(|f| match f.shape() {
            CostShape::StronglyConvex { m } => *m,
            CostShape::Ripple { m, eps, k } => m + eps * k * k,
            _ => 1.0,
        })
        .fold(0.0, f64::max)
}

fn window_gradient(problem: &WindowProblem<'_>, y: &[Point]) -> Vec<Vec<f64>> {
    let n = y.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = if i == 0 { problem.left() } else { &y[i - 1] };
        let next = if i + 1 < n { Some(&y[i + 1]) } else { problem.right() };
        let mut g = problem.costs()[i].gradient(&y[i]).unwrap_or_else(|| vec![0.0; y[i].dim()]);
        for (k, gk) in g.iter_mut().enumerate() {
            *gk += y[i][k] - prev[k];
            if let Some(nx) = next {
                *gk -= nx[k] - y[i][k];
            }
        }
        out.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_polyhedral, make_ripple, make_strongly_convex};
    use crate::model::NormOrder;

    fn quad_instance(vs: &[f64], x0: f64) -> Instance {
        let path: Vec<Point> = vs.iter().map(|&v| Point::scalar(v)).collect();
        make_strongly_convex(2.0, &path)
            .unwrap()
            .into_instance(Point::scalar(x0))
            .unwrap()
    }

    #[test]
    fn free_counts_follow_the_anchoring_rule() {
        let inst = quad_instance(&[0.0; 10], 0.0);
        let w = WindowProblem::build(&inst, 0, 2, None).unwrap();
        assert_eq!(w.free_count(), 1);
        assert_eq!(w.right().unwrap(), inst.anchor(2));
        let w = WindowProblem::build(&inst, 8, 12, None).unwrap();
        assert_eq!(w.free_count(), 2);
        assert!(w.right().is_none());
        assert!(WindowProblem::build(&inst, 3, 3, None).is_err());
    }

    #[test]
    fn zero_free_window_is_fixed_cost() {
        let inst = quad_instance(&[0.0, 1.0, 2.0, 5.0], 0.0);
        let w = WindowProblem::build(&inst, 3, 4, None).unwrap();
        assert_eq!(w.free_count(), 0);
        let direct = inst.cost(4).eval(inst.anchor(4)) + inst.movement().eval(inst.anchor(4), inst.anchor(3));
        assert_eq!(w.objective(&[]), direct);
        let sol = solve_grid_dp(&w, &GridSpec::new(-10.0, 10.0, 21).unwrap()).unwrap();
        assert_eq!(sol.objective, direct);
    }

    #[test]
    fn one_free_quadratic_has_closed_form() {
        let (a, v, b) = (0.0, 3.0, 1.0);
        let inst = quad_instance(&[v, b], a);
        let w = WindowProblem::build(&inst, 0, 2, None).unwrap();
        let sol = solve_quadratic_chain(&w).unwrap();
        assert!((sol.free_points[0][0] - (2.0 * v + a + b) / 4.0).abs() < 1e-12);

        let inst = quad_instance(&[2.0, 2.0], 2.0);
        let w = WindowProblem::build(&inst, 0, 2, None).unwrap();
        let sol = solve_quadratic_chain(&w).unwrap();
        assert_eq!(sol.free_points[0][0], 2.0);
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn flat_costs_give_midpoint() {
        let path = vec![Point::scalar(0.0), Point::scalar(4.0)];
        let inst = make_ripple(1.0, 0.0, 1.0, &path)
            .unwrap()
            .into_instance(Point::scalar(0.0))
            .unwrap();
        let costs: Vec<HittingCost> = vec![
            HittingCost::new(CostShape::Ripple { m: 0.0, eps: 0.0, k: 1.0 }, Point::scalar(9.0)).unwrap(),
            inst.cost(2).clone(),
        ];
        let w = WindowProblem::new(0, 2, Point::scalar(0.0), Some(Point::scalar(4.0)), &costs, inst.movement())
            .unwrap();
        let sol = solve_quadratic_chain(&w).unwrap();
        assert!((sol.free_points[0][0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn descent_matches_exact() {
        let inst = quad_instance(&[3.0, 1.0], 0.0);
        let w = WindowProblem::build(&inst, 0, 2, None).unwrap();
        let exact = solve_quadratic_chain(&w).unwrap();
        let desc = solve_descent(&w, &DescentOptions::default()).unwrap();
        assert!((exact.free_points[0][0] - desc.free_points[0][0]).abs() < 1e-6);

        let inst = quad_instance(&[2.0, 2.0], 2.0);
        let w = WindowProblem::build(&inst, 0, 2, None).unwrap();
        assert_eq!(solve_descent(&w, &DescentOptions::default()).unwrap().iterations, 0);
    }

    #[test]
    fn polyhedral_routes_to_grid() {
        let path = vec![Point::scalar(1.0), Point::scalar(2.0), Point::scalar(0.0)];
        let inst = make_polyhedral(1.0, &path, NormOrder::L1)
            .unwrap()
            .into_instance(Point::scalar(0.0))
            .unwrap();
        let w = WindowProblem::build(&inst, 0, 3, None).unwrap();
        assert!(matches!(solve_descent(&w, &DescentOptions::default()), Err(Error::Unsupported(_))));
        assert!(matches!(solve_quadratic_chain(&w), Err(Error::Unsupported(_))));
        let sol = Solver::Auto.prepare(&inst).solve(&w).unwrap();
        assert_eq!(sol.solver_tag, SolverTag::GridDp);
    }

    #[test]
    fn grid_rejects_uncovered_anchor() {
        let inst = quad_instance(&[0.0, 50.0], 0.0);
        let w = WindowProblem::build(&inst, 0, 2, None).unwrap();
        let grid = GridSpec::new(-1.0, 1.0, 11).unwrap();
        assert!(matches!(solve_grid_dp(&w, &grid), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn ripple_grid_beats_greedy_candidate() {
        let path = vec![Point::scalar(0.7), Point::scalar(-0.4)];
        let inst = make_ripple(1.0, 1.0, 6.0, &path)
            .unwrap()
            .into_instance(Point::scalar(0.0))
            .unwrap();
        let w = WindowProblem::build(&inst, 0, 2, None).unwrap();
        let sol = solve_grid_dp(&w, &GridSpec::for_instance(&inst)).unwrap();
        assert!(sol.objective <= w.objective(&[inst.anchor(1).clone()]));
    }

    #[test]
    fn snap_yields_lattice_coordinates() {
        let grid = GridSpec::new(-2.0, 3.0, 51).unwrap();
        let axis = grid.axis();
        for c in [-1.93, 0.0, 0.051, 2.999] {
            let s = grid.snap(&Point::scalar(c));
            assert!(axis.contains(&s[0]));
            assert!(grid.snap_distance(&Point::scalar(c)) <= grid.spacing() / 2.0 + 1e-15);
        }
    }

    #[test]
    fn oversized_lattice_is_rejected() {
        let grid = GridSpec::new(0.0, 1.0, 1001).unwrap();
        assert!(matches!(grid.lattice(2), Err(Error::GridTooLarge { .. })));
    }
}
