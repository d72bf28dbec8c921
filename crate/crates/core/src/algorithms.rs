//! Online algorithms with a prediction window `w`: the synchronized
//! subroutines `SFHC(h)`, their deterministic average, the two randomized
//! variants, greedy and the unanchored AFHC baseline.
//!
//! All anchored algorithms share one piece of machinery: a sorted list of
//! cut points `0 = b_0 < b_1 < ...` decouples the horizon into windows
//! `g_{b_i, b_{i+1}}` that are solved independently, with `x_{b_i} = v_{b_i}`
//! at every cut inside `[1, T]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::model::{evaluate_total_cost, HittingCost, Instance, MovementCost, Point, Trajectory};
use crate::window::{build_window_from, PreparedSolver, Solver, WindowProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AnchorKind {
    Phase { h: usize, w: usize },
    Explicit,
}

/// Synchronization timesteps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorSet {
    kind: AnchorKind,
    members: Vec<usize>,
}

impl AnchorSet {
    /// `{k : k = h mod w, 0 <= k <= T}`.
    pub fn phase(h: usize, w: usize, horizon: usize) -> Result<Self> {
        if w == 0 {
            return Err(Error::param("window length w must be >= 1"));
        }
        if h >= w {
            return Err(Error::param(format!("phase h = {h} must be < w = {w}")));
        }
        Ok(AnchorSet {
            kind: AnchorKind::Phase { h, w },
            members: (h..=horizon).step_by(w).collect(),
        })
    }

    /// Explicit sequence with `t_0 = 0` and gaps of at least 2.
    pub fn explicit(members: Vec<usize>) -> Result<Self> {
        Self::explicit_with_gap(members, 2)
    }

    /// Explicit sequence with `t_0 = 0` and gaps of at least 1.
    pub fn explicit_relaxed(members: Vec<usize>) -> Result<Self> {
        Self::explicit_with_gap(members, 1)
    }

    fn explicit_with_gap(members: Vec<usize>, min_gap: usize) -> Result<Self> {
        if members.first() != Some(&0) {
            return Err(Error::input("explicit anchor sequence must start at 0"));
        }
        if let Some(pair) = members.windows(2).find(|p| p[1] < p[0] + min_gap) {
            return Err(Error::input(format!(
                "anchor gap {} -> {} is below the minimum of {min_gap}",
                pair[0], pair[1]
            )));
        }
        Ok(AnchorSet {
            kind: AnchorKind::Explicit,
            members,
        })
    }

    pub fn kind(&self) -> AnchorKind {
        self.kind
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Members in `[1, T]`.
    pub fn active(&self, horizon: usize) -> Vec<usize> {
        self.members
            .iter()
            .copied()
            .filter(|&t| t >= 1 && t <= horizon)
            .collect()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.members.binary_search(&t).is_ok()
    }

    /// Cut points `0, active..., next` where `next` closes the final window
    /// (the first member beyond `T`, or `T + 1` when none is listed).
    pub fn cuts(&self, horizon: usize) -> Vec<usize> {
        let mut cuts = vec![0];
        cuts.extend(self.active(horizon));
        let last = *cuts.last().unwrap();
        if last < horizon {
            let next = match self.kind {
                AnchorKind::Phase { h, w } => match (last, h) {
                    (0, 0) => w,
                    (0, h) => h,
                    (last, _) => last + w,
                },
                AnchorKind::Explicit => self
                    .members
                    .iter()
                    .copied()
                    .find(|&t| t > horizon)
                    .unwrap_or(horizon + 1),
            };
            cuts.push(next);
        }
        cuts
    }
}

/// Solve every window between consecutive cuts and stitch the trajectory.
/// With `max_gap = Some(w)` a window longer than `w` is a causality error.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_cuts(
    horizon: usize,
    start: &Point,
    revealed: &[HittingCost],
    movement: &MovementCost,
    cuts: &[usize],
    solver: &PreparedSolver,
    max_gap: Option<usize>,
    policy: ExecPolicy,
) -> Result<Vec<Point>> {
    if let Some(w) = max_gap {
        if let Some(p) = cuts.windows(2).find(|p| p[1] - p[0] > w) {
            return Err(Error::NonCausal(format!(
                "window ({}, {}) needs lookahead {} beyond w = {w}",
                p[0],
                p[1],
                p[1] - p[0]
            )));
        }
    }
    let pieces: Vec<Result<Vec<Point>>> = exec::map_indices(policy, cuts.len() - 1, |i| {
        let (a, b) = (cuts[i], cuts[i + 1]);
        let problem = build_window_from(horizon, start, revealed, movement, a, b, None)?;
        let sol = solver.solve(&problem)?;
        let mut pts = sol.free_points;
        if b <= horizon {
            pts.push(revealed[b - 1].minimizer().clone());
        }
        Ok(pts)
    });
    let mut points = Vec::with_capacity(horizon);
    for p in pieces {
        points.extend(p?);
    }
    debug_assert_eq!(points.len(), horizon);
    Ok(points)
}

fn check_w(w: usize) -> Result<()> {
    if w == 0 {
        return Err(Error::param("window length w must be >= 1"));
    }
    Ok(())
}

/// `x_t = v_t` for every `t`.
pub fn run_greedy(instance: &Instance) -> Result<Trajectory> {
    evaluate_total_cost(instance, &instance.minimizers())
}

/// Subroutine `SFHC(h)` with window `w`.
pub fn run_sfhc(instance: &Instance, w: usize, h: usize, solver: &Solver) -> Result<Trajectory> {
    run_sfhc_prepared(instance, w, h, &solver.prepare(instance), ExecPolicy::Sequential)
}

pub fn run_sfhc_prepared(
    instance: &Instance,
    w: usize,
    h: usize,
    solver: &PreparedSolver,
    policy: ExecPolicy,
) -> Result<Trajectory> {
    check_w(w)?;
    let anchors = AnchorSet::phase(h, w, instance.horizon())?;
    let cuts = anchors.cuts(instance.horizon());
    let points = solve_cuts(
        instance.horizon(),
        instance.start(),
        instance.hitting(),
        instance.movement(),
        &cuts,
        solver,
        Some(w),
        policy,
    )?;
    evaluate_total_cost(instance, &points)
}

#[derive(Clone, Debug)]
pub struct DsfhcRun {
    pub trajectory: Trajectory,
    /// `SFHC(0) .. SFHC(w-1)`.
    pub subroutines: Vec<Trajectory>,
}

impl DsfhcRun {
    /// `(1/w) sum_h cost(SFHC(h))`.
    pub fn subroutine_mean(&self) -> f64 {
        mean_cost(&self.subroutines)
    }
}

pub(crate) fn mean_cost(trs: &[Trajectory]) -> f64 {
    trs.iter().map(|t| t.total()).sum::<f64>() / trs.len() as f64
}

/// Pointwise average of the `w` subroutines.
pub fn run_dsfhc(instance: &Instance, w: usize, solver: &Solver) -> Result<Trajectory> {
    Ok(run_dsfhc_detailed(instance, w, solver, ExecPolicy::default())?.trajectory)
}

pub fn run_dsfhc_detailed(
    instance: &Instance,
    w: usize,
    solver: &Solver,
    policy: ExecPolicy,
) -> Result<DsfhcRun> {
    check_w(w)?;
    let prepared = solver.prepare(instance);
    let subroutines = all_subroutines(instance, w, &prepared, policy)?;
    let points = average_points(&subroutines, instance.horizon());
    Ok(DsfhcRun {
        trajectory: evaluate_total_cost(instance, &points)?,
        subroutines,
    })
}

pub(crate) fn all_subroutines(
    instance: &Instance,
    w: usize,
    prepared: &PreparedSolver,
    policy: ExecPolicy,
) -> Result<Vec<Trajectory>> {
    exec::map_indices(policy, w, |h| {
        run_sfhc_prepared(instance, w, h, prepared, ExecPolicy::Sequential)
    })
    .into_iter()
    .collect()
}

fn average_points(runs: &[Trajectory], horizon: usize) -> Vec<Point> {
    (1..=horizon)
        .map(|t| Point::mean(runs.iter().map(|r| r.point(t))))
        .collect()
}

#[derive(Clone, Debug)]
pub struct RsfhcARun {
    pub phase: usize,
    pub trajectory: Trajectory,
}

/// Run `SFHC(h)` for a single uniformly drawn `h`.
pub fn run_rsfhc_a<R: Rng>(
    instance: &Instance,
    w: usize,
    rng: &mut R,
    solver: &Solver,
) -> Result<RsfhcARun> {
    check_w(w)?;
    let phase = rng.gen_range(0..w);
    Ok(RsfhcARun {
        phase,
        trajectory: run_sfhc(instance, w, phase, solver)?,
    })
}

/// Exact expected cost of randomized phase selection, by enumerating all
/// phases.
pub fn rsfhc_a_expectation(instance: &Instance, w: usize, solver: &Solver) -> Result<f64> {
    check_w(w)?;
    let prepared = solver.prepare(instance);
    let subs = all_subroutines(instance, w, &prepared, ExecPolicy::default())?;
    Ok(mean_cost(&subs))
}

/// Support of the gap distribution: `{n : w/2 < n <= w - 1}`.
pub fn gap_support(w: usize) -> Result<std::ops::RangeInclusive<usize>> {
    if w < 4 {
        return Err(Error::param(format!("random anchors need w >= 4, got {w}")));
    }
    Ok(w / 2 + 1..=w - 1)
}

/// `t_0 = 0` followed by i.i.d. uniform gaps until some `t_i > T`.
pub fn gen_anchor_sequence<R: Rng>(w: usize, horizon: usize, rng: &mut R) -> Result<AnchorSet> {
    let support = gap_support(w)?;
    let mut members = vec![0usize];
    let mut t = 0usize;
    while t <= horizon {
        t += rng.gen_range(support.clone());
        members.push(t);
    }
    AnchorSet::explicit(members)
}

#[derive(Clone, Debug)]
pub struct RsfhcBRun {
    pub anchors: AnchorSet,
    pub trajectory: Trajectory,
}

/// Random anchor sequence, solved segment by segment.
pub fn run_rsfhc_b<R: Rng>(
    instance: &Instance,
    w: usize,
    rng: &mut R,
    solver: &Solver,
) -> Result<RsfhcBRun> {
    let anchors = gen_anchor_sequence(w, instance.horizon(), rng)?;
    let trajectory = run_with_anchors(instance, &anchors, w, solver)?;
    Ok(RsfhcBRun {
        anchors,
        trajectory,
    })
}

/// Anchored run with explicit anchors, realizable online with window `w`.
pub fn run_with_anchors(
    instance: &Instance,
    anchors: &AnchorSet,
    w: usize,
    solver: &Solver,
) -> Result<Trajectory> {
    check_w(w)?;
    let cuts = anchors.cuts(instance.horizon());
    let points = solve_cuts(
        instance.horizon(),
        instance.start(),
        instance.hitting(),
        instance.movement(),
        &cuts,
        &solver.prepare(instance),
        Some(w),
        ExecPolicy::Sequential,
    )?;
    evaluate_total_cost(instance, &points)
}

/// Averaging fixed horizon control: subroutine `h` re-plans an unanchored
/// window from its own current point at every cut of phase `h`.
pub fn run_afhc(instance: &Instance, w: usize, solver: &Solver) -> Result<Trajectory> {
    check_w(w)?;
    let prepared = solver.prepare(instance);
    let runs: Vec<Result<Trajectory>> =
        exec::map_indices(ExecPolicy::default(), w, |h| fhc_subroutine(instance, w, h, &prepared));
    let runs: Vec<Trajectory> = runs.into_iter().collect::<Result<_>>()?;
    evaluate_total_cost(instance, &average_points(&runs, instance.horizon()))
}

fn fhc_subroutine(
    instance: &Instance,
    w: usize,
    h: usize,
    solver: &PreparedSolver,
) -> Result<Trajectory> {
    let horizon = instance.horizon();
    let cuts = AnchorSet::phase(h, w, horizon)?.cuts(horizon);
    let mut points: Vec<Point> = Vec::with_capacity(horizon);
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1].min(horizon));
        if a >= horizon {
            break;
        }
        let left = if a == 0 {
            instance.start().clone()
        } else {
            points[a - 1].clone()
        };
        let problem = WindowProblem::free_tail(a, left, &instance.hitting()[a..b], instance.movement())?;
        points.extend(solver.solve(&problem)?.free_points);
    }
    evaluate_total_cost(instance, &points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_strongly_convex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quad(vs: &[f64], x0: f64) -> Instance {
        let path: Vec<Point> = vs.iter().map(|&v| Point::scalar(v)).collect();
        make_strongly_convex(2.0, &path)
            .unwrap()
            .into_instance(Point::scalar(x0))
            .unwrap()
    }

    #[test]
    fn phase_anchor_sets() {
        let a = AnchorSet::phase(1, 3, 10).unwrap();
        assert_eq!(a.members(), &[1, 4, 7, 10]);
        assert_eq!(a.cuts(10), vec![0, 1, 4, 7, 10]);
        let a = AnchorSet::phase(0, 3, 10).unwrap();
        assert_eq!(a.cuts(10), vec![0, 3, 6, 9, 12]);
        let a = AnchorSet::phase(0, 8, 5).unwrap();
        assert_eq!(a.cuts(5), vec![0, 8]);
        let a = AnchorSet::phase(6, 8, 5).unwrap();
        assert_eq!(a.cuts(5), vec![0, 6]);
        assert!(AnchorSet::phase(3, 3, 10).is_err());
    }

    #[test]
    fn explicit_anchor_validation() {
        assert!(AnchorSet::explicit(vec![0, 2, 5]).is_ok());
        assert!(AnchorSet::explicit(vec![0, 1]).is_err());
        assert!(AnchorSet::explicit(vec![1, 4]).is_err());
        assert!(AnchorSet::explicit_relaxed(vec![0, 1, 2]).is_ok());
    }

    #[test]
    fn w_one_is_greedy() {
        let inst = quad(&[1.0, -2.0, 0.5, 3.0], 0.0);
        let s = run_sfhc(&inst, 1, 0, &Solver::Auto).unwrap();
        let g = run_greedy(&inst).unwrap();
        assert_eq!(s.points(), g.points());
        let d = run_dsfhc(&inst, 1, &Solver::Auto).unwrap();
        assert_eq!(d.points(), g.points());
    }

    #[test]
    fn anchors_are_exact_minimizers() {
        let inst = quad(&[0.3, 1.7, -2.2, 0.9, 4.1, -0.6, 2.5], 1.0);
        for h in 0..3 {
            let tr = run_sfhc(&inst, 3, h, &Solver::Auto).unwrap();
            for t in AnchorSet::phase(h, 3, 7).unwrap().active(7) {
                assert_eq!(tr.point(t), inst.anchor(t));
            }
        }
    }

    #[test]
    fn stationary_path_stays_put() {
        let inst = quad(&[2.0; 6], 2.0);
        for w in 1..=4 {
            let d = run_dsfhc(&inst, w, &Solver::Auto).unwrap();
            assert_eq!(d.total(), 0.0);
            let a = run_afhc(&inst, w, &Solver::Auto).unwrap();
            assert_eq!(a.total(), 0.0);
        }
    }

    #[test]
    fn afhc_w1_minimizes_each_step() {
        let inst = quad(&[3.0, -1.0], 0.0);
        let tr = run_afhc(&inst, 1, &Solver::Auto).unwrap();
        // argmin (x - 3)^2 + 0.5 x^2 = 2, then argmin (x + 1)^2 + 0.5 (x - 2)^2 = 0.
        assert!((tr.point(1)[0] - 2.0).abs() < 1e-12);
        assert!((tr.point(2)[0] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn gap_supports() {
        assert_eq!(gap_support(4).unwrap(), 3..=3);
        assert_eq!(gap_support(6).unwrap(), 4..=5);
        assert_eq!(gap_support(8).unwrap(), 5..=7);
        assert!(gap_support(3).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = gen_anchor_sequence(4, 10, &mut rng).unwrap();
        assert_eq!(r.members(), &[0, 3, 6, 9, 12]);
    }

    #[test]
    fn rsfhc_a_is_seeded() {
        let inst = quad(&[0.3, 1.7, -2.2, 0.9, 4.1], 1.0);
        let a = run_rsfhc_a(&inst, 3, &mut ChaCha8Rng::seed_from_u64(9), &Solver::Auto).unwrap();
        let b = run_rsfhc_a(&inst, 3, &mut ChaCha8Rng::seed_from_u64(9), &Solver::Auto).unwrap();
        assert_eq!(a.phase, b.phase);
        assert_eq!(a.trajectory, b.trajectory);
        let w1 = run_rsfhc_a(&inst, 1, &mut ChaCha8Rng::seed_from_u64(1), &Solver::Auto).unwrap();
        assert_eq!(w1.trajectory, run_greedy(&inst).unwrap());
    }

    #[test]
    fn overlong_window_is_non_causal() {
        let inst = quad(&[0.0; 8], 0.0);
        let anchors = AnchorSet::explicit(vec![0, 5, 9]).unwrap();
        assert!(matches!(
            run_with_anchors(&inst, &anchors, 4, &Solver::Auto),
            Err(Error::NonCausal(_))
        ));
    }
}
