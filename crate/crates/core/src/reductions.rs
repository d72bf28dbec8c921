//! Convex body chasing: bodies with projection oracles, the duplication
//! construction, and the epigraph reduction from SOCO.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    evaluate_total_cost, CostShape, HittingCost, Instance, MovementCost, NormOrder, Point,
    GLB_PENALTY,
};
use crate::oracle::offline_optimal_grid;
use crate::window::GridSpec;

/// Membership slack for bodies whose projection is computed iteratively.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "body", rename_all = "snake_case")]
pub enum ConvexBody {
    /// `{x : a . x <= b}`.
    Halfspace { a: Vec<f64>, b: f64 },
    /// `{x : a . x = b}`.
    Hyperplane { a: Vec<f64>, b: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, r: f64 },
    Interval { lo: f64, hi: f64 },
    /// `{(x, s) : f(x) <= s}` in dimension `d + 1`.
    Epigraph { f: HittingCost },
    /// `{(x, 0)}` in dimension `dim`.
    ZeroPlane { dim: usize },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Halfspace { a, .. } | ConvexBody::Hyperplane { a, .. } => a.len(),
            ConvexBody::Box { lo, .. } => lo.len(),
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Interval { .. } => 1,
            ConvexBody::Epigraph { f } => f.dim() + 1,
            ConvexBody::ZeroPlane { dim } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::input(m.to_string()));
        match self {
            ConvexBody::Halfspace { a, .. } | ConvexBody::Hyperplane { a, .. } => {
                if a.is_empty() || dot(a, a) == 0.0 {
                    return bad("halfspace/hyperplane normal must be nonzero");
                }
            }
            ConvexBody::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return bad("box needs matching lo <= hi");
                }
            }
            ConvexBody::Ball { center, r } => {
                if center.is_empty() || !(*r >= 0.0) {
                    return bad("ball needs a center and r >= 0");
                }
            }
            ConvexBody::Interval { lo, hi } => {
                if !(lo <= hi) {
                    return bad("interval needs lo <= hi");
                }
            }
            ConvexBody::Epigraph { f } => {
                if !f.is_convex() {
                    return Err(Error::unsupported("epigraph of a non-convex cost is not convex"));
                }
            }
            ConvexBody::ZeroPlane { dim } => {
                if *dim < 2 {
                    return bad("zero plane needs dimension >= 2");
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        let x = p.coords();
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ConvexBody::Halfspace { a, b } => dot(a, x) <= b + tol,
            ConvexBody::Hyperplane { a, b } => (dot(a, x) - b).abs() <= tol,
            ConvexBody::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(c, (l, h))| *c >= l - tol && *c <= h + tol),
            ConvexBody::Ball { center, r } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                d2.sqrt() <= r + tol
            }
            ConvexBody::Interval { lo, hi } => x[0] >= lo - tol && x[0] <= hi + tol,
            ConvexBody::Epigraph { f } => {
                let (head, s) = x.split_at(x.len() - 1);
                f.eval(&Point::from(head.to_vec())) <= s[0] + tol
            }
            ConvexBody::ZeroPlane { .. } => x[x.len() - 1].abs() <= tol,
        }
    }

    /// Euclidean projection.
    pub fn project(&self, p: &Point) -> Result<Point> {
        if p.dim() != self.dim() {
            return Err(Error::input(format!(
                "point of dimension {} projected on a body of dimension {}",
                p.dim(),
                self.dim()
            )));
        }
        let x = p.coords();
        let out: Vec<f64> = match self {
            ConvexBody::Halfspace { a, b } => {
                let excess = dot(a, x) - b;
                if excess <= 0.0 {
                    return Ok(p.clone());
                }
                let s = excess / dot(a, a);
                x.iter().zip(a).map(|(c, ai)| c - s * ai).collect()
            }
            ConvexBody::Hyperplane { a, b } => {
                let s = (dot(a, x) - b) / dot(a, a);
                x.iter().zip(a).map(|(c, ai)| c - s * ai).collect()
            }
            ConvexBody::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(c, (l, h))| c.clamp(*l, *h))
                .collect(),
            ConvexBody::Ball { center, r } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                let dist = d2.sqrt();
                if dist <= *r {
                    return Ok(p.clone());
                }
                x.iter()
                    .zip(center)
                    .map(|(a, c)| c + (a - c) * (r / dist))
                    .collect()
            }
            ConvexBody::Interval { lo, hi } => vec![x[0].clamp(*lo, *hi)],
            ConvexBody::Epigraph { f } => return project_epigraph(f, p),
            ConvexBody::ZeroPlane { .. } => {
                let mut v = x.to_vec();
                let last = v.len() - 1;
                v[last] = 0.0;
                v
            }
        };
        Ok(Point::from(out))
    }
}

/// Proximal map `argmin_y f(y) + |y - x|^2 / (2 t)` in closed form.
pub fn prox(f: &HittingCost, x: &Point, t: f64) -> Result<Point> {
    let v = f.minimizer().coords();
    let x = x.coords();
    let out: Vec<f64> = match f.shape() {
        CostShape::StronglyConvex { m } | CostShape::Ripple { m, eps: 0.0, .. } => x
            .iter()
            .zip(v)
            .map(|(a, c)| (a + t * m * c) / (1.0 + t * m))
            .collect(),
        CostShape::Polyhedral { alpha, norm } => {
            let r: Vec<f64> = x.iter().zip(v).map(|(a, c)| a - c).collect();
            let shrink = t * alpha;
            let r = match norm {
                NormOrder::L2 => {
                    let n = NormOrder::L2.norm(&r);
                    if n <= shrink {
                        vec![0.0; r.len()]
                    } else {
                        r.iter().map(|a| a * (1.0 - shrink / n)).collect()
                    }
                }
                NormOrder::L1 => r.iter().map(|a| soft(*a, shrink)).collect(),
                NormOrder::Linf => {
                    let p = project_l1_ball(&r, shrink);
                    r.iter().zip(&p).map(|(a, b)| a - b).collect()
                }
            };
            r.iter().zip(v).map(|(a, c)| a + c).collect()
        }
        CostShape::Glb { e0, mu } => (0..x.len())
            .map(|s| {
                let shifted = x[s] - t * e0[s];
                (v[s] + soft(shifted - v[s], t * mu[s])).max(0.0)
            })
            .collect(),
        _ => {
            return Err(Error::unsupported(format!(
                "no closed-form proximal map for the {} family",
                f.family_tag().name()
            )))
        }
    };
    Ok(Point::from(out))
}

fn soft(a: f64, t: f64) -> f64 {
    a.signum() * (a.abs() - t).max(0.0)
}

/// Euclidean projection onto `{y : ||y||_1 <= radius}`.
fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    if NormOrder::L1.norm(v) <= radius {
        return v.to_vec();
    }
    let mut u: Vec<f64> = v.iter().map(|a| a.abs()).collect();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let cand = (cum - radius) / (j + 1) as f64;
        if uj > cand {
            theta = cand;
        }
    }
    v.iter().map(|a| soft(*a, theta)).collect()
}

/// Project `(x, s)` onto the epigraph of `f` by bisection on the multiplier
/// `t`, where the projection is `(prox_{t f}(x), s + t)`.
fn project_epigraph(f: &HittingCost, p: &Point) -> Result<Point> {
    let c = p.coords();
    let (head, s) = c.split_at(c.len() - 1);
    let x = Point::from(head.to_vec());
    let s = s[0];
    if f.eval(&x) <= s {
        return Ok(p.clone());
    }
    let gap = |t: f64| -> Result<(f64, Point)> {
        let y = prox(f, &x, t)?;
        Ok((f.eval(&y) - s - t, y))
    };
    let mut hi = 1.0;
    let mut iters = 0;
    while gap(hi)?.0 > 0.0 {
        hi *= 2.0;
        iters += 1;
        if iters > 200 {
            return Err(Error::ProjectionFailure {
                index: 0,
                reason: "could not bracket the epigraph multiplier".into(),
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)?.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    let (_, y) = gap(hi)?;
    let level = (s + hi).max(f.eval(&y));
    Ok(y.lifted(level))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbcInstance {
    start: Point,
    bodies: Vec<ConvexBody>,
    movement: MovementCost,
}

impl CbcInstance {
    pub fn new(start: Point, bodies: Vec<ConvexBody>, movement: MovementCost) -> Result<Self> {
        if movement.norm_order().is_none() {
            return Err(Error::input(format!(
                "body chasing needs a norm movement cost, got {}",
                movement.kind_name()
            )));
        }
        for (i, b) in bodies.iter().enumerate() {
            b.validate()?;
            if b.dim() != start.dim() {
                return Err(Error::input(format!(
                    "body {} has dimension {}, start has {}",
                    i + 1,
                    b.dim(),
                    start.dim()
                )));
            }
        }
        Ok(CbcInstance {
            start,
            bodies,
            movement,
        })
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn bodies(&self) -> &[ConvexBody] {
        &self.bodies
    }

    pub fn movement(&self) -> &MovementCost {
        &self.movement
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    /// Movement cost of `points`, checking membership of each.
    pub fn cost(&self, points: &[Point]) -> Result<f64> {
        if points.len() != self.bodies.len() {
            return Err(Error::input(format!(
                "{} points for {} bodies",
                points.len(),
                self.bodies.len()
            )));
        }
        let mut prev = &self.start;
        let mut total = 0.0;
        for (i, (p, b)) in points.iter().zip(&self.bodies).enumerate() {
            if !b.contains(p, MEMBERSHIP_TOL) {
                return Err(Error::input(format!("point {} lies outside body {}", i + 1, i + 1)));
            }
            total += self.movement.eval(p, prev);
            prev = p;
        }
        Ok(total)
    }

    /// Movement cost without membership checks.
    pub fn path_length(&self, points: &[Point]) -> f64 {
        let mut prev = &self.start;
        let mut total = 0.0;
        for p in points {
            total += self.movement.eval(p, prev);
            prev = p;
        }
        total
    }
}

/// Repeat every body `w` times in place.
pub fn duplicate_cbc_instance(inst: &CbcInstance, w: usize) -> Result<CbcInstance> {
    if w == 0 {
        return Err(Error::param("duplication count must be >= 1"));
    }
    let bodies = inst
        .bodies
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.clone(), w))
        .collect();
    CbcInstance::new(inst.start.clone(), bodies, inst.movement.clone())
}

/// First point of each duplicate block.
pub fn extract_unduplicated_solution(dup_points: &[Point], w: usize, horizon: usize) -> Result<Vec<Point>> {
    if w == 0 || dup_points.len() != w * horizon {
        return Err(Error::input(format!(
            "expected {} duplicated points, got {}",
            w * horizon,
            dup_points.len()
        )));
    }
    Ok(dup_points.iter().step_by(w).cloned().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CbcRun {
    pub points: Vec<Point>,
    pub cost: f64,
}

/// `x_t = project_{K_t}(x_{t-1})`.
pub fn run_cbc_greedy_projection(inst: &CbcInstance) -> Result<CbcRun> {
    let mut points = Vec::with_capacity(inst.len());
    let mut prev = inst.start.clone();
    let mut cost = 0.0;
    for (i, body) in inst.bodies.iter().enumerate() {
        let next = body.project(&prev).map_err(|e| match e {
            Error::ProjectionFailure { reason, .. } => Error::ProjectionFailure { index: i + 1, reason },
            other => other,
        })?;
        if !body.contains(&next, MEMBERSHIP_TOL) {
            return Err(Error::ProjectionFailure {
                index: i + 1,
                reason: "projected point is outside the body".into(),
            });
        }
        cost += inst.movement.eval(&next, &prev);
        points.push(next.clone());
        prev = next;
    }
    Ok(CbcRun { points, cost })
}

/// Bodies `K_1, P_1, ..., K_T, P_T` in dimension `d + 1`, start `(x_0, 0)`.
pub fn epigraph_reduce(soco: &Instance) -> Result<CbcInstance> {
    let norm = soco.movement().norm_order().ok_or_else(|| {
        Error::input(format!(
            "epigraph reduction is defined for norm movement, got {}",
            soco.movement().kind_name()
        ))
    })?;
    let mut bodies = Vec::with_capacity(2 * soco.horizon());
    for f in soco.hitting() {
        if !f.is_convex() {
            return Err(Error::unsupported("epigraph reduction needs convex hitting costs"));
        }
        bodies.push(ConvexBody::Epigraph { f: f.clone() });
        bodies.push(ConvexBody::ZeroPlane { dim: soco.dim() + 1 });
    }
    CbcInstance::new(soco.start().lifted(0.0), bodies, MovementCost::from_norm(norm))
}

/// `y'_t = (x*_t, f_t(x*_t))`, `z'_t = (x*_t, 0)`, interleaved.
pub fn embed_soco_opt_in_cbc(soco_opt: &[Point], hitting: &[HittingCost]) -> Result<Vec<Point>> {
    if soco_opt.len() != hitting.len() {
        return Err(Error::input("trajectory and hitting costs differ in length"));
    }
    let mut out = Vec::with_capacity(2 * soco_opt.len());
    for (t, (x, f)) in soco_opt.iter().zip(hitting).enumerate() {
        let v = f.eval(x);
        if !v.is_finite() || v >= GLB_PENALTY {
            return Err(Error::input(format!("trajectory is infeasible at t = {}", t + 1)));
        }
        out.push(x.lifted(v));
        out.push(x.lifted(0.0));
    }
    Ok(out)
}

/// First `d` coordinates of every `K_t` visit.
pub fn map_cbc_to_soco(inst: &CbcInstance, cbc_points: &[Point]) -> Result<Vec<Point>> {
    if cbc_points.len() != inst.len() || !cbc_points.len().is_multiple_of(2) {
        return Err(Error::input("expected an alternating K/P sequence of length 2T"));
    }
    for (i, (p, b)) in cbc_points.iter().zip(inst.bodies()).enumerate() {
        if !b.contains(p, MEMBERSHIP_TOL) {
            return Err(Error::input(format!("point {} violates its body", i + 1)));
        }
    }
    let d = inst.dim() - 1;
    Ok(cbc_points
        .iter()
        .step_by(2)
        .map(|p| Point::from(p.coords()[..d].to_vec()))
        .collect())
}

fn as_interval(b: &ConvexBody) -> Option<(f64, f64)> {
    match b {
        ConvexBody::Interval { lo, hi } => Some((*lo, *hi)),
        ConvexBody::Box { lo, hi } if lo.len() == 1 => Some((lo[0], hi[0])),
        _ => None,
    }
}

/// Exact offline optimum for 1-D interval chasing. The value function is
/// piecewise linear with breakpoints among the start and the endpoints, so
/// a DP over that candidate set is exact.
pub fn interval_cbc_opt(inst: &CbcInstance) -> Result<CbcRun> {
    let ivs: Vec<(f64, f64)> = inst
        .bodies()
        .iter()
        .map(as_interval)
        .collect::<Option<_>>()
        .ok_or_else(|| Error::unsupported("interval oracle needs 1-D interval bodies"))?;
    let x0 = inst.start()[0];
    let mut cand: Vec<f64> = std::iter::once(x0)
        .chain(ivs.iter().flat_map(|&(l, h)| [l, h]))
        .collect();
    cand.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cand.dedup();
    let n = cand.len();
    let inf = f64::INFINITY;
    let mut value: Vec<f64> = cand.iter().map(|&c| if c == x0 { 0.0 } else { inf }).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(ivs.len());
    for &(lo, hi) in &ivs {
        let mut next = vec![inf; n];
        let mut bp = vec![0usize; n];
        for j in 0..n {
            if cand[j] < lo || cand[j] > hi {
                continue;
            }
            for i in 0..n {
                let c = value[i] + (cand[j] - cand[i]).abs();
                if c < next[j] {
                    next[j] = c;
                    bp[j] = i;
                }
            }
        }
        value = next;
        back.push(bp);
    }
    let (mut arg, cost) = value
        .iter()
        .copied()
        .enumerate()
        .fold((0, inf), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if !cost.is_finite() {
        return Err(Error::input("interval instance has an empty body"));
    }
    let mut idx = Vec::with_capacity(ivs.len());
    for bp in back.iter().rev() {
        idx.push(arg);
        arg = bp[arg];
    }
    idx.reverse();
    let points = idx.into_iter().map(|i| Point::scalar(cand[i])).collect();
    Ok(CbcRun { points, cost })
}

/// Offline optimum of the epigraph reduction of an `l1`-movement instance.
///
/// With `l1` movement in `d + 1` dimensions the height and position terms
/// separate: the optimal chaser sits at height `f_t(a_t)` in `K_t`, drops
/// straight down to `(a_t, 0)` in `P_t`, and `a_t` minimizes
/// `sum 2 f_t(a_t) + ||a_t - a_{t-1}||_1`. That is the SOCO optimum with
/// doubled hitting costs, solved here on `grid`.
pub fn epigraph_cbc_opt_l1(soco: &Instance, grid: &GridSpec) -> Result<CbcRun> {
    if soco.movement().norm_order() != Some(NormOrder::L1) {
        return Err(Error::unsupported("separable epigraph oracle needs l1 movement"));
    }
    let doubled: Vec<HittingCost> = soco
        .hitting()
        .iter()
        .map(|f| f.scaled(2.0))
        .collect::<Result<_>>()?;
    let twice = Instance::new(soco.start().clone(), doubled, soco.movement().clone(), None)?;
    let opt = offline_optimal_grid(&twice, grid)?;
    let points = embed_soco_opt_in_cbc(opt.trajectory.points(), soco.hitting())?;
    let cbc = epigraph_reduce(soco)?;
    let cost = cbc.cost(&points)?;
    Ok(CbcRun { points, cost })
}

/// Encode box or interval bodies as `0 / penalty` SOCO hitting costs.
pub fn cbc_as_soco(inst: &CbcInstance, penalty: f64) -> Result<Instance> {
    let hitting = inst
        .bodies()
        .iter()
        .map(|b| {
            let (lo, hi) = match b {
                ConvexBody::Interval { lo, hi } => (vec![*lo], vec![*hi]),
                ConvexBody::Box { lo, hi } => (lo.clone(), hi.clone()),
                _ => return Err(Error::unsupported("only box bodies have an indicator encoding")),
            };
            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
            HittingCost::new(CostShape::Indicator { lo, hi, penalty }, Point::from(mid))
        })
        .collect::<Result<_>>()?;
    Instance::new(inst.start().clone(), hitting, inst.movement().clone(), None)
}

/// SOCO total of a mapped trajectory.
pub fn soco_cost(soco: &Instance, points: &[Point]) -> Result<f64> {
    Ok(evaluate_total_cost(soco, points)?.total())
}
