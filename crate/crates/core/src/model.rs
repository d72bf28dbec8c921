//! Instances, hitting and movement costs, trajectories and total-cost
//! evaluation.
//!
//! A trajectory `x_1..x_T` started from `x_0` costs
//! `sum_t f_t(x_t) + c(x_t, x_{t-1})`; the first movement term is charged
//! against the fixed start.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value standing in for `+inf` outside the GLB feasible orthant.
pub const GLB_PENALTY: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("point must have dimension >= 1"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn scalar(x: f64) -> Self {
        Point(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn diff(&self, other: &Point) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    /// Coordinatewise mean of a nonempty set of equal-dimension points.
    pub fn mean<'a>(points: impl IntoIterator<Item = &'a Point>) -> Point {
        let mut acc: Vec<f64> = Vec::new();
        let mut n = 0usize;
        for p in points {
            if acc.is_empty() {
                acc = vec![0.0; p.dim()];
            }
            for (a, c) in acc.iter_mut().zip(&p.0) {
                *a += c;
            }
            n += 1;
        }
        let scale = 1.0 / n as f64;
        Point(acc.into_iter().map(|a| a * scale).collect())
    }

    /// Append one coordinate (used by the epigraph lift).
    pub fn lifted(&self, last: f64) -> Point {
        let mut c = self.0.clone();
        c.push(last);
        Point(c)
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Point(coords)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormOrder {
    L1,
    L2,
    Linf,
}

impl NormOrder {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormOrder::L1 => v.iter().map(|a| a.abs()).sum(),
            NormOrder::L2 => v.iter().map(|a| a * a).sum::<f64>().sqrt(),
            NormOrder::Linf => v.iter().fold(0.0, |m, a| m.max(a.abs())),
        }
    }

    pub fn dist(self, a: &Point, b: &Point) -> f64 {
        self.norm(&a.diff(b))
    }

    /// Largest ratio `||v||_p / ||v||_2` over `R^d`.
    pub fn l2_ratio(self, dim: usize) -> f64 {
        match self {
            NormOrder::L1 => (dim as f64).sqrt(),
            NormOrder::L2 | NormOrder::Linf => 1.0,
        }
    }
}

/// The analytic shape of a hitting cost, centred at its minimizer `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CostShape {
    /// `alpha * ||x - v||_p`.
    Polyhedral { alpha: f64, norm: NormOrder },
    /// `(m/2) * ||x - v||_2^2`.
    StronglyConvex { m: f64 },
    /// `e0 . x + sum_s mu_s |x_s - v_s|` on the nonnegative orthant.
    Glb { e0: Vec<f64>, mu: Vec<f64> },
    /// `(m/2) ||x - v||^2 + eps * sum_i (1 - cos(k (x_i - v_i)))`.
    Ripple { m: f64, eps: f64, k: f64 },
    /// Zero on the box `[lo, hi]`, `penalty` outside.
    Indicator {
        lo: Vec<f64>,
        hi: Vec<f64>,
        penalty: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Polyhedral,
    StronglyConvex,
    Glb,
    Ripple,
    Indicator,
}

impl FamilyTag {
    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Polyhedral => "polyhedral",
            FamilyTag::StronglyConvex => "strongly_convex",
            FamilyTag::Glb => "glb",
            FamilyTag::Ripple => "ripple",
            FamilyTag::Indicator => "indicator",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingCost {
    shape: CostShape,
    minimizer: Point,
    min_value: f64,
    convexifier: Option<f64>,
}

impl HittingCost {
    pub fn new(shape: CostShape, minimizer: Point) -> Result<Self> {
        let d = minimizer.dim();
        match &shape {
            CostShape::Polyhedral { alpha, .. } if !(*alpha > 0.0) => {
                return Err(Error::param(format!("polyhedral alpha must be > 0, got {alpha}")))
            }
            CostShape::StronglyConvex { m } if !(*m > 0.0) => {
                return Err(Error::param(format!("strongly convex m must be > 0, got {m}")))
            }
            CostShape::Glb { e0, mu } => {
                if e0.len() != d || mu.len() != d {
                    return Err(Error::param("glb parameter vectors must match the dimension"));
                }
                if minimizer.coords().iter().any(|&v| v < 0.0) {
                    return Err(Error::param("glb minimizer must be componentwise >= 0"));
                }
            }
            CostShape::Ripple { m, eps, k } => {
                if !(*m >= 0.0) || !(*eps >= 0.0) || !(*k > 0.0) {
                    return Err(Error::param(format!(
                        "ripple needs m >= 0, eps >= 0, k > 0; got m={m}, eps={eps}, k={k}"
                    )));
                }
            }
            CostShape::Indicator { lo, hi, penalty } => {
                if lo.len() != d || hi.len() != d {
                    return Err(Error::param("indicator box must match the dimension"));
                }
                if lo.iter().zip(hi).any(|(a, b)| a > b) || !(*penalty > 0.0) {
                    return Err(Error::param("indicator box needs lo <= hi and penalty > 0"));
                }
            }
            _ => {}
        }
        let convexifier = Some(match &shape {
            CostShape::Ripple { m, eps, k } => (eps * k * k - m).max(0.0),
            _ => 0.0,
        });
        let mut cost = HittingCost {
            shape,
            minimizer,
            min_value: 0.0,
            convexifier,
        };
        cost.min_value = cost.eval(&cost.minimizer);
        Ok(cost)
    }

    pub fn shape(&self) -> &CostShape {
        &self.shape
    }

    pub fn minimizer(&self) -> &Point {
        &self.minimizer
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn convexifier(&self) -> Option<f64> {
        self.convexifier
    }

    pub fn dim(&self) -> usize {
        self.minimizer.dim()
    }

    pub fn family_tag(&self) -> FamilyTag {
        match self.shape {
            CostShape::Polyhedral { .. } => FamilyTag::Polyhedral,
            CostShape::StronglyConvex { .. } => FamilyTag::StronglyConvex,
            CostShape::Glb { .. } => FamilyTag::Glb,
            CostShape::Ripple { .. } => FamilyTag::Ripple,
            CostShape::Indicator { .. } => FamilyTag::Indicator,
        }
    }

    pub fn is_convex(&self) -> bool {
        self.convexifier == Some(0.0)
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let v = self.minimizer.coords();
        let x = x.coords();
        match &self.shape {
            CostShape::Polyhedral { alpha, norm } => {
                let r: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - b).collect();
                alpha * norm.norm(&r)
            }
            CostShape::StronglyConvex { m } => 0.5 * m * sq_dist(x, v),
            CostShape::Glb { e0, mu } => {
                if x.iter().any(|&a| a < 0.0) {
                    return GLB_PENALTY;
                }
                let mut s = 0.0;
                for i in 0..x.len() {
                    s += e0[i] * x[i] + mu[i] * (x[i] - v[i]).abs();
                }
                s
            }
            CostShape::Ripple { m, eps, k } => {
                let mut ripple = 0.0;
                for (a, b) in x.iter().zip(v) {
                    ripple += 1.0 - (k * (a - b)).cos();
                }
                0.5 * m * sq_dist(x, v) + eps * ripple
            }
            CostShape::Indicator { lo, hi, penalty } => {
                let inside = x
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(a, (l, h))| *a >= *l && *a <= *h);
                if inside {
                    0.0
                } else {
                    *penalty
                }
            }
        }
    }

    /// Gradient for the smooth families; `None` for nonsmooth shapes.
    pub fn gradient(&self, x: &Point) -> Option<Vec<f64>> {
        let v = self.minimizer.coords();
        match &self.shape {
            CostShape::StronglyConvex { m } => {
                Some(x.coords().iter().zip(v).map(|(a, b)| m * (a - b)).collect())
            }
            CostShape::Ripple { m, eps, k } => Some(
                x.coords()
                    .iter()
                    .zip(v)
                    .map(|(a, b)| m * (a - b) + eps * k * (k * (a - b)).sin())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Analytic order-of-growth constant of this cost against `movement`,
    /// when the pairing is one of the known families.
    pub fn order_of_growth(&self, movement: &MovementCost) -> Option<f64> {
        match (&self.shape, movement) {
            (CostShape::Polyhedral { alpha, norm }, mv) if mv.norm_order() == Some(*norm) => {
                Some(alpha / 2.0)
            }
            (CostShape::StronglyConvex { m }, MovementCost::SqL2Half) => Some(m / 2.0),
            (CostShape::Ripple { m, .. }, MovementCost::SqL2Half) if *m > 0.0 => Some(m / 2.0),
            (CostShape::Glb { e0, .. }, MovementCost::RectifiedLinear { beta }) => Some(
                0.5 * e0
                    .iter()
                    .zip(beta)
                    .map(|(e, b)| e / b)
                    .fold(f64::INFINITY, f64::min),
            ),
            _ => None,
        }
    }

    /// The same family multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<HittingCost> {
        if !(factor > 0.0) {
            return Err(Error::param("scale factor must be > 0"));
        }
        let shape = match &self.shape {
            CostShape::Polyhedral { alpha, norm } => CostShape::Polyhedral {
                alpha: alpha * factor,
                norm: *norm,
            },
            CostShape::StronglyConvex { m } => CostShape::StronglyConvex { m: m * factor },
            CostShape::Glb { e0, mu } => CostShape::Glb {
                e0: e0.iter().map(|e| e * factor).collect(),
                mu: mu.iter().map(|u| u * factor).collect(),
            },
            CostShape::Ripple { m, eps, k } => CostShape::Ripple {
                m: m * factor,
                eps: eps * factor,
                k: *k,
            },
            CostShape::Indicator { lo, hi, penalty } => CostShape::Indicator {
                lo: lo.clone(),
                hi: hi.clone(),
                penalty: penalty * factor,
            },
        };
        HittingCost::new(shape, self.minimizer.clone())
    }

    /// Lipschitz bound (w.r.t. the Euclidean norm) on the box `[lo, hi]^d`.
    /// Indicator costs are not Lipschitz and report `inf`.
    pub fn lipschitz_on(&self, lo: f64, hi: f64) -> f64 {
        let d = self.dim() as f64;
        let reach = self
            .minimizer
            .coords()
            .iter()
            .map(|v| (v - lo).abs().max((hi - v).abs()))
            .fold(0.0, f64::max);
        match &self.shape {
            CostShape::Polyhedral { alpha, norm } => alpha * norm.l2_ratio(self.dim()),
            CostShape::StronglyConvex { m } => m * reach * d.sqrt(),
            CostShape::Glb { e0, mu } => e0
                .iter()
                .zip(mu)
                .map(|(e, u)| (e + u) * (e + u))
                .sum::<f64>()
                .sqrt(),
            CostShape::Ripple { m, eps, k } => (m * reach + eps * k) * d.sqrt(),
            CostShape::Indicator { .. } => f64::INFINITY,
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Movement cost `c(x_t, x_{t-1})`; the first argument is the new point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MovementCost {
    NormL1,
    NormL2,
    NormLinf,
    /// `0.5 * ||x - y||_2^2`.
    SqL2Half,
    /// `beta . (x - y)^+`, charging only for increases.
    RectifiedLinear { beta: Vec<f64> },
}

impl MovementCost {
    pub fn from_norm(norm: NormOrder) -> Self {
        match norm {
            NormOrder::L1 => MovementCost::NormL1,
            NormOrder::L2 => MovementCost::NormL2,
            NormOrder::Linf => MovementCost::NormLinf,
        }
    }

    pub fn eval(&self, x: &Point, prev: &Point) -> f64 {
        match self {
            MovementCost::NormL1 => NormOrder::L1.dist(x, prev),
            MovementCost::NormL2 => NormOrder::L2.dist(x, prev),
            MovementCost::NormLinf => NormOrder::Linf.dist(x, prev),
            MovementCost::SqL2Half => 0.5 * x.dist_sq(prev),
            MovementCost::RectifiedLinear { beta } => x
                .coords()
                .iter()
                .zip(prev.coords())
                .zip(beta)
                .map(|((a, b), w)| w * (a - b).max(0.0))
                .sum(),
        }
    }

    /// Approximate-triangle constant.
    pub fn eta(&self) -> f64 {
        match self {
            MovementCost::SqL2Half => 2.0,
            _ => 1.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, MovementCost::RectifiedLinear { .. })
    }

    pub fn norm_order(&self) -> Option<NormOrder> {
        match self {
            MovementCost::NormL1 => Some(NormOrder::L1),
            MovementCost::NormL2 => Some(NormOrder::L2),
            MovementCost::NormLinf => Some(NormOrder::Linf),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MovementCost::NormL1 => "norm_l1",
            MovementCost::NormL2 => "norm_l2",
            MovementCost::NormLinf => "norm_linf",
            MovementCost::SqL2Half => "sq_l2_half",
            MovementCost::RectifiedLinear { .. } => "rectified_linear",
        }
    }

    /// Gradient in the first argument, for the smooth kind only.
    pub fn gradient_new(&self, x: &Point, prev: &Point) -> Option<Vec<f64>> {
        match self {
            MovementCost::SqL2Half => Some(x.diff(prev)),
            _ => None,
        }
    }

    /// Lipschitz bound in either argument on the box `[lo, hi]^dim`.
    pub fn lipschitz_on(&self, lo: f64, hi: f64, dim: usize) -> f64 {
        let d = dim as f64;
        match self {
            MovementCost::NormL1 => d.sqrt(),
            MovementCost::NormL2 | MovementCost::NormLinf => 1.0,
            MovementCost::SqL2Half => (hi - lo).abs() * d.sqrt(),
            MovementCost::RectifiedLinear { beta } => {
                beta.iter().map(|b| b * b).sum::<f64>().sqrt()
            }
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if let MovementCost::RectifiedLinear { beta } = self {
            if beta.len() != dim {
                return Err(Error::param("rectified-linear beta must match the dimension"));
            }
            if beta.iter().any(|b| !(*b > 0.0)) {
                return Err(Error::param("rectified-linear beta must be > 0"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    start: Point,
    hitting: Vec<HittingCost>,
    movement: MovementCost,
    lambda: Option<f64>,
}

impl Instance {
    pub fn new(
        start: Point,
        hitting: Vec<HittingCost>,
        movement: MovementCost,
        lambda: Option<f64>,
    ) -> Result<Self> {
        if hitting.is_empty() {
            return Err(Error::input("instance horizon must be >= 1"));
        }
        let d = start.dim();
        if let Some(t) = hitting.iter().position(|f| f.dim() != d) {
            return Err(Error::input(format!(
                "hitting cost {} has dimension {}, expected {d}",
                t + 1,
                hitting[t].dim()
            )));
        }
        movement.check_dim(d)?;
        if let Some(l) = lambda {
            if !(l > 0.0) {
                return Err(Error::param(format!("lambda must be > 0, got {l}")));
            }
        }
        Ok(Instance {
            start,
            hitting,
            movement,
            lambda,
        })
    }

    /// Build an instance and derive `lambda` from the analytic pairing of
    /// every hitting cost with the movement cost (minimum over `t`).
    pub fn with_analytic_lambda(
        start: Point,
        hitting: Vec<HittingCost>,
        movement: MovementCost,
    ) -> Result<Self> {
        let lambda = analytic_lambda(&hitting, &movement);
        Instance::new(start, hitting, movement, lambda)
    }

    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    pub fn horizon(&self) -> usize {
        self.hitting.len()
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn hitting(&self) -> &[HittingCost] {
        &self.hitting
    }

    /// Hitting cost `f_t`, `1 <= t <= T`.
    pub fn cost(&self, t: usize) -> &HittingCost {
        &self.hitting[t - 1]
    }

    /// Anchor point for timestep `t`: `v_t`, or the start when `t = 0`.
    pub fn anchor(&self, t: usize) -> &Point {
        if t == 0 {
            &self.start
        } else {
            self.hitting[t - 1].minimizer()
        }
    }

    pub fn movement(&self) -> &MovementCost {
        &self.movement
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.movement.eta()
    }

    /// Largest convexifier bound over all hitting costs.
    pub fn convexifier(&self) -> Option<f64> {
        self.hitting
            .iter()
            .map(|f| f.convexifier())
            .try_fold(0.0f64, |acc, a| a.map(|a| acc.max(a)))
    }

    pub fn is_convex(&self) -> bool {
        self.convexifier() == Some(0.0)
    }

    pub fn minimizers(&self) -> Vec<Point> {
        self.hitting.iter().map(|f| f.minimizer().clone()).collect()
    }

    /// Sampled check of `f_t(x) >= lambda (c(x, v_t) + c(v_t, x)) - tol`.
    /// Returns the first violating `(t, x)` if any.
    pub fn order_of_growth_violation<R: Rng>(
        &self,
        samples: usize,
        radius: f64,
        tol: f64,
        rng: &mut R,
    ) -> Option<(usize, Point)> {
        let lambda = self.lambda?;
        for _ in 0..samples {
            let t = rng.gen_range(1..=self.horizon());
            let f = self.cost(t);
            let x: Point = f
                .minimizer()
                .coords()
                .iter()
                .map(|v| {
                    let lo = if f.family_tag() == FamilyTag::Glb {
                        (v - radius).max(0.0)
                    } else {
                        v - radius
                    };
                    rng.gen_range(lo..=v + radius)
                })
                .collect::<Vec<_>>()
                .into();
            let v = f.minimizer();
            let rhs = lambda * (self.movement.eval(&x, v) + self.movement.eval(v, &x));
            if f.eval(&x) < rhs - tol {
                return Some((t, x));
            }
        }
        None
    }
}

pub(crate) fn analytic_lambda(hitting: &[HittingCost], movement: &MovementCost) -> Option<f64> {
    hitting
        .iter()
        .map(|f| f.order_of_growth(movement))
        .try_fold(f64::INFINITY, |acc, l| l.map(|l| acc.min(l)))
        .filter(|l| l.is_finite() && *l > 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    points: Vec<Point>,
    hitting: Vec<f64>,
    movement: Vec<f64>,
    total: f64,
}

impl Trajectory {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, t: usize) -> &Point {
        &self.points[t - 1]
    }

    /// Per-step hitting costs `H_1..H_T`.
    pub fn hitting(&self) -> &[f64] {
        &self.hitting
    }

    /// Per-step movement costs `M_1..M_T`.
    pub fn movement(&self) -> &[f64] {
        &self.movement
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    /// `M_1..M_T, 0`: the movement sequence with the `M_{T+1} = 0` pad.
    pub fn padded_movement(&self) -> Vec<f64> {
        pad_movement(&self.movement)
    }
}

/// Append the trailing `M_{T+1} = 0` term.
pub fn pad_movement(movement: &[f64]) -> Vec<f64> {
    let mut m = movement.to_vec();
    m.push(0.0);
    m
}

/// Total cost of `points` on `instance`.
pub fn evaluate_total_cost(instance: &Instance, points: &[Point]) -> Result<Trajectory> {
    if points.len() != instance.horizon() {
        return Err(Error::input(format!(
            "trajectory has {} points, horizon is {}",
            points.len(),
            instance.horizon()
        )));
    }
    evaluate_prefix(
        instance.start(),
        instance.hitting(),
        instance.movement(),
        points,
    )
}

/// Cost of `points` against the first `points.len()` hitting costs.
pub fn evaluate_prefix(
    start: &Point,
    hitting: &[HittingCost],
    movement: &MovementCost,
    points: &[Point],
) -> Result<Trajectory> {
    if points.len() > hitting.len() {
        return Err(Error::input("more points than hitting costs"));
    }
    let d = start.dim();
    if let Some(t) = points.iter().position(|p| p.dim() != d) {
        return Err(Error::input(format!(
            "point {} has dimension {}, expected {d}",
            t + 1,
            points[t].dim()
        )));
    }
    let mut hit = Vec::with_capacity(points.len());
    let mut mov = Vec::with_capacity(points.len());
    let mut total = 0.0;
    let mut prev = start;
    for (p, f) in points.iter().zip(hitting) {
        let h = f.eval(p);
        let m = movement.eval(p, prev);
        total += h;
        total += m;
        hit.push(h);
        mov.push(m);
        prev = p;
    }
    Ok(Trajectory {
        points: points.to_vec(),
        hitting: hit,
        movement: mov,
        total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    /// `alg / opt`; `inf` when `opt = 0 < alg`.
    pub ratio: f64,
    /// Set when `opt = 0`.
    pub degenerate: bool,
}

pub fn competitive_ratio(alg_cost: f64, opt_cost: f64) -> Result<RatioReport> {
    if !(alg_cost >= 0.0) || !(opt_cost >= 0.0) {
        return Err(Error::input(format!(
            "costs must be nonnegative, got alg={alg_cost}, opt={opt_cost}"
        )));
    }
    Ok(if opt_cost > 0.0 {
        RatioReport {
            ratio: alg_cost / opt_cost,
            degenerate: false,
        }
    } else if alg_cost == 0.0 {
        RatioReport {
            ratio: 1.0,
            degenerate: true,
        }
    } else {
        RatioReport {
            ratio: f64::INFINITY,
            degenerate: true,
        }
    })
}
