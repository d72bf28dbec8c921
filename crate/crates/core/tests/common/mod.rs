//! Reference oracles written independently of the crate's solvers.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soco_core::families::FamilyVariant;
use soco_core::game::{generate_oblivious_instance, snap_instance, PathModel};
use soco_core::model::{Instance, Point};
use soco_core::window::GridSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random-walk instance, optionally snapped to `grid`.
pub fn walk_instance(
    family: &FamilyVariant,
    horizon: usize,
    start: Vec<f64>,
    sigma: f64,
    grid: Option<&GridSpec>,
    seed: u64,
) -> Instance {
    let inst = generate_oblivious_instance(
        family,
        &PathModel::RandomWalk { sigma },
        horizon,
        &Point::new(start).unwrap(),
        &mut rng(seed),
    )
    .unwrap();
    match grid {
        Some(g) => snap_instance(&inst, g).unwrap(),
        None => inst,
    }
}

/// `sum_t f_t(x_t) + c(x_t, x_{t-1})` with `x_0` the start.
pub fn total_cost(inst: &Instance, xs: &[Point]) -> f64 {
    let mut prev = inst.start().clone();
    let mut total = 0.0;
    for (t, x) in xs.iter().enumerate() {
        total += inst.cost(t + 1).eval(x);
        total += inst.movement().eval(x, &prev);
        prev = x.clone();
    }
    total
}

/// Per-step hitting and movement costs of a trajectory.
pub fn breakdown(inst: &Instance, xs: &[Point]) -> (Vec<f64>, Vec<f64>) {
    let mut prev = inst.start().clone();
    let mut h = Vec::new();
    let mut m = Vec::new();
    for (t, x) in xs.iter().enumerate() {
        h.push(inst.cost(t + 1).eval(x));
        m.push(inst.movement().eval(x, &prev));
        prev = x.clone();
    }
    (h, m)
}

/// Anchors of phase `h`: `{t in [1, T] : t = h mod w}`.
pub fn phase_anchors(horizon: usize, w: usize, h: usize) -> Vec<bool> {
    (1..=horizon).map(|t| t % w == h % w).collect()
}

/// Dense Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Minimizer of `sum (m/2)||x_t - v_t||^2 + (1/2)||x_t - x_{t-1}||^2` with
/// `x_t = v_t` wherever `pinned[t-1]`, from the stationarity equations.
pub fn quadratic_opt(m: f64, start: &Point, vs: &[Point], pinned: &[bool]) -> Vec<Point> {
    let n = vs.len();
    let d = start.dim();
    let mut out = vec![vec![0.0; d]; n];
    for k in 0..d {
        let mut a = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        for t in 0..n {
            if pinned[t] {
                a[t][t] = 1.0;
                b[t] = vs[t][k];
                continue;
            }
            a[t][t] = m + 1.0 + if t + 1 < n { 1.0 } else { 0.0 };
            b[t] = m * vs[t][k];
            if t == 0 {
                b[t] += start[k];
            } else {
                a[t][t - 1] = -1.0;
            }
            if t + 1 < n {
                a[t][t + 1] = -1.0;
            }
        }
        for (t, x) in solve_dense(a, b).into_iter().enumerate() {
            out[t][k] = x;
        }
    }
    out.into_iter().map(Point::from).collect()
}

/// Exact optimum over 1-D candidates: the lattice at free steps and the
/// minimizer itself at pinned steps. Returns the cost and trajectory.
pub fn lattice_opt_1d(inst: &Instance, lattice: &[f64], pinned: &[bool]) -> (f64, Vec<Point>) {
    assert_eq!(inst.dim(), 1);
    let horizon = inst.horizon();
    let mut cands: Vec<Vec<f64>> = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        if pinned[t - 1] {
            cands.push(vec![inst.cost(t).minimizer()[0]]);
        } else {
            cands.push(lattice.to_vec());
        }
    }
    let c = inst.movement();
    let x0 = inst.start().clone();
    let mut value: Vec<f64> = cands[0]
        .iter()
        .map(|&x| {
            let p = Point::scalar(x);
            inst.cost(1).eval(&p) + c.eval(&p, &x0)
        })
        .collect();
    let mut back: Vec<Vec<usize>> = vec![Vec::new()];
    for t in 1..horizon {
        let f = inst.cost(t + 1);
        let mut next = Vec::with_capacity(cands[t].len());
        let mut bp = Vec::with_capacity(cands[t].len());
        for &x in &cands[t] {
            let p = Point::scalar(x);
            let (mut best, mut arg) = (f64::INFINITY, 0);
            for (i, &y) in cands[t - 1].iter().enumerate() {
                let v = value[i] + c.eval(&p, &Point::scalar(y));
                if v < best {
                    best = v;
                    arg = i;
                }
            }
            next.push(best + f.eval(&p));
            bp.push(arg);
        }
        value = next;
        back.push(bp);
    }
    let (mut arg, _) = value
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let mut idx = vec![0; horizon];
    for t in (0..horizon).rev() {
        idx[t] = arg;
        if t > 0 {
            arg = back[t][arg];
        }
    }
    let xs: Vec<Point> = (0..horizon).map(|t| Point::scalar(cands[t][idx[t]])).collect();
    // Re-evaluate to report the cost with the same summation order as callers.
    (total_cost(inst, &xs), xs)
}

pub fn quadratic_m(family: &FamilyVariant) -> Option<f64> {
    match family {
        FamilyVariant::StronglyConvex { m } => Some(*m),
        _ => None,
    }
}

/// Reference optimum: dense solve for quadratics, lattice DP otherwise.
pub fn reference_opt(
    family: &FamilyVariant,
    inst: &Instance,
    lattice: &[f64],
    pinned: &[bool],
) -> (f64, Vec<Point>) {
    match quadratic_m(family) {
        Some(m) => {
            let xs = quadratic_opt(m, inst.start(), &inst.minimizers(), pinned);
            (total_cost(inst, &xs), xs)
        }
        None => lattice_opt_1d(inst, lattice, pinned),
    }
}
