//! Analytic cost families with known order-of-growth (`lambda`) and
//! approximate-triangle (`eta`) constants, and a sampling estimator for both.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CostShape, HittingCost, Instance, MovementCost, NormOrder, Point};

/// Denominators below this are skipped by the estimator.
pub const ESTIMATOR_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyVariant {
    Polyhedral {
        alpha: f64,
        #[serde(default = "default_norm")]
        norm: NormOrder,
    },
    StronglyConvex {
        m: f64,
    },
    Glb {
        e0: Vec<f64>,
        beta: Vec<f64>,
        mu: Vec<f64>,
    },
    Ripple {
        m: f64,
        eps: f64,
        k: f64,
    },
}

fn default_norm() -> NormOrder {
    NormOrder::L2
}

impl FamilyVariant {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyVariant::Polyhedral { .. } => "polyhedral",
            FamilyVariant::StronglyConvex { .. } => "strongly_convex",
            FamilyVariant::Glb { .. } => "glb",
            FamilyVariant::Ripple { .. } => "ripple",
        }
    }

    /// Build the family along `path`.
    pub fn build(&self, path: &[Point]) -> Result<Fragment> {
        match self {
            FamilyVariant::Polyhedral { alpha, norm } => make_polyhedral(*alpha, path, *norm),
            FamilyVariant::StronglyConvex { m } => make_strongly_convex(*m, path),
            FamilyVariant::Glb { e0, beta, mu } => make_glb(e0, beta, mu, path),
            FamilyVariant::Ripple { m, eps, k } => make_ripple(*m, *eps, *k, path),
        }
    }

    /// Analytic `(eta, lambda)`.
    pub fn constants(&self) -> (f64, f64) {
        match self {
            FamilyVariant::Polyhedral { alpha, .. } => (1.0, alpha / 2.0),
            FamilyVariant::StronglyConvex { m } => (2.0, m / 2.0),
            FamilyVariant::Glb { e0, beta, .. } => (1.0, glb_lambda(e0, beta)),
            FamilyVariant::Ripple { m, .. } => (2.0, m / 2.0),
        }
    }

    /// Convexifier bound (zero for the convex families).
    pub fn convexifier(&self) -> f64 {
        match self {
            FamilyVariant::Ripple { m, eps, k } => (eps * k * k - m).max(0.0),
            _ => 0.0,
        }
    }

    /// Whether minimizers must stay in the nonnegative orthant.
    pub fn nonnegative(&self) -> bool {
        matches!(self, FamilyVariant::Glb { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub variant: FamilyVariant,
    pub minimizer_path: Vec<Point>,
}

impl FamilyParams {
    pub fn build(&self) -> Result<Fragment> {
        self.variant.build(&self.minimizer_path)
    }
}

/// Hitting costs and movement of an instance, without the start point.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub hitting: Vec<HittingCost>,
    pub movement: MovementCost,
    pub lambda: f64,
    pub eta: f64,
}

impl Fragment {
    pub fn into_instance(self, start: Point) -> Result<Instance> {
        Instance::new(start, self.hitting, self.movement, Some(self.lambda))
    }
}

fn check_path(path: &[Point]) -> Result<usize> {
    let first = path
        .first()
        .ok_or_else(|| Error::param("minimizer path must be nonempty"))?;
    let d = first.dim();
    if path.iter().any(|p| p.dim() != d) {
        return Err(Error::param("minimizer path points must share a dimension"));
    }
    Ok(d)
}

fn build_costs(shape: CostShape, path: &[Point]) -> Result<Vec<HittingCost>> {
    path.iter()
        .map(|v| HittingCost::new(shape.clone(), v.clone()))
        .collect()
}

/// `f_t(x) = alpha ||x - v_t||_p` with `l_p` movement.
pub fn make_polyhedral(alpha: f64, path: &[Point], norm: NormOrder) -> Result<Fragment> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param(format!("polyhedral alpha must be > 0, got {alpha}")));
    }
    check_path(path)?;
    Ok(Fragment {
        hitting: build_costs(CostShape::Polyhedral { alpha, norm }, path)?,
        movement: MovementCost::from_norm(norm),
        lambda: alpha / 2.0,
        eta: 1.0,
    })
}

/// `f_t(x) = (m/2) ||x - v_t||^2` with `0.5 ||.||^2` movement.
pub fn make_strongly_convex(m: f64, path: &[Point]) -> Result<Fragment> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::param(format!("strongly convex m must be > 0, got {m}")));
    }
    check_path(path)?;
    Ok(Fragment {
        hitting: build_costs(CostShape::StronglyConvex { m }, path)?,
        movement: MovementCost::SqL2Half,
        lambda: m / 2.0,
        eta: 2.0,
    })
}

fn glb_lambda(e0: &[f64], beta: &[f64]) -> f64 {
    0.5 * e0
        .iter()
        .zip(beta)
        .map(|(e, b)| e / b)
        .fold(f64::INFINITY, f64::min)
}

/// Load-balancing family: `e0 . x + sum_s mu_s |x_s - v_s|` on the orthant,
/// movement `beta . (x - y)^+`.
pub fn make_glb(e0: &[f64], beta: &[f64], mu: &[f64], path: &[Point]) -> Result<Fragment> {
    let d = check_path(path)?;
    if e0.len() != d || beta.len() != d || mu.len() != d {
        return Err(Error::param(format!(
            "glb vectors must have length {d} (e0={}, beta={}, mu={})",
            e0.len(),
            beta.len(),
            mu.len()
        )));
    }
    if e0.iter().chain(beta).any(|v| !(*v > 0.0)) {
        return Err(Error::param("glb e0 and beta must be > 0"));
    }
    if let Some(s) = (0..d).find(|&s| !(mu[s] > e0[s])) {
        return Err(Error::param(format!(
            "glb needs mu > e0 componentwise; component {s} has mu={} e0={}",
            mu[s], e0[s]
        )));
    }
    if path.iter().any(|p| p.coords().iter().any(|&c| c < 0.0)) {
        return Err(Error::param("glb minimizers must be componentwise >= 0"));
    }
    let shape = CostShape::Glb {
        e0: e0.to_vec(),
        mu: mu.to_vec(),
    };
    Ok(Fragment {
        hitting: build_costs(shape, path)?,
        movement: MovementCost::RectifiedLinear {
            beta: beta.to_vec(),
        },
        lambda: glb_lambda(e0, beta),
        eta: 1.0,
    })
}

/// Quadratic plus cosine ripple; non-convex when `eps k^2 > m`.
pub fn make_ripple(m: f64, eps: f64, k: f64, path: &[Point]) -> Result<Fragment> {
    if !(m > 0.0) || !(eps >= 0.0) || !(k > 0.0) {
        return Err(Error::param(format!(
            "ripple needs m > 0, eps >= 0, k > 0; got m={m}, eps={eps}, k={k}"
        )));
    }
    check_path(path)?;
    Ok(Fragment {
        hitting: build_costs(CostShape::Ripple { m, eps, k }, path)?,
        movement: MovementCost::SqL2Half,
        lambda: m / 2.0,
        eta: 2.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    pub lambda_hat: f64,
    pub eta_hat: f64,
    pub lambda_samples: usize,
    pub eta_samples: usize,
}

fn sample_around<R: Rng>(center: &Point, radius: f64, nonneg: bool, rng: &mut R) -> Point {
    center
        .coords()
        .iter()
        .map(|&c| {
            let lo = if nonneg { (c - radius).max(0.0) } else { c - radius };
            rng.gen_range(lo..=c + radius)
        })
        .collect::<Vec<_>>()
        .into()
}

/// Sampled estimates of the Condition I and II constants.
///
/// Condition I pairs are drawn uniformly in a box of half-width
/// `domain_radius` around a random `v_t`. Condition II triples are a mix of
/// free triples, triples with `y` on the segment `[x, z]`, and exact
/// midpoints.
pub fn estimate_condition_constants<R: Rng>(
    instance: &Instance,
    domain_radius: f64,
    samples: usize,
    rng: &mut R,
) -> Result<ConditionEstimate> {
    if samples == 0 {
        return Err(Error::param("samples must be >= 1"));
    }
    if !(domain_radius > 0.0) {
        return Err(Error::param("domain radius must be > 0"));
    }
    let c = instance.movement();
    let nonneg = instance
        .hitting()
        .iter()
        .any(|f| matches!(f.shape(), CostShape::Glb { .. }));

    let mut lambda_hat = f64::INFINITY;
    let mut lambda_n = 0usize;
    for _ in 0..samples {
        let t = rng.gen_range(1..=instance.horizon());
        let f = instance.cost(t);
        let v = f.minimizer();
        let x = sample_around(v, domain_radius, nonneg, rng);
        let denom = c.eval(&x, v) + c.eval(v, &x);
        if denom < ESTIMATOR_FLOOR {
            continue;
        }
        lambda_hat = lambda_hat.min(f.eval(&x) / denom);
        lambda_n += 1;
    }

    let center = instance.anchor(0).clone();
    let mut eta_hat: f64 = 0.0;
    let mut eta_n = 0usize;
    for i in 0..samples {
        let x = sample_around(&center, domain_radius, false, rng);
        let z = sample_around(&center, domain_radius, false, rng);
        let y = match i % 3 {
            0 => sample_around(&center, domain_radius, false, rng),
            1 => {
                let s: f64 = rng.gen_range(0.0..=1.0);
                lerp(&x, &z, s)
            }
            _ => lerp(&x, &z, 0.5),
        };
        let denom = c.eval(&x, &y) + c.eval(&y, &z);
        if denom < ESTIMATOR_FLOOR {
            continue;
        }
        eta_hat = eta_hat.max(c.eval(&x, &z) / denom);
        eta_n += 1;
    }

    if lambda_n == 0 || eta_n == 0 {
        return Err(Error::EstimationFailed(format!(
            "all samples skipped (lambda kept {lambda_n}, eta kept {eta_n})"
        )));
    }
    Ok(ConditionEstimate {
        lambda_hat,
        eta_hat,
        lambda_samples: lambda_n,
        eta_samples: eta_n,
    })
}

fn lerp(a: &Point, b: &Point, s: f64) -> Point {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x + s * (y - x))
        .collect::<Vec<_>>()
        .into()
}

/// Largest midpoint-convexity defect of `f(x) + (alpha/2)||x||^2` over
/// `samples` random segments in the box of half-width `radius` around the
/// minimizer. Nonpositive means no violation was found.
pub fn midpoint_convexity_defect<R: Rng>(
    f: &HittingCost,
    alpha: f64,
    radius: f64,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let g = |p: &Point| f.eval(p) + 0.5 * alpha * p.norm_sq();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let a = sample_around(f.minimizer(), radius, false, rng);
        let b = sample_around(f.minimizer(), radius, false, rng);
        let mid = lerp(&a, &b, 0.5);
        worst = worst.max(g(&mid) - 0.5 * (g(&a) + g(&b)));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path1(vals: &[f64]) -> Vec<Point> {
        vals.iter().map(|&v| Point::scalar(v)).collect()
    }

    #[test]
    fn polyhedral_values_and_constants() {
        let fr = make_polyhedral(2.0, &path1(&[0.0]), NormOrder::L2).unwrap();
        assert_eq!(fr.hitting[0].eval(&Point::scalar(1.0)), 2.0);
        assert_eq!(fr.hitting[0].eval(&Point::scalar(0.0)), 0.0);
        let fr = make_polyhedral(1.0, &path1(&[0.0]), NormOrder::L2).unwrap();
        assert_eq!((fr.lambda, fr.eta), (0.5, 1.0));
        assert!(make_polyhedral(0.0, &path1(&[0.0]), NormOrder::L2).is_err());
    }

    #[test]
    fn strongly_convex_values_and_constants() {
        let fr = make_strongly_convex(2.0, &path1(&[3.0])).unwrap();
        assert_eq!(fr.hitting[0].eval(&Point::scalar(4.0)), 1.0);
        assert_eq!(fr.hitting[0].eval(&Point::scalar(3.0)), 0.0);
        assert_eq!((fr.lambda, fr.eta), (1.0, 2.0));
        assert_eq!(fr.movement, MovementCost::SqL2Half);
        assert_eq!(fr.hitting[0].convexifier(), Some(0.0));
        assert!(make_strongly_convex(-1.0, &path1(&[0.0])).is_err());
    }

    #[test]
    fn glb_values_and_constants() {
        let fr = make_glb(&[1.0], &[2.0], &[2.0], &path1(&[0.0])).unwrap();
        assert_eq!(fr.lambda, 0.25);
        assert_eq!(fr.hitting[0].eval(&Point::scalar(0.0)), 0.0);
        let fr = make_glb(&[1.0], &[2.0], &[2.0], &path1(&[1.0])).unwrap();
        assert_eq!(fr.hitting[0].eval(&Point::scalar(3.0)), 7.0);
        assert!(make_glb(&[1.0], &[2.0], &[1.0], &path1(&[0.0])).is_err());
        assert!(make_glb(&[1.0], &[2.0], &[2.0], &path1(&[-1.0])).is_err());
    }

    #[test]
    fn ripple_reduces_to_quadratic_when_flat() {
        let r = make_ripple(2.0, 0.0, 6.0, &path1(&[1.0])).unwrap();
        let q = make_strongly_convex(2.0, &path1(&[1.0])).unwrap();
        for x in [-3.0, 0.2, 1.0, 5.5] {
            let p = Point::scalar(x);
            assert_eq!(r.hitting[0].eval(&p), q.hitting[0].eval(&p));
        }
        assert_eq!(r.lambda, q.lambda);
    }

    #[test]
    fn ripple_convexifier_is_midpoint_convex() {
        let fr = make_ripple(1.0, 1.0, 2.0, &path1(&[0.0])).unwrap();
        let alpha = fr.hitting[0].convexifier().unwrap();
        assert_eq!(alpha, 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let defect = midpoint_convexity_defect(&fr.hitting[0], alpha, 5.0, 1000, &mut rng);
        assert!(defect <= 1e-9, "defect {defect}");
        // Without the convexifier the shape is genuinely non-convex.
        let defect = midpoint_convexity_defect(&fr.hitting[0], 0.0, 5.0, 1000, &mut rng);
        assert!(defect > 0.0);
    }

    #[test]
    fn estimator_recovers_quadratic_constants() {
        let inst = make_strongly_convex(2.0, &path1(&[0.0, 1.0, -1.0]))
            .unwrap()
            .into_instance(Point::scalar(0.0))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est = estimate_condition_constants(&inst, 3.0, 4000, &mut rng).unwrap();
        assert!(est.eta_hat <= 2.0 + 1e-6 && est.eta_hat >= 2.0 - 1e-6);
        assert!(est.lambda_hat >= 1.0 - 1e-6);
    }

    #[test]
    fn estimator_l2_norm_eta_is_one() {
        let inst = make_polyhedral(2.0, &path1(&[0.0, 2.0]), NormOrder::L2)
            .unwrap()
            .into_instance(Point::scalar(0.0))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let est = estimate_condition_constants(&inst, 3.0, 3000, &mut rng).unwrap();
        assert!(est.eta_hat <= 1.0 + 1e-6);
        assert!((est.lambda_hat - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn estimator_rejects_bad_arguments() {
        let inst = make_strongly_convex(2.0, &path1(&[0.0]))
            .unwrap()
            .into_instance(Point::scalar(0.0))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(estimate_condition_constants(&inst, 1.0, 0, &mut rng).is_err());
        assert!(estimate_condition_constants(&inst, 0.0, 10, &mut rng).is_err());
    }
}
