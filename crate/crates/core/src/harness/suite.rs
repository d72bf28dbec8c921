use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{AlgorithmKind, AlgorithmSpec, BoundCheck, ExperimentConfig, InstanceSpec};
use crate::algorithms::{run_afhc, run_dsfhc, run_greedy, run_rsfhc_a, run_rsfhc_b, run_sfhc};
use crate::error::Result;
use crate::exec::{self, ExecPolicy};
use crate::game::{generate_oblivious_instance, snap_instance};
use crate::model::{competitive_ratio, Instance, Point};
use crate::oracle::offline_optimal;
use crate::window::GridSpec;

/// One splitmix64 step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3))
}

/// Seed for a run, derived only from the master seed and the labels that
/// identify it: `splitmix64(splitmix64(seed ^ fnv(instance)) ^ fnv(label))`.
/// An empty label gives the instance-generation seed.
pub fn derive_seed(seed: u64, instance_id: &str, label: &str) -> u64 {
    let base = splitmix64(seed ^ fnv1a(instance_id));
    if label.is_empty() {
        base
    } else {
        splitmix64(base ^ fnv1a(label))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub algorithm: String,
    pub w: usize,
    pub seed: u64,
    pub cost: Option<f64>,
    pub opt_cost: Option<f64>,
    pub ratio: Option<f64>,
    pub bound_value: Option<f64>,
    pub within_bound: bool,
    pub tolerance_budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub algorithm: String,
    pub w: usize,
    pub runs: usize,
    pub errors: usize,
    pub violations: usize,
    pub max_ratio: Option<f64>,
    /// Smallest `bound_value + budget - ratio` over checked runs.
    pub min_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub rows: usize,
    pub violations: usize,
    pub errors: usize,
    pub groups: Vec<GroupSummary>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutput {
    pub rows: Vec<ResultRow>,
    pub summary: SuiteSummary,
}

impl SuiteOutput {
    /// True when every row is within its bound.
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.within_bound)
    }
}

struct Task<'a> {
    instance: &'a InstanceSpec,
    algorithm: &'a AlgorithmSpec,
    w: usize,
    seed: u64,
}

/// Run every configured combination; failures are recorded in their row.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteOutput> {
    config.validate()?;
    let checks = config.bound_checks()?;
    let seeds = config.seeds.expand();
    let mut tasks = Vec::new();
    for inst in &config.instances {
        for &seed in &seeds {
            for alg in &config.algorithms {
                for &w in &alg.ws {
                    tasks.push(Task {
                        instance: inst,
                        algorithm: alg,
                        w,
                        seed,
                    });
                }
            }
        }
    }
    let rows = exec::map_slice(ExecPolicy::default(), &tasks, |task| {
        run_task(task, &checks, config).unwrap_or_else(|e| ResultRow {
            instance_id: task.instance.id().to_string(),
            algorithm: task.algorithm.label(),
            w: task.w,
            seed: task.seed,
            cost: None,
            opt_cost: None,
            ratio: None,
            bound_value: None,
            within_bound: false,
            tolerance_budget: 0.0,
            error: Some(e.to_string()),
        })
    });
    let summary = summarize(&rows);
    Ok(SuiteOutput { rows, summary })
}

pub(crate) fn build_instance(spec: &InstanceSpec, seed: u64) -> Result<Instance> {
    match spec {
        InstanceSpec::Inline { instance, .. } => instance.to_instance(),
        InstanceSpec::Generator {
            id,
            family,
            path,
            horizon,
            x0,
            snap,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, id, ""));
            let inst = generate_oblivious_instance(family, path, *horizon, &Point::new(x0.clone())?, &mut rng)?;
            match snap {
                Some(g) => snap_instance(&inst, g),
                None => Ok(inst),
            }
        }
    }
}

fn run_task(task: &Task<'_>, checks: &[BoundCheck], config: &ExperimentConfig) -> Result<ResultRow> {
    let instance = build_instance(task.instance, task.seed)?;
    let alg = task.algorithm;
    let w = task.w;
    let label = alg.label();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(task.seed, task.instance.id(), &format!("{label}/{w}")));
    let traj = match alg.name {
        AlgorithmKind::Greedy => run_greedy(&instance)?,
        AlgorithmKind::Sfhc => run_sfhc(&instance, w, alg.h, &alg.solver)?,
        AlgorithmKind::Dsfhc => run_dsfhc(&instance, w, &alg.solver)?,
        AlgorithmKind::RsfhcA => run_rsfhc_a(&instance, w, &mut rng, &alg.solver)?.trajectory,
        AlgorithmKind::RsfhcB => run_rsfhc_b(&instance, w, &mut rng, &alg.solver)?.trajectory,
        AlgorithmKind::Afhc => run_afhc(&instance, w, &alg.solver)?,
    };
    let opt = offline_optimal(&instance, config.oracle.grid.as_ref())?;
    let ratio = competitive_ratio(traj.total(), opt.cost)?;

    let alg_resolution = if alg.name == AlgorithmKind::Greedy {
        None
    } else {
        alg.solver.prepare(&instance).resolution_for(&instance)
    };
    let grid = match (alg.solver, config.oracle.grid) {
        (crate::window::Solver::Grid { grid: Some(g) }, _) => g,
        (_, Some(g)) => g,
        _ => GridSpec::for_instance(&instance),
    };
    let spacing = alg_resolution.into_iter().chain(opt.resolution).fold(0.0, f64::max);
    let budget_abs = 1e-8 + grid_budget(&instance, &grid, spacing);
    let budget = if opt.cost > 0.0 { budget_abs / opt.cost } else { budget_abs };

    let bound = checks.iter().find_map(|c| c.bound(alg.name, w, &instance));
    let within = match bound {
        Some(b) => ratio.ratio <= b + budget,
        None => true,
    };
    Ok(ResultRow {
        instance_id: task.instance.id().to_string(),
        algorithm: label,
        w,
        seed: task.seed,
        cost: Some(traj.total()),
        opt_cost: Some(opt.cost),
        ratio: Some(ratio.ratio),
        bound_value: bound,
        within_bound: within,
        tolerance_budget: budget,
        error: None,
    })
}

/// `T (spacing / 2) sqrt(d) (L_f + 2 L_c)` on the lattice box; zero when no
/// lattice participated.
pub fn grid_budget(instance: &Instance, grid: &GridSpec, spacing: f64) -> f64 {
    if spacing == 0.0 {
        return 0.0;
    }
    let d = instance.dim();
    let lf = instance
        .hitting()
        .iter()
        .map(|f| f.lipschitz_on(grid.lo, grid.hi))
        .fold(0.0, f64::max);
    let lc = instance.movement().lipschitz_on(grid.lo, grid.hi, d);
    instance.horizon() as f64 * (spacing / 2.0) * (d as f64).sqrt() * (lf + 2.0 * lc)
}

fn summarize(rows: &[ResultRow]) -> SuiteSummary {
    let mut groups: BTreeMap<(String, usize), GroupSummary> = BTreeMap::new();
    for r in rows {
        let g = groups
            .entry((r.algorithm.clone(), r.w))
            .or_insert_with(|| GroupSummary {
                algorithm: r.algorithm.clone(),
                w: r.w,
                runs: 0,
                errors: 0,
                violations: 0,
                max_ratio: None,
                min_margin: None,
            });
        g.runs += 1;
        if r.error.is_some() {
            g.errors += 1;
        } else if !r.within_bound {
            g.violations += 1;
        }
        if let Some(x) = r.ratio {
            g.max_ratio = Some(g.max_ratio.map_or(x, |m: f64| m.max(x)));
            if let Some(b) = r.bound_value {
                let margin = b + r.tolerance_budget - x;
                g.min_margin = Some(g.min_margin.map_or(margin, |m: f64| m.min(margin)));
            }
        }
    }
    SuiteSummary {
        rows: rows.len(),
        violations: rows.iter().filter(|r| r.error.is_none() && !r.within_bound).count(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        groups: groups.into_values().collect(),
    }
}
