//! Oblivious instance generators, the semi-adaptive reveal/commit/decide
//! game, anchor-probability estimation and the investment games.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::{gap_support, gen_anchor_sequence, AnchorSet};
use crate::error::{Error, Result};
use crate::families::FamilyVariant;
use crate::model::{evaluate_prefix, CostShape, HittingCost, Instance, MovementCost, Point};
use crate::window::{build_window_from, GridSpec, PreparedSolver, Solver};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PathModel {
    /// `v_t = v_{t-1} + U[-sigma, sigma]^d` from `v_0 = x_0`.
    RandomWalk { sigma: f64 },
    /// `x_0 + amplitude` on every `period`-th step, `x_0` otherwise.
    Spikes { amplitude: f64, period: usize },
    /// Every coordinate equal to `level`.
    Constant {
        #[serde(default)]
        level: f64,
    },
}

/// Draw a minimizer path. Nonnegative families reflect at zero.
pub fn generate_path<R: Rng>(
    model: &PathModel,
    horizon: usize,
    start: &Point,
    nonnegative: bool,
    rng: &mut R,
) -> Result<Vec<Point>> {
    let d = start.dim();
    let fix = |c: f64| if nonnegative { c.abs() } else { c };
    let mut out = Vec::with_capacity(horizon);
    match *model {
        PathModel::RandomWalk { sigma } => {
            if !(sigma >= 0.0) {
                return Err(Error::param("random walk sigma must be >= 0"));
            }
            let mut cur = start.coords().to_vec();
            for _ in 0..horizon {
                for c in cur.iter_mut() {
                    *c = fix(*c + random_step(rng, sigma));
                }
                out.push(Point::from(cur.clone()));
            }
        }
        PathModel::Spikes { amplitude, period } => {
            if period == 0 {
                return Err(Error::param("spike period must be >= 1"));
            }
            for t in 1..=horizon {
                let bump = if t % period == 0 { amplitude } else { 0.0 };
                out.push(Point::from(start.coords().iter().map(|c| fix(c + bump)).collect::<Vec<_>>()));
            }
        }
        PathModel::Constant { level } => {
            out.resize(horizon, Point::from(vec![fix(level); d]));
        }
    }
    Ok(out)
}

fn random_step<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    // Always consume one draw so the stream does not depend on sigma.
    let u: f64 = rng.gen_range(-1.0..=1.0);
    sigma * u
}

/// Fixed instance with analytic `eta`, `lambda`.
pub fn generate_oblivious_instance<R: Rng>(
    family: &FamilyVariant,
    model: &PathModel,
    horizon: usize,
    start: &Point,
    rng: &mut R,
) -> Result<Instance> {
    if horizon == 0 {
        return Err(Error::param("horizon must be >= 1"));
    }
    let path = generate_path(model, horizon, start, family.nonnegative(), rng)?;
    family.build(&path)?.into_instance(start.clone())
}

/// The same instance with start and minimizers moved to their nearest
/// lattice points.
pub fn snap_instance(instance: &Instance, grid: &GridSpec) -> Result<Instance> {
    let hitting = instance
        .hitting()
        .iter()
        .map(|f| HittingCost::new(f.shape().clone(), grid.snap(f.minimizer())))
        .collect::<Result<_>>()?;
    Instance::new(
        grid.snap(instance.start()),
        hitting,
        instance.movement().clone(),
        instance.lambda(),
    )
}

/// Static description of a game before any cost is revealed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameShell {
    pub horizon: usize,
    pub start: Point,
    pub family: FamilyVariant,
    pub w: usize,
    /// Lattice used by grid solvers and by the quantizing information map.
    pub grid: GridSpec,
}

impl GameShell {
    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    pub fn movement(&self) -> MovementCost {
        match &self.family {
            FamilyVariant::Polyhedral { norm, .. } => MovementCost::from_norm(*norm),
            FamilyVariant::StronglyConvex { .. } | FamilyVariant::Ripple { .. } => MovementCost::SqL2Half,
            FamilyVariant::Glb { beta, .. } => MovementCost::RectifiedLinear { beta: beta.clone() },
        }
    }

    /// Declared `(eta, lambda)`.
    pub fn constants(&self) -> (f64, f64) {
        self.family.constants()
    }

    /// Hitting cost of the declared family centred at `v`.
    pub fn cost_at(&self, v: Point) -> Result<HittingCost> {
        Ok(self.family.build(&[v])?.hitting.remove(0))
    }

    fn validate(&self) -> Result<()> {
        if self.w == 0 || self.horizon == 0 {
            return Err(Error::param("game needs w >= 1 and T >= 1"));
        }
        Ok(())
    }
}

/// Information disclosed after each decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InfoMap {
    /// Lattice index vector of the decision.
    Quantize { grid: GridSpec },
    /// Nothing is disclosed.
    Constant,
}

impl InfoMap {
    pub fn apply(&self, x: &Point) -> Vec<i64> {
        match self {
            InfoMap::Quantize { grid } => x.coords().iter().map(|&c| grid.index_of(c) as i64).collect(),
            InfoMap::Constant => Vec::new(),
        }
    }
}

pub trait OnlineLearner {
    fn name(&self) -> String;

    fn reset(&mut self, shell: &GameShell, rng: &mut ChaCha8Rng) -> Result<()>;

    /// Decide `x_tau` from `f_1 .. f_{min(tau + w - 1, T)}`.
    fn decide(&mut self, tau: usize, revealed: &[HittingCost]) -> Result<Point>;

    /// Synchronization timesteps in `[1, T]`, when the learner has them.
    fn anchors(&self) -> Option<Vec<usize>> {
        None
    }
}

pub trait Adversary {
    fn name(&self) -> String;

    fn reset(&mut self, shell: &GameShell) -> Result<()>;

    /// Design `f_t` and commit `x*_t`, seeing the disclosed `z_1 .. z_k`.
    fn design(&mut self, t: usize, observed: &[Vec<i64>]) -> Result<(HittingCost, Point)>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case")]
pub enum AnchorSchedule {
    /// `SFHC(h)`; `w = 1` with `h = 0` is greedy.
    Phase { h: usize },
    /// Random gaps drawn at reset.
    RandomGaps,
}

/// Online anchored learner: solves each window the moment its first free
/// step is due, reading only the revealed prefix.
pub struct OnlineAnchored {
    schedule: AnchorSchedule,
    solver: Solver,
    state: Option<AnchoredState>,
}

struct AnchoredState {
    shell: GameShell,
    movement: MovementCost,
    prepared: PreparedSolver,
    cuts: Vec<usize>,
    anchors: Vec<usize>,
    planned: Vec<Point>,
}

impl OnlineAnchored {
    pub fn new(schedule: AnchorSchedule, solver: Solver) -> Self {
        OnlineAnchored {
            schedule,
            solver,
            state: None,
        }
    }

    pub fn greedy() -> Self {
        Self::new(AnchorSchedule::Phase { h: 0 }, Solver::Auto)
    }
}

impl OnlineLearner for OnlineAnchored {
    fn name(&self) -> String {
        match self.schedule {
            AnchorSchedule::Phase { h } => format!("sfhc(h={h})"),
            AnchorSchedule::RandomGaps => "rsfhc-b".into(),
        }
    }

    fn reset(&mut self, shell: &GameShell, rng: &mut ChaCha8Rng) -> Result<()> {
        let set = match self.schedule {
            AnchorSchedule::Phase { h } => AnchorSet::phase(h, shell.w, shell.horizon)?,
            AnchorSchedule::RandomGaps => gen_anchor_sequence(shell.w, shell.horizon, rng)?,
        };
        self.state = Some(AnchoredState {
            shell: shell.clone(),
            movement: shell.movement(),
            prepared: self.solver.prepare_with(shell.grid),
            cuts: set.cuts(shell.horizon),
            anchors: set.active(shell.horizon),
            planned: Vec::with_capacity(shell.horizon),
        });
        Ok(())
    }

    fn decide(&mut self, tau: usize, revealed: &[HittingCost]) -> Result<Point> {
        let st = self
            .state
            .as_mut()
            .ok_or_else(|| Error::input("learner used before reset"))?;
        if tau > st.planned.len() {
            let a = st.planned.len();
            let b = *st
                .cuts
                .iter()
                .find(|&&c| c > a)
                .ok_or_else(|| Error::input("decision past the final window"))?;
            let problem = build_window_from(
                st.shell.horizon,
                &st.shell.start,
                revealed,
                &st.movement,
                a,
                b,
                None,
            )?;
            let sol = st.prepared.solve(&problem)?;
            st.planned.extend(sol.free_points);
            if b <= st.shell.horizon {
                st.planned.push(revealed[b - 1].minimizer().clone());
            }
        }
        Ok(st.planned[tau - 1].clone())
    }

    fn anchors(&self) -> Option<Vec<usize>> {
        self.state.as_ref().map(|s| s.anchors.clone())
    }
}

/// Online pointwise average of the `w` phase subroutines.
pub struct OnlineDsfhc {
    solver: Solver,
    subs: Vec<OnlineAnchored>,
}

impl OnlineDsfhc {
    pub fn new(solver: Solver) -> Self {
        OnlineDsfhc {
            solver,
            subs: Vec::new(),
        }
    }
}

impl OnlineLearner for OnlineDsfhc {
    fn name(&self) -> String {
        "dsfhc".into()
    }

    fn reset(&mut self, shell: &GameShell, rng: &mut ChaCha8Rng) -> Result<()> {
        self.subs = (0..shell.w)
            .map(|h| OnlineAnchored::new(AnchorSchedule::Phase { h }, self.solver))
            .collect();
        for s in &mut self.subs {
            s.reset(shell, rng)?;
        }
        Ok(())
    }

    fn decide(&mut self, tau: usize, revealed: &[HittingCost]) -> Result<Point> {
        let pts = self
            .subs
            .iter_mut()
            .map(|s| s.decide(tau, revealed))
            .collect::<Result<Vec<_>>>()?;
        Ok(Point::mean(&pts))
    }
}

/// Replays a fixed instance and commits its offline optimum.
pub struct ObliviousAdversary {
    instance: Instance,
    commits: Vec<Point>,
}

impl ObliviousAdversary {
    pub fn new(instance: Instance) -> Self {
        ObliviousAdversary {
            instance,
            commits: Vec::new(),
        }
    }
}

impl Adversary for ObliviousAdversary {
    fn name(&self) -> String {
        "oblivious".into()
    }

    fn reset(&mut self, shell: &GameShell) -> Result<()> {
        if shell.horizon != self.instance.horizon() || shell.start != *self.instance.start() {
            return Err(Error::input("oblivious instance does not match the game shell"));
        }
        let opt = crate::oracle::offline_optimal(&self.instance, None)?;
        self.commits = opt.trajectory.into_points();
        Ok(())
    }

    fn design(&mut self, t: usize, _observed: &[Vec<i64>]) -> Result<(HittingCost, Point)> {
        Ok((self.instance.cost(t).clone(), self.commits[t - 1].clone()))
    }
}

/// Random-walk adversary that inflates the minimizer step at timesteps it
/// believes are anchors, with beliefs learned from disclosed decisions.
pub struct SpikeAdversary {
    bins: GridSpec,
    inflation: f64,
    sigma: f64,
    seed: u64,
    st: Option<SpikeState>,
}

struct SpikeState {
    shell: GameShell,
    rng: ChaCha8Rng,
    baseline: Vec<Vec<f64>>,
    minimizers: Vec<Point>,
    commits: Vec<Point>,
    gap_weight: Vec<f64>,
    last_detected: usize,
    processed: usize,
    detected: Vec<usize>,
    inflated: Vec<usize>,
    m: Option<f64>,
}

impl SpikeAdversary {
    pub fn new(bins: GridSpec, inflation: f64, sigma: f64, seed: u64) -> Result<Self> {
        if !(inflation >= 1.0) {
            return Err(Error::param(format!("inflation must be >= 1, got {inflation}")));
        }
        if !(sigma >= 0.0) {
            return Err(Error::param("sigma must be >= 0"));
        }
        Ok(SpikeAdversary {
            bins,
            inflation,
            sigma,
            seed,
            st: None,
        })
    }

    /// Timesteps whose minimizer step was inflated.
    pub fn inflated_steps(&self) -> &[usize] {
        self.st.as_ref().map(|s| s.inflated.as_slice()).unwrap_or(&[])
    }

    /// Timesteps recognised as anchors from the disclosed information.
    pub fn detected_anchors(&self) -> &[usize] {
        self.st.as_ref().map(|s| s.detected.as_slice()).unwrap_or(&[])
    }
}

impl SpikeState {
    fn observe(&mut self, observed: &[Vec<i64>], bins: &GridSpec) {
        let psi = InfoMap::Quantize { grid: *bins };
        while self.processed < observed.len() {
            self.processed += 1;
            let tau = self.processed;
            if observed[tau - 1] == psi.apply(&self.minimizers[tau - 1]) {
                let gap = tau - self.last_detected;
                if gap < self.gap_weight.len() {
                    self.gap_weight[gap] += 1.0;
                }
                self.last_detected = tau;
                self.detected.push(tau);
            }
        }
    }

    /// `P(t is an anchor | last detection, none since)` under the current
    /// gap weights, by a renewal recursion.
    fn anchor_probability(&self, t: usize) -> f64 {
        let total: f64 = self.gap_weight.iter().sum();
        let p: Vec<f64> = self.gap_weight.iter().map(|g| g / total).collect();
        let a = self.last_detected;
        let quiet = self.processed - a;
        let tail: f64 = p.iter().skip(quiet + 1).sum();
        if t <= a || tail <= 0.0 {
            return 0.0;
        }
        let k = t - a;
        let mut q = vec![0.0; k + 1];
        for j in 1..=k {
            let first = if j > quiet && j < p.len() { p[j] / tail } else { 0.0 };
            let mut later = 0.0;
            for i in 1..j {
                let g = j - i;
                if g < p.len() {
                    later += q[i] * p[g];
                }
            }
            q[j] = first + later;
        }
        q[k]
    }

    fn mean_gap(&self) -> f64 {
        let total: f64 = self.gap_weight.iter().sum();
        self.gap_weight
            .iter()
            .enumerate()
            .map(|(g, w)| g as f64 * w)
            .sum::<f64>()
            / total
    }
}

impl Adversary for SpikeAdversary {
    fn name(&self) -> String {
        format!("spike(inflation={})", self.inflation)
    }

    fn reset(&mut self, shell: &GameShell) -> Result<()> {
        let w = shell.w.max(2);
        let mut gap_weight = vec![0.0; w + 1];
        for g in gap_weight.iter_mut().skip(2) {
            *g = 1.0 / (w - 1) as f64;
        }
        let m = match shell.family {
            FamilyVariant::StronglyConvex { m } | FamilyVariant::Ripple { m, .. } => Some(m),
            _ => None,
        };
        self.st = Some(SpikeState {
            shell: shell.clone(),
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            baseline: vec![shell.start.coords().to_vec()],
            minimizers: Vec::new(),
            commits: Vec::new(),
            gap_weight,
            last_detected: 0,
            processed: 0,
            detected: Vec::new(),
            inflated: Vec::new(),
            m,
        });
        Ok(())
    }

    fn design(&mut self, t: usize, observed: &[Vec<i64>]) -> Result<(HittingCost, Point)> {
        let bins = self.bins;
        let (inflation, sigma) = (self.inflation, self.sigma);
        let st = self
            .st
            .as_mut()
            .ok_or_else(|| Error::input("adversary used before reset"))?;
        st.observe(observed, &bins);
        let nonneg = st.shell.family.nonnegative();
        let prev = st.baseline[t - 1].clone();
        let next: Vec<f64> = prev
            .iter()
            .map(|c| {
                let v = c + random_step(&mut st.rng, sigma);
                if nonneg {
                    v.abs()
                } else {
                    v
                }
            })
            .collect();
        st.baseline.push(next.clone());
        let spike = inflation > 1.0 && st.anchor_probability(t) >= 1.0 / st.mean_gap();
        let v: Vec<f64> = if spike {
            st.inflated.push(t);
            prev.iter()
                .zip(&next)
                .map(|(p, n)| {
                    let v = p + inflation * (n - p);
                    if nonneg {
                        v.max(0.0)
                    } else {
                        v
                    }
                })
                .collect()
        } else {
            next
        };
        let v = Point::from(v);
        let last = if t == 1 { &st.shell.start } else { &st.commits[t - 2] };
        let commit = match st.m {
            Some(m) => Point::from(
                v.coords()
                    .iter()
                    .zip(last.coords())
                    .map(|(a, b)| (m * a + b) / (m + 1.0))
                    .collect::<Vec<_>>(),
            ),
            None => v.clone(),
        };
        st.minimizers.push(v.clone());
        st.commits.push(commit.clone());
        Ok((st.shell.cost_at(v)?, commit))
    }
}

/// Interleaved record of one game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub learner: String,
    pub adversary: String,
    pub w: usize,
    pub start: Point,
    pub movement: MovementCost,
    pub revealed_costs: Vec<HittingCost>,
    pub reveal_clock: Vec<u64>,
    pub adversary_commits: Vec<Point>,
    pub commit_clock: Vec<u64>,
    /// Number of disclosed `z` values the adversary could read for each commit.
    pub commit_observed: Vec<usize>,
    pub learner_points: Vec<Point>,
    pub decide_clock: Vec<u64>,
    pub revealed_info: Vec<Vec<i64>>,
    pub learner_cost: f64,
    pub adversary_cost: f64,
    pub learner_anchors: Option<Vec<usize>>,
}

impl GameTranscript {
    /// The realized instance, for post-hoc oracle runs.
    pub fn instance(&self) -> Result<Instance> {
        Instance::with_analytic_lambda(self.start.clone(), self.revealed_costs.clone(), self.movement.clone())
    }

    /// Commit-before-decide and read-limit checks from the timestamps.
    pub fn check_causality(&self) -> Result<()> {
        let horizon = self.revealed_costs.len();
        for tau in 1..=horizon {
            let upto = (tau + self.w - 1).min(horizon);
            for t in 1..=upto {
                if self.commit_clock[t - 1] >= self.decide_clock[tau - 1] {
                    return Err(Error::ProtocolViolation {
                        t: tau,
                        reason: format!("commit of x*_{t} is not timestamped before decision {tau}"),
                    });
                }
            }
        }
        for (i, &k) in self.commit_observed.iter().enumerate() {
            let t = i + 1;
            if k > 0 && k + self.w > t {
                return Err(Error::ProtocolViolation {
                    t,
                    reason: format!("commit {t} read z_{k}"),
                });
            }
        }
        Ok(())
    }
}

/// Play the semi-adaptive protocol.
pub fn play_semi_adaptive(
    learner: &mut dyn OnlineLearner,
    adversary: &mut dyn Adversary,
    shell: &GameShell,
    psi: &InfoMap,
    rng: &mut ChaCha8Rng,
) -> Result<GameTranscript> {
    shell.validate()?;
    let (horizon, w) = (shell.horizon, shell.w);
    let movement = shell.movement();
    let (_, lambda) = shell.constants();
    let mut learner_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
    learner.reset(shell, &mut learner_rng)?;
    adversary.reset(shell)?;

    let mut clock = 0u64;
    let mut tr = GameTranscript {
        learner: learner.name(),
        adversary: adversary.name(),
        w,
        start: shell.start.clone(),
        movement: movement.clone(),
        revealed_costs: Vec::with_capacity(horizon),
        reveal_clock: Vec::with_capacity(horizon),
        adversary_commits: Vec::with_capacity(horizon),
        commit_clock: Vec::with_capacity(horizon),
        commit_observed: Vec::with_capacity(horizon),
        learner_points: Vec::with_capacity(horizon),
        decide_clock: Vec::with_capacity(horizon),
        revealed_info: Vec::with_capacity(horizon),
        learner_cost: 0.0,
        adversary_cost: 0.0,
        learner_anchors: None,
    };

    let mut reveal = |t: usize, tr: &mut GameTranscript, clock: &mut u64| -> Result<()> {
        let observed = &tr.revealed_info[..];
        let (f, x) = adversary.design(t, observed)?;
        check_family(shell, &movement, lambda, t, &f, &x)?;
        *clock += 1;
        tr.revealed_costs.push(f);
        tr.reveal_clock.push(*clock);
        *clock += 1;
        tr.adversary_commits.push(x);
        tr.commit_clock.push(*clock);
        tr.commit_observed.push(tr.revealed_info.len());
        Ok(())
    };

    for t in 1..w.min(horizon + 1) {
        reveal(t, &mut tr, &mut clock)?;
    }
    for tau in 1..=horizon {
        let t = tau + w - 1;
        if t <= horizon {
            reveal(t, &mut tr, &mut clock)?;
        }
        let x = learner.decide(tau, &tr.revealed_costs)?;
        if x.dim() != shell.dim() {
            return Err(Error::ProtocolViolation {
                t: tau,
                reason: "learner decision has the wrong dimension".into(),
            });
        }
        clock += 1;
        tr.decide_clock.push(clock);
        tr.revealed_info.push(psi.apply(&x));
        tr.learner_points.push(x);
    }
    tr.learner_cost = evaluate_prefix(&shell.start, &tr.revealed_costs, &movement, &tr.learner_points)?.total();
    tr.adversary_cost =
        evaluate_prefix(&shell.start, &tr.revealed_costs, &movement, &tr.adversary_commits)?.total();
    tr.learner_anchors = learner.anchors();
    Ok(tr)
}

fn check_family(
    shell: &GameShell,
    movement: &MovementCost,
    lambda: f64,
    t: usize,
    f: &HittingCost,
    x: &Point,
) -> Result<()> {
    let violation = |reason: String| Err(Error::ProtocolViolation { t, reason });
    if f.dim() != shell.dim() || x.dim() != shell.dim() {
        return violation("dimension mismatch".into());
    }
    let declared = shell.cost_at(f.minimizer().clone())?;
    if declared.family_tag() != f.family_tag() {
        return violation(format!(
            "cost family {} differs from the declared {}",
            f.family_tag().name(),
            declared.family_tag().name()
        ));
    }
    match f.order_of_growth(movement) {
        Some(l) if l >= lambda * (1.0 - 1e-12) => {}
        other => {
            return violation(format!(
                "order of growth {other:?} is below the declared lambda {lambda}"
            ))
        }
    }
    if f.convexifier() > declared.convexifier() {
        return violation("convexifier exceeds the declared family".into());
    }
    if !matches!(f.shape(), CostShape::Indicator { .. }) && x.coords().iter().any(|c| !c.is_finite()) {
        return violation("non-finite commit".into());
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub p: f64,
    pub stderr: f64,
    pub accepted: usize,
    pub drawn: usize,
}

/// Monte Carlo estimate of `P(tau in R | condition(R ∩ [0, tau-1]))` for
/// random gap anchors, by rejection sampling over `n_samples` draws.
pub fn estimate_anchor_probability<R, F>(
    w: usize,
    tau: usize,
    condition: F,
    n_samples: usize,
    rng: &mut R,
) -> Result<ProbabilityEstimate>
where
    R: Rng,
    F: Fn(&[usize]) -> bool,
{
    gap_support(w)?;
    if tau == 0 {
        return Err(Error::param("tau must be >= 1"));
    }
    if n_samples < 1000 {
        return Err(Error::param("need at least 1000 samples"));
    }
    let mut accepted = 0usize;
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let r = gen_anchor_sequence(w, tau, rng)?;
        let members = r.members();
        let cut = members.partition_point(|&t| t < tau);
        if !condition(&members[..cut]) {
            continue;
        }
        accepted += 1;
        if members.get(cut) == Some(&tau) {
            hits += 1;
        }
    }
    if accepted == 0 {
        return Err(Error::EstimationFailed(format!(
            "condition never held in {n_samples} draws"
        )));
    }
    let p = hits as f64 / accepted as f64;
    Ok(ProbabilityEstimate {
        p,
        stderr: (p * (1.0 - p) / accepted as f64).sqrt(),
        accepted,
        drawn: n_samples,
    })
}

/// Where opportunities come from in the investment game.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardSchedule {
    /// Random anchor gaps with window `w`; hitting an opportunity reveals
    /// the next one.
    Gaps { w: usize },
    /// Every timestep is an opportunity independently with probability `p`.
    Bernoulli { p: f64 },
}

/// What the investor may see at time `t`.
#[derive(Clone, Debug, Default)]
pub struct InvestHistory {
    pub t: usize,
    /// Opportunities revealed so far, ascending.
    pub revealed: Vec<usize>,
    /// Rewards received so far.
    pub rewards: f64,
    /// Stake and outcome of every resolved target.
    pub resolved: Vec<(usize, f64, bool)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stake {
    pub target: usize,
    pub amount: f64,
}

pub trait Investor {
    fn reset(&mut self);

    /// Stake on a target; the harness only accepts `target = t + lag`.
    fn invest(&mut self, lag: usize, history: &InvestHistory) -> Stake;
}

/// Same stake every round.
pub struct ConstantInvestor(pub f64);

impl Investor for ConstantInvestor {
    fn reset(&mut self) {}

    fn invest(&mut self, lag: usize, h: &InvestHistory) -> Stake {
        Stake {
            target: h.t + lag,
            amount: self.0,
        }
    }
}

/// Doubles its stake every round until the first reward, then stops.
pub struct DoublingGambler {
    pub base: f64,
    next: f64,
}

impl DoublingGambler {
    pub fn new(base: f64) -> Self {
        DoublingGambler { base, next: base }
    }
}

impl Investor for DoublingGambler {
    fn reset(&mut self) {
        self.next = self.base;
    }

    fn invest(&mut self, lag: usize, h: &InvestHistory) -> Stake {
        let amount = if h.rewards > 0.0 {
            0.0
        } else {
            let a = self.next;
            self.next *= 2.0;
            a
        };
        Stake {
            target: h.t + lag,
            amount,
        }
    }
}

/// Stakes `1` exactly on targets whose gap from the last revealed
/// opportunity lies in the gap support; zero otherwise.
pub struct PosteriorInvestor {
    pub w: usize,
}

impl Investor for PosteriorInvestor {
    fn reset(&mut self) {}

    fn invest(&mut self, lag: usize, h: &InvestHistory) -> Stake {
        let target = h.t + lag;
        let last = h.revealed.last().copied().unwrap_or(0);
        let gap = target.saturating_sub(last);
        let amount = match gap_support(self.w) {
            Ok(s) if s.contains(&gap) => 1.0,
            _ => 0.0,
        };
        Stake { target, amount }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvestmentOutcome {
    pub mean_reward: f64,
    pub mean_invest: f64,
    pub rewards: Vec<f64>,
    pub invests: Vec<f64>,
}

impl InvestmentOutcome {
    /// Mean and standard error of `reward - bound * invest` per game.
    pub fn excess(&self, bound: f64) -> (f64, f64) {
        let d: Vec<f64> = self
            .rewards
            .iter()
            .zip(&self.invests)
            .map(|(r, i)| r - bound * i)
            .collect();
        mean_stderr(&d)
    }

    pub fn reward_stderr(&self) -> f64 {
        mean_stderr(&self.rewards).1
    }
}

/// Sample mean and its standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulate `n_samples` independent investment games of `horizon` rounds
/// with investment lag `lag`. Rewards are `eta_reward * stake`.
pub fn simulate_investment_game<R: Rng>(
    schedule: &RewardSchedule,
    investor: &mut dyn Investor,
    lag: usize,
    horizon: usize,
    eta_reward: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<InvestmentOutcome> {
    match *schedule {
        RewardSchedule::Gaps { w } => {
            gap_support(w)?;
        }
        RewardSchedule::Bernoulli { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param("Bernoulli p must lie in [0, 1]"));
            }
        }
    }
    if lag == 0 || n_samples == 0 || !(eta_reward >= 0.0) {
        return Err(Error::param("investment game needs lag >= 1, samples >= 1, eta >= 0"));
    }
    let end = horizon + lag;
    let mut rewards = Vec::with_capacity(n_samples);
    let mut invests = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        investor.reset();
        let opportunities: Vec<bool> = match *schedule {
            RewardSchedule::Gaps { w } => {
                let r = gen_anchor_sequence(w, end, rng)?;
                let mut o = vec![false; end + 1];
                for &t in r.members() {
                    if t >= 1 && t <= end {
                        o[t] = true;
                    }
                }
                o
            }
            RewardSchedule::Bernoulli { p } => {
                let mut o = vec![false; end + 1];
                for slot in o.iter_mut().skip(1) {
                    *slot = rng.gen_bool(p);
                }
                o
            }
        };
        let mut stake = vec![0.0; end + 1];
        let mut h = InvestHistory::default();
        let mut invest = 0.0;
        for t in 1..=end {
            if t <= horizon {
                h.t = t;
                let s = investor.invest(lag, &h);
                if s.target != t + lag {
                    return Err(Error::NonCausal(format!(
                        "investor at t = {t} staked on {} instead of {}",
                        s.target,
                        t + lag
                    )));
                }
                if !(s.amount >= 0.0) {
                    return Err(Error::input("stakes must be nonnegative"));
                }
                stake[s.target] = s.amount;
                invest += s.amount;
            }
            if opportunities[t] {
                let r = eta_reward * stake[t];
                h.rewards += r;
                h.revealed.push(t);
                if let RewardSchedule::Gaps { .. } = schedule {
                    if let Some(next) = (t + 1..=end).find(|&s| opportunities[s]) {
                        h.revealed.push(next);
                    }
                    h.revealed.dedup();
                }
            }
            h.resolved.push((t, stake[t], opportunities[t]));
        }
        rewards.push(h.rewards);
        invests.push(invest);
    }
    let mean_reward = rewards.iter().sum::<f64>() / n_samples as f64;
    let mean_invest = invests.iter().sum::<f64>() / n_samples as f64;
    Ok(InvestmentOutcome {
        mean_reward,
        mean_invest,
        rewards,
        invests,
    })
}
