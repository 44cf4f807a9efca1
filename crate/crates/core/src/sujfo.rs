//! Self-upgraded jellyfish optimisation (SU-JFO) and the plain jellyfish
//! search baseline.
//!
//! Each iteration draws a time-control value `c(t)` per candidate and picks
//! one of three moves: following the ocean current (`c >= 0.5`), passive
//! Type A motion, or active Type B motion. The upgraded variant adds a
//! best-attraction term to Type B motion and a differential population
//! update after the movement phase. Escaped coordinates re-enter through
//! the opposite bound. A move is kept only if it improves the candidate's
//! fitness, so the best-so-far trace never increases.
//!
//! Moves within one phase are computed against a snapshot of the swarm and
//! every candidate draws from its own RNG stream, so results for a fixed
//! seed do not depend on whether fitness evaluation runs in parallel.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source of the random factor in the ocean-current trend term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomSchedule {
    /// Fresh `U(0, 1)` draw.
    #[default]
    Uniform,
    /// Inertia recurrence `R(t+1) = R(t) * i_min + (i_max - i_min) * t / T_max`
    /// starting from `R(0)`.
    Inertia,
}

/// Whether the passive-motion random factor is drawn per coordinate or once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassiveDraw {
    #[default]
    PerComponent,
    Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    SuJfo,
    Baseline,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SuJfo => "su_jfo",
            Mode::Baseline => "jfo_baseline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwarmConfig {
    pub population: usize,
    pub lower: f64,
    pub upper: f64,
    pub max_iterations: usize,
    /// Distribution coefficient of the ocean-current trend.
    pub beta: f64,
    /// Passive motion coefficient.
    pub gamma: f64,
    /// Distribution coefficient of the upgraded Type B attraction term.
    pub attraction: f64,
    pub inertia_max: f64,
    /// Printed as 0.9, equal to `inertia_max`; kept as printed.
    pub inertia_min: f64,
    pub r0: f64,
    pub schedule: RandomSchedule,
    pub passive_draw: PassiveDraw,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            population: 10,
            lower: 0.0,
            upper: 1.0,
            max_iterations: 100,
            beta: 3.0,
            gamma: 0.1,
            attraction: 3.0,
            inertia_max: 0.9,
            inertia_min: 0.9,
            r0: 0.7,
            schedule: RandomSchedule::Uniform,
            passive_draw: PassiveDraw::PerComponent,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::config("population must be at least 2"));
        }
        if self.max_iterations < 1 {
            return Err(Error::config("max_iterations must be at least 1"));
        }
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(Error::config("bounds must satisfy lower < upper"));
        }
        if !(self.beta > 0.0) {
            return Err(Error::config("beta must be positive"));
        }
        if !(self.gamma >= 0.0) || !(self.attraction >= 0.0) {
            return Err(Error::config("gamma and attraction must be non-negative"));
        }
        Ok(())
    }
}

/// Per-dimension box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Self {
        Self { lower: vec![lower; dimension], upper: vec![upper; dimension] }
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() || self.lower.is_empty() {
            return Err(Error::config("bounds must be non-empty and of equal length"));
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| !(l < u)) {
            return Err(Error::config("lower bound must be below upper bound"));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCounters {
    pub ocean_current: u64,
    pub passive: u64,
    pub active: u64,
    /// Type B moves that included the upgraded attraction term.
    pub active_attraction: u64,
    pub population_update: u64,
    pub population_skipped: u64,
    pub rejected_nonfinite: u64,
    pub accepted: u64,
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub iteration: usize,
    pub bounds: Bounds,
    pub counters: MoveCounters,
    rng: ChaCha8Rng,
    inertia_r: f64,
}

impl Swarm {
    pub fn population(&self) -> usize {
        self.positions.len()
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    /// Mean location of all candidates.
    pub fn mean_position(&self) -> Vec<f64> {
        let n = self.positions.len() as f64;
        let mut mu = vec![0.0; self.dimension()];
        for p in &self.positions {
            for (m, v) in mu.iter_mut().zip(p) {
                *m += v;
            }
        }
        mu.iter_mut().for_each(|m| *m /= n);
        mu
    }

    pub fn mean_fitness(&self) -> f64 {
        let finite: Vec<f64> = self.fitness.iter().copied().filter(|f| f.is_finite()).collect();
        if finite.is_empty() {
            f64::INFINITY
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        }
    }

    fn refresh_best(&mut self) {
        for (p, &f) in self.positions.iter().zip(&self.fitness) {
            if f < self.best_fitness {
                self.best_fitness = f;
                self.best_position.clone_from(p);
            }
        }
    }
}

fn sanitize(f: f64) -> f64 {
    if f.is_finite() {
        f
    } else {
        f64::INFINITY
    }
}

/// Uniform initial population. `seeds` replace the first candidates
/// (re-entered into the box).
pub fn initialize<F>(
    objective: &F,
    config: &SwarmConfig,
    bounds: Bounds,
    seeds: &[Vec<f64>],
) -> Result<Swarm>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    bounds.validate()?;
    let dim = bounds.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut positions: Vec<Vec<f64>> = (0..config.population)
        .map(|_| {
            bounds
                .lower
                .iter()
                .zip(&bounds.upper)
                .map(|(&l, &u)| l + (u - l) * rng.random::<f64>())
                .collect()
        })
        .collect();
    for (slot, seed) in positions.iter_mut().zip(seeds) {
        if seed.len() != dim {
            return Err(Error::domain("seed position has wrong dimension"));
        }
        *slot = boundary_reentry(seed, &bounds.lower, &bounds.upper);
    }
    let fitness = evaluate_all(objective, &positions);
    let mut swarm = Swarm {
        best_position: positions[0].clone(),
        best_fitness: f64::INFINITY,
        positions,
        fitness,
        iteration: 0,
        bounds,
        counters: MoveCounters::default(),
        rng,
        inertia_r: config.r0,
    };
    swarm.refresh_best();
    Ok(swarm)
}

#[cfg(feature = "parallel")]
fn evaluate_all<F: Fn(&[f64]) -> f64 + Sync>(objective: &F, xs: &[Vec<f64>]) -> Vec<f64> {
    use rayon::prelude::*;
    xs.par_iter().map(|x| sanitize(objective(x))).collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_all<F: Fn(&[f64]) -> f64 + Sync>(objective: &F, xs: &[Vec<f64>]) -> Vec<f64> {
    xs.iter().map(|x| sanitize(objective(x))).collect()
}

/// `c(t) = |(1 - t / T_max) * (2r - 1)|` for a given uniform draw `r`.
pub fn time_control_with(t: usize, t_max: usize, r: f64) -> Result<f64> {
    if t_max == 0 {
        return Err(Error::domain("T_max must be positive"));
    }
    if t > t_max {
        return Err(Error::domain("iteration exceeds T_max"));
    }
    Ok(((1.0 - t as f64 / t_max as f64) * (2.0 * r - 1.0)).abs())
}

pub fn time_control<R: Rng + ?Sized>(t: usize, t_max: usize, rng: &mut R) -> Result<f64> {
    time_control_with(t, t_max, rng.random())
}

/// Ocean-current move: `x + r1 * (best - beta * r2 * mean)`.
pub fn ocean_current_step(
    position: &[f64],
    best: &[f64],
    mean: &[f64],
    beta: f64,
    r1: f64,
    r2: f64,
) -> Vec<f64> {
    position
        .iter()
        .zip(best.iter().zip(mean))
        .map(|(x, (b, m))| x + r1 * (b - beta * r2 * m))
        .collect()
}

/// Passive (Type A) move: `x + gamma * r * (UB - LB)`; `draws` holds one
/// value per coordinate, or a single value reused for all.
pub fn passive_step(position: &[f64], bounds: &Bounds, gamma: f64, draws: &[f64]) -> Vec<f64> {
    position
        .iter()
        .enumerate()
        .map(|(d, x)| {
            let r = if draws.len() == 1 { draws[0] } else { draws[d] };
            x + gamma * r * (bounds.upper[d] - bounds.lower[d])
        })
        .collect()
}

/// Optional attraction term of the upgraded Type B move.
pub struct Attraction<'a> {
    pub best: &'a [f64],
    pub mean: &'a [f64],
    pub coefficient: f64,
    pub rn: &'a [f64],
    pub rn1: &'a [f64],
}

/// Active (Type B) move. The direction points from `i` toward `j` when `i`
/// is no better than `j` (minimisation), away from `j` otherwise.
pub fn active_step(
    position_i: &[f64],
    position_j: &[f64],
    fitness_i: f64,
    fitness_j: f64,
    r_step: f64,
    attraction: Option<Attraction<'_>>,
) -> Vec<f64> {
    let toward_j = fitness_i >= fitness_j;
    let mut out: Vec<f64> = position_i
        .iter()
        .zip(position_j)
        .map(|(xi, xj)| {
            let dir = if toward_j { xj - xi } else { xi - xj };
            xi + r_step * dir
        })
        .collect();
    if let Some(a) = attraction {
        for (d, o) in out.iter_mut().enumerate() {
            *o += a.rn[d] * (a.best[d] - a.coefficient * a.rn1[d] * a.mean[d]);
        }
    }
    out
}

/// Differential population update:
/// `x + r * (x_r1 - x_r2) + (1 - r) * (best - x_r3)`.
pub fn population_step(
    position: &[f64],
    x_r1: &[f64],
    x_r2: &[f64],
    x_r3: &[f64],
    best: &[f64],
    r: f64,
) -> Vec<f64> {
    (0..position.len())
        .map(|d| position[d] + r * (x_r1[d] - x_r2[d]) + (1.0 - r) * (best[d] - x_r3[d]))
        .collect()
}

/// Wrap escaped coordinates back through the opposite bound, repeating
/// until every coordinate lies in `[lower, upper]`.
pub fn boundary_reentry(position: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    position
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(&w, (&lo, &hi))| reenter(w, lo, hi))
        .collect()
}

fn reenter(mut w: f64, lo: f64, hi: f64) -> f64 {
    if !w.is_finite() {
        return w;
    }
    let range = hi - lo;
    // Each pass moves w by exactly one range, so a far escape would loop
    // for a long time; jump by whole ranges first.
    if w > hi + range || w < lo - range {
        let k = ((w - lo) / range).floor() - 1.0;
        w -= k * range;
    }
    let mut guard = 0;
    while (w > hi || w < lo) && guard < 8 {
        if w > hi {
            w = (w - hi) + lo;
        } else {
            w = (w - lo) + hi;
        }
        guard += 1;
    }
    w.clamp(lo, hi)
}

fn random_other<R: Rng + ?Sized>(rng: &mut R, n: usize, exclude: &[usize]) -> usize {
    loop {
        let j = rng.random_range(0..n);
        if !exclude.contains(&j) {
            return j;
        }
    }
}

/// Ocean-current move for candidate `i` with fresh draws.
pub fn ocean_current_move<R: Rng + ?Sized>(
    swarm: &Swarm,
    i: usize,
    beta: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mean = swarm.mean_position();
    let (r1, r2) = (rng.random(), rng.random());
    ocean_current_step(&swarm.positions[i], &swarm.best_position, &mean, beta, r1, r2)
}

pub fn swarm_passive_move<R: Rng + ?Sized>(
    swarm: &Swarm,
    i: usize,
    config: &SwarmConfig,
    rng: &mut R,
) -> Vec<f64> {
    let draws: Vec<f64> = match config.passive_draw {
        PassiveDraw::PerComponent => (0..swarm.dimension()).map(|_| rng.random()).collect(),
        PassiveDraw::Scalar => vec![rng.random()],
    };
    passive_step(&swarm.positions[i], &swarm.bounds, config.gamma, &draws)
}

pub fn swarm_active_move<R: Rng + ?Sized>(
    swarm: &Swarm,
    i: usize,
    config: &SwarmConfig,
    mode: Mode,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = swarm.population();
    if n < 2 {
        return Err(Error::config("active motion needs at least two candidates"));
    }
    let j = random_other(rng, n, &[i]);
    let r_step = rng.random();
    let (rn, rn1, mean);
    let attraction = match mode {
        Mode::SuJfo => {
            let dim = swarm.dimension();
            rn = (0..dim).map(|_| rng.random()).collect::<Vec<f64>>();
            rn1 = (0..dim).map(|_| rng.random()).collect::<Vec<f64>>();
            mean = swarm.mean_position();
            Some(Attraction {
                best: &swarm.best_position,
                mean: &mean,
                coefficient: config.attraction,
                rn: &rn,
                rn1: &rn1,
            })
        }
        Mode::Baseline => None,
    };
    Ok(active_step(
        &swarm.positions[i],
        &swarm.positions[j],
        swarm.fitness[i],
        swarm.fitness[j],
        r_step,
        attraction,
    ))
}

/// Differential update for candidate `i`; `None` when fewer than four
/// candidates exist.
pub fn population_update<R: Rng + ?Sized>(swarm: &Swarm, i: usize, rng: &mut R) -> Option<Vec<f64>> {
    let n = swarm.population();
    if n < 4 {
        return None;
    }
    let r1 = random_other(rng, n, &[i]);
    let r2 = random_other(rng, n, &[i, r1]);
    let r3 = random_other(rng, n, &[i, r1, r2]);
    let r = rng.random();
    let p = &swarm.positions;
    Some(population_step(&p[i], &p[r1], &p[r2], &p[r3], &swarm.best_position, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Row 0 is the initial population; one row per iteration after.
    pub trace: Vec<TraceRow>,
    pub counters: MoveCounters,
}

/// Write a convergence trace as `iteration,best_fitness,mean_fitness`.
pub fn write_trace_csv<W: std::io::Write>(mut w: W, trace: &[TraceRow]) -> Result<()> {
    writeln!(w, "iteration,best_fitness,mean_fitness")?;
    for row in trace {
        writeln!(w, "{},{},{}", row.iteration, row.best_fitness, row.mean_fitness)?;
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Branch {
    Ocean,
    Passive,
    Active,
}

struct Proposal {
    position: Vec<f64>,
    branch: Option<Branch>,
}

/// Hook called after every iteration; used by tests to inspect the swarm.
pub type Observer<'a> = dyn FnMut(&Swarm) + 'a;

pub struct Optimizer<'a> {
    pub config: SwarmConfig,
    pub mode: Mode,
    seeds: Vec<Vec<f64>>,
    observer: Option<Box<Observer<'a>>>,
}

impl<'a> Optimizer<'a> {
    pub fn new(config: SwarmConfig, mode: Mode) -> Self {
        Self { config, mode, seeds: Vec::new(), observer: None }
    }

    /// Start with these positions in place of the first random candidates.
    pub fn with_seeds(mut self, seeds: Vec<Vec<f64>>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_observer(mut self, f: impl FnMut(&Swarm) + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn run<F>(&mut self, objective: &F, dimension: usize) -> Result<OptimizeResult>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        if dimension == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        let bounds = Bounds::uniform(dimension, self.config.lower, self.config.upper);
        self.run_in(objective, bounds)
    }

    pub fn run_in<F>(&mut self, objective: &F, bounds: Bounds) -> Result<OptimizeResult>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let mut swarm = initialize(objective, &self.config, bounds, &self.seeds)?;
        let mut trace = vec![TraceRow {
            iteration: 0,
            best_fitness: swarm.best_fitness,
            mean_fitness: swarm.mean_fitness(),
        }];
        if let Some(obs) = self.observer.as_mut() {
            obs(&swarm);
        }
        for t in 1..=self.config.max_iterations {
            self.iterate(objective, &mut swarm, t)?;
            trace.push(TraceRow {
                iteration: t,
                best_fitness: swarm.best_fitness,
                mean_fitness: swarm.mean_fitness(),
            });
            if let Some(obs) = self.observer.as_mut() {
                obs(&swarm);
            }
        }
        Ok(OptimizeResult {
            best_position: swarm.best_position.clone(),
            best_fitness: swarm.best_fitness,
            trace,
            counters: swarm.counters,
        })
    }

    fn stream_seeds(swarm: &mut Swarm) -> Vec<u64> {
        (0..swarm.population()).map(|_| swarm.rng.next_u64()).collect()
    }

    fn iterate<F>(&self, objective: &F, swarm: &mut Swarm, t: usize) -> Result<()>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let cfg = &self.config;
        let n = swarm.population();

        // ocean-current trend factor for this iteration under the inertia schedule
        let inertia_r = swarm.inertia_r;
        if cfg.schedule == RandomSchedule::Inertia {
            swarm.inertia_r = inertia_r * cfg.inertia_min
                + (cfg.inertia_max - cfg.inertia_min) * t as f64 / cfg.max_iterations as f64;
        }

        let seeds = Self::stream_seeds(swarm);
        let mean = swarm.mean_position();
        let mut proposals = Vec::with_capacity(n);
        for i in 0..n {
            let mut rng = ChaCha8Rng::seed_from_u64(seeds[i]);
            let c = time_control(t, cfg.max_iterations, &mut rng)?;
            let (position, branch) = if c >= 0.5 {
                let r1 = rng.random();
                let r2 = match cfg.schedule {
                    RandomSchedule::Uniform => rng.random(),
                    RandomSchedule::Inertia => inertia_r,
                };
                let p = ocean_current_step(
                    &swarm.positions[i],
                    &swarm.best_position,
                    &mean,
                    cfg.beta,
                    r1,
                    r2,
                );
                (p, Branch::Ocean)
            } else if rng.random::<f64>() > 1.0 - c {
                (swarm_passive_move(swarm, i, cfg, &mut rng), Branch::Passive)
            } else {
                (swarm_active_move(swarm, i, cfg, self.mode, &mut rng)?, Branch::Active)
            };
            proposals.push(Proposal {
                position: boundary_reentry(&position, &swarm.bounds.lower, &swarm.bounds.upper),
                branch: Some(branch),
            });
        }
        for p in &proposals {
            match p.branch {
                Some(Branch::Ocean) => swarm.counters.ocean_current += 1,
                Some(Branch::Passive) => swarm.counters.passive += 1,
                Some(Branch::Active) => {
                    swarm.counters.active += 1;
                    if self.mode == Mode::SuJfo {
                        swarm.counters.active_attraction += 1;
                    }
                }
                None => {}
            }
        }
        accept(objective, swarm, proposals);

        if self.mode == Mode::SuJfo {
            let seeds = Self::stream_seeds(swarm);
            let mut proposals = Vec::with_capacity(n);
            for i in 0..n {
                let mut rng = ChaCha8Rng::seed_from_u64(seeds[i]);
                match population_update(swarm, i, &mut rng) {
                    Some(p) => {
                        swarm.counters.population_update += 1;
                        proposals.push(Proposal {
                            position: boundary_reentry(
                                &p,
                                &swarm.bounds.lower,
                                &swarm.bounds.upper,
                            ),
                            branch: None,
                        });
                    }
                    None => {
                        swarm.counters.population_skipped += 1;
                        proposals.push(Proposal { position: swarm.positions[i].clone(), branch: None });
                    }
                }
            }
            accept(objective, swarm, proposals);
        }
        swarm.iteration = t;
        Ok(())
    }
}

/// Evaluate proposals and keep each one that strictly improves its candidate.
fn accept<F>(objective: &F, swarm: &mut Swarm, proposals: Vec<Proposal>)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let positions: Vec<Vec<f64>> = proposals.into_iter().map(|p| p.position).collect();
    let raw = evaluate_raw(objective, &positions);
    for (i, (pos, f)) in positions.into_iter().zip(raw).enumerate() {
        if !f.is_finite() {
            swarm.counters.rejected_nonfinite += 1;
            continue;
        }
        if f < swarm.fitness[i] {
            swarm.positions[i] = pos;
            swarm.fitness[i] = f;
            swarm.counters.accepted += 1;
        }
    }
    swarm.refresh_best();
}

#[cfg(feature = "parallel")]
fn evaluate_raw<F: Fn(&[f64]) -> f64 + Sync>(objective: &F, xs: &[Vec<f64>]) -> Vec<f64> {
    use rayon::prelude::*;
    xs.par_iter().map(|x| objective(x)).collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_raw<F: Fn(&[f64]) -> f64 + Sync>(objective: &F, xs: &[Vec<f64>]) -> Vec<f64> {
    xs.iter().map(|x| objective(x)).collect()
}

/// Run the optimiser over `[lower, upper]^dimension`.
pub fn optimize<F>(
    objective: &F,
    config: &SwarmConfig,
    dimension: usize,
    mode: Mode,
) -> Result<OptimizeResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Optimizer::new(config.clone(), mode).run(objective, dimension)
}

/// Standard test functions, each with minimum 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Sphere,
    Rastrigin,
    Rosenbrock,
}

impl Benchmark {
    pub const ALL: [Benchmark; 3] = [Benchmark::Sphere, Benchmark::Rastrigin, Benchmark::Rosenbrock];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Sphere => "sphere",
            Benchmark::Rastrigin => "rastrigin",
            Benchmark::Rosenbrock => "rosenbrock",
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Benchmark::Sphere => sphere(x),
            Benchmark::Rastrigin => rastrigin(x),
            Benchmark::Rosenbrock => rosenbrock(x),
        }
    }

    /// Conventional search box.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Benchmark::Sphere => (-5.0, 5.0),
            Benchmark::Rastrigin => (-5.12, 5.12),
            Benchmark::Rosenbrock => (-5.0, 10.0),
        }
    }

    pub fn minimizer(self, dimension: usize) -> Vec<f64> {
        match self {
            Benchmark::Rosenbrock => vec![1.0; dimension],
            _ => vec![0.0; dimension],
        }
    }
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    use std::f64::consts::TAU;
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (TAU * v).cos()).sum::<f64>()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}
