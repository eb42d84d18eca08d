//! Monte Carlo oracle: discretized reflected paths with local time, and
//! path-average estimators of occupancy, boundary occupancy and transforms.
//!
//! The regulator is updated with the exact minimum of the Brownian bridge
//! between grid points, so the local time increment of every step is a draw
//! from its conditional law given the endpoints of the free increment.
//!
//! Reproducibility: simulation unit `i` (an antithetic pair, or a single path
//! when antithetic sampling is off) draws from `ChaCha8Rng::seed_from_u64(seed)`
//! with `set_stream(i)`. Per-unit results are reduced in index order, so the
//! output does not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{apply, NormalizedModel, Vec2};

/// Coordinates in which paths are simulated and regions are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    /// Identity covariance after normalization.
    Normalized,
    /// Original coordinates with correlated increments.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub step: f64,
    pub stop_left: f64,
    pub t_max: f64,
    pub paths: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub coordinates: Coordinates,
    /// Worker threads; 0 means one per available core.
    pub threads: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            step: 1e-3,
            stop_left: 30.0,
            t_max: 1e4,
            paths: 200_000,
            seed: 0,
            antithetic: true,
            coordinates: Coordinates::Normalized,
            threads: 0,
        }
    }
}

/// Longest path, in steps, that a configuration may request.
pub const MAX_STEPS_PER_PATH: f64 = 1e10;
/// Truncation fraction above which an estimate is flagged.
pub const TRUNCATION_FLAG: f64 = 0.01;

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.step > 0.0 && self.step <= 1e-2) {
            return bad("step must lie in (0, 1e-2]");
        }
        if !(self.stop_left >= 10.0 && self.stop_left.is_finite()) {
            return bad("stop_left must be finite and at least 10");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("t_max must be positive and finite");
        }
        if self.t_max / self.step > MAX_STEPS_PER_PATH {
            return bad("t_max / step exceeds the per-path step budget");
        }
        if self.paths == 0 {
            return bad("paths must be at least 1");
        }
        Ok(())
    }

    fn units(&self) -> usize {
        if self.antithetic {
            self.paths.div_ceil(2)
        } else {
            self.paths
        }
    }
}

/// Half-open rectangle `[z1.0, z1.1) x [z2.0, z2.1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub z1: (f64, f64),
    pub z2: (f64, f64),
}

impl Rect {
    fn contains(&self, z: Vec2) -> bool {
        z[0] >= self.z1.0 && z[0] < self.z1.1 && z[1] >= self.z2.0 && z[1] < self.z2.1
    }

    pub fn area(&self) -> f64 {
        (self.z1.1 - self.z1.0) * (self.z2.1 - self.z2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// Time spent in a box.
    Occupancy(Rect),
    /// Local time deposited while `Z1` lies in `(a, b)`; `b` may be infinite.
    Boundary(f64, f64),
    /// `int exp(theta . Z) dt`.
    TimeMgf(Vec2),
    /// `int exp(theta . Z) dl`.
    LocalMgf(Vec2),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgfKind {
    TimeIntegral,
    LocalTimeIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths: usize,
    pub truncation_fraction: f64,
    pub flagged: bool,
}

/// Per-unit path functionals from one simulation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PathAccumulator {
    pub functionals: Vec<Functional>,
    /// `unit_values[k][i]`: functional `k` averaged over the paths of unit `i`.
    pub unit_values: Vec<Vec<f64>>,
    pub paths: usize,
    pub truncated: usize,
    pub total_steps: u64,
    /// Mean local time of each path at its stopping time.
    pub mean_final_local_time: f64,
}

impl PathAccumulator {
    pub fn truncation_fraction(&self) -> f64 {
        self.truncated as f64 / self.paths as f64
    }

    pub fn estimate(&self, k: usize) -> McEstimate {
        let vals = &self.unit_values[k];
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = if vals.len() > 1 {
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let tf = self.truncation_fraction();
        McEstimate {
            value: mean,
            std_error: (var / n).sqrt(),
            paths: self.paths,
            truncation_fraction: tf,
            flagged: tf > TRUNCATION_FLAG,
        }
    }

    pub fn estimates(&self) -> Vec<McEstimate> {
        (0..self.functionals.len())
            .map(|k| self.estimate(k))
            .collect()
    }
}

/// Path dynamics in the simulated coordinates:
/// `dZ1 = m1 dt + c11 dW1 + c12 dW2 + r dl`, `dZ2 = m2 dt + c22 dW2 + dl`.
#[derive(Debug, Clone, Copy)]
struct Dynamics {
    drift: Vec2,
    r: f64,
    c11: f64,
    c12: f64,
    c22: f64,
    start: Vec2,
}

fn dynamics(model: &NormalizedModel, coords: Coordinates) -> Dynamics {
    match coords {
        Coordinates::Normalized => Dynamics {
            drift: model.mu,
            r: model.r,
            c11: 1.0,
            c12: 0.0,
            c22: 1.0,
            start: model.x,
        },
        Coordinates::Raw => {
            let raw = &model.raw;
            let s = raw.sigma;
            let c22 = s[1][1].sqrt();
            let c12 = s[0][1] / c22;
            let c11 = (s[0][0] - c12 * c12).sqrt();
            // the start is kept consistent with any start set after normalization
            let start = apply(&invert(&model.t), model.x);
            Dynamics {
                drift: raw.mu,
                r: raw.r,
                c11,
                c12,
                c22,
                start,
            }
        }
    }
}

fn invert(m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

/// Is `theta` (normalized coordinates) in the set where both transforms converge?
pub fn in_convergence_domain(model: &NormalizedModel, theta: Vec2) -> bool {
    let [t1, t2] = theta;
    if t1 > 0.0 && t1 < model.f_domain_upper() && t2 <= 0.0 {
        return true;
    }
    match model.theta2_branches_real(t1) {
        Ok((upper, lower)) if t1 > model.theta1_minus() && t1 < model.theta1_plus() => {
            t2.max(lower) < (-model.r * t1).min(upper)
        }
        _ => false,
    }
}

/// Exponents below this are dropped from transform sums.
const EXP_CUTOFF: f64 = -45.0;

/// Functionals split by kind so the per-step loops only touch what they need.
#[derive(Default)]
struct Compiled {
    boxes: Vec<(usize, Rect)>,
    time_mgf: Vec<(usize, Vec2)>,
    intervals: Vec<(usize, f64, f64)>,
    local_mgf: Vec<(usize, f64)>,
    len: usize,
}

struct UnitOutcome {
    values: Vec<f64>,
    truncated: usize,
    steps: u64,
    local_time: f64,
}

fn simulate_unit(
    dynamics: &Dynamics,
    cfg: &SimConfig,
    funcs: &Compiled,
    index: usize,
) -> UnitOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let nm = if cfg.antithetic && 2 * index + 1 < cfg.paths {
        2
    } else {
        1
    };

    let h = cfg.step;
    let sh = h.sqrt();
    let var2 = dynamics.c22 * dynamics.c22 * h;
    let max_steps = (cfg.t_max / h).ceil() as u64;
    let k = funcs.len;
    let mut sums = [vec![0.0; k], vec![0.0; k]];
    let mut z1 = [dynamics.start[0]; 2];
    let mut alive = [true, nm == 2];
    let mut truncated = 0;
    let mut z2 = dynamics.start[1];
    let mut ell = 0.0;

    // trapezoid weight for the starting point
    for m in 0..nm {
        accumulate_time(funcs, &mut sums[m], [z1[m], z2], 0.5 * h);
    }

    let drift1 = dynamics.drift[0] * h;
    let drift2 = dynamics.drift[1] * h;
    let c11 = dynamics.c11 * sh;
    let c12 = dynamics.c12 * sh;
    let c22 = dynamics.c22 * sh;
    let mut steps = 0u64;
    while alive[0] || alive[1] {
        if steps >= max_steps {
            truncated = alive.iter().filter(|&&a| a).count();
            break;
        }
        steps += 1;
        let w1: f64 = rng.sample(StandardNormal);
        let w2: f64 = rng.sample(StandardNormal);
        let a = z2;
        let b = a + drift2 + c22 * w2;
        let mut dl = 0.0;
        // the bridge dips below zero with probability exp(-2ab/var2)
        if b < 0.0 || 2.0 * a * b < 40.0 * var2 {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let disc = (a - b) * (a - b) - 2.0 * var2 * u.ln();
            let low = 0.5 * (a + b - disc.sqrt());
            if low < 0.0 {
                dl = -low;
            }
        }
        z2 = b + dl;
        ell += dl;
        let common = drift1 + c12 * w2 + dynamics.r * dl;
        let noise = c11 * w1;
        for m in 0..nm {
            if !alive[m] {
                continue;
            }
            let before = z1[m];
            let after = if m == 0 {
                before + common + noise
            } else {
                before + common - noise
            };
            z1[m] = after;
            if dl > 0.0 {
                accumulate_local(funcs, &mut sums[m], 0.5 * (before + after), dl);
            }
            if after < -cfg.stop_left {
                alive[m] = false;
                continue;
            }
            accumulate_time(funcs, &mut sums[m], [after, z2], h);
        }
    }
    let values = (0..k)
        .map(|j| (0..nm).map(|m| sums[m][j]).sum::<f64>() / nm as f64)
        .collect();
    UnitOutcome {
        values,
        truncated,
        steps,
        local_time: ell * nm as f64,
    }
}

fn accumulate_time(funcs: &Compiled, sum: &mut [f64], z: Vec2, weight: f64) {
    for &(k, ref b) in &funcs.boxes {
        if b.contains(z) {
            sum[k] += weight;
        }
    }
    for &(k, th) in &funcs.time_mgf {
        let e = th[0] * z[0] + th[1] * z[1];
        if e > EXP_CUTOFF {
            sum[k] += weight * e.exp();
        }
    }
}

fn accumulate_local(funcs: &Compiled, sum: &mut [f64], z1: f64, dl: f64) {
    for &(k, a, b) in &funcs.intervals {
        if z1 > a && z1 < b {
            sum[k] += dl;
        }
    }
    for &(k, t1) in &funcs.local_mgf {
        let e = t1 * z1;
        if e > EXP_CUTOFF {
            sum[k] += dl * e.exp();
        }
    }
}

fn theta_in_normalized(model: &NormalizedModel, coords: Coordinates, theta: Vec2) -> Vec2 {
    match coords {
        Coordinates::Normalized => theta,
        Coordinates::Raw => {
            // theta_raw . z_raw = (t^{-T} theta_raw) . z
            let inv = invert(&model.t);
            [
                inv[0][0] * theta[0] + inv[1][0] * theta[1],
                inv[0][1] * theta[0] + inv[1][1] * theta[1],
            ]
        }
    }
}

fn check_functional(
    model: &NormalizedModel,
    cfg: &SimConfig,
    k: usize,
    f: &Functional,
    out: &mut Compiled,
) -> Result<()> {
    let finite = |v: f64| v.is_finite();
    match *f {
        Functional::Occupancy(b) => {
            if !(finite(b.z1.0) && finite(b.z1.1) && finite(b.z2.0) && finite(b.z2.1)) {
                return Err(Error::InvalidRegion("box must be bounded".into()));
            }
            if b.z1.0 > b.z1.1 || b.z2.0 > b.z2.1 {
                return Err(Error::InvalidRegion("box bounds are reversed".into()));
            }
            if b.z1.0 < -cfg.stop_left {
                return Err(Error::InvalidRegion(
                    "box extends left of the stopping level".into(),
                ));
            }
            out.boxes.push((k, b));
            Ok(())
        }
        Functional::Boundary(a, b) => {
            if !finite(a) || a > b || b.is_nan() {
                return Err(Error::InvalidRegion(
                    "interval must satisfy a <= b with finite a".into(),
                ));
            }
            if a < -cfg.stop_left {
                return Err(Error::InvalidRegion(
                    "interval extends left of the stopping level".into(),
                ));
            }
            out.intervals.push((k, a, b));
            Ok(())
        }
        Functional::TimeMgf(th) | Functional::LocalMgf(th) => {
            let n = theta_in_normalized(model, cfg.coordinates, th);
            if !in_convergence_domain(model, n) {
                return Err(Error::ThetaOutsideConvergence(th[0], th[1]));
            }
            match f {
                Functional::TimeMgf(_) => out.time_mgf.push((k, th)),
                _ => out.local_mgf.push((k, th[0])),
            }
            Ok(())
        }
    }
}

/// Simulate `config.paths` paths once and record every functional on each.
pub fn simulate_paths(
    model: &NormalizedModel,
    config: &SimConfig,
    functionals: &[Functional],
) -> Result<PathAccumulator> {
    config.validate()?;
    let mut funcs = Compiled {
        len: functionals.len(),
        ..Compiled::default()
    };
    for (k, f) in functionals.iter().enumerate() {
        check_functional(model, config, k, f, &mut funcs)?;
    }
    let dynamics = dynamics(model, config.coordinates);
    let units = config.units();
    let threads = match config.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(units)
    .max(1);

    let chunk = units.div_ceil(threads);
    let outcomes: Vec<UnitOutcome> = if threads == 1 {
        (0..units)
            .map(|i| simulate_unit(&dynamics, config, &funcs, i))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let (dynamics, funcs) = (&dynamics, &funcs);
                    scope.spawn(move || {
                        let hi = ((t + 1) * chunk).min(units);
                        (t * chunk..hi)
                            .map(|i| simulate_unit(dynamics, config, funcs, i))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("simulation worker panicked"))
                .collect()
        })
    };

    let mut unit_values = vec![Vec::with_capacity(units); functionals.len()];
    let mut truncated = 0;
    let mut total_steps = 0;
    let mut local_time = 0.0;
    for o in &outcomes {
        for (col, v) in unit_values.iter_mut().zip(&o.values) {
            col.push(*v);
        }
        truncated += o.truncated;
        total_steps += o.steps;
        local_time += o.local_time;
    }
    if truncated == config.paths {
        return Err(Error::BudgetExceeded {
            paths: config.paths,
        });
    }
    Ok(PathAccumulator {
        functionals: functionals.to_vec(),
        unit_values,
        paths: config.paths,
        truncated,
        total_steps,
        mean_final_local_time: local_time / config.paths as f64,
    })
}

fn single(model: &NormalizedModel, config: &SimConfig, f: Functional) -> Result<McEstimate> {
    Ok(simulate_paths(model, config, &[f])?.estimate(0))
}

/// Expected time spent in `region`.
pub fn estimate_occupancy(
    model: &NormalizedModel,
    config: &SimConfig,
    region: Rect,
) -> Result<McEstimate> {
    single(model, config, Functional::Occupancy(region))
}

/// Expected local time deposited while `Z1` lies in `(a, b)`.
pub fn estimate_boundary(
    model: &NormalizedModel,
    config: &SimConfig,
    interval: (f64, f64),
) -> Result<McEstimate> {
    single(model, config, Functional::Boundary(interval.0, interval.1))
}

pub fn estimate_mgf(
    model: &NormalizedModel,
    config: &SimConfig,
    theta: Vec2,
    which: MgfKind,
) -> Result<McEstimate> {
    let f = match which {
        MgfKind::TimeIntegral => Functional::TimeMgf(theta),
        MgfKind::LocalTimeIntegral => Functional::LocalMgf(theta),
    };
    single(model, config, f)
}
