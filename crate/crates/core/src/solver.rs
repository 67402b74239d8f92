//! Fully discrete scheme on the torus: L1 in time, Lax-Friedrichs in space.
//!
//! Each step solves `u + κ Ĥ(t_n, u) = u^{hist}` with `κ = Γ(2-α) Δt^α`,
//! where `u^{hist}` is the value that zeroes the L1 derivative. The default
//! [`Stepping::Implicit`] solves it by a monotone Jacobi relaxation and has no
//! step-size restriction; [`Stepping::Explicit`] evaluates `Ĥ` at the previous
//! level and is subject to a CFL bound.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{l1_weights, FractionalOrder, L1Weights, TimeGrid};
use crate::hamiltonian::{lax_friedrichs, HamiltonianSpec, MAX_DIM};
use crate::oracles;
use crate::specialfun::gamma;

/// Uniform periodic grid on `[0, 1)^d`, `x_i = i h` with `h = 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, nodes_per_dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!("dimension must be 1 or 2, got {dim}")));
        }
        if nodes_per_dim < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 nodes per dimension, got {nodes_per_dim}"
            )));
        }
        Ok(Self { dim, n: nodes_per_dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes_per_dim(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Total number of nodes, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of a flat (row-major) index.
    pub fn multi_index(&self, idx: usize) -> [usize; MAX_DIM] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.n, idx % self.n],
        }
    }

    pub fn flat_index(&self, m: [usize; MAX_DIM]) -> usize {
        match self.dim {
            1 => m[0] % self.n,
            _ => (m[0] % self.n) * self.n + m[1] % self.n,
        }
    }

    /// Coordinates of a node; only the first `dim` entries are meaningful.
    pub fn point(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let h = self.h();
        [m[0] as f64 * h, m[1] as f64 * h]
    }

    /// Flat index of the periodic neighbour `idx ± e_axis`.
    #[inline]
    pub fn neighbour(&self, idx: usize, axis: usize, forward: bool) -> usize {
        let mut m = self.multi_index(idx);
        m[axis] = if forward {
            (m[axis] + 1) % self.n
        } else {
            (m[axis] + self.n - 1) % self.n
        };
        self.flat_index(m)
    }
}

/// Nodal values on a [`TorusGrid`], flat row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn sample<F: Fn(&[f64]) -> f64>(grid: TorusGrid, f: F) -> Result<Self> {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `max_i |u_i - v_i|`.
    pub fn distance(&self, other: &GridFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Discrete Lipschitz constant: the largest `|∇⁺u|` over nodes, with the
    /// forward differences along every axis.
    pub fn lipschitz(&self) -> f64 {
        let g = &self.grid;
        let h = g.h();
        (0..g.len())
            .map(|i| {
                (0..g.dim())
                    .map(|k| {
                        let q = (self.values[g.neighbour(i, k, true)] - self.values[i]) / h;
                        q * q
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// The same samples translated by `shift` nodes along axis 0:
    /// `out[i] = self[i - shift]`.
    pub fn shifted_nodes(&self, shift: usize) -> Self {
        let g = self.grid;
        let mut values = vec![0.0; g.len()];
        for (i, v) in values.iter_mut().enumerate() {
            let mut m = g.multi_index(i);
            m[0] = (m[0] + g.n - shift % g.n) % g.n;
            *v = self.values[g.flat_index(m)];
        }
        Self { grid: g, values }
    }

    /// `self + c` at every node.
    pub fn offset(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }
}

pub type ProfileFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Continuous initial data `u₀` on the torus.
#[derive(Clone)]
pub enum InitialProfile {
    /// `amplitude · Π_k sin(2π wavenumber x_k)`.
    Sine {
        amplitude: f64,
        wavenumber: u32,
    },
    Constant(f64),
    Custom {
        profile: Arc<ProfileFn>,
        lipschitz: f64,
    },
}

impl fmt::Debug for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sine { amplitude, wavenumber } => f
                .debug_struct("Sine")
                .field("amplitude", amplitude)
                .field("wavenumber", wavenumber)
                .finish(),
            Self::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Self::Custom { lipschitz, .. } => f.debug_struct("Custom").field("lipschitz", lipschitz).finish(),
        }
    }
}

impl InitialProfile {
    /// `sin(2πx)` (times `sin(2πy)` in 2-D).
    pub fn sine() -> Self {
        Self::Sine {
            amplitude: 1.0,
            wavenumber: 1,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Sine { amplitude, wavenumber } => {
                let k = 2.0 * PI * f64::from(*wavenumber);
                amplitude * x.iter().map(|xi| (k * xi).sin()).product::<f64>()
            }
            Self::Constant(c) => *c,
            Self::Custom { profile, .. } => profile(x),
        }
    }

    /// A Lipschitz constant of `u₀`.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Sine { amplitude, wavenumber } => 2.0 * PI * f64::from(*wavenumber) * amplitude.abs(),
            Self::Constant(_) => 0.0,
            Self::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    pub fn sample(&self, grid: TorusGrid) -> Result<GridFunction> {
        GridFunction::sample(grid, |x| self.eval(x))
    }
}

/// How the Hamiltonian enters each time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepping {
    /// `Ĥ` at the new level, solved by monotone relaxation.
    #[default]
    Implicit,
    /// `Ĥ` at the previous level; needs the CFL bound.
    Explicit,
}

/// Everything [`solve`] needs.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub alpha: FractionalOrder,
    pub time: TimeGrid,
    pub space: TorusGrid,
    pub hamiltonian: HamiltonianSpec,
    pub initial: GridFunction,
    /// Continuous `u₀` behind `initial`, when known; needed by oracles and
    /// by resolution changes.
    pub profile: Option<InitialProfile>,
    pub viscosity_theta: f64,
    pub cfl_safety: f64,
    pub stepping: Stepping,
}

pub const DEFAULT_CFL_SAFETY: f64 = 0.9;

impl ProblemSpec {
    /// A problem with `θ = lip_p`, `cfl_safety = 0.9` and implicit stepping.
    pub fn new(
        alpha: FractionalOrder,
        time: TimeGrid,
        space: TorusGrid,
        hamiltonian: HamiltonianSpec,
        profile: InitialProfile,
    ) -> Result<Self> {
        let initial = profile.sample(space)?;
        Ok(Self {
            alpha,
            time,
            space,
            viscosity_theta: hamiltonian.lip_p,
            hamiltonian,
            initial,
            profile: Some(profile),
            cfl_safety: DEFAULT_CFL_SAFETY,
            stepping: Stepping::Implicit,
        })
    }

    /// A problem from sampled initial data only.
    pub fn from_samples(
        alpha: FractionalOrder,
        time: TimeGrid,
        hamiltonian: HamiltonianSpec,
        initial: GridFunction,
    ) -> Self {
        Self {
            alpha,
            time,
            space: *initial.grid(),
            viscosity_theta: hamiltonian.lip_p,
            hamiltonian,
            initial,
            profile: None,
            cfl_safety: DEFAULT_CFL_SAFETY,
            stepping: Stepping::Implicit,
        }
    }

    pub fn with_alpha(mut self, alpha: FractionalOrder) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_stepping(mut self, stepping: Stepping) -> Self {
        self.stepping = stepping;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.viscosity_theta = theta;
        self
    }

    pub fn with_cfl_safety(mut self, cfl_safety: f64) -> Self {
        self.cfl_safety = cfl_safety;
        self
    }

    /// Replaces `H`; `θ` follows the new `lip_p` unless it was larger.
    pub fn with_hamiltonian(mut self, hamiltonian: HamiltonianSpec) -> Self {
        self.viscosity_theta = self.viscosity_theta.max(hamiltonian.lip_p);
        self.hamiltonian = hamiltonian;
        self
    }

    pub fn with_initial(mut self, initial: GridFunction) -> Result<Self> {
        if *initial.grid() != self.space {
            return Err(Error::GridMismatch("initial data lives on a different grid".into()));
        }
        self.initial = initial;
        self.profile = None;
        Ok(self)
    }

    /// The same problem on `n` nodes per dimension and `steps` time steps,
    /// resampling `u₀` from its profile.
    pub fn with_resolution(&self, n: usize, steps: usize) -> Result<Self> {
        let profile = self
            .profile
            .clone()
            .ok_or_else(|| Error::InvalidInput("changing resolution needs a continuous initial profile".into()))?;
        let space = TorusGrid::new(self.space.dim(), n)?;
        let mut p = self.clone();
        p.space = space;
        p.time = TimeGrid::new(self.time.horizon(), steps)?;
        p.initial = profile.sample(space)?;
        Ok(p)
    }

    /// `κ = Γ(2-α) Δt^α`.
    pub fn kappa(&self) -> f64 {
        self.alpha.l1_gamma() * self.time.dt().powf(self.alpha.value())
    }

    /// `κ (θ d / h + λ_r)`.
    pub fn cfl_number(&self) -> f64 {
        self.kappa() * (self.viscosity_theta * self.space.dim() as f64 / self.space.h() + self.hamiltonian.lip_r)
    }

    /// Largest admissible [`ProblemSpec::cfl_number`] for explicit stepping:
    /// `cfl_safety · (1 - b₁)`, where `1 - b₁` is the weight the L1 history
    /// leaves on the previous level.
    pub fn cfl_limit(&self) -> f64 {
        let a = self.alpha.value();
        let keep = if self.time.steps() >= 2 {
            2.0 - 2f64.powf(1.0 - a)
        } else {
            1.0
        };
        self.cfl_safety * keep
    }

    fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.viscosity_theta >= self.hamiltonian.lip_p) || !self.viscosity_theta.is_finite() {
            return Err(Error::InsufficientViscosity {
                theta: self.viscosity_theta,
                lip_p: self.hamiltonian.lip_p,
            });
        }
        if *self.initial.grid() != self.space {
            return Err(Error::GridMismatch("initial data lives on a different grid".into()));
        }
        if let Some(d) = self.hamiltonian.declared_dim() {
            if d != self.space.dim() {
                return Err(Error::GridMismatch(format!(
                    "Hamiltonian expects {d} gradient components, grid has dimension {}",
                    self.space.dim()
                )));
            }
        }
        Ok(())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub max: f64,
    pub min: f64,
    /// `cfl_limit - cfl_number`; only binding for explicit stepping.
    pub cfl_margin: f64,
    /// Number of lagged levels in the L1 history sum.
    pub history_len: usize,
    /// Relaxation sweeps (1 for explicit stepping).
    pub iterations: usize,
    pub residual: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub alpha: FractionalOrder,
    pub time: TimeGrid,
    /// `steps + 1` slices; slice 0 is the initial data.
    pub trajectory: Vec<GridFunction>,
    pub diagnostics: Vec<StepRecord>,
}

impl SolveResult {
    pub fn grid(&self) -> &TorusGrid {
        self.trajectory[0].grid()
    }

    pub fn final_slice(&self) -> &GridFunction {
        self.trajectory.last().expect("trajectory holds the initial slice")
    }

    pub fn sup_abs(&self) -> f64 {
        self.trajectory.iter().map(GridFunction::max_abs).fold(0.0, f64::max)
    }

    /// Largest `|u - v|` over time steps `first..` and all nodes.
    pub fn distance_from(&self, other: &SolveResult, first: usize) -> Result<f64> {
        if self.trajectory.len() != other.trajectory.len() {
            return Err(Error::GridMismatch(format!(
                "{} vs {} time slices",
                self.trajectory.len(),
                other.trajectory.len()
            )));
        }
        let mut worst = 0.0f64;
        for (a, b) in self.trajectory[first..].iter().zip(&other.trajectory[first..]) {
            worst = worst.max(a.distance(b)?);
        }
        Ok(worst)
    }
}

const CHUNK: usize = 64;

struct Stepper<'a> {
    problem: &'a ProblemSpec,
    kappa: f64,
}

impl Stepper<'_> {
    #[inline]
    fn flux(&self, u: &[f64], idx: usize, t: f64) -> f64 {
        let g = &self.problem.space;
        let d = g.dim();
        let h = g.h();
        let mut pm = [0.0; MAX_DIM];
        let mut pp = [0.0; MAX_DIM];
        for k in 0..d {
            pm[k] = (u[idx] - u[g.neighbour(idx, k, false)]) / h;
            pp[k] = (u[g.neighbour(idx, k, true)] - u[idx]) / h;
        }
        let x = g.point(idx);
        lax_friedrichs(
            &self.problem.hamiltonian,
            self.problem.viscosity_theta,
            t,
            &x[..d],
            u[idx],
            &pm[..d],
            &pp[..d],
        )
    }

    /// `u^{n,hist}_i = u^{n-1}_i - Σ_{j=1}^{n-1} b_j (u^{n-j}_i - u^{n-j-1}_i)`.
    fn history(&self, traj: &[GridFunction], w: &L1Weights, n: usize) -> Vec<f64> {
        let b = w.as_slice();
        let mut hist = traj[n - 1].values.clone();
        hist.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            let base = c * CHUNK;
            for j in 1..n {
                let newer = &traj[n - j].values[base..base + out.len()];
                let older = &traj[n - j - 1].values[base..base + out.len()];
                for ((o, a), z) in out.iter_mut().zip(newer).zip(older) {
                    *o -= b[j] * (a - z);
                }
            }
        });
        hist
    }

    fn explicit(&self, prev: &[f64], hist: &[f64], t_prev: f64) -> Vec<f64> {
        let mut next = vec![0.0; hist.len()];
        next.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            for (k, o) in out.iter_mut().enumerate() {
                let i = c * CHUNK + k;
                *o = hist[i] - self.kappa * self.flux(prev, i, t_prev);
            }
        });
        next
    }

    /// Solves `u + κ Ĥ(t, u) = hist` by `u ← u - (u + κĤ(u) - hist) / D`.
    ///
    /// With `D = 1 + cfl_number` every sweep is monotone and contracts in the
    /// sup norm by `1 - 1/D`.
    fn implicit(&self, guess: &[f64], hist: &[f64], t: f64, step: usize) -> Result<(Vec<f64>, usize, f64)> {
        let relax = 1.0 + self.problem.cfl_number();
        let scale =
            1.0 + hist.iter().fold(0.0f64, |m, v| m.max(v.abs())) + guess.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 16.0 * f64::EPSILON * relax * scale;
        let cap = (60.0 * relax).ceil() as usize + 200;
        let mut u = guess.to_vec();
        let mut res = vec![0.0; u.len()];
        let mut residual = f64::INFINITY;
        for it in 1..=cap {
            residual = res
                .par_chunks_mut(CHUNK)
                .enumerate()
                .map(|(c, out)| {
                    let mut worst = 0.0f64;
                    for (k, o) in out.iter_mut().enumerate() {
                        let i = c * CHUNK + k;
                        *o = u[i] + self.kappa * self.flux(&u, i, t) - hist[i];
                        worst = worst.max(o.abs());
                    }
                    worst
                })
                .reduce(|| 0.0, f64::max);
            if !residual.is_finite() {
                return Err(Error::BlowUp { step });
            }
            if residual <= tol {
                return Ok((u, it, residual));
            }
            u.par_iter_mut().zip(&res).for_each(|(v, r)| *v -= r / relax);
        }
        Err(Error::ImplicitSolve { step, residual })
    }
}

/// Marches `problem` from `t = 0` to the horizon.
pub fn solve(problem: &ProblemSpec) -> Result<SolveResult> {
    problem.validate()?;
    let steps = problem.time.steps();
    let number = problem.cfl_number();
    let limit = problem.cfl_limit();
    if problem.stepping == Stepping::Explicit && number > limit {
        return Err(Error::CflViolation { number, limit });
    }
    let stepper = Stepper {
        problem,
        kappa: problem.kappa(),
    };
    let w = l1_weights(problem.alpha, steps);
    let e = 1.0 - problem.alpha.value();
    let mut mass = 0.0;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(problem.initial.clone());
    let mut diagnostics = Vec::with_capacity(steps);
    for n in 1..=steps {
        let started = Instant::now();
        mass += w.as_slice()[n - 1];
        let expected = (n as f64).powf(e);
        assert!(
            (mass - expected).abs() <= 1e-12 * expected,
            "L1 weight mass {mass} at step {n} differs from n^(1-alpha) = {expected}"
        );
        let hist = stepper.history(&trajectory, &w, n);
        let prev = &trajectory[n - 1].values;
        let (values, iterations, residual) = match problem.stepping {
            Stepping::Explicit => (stepper.explicit(prev, &hist, problem.time.node(n - 1)), 1, 0.0),
            Stepping::Implicit => stepper.implicit(prev, &hist, problem.time.node(n), n)?,
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { step: n });
        }
        let slice = GridFunction {
            grid: problem.space,
            values,
        };
        diagnostics.push(StepRecord {
            step: n,
            time: problem.time.node(n),
            max: slice.max(),
            min: slice.min(),
            cfl_margin: limit - number,
            history_len: n - 1,
            iterations,
            residual,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
        trajectory.push(slice);
    }
    Ok(SolveResult {
        alpha: problem.alpha,
        time: problem.time,
        trajectory,
        diagnostics,
    })
}

/// The classical (`α = 1`) problem with the same data: backward or forward
/// Euler in time through the same code path as [`solve`].
pub fn solve_classical(problem: &ProblemSpec) -> Result<SolveResult> {
    solve(&problem.clone().with_alpha(FractionalOrder::new(1.0)?))
}

/// One level of a [`refine_study`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineLevel {
    pub nodes_per_dim: usize,
    pub steps: usize,
    pub h: f64,
    pub dt: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineTable {
    pub levels: Vec<RefineLevel>,
    /// `log2(e_k / e_{k+1})` between consecutive levels.
    pub observed_orders: Vec<f64>,
    /// Whether the error is measured on `[T/2, T]` rather than at `T`.
    pub windowed: bool,
}

impl RefineTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].error < w[0].error)
    }
}

/// Errors against the exact solution on `levels` grids, the finest being the
/// problem's own and each coarser one halving both `n` and `N`.
///
/// An exact solution is known for 1-D constant-speed transport (error at the
/// final time) and for constant `H` (error over the window `[T/2, T]`).
pub fn refine_study(problem: &ProblemSpec, levels: usize) -> Result<RefineTable> {
    if levels < 2 {
        return Err(Error::InvalidInput(format!(
            "refine_study needs at least 2 levels, got {levels}"
        )));
    }
    let profile = problem
        .profile
        .clone()
        .ok_or_else(|| Error::OracleUnavailable("no continuous initial profile".into()))?;
    let h = &problem.hamiltonian;
    let speed = h.constant_transport_speed().filter(|_| problem.space.dim() == 1);
    let source = h.constant_value();
    if speed.is_none() && source.is_none() {
        return Err(Error::OracleUnavailable(format!(
            "no exact solution for the {} Hamiltonian in dimension {}",
            h.kind.name(),
            problem.space.dim()
        )));
    }
    let factor = 1usize << (levels - 1);
    let (n_fine, steps_fine) = (problem.space.nodes_per_dim(), problem.time.steps());
    if n_fine % factor != 0 || steps_fine % factor != 0 || n_fine / factor < 2 {
        return Err(Error::InvalidInput(format!(
            "n = {n_fine} and N = {steps_fine} must be divisible by 2^{} with n/2^{} >= 2",
            levels - 1,
            levels - 1
        )));
    }
    let alpha = problem.alpha;
    let mut rows = Vec::with_capacity(levels);
    for k in (0..levels).rev() {
        let n = n_fine >> k;
        let steps = steps_fine >> k;
        let p = problem.with_resolution(n, steps)?;
        let sol = solve(&p)?;
        let error = if let Some(c) = speed {
            let t = p.time.horizon();
            let u0 = |x: f64| profile.eval(&[x]);
            let kernel = oracles::TransportKernel::new(alpha, c, t)?;
            let last = sol.final_slice();
            (0..p.space.len())
                .map(|i| (last.values[i] - kernel.eval(&u0, p.space.point(i)[0])).abs())
                .fold(0.0, f64::max)
        } else {
            let v = source.expect("checked above");
            let g = gamma(1.0 + alpha.value())?;
            let mut worst = 0.0f64;
            for (m, slice) in sol.trajectory.iter().enumerate() {
                let t = p.time.node(m);
                if t < 0.5 * p.time.horizon() {
                    continue;
                }
                let lift = -v * t.powf(alpha.value()) / g;
                for (u, u0) in slice.values.iter().zip(&p.initial.values) {
                    worst = worst.max((u - u0 - lift).abs());
                }
            }
            worst
        };
        rows.push(RefineLevel {
            nodes_per_dim: n,
            steps,
            h: p.space.h(),
            dt: p.time.dt(),
            error,
        });
    }
    let observed_orders = rows.windows(2).map(|w| (w[0].error / w[1].error).log2()).collect();
    Ok(RefineTable {
        levels: rows,
        observed_orders,
        windowed: speed.is_none(),
    })
}
