//! Caputo derivative on sampled and callable time signals.
//!
//! Two independent routes are provided:
//!
//! - the L1 scheme on a uniform grid,
//!   `∂ₜ^α f(t_n) ≈ 1/(Γ(2-α) Δt^α) Σ_{j<n} b_j (f_{n-j} - f_{n-j-1})`
//!   with `b_j = (j+1)^{1-α} - j^{1-α}`;
//! - quadrature of the integrated-by-parts form
//!   `K₀[f](t) = (f(t) - f(0)) / (t^α Γ(1-α)) + α/Γ(1-α) ∫₀ᵗ (f(t) - f(t-τ)) τ^{-α-1} dτ`,
//!   split at a lag `r` into `J_r` (lags below `r`) and `K_r` (the rest).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, AdaptiveOptions};
use crate::specialfun::{gamma, rgamma};

/// Order `α ∈ (0, 1]` of the time derivative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `α = 1`: the classical time derivative.
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    /// `Γ(2 - α)`, the normalization of the L1 scheme.
    pub fn l1_gamma(self) -> f64 {
        gamma(2.0 - self.0).expect("2 - alpha lies in [1, 2)")
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(a: FractionalOrder) -> f64 {
        a.0
    }
}

/// Uniform grid `t_n = n·Δt`, `n = 0..=steps`, on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "time horizon must be positive, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidInput("time grid needs at least one step".into()));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, n: usize) -> f64 {
        if n == self.steps {
            self.horizon
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|n| self.node(n))
    }
}

/// Samples `f(t_n)` on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    values: Vec<f64>,
}

impl TimeSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty time signal".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at node {i}")));
        }
        Ok(Self { values })
    }

    pub fn sample<F: Fn(f64) -> f64>(grid: &TimeGrid, f: F) -> Result<Self> {
        Self::new(grid.nodes().map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_grid(&self, grid: &TimeGrid) -> Result<()> {
        if self.values.len() != grid.steps() + 1 {
            return Err(Error::GridMismatch(format!(
                "signal has {} samples, grid has {} nodes",
                self.values.len(),
                grid.steps() + 1
            )));
        }
        Ok(())
    }
}

/// L1 weights `b_j = (j+1)^{1-α} - j^{1-α}`, `j = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Weights {
    alpha: FractionalOrder,
    b: Vec<f64>,
}

impl L1Weights {
    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// `Σ_{j<n} b_j`, which telescopes to `n^{1-α}`.
    pub fn mass(&self, n: usize) -> f64 {
        self.b[..n].iter().sum()
    }
}

pub fn l1_weights(alpha: FractionalOrder, n: usize) -> L1Weights {
    let e = 1.0 - alpha.value();
    let b = (0..n.max(1))
        .map(|j| {
            if j == 0 {
                1.0
            } else {
                // j^e · ((1 + 1/j)^e - 1) without the cancellation of the naive difference
                let jf = j as f64;
                jf.powf(e) * (e * (1.0 / jf).ln_1p()).exp_m1()
            }
        })
        .collect();
    L1Weights { alpha, b }
}

/// `1 / (Γ(2-α) Δt^α)`: the coefficient of the newest sample in the L1 sum.
pub fn l1_diag_coeff(alpha: FractionalOrder, dt: f64) -> f64 {
    1.0 / (alpha.l1_gamma() * dt.powf(alpha.value()))
}

fn check_node(n: usize, steps: usize) -> Result<()> {
    if n == 0 || n > steps {
        return Err(Error::NodeOutOfRange { node: n, steps });
    }
    Ok(())
}

/// L1 approximation of `∂ₜ^α f` at node `at_node`.
pub fn caputo_l1(signal: &TimeSignal, grid: &TimeGrid, alpha: FractionalOrder, at_node: usize) -> Result<f64> {
    signal.check_grid(grid)?;
    check_node(at_node, grid.steps())?;
    let w = l1_weights(alpha, at_node);
    Ok(l1_sum(&w, signal.values(), at_node) * l1_diag_coeff(alpha, grid.dt()))
}

fn l1_sum(w: &L1Weights, f: &[f64], n: usize) -> f64 {
    w.b[..n]
        .iter()
        .enumerate()
        .map(|(j, b)| b * (f[n - j] - f[n - j - 1]))
        .sum()
}

/// Split of the L1 sum at node `n` into `diag_coeff · f_n + history_sum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Split {
    pub history_sum: f64,
    pub diag_coeff: f64,
}

/// `prefix` holds at least the samples at nodes `0..at_node`; anything past
/// `at_node - 1` is ignored.
pub fn caputo_l1_history(prefix: &[f64], grid: &TimeGrid, alpha: FractionalOrder, at_node: usize) -> Result<L1Split> {
    check_node(at_node, grid.steps())?;
    let n = at_node;
    if prefix.len() < n {
        return Err(Error::InvalidInput(format!(
            "history prefix has {} samples, node {n} needs {n}",
            prefix.len()
        )));
    }
    let w = l1_weights(alpha, n);
    let diag_coeff = l1_diag_coeff(alpha, grid.dt());
    Ok(L1Split {
        history_sum: -diag_coeff * l1_lagged(&w, prefix, n),
        diag_coeff,
    })
}

/// `f_{n-1} - Σ_{j=1}^{n-1} b_j (f_{n-j} - f_{n-j-1})`: the value `f_n` must take
/// for the L1 derivative at node `n` to vanish.
pub(crate) fn l1_lagged(w: &L1Weights, f: &[f64], n: usize) -> f64 {
    let mut acc = f[n - 1];
    for j in 1..n {
        acc -= w.b[j] * (f[n - j] - f[n - j - 1]);
    }
    acc
}

/// Something that can be evaluated on `[0, t]`.
pub trait TimeFunction {
    fn eval(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64> TimeFunction for F {
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Piecewise-linear interpolant of a [`TimeSignal`].
#[derive(Debug, Clone, Copy)]
pub struct SampledSignal<'a> {
    pub grid: &'a TimeGrid,
    pub signal: &'a TimeSignal,
}

impl TimeFunction for SampledSignal<'_> {
    fn eval(&self, t: f64) -> f64 {
        let v = self.signal.values();
        let s = (t / self.grid.dt()).clamp(0.0, self.grid.steps() as f64);
        let i = (s.floor() as usize).min(self.grid.steps() - 1);
        let w = s - i as f64;
        v[i] * (1.0 - w) + v[i + 1] * w
    }
}

/// Quadrature settings for `K₀`, `J_r`, `K_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Split lag as a fraction of `t`: lags in `(0, split_r·t)` form the
    /// singular part.
    pub split_r: f64,
    /// Gauss-Jacobi points used on the singular part.
    pub panels: usize,
    /// Dyadic breakpoints placed towards each end of the regular part.
    pub tail_refinement: usize,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            split_r: 1e-3,
            panels: 24,
            tail_refinement: 12,
            abs_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_r > 0.0 && self.split_r < 1.0) {
            return Err(Error::InvalidInput(format!(
                "split_r must lie in (0, 1), got {}",
                self.split_r
            )));
        }
        if self.panels < 8 {
            return Err(Error::InvalidInput(format!("panels must be >= 8, got {}", self.panels)));
        }
        if self.tail_refinement == 0 || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidInput(
                "tail_refinement >= 1 and abs_tol > 0 required".into(),
            ));
        }
        Ok(())
    }
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub value: f64,
    pub error_estimate: f64,
}

/// Result of [`k0_eval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K0Value {
    pub value: f64,
    pub error_estimate: f64,
    /// `J_r` at the split lag.
    pub singular_part: f64,
    /// The slope-bound ceiling the singular part was checked against.
    pub singular_bound: f64,
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "fractional operators are defined for t > 0, got {t}"
        )));
    }
    Ok(())
}

/// `f'(t)` from the fourth-order backward stencil; only samples `≤ t` are used.
fn backward_derivative<F: TimeFunction + ?Sized>(f: &F, t: f64) -> f64 {
    let h = 1e-3 * t;
    let f0 = f.eval(t);
    let f1 = f.eval(t - h);
    let f2 = f.eval(t - 2.0 * h);
    let f3 = f.eval(t - 3.0 * h);
    let f4 = f.eval(t - 4.0 * h);
    (25.0 * f0 - 48.0 * f1 + 36.0 * f2 - 16.0 * f3 + 3.0 * f4) / (12.0 * h)
}

/// `∫₀^ρ (f(t) - f(t-τ)) τ^{-α-1} dτ` via Gauss-Jacobi on the weight `τ^{-α}`.
/// The error estimate compares two rule sizes.
fn singular_integral<F: TimeFunction + ?Sized>(f: &F, t: f64, rho: f64, a: f64, points: usize) -> (f64, f64) {
    let ft = f.eval(t);
    let rule = |n: usize| {
        let (x, w) = quad::gauss_jacobi(n, 0.0, -a);
        // τ = ρ(1 + x)/2, so τ^{-α} dτ = (ρ/2)^{1-α} (1 + x)^{-α} dx
        let scale = (0.5 * rho).powf(1.0 - a);
        x.iter()
            .zip(&w)
            .map(|(x, w)| {
                let tau = 0.5 * rho * (1.0 + x);
                w * (ft - f.eval(t - tau)) / tau
            })
            .sum::<f64>()
            * scale
    };
    let fine = rule(points);
    let coarse = rule(points * 2 / 3);
    (fine, (fine - coarse).abs())
}

/// `∫_lo^hi (f(t) - f(t-τ)) τ^{-α-1} dτ` by adaptive Gauss-Kronrod.
fn regular_integral<F: TimeFunction + ?Sized>(
    f: &F,
    t: f64,
    lo: f64,
    hi: f64,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if hi <= lo {
        return Ok((0.0, 0.0));
    }
    let ft = f.eval(t);
    // geometric breakpoints resolve τ^{-α-1} near lo; dyadic ones towards hi
    // resolve f(t - τ) near the origin
    let mut pts = vec![lo];
    let mut p = lo * 2.0;
    let mid = 0.5 * (lo + hi);
    while p < mid {
        pts.push(p);
        p *= 2.0;
    }
    pts.push(mid);
    let span = hi - mid;
    for k in 1..=cfg.tail_refinement {
        let q = hi - span / 2f64.powi(k as i32);
        if q > *pts.last().unwrap() && q < hi {
            pts.push(q);
        }
    }
    pts.push(hi);
    let opts = AdaptiveOptions {
        abs_tol: cfg.abs_tol,
        rel_tol: 1e-13,
        max_intervals: cfg.max_intervals,
    };
    let r = quad::integrate(|tau| (ft - f.eval(t - tau)) * tau.powf(-a - 1.0), &pts, &opts);
    if !r.converged && r.abs_error > 1e3 * cfg.abs_tol {
        return Err(Error::QuadratureFailed {
            estimate: r.abs_error,
            tolerance: cfg.abs_tol,
        });
    }
    Ok((r.value, r.abs_error))
}

fn check_split(t: f64, r: f64) -> Result<()> {
    check_time(t)?;
    if !(r > 0.0 && r < t) {
        return Err(Error::Domain(format!("split lag r = {r} must lie in (0, t = {t})")));
    }
    Ok(())
}

/// `J_r[f](t) = α/Γ(1-α) ∫₀^r (f(t) - f(t-τ)) τ^{-α-1} dτ`.
///
/// At `α = 1` this is `f'(t)`, the limit of `J_r` as `α → 1` for smooth `f`.
pub fn jr_eval<F: TimeFunction + ?Sized>(
    f: &F,
    t: f64,
    r: f64,
    alpha: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<OperatorValue> {
    check_split(t, r)?;
    cfg.validate()?;
    if alpha.is_classical() {
        return Ok(OperatorValue {
            value: backward_derivative(f, t),
            error_estimate: 0.0,
        });
    }
    let a = alpha.value();
    let c = a * rgamma(1.0 - a);
    let rho = r.min(cfg.split_r * t);
    let (s, se) = singular_integral(f, t, rho, a, cfg.panels);
    let (g, ge) = regular_integral(f, t, rho, r, a, cfg)?;
    Ok(OperatorValue {
        value: c * (s + g),
        error_estimate: c * (se + ge),
    })
}

/// `K_r[f](t) = (f(t) - f(0)) / (t^α Γ(1-α)) + α/Γ(1-α) ∫_r^t (f(t) - f(t-τ)) τ^{-α-1} dτ`.
///
/// Zero at `α = 1`.
pub fn kr_eval<F: TimeFunction + ?Sized>(
    f: &F,
    t: f64,
    r: f64,
    alpha: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<OperatorValue> {
    check_split(t, r)?;
    cfg.validate()?;
    if alpha.is_classical() {
        return Ok(OperatorValue {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let a = alpha.value();
    let rg = rgamma(1.0 - a);
    let boundary = (f.eval(t) - f.eval(0.0)) * rg / t.powf(a);
    let (g, ge) = regular_integral(f, t, r, t, a, cfg)?;
    Ok(OperatorValue {
        value: boundary + a * rg * g,
        error_estimate: a * rg * ge,
    })
}

/// `K₀[f](t) = J_r[f](t) + K_r[f](t)` with `r = split_r · t`.
///
/// `slope_bound` is a Lipschitz bound of `f` near `t`; the singular part must
/// satisfy `|∫₀^r (f(t)-f(t-τ)) τ^{-α-1} dτ| ≤ L r^{1-α}/(1-α)`, otherwise the
/// improper integral is reported as divergent. A large `error_estimate` means
/// the integral may not exist at this point.
pub fn k0_eval<F: TimeFunction + ?Sized>(
    f: &F,
    t: f64,
    alpha: FractionalOrder,
    cfg: &QuadratureConfig,
    slope_bound: f64,
) -> Result<K0Value> {
    check_time(t)?;
    cfg.validate()?;
    if alpha.is_classical() {
        let d = backward_derivative(f, t);
        return Ok(K0Value {
            value: d,
            error_estimate: 0.0,
            singular_part: d,
            singular_bound: slope_bound,
        });
    }
    let a = alpha.value();
    let r = cfg.split_r * t;
    let (s, se) = singular_integral(f, t, r, a, cfg.panels);
    let raw_bound = slope_bound * r.powf(1.0 - a) / (1.0 - a);
    if s.abs() > raw_bound * (1.0 + 1e-9) + 1e-14 {
        return Err(Error::Divergence {
            value: s,
            bound: raw_bound,
        });
    }
    let c = a * rgamma(1.0 - a);
    let kr = kr_eval(f, t, r, alpha, cfg)?;
    Ok(K0Value {
        value: c * s + kr.value,
        error_estimate: c * se + kr.error_estimate,
        singular_part: c * s,
        singular_bound: c * raw_bound,
    })
}
