//! Numerical checks of the comparison, regularity and stability properties
//! on solver output.
//!
//! Every check reports a `worst_margin`: the largest amount by which the
//! asserted inequality fails before any tolerance is granted. A check passes
//! iff `worst_margin ≤ tolerance_used`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fracops::FractionalOrder;
use crate::hamiltonian::{check_assumptions, SampleBox};
use crate::oracles;
use crate::solver::{solve, solve_classical, ProblemSpec, SolveResult};
use crate::specialfun::mittag_leffler;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub passed: bool,
    pub worst_margin: f64,
    /// `(step, node)` of the worst margin, when it is attached to one.
    pub location: Option<(usize, usize)>,
    pub tolerance_used: f64,
    /// Per-step or per-parameter values behind the verdict.
    pub series: Vec<f64>,
}

impl CheckReport {
    fn new(name: &str, worst_margin: f64, location: Option<(usize, usize)>, tolerance: f64, series: Vec<f64>) -> Self {
        Self {
            check_name: name.to_string(),
            passed: worst_margin <= tolerance,
            worst_margin,
            location,
            tolerance_used: tolerance,
            series,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: margin {:.3e} (tol {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.check_name,
            self.worst_margin,
            self.tolerance_used
        )
    }
}

/// Tracks the largest value seen and where.
struct Worst {
    value: f64,
    at: Option<(usize, usize)>,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            at: None,
        }
    }

    fn push(&mut self, value: f64, step: usize, node: usize) {
        if value > self.value {
            self.value = value;
            self.at = Some((step, node));
        }
    }

    fn merge(self, other: Self) -> Self {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

fn same_grids(u: &SolveResult, v: &SolveResult) -> Result<()> {
    if u.grid() != v.grid() || u.time != v.time {
        return Err(Error::GridMismatch(format!(
            "{:?}/{:?} vs {:?}/{:?}",
            u.grid(),
            u.time,
            v.grid(),
            v.time
        )));
    }
    Ok(())
}

/// `max |u - v| ≤ max |u⁰ - v⁰| + tol`; when `u⁰ ≤ v⁰` additionally
/// `u ≤ v + tol` everywhere.
pub fn check_comparison(u: &SolveResult, v: &SolveResult, tol: f64) -> Result<CheckReport> {
    same_grids(u, v)?;
    let initial = u.trajectory[0].distance(&v.trajectory[0])?;
    let ordered = u.trajectory[0]
        .values()
        .iter()
        .zip(v.trajectory[0].values())
        .all(|(a, b)| a <= b);
    let mut worst = Worst::new();
    let mut series = Vec::with_capacity(u.trajectory.len());
    for (n, (a, b)) in u.trajectory.iter().zip(&v.trajectory).enumerate() {
        let mut step_sup = 0.0f64;
        for (i, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
            step_sup = step_sup.max((x - y).abs());
            worst.push((x - y).abs() - initial, n, i);
            if ordered {
                worst.push(x - y, n, i);
            }
        }
        series.push(step_sup);
    }
    let name = if ordered { "comparison_ordered" } else { "comparison" };
    Ok(CheckReport::new(name, worst.value, worst.at, tol, series))
}

/// `|u(t_n) - u(t_m)| ≤ M |t_n - t_m|^α` over all pairs of time nodes.
pub fn check_holder_time(u: &SolveResult, m: f64, tol: f64) -> CheckReport {
    let a = u.alpha.value();
    let traj = &u.trajectory;
    let dt = u.time.dt();
    let worst = (1..traj.len())
        .into_par_iter()
        .map(|n| {
            let mut w = Worst::new();
            for k in 0..n {
                let bound = m * ((n - k) as f64 * dt).powf(a);
                for (i, (x, y)) in traj[n].values().iter().zip(traj[k].values()).enumerate() {
                    w.push((x - y).abs() - bound, n, i);
                }
            }
            w
        })
        .reduce(Worst::new, Worst::merge);
    let series = traj
        .iter()
        .map(|s| s.distance(&traj[0]).expect("slices share a grid"))
        .collect();
    let margin = if traj.len() < 2 { 0.0 } else { worst.value };
    CheckReport::new("holder_time", margin, worst.at, tol, series)
}

/// `L(t) = (lip u₀ + L₁/L₂) E_α(L₂ t^α) - L₁/L₂`.
pub fn lipschitz_envelope(alpha: FractionalOrder, lip_u0: f64, l1: f64, l2: f64, t: f64) -> Result<f64> {
    if !(l2 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "the Lipschitz envelope needs L2 > 0, got {l2}; pass a small surrogate"
        )));
    }
    let e = mittag_leffler(alpha, l2 * t.powf(alpha.value()))?;
    Ok((lip_u0 + l1 / l2) * e - l1 / l2)
}

/// Stand-in for `L₂` when the Hamiltonian has `L₂ = 0`.
pub const L2_SURROGATE: f64 = 1e-8;

/// Discrete Lipschitz constant of every slice against `L(t_n) + tol`.
pub fn check_lipschitz_space(u: &SolveResult, lip_u0: f64, l1: f64, l2: f64, tol: f64) -> Result<CheckReport> {
    let mut worst = Worst::new();
    let mut series = Vec::with_capacity(u.trajectory.len());
    for (n, s) in u.trajectory.iter().enumerate() {
        let lip = s.lipschitz();
        let bound = lipschitz_envelope(u.alpha, lip_u0, l1, l2, u.time.node(n))?;
        worst.push(lip - bound, n, 0);
        series.push(lip);
    }
    let at = worst.at.map(|(n, _)| (n, 0));
    Ok(CheckReport::new("lipschitz_space", worst.value, at, tol, series))
}

fn window_start(problem: &ProblemSpec) -> usize {
    problem.time.steps().div_ceil(2)
}

/// Distances on `[T/2, T]` between `solve(α_k)` and the classical solution
/// must not increase along the ascending `alphas`, and the last must be at
/// most `tol_last`.
pub fn check_alpha_convergence(problem: &ProblemSpec, alphas: &[f64], tol_last: f64) -> Result<CheckReport> {
    if alphas.is_empty() || alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("alphas must be a nonempty ascending list".into()));
    }
    let reference = solve_classical(problem)?;
    let first = window_start(problem);
    let series = alphas
        .iter()
        .map(|&a| {
            let p = problem.clone().with_alpha(FractionalOrder::new(a)?);
            solve(&p)?.distance_from(&reference, first)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (margin, at) = monotone_margin(&series, tol_last);
    Ok(CheckReport::new("alpha_convergence", margin, at, 0.0, series))
}

/// Largest increase along `series`, or the excess of its last entry over
/// `tol_last`, whichever is worse. The location's first slot is the index.
fn monotone_margin(series: &[f64], tol_last: f64) -> (f64, Option<(usize, usize)>) {
    let mut worst = Worst::new();
    for (k, w) in series.windows(2).enumerate() {
        worst.push(w[1] - w[0], k + 1, 0);
    }
    let last = series.len() - 1;
    worst.push(series[last] - tol_last, last, 0);
    (worst.value, worst.at)
}

/// Distances on `[T/2, T]` between consecutive fractional orders; they should
/// shrink as the orders approach each other near the top of the list.
pub fn alpha_cauchy_distances(problem: &ProblemSpec, alphas: &[f64]) -> Result<Vec<f64>> {
    let first = window_start(problem);
    let runs = alphas
        .iter()
        .map(|&a| solve(&problem.clone().with_alpha(FractionalOrder::new(a)?)))
        .collect::<Result<Vec<_>>>()?;
    runs.windows(2).map(|w| w[0].distance_from(&w[1], first)).collect()
}

/// Solutions for `H + ε` approach the one for `H` linearly: with `C` fitted
/// through the origin on the two largest `ε`, every distance on `[T/2, T]`
/// stays below `C ε + tol` and the distances decrease with `ε`.
pub fn check_hamiltonian_stability(problem: &ProblemSpec, eps: &[f64], tol: f64) -> Result<CheckReport> {
    if eps.is_empty() {
        return Err(Error::InvalidInput("need at least one perturbation size".into()));
    }
    let mut eps = eps.to_vec();
    eps.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let base = solve(problem)?;
    let first = window_start(problem);
    let series = eps
        .iter()
        .map(|&e| {
            let p = problem.clone().with_hamiltonian(problem.hamiltonian.shifted(e));
            solve(&p)?.distance_from(&base, first)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (num, den) = eps
        .iter()
        .zip(&series)
        .take(2)
        .fold((0.0, 0.0), |(n, d), (e, s)| (n + e.abs() * s, d + e * e));
    let c = if den > 0.0 { num / den } else { 0.0 };
    let mut worst = Worst::new();
    for (k, (e, d)) in eps.iter().zip(&series).enumerate() {
        worst.push(d - c * e.abs(), k, 0);
        if k > 0 {
            worst.push(d - series[k - 1], k, 0);
        }
    }
    Ok(CheckReport::new(
        "hamiltonian_stability",
        worst.value,
        worst.at,
        tol,
        series,
    ))
}

/// `sup |u| ≤ max |u₀| + C max{1, T}` up to `1e-6`.
pub fn check_uniform_bound(u: &SolveResult, c: f64) -> CheckReport {
    const TOL: f64 = 1e-6;
    let bound = u.trajectory[0].max_abs() + c * u.time.horizon().max(1.0);
    let mut worst = Worst::new();
    let mut series = Vec::with_capacity(u.trajectory.len());
    for (n, s) in u.trajectory.iter().enumerate() {
        for (i, v) in s.values().iter().enumerate() {
            worst.push(v.abs() - bound, n, i);
        }
        series.push(s.max_abs());
    }
    CheckReport::new("uniform_bound", worst.value, worst.at, TOL, series)
}

/// Barrier sandwich `u₀ - M t^α ≤ u ≤ u₀ + M t^α`.
pub fn check_barrier_sandwich(u: &SolveResult, pair: &oracles::BarrierPair, tol: f64) -> CheckReport {
    let mut worst = Worst::new();
    for (n, s) in u.trajectory.iter().enumerate() {
        let t = u.time.node(n);
        let lo = pair.lower(t);
        let hi = pair.upper(t);
        for (i, v) in s.values().iter().enumerate() {
            worst.push(lo.values()[i] - v, n, i);
            worst.push(v - hi.values()[i], n, i);
        }
    }
    CheckReport::new("barrier_sandwich", worst.value, worst.at, tol, Vec::new())
}

/// Named groups of checks runnable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    /// Everything below.
    Canonical,
    Comparison,
    Regularity,
    Stability,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Self::Canonical),
            "comparison" => Ok(Self::Comparison),
            "regularity" => Ok(Self::Regularity),
            "stability" => Ok(Self::Stability),
            other => Err(Error::InvalidInput(format!(
                "unknown suite {other:?}; expected canonical, comparison, regularity or stability"
            ))),
        }
    }
}

/// Tolerances of the suites. The defaults match the scheme error seen in the
/// refinement studies at `n = 256`, `N = 512`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteTolerances {
    pub comparison: f64,
    pub holder: f64,
    pub lipschitz: f64,
    pub barrier: f64,
    pub stability: f64,
    /// Bound on the last distance to the classical solution. This is a
    /// property of the equation, not the scheme: for unit transport of
    /// `sin 2πx` the `α = 0.95` solution is about 0.3 away at `T = 0.5`.
    pub alpha_last: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self {
            comparison: 1e-10,
            holder: 0.02,
            lipschitz: 0.02,
            barrier: 1e-2,
            stability: 1e-9,
            alpha_last: 0.5,
        }
    }
}

/// Lipschitz constant of the initial data, from its profile when known.
pub fn initial_lipschitz(problem: &ProblemSpec) -> f64 {
    let discrete = problem.initial.lipschitz();
    problem
        .profile
        .as_ref()
        .map_or(discrete, |p| p.lipschitz().max(discrete))
}

/// Runs `suite` on `problem`; `seed` drives the sampled assumption check.
pub fn run_suite(suite: Suite, problem: &ProblemSpec, tol: &SuiteTolerances, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let base = solve(problem)?;
    let want = |s: Suite| suite == Suite::Canonical || suite == s;

    if want(Suite::Comparison) {
        out.push(check_comparison(&base, &base, tol.comparison)?);
        let shifted = solve(&problem.clone().with_initial(problem.initial.offset(0.1))?)?;
        let mut rep = check_comparison(&base, &shifted, tol.comparison)?;
        rep.check_name = "comparison_shifted".into();
        out.push(rep);
        let raised: Vec<f64> = problem
            .initial
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v + 0.05 * (1.0 + (i % 7) as f64 / 7.0))
            .collect();
        let raised = crate::solver::GridFunction::new(problem.space, raised)?;
        let upper = solve(&problem.clone().with_initial(raised)?)?;
        out.push(check_comparison(&base, &upper, tol.comparison)?);
    }

    if want(Suite::Regularity) {
        let h = &problem.hamiltonian;
        let lip = initial_lipschitz(problem);
        let pair = oracles::barrier_pair(&problem.initial, problem.alpha, h, lip, &problem.time)?;
        out.push(check_barrier_sandwich(&base, &pair, tol.barrier));
        out.push(check_holder_time(&base, pair.m, tol.holder));
        let l2 = if h.lip_xp > 0.0 { h.lip_xp } else { L2_SURROGATE };
        out.push(check_lipschitz_space(&base, lip, h.lip_x, l2, tol.lipschitz)?);
        let c = oracles::uniform_bound_constant(&problem.initial, problem.alpha, h, &problem.time);
        out.push(check_uniform_bound(&base, c));
        let bx = SampleBox {
            dim: problem.space.dim(),
            t_max: problem.time.horizon(),
            r_abs_max: problem.initial.max_abs() + 1.0 + c * problem.time.horizon().max(1.0),
            p_abs_max: lip.max(1.0),
        };
        let a = check_assumptions(h, 4096, seed, &bx);
        let margin = a.x_lipschitz_margin.max(if h.monotone_in_r {
            a.r_monotonicity_margin
        } else {
            f64::NEG_INFINITY
        });
        out.push(CheckReport::new(
            "hamiltonian_assumptions",
            margin,
            None,
            1e-9,
            Vec::new(),
        ));
    }

    if want(Suite::Stability) {
        out.push(check_hamiltonian_stability(
            problem,
            &[1e-1, 1e-2, 1e-3],
            tol.stability,
        )?);
        if problem.alpha.value() < 1.0 {
            out.push(check_alpha_convergence(problem, &[0.6, 0.8, 0.95], tol.alpha_last)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::TimeGrid;
    use crate::hamiltonian::{HamiltonianSpec, VelocityField};
    use crate::solver::{InitialProfile, TorusGrid};
    use crate::specialfun::gamma;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    fn problem(alpha: f64, h: HamiltonianSpec, n: usize, steps: usize) -> ProblemSpec {
        ProblemSpec::new(
            order(alpha),
            TimeGrid::new(0.5, steps).unwrap(),
            TorusGrid::new(1, n).unwrap(),
            h,
            InitialProfile::sine(),
        )
        .unwrap()
    }

    fn transport() -> HamiltonianSpec {
        HamiltonianSpec::transport(VelocityField::Constant(vec![1.0])).unwrap()
    }

    #[test]
    fn comparison_with_itself() {
        let u = solve(&problem(0.5, transport(), 64, 64)).unwrap();
        let r = check_comparison(&u, &u, 1e-10).unwrap();
        assert!(r.passed);
        assert_eq!(r.worst_margin, 0.0);
        assert_eq!(r.check_name, "comparison_ordered");
    }

    #[test]
    fn comparison_shifted_data() {
        let p = problem(0.5, transport(), 64, 64);
        let u = solve(&p).unwrap();
        let v = solve(&p.clone().with_initial(p.initial.offset(0.1)).unwrap()).unwrap();
        let r = check_comparison(&u, &v, 1e-12).unwrap();
        assert!(r.passed, "{r}");
        assert!(r.series.iter().all(|d| *d <= 0.1 + 1e-12));
    }

    #[test]
    fn comparison_grid_mismatch() {
        let u = solve(&problem(0.5, transport(), 64, 64)).unwrap();
        let v = solve(&problem(0.5, transport(), 32, 64)).unwrap();
        assert!(matches!(check_comparison(&u, &v, 1e-10), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn holder_zero_hamiltonian() {
        let u = solve(&problem(0.5, HamiltonianSpec::zero(), 32, 32)).unwrap();
        let r = check_holder_time(&u, 0.0, 0.0);
        assert!(r.passed);
        assert_eq!(r.worst_margin, 0.0);
    }

    #[test]
    fn holder_constant_source() {
        let u = solve(&problem(0.5, HamiltonianSpec::constant(-1.0), 16, 256)).unwrap();
        let m = 1.0 / gamma(1.5).unwrap();
        let r = check_holder_time(&u, m, 1e-3);
        assert!(r.passed, "{r}");
        // the concavity bound is sharp at the first step
        assert!(r.worst_margin > -1e-2);
    }

    #[test]
    fn envelope_examples() {
        let a = order(0.5);
        assert!((lipschitz_envelope(a, 3.0, 0.0, 1e-8, 0.7).unwrap() - 3.0).abs() < 1e-6);
        assert!(lipschitz_envelope(a, 3.0, 0.0, 0.0, 0.7).is_err());
        let e = lipschitz_envelope(a, 1.0, 2.0, 1.0, 1.0).unwrap();
        let ml = 1f64.exp() * crate::specialfun::erfc(-1.0);
        assert!((e - (3.0 * ml - 2.0)).abs() < 1e-10);
    }

    #[test]
    fn lipschitz_zero_hamiltonian() {
        let u = solve(&problem(0.5, HamiltonianSpec::zero(), 64, 32)).unwrap();
        let r = check_lipschitz_space(&u, 2.0 * std::f64::consts::PI, 0.0, L2_SURROGATE, 0.0).unwrap();
        assert!(r.passed, "{r}");
        assert!(r.series.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn lipschitz_constant_transport() {
        let u = solve(&problem(0.5, transport(), 128, 128)).unwrap();
        let r = check_lipschitz_space(&u, 2.0 * std::f64::consts::PI, 0.0, L2_SURROGATE, 1e-9).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn alpha_convergence_constant_source() {
        let p = problem(0.5, HamiltonianSpec::constant(-1.0), 8, 256);
        let r = check_alpha_convergence(&p, &[0.7, 0.9, 0.99], 0.05).unwrap();
        assert!(r.passed, "{r:?}");
        // closed form: sup over [T/2, T] of |t^α/Γ(1+α) - t|
        for (&a, d) in [0.7, 0.9, 0.99].iter().zip(&r.series) {
            let g = gamma(1.0 + a).unwrap();
            let exact = (128..=256)
                .map(|m| {
                    let t = 0.5 * m as f64 / 256.0;
                    (t.powf(a) / g - t).abs()
                })
                .fold(0.0, f64::max);
            assert!((d - exact).abs() < 2e-3, "alpha {a}: {d} vs {exact}");
        }
        assert!(check_alpha_convergence(&p, &[0.9, 0.7], 0.05).is_err());
    }

    #[test]
    fn alpha_convergence_zero_hamiltonian() {
        let p = problem(0.5, HamiltonianSpec::zero(), 16, 32);
        let r = check_alpha_convergence(&p, &[0.6, 0.8, 0.95], 0.0).unwrap();
        assert!(r.passed);
        assert!(r.series.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn cauchy_distances_shrink() {
        let p = problem(0.5, HamiltonianSpec::constant(-1.0), 8, 128);
        let d = alpha_cauchy_distances(&p, &[0.8, 0.9, 0.95, 0.975]).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    #[test]
    fn stability_zero_hamiltonian_closed_form() {
        let p = problem(0.5, HamiltonianSpec::zero(), 8, 512);
        let eps = [1e-1, 1e-2, 1e-3];
        let r = check_hamiltonian_stability(&p, &eps, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
        let power = 0.5f64.sqrt() / gamma(1.5).unwrap();
        for (e, d) in eps.iter().zip(&r.series) {
            assert!((d / e - power).abs() < 2e-3 * power, "{d}");
        }
        let r0 = check_hamiltonian_stability(&p, &[0.0], 0.0).unwrap();
        assert_eq!(r0.series, vec![0.0]);
    }

    #[test]
    fn stability_transport() {
        let p = problem(0.5, transport(), 64, 64);
        let r = check_hamiltonian_stability(&p, &[1e-3, 1e-1, 1e-2], 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.series.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn uniform_bound_examples() {
        let u = solve(&problem(0.5, HamiltonianSpec::zero(), 16, 16)).unwrap();
        assert!(check_uniform_bound(&u, 0.0).passed);
        let u = solve(&problem(0.5, HamiltonianSpec::constant(-1.0), 16, 64)).unwrap();
        let r = check_uniform_bound(&u, 1.0 / gamma(1.5).unwrap());
        assert!(r.passed, "{r}");
    }

    #[test]
    fn reports_are_deterministic() {
        let p = problem(0.5, transport(), 32, 32);
        let a = run_suite(Suite::Regularity, &p, &SuiteTolerances::default(), 9).unwrap();
        let b = run_suite(Suite::Regularity, &p, &SuiteTolerances::default(), 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.passed), "{a:?}");
    }

    #[test]
    fn suite_names() {
        assert_eq!("canonical".parse::<Suite>().unwrap(), Suite::Canonical);
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn report_serializes() {
        let r = CheckReport::new("x", 0.5, Some((1, 2)), 1.0, vec![1.0]);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"check_name\":\"x\"") && s.contains("\"passed\":true"));
    }
}
