//! Reference solutions and brute-force operators, independent of the solver.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fracops::{FractionalOrder, TimeGrid};
use crate::hamiltonian::{HamiltonianSpec, MAX_DIM};
use crate::quad::{self, AdaptiveOptions, CompensatedSum};
use crate::solver::GridFunction;
use crate::specialfun::{self, breakpoints, gamma, rgamma, WRIGHT_Z_MAX};

/// Largest admissible Wright mass beyond the truncation point.
pub const TRANSPORT_TAIL_TOL: f64 = 1e-9;

fn check_transport_args(t: f64, c: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("exact_transport needs t >= 0, got {t}")));
    }
    if !c.is_finite() {
        return Err(Error::InvalidInput(format!("transport speed must be finite, got {c}")));
    }
    Ok(())
}

fn check_tail(alpha: FractionalOrder) -> Result<()> {
    let bound = specialfun::wright_tail_bound(alpha, 0, WRIGHT_Z_MAX);
    if bound > TRANSPORT_TAIL_TOL {
        return Err(Error::TailNotNegligible {
            bound,
            tolerance: TRANSPORT_TAIL_TOL,
        });
    }
    Ok(())
}

/// Exact solution of `∂ₜ^α u + c ∂ₓu = 0`, `u(0) = u0`:
/// `u(t, x) = ∫₀^∞ W_{-α,1-α}(-z) u0(x - c t^α z) dz`.
///
/// At `α = 1` the density is a point mass at `z = 1` and this is `u0(x - ct)`.
pub fn exact_transport<F: Fn(f64) -> f64>(u0: &F, alpha: FractionalOrder, c: f64, t: f64, x: f64) -> Result<f64> {
    check_transport_args(t, c)?;
    if t == 0.0 {
        return Ok(u0(x));
    }
    if alpha.is_classical() {
        return Ok(u0(x - c * t));
    }
    check_tail(alpha)?;
    let shift = c * t.powf(alpha.value());
    let mut failure = None;
    let integrand = |z: f64| match specialfun::wright(alpha, -z) {
        Ok(w) => w * u0(x - shift * z),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let opts = AdaptiveOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-12,
        max_intervals: 4000,
    };
    let r = quad::integrate(integrand, &breakpoints(WRIGHT_Z_MAX), &opts);
    if let Some(e) = failure {
        return Err(e);
    }
    if !r.converged {
        return Err(Error::QuadratureFailed {
            estimate: r.abs_error,
            tolerance: opts.abs_tol,
        });
    }
    Ok(r.value)
}

/// A fixed quadrature rule for `z ↦ W_{-α,1-α}(-z)` on `[0, 30]`, for
/// evaluating the transport solution at many points of one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportKernel {
    shift: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TransportKernel {
    /// Panels are halved until the rule reproduces the zeroth and first
    /// moments of the density to `1e-11`.
    pub fn new(alpha: FractionalOrder, c: f64, t: f64) -> Result<Self> {
        check_transport_args(t, c)?;
        if t == 0.0 {
            return Ok(Self {
                shift: 0.0,
                nodes: vec![0.0],
                weights: vec![1.0],
            });
        }
        if alpha.is_classical() {
            return Ok(Self {
                shift: c * t,
                nodes: vec![1.0],
                weights: vec![1.0],
            });
        }
        check_tail(alpha)?;
        let first = rgamma(1.0 + alpha.value());
        let (gx, gw) = quad::gauss_legendre(16);
        let pts = breakpoints(WRIGHT_Z_MAX);
        let mut width = 0.5;
        loop {
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for seg in pts.windows(2) {
                let pieces = ((seg[1] - seg[0]) / width).ceil() as usize;
                let step = (seg[1] - seg[0]) / pieces as f64;
                for k in 0..pieces {
                    let a = seg[0] + k as f64 * step;
                    for (x, w) in gx.iter().zip(&gw) {
                        let z = a + 0.5 * step * (x + 1.0);
                        nodes.push(z);
                        weights.push(0.5 * step * w * specialfun::wright(alpha, -z)?);
                    }
                }
            }
            let mut m0 = CompensatedSum::new();
            let mut m1 = CompensatedSum::new();
            for (z, w) in nodes.iter().zip(&weights) {
                m0.add(*w);
                m1.add(w * z);
            }
            let err = (m0.value() - 1.0).abs().max((m1.value() - first).abs());
            if err <= 1e-11 {
                return Ok(Self {
                    shift: c * t.powf(alpha.value()),
                    nodes,
                    weights,
                });
            }
            if width < 1e-3 {
                return Err(Error::QuadratureFailed {
                    estimate: err,
                    tolerance: 1e-11,
                });
            }
            width *= 0.5;
        }
    }

    pub fn eval<F: Fn(f64) -> f64>(&self, u0: &F, x: f64) -> f64 {
        let mut s = CompensatedSum::new();
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            s.add(w * u0(x - self.shift * z));
        }
        s.value()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `c0 E_α(-t^α)`, the solution of `∂ₜ^α f + f = 0`, `f(0) = c0`.
pub fn relaxation_ode(c0: f64, alpha: FractionalOrder, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("relaxation_ode needs t >= 0, got {t}")));
    }
    Ok(c0 * specialfun::mittag_leffler(alpha, -t.powf(alpha.value()))?)
}

/// Fourth-order central difference with a step proportional to `s`.
fn derivative<F: Fn(f64) -> f64>(f: &F, s: f64) -> f64 {
    let h = 1e-3 * s;
    (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h)
}

/// `1/Γ(1-α) ∫₀ᵗ f'(s) (t-s)^{-α} ds` by direct quadrature.
///
/// `f'` comes from central differences. The interval is split at `t/2`;
/// `s = (t/2) w^{1/α}` on the left absorbs an `s^{α-1}` singularity of `f'`,
/// and `s = t - (t/2) σ^{1/(1-α)}` on the right removes the kernel
/// singularity. Each half gets `panels / 2` four-point Gauss panels.
///
/// `f` is evaluated slightly beyond `t` by the differencing.
pub fn caputo_brute<F: Fn(f64) -> f64>(f: &F, t: f64, alpha: FractionalOrder, panels: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("caputo_brute needs t > 0, got {t}")));
    }
    if panels < 2 {
        return Err(Error::InvalidInput(format!(
            "caputo_brute needs at least 2 panels, got {panels}"
        )));
    }
    let a = alpha.value();
    if alpha.is_classical() {
        return Ok(derivative(f, t));
    }
    let half = 0.5 * t;
    let per_half = panels / 2;
    let (gx, gw) = quad::gauss_legendre(4);
    let width = 1.0 / per_half as f64;
    let mut left = CompensatedSum::new();
    let mut right = CompensatedSum::new();
    for k in 0..per_half {
        let lo = k as f64 * width;
        for (x, w) in gx.iter().zip(&gw) {
            let u = lo + 0.5 * width * (x + 1.0);
            let wt = 0.5 * width * w;
            // left: ds = (t/2)/α w^{1/α-1} dw
            let s = half * u.powf(1.0 / a);
            let ds = half / a * u.powf(1.0 / a - 1.0);
            left.add(wt * derivative(f, s) * (t - s).powf(-a) * ds);
            // right: f'(s) (t-s)^{-α} ds = f'(s) (t/2)^{1-α}/(1-α) dσ
            let s = t - half * u.powf(1.0 / (1.0 - a));
            right.add(wt * derivative(f, s));
        }
    }
    let right = right.value() * half.powf(1.0 - a) / (1.0 - a);
    Ok((left.value() + right) * rgamma(1.0 - a))
}

/// Default panel count of [`caputo_brute`].
pub const CAPUTO_BRUTE_PANELS: usize = 4096;

/// Points of the ball `|p| ≤ radius` used to sample suprema over gradients.
fn gradient_samples(dim: usize, radius: f64) -> Vec<[f64; MAX_DIM]> {
    const RADIAL: usize = 32;
    let mut out = Vec::new();
    if dim == 1 {
        for k in 0..=2 * RADIAL {
            out.push([radius * (k as f64 / RADIAL as f64 - 1.0), 0.0]);
        }
    } else {
        out.push([0.0, 0.0]);
        for k in 1..=RADIAL {
            let r = radius * k as f64 / RADIAL as f64;
            for m in 0..64 {
                let phi = 2.0 * PI * m as f64 / 64.0;
                out.push([r * phi.cos(), r * phi.sin()]);
            }
        }
    }
    out
}

fn sup_over_samples(u0: &GridFunction, h: &HamiltonianSpec, time: &TimeGrid, grads: &[[f64; MAX_DIM]]) -> f64 {
    let g = u0.grid();
    let d = g.dim();
    let r = u0.max_abs();
    let mut worst = 0.0f64;
    for t in time.nodes() {
        for i in 0..g.len() {
            let x = g.point(i);
            for p in grads {
                worst = worst.max(h.eval(t, &x[..d], r, &p[..d]).abs());
            }
        }
    }
    worst
}

/// Barrier constant `M = sup |H(t, x, max|u0|, p)| / Γ(α+1)` over the grid,
/// the time nodes and `|p| ≤ lip_u0`.
pub fn barrier_constant(
    u0: &GridFunction,
    alpha: FractionalOrder,
    h: &HamiltonianSpec,
    lip_u0: f64,
    time: &TimeGrid,
) -> f64 {
    let grads = gradient_samples(u0.grid().dim(), lip_u0);
    sup_over_samples(u0, h, time, &grads) * rgamma(1.0 + alpha.value())
}

/// `C = sup |H(t, x, max|u0|, 0)| / Γ(α+1)` for the bound
/// `|u| ≤ max|u0| + C max{1, T}`.
pub fn uniform_bound_constant(u0: &GridFunction, alpha: FractionalOrder, h: &HamiltonianSpec, time: &TimeGrid) -> f64 {
    sup_over_samples(u0, h, time, &[[0.0; MAX_DIM]]) * rgamma(1.0 + alpha.value())
}

/// The pair `u0 ∓ M t^α` enclosing the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierPair {
    pub m: f64,
    pub alpha: FractionalOrder,
    pub u0: GridFunction,
}

impl BarrierPair {
    fn at(&self, t: f64, sign: f64) -> GridFunction {
        self.u0.offset(sign * self.m * t.powf(self.alpha.value()))
    }

    pub fn lower(&self, t: f64) -> GridFunction {
        self.at(t, -1.0)
    }

    pub fn upper(&self, t: f64) -> GridFunction {
        self.at(t, 1.0)
    }
}

pub fn barrier_pair(
    u0: &GridFunction,
    alpha: FractionalOrder,
    h: &HamiltonianSpec,
    lip_u0: f64,
    time: &TimeGrid,
) -> Result<BarrierPair> {
    let discrete = u0.lipschitz();
    if !(lip_u0 >= discrete * (1.0 - 1e-12)) {
        return Err(Error::InvalidInput(format!(
            "lip_u0 = {lip_u0} is below the discrete Lipschitz constant {discrete}"
        )));
    }
    Ok(BarrierPair {
        m: barrier_constant(u0, alpha, h, lip_u0, time),
        alpha,
        u0: u0.clone(),
    })
}

pub type OracleFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Problems with a known solution `u(t, x)`.
#[derive(Clone)]
pub enum OracleProblem {
    /// `∂ₜ^α u + c ∂ₓu = 0`.
    TransportConstSpeed {
        c: f64,
    },
    /// `∂ₜ^α u + u = 0`, `u(0) = c0`.
    RelaxationOde {
        c0: f64,
    },
    /// The upper barrier `u0(x) + M t^α`.
    PowerBarrier {
        m: f64,
    },
    Custom(Arc<OracleFn>),
}

impl fmt::Debug for OracleProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TransportConstSpeed { c } => f.debug_struct("TransportConstSpeed").field("c", c).finish(),
            Self::RelaxationOde { c0 } => f.debug_struct("RelaxationOde").field("c0", c0).finish(),
            Self::PowerBarrier { m } => f.debug_struct("PowerBarrier").field("m", m).finish(),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl OracleProblem {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::TransportConstSpeed { c } if !c.is_finite() => {
                Err(Error::InvalidInput(format!("transport speed must be finite, got {c}")))
            }
            Self::RelaxationOde { c0 } if !c0.is_finite() => {
                Err(Error::InvalidInput(format!("c0 must be finite, got {c0}")))
            }
            Self::PowerBarrier { m } if !(*m > 0.0) || !m.is_finite() => Err(Error::InvalidInput(format!(
                "barrier constant must be positive, got {m}"
            ))),
            _ => Ok(()),
        }
    }

    /// `u(t, x)`; `u0` is ignored by the variants that carry their own data.
    pub fn eval<F: Fn(f64) -> f64>(&self, u0: &F, alpha: FractionalOrder, t: f64, x: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Self::TransportConstSpeed { c } => exact_transport(u0, alpha, *c, t, x),
            Self::RelaxationOde { c0 } => relaxation_ode(*c0, alpha, t),
            Self::PowerBarrier { m } => Ok(u0(x) + m * t.max(0.0).powf(alpha.value())),
            Self::Custom(f) => Ok(f(t, x)),
        }
    }
}

/// `Γ(α+1)`, convenient for power-law references.
pub fn gamma_one_plus(alpha: FractionalOrder) -> f64 {
    gamma(1.0 + alpha.value()).expect("1 + alpha lies in (1, 2]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{SpeedField, VelocityField};
    use crate::solver::{InitialProfile, TorusGrid};
    use crate::specialfun::{erfc, mittag_leffler};

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    fn sine(x: f64) -> f64 {
        (2.0 * PI * x).sin()
    }

    #[test]
    fn transport_at_time_zero() {
        for &a in &[0.3, 0.5, 1.0] {
            assert_eq!(exact_transport(&sine, order(a), 1.0, 0.0, 0.3).unwrap(), sine(0.3));
        }
    }

    #[test]
    fn transport_of_constant_is_constant() {
        for &a in &[0.2, 0.5, 0.8] {
            for &t in &[0.25, 1.0] {
                let v = exact_transport(&|_| 2.5, order(a), 1.0, t, 0.4).unwrap();
                assert!((v - 2.5).abs() < 1e-6, "alpha {a}, t {t}: {v}");
            }
        }
    }

    #[test]
    fn transport_of_linear_profile() {
        for &a in &[0.3, 0.5, 0.8] {
            let t: f64 = 0.4;
            let x = 0.7;
            let v = exact_transport(&|y| y, order(a), 1.0, t, x).unwrap();
            let expected = x - t.powf(a) / gamma_one_plus(order(a));
            assert!((v - expected).abs() < 1e-8, "alpha {a}: {v} vs {expected}");
        }
    }

    #[test]
    fn transport_half_order_matches_gaussian_convolution() {
        // at α = 1/2 the density is e^{-z²/4}/√π and the sine transforms into
        // a damped oscillation; compare with composite Simpson on a long interval
        let t: f64 = 0.5;
        let x = 0.2;
        let s = t.sqrt();
        let n = 200_000;
        let zmax = 40.0;
        let dz = zmax / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let z = k as f64 * dz;
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * (-z * z / 4.0).exp() / PI.sqrt() * sine(x - s * z);
        }
        acc *= dz / 3.0;
        let v = exact_transport(&sine, order(0.5), 1.0, t, x).unwrap();
        assert!((v - acc).abs() < 1e-9, "{v} vs {acc}");
    }

    #[test]
    fn transport_classical_is_a_shift() {
        let v = exact_transport(&sine, order(1.0), 2.0, 0.1, 0.3).unwrap();
        assert_eq!(v, sine(0.3 - 0.2));
    }

    #[test]
    fn transport_errors() {
        assert!(matches!(
            exact_transport(&sine, order(0.5), 1.0, -1.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(exact_transport(&sine, order(0.5), f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn kernel_agrees_with_adaptive() {
        for &a in &[0.2, 0.5, 0.8, 0.9] {
            let k = TransportKernel::new(order(a), 1.0, 0.5).unwrap();
            for &x in &[0.0, 0.13, 0.5, 0.91] {
                let fast = k.eval(&sine, x);
                let slow = exact_transport(&sine, order(a), 1.0, 0.5, x).unwrap();
                assert!((fast - slow).abs() < 1e-9, "alpha {a}, x {x}: {fast} vs {slow}");
            }
        }
        let k = TransportKernel::new(order(1.0), 1.0, 0.25).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k.eval(&sine, 0.5), sine(0.25));
    }

    #[test]
    fn relaxation_examples() {
        assert_eq!(relaxation_ode(3.0, order(0.5), 0.0).unwrap(), 3.0);
        for &t in &[0.1, 1.0, 2.5] {
            let v = relaxation_ode(2.0, order(1.0), t).unwrap();
            assert!((v - 2.0 * (-t).exp()).abs() < 1e-13);
        }
        let e = 1f64.exp() * erfc(1.0);
        assert!((relaxation_ode(1.0, order(0.5), 1.0).unwrap() - e).abs() < 1e-12);
        assert!((e - 0.4275836).abs() < 1e-7);
        assert!(relaxation_ode(1.0, order(0.5), -1.0).is_err());
    }

    #[test]
    fn relaxation_satisfies_its_equation() {
        for &a in &[0.3, 0.5, 0.8] {
            let f = |s: f64| relaxation_ode(1.0, order(a), s).unwrap();
            for &t in &[0.25, 0.5, 1.0] {
                let d = caputo_brute(&f, t, order(a), CAPUTO_BRUTE_PANELS).unwrap();
                assert!((d + f(t)).abs() < 1e-4, "alpha {a}, t {t}: {}", d + f(t));
            }
        }
    }

    #[test]
    fn brute_examples() {
        let g15 = gamma(1.5).unwrap();
        let d = caputo_brute(&|s: f64| s.powf(0.5), 1.0, order(0.5), CAPUTO_BRUTE_PANELS).unwrap();
        assert!((d - g15).abs() < 1e-5, "{d}");
        assert_eq!(caputo_brute(&|_| 4.0, 0.7, order(0.3), 64).unwrap(), 0.0);
        let d = caputo_brute(&|s: f64| s * s, 1.0, order(0.5), CAPUTO_BRUTE_PANELS).unwrap();
        // Γ(3)/Γ(2.5)
        assert!((d - 1.504_505_556_127_588_5).abs() < 1e-5, "{d}");
    }

    #[test]
    fn brute_shifted_quadratic() {
        // ∂^α (t - s)² = 2 (t - (2-α) s) t^{1-α} / Γ(3-α)
        for &a in &[0.3, 0.5, 0.8] {
            for &(s0, t) in &[(0.3, 1.0), (0.5, 0.7)] {
                let f = |u: f64| (u - s0) * (u - s0);
                let d = caputo_brute(&f, t, order(a), CAPUTO_BRUTE_PANELS).unwrap();
                let closed = 2.0 * (t - (2.0 - a) * s0) * t.powf(1.0 - a) / gamma(3.0 - a).unwrap();
                assert!((d - closed).abs() < 1e-7, "alpha {a}: {d} vs {closed}");
            }
        }
    }

    #[test]
    fn brute_mittag_leffler_eigenfunction() {
        // ∂^α E_α(λ t^α) = λ E_α(λ t^α)
        let a = order(0.6);
        let f = |s: f64| mittag_leffler(a, 0.5 * s.powf(0.6)).unwrap();
        let d = caputo_brute(&f, 0.8, a, CAPUTO_BRUTE_PANELS).unwrap();
        assert!((d - 0.5 * f(0.8)).abs() < 1e-7);
    }

    #[test]
    fn brute_classical_and_errors() {
        let d = caputo_brute(&|s: f64| s.sin(), 1.0, order(1.0), 16).unwrap();
        assert!((d - 1f64.cos()).abs() < 1e-10);
        assert!(caputo_brute(&|s: f64| s, 0.0, order(0.5), 16).is_err());
        assert!(caputo_brute(&|s: f64| s, 1.0, order(0.5), 1).is_err());
    }

    fn sine_grid(n: usize) -> GridFunction {
        InitialProfile::sine().sample(TorusGrid::new(1, n).unwrap()).unwrap()
    }

    #[test]
    fn barrier_zero_hamiltonian() {
        let u0 = sine_grid(64);
        let time = TimeGrid::new(1.0, 8).unwrap();
        let b = barrier_pair(&u0, order(0.5), &HamiltonianSpec::zero(), 2.0 * PI, &time).unwrap();
        assert_eq!(b.m, 0.0);
        assert_eq!(b.lower(0.7), u0);
        assert_eq!(b.upper(0.7), u0);
    }

    #[test]
    fn barrier_transport_constant() {
        let u0 = sine_grid(64);
        let time = TimeGrid::new(0.5, 8).unwrap();
        for &b in &[1.0, -1.0] {
            let h = HamiltonianSpec::transport(VelocityField::Constant(vec![b])).unwrap();
            for &a in &[0.3, 0.5, 0.9] {
                let pair = barrier_pair(&u0, order(a), &h, 2.0 * PI, &time).unwrap();
                let expected = 2.0 * PI / gamma_one_plus(order(a));
                assert!((pair.m - expected).abs() < 1e-12 * expected);
            }
        }
    }

    #[test]
    fn barrier_scales_with_hamiltonian() {
        let u0 = sine_grid(32);
        let time = TimeGrid::new(0.5, 4).unwrap();
        let h = HamiltonianSpec::eikonal(
            SpeedField::Sinusoidal {
                mean: 1.0,
                amplitude: 0.5,
            },
            0.2,
        )
        .unwrap();
        let m1 = barrier_constant(&u0, order(0.5), &h, 2.0 * PI, &time);
        let m3 = barrier_constant(&u0, order(0.5), &h.scaled(3.0), 2.0 * PI, &time);
        assert!((m3 - 3.0 * m1).abs() < 1e-12 * m3);
        assert!(barrier_pair(&u0, order(0.5), &h, 1.0, &time).is_err());
    }

    #[test]
    fn uniform_constant_examples() {
        let u0 = sine_grid(16);
        let time = TimeGrid::new(2.0, 4).unwrap();
        assert_eq!(
            uniform_bound_constant(&u0, order(0.5), &HamiltonianSpec::zero(), &time),
            0.0
        );
        let c = uniform_bound_constant(&u0, order(0.5), &HamiltonianSpec::constant(-1.0), &time);
        assert!((c - 1.0 / gamma_one_plus(order(0.5))).abs() < 1e-15);
    }

    #[test]
    fn oracle_problem_dispatch() {
        let a = order(0.5);
        let p = OracleProblem::RelaxationOde { c0: 2.0 };
        assert_eq!(p.eval(&sine, a, 0.0, 0.1).unwrap(), 2.0);
        let b = OracleProblem::PowerBarrier { m: 2.0 };
        assert!((b.eval(&sine, a, 0.25, 0.25).unwrap() - 2.0).abs() < 1e-15);
        assert!(OracleProblem::PowerBarrier { m: 0.0 }.validate().is_err());
        let t = OracleProblem::TransportConstSpeed { c: 1.0 };
        assert_eq!(t.eval(&sine, a, 0.0, 0.3).unwrap(), sine(0.3));
        let c = OracleProblem::Custom(Arc::new(|t, x| t + x));
        assert_eq!(c.eval(&sine, a, 1.0, 2.0).unwrap(), 3.0);
    }
}
