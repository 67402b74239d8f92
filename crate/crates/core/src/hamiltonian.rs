//! Hamiltonians `H(t, x, r, p)` with the structure constants the regularity
//! estimates consume, and the Lax-Friedrichs numerical Hamiltonian.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Spatial dimensions supported by the solver.
pub const MAX_DIM: usize = 2;

pub type HamiltonianFn = dyn Fn(f64, &[f64], f64, &[f64]) -> f64 + Send + Sync;
pub type VectorFieldFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;
pub type ScalarFieldFn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;

/// Velocity `b(t, x)` of a transport Hamiltonian `H = b·p`.
#[derive(Clone)]
pub enum VelocityField {
    Constant(Vec<f64>),
    /// `b_i(x) = mean_i + amplitude_i · sin(2π x_i)`.
    Sinusoidal {
        mean: Vec<f64>,
        amplitude: Vec<f64>,
    },
    /// Arbitrary field with declared `sup|b|` and Lipschitz constant in `x`.
    Custom {
        field: Arc<VectorFieldFn>,
        sup_norm: f64,
        lipschitz: f64,
    },
}

impl VelocityField {
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Constant(b) => out.copy_from_slice(&b[..out.len()]),
            Self::Sinusoidal { mean, amplitude } => {
                for i in 0..out.len() {
                    out[i] = mean[i] + amplitude[i] * (2.0 * PI * x[i]).sin();
                }
            }
            Self::Custom { field, .. } => field(t, x, out),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Self::Constant(b) => Some(b.len()),
            Self::Sinusoidal { mean, .. } => Some(mean.len()),
            Self::Custom { .. } => None,
        }
    }

    fn sup_norm(&self) -> f64 {
        match self {
            Self::Constant(b) => norm(b),
            Self::Sinusoidal { mean, amplitude } => {
                let s: Vec<f64> = mean.iter().zip(amplitude).map(|(m, a)| m.abs() + a.abs()).collect();
                norm(&s)
            }
            Self::Custom { sup_norm, .. } => *sup_norm,
        }
    }

    fn lipschitz(&self) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Sinusoidal { amplitude, .. } => 2.0 * PI * amplitude.iter().fold(0.0f64, |m, a| m.max(a.abs())),
            Self::Custom { lipschitz, .. } => *lipschitz,
        }
    }
}

/// Speed `c(t, x) ≥ 0` of an eikonal Hamiltonian.
#[derive(Clone)]
pub enum SpeedField {
    Constant(f64),
    /// `c(x) = mean + amplitude · sin(2π x_0)`.
    Sinusoidal {
        mean: f64,
        amplitude: f64,
    },
    Custom {
        field: Arc<ScalarFieldFn>,
        sup_norm: f64,
        lipschitz: f64,
    },
}

impl SpeedField {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Sinusoidal { mean, amplitude } => mean + amplitude * (2.0 * PI * x[0]).sin(),
            Self::Custom { field, .. } => field(t, x),
        }
    }

    fn sup_norm(&self) -> f64 {
        match self {
            Self::Constant(c) => c.abs(),
            Self::Sinusoidal { mean, amplitude } => mean.abs() + amplitude.abs(),
            Self::Custom { sup_norm, .. } => *sup_norm,
        }
    }

    fn lipschitz(&self) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Sinusoidal { amplitude, .. } => 2.0 * PI * amplitude.abs(),
            Self::Custom { lipschitz, .. } => *lipschitz,
        }
    }
}

/// Which closed-form family a [`HamiltonianSpec`] came from.
#[derive(Clone)]
pub enum BuiltinHamiltonian {
    /// `H = b(t, x)·p`.
    Transport(VelocityField),
    /// `H = c(t, x)|p| + λ r`.
    Eikonal {
        speed: SpeedField,
        lambda: f64,
    },
    /// `H ≡ value`; `value = 0` is the trivial equation, `value < 0` a source.
    Constant(f64),
    Custom,
}

impl BuiltinHamiltonian {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Transport(_) => "transport",
            Self::Eikonal { .. } => "eikonal",
            Self::Constant(_) => "constant",
            Self::Custom => "custom",
        }
    }
}

impl fmt::Debug for BuiltinHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A Hamiltonian with declared structure constants:
///
/// - `|H(t,x,r,p) - H(t,y,r,p)| ≤ lip_x (L₁) |x-y| + lip_xp (L₂) |x-y||p|`,
/// - `|∂H/∂p| ≤ lip_p` on the working range (zero only when `H` ignores `p`),
/// - `0 ≤ ∂H/∂r ≤ lip_r` when `monotone_in_r`.
#[derive(Clone)]
pub struct HamiltonianSpec {
    eval: Arc<HamiltonianFn>,
    pub kind: BuiltinHamiltonian,
    pub lip_x: f64,
    pub lip_xp: f64,
    pub lip_p: f64,
    pub lip_r: f64,
    pub monotone_in_r: bool,
    /// Constant added to `eval`, see [`HamiltonianSpec::shifted`].
    pub offset: f64,
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("kind", &self.kind)
            .field("lip_x", &self.lip_x)
            .field("lip_xp", &self.lip_xp)
            .field("lip_p", &self.lip_p)
            .field("lip_r", &self.lip_r)
            .field("monotone_in_r", &self.monotone_in_r)
            .field("offset", &self.offset)
            .finish()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl HamiltonianSpec {
    /// A user-supplied Hamiltonian. `lip_p` must be declared (it sets the
    /// artificial viscosity); the other constants feed the property checks.
    pub fn custom<F>(eval: F, lip_x: f64, lip_xp: f64, lip_p: f64, lip_r: f64, monotone_in_r: bool) -> Result<Self>
    where
        F: Fn(f64, &[f64], f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        for (name, v) in [("lip_x", lip_x), ("lip_xp", lip_xp), ("lip_r", lip_r)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(lip_p > 0.0) || !lip_p.is_finite() {
            return Err(Error::InvalidInput(format!(
                "lip_p must be finite and > 0, got {lip_p}"
            )));
        }
        Ok(Self {
            eval: Arc::new(eval),
            kind: BuiltinHamiltonian::Custom,
            lip_x,
            lip_xp,
            lip_p,
            lip_r,
            monotone_in_r,
            offset: 0.0,
        })
    }

    pub fn transport(velocity: VelocityField) -> Result<Self> {
        if let Some(d) = velocity.dim() {
            if d == 0 || d > MAX_DIM {
                return Err(Error::InvalidInput(format!("velocity has {d} components")));
            }
        }
        if let VelocityField::Sinusoidal { mean, amplitude } = &velocity {
            if mean.len() != amplitude.len() {
                return Err(Error::InvalidInput("velocity mean/amplitude length mismatch".into()));
            }
        }
        let field = velocity.clone();
        let eval = move |t: f64, x: &[f64], _r: f64, p: &[f64]| {
            let mut b = [0.0; MAX_DIM];
            let b = &mut b[..p.len()];
            field.eval(t, x, b);
            b.iter().zip(p).map(|(b, p)| b * p).sum()
        };
        Ok(Self {
            eval: Arc::new(eval),
            lip_x: 0.0,
            lip_xp: velocity.lipschitz(),
            lip_p: velocity.sup_norm(),
            lip_r: 0.0,
            monotone_in_r: true,
            kind: BuiltinHamiltonian::Transport(velocity),
            offset: 0.0,
        })
    }

    pub fn eikonal(speed: SpeedField, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidInput("eikonal lambda must be finite".into()));
        }
        let field = speed.clone();
        let eval = move |t: f64, x: &[f64], r: f64, p: &[f64]| field.eval(t, x) * norm(p) + lambda * r;
        Ok(Self {
            eval: Arc::new(eval),
            lip_x: 0.0,
            lip_xp: speed.lipschitz(),
            lip_p: speed.sup_norm(),
            lip_r: lambda.abs(),
            monotone_in_r: lambda >= 0.0,
            kind: BuiltinHamiltonian::Eikonal { speed, lambda },
            offset: 0.0,
        })
    }

    /// `H ≡ value`.
    pub fn constant(value: f64) -> Self {
        Self {
            eval: Arc::new(move |_, _, _, _| value),
            kind: BuiltinHamiltonian::Constant(value),
            lip_x: 0.0,
            lip_xp: 0.0,
            lip_p: 0.0,
            lip_r: 0.0,
            monotone_in_r: true,
            offset: 0.0,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `H + ε`, sharing every structure constant of `H`.
    pub fn shifted(&self, eps: f64) -> Self {
        let mut s = self.clone();
        s.offset += eps;
        s
    }

    /// `k·H` for `k > 0`; every bound scales by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let inner = self.eval.clone();
        let off = self.offset;
        let kind = match &self.kind {
            BuiltinHamiltonian::Constant(v) => BuiltinHamiltonian::Constant(k * (v + off)),
            _ => BuiltinHamiltonian::Custom,
        };
        Self {
            eval: Arc::new(move |t, x, r, p| k * (inner(t, x, r, p) + off)),
            kind,
            lip_x: k * self.lip_x,
            lip_xp: k * self.lip_xp,
            lip_p: k * self.lip_p,
            lip_r: k * self.lip_r,
            monotone_in_r: self.monotone_in_r,
            offset: 0.0,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64, x: &[f64], r: f64, p: &[f64]) -> f64 {
        (self.eval)(t, x, r, p) + self.offset
    }

    /// Number of gradient components the Hamiltonian expects, when fixed.
    pub fn declared_dim(&self) -> Option<usize> {
        match &self.kind {
            BuiltinHamiltonian::Transport(v) => v.dim(),
            _ => None,
        }
    }

    /// Whether `H` ignores `x` (needed for exact translation equivariance).
    pub fn is_x_independent(&self) -> bool {
        matches!(
            &self.kind,
            BuiltinHamiltonian::Transport(VelocityField::Constant(_))
                | BuiltinHamiltonian::Eikonal {
                    speed: SpeedField::Constant(_),
                    ..
                }
                | BuiltinHamiltonian::Constant(_)
        )
    }

    /// The constant `c` when `H` is the constant-speed 1-D transport `c·p`.
    pub fn constant_transport_speed(&self) -> Option<f64> {
        match &self.kind {
            BuiltinHamiltonian::Transport(VelocityField::Constant(b)) if b.len() == 1 && self.offset == 0.0 => {
                Some(b[0])
            }
            _ => None,
        }
    }

    /// The value when `H` is constant.
    pub fn constant_value(&self) -> Option<f64> {
        match &self.kind {
            BuiltinHamiltonian::Constant(v) => Some(v + self.offset),
            _ => None,
        }
    }
}

/// Lax-Friedrichs numerical Hamiltonian
/// `H(t, x, r, (p⁻+p⁺)/2) - (θ/2) Σᵢ (p⁺ᵢ - p⁻ᵢ)`.
///
/// Nondecreasing in the neighbouring values (decreasing in `p⁺`, increasing
/// in `p⁻`) whenever `θ ≥ |∂H/∂pᵢ|`.
#[inline]
pub fn lax_friedrichs(
    spec: &HamiltonianSpec,
    theta: f64,
    t: f64,
    x: &[f64],
    r: f64,
    p_minus: &[f64],
    p_plus: &[f64],
) -> f64 {
    let d = p_minus.len();
    let mut mid = [0.0; MAX_DIM];
    let mut jump = 0.0;
    for i in 0..d {
        mid[i] = 0.5 * (p_minus[i] + p_plus[i]);
        jump += p_plus[i] - p_minus[i];
    }
    spec.eval(t, x, r, &mid[..d]) - 0.5 * theta * jump
}

/// Sampling box for [`check_assumptions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleBox {
    pub dim: usize,
    pub t_max: f64,
    pub r_abs_max: f64,
    pub p_abs_max: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        Self {
            dim: 1,
            t_max: 1.0,
            r_abs_max: 10.0,
            p_abs_max: 10.0,
        }
    }
}

/// Worst-case margins from [`check_assumptions`]; a positive margin is a
/// violation of the corresponding declared bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub samples: usize,
    /// `max(|H(x) - H(y)| - L₁|x-y| - L₂|x-y||p|)`.
    pub x_lipschitz_margin: f64,
    /// `max(H(r₁) - H(r₂))` over `r₁ < r₂` (only meaningful if monotone is declared).
    pub r_monotonicity_margin: f64,
    /// `max(|H(p) - H(q)| - lip_p |p - q|)`.
    pub p_lipschitz_margin: f64,
    pub x_lipschitz_ok: bool,
    pub r_monotone_ok: bool,
    pub p_lipschitz_ok: bool,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.x_lipschitz_ok && self.r_monotone_ok && self.p_lipschitz_ok
    }
}

/// Monte-Carlo check of the declared structure constants of `spec`.
pub fn check_assumptions(spec: &HamiltonianSpec, sample_budget: usize, seed: u64, bx: &SampleBox) -> AssumptionReport {
    const SLACK: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = bx.dim.clamp(1, MAX_DIM);
    let mut x_margin = f64::NEG_INFINITY;
    let mut r_margin = f64::NEG_INFINITY;
    let mut p_margin = f64::NEG_INFINITY;
    let mut x = [0.0; MAX_DIM];
    let mut y = [0.0; MAX_DIM];
    let mut p = [0.0; MAX_DIM];
    let mut q = [0.0; MAX_DIM];
    for _ in 0..sample_budget {
        let t = rng.gen_range(0.0..=bx.t_max);
        let r = rng.gen_range(-bx.r_abs_max..=bx.r_abs_max);
        let mut dist2 = 0.0;
        let mut dp2 = 0.0;
        for i in 0..d {
            x[i] = rng.gen_range(0.0..1.0);
            // small displacements probe the local constants, large ones the global
            let scale: f64 = if rng.gen_bool(0.5) { 1e-3 } else { 0.5 };
            let dx = rng.gen_range(-scale..=scale);
            y[i] = x[i] + dx;
            dist2 += dx * dx;
            p[i] = rng.gen_range(-bx.p_abs_max..=bx.p_abs_max);
            q[i] = rng.gen_range(-bx.p_abs_max..=bx.p_abs_max);
            dp2 += (p[i] - q[i]) * (p[i] - q[i]);
        }
        let (x, y, p, q) = (&x[..d], &y[..d], &p[..d], &q[..d]);
        let dist = dist2.sqrt();
        let hx = spec.eval(t, x, r, p);
        let hy = spec.eval(t, y, r, p);
        let lhs = (hx - hy).abs();
        let rhs = spec.lip_x * dist + spec.lip_xp * dist * norm(p);
        x_margin = x_margin.max(lhs - rhs);

        let r2 = r + rng.gen_range(0.0..=bx.r_abs_max);
        r_margin = r_margin.max(hx - spec.eval(t, x, r2, p));

        let hq = spec.eval(t, x, r, q);
        p_margin = p_margin.max((hx - hq).abs() - spec.lip_p * dp2.sqrt());
    }
    AssumptionReport {
        samples: sample_budget,
        x_lipschitz_margin: x_margin,
        r_monotonicity_margin: r_margin,
        p_lipschitz_margin: p_margin,
        x_lipschitz_ok: x_margin <= SLACK,
        r_monotone_ok: !spec.monotone_in_r || r_margin <= 1e-12,
        p_lipschitz_ok: p_margin <= SLACK,
    }
}

/// Whether `r ↦ H` is nondecreasing on the samples, regardless of what the
/// spec declares.
pub fn sampled_r_monotone(report: &AssumptionReport) -> bool {
    report.r_monotonicity_margin <= 1e-12
}
