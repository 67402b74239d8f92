//! Special functions: Gamma, erfc, Mittag-Leffler `E_α`, the Wright function
//! `W_{-α,1-α}` (the M-Wright density), and the Caputo derivative of shifted
//! powers.
//!
//! Series are summed with compensated accumulation and stop once the term
//! envelope is past its peak and below [`SeriesTolerance::abs_tol`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fracops::FractionalOrder;
use crate::quad::{self, AdaptiveOptions, CompensatedSum};

/// Largest `|z|` accepted by [`mittag_leffler`].
pub const MITTAG_LEFFLER_Z_MAX: f64 = 20.0;

/// Largest `|z|` accepted by [`wright`]; the transport oracle truncates its
/// convolution here.
pub const WRIGHT_Z_MAX: f64 = 30.0;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const FACTORIALS: [f64; 21] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
];

/// Truncation control for the power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl SeriesTolerance {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidInput(format!(
                "series tolerance needs abs_tol > 0 and max_terms >= 1 (got {abs_tol}, {max_terms})"
            )));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            max_terms: 400,
        }
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `sin(πx)`, exactly zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r == r.round() {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        (PI * (-1.0 - r)).sin()
    } else {
        (PI * r).sin()
    }
}

// Lanczos sum for x >= 0.5, returned as (t, series) with t = x + g - 0.5.
fn lanczos_parts(x: f64) -> (f64, f64) {
    let xm1 = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (xm1 + i as f64);
    }
    (xm1 + LANCZOS_G + 0.5, a)
}

fn gamma_positive(x: f64) -> f64 {
    if x == x.round() && x <= 21.0 {
        return FACTORIALS[x as usize - 1];
    }
    let (t, a) = lanczos_parts(x);
    let e = x - 0.5;
    if e < 140.0 {
        (2.0 * PI).sqrt() * t.powf(e) * (-t).exp() * a
    } else {
        let half = t.powf(0.5 * e);
        (2.0 * PI).sqrt() * (half * (-t).exp()) * half * a
    }
}

/// Γ(x) for real `x`, with poles at the non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x >= 0.5 {
        Ok(gamma_positive(x))
    } else {
        Ok(PI / (sin_pi(x) * gamma_positive(1.0 - x)))
    }
}

/// `1/Γ(x)`, which is entire: zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        if x > 171.0 {
            return (-ln_gamma(x)).exp();
        }
        1.0 / gamma_positive(x)
    } else {
        let (ln_abs, sign) = ln_abs_rgamma(x);
        sign * ln_abs.exp()
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let (t, a) = lanczos_parts(x);
    0.5 * (2.0 * PI).ln() + (x - 0.5) * t.ln() - t + a.ln()
}

/// `(ln|1/Γ(x)|, sign(1/Γ(x)))`; at poles the log is `-∞` and the sign 0.
pub fn ln_abs_rgamma(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x > 0.0 {
        return (-ln_gamma(x), 1.0);
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
    let s = sin_pi(x);
    (s.abs().ln() + ln_gamma(1.0 - x) - PI.ln(), s.signum())
}

/// Complementary error function `(2/√π) ∫_z^∞ e^{-t²} dt`.
pub fn erfc(z: f64) -> f64 {
    libm::erfc(z)
}

/// Mittag-Leffler function `E_α(z) = Σ z^j / Γ(jα + 1)` with default tolerances.
pub fn mittag_leffler(alpha: FractionalOrder, z: f64) -> Result<f64> {
    mittag_leffler_with(alpha, z, &SeriesTolerance::default())
}

pub fn mittag_leffler_with(alpha: FractionalOrder, z: f64, tol: &SeriesTolerance) -> Result<f64> {
    if !z.is_finite() || z.abs() > MITTAG_LEFFLER_Z_MAX {
        return Err(Error::ArgumentOutOfRange {
            function: "mittag_leffler",
            value: z,
            limit: MITTAG_LEFFLER_Z_MAX,
        });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let a = alpha.value();
    let ln_z = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = CompensatedSum::new();
    let mut abs_sum = 0.0;
    let mut prev = f64::INFINITY;
    for j in 0..tol.max_terms {
        let jf = j as f64;
        let magnitude = if j == 0 {
            1.0
        } else {
            (jf * ln_z - ln_gamma(jf * a + 1.0)).exp()
        };
        let term = if negative && j % 2 == 1 { -magnitude } else { magnitude };
        sum.add(term);
        abs_sum += magnitude;
        let scale = sum.value().abs().max(1.0);
        if j > 0 && magnitude <= prev && magnitude < tol.abs_tol * scale {
            let value = sum.value();
            let rounding = 4.0 * f64::EPSILON * abs_sum;
            if rounding > 1e-8 * value.abs() {
                return Err(Error::PrecisionLoss {
                    function: "mittag_leffler",
                    estimate: rounding,
                });
            }
            return Ok(value);
        }
        prev = magnitude;
    }
    Err(Error::ConvergenceBudget {
        function: "mittag_leffler",
        terms: tol.max_terms,
        last_term: prev,
    })
}

/// Partial result of the Wright power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Sum of the absolute values of the terms; `abs_sum · ε` bounds the
    /// rounding error left after cancellation.
    pub abs_sum: f64,
    pub terms: usize,
}

fn wright_order(alpha: FractionalOrder, z: f64) -> Result<f64> {
    let a = alpha.value();
    if a >= 1.0 {
        return Err(Error::Domain(
            "the Wright density degenerates to a point mass at alpha = 1".into(),
        ));
    }
    if z > 0.0 || z.is_nan() {
        return Err(Error::Domain(format!("wright is evaluated on z <= 0, got {z}")));
    }
    if -z > WRIGHT_Z_MAX {
        return Err(Error::ArgumentOutOfRange {
            function: "wright",
            value: z,
            limit: WRIGHT_Z_MAX,
        });
    }
    Ok(a)
}

/// `W_{-α,1-α}(z) = Σ z^j / (j! Γ(1 - α - αj))` by direct summation.
pub fn wright_series(alpha: FractionalOrder, z: f64, tol: &SeriesTolerance) -> Result<SeriesValue> {
    let a = wright_order(alpha, z)?;
    let s = -z;
    if s == 0.0 {
        return Ok(SeriesValue {
            value: rgamma(1.0 - a),
            abs_sum: rgamma(1.0 - a).abs(),
            terms: 1,
        });
    }
    let ln_s = s.ln();
    let mut sum = CompensatedSum::new();
    let mut abs_sum = 0.0;
    let mut prev_envelope = f64::INFINITY;
    for j in 0..tol.max_terms {
        let jf = j as f64;
        let x = 1.0 - a - a * jf;
        let (ln_rg, sign) = ln_abs_rgamma(x);
        let base = jf * ln_s - ln_gamma(jf + 1.0);
        // envelope drops the oscillating sin(πx) factor of the reflection formula
        let envelope = if x > 0.0 {
            base + ln_rg
        } else {
            base + ln_gamma(1.0 - x) - PI.ln()
        };
        if sign != 0.0 {
            let magnitude = (base + ln_rg).exp();
            let parity = if j % 2 == 1 { -1.0 } else { 1.0 };
            sum.add(parity * sign * magnitude);
            abs_sum += magnitude;
        }
        if j > 0 && envelope <= prev_envelope && envelope.exp() < tol.abs_tol {
            return Ok(SeriesValue {
                value: sum.value(),
                abs_sum,
                terms: j + 1,
            });
        }
        prev_envelope = envelope;
    }
    Err(Error::ConvergenceBudget {
        function: "wright",
        terms: tol.max_terms,
        last_term: prev_envelope.exp(),
    })
}

/// `ln A(φ)` for the Zolotarev kernel
/// `A(φ) = [sin^α(αφ) sin^{1-α}((1-α)φ) / sin φ]^{1/(1-α)}`.
fn zolotarev_ln_kernel(a: f64, phi: f64) -> f64 {
    let b = 1.0 - a;
    (a * (a * phi).sin().ln() + b * (b * phi).sin().ln() - phi.sin().ln()) / b
}

/// `W_{-α,1-α}(-s)` for `s > 0` from the integral representation
/// `1/((1-α)π) · s^{α/(1-α)} ∫_0^π A(φ) exp(-s^{1/(1-α)} A(φ)) dφ`.
///
/// The integrand is nonnegative, so this route has no cancellation.
pub fn wright_integral(alpha: FractionalOrder, z: f64) -> Result<f64> {
    let a = wright_order(alpha, z)?;
    let s = -z;
    if s == 0.0 {
        return Ok(rgamma(1.0 - a));
    }
    let b = 1.0 - a;
    let ln_s = s.ln();
    let integrand = |phi: f64| {
        let ln_k = zolotarev_ln_kernel(a, phi);
        let inner = (ln_s / b + ln_k).exp();
        (a / b * ln_s + ln_k - inner).exp()
    };
    let opts = AdaptiveOptions {
        abs_tol: 1e-16,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let r = quad::integrate(integrand, &[0.0, 0.5 * PI, 0.75 * PI, PI], &opts);
    if !r.converged && r.abs_error > 1e-12 * r.value.abs().max(1e-300) {
        return Err(Error::QuadratureFailed {
            estimate: r.abs_error,
            tolerance: opts.rel_tol * r.value.abs(),
        });
    }
    Ok(r.value / (b * PI))
}

/// The Wright function `W_{-α,1-α}(z)` on `z ≤ 0`, `0 < α < 1`.
///
/// Uses the power series while its cancellation costs less than about 13
/// significant digits and switches to the integral representation otherwise.
pub fn wright(alpha: FractionalOrder, z: f64) -> Result<f64> {
    wright_order(alpha, z)?;
    match wright_series(alpha, z, &SeriesTolerance::default()) {
        Ok(sv) if sv.abs_sum * f64::EPSILON <= 1e-13 * sv.value.abs() => Ok(sv.value),
        _ => wright_integral(alpha, z),
    }
}

/// Settings for moments of the Wright density over `[0, z_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightQuadrature {
    pub z_max: f64,
    pub abs_tol: f64,
    /// Largest admissible bound on the truncated tail `∫_{z_max}^∞`.
    pub tail_tol: f64,
}

impl Default for WrightQuadrature {
    fn default() -> Self {
        Self {
            z_max: WRIGHT_Z_MAX,
            abs_tol: 1e-11,
            tail_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub quadrature_error: f64,
    pub tail_bound: f64,
}

/// `ln(m! / Γ(mα + 1))`, the log of the m-th moment of the Wright density.
fn ln_wright_moment(a: f64, m: u32) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(m as f64 * a + 1.0)
}

/// Upper bound for `∫_{z_max}^∞ z^k W(-z) dz` from positivity and the higher
/// moments: `≤ z_max^{k-m} · m!/Γ(mα+1)` for every `m > k`.
pub fn wright_tail_bound(alpha: FractionalOrder, k: u32, z_max: f64) -> f64 {
    let a = alpha.value();
    let ln_z = z_max.ln();
    (k + 1..k + 400)
        .map(|m| (k as f64 - m as f64) * ln_z + ln_wright_moment(a, m))
        .fold(f64::INFINITY, f64::min)
        .exp()
}

/// `∫_0^∞ z^k W_{-α,1-α}(-z) dz`, quadrature on `[0, z_max]` plus tail bound.
pub fn wright_moment(alpha: FractionalOrder, k: u32, q: &WrightQuadrature) -> Result<MomentEstimate> {
    if alpha.value() >= 1.0 {
        return Err(Error::Domain("Wright moments need alpha < 1".into()));
    }
    let tail_bound = wright_tail_bound(alpha, k, q.z_max);
    if tail_bound > q.tail_tol {
        return Err(Error::TailNotNegligible {
            bound: tail_bound,
            tolerance: q.tail_tol,
        });
    }
    let mut failure = None;
    let integrand = |z: f64| match wright(alpha, -z) {
        Ok(w) => w * z.powi(k as i32),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let points = breakpoints(q.z_max);
    let opts = AdaptiveOptions {
        abs_tol: q.abs_tol,
        rel_tol: 1e-13,
        max_intervals: 2000,
    };
    let r = quad::integrate(integrand, &points, &opts);
    if let Some(e) = failure {
        return Err(e);
    }
    if !r.converged {
        return Err(Error::QuadratureFailed {
            estimate: r.abs_error,
            tolerance: q.abs_tol,
        });
    }
    Ok(MomentEstimate {
        value: r.value,
        quadrature_error: r.abs_error,
        tail_bound,
    })
}

pub(crate) fn breakpoints(z_max: f64) -> Vec<f64> {
    let mut p = vec![0.0, 0.5, 1.0, 1.5, 2.0];
    let mut z = 4.0;
    while z < z_max {
        p.push(z);
        z *= 2.0;
    }
    p.push(z_max);
    p
}

/// `∫_0^∞ W_{-α,1-α}(-z) dz`, which equals one.
pub fn wright_normalization(alpha: FractionalOrder, q: &WrightQuadrature) -> Result<MomentEstimate> {
    wright_moment(alpha, 0, q)
}

/// `∫_0^∞ z W_{-α,1-α}(-z) dz`, which equals `1/Γ(α+1)`.
pub fn wright_first_moment(alpha: FractionalOrder, q: &WrightQuadrature) -> Result<MomentEstimate> {
    wright_moment(alpha, 1, q)
}

/// Caputo derivative of `t ↦ (t - a)^β` with lower terminal `a`:
/// `Γ(β+1)/Γ(β-α+1) · (t-a)^{β-α}`.
///
/// Valid for every `β > 0`; the fractional barrier arguments use `β ∈ (0, 1]`.
pub fn power_caputo(a: f64, beta: f64, alpha: FractionalOrder, t: f64) -> Result<f64> {
    if !(t > a) {
        return Err(Error::Domain(format!("power_caputo needs t > a (t = {t}, a = {a})")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("power_caputo needs beta > 0, got {beta}")));
    }
    let al = alpha.value();
    let coef = gamma(beta + 1.0)? * rgamma(beta - al + 1.0);
    Ok(coef * (t - a).powf(beta - al))
}
