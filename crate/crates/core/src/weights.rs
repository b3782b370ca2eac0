//! Analytic weight functions and their Fourier transforms.
//!
//! The transform convention is `f̂(x) = ∫ f(y) e(−x·y) dy` with
//! `e(t) = exp(2πit)` and no extra normalization. Every weight carries a
//! radial majorant and a certified bound on its mass outside a disk, so that
//! lattice sums and quadratures can be truncated with an explicit error.
//!
//! [`numeric_fourier`] is the quadrature oracle against which every closed
//! form here is checked.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::{Arc, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use thiserror::Error;

use crate::gaussint::GaussInt;
use crate::sum::{e, Compensated, CompensatedComplex};

/// `κ = 2^{k−1}`.
pub fn kappa(k: u32) -> u32 {
    assert!(k >= 1, "k must be positive");
    1 << (k - 1)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight has no closed-form Fourier transform")]
    NoClosedForm,
    #[error("expected a point of dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("need {expected} differencing shifts for k = {k}, got {got}")]
    ShiftCount { k: u32, expected: usize, got: usize },
    #[error("quadrature did not converge: last estimate {estimate}, change {change:e}")]
    NoConvergence { estimate: Complex64, change: f64 },
    #[error("tail bound stays above {tol:e} out to radius {radius}")]
    TailTooHeavy { tol: f64, radius: f64 },
}

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type TransformFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A user-supplied weight. Used by tests and for experiments outside the
/// built-in family; the radial majorant must be non-increasing.
#[derive(Clone)]
pub struct CustomWeight {
    pub dim: usize,
    pub eval: PointFn,
    pub radial_majorant: RadialFn,
    pub tail_bound: RadialFn,
    pub transform: Option<TransformFn>,
    pub transform_radial_majorant: Option<RadialFn>,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight")
            .field("dim", &self.dim)
            .field("has_transform", &self.transform.is_some())
            .finish()
    }
}

/// The weight functions the sieve arguments use.
#[derive(Debug, Clone)]
pub enum WeightFn {
    /// `φ(x) = ∏ (sin(πx_k) / 2x_k)²`.
    Fejer { dim: usize },
    /// `Ψ1(z) = exp(−π N(z))`, self-dual.
    Psi1,
    /// `Ψ2(z) = exp(−(π/κ) N(z)^{1/k})`.
    Psi2 { k: u32 },
    /// `g(z) = Ψ2(z²) Ψ2((z + α/√Q0)²)` with the `k = 2` normalization.
    GSquare { alpha: GaussInt, q0: f64 },
    /// `g(z) = ∏_{u ∈ {0,1}^{k−1}} Ψ2((z + u·α/√Q0)^k)`.
    GPower {
        alphas: Vec<GaussInt>,
        k: u32,
        q0: f64,
    },
    Custom(CustomWeight),
}

fn sinc2_half(x: f64) -> f64 {
    // (sin(πx) / 2x)², continuous at 0
    if x.abs() < 1e-8 {
        PI * PI / 4.0
    } else {
        let s = (PI * x).sin();
        s * s / (4.0 * x * x)
    }
}

/// The Fejér-type product `φ(x) = ∏_k (sin(πx_k) / 2x_k)²`.
pub fn fejer(x: &[f64]) -> f64 {
    x.iter().map(|&t| sinc2_half(t)).product()
}

/// `φ̂(s) = (π²/4)^d ∏_k max(1 − |s_k|, 0)`.
pub fn fejer_hat(s: &[f64]) -> f64 {
    s.iter()
        .map(|&t| PI * PI / 4.0 * (1.0 - t.abs()).max(0.0))
        .product()
}

pub fn psi1(z: Complex64) -> f64 {
    (-PI * z.norm_sqr()).exp()
}

/// The transform of `Ψ1`, which is `Ψ1` itself.
pub fn psi1_hat(z: Complex64) -> f64 {
    psi1(z)
}

/// `Ψ2(z) = exp(−(π/κ)·N(z)^{1/k})`.
pub fn psi2(k: u32, z: Complex64) -> f64 {
    let kap = kappa(k) as f64;
    (-(PI / kap) * z.norm_sqr().powf(1.0 / k as f64)).exp()
}

/// `Ψ2(q^k / Q0^{k/2})` through the exact power `q^k` and its norm.
pub fn psi2_of_power(k: u32, q: GaussInt, q0: f64) -> f64 {
    let kap = kappa(k) as f64;
    let n = q.pow(k).norm_u128() as f64;
    (-(PI / kap) * (n / q0.powi(k as i32)).powf(1.0 / k as f64)).exp()
}

/// `Ψ2(q^k / Q0^{k/2})` in its Gaussian form `exp(−(π/κ)·N(q)/Q0)`.
pub fn psi2_gaussian_form(k: u32, q: GaussInt, q0: f64) -> f64 {
    let kap = kappa(k) as f64;
    (-(PI / kap) * q.norm() as f64 / q0).exp()
}

/// `w^k` by binomial expansion of `(re + i·im)^k`.
pub fn complex_pow_binomial(w: Complex64, k: u32) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut binom = 1.0f64;
    for m in 0..=k {
        // i^m
        let unit = match m % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        acc += unit * (binom * w.re.powi((k - m) as i32) * w.im.powi(m as i32));
        binom = binom * (k - m) as f64 / (m + 1) as f64;
    }
    acc
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm2(a: [f64; 2]) -> f64 {
    dot2(a, a).sqrt()
}

/// Shift sums `u·α` over `u ∈ {0,1}^{len}`, in binary counting order.
fn subset_sums(alphas: &[GaussInt]) -> Vec<GaussInt> {
    (0..1usize << alphas.len())
        .map(|mask| {
            alphas
                .iter()
                .enumerate()
                .filter(|(v, _)| mask >> v & 1 == 1)
                .fold(GaussInt::ZERO, |acc, (_, &a)| acc + a)
        })
        .collect()
}

/// Parameters of the completed-square form
/// `g(z) = P · exp(−π |z − center|²)` of a differenced product weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletedSquare {
    pub prefactor: f64,
    pub center: [f64; 2],
}

impl CompletedSquare {
    pub fn of(alphas: &[GaussInt], q0: f64) -> Self {
        let sq = q0.sqrt();
        let total = alphas.iter().fold(GaussInt::ZERO, |acc, &a| acc + a);
        let energy: f64 = alphas.iter().map(|a| a.norm() as f64).sum();
        CompletedSquare {
            prefactor: (-PI * energy / (4.0 * q0)).exp(),
            center: [-(total.re as f64) / (2.0 * sq), -(total.im as f64) / (2.0 * sq)],
        }
    }

    pub fn eval(&self, z: [f64; 2]) -> f64 {
        let d = [z[0] - self.center[0], z[1] - self.center[1]];
        self.prefactor * (-PI * dot2(d, d)).exp()
    }

    /// `ĝ(ξ) = P · e(−ξ·center) · exp(−π|ξ|²)`.
    pub fn transform(&self, xi: [f64; 2]) -> Complex64 {
        e(-dot2(xi, self.center)) * (self.prefactor * (-PI * dot2(xi, xi)).exp())
    }

    /// `|ĝ(ξ)| ≤ P · exp(−π|ξ|²)`.
    pub fn transform_bound(&self, xi: [f64; 2]) -> f64 {
        self.prefactor * (-PI * dot2(xi, xi)).exp()
    }

    fn radial_majorant(&self, r: f64) -> f64 {
        let d = (r - norm2(self.center)).max(0.0);
        self.prefactor * (-PI * d * d).exp()
    }
}

/// The differenced weight for square moduli.
pub fn g_square(alpha: GaussInt, q0: f64) -> WeightFn {
    assert!(q0 > 0.0, "Q0 must be positive");
    WeightFn::GSquare { alpha, q0 }
}

/// Closed-form transform of [`g_square`].
pub fn g_square_hat(alpha: GaussInt, q0: f64, xi: [f64; 2]) -> Complex64 {
    CompletedSquare::of(&[alpha], q0).transform(xi)
}

/// The differenced weight for `k`-th power moduli; `alphas` has `k − 1` entries.
pub fn g_power(alphas: Vec<GaussInt>, k: u32, q0: f64) -> Result<WeightFn, WeightError> {
    assert!(q0 > 0.0, "Q0 must be positive");
    if k < 2 || alphas.len() != (k - 1) as usize {
        return Err(WeightError::ShiftCount {
            k,
            expected: k.saturating_sub(1) as usize,
            got: alphas.len(),
        });
    }
    Ok(WeightFn::GPower { alphas, k, q0 })
}

fn gaussian_tail(prefactor: f64, offset: f64, r: f64) -> f64 {
    // mass of P·exp(−π|y − c|²) outside the disk |y| ≤ r, with |c| = offset
    let d = (r - offset).max(0.0);
    prefactor * (-PI * d * d).exp()
}

/// `∫_t^∞ s^{k−1} e^{−s} ds` for integer `k ≥ 1`.
fn upper_gamma_int(k: u32, t: f64) -> f64 {
    let mut term = 1.0;
    let mut series = 1.0;
    for m in 1..k {
        term *= t / m as f64;
        series += term;
    }
    let fact: f64 = (1..k).map(|m| m as f64).product();
    fact * (-t).exp() * series
}

impl WeightFn {
    pub fn dim(&self) -> usize {
        match self {
            WeightFn::Fejer { dim } => *dim,
            WeightFn::Custom(c) => c.dim,
            _ => 2,
        }
    }

    fn completed_square(&self) -> Option<CompletedSquare> {
        match self {
            WeightFn::GSquare { alpha, q0 } => Some(CompletedSquare::of(&[*alpha], *q0)),
            WeightFn::GPower { alphas, q0, .. } => Some(CompletedSquare::of(alphas, *q0)),
            WeightFn::Psi1 => Some(CompletedSquare {
                prefactor: 1.0,
                center: [0.0, 0.0],
            }),
            _ => None,
        }
    }

    /// Point evaluation, from the defining product (not the completed square).
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            WeightFn::Fejer { .. } => fejer(x),
            WeightFn::Psi1 => psi1(Complex64::new(x[0], x[1])),
            WeightFn::Psi2 { k } => psi2(*k, Complex64::new(x[0], x[1])),
            WeightFn::GSquare { alpha, q0 } => {
                let z = Complex64::new(x[0], x[1]);
                let shift = alpha.to_complex() / q0.sqrt();
                psi2(2, complex_pow_binomial(z, 2)) * psi2(2, complex_pow_binomial(z + shift, 2))
            }
            WeightFn::GPower { alphas, k, q0 } => {
                let z = Complex64::new(x[0], x[1]);
                let sq = q0.sqrt();
                subset_sums(alphas)
                    .into_iter()
                    .map(|s| psi2(*k, complex_pow_binomial(z + s.to_complex() / sq, *k)))
                    .product()
            }
            WeightFn::Custom(c) => (c.eval)(x),
        }
    }

    /// Evaluation through the completed-square Gaussian form, where one exists.
    pub fn eval_completed_square(&self, x: [f64; 2]) -> Option<f64> {
        self.completed_square().map(|c| c.eval(x))
    }

    /// Closed-form transform, if the weight has one.
    pub fn transform(&self, s: &[f64]) -> Result<Complex64, WeightError> {
        if s.len() != self.dim() {
            return Err(WeightError::Dimension {
                expected: self.dim(),
                got: s.len(),
            });
        }
        match self {
            WeightFn::Fejer { .. } => Ok(Complex64::new(fejer_hat(s), 0.0)),
            WeightFn::Psi2 { .. } => Err(WeightError::NoClosedForm),
            WeightFn::Custom(c) => c
                .transform
                .as_ref()
                .map(|t| t(s))
                .ok_or(WeightError::NoClosedForm),
            _ => Ok(self
                .completed_square()
                .expect("Gaussian-type weight")
                .transform([s[0], s[1]])),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        match self {
            WeightFn::Psi2 { .. } => false,
            WeightFn::Custom(c) => c.transform.is_some(),
            _ => true,
        }
    }

    /// `h(r)` with `|f(y)| ≤ h(r)` whenever `|y| ≥ r`; non-increasing in `r`.
    pub fn radial_majorant(&self, r: f64) -> f64 {
        match self {
            WeightFn::Fejer { dim } => {
                let d = *dim as f64;
                let peak = PI * PI / 4.0;
                let edge = if r > 0.0 { d / (4.0 * r * r) } else { f64::INFINITY };
                peak.powi(*dim as i32 - 1) * peak.min(edge)
            }
            WeightFn::Psi2 { k } => {
                (-(PI / kappa(*k) as f64) * r.max(0.0).powf(2.0 / *k as f64)).exp()
            }
            WeightFn::Custom(c) => (c.radial_majorant)(r),
            _ => self.completed_square().unwrap().radial_majorant(r),
        }
    }

    /// `ĥ(r)` with `|f̂(x)| ≤ ĥ(r)` whenever `|x| ≥ r`.
    pub fn transform_radial_majorant(&self, r: f64) -> Result<f64, WeightError> {
        match self {
            WeightFn::Fejer { dim } => {
                let peak = (PI * PI / 4.0).powi(*dim as i32);
                Ok(if r <= (*dim as f64).sqrt() { peak } else { 0.0 })
            }
            WeightFn::Psi2 { .. } => Err(WeightError::NoClosedForm),
            WeightFn::Custom(c) => c
                .transform_radial_majorant
                .as_ref()
                .map(|h| h(r))
                .ok_or(WeightError::NoClosedForm),
            _ => {
                let c = self.completed_square().unwrap();
                Ok(c.prefactor * (-PI * r * r).exp())
            }
        }
    }

    /// Certified upper bound on `∫_{|y| > r} |f(y)| dy`.
    pub fn tail_bound(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        match self {
            WeightFn::Fejer { dim } => {
                let d = *dim as f64;
                let peak = PI * PI / 4.0;
                let t = r / d.sqrt();
                let one_dim = if t > 0.0 { peak.min(1.0 / (2.0 * t)) } else { peak };
                (d * peak.powi(*dim as i32 - 1) * one_dim).min(peak.powi(*dim as i32))
            }
            WeightFn::Psi2 { k } => {
                let kap = kappa(*k) as f64;
                let t0 = (PI / kap) * r.powf(2.0 / *k as f64);
                PI * *k as f64 * (kap / PI).powi(*k as i32) * upper_gamma_int(*k, t0)
            }
            WeightFn::Custom(c) => (c.tail_bound)(r),
            _ => {
                let c = self.completed_square().unwrap();
                gaussian_tail(c.prefactor, norm2(c.center), r)
            }
        }
    }
}

fn gl_rule(n: usize) -> &'static [(f64, f64)] {
    static RULE16: OnceLock<GaussLegendre> = OnceLock::new();
    static RULE20: OnceLock<GaussLegendre> = OnceLock::new();
    let cell = match n {
        16 => &RULE16,
        20 => &RULE20,
        _ => panic!("unsupported Gauss-Legendre order {n}"),
    };
    cell.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(n).unwrap()))
        .as_node_weight_pairs()
}

/// `π/2 − Si(y)` for `y ≥ 0`.
fn sine_integral_complement(y: f64) -> f64 {
    if y <= 2.0 {
        let mut term = y;
        let mut sum = Compensated::default();
        let mut k = 0u32;
        loop {
            let contrib = term / (2 * k + 1) as f64;
            sum.add(contrib);
            if contrib.abs() < 1e-18 {
                break;
            }
            term *= -y * y / ((2 * k + 2) * (2 * k + 3)) as f64;
            k += 1;
        }
        FRAC_PI_2 - sum.value()
    } else {
        // continued fraction for E1(iy); π/2 − Si(y) = −Im E1(iy)
        let mut b = Complex64::new(1.0, y);
        let mut c = Complex64::new(1e300, 0.0);
        let mut d = b.inv();
        let mut h = d;
        for i in 1..10_000 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = (d * a + b).inv();
            c = b + c.inv() * a;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        let h = Complex64::new(y.cos(), -y.sin()) * h;
        -h.im
    }
}

/// `∫_L^∞ cos(2π|ω|x) / x² dx`.
fn cosine_tail(omega: f64, l: f64) -> f64 {
    let a = 2.0 * PI * omega.abs();
    if a == 0.0 {
        return 1.0 / l;
    }
    let y = a * l;
    y.cos() / l - a * sine_integral_complement(y)
}

/// One-dimensional transform of `(sin(πx)/2x)²` at `s`: quadrature on
/// `[−L, L]` plus the exact tail beyond `L`.
fn fejer_transform_1d(s: f64, tol: f64) -> Result<f64, WeightError> {
    const L: f64 = 64.0;
    let body = |width: f64| -> f64 {
        let panels = (L / width) as usize;
        let mut acc = Compensated::default();
        for p in 0..panels {
            let (a, b) = (p as f64 * width, (p + 1) as f64 * width);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for &(x, w) in gl_rule(20) {
                let t = mid + half * x;
                acc.add(w * half * sinc2_half(t) * (2.0 * PI * s * t).cos());
            }
        }
        acc.value()
    };
    let coarse = body(1.0);
    let fine = body(0.5);
    let change = 2.0 * (fine - coarse).abs();
    if change > tol / 4.0 {
        return Err(WeightError::NoConvergence {
            estimate: Complex64::new(2.0 * fine, 0.0),
            change,
        });
    }
    let tail = 0.25 * (0.5 * cosine_tail(s, L) - 0.25 * cosine_tail(1.0 + s, L) - 0.25 * cosine_tail(1.0 - s, L));
    Ok(2.0 * (fine + tail))
}

fn panel_integral(f: &dyn Fn(f64, f64) -> Complex64, half_width: f64, panels: usize) -> Complex64 {
    let h = 2.0 * half_width / panels as f64;
    let rule = gl_rule(16);
    let mut acc = CompensatedComplex::default();
    for px in 0..panels {
        let cx = -half_width + (px as f64 + 0.5) * h;
        for py in 0..panels {
            let cy = -half_width + (py as f64 + 0.5) * h;
            for &(x, wx) in rule {
                for &(y, wy) in rule {
                    let w = wx * wy * 0.25 * h * h;
                    acc.add(f(cx + 0.5 * h * x, cy + 0.5 * h * y) * w);
                }
            }
        }
    }
    acc.value()
}

/// Smallest radius on a half-unit grid whose certified tail is at most `target`.
pub fn truncation_radius(weight: &WeightFn, target: f64) -> Result<f64, WeightError> {
    let mut r = 0.5;
    while weight.tail_bound(r) > target {
        r += 0.5;
        if r > 2000.0 {
            return Err(WeightError::TailTooHeavy { tol: target, radius: r });
        }
    }
    Ok(r)
}

/// Quadrature of `∫ f(y) e(−x·y) dy` with total error below `tol`.
///
/// The Fejér product is separable and integrated coordinatewise with an exact
/// oscillatory tail; every other weight is integrated on a square that holds
/// all but `tol/4` of its mass, refining panels until two successive passes
/// agree to `tol/4`.
pub fn numeric_fourier(weight: &WeightFn, point: &[f64], tol: f64) -> Result<Complex64, WeightError> {
    if point.len() != weight.dim() {
        return Err(WeightError::Dimension {
            expected: weight.dim(),
            got: point.len(),
        });
    }
    if let WeightFn::Fejer { dim } = weight {
        let per_coord = tol / (*dim as f64 * (PI * PI / 4.0).powi(*dim as i32));
        let mut acc = 1.0;
        for &s in point {
            acc *= fejer_transform_1d(s, per_coord)?;
        }
        return Ok(Complex64::new(acc, 0.0));
    }
    if weight.dim() != 2 {
        return Err(WeightError::Dimension {
            expected: 2,
            got: weight.dim(),
        });
    }
    let radius = truncation_radius(weight, tol / 4.0)?;
    let x = [point[0], point[1]];
    let integrand = |y0: f64, y1: f64| e(-(x[0] * y0 + x[1] * y1)) * weight.eval(&[y0, y1]);
    let mut panels = 4usize;
    let mut prev = panel_integral(&integrand, radius, panels);
    loop {
        panels *= 2;
        let next = panel_integral(&integrand, radius, panels);
        let change = (next - prev).norm();
        if change <= tol / 4.0 {
            return Ok(next);
        }
        if panels >= 256 {
            return Err(WeightError::NoConvergence {
                estimate: next,
                change,
            });
        }
        prev = next;
    }
}

/// Quadrature estimate of `∫_{r < |y| < r_far} f(y) dy` for a planar weight,
/// in polar coordinates. A lower estimate of the true outside mass.
pub fn mass_between_numeric(weight: &WeightFn, r: f64, r_far: f64) -> f64 {
    assert_eq!(weight.dim(), 2);
    let rule = gl_rule(20);
    // fine panels near the inner edge, coarse ones further out
    let mut edges = vec![r];
    while *edges.last().unwrap() < r_far {
        let last = *edges.last().unwrap();
        let width = if last < r + 8.0 { 0.25 } else { 2.0 };
        edges.push((last + width).min(r_far));
    }
    let angular_panels = 64usize;
    let ht = 2.0 * PI / angular_panels as f64;
    let mut acc = Compensated::default();
    for pair in edges.windows(2) {
        let hr = pair[1] - pair[0];
        let cr = 0.5 * (pair[0] + pair[1]);
        for pt in 0..angular_panels {
            let ct = (pt as f64 + 0.5) * ht;
            for &(a, wa) in rule {
                let rho = cr + 0.5 * hr * a;
                for &(b, wb) in rule {
                    let th = ct + 0.5 * ht * b;
                    let w = wa * wb * 0.25 * hr * ht * rho;
                    acc.add(w * weight.eval(&[rho * th.cos(), rho * th.sin()]));
                }
            }
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn fejer_examples() {
        let peak = PI * PI / 4.0;
        assert!(close(fejer(&[0.0, 0.0]), peak * peak, 1e-12));
        assert!(close(fejer(&[0.5]), 1.0, 1e-15));
        assert!(close(fejer(&[1.0]), 0.0, 1e-30));
    }

    #[test]
    fn fejer_hat_examples() {
        let peak = PI * PI / 4.0;
        assert!(close(fejer_hat(&[0.0, 0.0]), peak * peak, 1e-12));
        assert_eq!(fejer_hat(&[2.0]), 0.0);
        assert!(close(fejer_hat(&[0.5]), peak * 0.5, 1e-15));
    }

    #[test]
    fn fejer_at_least_one_on_half_box() {
        for d in 1..=2usize {
            let steps = 20;
            let grid: Vec<f64> = (0..=steps).map(|i| -0.5 + i as f64 / steps as f64).collect();
            if d == 1 {
                assert!(grid.iter().all(|&x| fejer(&[x]) >= 1.0 - 1e-15));
            } else {
                for &x in &grid {
                    for &y in &grid {
                        assert!(fejer(&[x, y]) >= 1.0 - 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn psi1_examples() {
        assert_eq!(psi1(Complex64::new(0.0, 0.0)), 1.0);
        assert!(close(psi1(Complex64::new(1.0, 0.0)), (-PI).exp(), 1e-16));
        let z = [0.7, 0.2];
        let q = numeric_fourier(&WeightFn::Psi1, &z, 1e-10).unwrap();
        assert!((q - psi1_hat(Complex64::new(z[0], z[1]))).norm() < 1e-8);
    }

    #[test]
    fn psi2_examples() {
        assert_eq!(psi2(2, Complex64::new(0.0, 0.0)), 1.0);
        // N(q) = Q0: N(q²/Q0) = 1, so Ψ2 = exp(−π/2).
        let q = GaussInt::new(2, 1);
        let v = psi2_of_power(2, q, 5.0);
        assert!(close(v, (-FRAC_PI_2).exp(), 1e-15));
        assert!(close(v, psi2_gaussian_form(2, q, 5.0), 1e-15));
        // k = 3, κ = 4
        let q = GaussInt::new(3, -2);
        let expect = (-(PI / 4.0) * 13.0 / 7.0).exp();
        assert!(close(psi2_of_power(3, q, 7.0), expect, 1e-15));
    }

    #[test]
    fn binomial_power_matches_repeated_product() {
        let w = Complex64::new(0.3, -1.7);
        for k in 1..=6 {
            let mut direct = Complex64::new(1.0, 0.0);
            for _ in 0..k {
                direct *= w;
            }
            assert!((complex_pow_binomial(w, k) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn g_square_collapses_at_zero_shift() {
        let g = g_square(GaussInt::ZERO, 3.0);
        for z in [[0.0, 0.0], [0.4, -0.3], [1.2, 0.9]] {
            let expect = (-PI * (z[0] * z[0] + z[1] * z[1])).exp();
            assert!(close(g.eval(&z), expect, 1e-15));
            assert!((g.transform(&z).unwrap() - Complex64::new(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn g_square_hat_modulus() {
        let g = g_square(GaussInt::new(2, 0), 4.0);
        for z in [[0.1, 0.2], [-0.7, 0.4]] {
            let expect = (-PI / 4.0).exp() * (-PI * (z[0] * z[0] + z[1] * z[1])).exp();
            assert!(close(g.transform(&z).unwrap().norm(), expect, 1e-15));
        }
    }

    #[test]
    fn g_square_definition_matches_completed_square() {
        let g = g_square(GaussInt::new(1, -2), 3.0);
        for z in [[0.0, 0.0], [0.3, 0.1], [-1.0, 0.8]] {
            assert!(close(g.eval(&z), g.eval_completed_square(z).unwrap(), 1e-14));
        }
    }

    #[test]
    fn g_square_hat_matches_quadrature() {
        let g = g_square(GaussInt::new(1, 1), 2.0);
        for xi in [[0.3, -0.1], [0.0, 0.0]] {
            let q = numeric_fourier(&g, &xi, 1e-10).unwrap();
            assert!((q - g.transform(&xi).unwrap()).norm() < 1e-7, "{xi:?}");
        }
        let g = g_square(GaussInt::ONE, 1.0);
        let q = numeric_fourier(&g, &[0.0, 0.0], 1e-10).unwrap();
        assert!((q - g_square_hat(GaussInt::ONE, 1.0, [0.0, 0.0])).norm() < 1e-9);
    }

    #[test]
    fn g_power_reduces_to_square_for_k2() {
        let alpha = GaussInt::new(-1, 3);
        let gp = g_power(vec![alpha], 2, 5.0).unwrap();
        let gs = g_square(alpha, 5.0);
        for z in [[0.2, 0.2], [-0.5, 1.1]] {
            assert!(close(gp.eval(&z), gs.eval(&z), 1e-15));
            assert!((gp.transform(&z).unwrap() - gs.transform(&z).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn g_power_zero_shifts_is_unit_gaussian() {
        let g = g_power(vec![GaussInt::ZERO; 2], 3, 4.0).unwrap();
        for z in [[0.0, 0.0], [0.5, -0.25]] {
            let expect = (-PI * (z[0] * z[0] + z[1] * z[1])).exp();
            assert!(close(g.eval(&z), expect, 1e-14));
        }
    }

    #[test]
    fn g_power_k3_matches_quadrature_and_bound() {
        let g = g_power(vec![GaussInt::ONE, GaussInt::I], 3, 4.0).unwrap();
        let pre = (-PI * 2.0 / 16.0).exp();
        for xi in [[0.1, 0.3], [-0.6, 0.2], [0.9, -0.8]] {
            let closed = g.transform(&xi).unwrap();
            let bound = pre * (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp();
            assert!(closed.norm() <= bound * (1.0 + 1e-12));
            let q = numeric_fourier(&g, &xi, 1e-9).unwrap();
            assert!((q - closed).norm() < 1e-6);
        }
    }

    #[test]
    fn g_power_rejects_wrong_shift_count() {
        assert!(matches!(
            g_power(vec![GaussInt::ONE], 3, 2.0),
            Err(WeightError::ShiftCount { expected: 2, .. })
        ));
    }

    #[test]
    fn numeric_fourier_examples() {
        let q = numeric_fourier(&WeightFn::Psi1, &[0.0, 0.0], 1e-10).unwrap();
        assert!((q - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        let f = numeric_fourier(&WeightFn::Fejer { dim: 1 }, &[0.5], 1e-10).unwrap();
        assert!(close(f.re, PI * PI / 8.0, 1e-10), "{f}");
    }

    #[test]
    fn fejer_quadrature_outside_support_vanishes() {
        let f = numeric_fourier(&WeightFn::Fejer { dim: 1 }, &[1.3], 1e-10).unwrap();
        assert!(f.norm() < 1e-10, "{f}");
        let f = numeric_fourier(&WeightFn::Fejer { dim: 1 }, &[0.0], 1e-10).unwrap();
        assert!(close(f.re, PI * PI / 4.0, 1e-10), "{f}");
    }

    #[test]
    fn psi2_has_no_closed_form() {
        let w = WeightFn::Psi2 { k: 2 };
        assert_eq!(w.transform(&[0.0, 0.0]), Err(WeightError::NoClosedForm));
        assert!(!w.has_closed_form());
    }

    #[test]
    fn tail_bounds_are_honest() {
        let weights = [
            WeightFn::Psi1,
            WeightFn::Psi2 { k: 2 },
            WeightFn::Psi2 { k: 3 },
            g_square(GaussInt::new(2, -1), 3.0),
            g_power(vec![GaussInt::new(1, 1), GaussInt::new(-2, 0)], 3, 2.0).unwrap(),
        ];
        for w in &weights {
            for r in [0.25, 0.75, 1.5, 2.5] {
                let far = truncation_radius(w, 1e-14).unwrap() + 2.0;
                let est = mass_between_numeric(w, r, far.max(r + 1.0));
                let bound = w.tail_bound(r);
                assert!(est <= bound * (1.0 + 1e-9), "{w:?} r={r}: {est} > {bound}");
            }
        }
    }

    #[test]
    fn psi2_tail_is_exact_total_at_zero() {
        // tail_bound(0) equals the total mass, which quadrature reproduces.
        for k in [2, 3] {
            let w = WeightFn::Psi2 { k };
            let total = mass_between_numeric(&w, 0.0, 400.0);
            assert!((total - w.tail_bound(0.0)).abs() < 1e-6 * total, "k={k}");
        }
    }

    #[test]
    fn sine_integral_branches_agree_at_two() {
        let below = sine_integral_complement(2.0);
        let above = sine_integral_complement(2.0 + 1e-12);
        assert!((below - above).abs() < 1e-11);
        // Si(∞) = π/2
        assert!(sine_integral_complement(1e6).abs() < 1e-6);
    }
}
