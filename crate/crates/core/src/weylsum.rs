//! Weyl-differenced exponential sums over `Z[i]`.
//!
//! The basic object is
//!
//! ```text
//! S_k(q1, r1, j) = Σ_{q2 ∈ Z[i]} Ψ2(q2^k / Q0^{k/2}) · e(Re(j r1 q2^k / q1^k)),
//! ```
//!
//! with `Ψ2(q^k/Q0^{k/2}) = exp(−(π/κ)·N(q)/Q0)`. For `k = 2`, `|S|²` is
//! computed three ways: directly, through the differenced double sum over
//! `α = q2 − q`, and through Poisson summation of the inner `q`-sum. Every
//! truncation carries a certified tail bound.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gaussint::{
    coprime, inv_mod, reduce_mod, torus_distance_sq_scaled, GaussError, GaussInt,
};
use crate::lattice::{lattice_tail_bound, truncation_radius, Lattice2, LatticeError};
use crate::sieve::{disk_support, phase_fraction};
use crate::spacing::Ratio;
use crate::sum::{e_rational, Compensated, CompensatedComplex};
use crate::weights::{g_square_hat, kappa, psi2_gaussian_form, psi2_of_power};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeylError {
    #[error("invalid Weyl configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("the α-grid has {cells} cells, budget is {limit}")]
    Budget { cells: u64, limit: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylConfig {
    pub k: u32,
    pub q0: f64,
    pub q1: GaussInt,
    pub r1: GaussInt,
    pub j: GaussInt,
    /// Target for the total discarded mass of each truncated sum.
    pub tol: f64,
}

impl WeylConfig {
    /// Checks `k ≥ 2`, `Q0/2^{1/k} < N(q1) ≤ Q0`, `(r1, q1) = 1` and `tol > 0`.
    pub fn new(
        k: u32,
        q0: f64,
        q1: GaussInt,
        r1: GaussInt,
        j: GaussInt,
        tol: f64,
    ) -> Result<Self, WeylError> {
        if k < 2 {
            return Err(WeylError::Config(format!("k must be at least 2, got {k}")));
        }
        if !(q0 > 0.0 && q0.is_finite()) {
            return Err(WeylError::Config(format!("Q0 must be positive, got {q0}")));
        }
        let n = q1.norm_u128() as f64;
        let lower = q0 / 2f64.powf(1.0 / k as f64);
        if !(n > lower && n <= q0) {
            return Err(WeylError::Config(format!(
                "N(q1) = {n} lies outside ({lower}, {q0}]"
            )));
        }
        if !coprime(r1, q1) {
            return Err(WeylError::Config(format!("r1 = {r1} is not coprime to q1 = {q1}")));
        }
        if !(tol > 0.0) {
            return Err(WeylError::Config(format!("tolerance must be positive, got {tol}")));
        }
        Ok(WeylConfig {
            k,
            q0,
            q1,
            r1,
            j,
            tol,
        })
    }

    pub fn kappa(&self) -> u32 {
        kappa(self.k)
    }

    /// `q1^k`.
    pub fn modulus(&self) -> GaussInt {
        self.q1.pow(self.k)
    }

    fn jr1(&self) -> GaussInt {
        self.j * self.r1
    }

    fn require_square(&self) -> Result<(), WeylError> {
        if self.k != 2 {
            return Err(WeylError::Config(format!("this form needs k = 2, got {}", self.k)));
        }
        Ok(())
    }
}

/// A truncated sum with a certified bound on what was discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: Complex64,
    pub tail: f64,
    pub terms: usize,
}

/// `Σ_{y ∈ a + Z², |y| > r} exp(−a_coef |y|²)`, uniformly in the shift.
fn gaussian_tail(r: f64, a_coef: f64) -> f64 {
    lattice_tail_bound(&Lattice2::standard(), r, |s| (-a_coef * s * s).exp())
}

fn gaussian_radius(a_coef: f64, target: f64) -> Result<f64, WeylError> {
    Ok(truncation_radius(&Lattice2::standard(), target, |s| {
        (-a_coef * s * s).exp()
    })?)
}

/// Gaussian integers `z` with `|z − center| ≤ radius`, in `(re, im)` order.
fn gaussians_near(center: [f64; 2], radius: f64) -> Vec<GaussInt> {
    let r2 = radius * radius;
    let (x_lo, x_hi) = ((center[0] - radius).floor() as i64, (center[0] + radius).ceil() as i64);
    let (y_lo, y_hi) = ((center[1] - radius).floor() as i64, (center[1] + radius).ceil() as i64);
    let mut out = Vec::new();
    for x in x_lo..=x_hi {
        for y in y_lo..=y_hi {
            let (dx, dy) = (x as f64 - center[0], y as f64 - center[1]);
            if dx * dx + dy * dy <= r2 {
                out.push(GaussInt::new(x, y));
            }
        }
    }
    out
}

/// `Σ_{q2} Ψ2(q2^k/Q0^{k/2}) · e(Re(j r1 q2^k / q1^k))`, evaluated term by
/// term from the exact power `q2^k`.
pub fn s_direct(cfg: &WeylConfig) -> Result<Truncated, WeylError> {
    let a_coef = PI / (cfg.kappa() as f64 * cfg.q0);
    let radius = gaussian_radius(a_coef, cfg.tol)?;
    let tail = gaussian_tail(radius, a_coef);
    let m = cfg.modulus();
    let jr1 = cfg.jr1();
    let points = gaussians_near([0.0, 0.0], radius);
    let value = points
        .iter()
        .map(|&q2| {
            let w = psi2_of_power(cfg.k, q2, cfg.q0);
            let (num, den) = phase_fraction(q2.pow(cfg.k), jr1, m);
            e_rational(num, den) * w
        })
        .collect::<CompensatedComplex>()
        .value();
    Ok(Truncated {
        value,
        tail,
        terms: points.len(),
    })
}

/// `Σ_{q2} Ψ2(q2^k/Q0^{k/2})`, the `j = 0` value of [`s_direct`].
pub fn sum_psi2(k: u32, q0: f64, tol: f64) -> Result<Truncated, WeylError> {
    let a_coef = PI / (kappa(k) as f64 * q0);
    let radius = gaussian_radius(a_coef, tol)?;
    let points = gaussians_near([0.0, 0.0], radius);
    let value: Compensated = points.iter().map(|&q| psi2_of_power(k, q, q0)).collect();
    Ok(Truncated {
        value: Complex64::new(value.value(), 0.0),
        tail: gaussian_tail(radius, a_coef),
        terms: points.len(),
    })
}

/// The α-range of the differenced forms and its discarded mass.
///
/// Each inner sum is bounded by `P(α)·(1 + √Q0)²` with
/// `P(α) = exp(−π N(α)/(4Q0))`, so the α-tail is `(1+√Q0)²` times a Gaussian
/// lattice tail.
fn alpha_range(cfg: &WeylConfig, alpha_cut: Option<f64>) -> Result<(Vec<GaussInt>, f64), WeylError> {
    let a_coef = PI / (4.0 * cfg.q0);
    let inner_max = (1.0 + cfg.q0.sqrt()).powi(2);
    let radius = match alpha_cut {
        Some(cut) => cut.max(0.0).sqrt(),
        None => gaussian_radius(a_coef, cfg.tol / (2.0 * inner_max))?,
    };
    let alphas = gaussians_near([0.0, 0.0], radius);
    Ok((alphas, inner_max * gaussian_tail(radius, a_coef)))
}

/// `|S|²` through the differenced double sum
/// `Σ_α e(Re(j r1 α²/q1²)) Σ_q Ψ2(q²/Q0) Ψ2((α+q)²/Q0) e(Re(2jα r1 q / q1²))`.
///
/// With `alpha_cut = None` the α-range is chosen so the whole tail stays
/// below `tol`; otherwise `N(α) ≤ alpha_cut` and the reported tail covers the
/// discarded α's.
pub fn s2_squared_differenced(cfg: &WeylConfig, alpha_cut: Option<f64>) -> Result<Truncated, WeylError> {
    cfg.require_square()?;
    let (alphas, alpha_tail) = alpha_range(cfg, alpha_cut)?;
    let a_in = PI / cfg.q0;
    let r_in = gaussian_radius(a_in, cfg.tol / (2.0 * alphas.len().max(1) as f64))?;
    let inner_tail = gaussian_tail(r_in, a_in);
    let m = cfg.modulus();
    let jr1 = cfg.jr1();
    let parts: Vec<(Complex64, f64, usize)> = alphas
        .par_iter()
        .map(|&alpha| {
            let center = [-(alpha.re as f64) / 2.0, -(alpha.im as f64) / 2.0];
            let qs = gaussians_near(center, r_in);
            let twice = GaussInt::from(2) * alpha * jr1;
            let inner: CompensatedComplex = qs
                .iter()
                .map(|&q| {
                    let w = psi2_gaussian_form(2, q, cfg.q0) * psi2_gaussian_form(2, alpha + q, cfg.q0);
                    let (num, den) = phase_fraction(q, twice, m);
                    e_rational(num, den) * w
                })
                .collect();
            let (num, den) = phase_fraction(alpha * alpha, jr1, m);
            let p_alpha = (-PI * alpha.norm() as f64 / (4.0 * cfg.q0)).exp();
            (e_rational(num, den) * inner.value(), p_alpha * inner_tail, qs.len())
        })
        .collect();
    Ok(combine(parts, alpha_tail))
}

fn combine(parts: Vec<(Complex64, f64, usize)>, extra_tail: f64) -> Truncated {
    let mut value = CompensatedComplex::default();
    let mut tail = Compensated::default();
    tail.add(extra_tail);
    let mut terms = 0;
    for (v, t, n) in parts {
        value.add(v);
        tail.add(t);
        terms += n;
    }
    Truncated {
        value: value.value(),
        tail: tail.value(),
        terms,
    }
}

/// The vector of `conj(c / m)` reduced into `[0, 1)²`, where `c/m` is given
/// by the exact numerators of `c·m̄` over `N(m)`.
fn conj_vector_mod1(c: GaussInt, m: GaussInt) -> [f64; 2] {
    let (a, b) = c.mul_wide(m.conj());
    let d = m.norm_u128() as i128;
    [
        a.rem_euclid(d) as f64 / d as f64,
        (-b).rem_euclid(d) as f64 / d as f64,
    ]
}

/// `|S|²` through Poisson summation of the inner sum:
/// `Q0 · Σ_α e(Re(j r1 α²/q1²)) Σ_β ĝ_α(√Q0 (β − b_α))` with
/// `b_α = conj(2jα r1/q1²)` as a vector.
pub fn s2_squared_poisson(cfg: &WeylConfig, alpha_cut: Option<f64>) -> Result<Truncated, WeylError> {
    cfg.require_square()?;
    let (alphas, alpha_tail) = alpha_range(cfg, alpha_cut)?;
    let q0 = cfg.q0;
    let sq = q0.sqrt();
    let a_beta = PI * q0;
    let target = cfg.tol / (2.0 * q0 * alphas.len().max(1) as f64);
    let r_beta = gaussian_radius(a_beta, target)?;
    let beta_tail = gaussian_tail(r_beta, a_beta);
    let m = cfg.modulus();
    let jr1 = cfg.jr1();
    let parts: Vec<(Complex64, f64, usize)> = alphas
        .par_iter()
        .map(|&alpha| {
            let b = conj_vector_mod1(GaussInt::from(2) * alpha * jr1, m);
            let betas = gaussians_near(b, r_beta);
            let inner: CompensatedComplex = betas
                .iter()
                .map(|beta| {
                    let xi = [sq * (beta.re as f64 - b[0]), sq * (beta.im as f64 - b[1])];
                    g_square_hat(alpha, q0, xi)
                })
                .collect();
            let (num, den) = phase_fraction(alpha * alpha, jr1, m);
            let p_alpha = (-PI * alpha.norm() as f64 / (4.0 * q0)).exp();
            (
                e_rational(num, den) * inner.value() * q0,
                q0 * p_alpha * beta_tail,
                betas.len(),
            )
        })
        .collect();
    Ok(combine(parts, alpha_tail))
}

fn binomial(n: u32, r: u32) -> i64 {
    (0..r).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Coefficients (constant first) of the iterated difference
/// `Δ_{α_m} ⋯ Δ_{α_1} q^k`, where `Δ_a p(q) = p(q + a) − p(q)`.
pub fn p_poly_coefficients(k: u32, alphas: &[GaussInt]) -> Vec<GaussInt> {
    assert!(
        !alphas.is_empty() && alphas.len() < k as usize,
        "need between 1 and k-1 differencing shifts"
    );
    let mut coeffs = vec![GaussInt::ZERO; k as usize + 1];
    coeffs[k as usize] = GaussInt::ONE;
    for &a in alphas {
        let mut next = vec![GaussInt::ZERO; coeffs.len()];
        for (i, &c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // c·((q+a)^i − q^i) = c·Σ_{l<i} C(i,l) a^{i−l} q^l
            for (l, slot) in next.iter_mut().enumerate().take(i) {
                let term = c * a.pow(i as u32 - l as u32) * GaussInt::from(binomial(i as u32, l as u32));
                *slot = *slot + term;
            }
        }
        coeffs = next;
    }
    let degree = k as usize - alphas.len();
    coeffs.truncate(degree + 1);
    coeffs
}

/// `Δ_{α_m} ⋯ Δ_{α_1} q^k` evaluated at `q`. At full depth `m = k − 1` this is
/// `k!·α_1⋯α_{k−1}·(q + (α_1 + ⋯ + α_{k−1})/2)`, an integer because `k!` is even.
pub fn p_poly(k: u32, alphas: &[GaussInt], q: GaussInt) -> GaussInt {
    p_poly_coefficients(k, alphas)
        .iter()
        .rev()
        .fold(GaussInt::ZERO, |acc, &c| acc * q + c)
}

/// Outcome of evaluating the right-hand side of the Weyl chain.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylChainRhs {
    /// `Q0^{κ−k+ε} · Σ_α |inner(α)|` (scaled up from the sample when sampled).
    pub rhs: f64,
    pub cells: u64,
    pub evaluated: u64,
    /// Seed of the α-sample, if the grid was sampled.
    pub sample_seed: Option<u64>,
    /// Bound on the mass dropped by truncating the inner `q`-sums.
    pub tail: f64,
}

/// The right-hand side of the Weyl inequality for `|S_k|^κ`:
///
/// ```text
/// Q0^{κ−k+ε} Σ_{N(α_v) ≤ Q0^{1+ε}} | Σ_q ∏_u Ψ2((u·α + q)^k / Q0^{k/2}) · e(Re(j r1 P_{1,α}(q) / q1^k)) |.
/// ```
///
/// Grids larger than `max_cells` are an error for `k ≤ 3`; for `k ≥ 4` they
/// are sampled uniformly with ChaCha8 seeded by `sample_seed`.
pub fn sk_power_bound_rhs(
    cfg: &WeylConfig,
    eps: f64,
    max_cells: u64,
    sample_seed: u64,
) -> Result<WeylChainRhs, WeylError> {
    let k = cfg.k;
    let kap = cfg.kappa() as f64;
    let depth = k as usize - 1;
    let base = disk_support(cfg.q0.powf(1.0 + eps));
    let cells = (base.len() as u64).checked_pow(depth as u32).unwrap_or(u64::MAX);
    let tuples: Vec<Vec<GaussInt>> = if cells <= max_cells {
        (0..cells)
            .map(|mut idx| {
                (0..depth)
                    .map(|_| {
                        let a = base[(idx % base.len() as u64) as usize];
                        idx /= base.len() as u64;
                        a
                    })
                    .collect()
            })
            .collect()
    } else if k >= 4 {
        let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
        (0..max_cells)
            .map(|_| (0..depth).map(|_| base[rng.random_range(0..base.len())]).collect())
            .collect()
    } else {
        return Err(WeylError::Budget {
            cells,
            limit: max_cells,
        });
    };
    let a_in = PI / cfg.q0;
    let r_in = gaussian_radius(a_in, cfg.tol / tuples.len().max(1) as f64)?;
    let inner_tail = gaussian_tail(r_in, a_in);
    let m = cfg.modulus();
    let jr1 = cfg.jr1();
    let parts: Vec<(f64, f64)> = tuples
        .par_iter()
        .map(|alphas| {
            let coeffs = p_poly_coefficients(k, alphas);
            let shifts: Vec<GaussInt> = (0..1usize << depth)
                .map(|mask| {
                    (0..depth)
                        .filter(|v| mask >> v & 1 == 1)
                        .fold(GaussInt::ZERO, |acc, v| acc + alphas[v])
                })
                .collect();
            let s = alphas.iter().fold(GaussInt::ZERO, |acc, &a| acc + a);
            let energy: u64 = alphas.iter().map(|a| a.norm()).sum();
            let prefactor = (-PI * energy as f64 / (4.0 * cfg.q0)).exp();
            let center = [-(s.re as f64) / 2.0, -(s.im as f64) / 2.0];
            let inner: CompensatedComplex = gaussians_near(center, r_in)
                .into_iter()
                .map(|q| {
                    let spread: u128 = shifts.iter().map(|&u| (q + u).norm_u128()).sum();
                    let w = (-(PI / kap) * spread as f64 / cfg.q0).exp();
                    let poly = coeffs[1] * q + coeffs[0];
                    let (num, den) = phase_fraction(poly, jr1, m);
                    e_rational(num, den) * w
                })
                .collect();
            (inner.value().norm(), prefactor * inner_tail)
        })
        .collect();
    let sum: Compensated = parts.iter().map(|p| p.0).collect();
    let tail: Compensated = parts.iter().map(|p| p.1).collect();
    let evaluated = tuples.len() as u64;
    let scale = cells as f64 / evaluated.max(1) as f64;
    Ok(WeylChainRhs {
        rhs: cfg.q0.powf(kap - k as f64 + eps) * sum.value() * scale,
        cells,
        evaluated,
        sample_seed: (evaluated < cells).then_some(sample_seed),
        tail: tail.value() * scale,
    })
}

/// `a·b` as a 256-bit value `(hi, lo)`.
fn mul_u256(a: u128, b: u128) -> (u128, u128) {
    let mask = u64::MAX as u128;
    let (a0, a1) = (a & mask, a >> 64);
    let (b0, b1) = (b & mask, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    let lo = (p00 & mask) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Is `x / d² ≤ δ²` for `δ = num/den`? Exact.
fn within_sq(x: u128, d2: u128, delta: Ratio) -> bool {
    assert!(delta.den <= 1 << 64, "delta has too fine a binary expansion");
    mul_u256(x, delta.den * delta.den) <= mul_u256(delta.num * delta.num, d2)
}

/// `#{d ≠ 0 : N(d) ≤ norm_limit, ‖d r1 / q1^k‖ ≤ δ}`, compared exactly.
pub fn count_small_fractional(
    q1: GaussInt,
    r1: GaussInt,
    k: u32,
    norm_limit: u64,
    delta: f64,
) -> Result<u64, WeylError> {
    if !coprime(r1, q1) {
        return Err(GaussError::NotInvertible { r: r1, m: q1 }.into());
    }
    assert!(delta >= 0.0, "delta must be nonnegative");
    let m = q1.pow(k);
    let d_norm = m.norm_u128();
    let d2 = d_norm * d_norm;
    let ratio = if delta == 0.0 {
        Ratio { num: 0, den: 1 }
    } else {
        Ratio::from_f64(delta)
    };
    Ok(disk_support(norm_limit as f64)
        .into_iter()
        .filter(|d| !d.is_zero())
        .filter(|&d| {
            let w = (d * r1).mul_wide(m.conj());
            within_sq(torus_distance_sq_scaled(w, d_norm as i128), d2, ratio)
        })
        .count() as u64)
}

/// The same count assembled from residue classes: `Σ_l #{d ≠ 0 : N(d) ≤ L,
/// d ≡ l·r̄1 mod q1^k}` over `|l| ≤ δ|q1^k|`. Equal to
/// [`count_small_fractional`] for `δ < 1/2`, never smaller.
pub fn count_by_residue_classes(
    q1: GaussInt,
    r1: GaussInt,
    k: u32,
    norm_limit: u64,
    delta: f64,
) -> Result<u64, WeylError> {
    let m = q1.pow(k);
    let rbar = inv_mod(r1, m)?;
    let mut per_class: HashMap<GaussInt, u64> = HashMap::new();
    for d in disk_support(norm_limit as f64) {
        if !d.is_zero() {
            *per_class.entry(reduce_mod(d, m)?).or_default() += 1;
        }
    }
    let ls = small_l(m, delta);
    let mut total = 0;
    for l in ls {
        let class = reduce_mod(l * rbar, m)?;
        total += per_class.get(&class).copied().unwrap_or(0);
    }
    Ok(total)
}

/// Gaussian integers `l` with `N(l) ≤ δ²·N(m)`.
fn small_l(m: GaussInt, delta: f64) -> Vec<GaussInt> {
    let n = m.norm_u128();
    let ratio = if delta == 0.0 {
        Ratio { num: 0, den: 1 }
    } else {
        Ratio::from_f64(delta)
    };
    let side = (delta * (n as f64).sqrt()).ceil() as i64 + 1;
    let mut out = Vec::new();
    for x in -side..=side {
        for y in -side..=side {
            let l = GaussInt::new(x, y);
            if within_sq(l.norm_u128(), n, ratio) {
                out.push(l);
            }
        }
    }
    out
}

/// Certified upper bound for [`count_by_residue_classes`]:
/// `#{l} · π(√L + √(2N(m)))² / N(m)`, each class holding at most that many
/// points of the disk.
pub fn residue_decomposition_bound(q1: GaussInt, k: u32, norm_limit: u64, delta: f64) -> f64 {
    let m = q1.pow(k);
    let n = m.norm_u128() as f64;
    let per_class = PI * ((norm_limit as f64).sqrt() + (2.0 * n).sqrt()).powi(2) / n;
    small_l(m, delta).len() as f64 * per_class
}
