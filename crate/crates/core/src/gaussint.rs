//! Exact arithmetic in the Gaussian integers `Z[i]`.
//!
//! Every quantity here is an exact integer. Components are `i64`; products and
//! norms go through `i128`/`u128` and panic on overflow instead of wrapping.
//! Floating point appears only in [`nearest_gaussian_distance`] and its
//! squared variant.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest norm accepted by [`factor`] (trial division on the norm).
pub const FACTOR_NORM_LIMIT: u128 = 1 << 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,
    #[error("modulus must be nonzero")]
    ZeroModulus,
    #[error("{r} is not invertible modulo {m}")]
    NotInvertible { r: GaussInt, m: GaussInt },
    #[error("norm {norm} exceeds the trial-division range 2^50")]
    FactorRange { norm: u128 },
}

/// A Gaussian integer `re + im·i`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).unwrap_or_else(|_| panic!("Gaussian integer overflow: component {v}"))
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };
    pub const UNITS: [GaussInt; 4] = [
        GaussInt { re: 1, im: 0 },
        GaussInt { re: 0, im: 1 },
        GaussInt { re: -1, im: 0 },
        GaussInt { re: 0, im: -1 },
    ];

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    /// `re² + im²`. Exact for `|re|, |im| ≤ 2^31`; panics when the value
    /// does not fit in a `u64`.
    pub fn norm(self) -> u64 {
        let n = self.norm_u128();
        u64::try_from(n).unwrap_or_else(|_| panic!("norm of {self} overflows u64"))
    }

    /// The norm in `u128`; never overflows for `i64` components.
    pub fn norm_u128(self) -> u128 {
        let (a, b) = (self.re as i128, self.im as i128);
        (a * a) as u128 + (b * b) as u128
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, narrow(-(self.im as i128)))
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.norm_u128() == 1
    }

    /// Multiplication by `i`.
    pub fn mul_i(self) -> Self {
        GaussInt::new(narrow(-(self.im as i128)), self.re)
    }

    pub fn associates(self) -> [GaussInt; 4] {
        let a1 = self.mul_i();
        let a2 = a1.mul_i();
        [self, a1, a2, a2.mul_i()]
    }

    /// The associate with `re > 0, im ≥ 0` (zero maps to zero).
    pub fn canonical(self) -> Self {
        if self.is_zero() {
            return self;
        }
        self.associates()
            .into_iter()
            .find(|z| z.re > 0 && z.im >= 0)
            .expect("exactly one associate lies in the first quadrant")
    }

    pub fn pow(self, k: u32) -> Self {
        let mut acc = GaussInt::ONE;
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }

    /// `self · other` with wide components, for phase numerators.
    pub fn mul_wide(self, other: GaussInt) -> (i128, i128) {
        let (a, b) = (self.re as i128, self.im as i128);
        let (c, d) = (other.re as i128, other.im as i128);
        (a * c - b * d, a * d + b * c)
    }

    /// Does `self` divide `other`?
    pub fn divides(self, other: GaussInt) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        let (wr, wi) = other.mul_wide(self.conj());
        let n = self.norm_u128() as i128;
        wr % n == 0 && wi % n == 0
    }

    /// Exact quotient `other / self`, if it exists.
    pub fn exact_div(other: GaussInt, by: GaussInt) -> Option<GaussInt> {
        if by.is_zero() {
            return None;
        }
        let (wr, wi) = other.mul_wide(by.conj());
        let n = by.norm_u128() as i128;
        (wr % n == 0 && wi % n == 0).then(|| GaussInt::new(narrow(wr / n), narrow(wi / n)))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, im) => write!(f, "{im}i"),
            (re, 1) => write!(f, "{re}+i"),
            (re, -1) => write!(f, "{re}-i"),
            (re, im) if im > 0 => write!(f, "{re}+{im}i"),
            (re, im) => write!(f, "{re}{im}i"),
        }
    }
}

impl From<i64> for GaussInt {
    fn from(re: i64) -> Self {
        GaussInt::new(re, 0)
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: GaussInt) -> GaussInt {
        GaussInt::new(
            narrow(self.re as i128 + rhs.re as i128),
            narrow(self.im as i128 + rhs.im as i128),
        )
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: GaussInt) -> GaussInt {
        GaussInt::new(
            narrow(self.re as i128 - rhs.re as i128),
            narrow(self.im as i128 - rhs.im as i128),
        )
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(narrow(-(self.re as i128)), narrow(-(self.im as i128)))
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, rhs: GaussInt) -> GaussInt {
        let (re, im) = self.mul_wide(rhs);
        GaussInt::new(narrow(re), narrow(im))
    }
}

/// Nearest integer to `x / d` (`d > 0`), ties toward negative infinity.
fn round_ties_down(x: i128, d: i128) -> i128 {
    // ceil((2x - d) / 2d)
    -((d - 2 * x).div_euclid(2 * d))
}

/// Division with remainder: `a = q·b + r` with `2·norm(r) ≤ norm(b)`.
///
/// The quotient rounds `a / b` to the nearest Gaussian integer componentwise;
/// half-integers round toward negative infinity.
pub fn divrem(a: GaussInt, b: GaussInt) -> Result<(GaussInt, GaussInt), GaussError> {
    if b.is_zero() {
        return Err(GaussError::DivisionByZero);
    }
    let (wr, wi) = a.mul_wide(b.conj());
    let n = b.norm_u128() as i128;
    let q = GaussInt::new(narrow(round_ties_down(wr, n)), narrow(round_ties_down(wi, n)));
    Ok((q, a - q * b))
}

/// Greatest common divisor, normalized to the canonical associate.
pub fn gcd(a: GaussInt, b: GaussInt) -> Result<GaussInt, GaussError> {
    if a.is_zero() && b.is_zero() {
        return Err(GaussError::ZeroGcd);
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let (_, r) = divrem(x, y)?;
        x = y;
        y = r;
    }
    Ok(x.canonical())
}

/// Extended gcd: returns `(g, s, t)` with `g = s·a + t·b` (g not normalized).
fn ext_gcd(a: GaussInt, b: GaussInt) -> (GaussInt, GaussInt, GaussInt) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (GaussInt::ONE, GaussInt::ZERO);
    let (mut t0, mut t1) = (GaussInt::ZERO, GaussInt::ONE);
    while !r1.is_zero() {
        let (q, r) = divrem(r0, r1).expect("r1 is nonzero");
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// Are `a` and `b` coprime (gcd a unit)? `coprime(0, u)` holds for units `u`.
pub fn coprime(a: GaussInt, b: GaussInt) -> bool {
    matches!(gcd(a, b), Ok(g) if g == GaussInt::ONE)
}

/// The canonical representative of `a` modulo `m`: the unique element of the
/// class in the half-open parallelogram `{(x + iy)·m : x, y ∈ [0, 1)}`.
pub fn reduce_mod(a: GaussInt, m: GaussInt) -> Result<GaussInt, GaussError> {
    if m.is_zero() {
        return Err(GaussError::ZeroModulus);
    }
    let (wr, wi) = a.mul_wide(m.conj());
    let n = m.norm_u128() as i128;
    let t = GaussInt::new(narrow(wr.div_euclid(n)), narrow(wi.div_euclid(n)));
    Ok(a - t * m)
}

/// Representatives of `Z[i]/(m)` drawn from the fundamental parallelogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSystem {
    pub modulus: GaussInt,
    pub representatives: Vec<GaussInt>,
    pub reduced: bool,
}

impl ResidueSystem {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

/// Complete (or reduced) residue system modulo `m`, sorted by `(re, im)`.
pub fn residue_system(m: GaussInt, reduced: bool) -> Result<ResidueSystem, GaussError> {
    if m.is_zero() {
        return Err(GaussError::ZeroModulus);
    }
    let corners = [GaussInt::ZERO, m, m.mul_i(), m + m.mul_i()];
    let (re_lo, re_hi) = corners
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c.re), hi.max(c.re)));
    let (im_lo, im_hi) = corners
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c.im), hi.max(c.im)));
    let n = m.norm_u128() as i128;
    let mc = m.conj();
    let mut reps = Vec::with_capacity(n as usize);
    for re in re_lo..=re_hi {
        for im in im_lo..=im_hi {
            let z = GaussInt::new(re, im);
            let (wr, wi) = z.mul_wide(mc);
            if (0..n).contains(&wr) && (0..n).contains(&wi) && (!reduced || coprime(z, m)) {
                reps.push(z);
            }
        }
    }
    Ok(ResidueSystem {
        modulus: m,
        representatives: reps,
        reduced,
    })
}

/// Multiplicative inverse of `r` modulo `m`, as a canonical representative.
pub fn inv_mod(r: GaussInt, m: GaussInt) -> Result<GaussInt, GaussError> {
    if m.is_zero() {
        return Err(GaussError::ZeroModulus);
    }
    let (g, s, _) = ext_gcd(r, m);
    if !g.is_unit() {
        return Err(GaussError::NotInvertible { r, m });
    }
    // g is a unit, so its inverse is its conjugate.
    reduce_mod(s * g.conj(), m)
}

/// Unit times a product of canonical prime powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: GaussInt,
    pub prime_powers: Vec<(GaussInt, u32)>,
}

impl Factorization {
    pub fn product(&self) -> GaussInt {
        self.prime_powers
            .iter()
            .fold(self.unit, |acc, &(p, e)| acc * p.pow(e))
    }
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// The canonical Gaussian prime above a rational prime `p ≡ 1 (mod 4)`.
fn split_prime(p: u64) -> GaussInt {
    let p128 = p as u128;
    let t = (2..p128)
        .map(|c| pow_mod(c, (p128 - 1) / 4, p128))
        .find(|&t| t * t % p128 == p128 - 1)
        .expect("a quadratic non-residue exists for odd primes");
    gcd(GaussInt::new(p as i64, 0), GaussInt::new(t as i64, 1)).expect("nonzero arguments")
}

fn rational_prime_factors(mut n: u128) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n as u64, 1));
    }
    out
}

fn strip(m: &mut GaussInt, p: GaussInt) -> u32 {
    let mut e = 0;
    while let Some(q) = GaussInt::exact_div(*m, p) {
        *m = q;
        e += 1;
    }
    e
}

/// Factorization into canonical Gaussian primes, by trial division on the norm.
pub fn factor(m: GaussInt) -> Result<Factorization, GaussError> {
    if m.is_zero() {
        return Err(GaussError::ZeroModulus);
    }
    let norm = m.norm_u128();
    if norm > FACTOR_NORM_LIMIT {
        return Err(GaussError::FactorRange { norm });
    }
    let mut rest = m;
    let mut prime_powers = Vec::new();
    for (p, _) in rational_prime_factors(norm) {
        let candidates = match p % 4 {
            2 => vec![GaussInt::new(1, 1)],
            3 => vec![GaussInt::new(p as i64, 0)],
            _ => {
                let pi = split_prime(p);
                vec![pi, pi.conj().canonical()]
            }
        };
        for pi in candidates {
            let e = strip(&mut rest, pi);
            if e > 0 {
                prime_powers.push((pi, e));
            }
        }
    }
    debug_assert!(rest.is_unit(), "leftover {rest} after stripping all primes");
    prime_powers.sort();
    Ok(Factorization {
        unit: rest,
        prime_powers,
    })
}

/// Size of the reduced residue system modulo `m`.
pub fn gaussian_phi(m: GaussInt) -> Result<u64, GaussError> {
    let f = factor(m)?;
    Ok(f.prime_powers.iter().fold(1u64, |acc, &(p, e)| {
        let np = p.norm();
        acc * np.pow(e - 1) * (np - 1)
    }))
}

/// Number of divisors of `d` up to associates.
pub fn divisor_count(d: GaussInt) -> Result<u64, GaussError> {
    let f = factor(d)?;
    Ok(f.prime_powers.iter().map(|&(_, e)| e as u64 + 1).product())
}

/// `x − d·round(x/d)` for `d > 0`; the result lies in `[−d/2, d/2]`.
pub fn centered_residue(x: i128, d: i128) -> i128 {
    x - d * round_ties_down(x, d)
}

/// Squared distance from `w / d` to the nearest Gaussian integer, scaled by
/// `d²`, where `w = (re, im)` and `d > 0`. Exact.
pub fn torus_distance_sq_scaled(w: (i128, i128), d: i128) -> u128 {
    let a = centered_residue(w.0, d);
    let b = centered_residue(w.1, d);
    (a * a) as u128 + (b * b) as u128
}

pub fn nearest_gaussian_distance_sq(z: Complex64) -> f64 {
    let a = z.re - z.re.round();
    let b = z.im - z.im.round();
    a * a + b * b
}

/// `min_{w ∈ Z[i]} |z − w|`.
pub fn nearest_gaussian_distance(z: Complex64) -> f64 {
    nearest_gaussian_distance_sq(z).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn box_points(r: i64) -> impl Iterator<Item = GaussInt> {
        (-r..=r).flat_map(move |a| (-r..=r).map(move |b| g(a, b)))
    }

    #[test]
    fn norm_examples() {
        assert_eq!(g(0, 0).norm(), 0);
        assert_eq!(g(1, 1).norm(), 2);
        assert_eq!(g(3, 4).norm(), 25);
        let edge = 1i64 << 31;
        assert_eq!(g(edge, -edge).norm(), 1u64 << 63);
    }

    #[test]
    #[should_panic(expected = "overflows")]
    fn norm_overflow_fails_loudly() {
        g(i64::MAX, i64::MAX).norm();
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn mul_overflow_fails_loudly() {
        let _ = g(i64::MAX / 2, 3) * g(4, 0);
    }

    #[test]
    fn divrem_examples() {
        // 7/2 = 3.5 sits on a tie; candidates 3 and 4 both leave norm-1 remainders.
        let candidates: Vec<_> = box_points(5)
            .filter(|&q| {
                let r = g(7, 0) - q * g(2, 0);
                2 * r.norm() <= 4
            })
            .collect();
        assert_eq!(candidates, vec![g(3, 0), g(4, 0)]);
        assert_eq!(divrem(g(7, 0), g(2, 0)).unwrap(), (g(3, 0), g(1, 0)));
        assert_eq!(divrem(g(5, -9), GaussInt::ONE).unwrap(), (g(5, -9), GaussInt::ZERO));
        assert_eq!(divrem(g(5, 0), g(1, 2)).unwrap(), (g(1, -2), GaussInt::ZERO));
        assert_eq!(divrem(g(1, 1), GaussInt::ZERO), Err(GaussError::DivisionByZero));
    }

    #[test]
    fn divrem_ties_round_down() {
        // (1+i)/2 = 0.5 + 0.5i rounds to 0 in both coordinates.
        assert_eq!(divrem(g(1, 1), g(2, 0)).unwrap(), (GaussInt::ZERO, g(1, 1)));
        // -1/2 rounds to -1.
        assert_eq!(divrem(g(-1, 0), g(2, 0)).unwrap(), (g(-1, 0), g(1, 0)));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(g(-3, 2), GaussInt::ZERO).unwrap(), g(-3, 2).canonical());
        assert_eq!(gcd(g(2, 0), g(1, 1)).unwrap(), g(1, 1));
        assert_eq!(gcd(g(3, 0), g(7, 0)).unwrap(), GaussInt::ONE);
        assert_eq!(gcd(GaussInt::ZERO, GaussInt::ZERO), Err(GaussError::ZeroGcd));
    }

    #[test]
    fn gcd_of_two_and_one_plus_i_by_enumeration() {
        let common: Vec<_> = box_points(2)
            .filter(|d| !d.is_zero() && d.norm() <= 2)
            .filter(|&d| d.divides(g(2, 0)) && d.divides(g(1, 1)))
            .collect();
        let best = common.iter().map(|d| d.norm()).max().unwrap();
        assert_eq!(best, 2);
        assert_eq!(gcd(g(2, 0), g(1, 1)).unwrap().norm(), best);
    }

    #[test]
    fn canonical_associate_is_first_quadrant() {
        for z in box_points(6).filter(|z| !z.is_zero()) {
            let c = z.canonical();
            assert!(c.re > 0 && c.im >= 0);
            assert!(z.associates().contains(&c));
        }
    }

    #[test]
    fn residue_system_examples() {
        let unit = residue_system(GaussInt::ONE, false).unwrap();
        assert_eq!(unit.representatives, vec![GaussInt::ZERO]);
        assert_eq!(residue_system(g(1, 1), false).unwrap().len(), 2);
        assert_eq!(residue_system(g(1, 1), true).unwrap().len(), 1);
        let two = residue_system(g(2, 0), true).unwrap();
        assert_eq!(two.len(), 2);
        // the classes of 1 and i
        for target in [GaussInt::ONE, GaussInt::I] {
            let hits = two
                .representatives
                .iter()
                .filter(|&&r| g(2, 0).divides(r - target))
                .count();
            assert_eq!(hits, 1);
        }
        assert_eq!(residue_system(GaussInt::ZERO, true), Err(GaussError::ZeroModulus));
    }

    /// Independent residue oracle: walk a box of side `2·|m|` and keep one
    /// element per class, testing congruence by exact division.
    fn residue_classes_by_box(m: GaussInt, reduced: bool) -> usize {
        let side = (m.norm() as f64).sqrt().ceil() as i64 + 1;
        let mut classes: Vec<GaussInt> = Vec::new();
        for z in box_points(side) {
            if reduced && !coprime(z, m) {
                continue;
            }
            if !classes.iter().any(|&c| m.divides(z - c)) {
                classes.push(z);
            }
        }
        classes.len()
    }

    #[test]
    fn residue_system_matches_box_oracle() {
        for m in [g(1, 1), g(2, 0), g(2, 1), g(3, 0), g(1, 3), g(-2, 2), g(4, 1)] {
            for reduced in [false, true] {
                let sys = residue_system(m, reduced).unwrap();
                assert_eq!(sys.len(), residue_classes_by_box(m, reduced), "m={m}");
                for (a, &x) in sys.representatives.iter().enumerate() {
                    assert_eq!(reduce_mod(x, m).unwrap(), x);
                    for &y in &sys.representatives[a + 1..] {
                        assert!(!m.divides(x - y));
                    }
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(gaussian_phi(g(1, 1)).unwrap(), 1);
        assert_eq!(gaussian_phi(g(2, 0)).unwrap(), 2);
        assert_eq!(gaussian_phi(g(3, 0)).unwrap(), 8);
        assert_eq!(gaussian_phi(GaussInt::ONE).unwrap(), 1);
        assert_eq!(residue_system(g(3, 0), true).unwrap().len(), 8);
    }

    #[test]
    fn inv_mod_examples() {
        let m = g(1, 2);
        // 1 lies outside the fundamental cell of 1+2i; its canonical rep is -1+i
        assert_eq!(inv_mod(GaussInt::ONE, m).unwrap(), reduce_mod(GaussInt::ONE, m).unwrap());
        assert_eq!(inv_mod(GaussInt::ONE, g(3, 0)).unwrap(), GaussInt::ONE);
        let complete = residue_system(m, false).unwrap();
        let by_search: Vec<_> = complete
            .representatives
            .iter()
            .copied()
            .filter(|&s| m.divides(GaussInt::I * s - GaussInt::ONE))
            .collect();
        assert_eq!(by_search.len(), 1);
        assert_eq!(inv_mod(GaussInt::I, m).unwrap(), by_search[0]);
        assert_eq!(by_search[0], reduce_mod(-GaussInt::I, m).unwrap());

        let m = g(5, 3);
        for r in residue_system(m, true).unwrap().representatives {
            let s = inv_mod(r, m).unwrap();
            assert!(m.divides(r * s - GaussInt::ONE));
            assert_eq!(inv_mod(s, m).unwrap(), r);
        }
    }

    #[test]
    fn inv_mod_errors_are_distinct() {
        assert_eq!(inv_mod(g(1, 1), g(2, 0)), Err(GaussError::NotInvertible { r: g(1, 1), m: g(2, 0) }));
        assert_eq!(inv_mod(g(1, 1), GaussInt::ZERO), Err(GaussError::ZeroModulus));
    }

    #[test]
    fn factor_examples() {
        let two = factor(g(2, 0)).unwrap();
        assert_eq!(two.prime_powers, vec![(g(1, 1), 2)]);
        assert_eq!(two.product(), g(2, 0));
        assert!(two.unit.is_unit());
        assert_eq!(factor(g(1, 1)).unwrap().prime_powers, vec![(g(1, 1), 1)]);
        assert_eq!(factor(g(9, 0)).unwrap().prime_powers, vec![(g(3, 0), 2)]);
        let five = factor(g(5, 0)).unwrap();
        assert_eq!(five.prime_powers, vec![(g(1, 2), 1), (g(2, 1), 1)]);
        assert_eq!(five.product(), g(5, 0));
        assert!(matches!(factor(g(1 << 26, 0)), Err(GaussError::FactorRange { .. })));
    }

    #[test]
    fn divisor_count_examples() {
        assert_eq!(divisor_count(GaussInt::ONE).unwrap(), 1);
        assert_eq!(divisor_count(g(2, 0)).unwrap(), 3);
        assert_eq!(divisor_count(g(3, 0)).unwrap(), 2);
    }

    #[test]
    fn nearest_distance_examples() {
        let d = nearest_gaussian_distance(Complex64::new(0.5, 0.5));
        assert!((d - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(nearest_gaussian_distance(Complex64::new(-3.0, 7.0)), 0.0);
        assert_eq!(nearest_gaussian_distance(Complex64::new(0.25, 0.0)), 0.25);
        // exact form: (3 + 5i)/4 is 1/4 + i/4 away from 1 + i
        assert_eq!(torus_distance_sq_scaled((3, 5), 4), 2);
    }

    #[test]
    fn display_forms() {
        assert_eq!(g(3, 4).to_string(), "3+4i");
        assert_eq!(g(2, -1).to_string(), "2-i");
        assert_eq!(g(0, -1).to_string(), "-i");
        assert_eq!(g(-5, 0).to_string(), "-5");
    }
}
