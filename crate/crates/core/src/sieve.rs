//! Moduli families, coefficient sequences, the sieve sum `T` and the
//! comparison bounds.
//!
//! `T` is the double sum of `|Σ a_n e(Re(n r / m))|²` over the moduli `m` of a
//! family and the reduced residues `r` modulo `m`. It is computed in two
//! independent ways: with the phase `Re(n·r·m̄)/N(m)` reduced exactly modulo 1,
//! and with the real inner product of `n` against the torus embedding of
//! `r/m`. The two must agree to rounding.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussint::{coprime, GaussError, GaussInt};
use crate::spacing::{farey_points, FareyPoint};
use crate::sum::{e, e_rational, Compensated, CompensatedComplex};
use crate::weights::kappa;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SieveError {
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error("{what} needs {needed} units of work, budget is {limit}")]
    Budget {
        what: &'static str,
        needed: u64,
        limit: u64,
    },
    #[error("N must be at least 1, got {0}")]
    BadN(f64),
    #[error("extremal coefficients need gcd({r0}, {q0}) = 1")]
    ExtremalNotCoprime { r0: GaussInt, q0: GaussInt },
    #[error("coefficient at {n} lies outside the disk N(n) <= {n_max}")]
    OutsideSupport { n: GaussInt, n_max: f64 },
    #[error("power exponent must be at least 1")]
    BadExponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    All,
    Squares,
    Power(u32),
    SquareNorm,
}

impl FamilyKind {
    /// The exponent applied to each base modulus.
    pub fn exponent(self) -> u32 {
        match self {
            FamilyKind::All | FamilyKind::SquareNorm => 1,
            FamilyKind::Squares => 2,
            FamilyKind::Power(k) => k,
        }
    }

    pub fn label(self) -> String {
        match self {
            FamilyKind::All => "all".into(),
            FamilyKind::Squares => "squares".into(),
            FamilyKind::Power(k) => format!("power{k}"),
            FamilyKind::SquareNorm => "square_norm".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusRange {
    /// `1 ≤ N(q) ≤ Q`.
    Full(u64),
    /// `Q/2 < N(q) ≤ Q`.
    Dyadic(u64),
}

impl ModulusRange {
    pub fn q(self) -> u64 {
        match self {
            ModulusRange::Full(q) | ModulusRange::Dyadic(q) => q,
        }
    }

    fn contains(self, norm: u64, limit: u64) -> bool {
        match self {
            ModulusRange::Full(_) => (1..=limit).contains(&norm),
            ModulusRange::Dyadic(_) => 2 * norm > limit && norm <= limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociatesPolicy {
    /// Every nonzero `q`, so each ideal appears four times.
    #[default]
    Literal,
    /// One canonical associate per ideal.
    UpToUnits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliFamily {
    pub kind: FamilyKind,
    pub range: ModulusRange,
    pub associates: AssociatesPolicy,
}

/// A base `q` and the modulus actually used (`q^k`, or `q` itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    pub base: GaussInt,
    pub modulus: GaussInt,
}

fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt().round() as u64;
    (r.saturating_sub(1)..=r + 1).any(|s| s * s == n)
}

impl ModuliFamily {
    pub fn new(kind: FamilyKind, range: ModulusRange, associates: AssociatesPolicy) -> Self {
        ModuliFamily {
            kind,
            range,
            associates,
        }
    }

    /// Bound on the norm of a base modulus.
    fn base_norm_limit(&self) -> u64 {
        let q = self.range.q();
        match self.kind {
            FamilyKind::SquareNorm => q * q,
            _ => q,
        }
    }

    /// Effective bound on the norm of the moduli themselves: `Q^k` for
    /// power families, `Q²` for square-norm, `Q` otherwise.
    pub fn modulus_norm_bound(&self) -> f64 {
        let q = self.range.q() as f64;
        match self.kind {
            FamilyKind::SquareNorm => q * q,
            kind => q.powi(kind.exponent() as i32),
        }
    }

    /// The moduli of the family, ordered by base norm and then `(re, im)`.
    pub fn moduli(&self) -> Result<Vec<Modulus>, SieveError> {
        let k = self.kind.exponent();
        if k == 0 {
            return Err(SieveError::BadExponent);
        }
        let limit = self.base_norm_limit();
        let side = (limit as f64).sqrt().floor() as i64 + 1;
        let mut bases = Vec::new();
        for re in -side..=side {
            for im in -side..=side {
                let q = GaussInt::new(re, im);
                let n = q.norm();
                if !self.range.contains(n, limit) {
                    continue;
                }
                if self.kind == FamilyKind::SquareNorm && !is_square(n) {
                    continue;
                }
                if self.associates == AssociatesPolicy::UpToUnits && q.canonical() != q {
                    continue;
                }
                bases.push(q);
            }
        }
        bases.sort_by_key(|q| (q.norm(), q.re, q.im));
        Ok(bases
            .into_iter()
            .map(|base| Modulus {
                base,
                modulus: base.pow(k),
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    AllOnes,
    Random { seed: u64 },
    Extremal { r0: GaussInt, q0: GaussInt, k: u32 },
    Custom,
}

/// Coefficients `a_n` supported on `N(n) ≤ N`, stored in canonical order
/// (by norm, then `(re, im)`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeq {
    n_max: f64,
    entries: Vec<(GaussInt, Complex64)>,
    z: f64,
    provenance: Provenance,
}

/// The Gaussian integers with `N(n) ≤ N`, in canonical order.
pub fn disk_support(n_max: f64) -> Vec<GaussInt> {
    let side = n_max.sqrt().floor() as i64;
    let mut out: Vec<GaussInt> = (-side..=side)
        .flat_map(|s| (-side..=side).map(move |t| GaussInt::new(s, t)))
        .filter(|n| n.norm() as f64 <= n_max)
        .collect();
    out.sort_by_key(|n| (n.norm(), n.re, n.im));
    out
}

impl CoefficientSeq {
    /// Custom coefficients; the support condition is checked.
    pub fn custom(
        n_max: f64,
        entries: Vec<(GaussInt, Complex64)>,
    ) -> Result<Self, SieveError> {
        if !(n_max >= 1.0) {
            return Err(SieveError::BadN(n_max));
        }
        let mut entries = entries;
        if let Some(&(n, _)) = entries.iter().find(|(n, _)| n.norm() as f64 > n_max) {
            return Err(SieveError::OutsideSupport { n, n_max });
        }
        entries.sort_by_key(|(n, _)| (n.norm(), n.re, n.im));
        Ok(Self::build(n_max, entries, Provenance::Custom))
    }

    fn build(n_max: f64, entries: Vec<(GaussInt, Complex64)>, provenance: Provenance) -> Self {
        let z = entries.iter().map(|(_, a)| a.norm_sqr()).collect::<Compensated>().value();
        CoefficientSeq {
            n_max,
            entries,
            z,
            provenance,
        }
    }

    pub fn n_max(&self) -> f64 {
        self.n_max
    }

    pub fn entries(&self) -> &[(GaussInt, Complex64)] {
        &self.entries
    }

    /// `Z = Σ |a_n|²`.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn l1(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm()).collect::<Compensated>().value()
    }
}

/// Builds a coefficient sequence on `N(n) ≤ N`.
///
/// Random coefficients come from ChaCha8 seeded with `seed_from_u64(seed)`,
/// drawn in canonical order: modulus uniform on `[0, 1)`, then phase uniform
/// on `[0, 1)`.
pub fn make_coefficients(kind: Provenance, n_max: f64) -> Result<CoefficientSeq, SieveError> {
    if !(n_max >= 1.0) {
        return Err(SieveError::BadN(n_max));
    }
    let support = disk_support(n_max);
    let entries = match kind {
        Provenance::AllOnes => support
            .into_iter()
            .map(|n| (n, Complex64::new(1.0, 0.0)))
            .collect(),
        Provenance::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            support
                .into_iter()
                .map(|n| {
                    let modulus: f64 = rng.random();
                    let phase: f64 = rng.random();
                    (n, e(phase) * modulus)
                })
                .collect()
        }
        Provenance::Extremal { r0, q0, k } => {
            if !coprime(r0, q0) {
                return Err(SieveError::ExtremalNotCoprime { r0, q0 });
            }
            let m = q0.pow(k);
            support
                .into_iter()
                .map(|n| {
                    let (num, den) = phase_fraction(n, r0, m);
                    (n, e_rational(-num, den))
                })
                .collect()
        }
        Provenance::Custom => panic!("use CoefficientSeq::custom for custom coefficients"),
    };
    Ok(CoefficientSeq::build(n_max, entries, kind))
}

/// `Re(n·r/m)` as the exact fraction `Re(n·r·m̄) / N(m)`.
pub fn phase_fraction(n: GaussInt, r: GaussInt, m: GaussInt) -> (i128, i128) {
    let (a, b) = n.mul_wide(r);
    let num = a * m.re as i128 + b * m.im as i128;
    (num, m.norm_u128() as i128)
}

/// `Σ a_n e(Re(n r / m))` with exact phase reduction.
pub fn trig_sum(a: &CoefficientSeq, r: GaussInt, m: GaussInt) -> Result<Complex64, SieveError> {
    if m.is_zero() {
        return Err(GaussError::ZeroModulus.into());
    }
    Ok(a.entries
        .iter()
        .map(|&(n, an)| {
            let (num, den) = phase_fraction(n, r, m);
            an * e_rational(num, den)
        })
        .collect::<CompensatedComplex>()
        .value())
}

/// `Σ a_n e(n·x)` for a point `x` of the torus, in floating point.
pub fn trig_sum_at(a: &CoefficientSeq, x: [f64; 2]) -> Complex64 {
    a.entries
        .iter()
        .map(|&(n, an)| an * e(n.re as f64 * x[0] + n.im as f64 * x[1]))
        .collect::<CompensatedComplex>()
        .value()
}

/// How the phases of `T` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseForm {
    /// `Re(n r / m)` reduced modulo 1 in exact arithmetic.
    ExactRational,
    /// `(s, t)·((xu+yv)/N(q), (xv−yu)/N(q))` in floating point.
    Vector,
}

/// Work limits for the enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_points: u64,
    pub max_terms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_points: 400_000,
            max_terms: 2_000_000_000,
        }
    }
}

/// `T` over an explicit list of points, one `|trig_sum|²` per point, summed in
/// list order.
pub fn t_over_points(
    points: &[FareyPoint],
    a: &CoefficientSeq,
    form: PhaseForm,
    budget: &Budget,
) -> Result<f64, SieveError> {
    let needed = points.len() as u64 * a.entries.len() as u64;
    if needed > budget.max_terms {
        return Err(SieveError::Budget {
            what: "sieve sum",
            needed,
            limit: budget.max_terms,
        });
    }
    let terms: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let s = match form {
                PhaseForm::ExactRational => trig_sum(a, p.r, p.q).expect("nonzero modulus"),
                PhaseForm::Vector => trig_sum_at(a, p.embedding_f64()),
            };
            s.norm_sqr()
        })
        .collect();
    Ok(terms.into_iter().collect::<Compensated>().value())
}

/// The sieve sum `T` of a family against coefficients `a`.
pub fn lhs_t(
    family: &ModuliFamily,
    a: &CoefficientSeq,
    form: PhaseForm,
    budget: &Budget,
) -> Result<f64, SieveError> {
    let points = farey_points(family, budget)?;
    t_over_points(&points, a, form, budget)
}

/// The comparison bounds, each `C·(QN)^ε·formula·Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// `Q² + N`.
    pub huxley: f64,
    /// `Q³ + Q²√N + √Q·N`.
    pub thm1: f64,
    /// `Q^{k+1} + N·Q^{1−1/κ} + N^{1−1/κ}·Q^{1+k/κ}`.
    pub thm2: f64,
    /// `N + Q^{k+1}`.
    pub conj: f64,
    /// `Q³ + Q²√N + √Q·N`, the square-norm bound.
    pub square_norm: f64,
}

impl Bounds {
    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("huxley", self.huxley),
            ("thm1", self.thm1),
            ("thm2", self.thm2),
            ("conj", self.conj),
            ("square_norm", self.square_norm),
        ]
    }
}

pub fn bounds(q: f64, n: f64, z: f64, k: u32, eps: f64, c: f64) -> Bounds {
    assert!(q >= 1.0 && n >= 1.0 && z >= 0.0 && k >= 1, "bad bound inputs");
    let kap = kappa(k) as f64;
    let kf = k as f64;
    let scale = c * (q * n).powf(eps) * z;
    let thm1 = q.powi(3) + q * q * n.sqrt() + q.sqrt() * n;
    Bounds {
        huxley: scale * (q * q + n),
        thm1: scale * thm1,
        thm2: scale
            * (q.powf(kf + 1.0)
                + n * q.powf(1.0 - 1.0 / kap)
                + n.powf(1.0 - 1.0 / kap) * q.powf(1.0 + kf / kap)),
        conj: scale * (n + q.powf(kf + 1.0)),
        square_norm: scale * thm1,
    }
}

/// `(π⁴/4)·K·N·Z`.
pub fn ls_explicit_bound(k_count: u64, n: f64, z: f64) -> f64 {
    PI.powi(4) / 4.0 * k_count as f64 * n * z
}

/// One row of experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveReport {
    pub family: String,
    pub k: u32,
    pub q: u64,
    pub n: f64,
    pub seed: Option<u64>,
    pub coeffs: String,
    pub points: u64,
    pub k_euclid: u64,
    pub k_sup: u64,
    pub k_norm: u64,
    pub t: f64,
    pub z: f64,
    pub bound_huxley: f64,
    pub bound_thm1: f64,
    pub bound_thm2: f64,
    pub bound_conj: f64,
    pub bound_ls_explicit: f64,
}

impl SieveReport {
    pub fn ratio(&self, bound: f64) -> f64 {
        self.t / bound
    }

    /// Ratios in the fixed order huxley, thm1, thm2, conj, ls_explicit.
    pub fn ratios(&self) -> [f64; 5] {
        [
            self.ratio(self.bound_huxley),
            self.ratio(self.bound_thm1),
            self.ratio(self.bound_thm2),
            self.ratio(self.bound_conj),
            self.ratio(self.bound_ls_explicit),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn fam(kind: FamilyKind, range: ModulusRange) -> ModuliFamily {
        ModuliFamily::new(kind, range, AssociatesPolicy::Literal)
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bounds(4.0, 9.0, 1.0, 1, 0.0, 1.0).huxley, 25.0);
        assert_eq!(bounds(4.0, 16.0, 1.0, 2, 0.0, 1.0).thm1, 160.0);
        assert_eq!(bounds(1.0, 1.0, 1.0, 2, 0.0, 1.0).thm2, 3.0);
        // with κ = 2 the k = 2 bound has the same shape as the first one
        for (q, n) in [(4.0, 16.0), (3.0, 7.0), (10.0, 2.5)] {
            let b = bounds(q, n, 1.0, 2, 0.0, 1.0);
            assert!((b.thm2 - b.thm1).abs() < 1e-9 * b.thm1);
        }
    }

    #[test]
    fn all_ones_support_and_energy() {
        let a = make_coefficients(Provenance::AllOnes, 2.0).unwrap();
        assert_eq!(a.entries().len(), 9);
        assert_eq!(a.z(), 9.0);
    }

    #[test]
    fn random_is_reproducible() {
        let a = make_coefficients(Provenance::Random { seed: 7 }, 10.0).unwrap();
        let b = make_coefficients(Provenance::Random { seed: 7 }, 10.0).unwrap();
        let c = make_coefficients(Provenance::Random { seed: 8 }, 10.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.entries().iter().all(|(_, x)| x.norm() <= 1.0));
    }

    #[test]
    fn extremal_term_is_full() {
        let (r0, q0) = (g(1, 0), g(2, 1));
        let a = make_coefficients(Provenance::Extremal { r0, q0, k: 2 }, 12.0).unwrap();
        let s = trig_sum(&a, r0, q0.pow(2)).unwrap();
        let count = a.entries().len() as f64;
        assert!((s.norm_sqr() - count * count).abs() < 1e-9);
        assert!(make_coefficients(Provenance::Extremal { r0: g(1, 1), q0: g(2, 0), k: 2 }, 4.0).is_err());
    }

    #[test]
    fn trig_sum_trivial_modulus_and_singleton() {
        let a = make_coefficients(Provenance::AllOnes, 5.0).unwrap();
        let s = trig_sum(&a, g(3, -2), GaussInt::ONE).unwrap();
        assert!((s - Complex64::new(21.0, 0.0)).norm() < 1e-12);
        let one = CoefficientSeq::custom(5.0, vec![(g(1, 2), Complex64::new(0.0, 2.0))]).unwrap();
        let s = trig_sum(&one, g(1, 1), g(2, 1)).unwrap();
        assert!((s.norm() - 2.0).abs() < 1e-12);
        assert!(trig_sum(&a, g(1, 0), GaussInt::ZERO).is_err());
        assert!(CoefficientSeq::custom(1.0, vec![(g(1, 1), Complex64::new(1.0, 0.0))]).is_err());
    }

    #[test]
    fn moduli_counts() {
        let all = fam(FamilyKind::All, ModulusRange::Dyadic(2)).moduli().unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|m| m.base.norm() == 2));
        let sq = fam(FamilyKind::Squares, ModulusRange::Full(2)).moduli().unwrap();
        assert_eq!(sq.len(), 8);
        assert!(sq.iter().all(|m| m.modulus == m.base * m.base));
        let sn = fam(FamilyKind::SquareNorm, ModulusRange::Full(3)).moduli().unwrap();
        assert!(sn.iter().all(|m| is_square(m.base.norm()) && m.base.norm() <= 9));
        let units = ModuliFamily::new(
            FamilyKind::All,
            ModulusRange::Full(5),
            AssociatesPolicy::UpToUnits,
        );
        assert!(units.moduli().unwrap().iter().all(|m| m.base.canonical() == m.base));
    }

    #[test]
    fn only_units_gives_parseval_anchor() {
        let a = make_coefficients(Provenance::Random { seed: 3 }, 9.0).unwrap();
        let total: Complex64 = a.entries().iter().map(|(_, x)| x).sum();
        let family = fam(FamilyKind::All, ModulusRange::Full(1));
        let t = lhs_t(&family, &a, PhaseForm::ExactRational, &Budget::default()).unwrap();
        assert!((t - 4.0 * total.norm_sqr()).abs() < 1e-9 * t.max(1.0));
    }

    #[test]
    fn single_modulus_singleton() {
        let a = CoefficientSeq::custom(1.0, vec![(GaussInt::ONE, Complex64::new(0.6, 0.8))]).unwrap();
        let family = ModuliFamily::new(
            FamilyKind::All,
            ModulusRange::Dyadic(2),
            AssociatesPolicy::UpToUnits,
        );
        let t = lhs_t(&family, &a, PhaseForm::ExactRational, &Budget::default()).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_forms_agree() {
        for kind in [FamilyKind::All, FamilyKind::Squares, FamilyKind::Power(3)] {
            let family = fam(kind, ModulusRange::Full(4));
            let a = make_coefficients(Provenance::Random { seed: 11 }, 20.0).unwrap();
            let budget = Budget::default();
            let t1 = lhs_t(&family, &a, PhaseForm::ExactRational, &budget).unwrap();
            let t2 = lhs_t(&family, &a, PhaseForm::Vector, &budget).unwrap();
            assert!((t1 - t2).abs() <= 1e-10 * t1.max(1.0), "{kind:?}: {t1} vs {t2}");
        }
    }

    #[test]
    fn budget_guard_trips() {
        let family = fam(FamilyKind::All, ModulusRange::Full(10));
        let a = make_coefficients(Provenance::AllOnes, 10.0).unwrap();
        let tiny = Budget {
            max_points: 1_000_000,
            max_terms: 10,
        };
        assert!(matches!(
            lhs_t(&family, &a, PhaseForm::ExactRational, &tiny),
            Err(SieveError::Budget { .. })
        ));
    }
}
