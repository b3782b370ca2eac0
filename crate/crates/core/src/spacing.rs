//! The clustering count `K` of the sample points `r/q` on the torus.
//!
//! A point `r/q` with `q = u + iv`, `r = x + iy` embeds as
//! `((xu + yv)/N(q), (xv − yu)/N(q))`, the coordinates of `r̄/q̄`. Three
//! counts are provided:
//!
//! - [`k_euclid`]: neighbours within torus distance `√(2/N)`,
//! - [`k_sup`]: neighbours within sup-distance `N^{−1/2}`,
//! - [`k_norm`]: the norm-form criterion `N·N(r1q2 − r2q1 − z q1q2) ≤ 2N(q1)N(q2)`.
//!
//! Every comparison is exact. `N` is carried as a rational.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::gaussint::{coprime, residue_system, torus_distance_sq_scaled, GaussInt};
use crate::sieve::{t_over_points, Budget, CoefficientSeq, ModuliFamily, PhaseForm, SieveError};

/// An exact positive rational `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    pub fn integer(n: u64) -> Self {
        Ratio {
            num: n as u128,
            den: 1,
        }
    }

    /// The exact value of a finite positive `f64`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite() && x > 0.0, "N must be finite and positive");
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1 << 52) - 1);
        let (mut mant, mut e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), exp - 1075)
        };
        while e < 0 && mant & 1 == 0 {
            mant >>= 1;
            e += 1;
        }
        assert!((-120..=60).contains(&e), "N = {x} is outside the supported range");
        if e >= 0 {
            Ratio {
                num: (mant as u128) << e,
                den: 1,
            }
        } else {
            Ratio {
                num: mant as u128,
                den: 1u128 << -e,
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// A reduced fraction `r/q` for a modulus `q` of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FareyPoint {
    pub r: GaussInt,
    /// The full modulus (`q^k` for power families).
    pub q: GaussInt,
    /// The base `q` whose coprimality with `r` defines reducedness.
    pub base: GaussInt,
}

impl FareyPoint {
    /// Numerators `(xu + yv, xv − yu)` of the embedding over [`Self::den`].
    pub fn embedding_num(&self) -> (i128, i128) {
        let (x, y) = (self.r.re as i128, self.r.im as i128);
        let (u, v) = (self.q.re as i128, self.q.im as i128);
        (x * u + y * v, x * v - y * u)
    }

    pub fn den(&self) -> i128 {
        self.q.norm_u128() as i128
    }

    pub fn embedding_f64(&self) -> [f64; 2] {
        let (a, b) = self.embedding_num();
        let d = self.den() as f64;
        [a as f64 / d, b as f64 / d]
    }
}

/// All `(r, q)` with `q` in the family and `r` a reduced residue modulo the
/// full modulus, ordered by modulus and then by residue.
pub fn farey_points(family: &ModuliFamily, budget: &Budget) -> Result<Vec<FareyPoint>, SieveError> {
    let moduli = family.moduli()?;
    let needed: u64 = moduli.iter().map(|m| m.modulus.norm()).sum();
    if needed > budget.max_points {
        return Err(SieveError::Budget {
            what: "point enumeration",
            needed,
            limit: budget.max_points,
        });
    }
    let per_modulus: Result<Vec<Vec<FareyPoint>>, SieveError> = moduli
        .par_iter()
        .map(|m| {
            let sys = residue_system(m.modulus, false)?;
            Ok(sys
                .representatives
                .into_iter()
                .filter(|&r| coprime(r, m.base))
                .map(|r| FareyPoint {
                    r,
                    q: m.modulus,
                    base: m.base,
                })
                .collect())
        })
        .collect();
    Ok(per_modulus?.into_iter().flatten().collect())
}

/// Scaled difference of two embeddings: numerators over `D_i·D_j`.
fn scaled_difference(p: &FareyPoint, q: &FareyPoint) -> ((i128, i128), i128) {
    let (a1, b1) = p.embedding_num();
    let (a2, b2) = q.embedding_num();
    let (d1, d2) = (p.den(), q.den());
    ((a1 * d2 - a2 * d1, b1 * d2 - b2 * d1), d1 * d2)
}

/// Torus distance² ≤ 2/N, exactly.
pub fn euclid_close(p: &FareyPoint, q: &FareyPoint, n: Ratio) -> bool {
    let (w, d) = scaled_difference(p, q);
    let dist = torus_distance_sq_scaled(w, d);
    let d2 = (d * d) as u128;
    dist * n.num <= 2 * n.den * d2
}

/// Sup-distance ≤ N^{−1/2}, exactly.
pub fn sup_close(p: &FareyPoint, q: &FareyPoint, n: Ratio) -> bool {
    use crate::gaussint::centered_residue;
    let ((w0, w1), d) = scaled_difference(p, q);
    let c = centered_residue(w0, d).abs().max(centered_residue(w1, d).abs()) as u128;
    let d2 = (d * d) as u128;
    c * c * n.num <= n.den * d2
}

/// `min_z N·N(r1q2 − r2q1 − z·q1q2) ≤ 2·N(q1)·N(q2)`, exactly.
pub fn norm_close(p: &FareyPoint, q: &FareyPoint, n: Ratio) -> bool {
    let w = p.r * q.q - q.r * p.q;
    let m = p.q * q.q;
    let (wr, wi) = w.mul_wide(m.conj());
    let nm = m.norm_u128() as i128;
    // nearest Gaussian integer to w/m, then its 3×3 neighbourhood
    let z0 = (
        (2 * wr + nm).div_euclid(2 * nm),
        (2 * wi + nm).div_euclid(2 * nm),
    );
    let mut best = u128::MAX;
    for dx in -1..=1 {
        for dy in -1..=1 {
            let z = GaussInt::new((z0.0 + dx) as i64, (z0.1 + dy) as i64);
            best = best.min((w - z * m).norm_u128());
        }
    }
    best * n.num <= 2 * p.den() as u128 * q.den() as u128 * n.den
}

fn max_neighbours(points: &[FareyPoint], close: impl Fn(&FareyPoint, &FareyPoint) -> bool + Sync) -> u64 {
    points
        .par_iter()
        .map(|p| points.iter().filter(|q| close(p, q)).count() as u64)
        .max()
        .unwrap_or(0)
}

/// `max_i #{j : ‖x_j − x_i‖ ≤ √(2/N)}` on the torus, by direct pair scan.
pub fn k_euclid(points: &[FareyPoint], n: Ratio) -> u64 {
    max_neighbours(points, |p, q| euclid_close(p, q, n))
}

/// The sup-norm count `K'`; never exceeds [`k_euclid`].
pub fn k_sup(points: &[FareyPoint], n: Ratio) -> u64 {
    max_neighbours(points, |p, q| sup_close(p, q, n))
}

/// The norm-form count; equal to [`k_euclid`].
pub fn k_norm(points: &[FareyPoint], n: Ratio) -> u64 {
    max_neighbours(points, |p, q| norm_close(p, q, n))
}

fn isqrt(x: u128) -> u128 {
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// [`k_euclid`] through a uniform grid of cells of side at least `√(2/N)`.
/// Produces the same count as the pair scan.
pub fn k_euclid_bucketed(points: &[FareyPoint], n: Ratio) -> u64 {
    // largest G with G² ≤ N/2, so that 1/G ≥ √(2/N)
    let g = isqrt(n.num / (2 * n.den)) as i128;
    if g < 3 {
        return k_euclid(points, n);
    }
    let cell = |p: &FareyPoint| -> (i128, i128) {
        let (a, b) = p.embedding_num();
        let d = p.den();
        (a.rem_euclid(d) * g / d, b.rem_euclid(d) * g / d)
    };
    let gu = g as usize;
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); gu * gu];
    let cells: Vec<(i128, i128)> = points.iter().map(cell).collect();
    for (idx, &(cx, cy)) in cells.iter().enumerate() {
        grid[cx as usize * gu + cy as usize].push(idx);
    }
    points
        .par_iter()
        .zip(cells.par_iter())
        .map(|(p, &(cx, cy))| {
            let mut count = 0u64;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let nx = (cx + dx).rem_euclid(g) as usize;
                    let ny = (cy + dy).rem_euclid(g) as usize;
                    count += grid[nx * gu + ny]
                        .iter()
                        .filter(|&&j| euclid_close(p, &points[j], n))
                        .count() as u64;
                }
            }
            count
        })
        .max()
        .unwrap_or(0)
}

/// Result of checking `T ≤ (π⁴/4)·K·N·Z` on a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsCheck {
    pub t: f64,
    pub k: u64,
    pub bound: f64,
    pub ratio: f64,
}

/// `T` over `points` against the explicit bound `(π⁴/4)·K_euclid·N·Z`.
pub fn theorem_ls_check(
    points: &[FareyPoint],
    a: &CoefficientSeq,
    budget: &Budget,
) -> Result<LsCheck, SieveError> {
    let n = a.n_max();
    let k = k_euclid_bucketed(points, Ratio::from_f64(n));
    let t = t_over_points(points, a, PhaseForm::ExactRational, budget)?;
    let bound = PI.powi(4) / 4.0 * k as f64 * n * a.z();
    Ok(LsCheck {
        t,
        k,
        bound,
        ratio: t / bound,
    })
}

/// The smoothed count for a fixed `(q1, r1)`, in both of its forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedCount {
    /// `Σ_{q2} Ψ2(q2/√Q) Σ_{b ≡ r1q2 mod q1} Ψ1(b√N / (|q1|√(2Q)))`.
    pub direct: f64,
    /// `(2Q/N) Σ_j Ψ1(j√(2Q)/√N) Σ_{q2} Ψ2(q2/√Q) e(Re(j r1 q2 / q1))`.
    pub dual: f64,
    /// Certified bound on the mass dropped from either side.
    pub tail: f64,
}

/// The smoothed count over the moduli `q2s`, with `Ψ1 = Ψ2 = exp(−π N(·))`,
/// computed directly over the shifted modulus lattice and through its dual.
pub fn smoothed_count(
    q2s: &[GaussInt],
    q1: GaussInt,
    r1: GaussInt,
    n: f64,
    q: f64,
    tol: f64,
) -> Result<SmoothedCount, crate::lattice::LatticeError> {
    use crate::lattice::{
        lattice_tail_bound, points_in_disk, truncation_radius, Lattice2, ShiftedLattice,
    };
    use crate::sieve::phase_fraction;
    use crate::sum::{e_rational, Compensated, CompensatedComplex};

    let lat = Lattice2::from_modulus(q1)?;
    let scale2 = n / (q1.norm() as f64 * 2.0 * q);
    let psi2 = |z: GaussInt| (-PI * z.norm() as f64 / q).exp();
    let weights: Vec<f64> = q2s.iter().map(|&z| psi2(z)).collect();
    let mass: f64 = weights.iter().sum();
    let target = tol / (2.0 * mass.max(1.0));

    let h_direct = |r: f64| (-PI * scale2 * r * r).exp();
    let r_direct = truncation_radius(&lat, target, h_direct)?;
    let mut direct = Compensated::default();
    for (&q2, &w) in q2s.iter().zip(&weights) {
        let c = crate::gaussint::reduce_mod(r1 * q2, q1).expect("nonzero modulus");
        let shifted = ShiftedLattice::new(lat, [c.re as f64, c.im as f64]);
        let inner: Compensated = points_in_disk(&shifted, r_direct)
            .iter()
            .map(|b| h_direct((b[0] * b[0] + b[1] * b[1]).sqrt()))
            .collect();
        direct.add(w * inner.value());
    }

    let std = Lattice2::standard();
    let pref = 2.0 * q / n;
    let h_dual = |r: f64| pref * (-PI * 2.0 * q / n * r * r).exp();
    let r_dual = truncation_radius(&std, target, h_dual)?;
    let mut dual = CompensatedComplex::default();
    for jv in points_in_disk(&ShiftedLattice::unshifted(std), r_dual) {
        let j = GaussInt::new(jv[0].round() as i64, jv[1].round() as i64);
        let hat = h_dual(((j.norm()) as f64).sqrt());
        for (&q2, &w) in q2s.iter().zip(&weights) {
            let (num, den) = phase_fraction(j, r1 * q2, q1);
            dual.add(e_rational(num, den) * (w * hat));
        }
    }
    let tail = mass * (lattice_tail_bound(&lat, r_direct, h_direct) + lattice_tail_bound(&std, r_dual, h_dual));
    Ok(SmoothedCount {
        direct: direct.value(),
        dual: dual.value().re,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussint::reduce_mod;
    use crate::sieve::{make_coefficients, AssociatesPolicy, FamilyKind, ModulusRange, Provenance};

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn family(kind: FamilyKind, range: ModulusRange) -> ModuliFamily {
        ModuliFamily::new(kind, range, AssociatesPolicy::Literal)
    }

    #[test]
    fn ratio_is_exact() {
        assert_eq!(Ratio::from_f64(16.0), Ratio::integer(16));
        assert_eq!(Ratio::from_f64(0.375), Ratio { num: 3, den: 8 });
        assert_eq!(Ratio::from_f64(2.5).to_f64(), 2.5);
    }

    #[test]
    fn dyadic_two_points() {
        let pts = farey_points(&family(FamilyKind::All, ModulusRange::Dyadic(2)), &Budget::default()).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| p.q.norm() == 2));
    }

    #[test]
    fn count_matches_phi() {
        use crate::gaussint::gaussian_phi;
        let fam = family(FamilyKind::Squares, ModulusRange::Full(5));
        let pts = farey_points(&fam, &Budget::default()).unwrap();
        let expect: u64 = fam.moduli().unwrap().iter().map(|m| gaussian_phi(m.modulus).unwrap()).sum();
        assert_eq!(pts.len() as u64, expect);
    }

    #[test]
    fn single_point_and_limits() {
        let p = FareyPoint {
            r: GaussInt::ZERO,
            q: GaussInt::ONE,
            base: GaussInt::ONE,
        };
        assert_eq!(k_euclid(&[p], Ratio::integer(1)), 1);
        assert_eq!(k_sup(&[p], Ratio::integer(1)), 1);
        let pts = farey_points(&family(FamilyKind::All, ModulusRange::Full(5)), &Budget::default()).unwrap();
        assert_eq!(k_euclid(&pts, Ratio::integer(1)), pts.len() as u64);
        // huge N leaves only coincident embeddings
        let big = Ratio::integer(1 << 40);
        let coincide = pts
            .iter()
            .map(|p| pts.iter().filter(|q| q.embedding_num_reduced() == p.embedding_num_reduced()).count())
            .max()
            .unwrap() as u64;
        assert_eq!(k_euclid(&pts, big), coincide);
    }

    impl FareyPoint {
        fn embedding_num_reduced(&self) -> (i128, i128, i128) {
            // the point as a reduced fraction on the torus, for equality tests
            let (a, b) = self.embedding_num();
            let d = self.den();
            let (a, b) = (a.rem_euclid(d), b.rem_euclid(d));
            let gg = gcd3(a, b, d);
            (a / gg, b / gg, d / gg)
        }
    }

    fn gcd3(a: i128, b: i128, c: i128) -> i128 {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        gcd(gcd(a, b), c)
    }

    #[test]
    fn sup_boundary_counts() {
        // offset (1/4, 1/4) with N = 16: sup distance 1/4 = N^{-1/2}
        let p = FareyPoint { r: GaussInt::ZERO, q: GaussInt::ONE, base: GaussInt::ONE };
        let q = FareyPoint { r: g(1, -1), q: g(4, 0), base: g(2, 0) };
        assert_eq!(q.embedding_num(), (4, 4));
        assert!(sup_close(&p, &q, Ratio::integer(16)));
        assert!(euclid_close(&p, &q, Ratio::integer(16)));
        assert!(!sup_close(&p, &q, Ratio::integer(17)));
    }

    #[test]
    fn same_modulus_distinct_residues_separate_for_large_n() {
        for q in [g(1, 1), g(2, 0), g(2, 1), g(1, 2)] {
            let sys = residue_system(q, false).unwrap();
            let pts: Vec<FareyPoint> = sys
                .representatives
                .iter()
                .map(|&r| FareyPoint { r, q, base: q })
                .collect();
            let n = Ratio::integer(2 * q.norm() + 1);
            for (i, a) in pts.iter().enumerate() {
                for (j, b) in pts.iter().enumerate() {
                    assert_eq!(norm_close(a, b, n), i == j);
                }
            }
        }
    }

    #[test]
    fn formulations_agree_small_grid() {
        for kind in [FamilyKind::All, FamilyKind::Squares, FamilyKind::Power(3)] {
            for q in [2, 3, 4] {
                let pts = farey_points(&family(kind, ModulusRange::Full(q)), &Budget::default()).unwrap();
                for n in [4u64, 9, 16, 36, 64] {
                    let n = Ratio::integer(n);
                    let ke = k_euclid(&pts, n);
                    assert_eq!(ke, k_norm(&pts, n));
                    assert_eq!(ke, k_euclid_bucketed(&pts, n));
                    assert!(k_sup(&pts, n) <= ke);
                }
            }
        }
    }

    #[test]
    fn k_is_representative_invariant() {
        let pts = farey_points(&family(FamilyKind::Squares, ModulusRange::Full(3)), &Budget::default()).unwrap();
        let shifted: Vec<FareyPoint> = pts
            .iter()
            .map(|p| FareyPoint { r: p.r + p.q * g(2, -3), ..*p })
            .collect();
        for n in [9u64, 36] {
            let n = Ratio::integer(n);
            assert_eq!(k_euclid(&pts, n), k_euclid(&shifted, n));
            assert_eq!(k_norm(&pts, n), k_norm(&shifted, n));
        }
        assert!(shifted.iter().zip(&pts).all(|(s, p)| reduce_mod(s.r, s.q).unwrap() == p.r));
    }

    #[test]
    fn smoothed_count_forms_agree() {
        let fam = family(FamilyKind::Squares, ModulusRange::Full(4));
        let q2s: Vec<GaussInt> = fam.moduli().unwrap().iter().map(|m| m.modulus).collect();
        for (q1, r1) in [(g(1, 1), g(1, 0)), (g(2, 1), g(1, 1)), (g(3, 0), g(1, 2))] {
            for n in [4.0, 16.0, 64.0] {
                let s = smoothed_count(&q2s, q1, r1, n, 16.0, 1e-12).unwrap();
                assert!((s.direct - s.dual).abs() < 1e-10 + s.tail, "{q1} {n}: {s:?}");
            }
        }
    }

    #[test]
    fn explicit_bound_holds_squares_q3_n10() {
        let pts = farey_points(&family(FamilyKind::Squares, ModulusRange::Full(3)), &Budget::default()).unwrap();
        let a = make_coefficients(Provenance::AllOnes, 10.0).unwrap();
        let check = theorem_ls_check(&pts, &a, &Budget::default()).unwrap();
        assert!(check.ratio <= 1.0, "{check:?}");
    }
}
