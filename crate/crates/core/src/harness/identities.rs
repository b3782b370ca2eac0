//! The identity suite: every exact equality the experiments rely on, each
//! checked against an independent evaluation.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, FamilyName};
use super::table::{int, num, text};
use super::{weyl_cases, Outcome, Status, Table};
use crate::duality::{duality_check, ComplexMatrix};
use crate::gaussint::GaussInt;
use crate::lattice::{poisson_two_sides, Lattice2};
use crate::sieve::{make_coefficients, t_over_points, PhaseForm, Provenance};
use crate::spacing::{farey_points, k_euclid, k_euclid_bucketed, k_norm, k_sup, smoothed_count, Ratio};
use crate::weights::{fejer_hat, g_square, g_square_hat, numeric_fourier, psi1, CompletedSquare, WeightFn};
use crate::weylsum::{
    count_by_residue_classes, count_small_fractional, p_poly, s2_squared_differenced, s2_squared_poisson,
    s_direct, WeylConfig,
};

/// One identity: how many cases ran, the worst discrepancy, and whether any
/// case could not be evaluated at all.
struct Check {
    name: &'static str,
    cases: u64,
    worst: f64,
    tolerance: f64,
    broken: Option<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            cases: 0,
            worst: 0.0,
            tolerance,
            broken: None,
        }
    }

    fn record(&mut self, discrepancy: f64) {
        self.cases += 1;
        // NaN must not pass silently
        if !(discrepancy <= self.worst) {
            self.worst = discrepancy;
        }
    }

    fn fail(&mut self, why: impl ToString) {
        self.cases += 1;
        self.broken.get_or_insert_with(|| why.to_string());
    }

    fn passed(&self) -> bool {
        self.broken.is_none() && self.worst <= self.tolerance
    }
}

fn g(re: i64, im: i64) -> GaussInt {
    GaussInt::new(re, im)
}

fn poisson(cfg: &ExperimentConfig) -> Check {
    let mut c = Check::new("poisson_psi1", cfg.tol);
    let moduli = [g(1, 0), g(1, 1), g(2, 0), g(2, 1), g(3, 0), g(2, 3)];
    let shifts = [[0.0, 0.0], [0.3, -0.1], [0.5, 0.25]];
    let scales = [0.5, 1.0, 2.0];
    for q in moduli {
        let lat = Lattice2::from_modulus(q).expect("nonzero modulus");
        for shift in shifts {
            for scale in scales {
                match poisson_two_sides(&WeightFn::Psi1, &lat, shift, scale, cfg.tol) {
                    Ok(p) => c.record(p.discrepancy),
                    Err(e) => c.fail(e),
                }
            }
        }
    }
    c
}

fn poisson_differenced(cfg: &ExperimentConfig) -> Check {
    let mut c = Check::new("poisson_g_square", cfg.tol);
    for (alpha, q0) in [(g(1, 0), 5.0), (g(1, 2), 10.0), (g(-3, 1), 20.0)] {
        let w = g_square(alpha, q0);
        for q in [g(1, 0), g(2, 1)] {
            let lat = Lattice2::from_modulus(q).expect("nonzero modulus");
            for shift in [[0.0, 0.0], [0.25, 0.7]] {
                match poisson_two_sides(&w, &lat, shift, 1.5, cfg.tol) {
                    Ok(p) => c.record(p.discrepancy),
                    Err(e) => c.fail(e),
                }
            }
        }
    }
    c
}

fn duality(cfg: &ExperimentConfig) -> Check {
    let mut c = Check::new("duality", cfg.tol_duality);
    let found: Vec<f64> = (0..cfg.matrices)
        .into_par_iter()
        .map(|seed| duality_check(&ComplexMatrix::random(cfg.rows, cfg.cols, seed)).discrepancy)
        .collect();
    found.into_iter().for_each(|d| c.record(d));
    c
}

fn t_forms(cfg: &ExperimentConfig) -> Check {
    let mut c = Check::new("t_phase_forms", cfg.tol_forms);
    for name in [FamilyName::All, FamilyName::Squares, FamilyName::Power] {
        for q in [2, 3, 4] {
            let fam = cfg.moduli_family(name, q);
            let pts = match farey_points(&fam, &cfg.budget()) {
                Ok(p) => p,
                Err(e) => {
                    c.fail(e);
                    continue;
                }
            };
            for n in [4.0, 16.0] {
                for prov in [Provenance::AllOnes, Provenance::Random { seed: 1 }] {
                    let a = make_coefficients(prov, n).expect("N ≥ 1");
                    let exact = t_over_points(&pts, &a, PhaseForm::ExactRational, &cfg.budget());
                    let vector = t_over_points(&pts, &a, PhaseForm::Vector, &cfg.budget());
                    match (exact, vector) {
                        (Ok(x), Ok(v)) => c.record((x - v).abs() / x.abs().max(1.0)),
                        (Err(e), _) | (_, Err(e)) => c.fail(e),
                    }
                }
            }
        }
    }
    c
}

fn k_formulations(cfg: &ExperimentConfig) -> Check {
    let mut c = Check::new("k_formulations", 0.0);
    for name in [FamilyName::All, FamilyName::Squares, FamilyName::Power] {
        for q in 2..=5 {
            let pts = match farey_points(&cfg.moduli_family(name, q), &cfg.budget()) {
                Ok(p) => p,
                Err(e) => {
                    c.fail(e);
                    continue;
                }
            };
            for n in [4u64, 9, 16, 36, 64] {
                let r = Ratio::integer(n);
                let ke = k_euclid(&pts, r);
                let ok = ke == k_norm(&pts, r) && ke == k_euclid_bucketed(&pts, r) && k_sup(&pts, r) <= ke;
                c.record(if ok { 0.0 } else { 1.0 });
            }
        }
    }
    c
}

fn smoothed(cfg: &ExperimentConfig) -> Check {
    let mut c = Check::new("smoothed_count_dual", cfg.tol);
    let fam = cfg.moduli_family(FamilyName::Squares, 4);
    let q2s: Vec<GaussInt> = match fam.moduli() {
        Ok(m) => m.iter().map(|m| m.modulus).collect(),
        Err(e) => {
            c.fail(e);
            return c;
        }
    };
    for (q1, r1) in [(g(1, 1), g(1, 0)), (g(2, 1), g(1, 1)), (g(3, 0), g(1, 2))] {
        for n in [4.0, 16.0, 64.0] {
            match smoothed_count(&q2s, q1, r1, n, 16.0, cfg.tol / 4.0) {
                Ok(s) => c.record(((s.direct - s.dual).abs() - s.tail).max(0.0)),
                Err(e) => c.fail(e),
            }
        }
    }
    c
}

fn weyl_three_way(cfg: &ExperimentConfig) -> Check {
    let mut c = Check::new("weyl_three_way", cfg.tol_weyl);
    for &q0 in &cfg.q0 {
        for (q1, r1, j) in weyl_cases(2, q0) {
            let res = WeylConfig::new(2, q0, q1, r1, j, 1e-12).and_then(|w| {
                Ok((s_direct(&w)?, s2_squared_differenced(&w, None)?, s2_squared_poisson(&w, None)?))
            });
            match res {
                Ok((direct, diff, pois)) => {
                    let lhs = Complex64::new(direct.value.norm_sqr(), 0.0);
                    let scale = lhs.re.max(1e-300);
                    let worst = [(diff.value - lhs).norm(), (pois.value - lhs).norm(), (pois.value - diff.value).norm()]
                        .into_iter()
                        .fold(0.0, f64::max);
                    c.record(worst / scale);
                }
                Err(e) => c.fail(e),
            }
        }
    }
    c
}

/// Twenty points uniform on `[−1.2, 1.2]²`, fixed by seed.
fn transform_points() -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    (0..20)
        .map(|_| [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)])
        .collect()
}

fn transforms(cfg: &ExperimentConfig) -> Vec<Check> {
    let tol = cfg.tol_transform;
    let quad_tol = tol / 10.0;
    let pts = transform_points();
    let (alpha, q0) = (g(1, 2), 5.0);
    let gsq = g_square(alpha, q0);
    let square = CompletedSquare::of(&[alpha], q0);
    let fejer = WeightFn::Fejer { dim: 2 };

    let mut checks = vec![
        Check::new("transform_fejer", tol),
        Check::new("transform_psi1_self_dual", tol),
        Check::new("transform_g_square", tol),
        Check::new("transform_g_square_bound", tol),
    ];
    let rows: Vec<[Result<f64, String>; 4]> = pts
        .par_iter()
        .map(|&x| {
            let fej = numeric_fourier(&fejer, &x, quad_tol).map(|v| (v - fejer_hat(&x)).norm());
            let p1 = numeric_fourier(&WeightFn::Psi1, &x, quad_tol)
                .map(|v| (v - psi1(Complex64::new(x[0], x[1]))).norm());
            let gq = numeric_fourier(&gsq, &x, quad_tol);
            let g_hat = gq.clone().map(|v| (v - g_square_hat(alpha, q0, x)).norm());
            let g_bound = gq.map(|v| (v.norm() - square.transform_bound(x)).max(0.0));
            [fej, p1, g_hat, g_bound].map(|r| r.map_err(|e| e.to_string()))
        })
        .collect();
    for row in rows {
        for (check, r) in checks.iter_mut().zip(row) {
            match r {
                Ok(d) => check.record(d),
                Err(e) => check.fail(e),
            }
        }
    }
    checks
}

/// `Δ_{α_1} ⋯ Δ_{α_{k−1}} q^k` by inclusion–exclusion over the shifts.
fn iterated_difference(k: u32, alphas: &[GaussInt], q: GaussInt) -> GaussInt {
    let depth = alphas.len();
    (0..1usize << depth).fold(GaussInt::ZERO, |acc, mask| {
        let shift = (0..depth)
            .filter(|v| mask >> v & 1 == 1)
            .fold(GaussInt::ZERO, |s, v| s + alphas[v]);
        let term = (q + shift).pow(k);
        if (depth - mask.count_ones() as usize).is_multiple_of(2) {
            acc + term
        } else {
            acc - term
        }
    })
}

/// `k!·∏α_v·(2q + Σα_v)`, twice the terminal form.
fn terminal_form_doubled(k: u32, alphas: &[GaussInt], q: GaussInt) -> GaussInt {
    let fact = GaussInt::from((1..=k as i64).product::<i64>());
    let prod = alphas.iter().fold(GaussInt::ONE, |p, &a| p * a);
    let total = alphas.iter().fold(GaussInt::ZERO, |s, &a| s + a);
    fact * prod * (GaussInt::from(2) * q + total)
}

fn random_gauss(rng: &mut ChaCha8Rng, bound: i64) -> GaussInt {
    g(rng.random_range(-bound..=bound), rng.random_range(-bound..=bound))
}

/// Mismatches of `p_poly` against brute-force differencing over 100 random
/// inputs for each `k ≤ 5`.
pub fn p_poly_mismatches() -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for k in 2..=5u32 {
        for _ in 0..100 {
            let alphas: Vec<GaussInt> = (0..k - 1).map(|_| random_gauss(&mut rng, 6)).collect();
            let q = random_gauss(&mut rng, 6);
            let p = p_poly(k, &alphas, q);
            let brute = iterated_difference(k, &alphas, q);
            let terminal = terminal_form_doubled(k, &alphas, q);
            if p != brute || GaussInt::from(2) * p != terminal {
                bad += 1;
            }
        }
    }
    bad
}

fn p_poly_check() -> Check {
    let mut c = Check::new("p_poly_differencing", 0.0);
    c.cases = 400;
    c.worst = p_poly_mismatches() as f64;
    c
}

fn residue_classes() -> Check {
    let mut c = Check::new("small_fractional_classes", 0.0);
    for (q1, r1) in [(g(2, 1), g(1, 2)), (g(1, 1), g(1, 0)), (g(3, 2), g(2, 1))] {
        for delta in [0.0, 0.1, 0.3, 0.49] {
            match (
                count_small_fractional(q1, r1, 2, 200, delta),
                count_by_residue_classes(q1, r1, 2, 200, delta),
            ) {
                (Ok(a), Ok(b)) => c.record(a.abs_diff(b) as f64),
                (Err(e), _) | (_, Err(e)) => c.fail(e),
            }
        }
    }
    c
}

/// Runs every identity; one row each.
pub fn cmd_identities(cfg: &ExperimentConfig) -> Outcome {
    let mut checks = vec![
        poisson(cfg),
        poisson_differenced(cfg),
        duality(cfg),
        t_forms(cfg),
        k_formulations(cfg),
        smoothed(cfg),
        weyl_three_way(cfg),
    ];
    checks.extend(transforms(cfg));
    checks.push(p_poly_check());
    checks.push(residue_classes());

    let mut t = Table::new(&["identity", "cases", "max_discrepancy", "tolerance", "pass", "note"]);
    let mut status = Status::default();
    for c in &checks {
        let ok = c.passed();
        status.failed |= !ok;
        t.push(vec![
            text(c.name),
            int(c.cases),
            num(c.worst),
            num(c.tolerance),
            text(ok.to_string()),
            text(c.broken.clone().unwrap_or_default()),
        ]);
    }
    Outcome { table: t, status }
}
