//! Best constants of the two dual quadratic forms of a complex matrix.
//!
//! For `C ∈ C^{m×n}`, the smallest `D` with `Σ_i |Σ_j c_ij a_j|² ≤ D Σ_j |a_j|²`
//! for all `a` is the largest eigenvalue of `C*C`; the smallest `D` with
//! `Σ_j |Σ_i c_ij b_i|² ≤ D Σ_i |b_i|²` is the largest eigenvalue of `CC*`.
//! Both are computed independently by power iteration.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        assert!(r > 0, "matrix needs at least one row");
        let c = rows[0].len();
        assert!(c > 0 && rows.iter().all(|row| row.len() == c), "ragged matrix");
        ComplexMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Entries with real and imaginary parts uniform on `[−1, 1)`, drawn
    /// row-major from ChaCha8 seeded with `seed`.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Self {
        assert!(rows > 0 && cols > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols)
            .map(|_| {
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = rng.random_range(-1.0..1.0);
                Complex64::new(re, im)
            })
            .collect();
        ComplexMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `C a`.
    pub fn apply(&self, a: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * a[j]).sum())
            .collect()
    }

    /// `C* b`.
    pub fn apply_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).conj() * b[i]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let rows = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).conj()).collect())
            .collect();
        ComplexMatrix::from_rows(rows)
    }
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult {
    pub value: f64,
    pub iterations: usize,
    /// `‖Gv − λv‖` at the final unit vector.
    pub residual: f64,
}

/// Largest eigenvalue of `C*C` by power iteration, i.e. the best constant of
/// `Σ_i |Σ_j c_ij a_j|² ≤ D ‖a‖²`.
pub fn best_constant(c: &ComplexMatrix, max_iter: usize, rel_tol: f64) -> PowerResult {
    // deterministic start with every coordinate excited
    let mut v: Vec<Complex64> = (0..c.cols)
        .map(|j| Complex64::new(1.0, 0.1 * (j + 1) as f64))
        .collect();
    let scale = norm_sq(&v).sqrt();
    v.iter_mut().for_each(|z| *z /= scale);
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let w = c.apply_adjoint(&c.apply(&v));
        // Rayleigh quotient of the unit vector v
        let new_lambda: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let wn = norm_sq(&w).sqrt();
        if wn == 0.0 {
            return PowerResult {
                value: 0.0,
                iterations: it,
                residual: 0.0,
            };
        }
        let residual = norm_sq(
            &w.iter()
                .zip(&v)
                .map(|(b, a)| b - a * new_lambda)
                .collect::<Vec<_>>(),
        )
        .sqrt();
        v = w.into_iter().map(|z| z / wn).collect();
        let converged = (new_lambda - lambda).abs() <= rel_tol * new_lambda && residual <= 1e-7 * new_lambda;
        lambda = new_lambda;
        if converged {
            return PowerResult {
                value: lambda,
                iterations: it,
                residual,
            };
        }
    }
    PowerResult {
        value: lambda,
        iterations: max_iter,
        residual: f64::NAN,
    }
}

/// Both dual best constants and their disagreement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityCheck {
    pub forward: PowerResult,
    pub backward: PowerResult,
    pub discrepancy: f64,
}

pub fn duality_check(c: &ComplexMatrix) -> DualityCheck {
    let forward = best_constant(c, 200_000, 1e-15);
    let backward = best_constant(&c.adjoint(), 200_000, 1e-15);
    DualityCheck {
        forward,
        backward,
        discrepancy: (forward.value - backward.value).abs() / forward.value.max(backward.value).max(1e-300),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let c = ComplexMatrix::from_rows(vec![vec![Complex64::new(3.0, -4.0)]]);
        let d = duality_check(&c);
        assert!((d.forward.value - 25.0).abs() < 1e-12);
        assert!((d.backward.value - 25.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_is_frobenius() {
        let u = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0), Complex64::new(0.0, 1.5)];
        let v = [Complex64::new(2.0, 0.0), Complex64::new(0.3, -0.7)];
        let rows = u.iter().map(|a| v.iter().map(|b| a * b.conj()).collect()).collect();
        let c = ComplexMatrix::from_rows(rows);
        let d = duality_check(&c);
        let f = c.frobenius_sq();
        assert!((d.forward.value - f).abs() < 1e-9 * f);
        assert!((d.backward.value - f).abs() < 1e-9 * f);
    }

    #[test]
    fn random_matrices_agree() {
        for seed in 0..10 {
            let c = ComplexMatrix::random(8, 12, seed);
            let d = duality_check(&c);
            assert!(d.discrepancy < 1e-9, "seed {seed}: {d:?}");
            // the maximizer attains the constant
            assert!(d.forward.value <= c.frobenius_sq() + 1e-9);
        }
    }
}
