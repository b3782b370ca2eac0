//! Rank-2 lattices in the plane, their duals, disk enumeration, and a
//! two-sided evaluator for Poisson summation over shifted lattices.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::gaussint::GaussInt;
use crate::sum::{e, Compensated, CompensatedComplex};
use crate::weights::{WeightError, WeightFn};

pub type Vec2 = [f64; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("basis vectors are linearly dependent")]
    Degenerate,
    #[error("modulus must be nonzero")]
    ZeroModulus,
    #[error("weight must be planar, got dimension {0}")]
    NotPlanar(usize),
    #[error("lattice tail of the weight is not summable")]
    TailNotSummable,
    #[error(transparent)]
    Weight(#[from] WeightError),
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn len(a: Vec2) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice2 {
    basis: [Vec2; 2],
    covolume: f64,
}

impl Lattice2 {
    pub fn new(b1: Vec2, b2: Vec2) -> Result<Self, LatticeError> {
        let det = b1[0] * b2[1] - b1[1] * b2[0];
        if det == 0.0 || !det.is_finite() {
            return Err(LatticeError::Degenerate);
        }
        Ok(Lattice2 {
            basis: [b1, b2],
            covolume: det.abs(),
        })
    }

    pub fn standard() -> Self {
        Lattice2 {
            basis: [[1.0, 0.0], [0.0, 1.0]],
            covolume: 1.0,
        }
    }

    /// The lattice `q·Z[i]` with basis `(u, v), (−v, u)` for `q = u + iv`.
    /// The covolume is `N(q)`, taken from exact integer arithmetic.
    pub fn from_modulus(q: GaussInt) -> Result<Self, LatticeError> {
        if q.is_zero() {
            return Err(LatticeError::ZeroModulus);
        }
        let (u, v) = (q.re as f64, q.im as f64);
        Ok(Lattice2 {
            basis: [[u, v], [-v, u]],
            covolume: q.norm() as f64,
        })
    }

    pub fn basis(&self) -> [Vec2; 2] {
        self.basis
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    fn det(&self) -> f64 {
        let [b1, b2] = self.basis;
        b1[0] * b2[1] - b1[1] * b2[0]
    }

    /// The dual lattice `{x : x·y ∈ Z for all y ∈ Λ}`.
    pub fn dual(&self) -> Lattice2 {
        let [b1, b2] = self.basis;
        let det = self.det();
        Lattice2 {
            basis: [[b2[1] / det, -b2[0] / det], [-b1[1] / det, b1[0] / det]],
            covolume: 1.0 / self.covolume,
        }
    }

    pub fn scaled(&self, s: f64) -> Lattice2 {
        let [b1, b2] = self.basis;
        Lattice2 {
            basis: [[s * b1[0], s * b1[1]], [s * b2[0], s * b2[1]]],
            covolume: s * s * self.covolume,
        }
    }

    /// Coordinates of `p` in the basis.
    pub fn coords(&self, p: Vec2) -> Vec2 {
        let [d1, d2] = self.dual().basis;
        [dot(p, d1), dot(p, d2)]
    }

    pub fn point(&self, x: i64, y: i64) -> Vec2 {
        let [b1, b2] = self.basis;
        [
            x as f64 * b1[0] + y as f64 * b2[0],
            x as f64 * b1[1] + y as f64 * b2[1],
        ]
    }

    /// Do both bases span the same lattice (up to `tol` in the change of basis)?
    pub fn same_lattice(&self, other: &Lattice2, tol: f64) -> bool {
        let m: Vec<f64> = other.basis.iter().flat_map(|&b| self.coords(b)).collect();
        let integral = m.iter().all(|c| (c - c.round()).abs() <= tol);
        let det = m[0].round() * m[3].round() - m[1].round() * m[2].round();
        integral && det.abs() == 1.0
    }

    /// An upper bound on `|p|` over the half-open fundamental cell.
    pub fn cell_diameter(&self) -> f64 {
        let [b1, b2] = self.basis;
        let sum = [b1[0] + b2[0], b1[1] + b2[1]];
        let diff = [b1[0] - b2[0], b1[1] - b2[1]];
        len(b1).max(len(b2)).max(len(sum)).max(len(diff))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedLattice {
    pub lattice: Lattice2,
    pub shift: Vec2,
}

impl ShiftedLattice {
    pub fn new(lattice: Lattice2, shift: Vec2) -> Self {
        ShiftedLattice { lattice, shift }
    }

    pub fn unshifted(lattice: Lattice2) -> Self {
        ShiftedLattice::new(lattice, [0.0, 0.0])
    }
}

fn canonical_order(a: &Vec2, b: &Vec2) -> Ordering {
    dot(*a, *a)
        .total_cmp(&dot(*b, *b))
        .then(a[0].total_cmp(&b[0]))
        .then(a[1].total_cmp(&b[1]))
}

/// Points of `sl` with Euclidean norm at most `radius`, ordered by norm and
/// then lexicographically.
pub fn points_in_disk(sl: &ShiftedLattice, radius: f64) -> Vec<Vec2> {
    assert!(radius >= 0.0, "radius must be nonnegative");
    let lat = &sl.lattice;
    let [d1, d2] = lat.dual().basis;
    let [b1, b2] = lat.basis;
    let c = [dot(sl.shift, d1), dot(sl.shift, d2)];
    let (w1, w2) = (radius * len(d1), radius * len(d2));
    let (x_lo, x_hi) = ((-c[0] - w1).floor() as i64, (-c[0] + w1).ceil() as i64);
    let (y_lo, y_hi) = ((-c[1] - w2).floor() as i64, (-c[1] + w2).ceil() as i64);
    let r2 = radius * radius;
    let mut out = Vec::new();
    for x in x_lo..=x_hi {
        for y in y_lo..=y_hi {
            let p = [
                sl.shift[0] + x as f64 * b1[0] + y as f64 * b2[0],
                sl.shift[1] + x as f64 * b1[1] + y as f64 * b2[1],
            ];
            if dot(p, p) <= r2 {
                out.push(p);
            }
        }
    }
    out.sort_by(canonical_order);
    out
}

/// Certified bound on `Σ_{y ∈ a+Λ, |y| > r} h(|y|)` for a non-increasing
/// majorant `h` that is eventually log-concave (Gaussian or exponential decay).
///
/// Shells of width `δ` hold at most `π((s+δ+ρ)² − (s−ρ)₊²)/V` points, `ρ`
/// being the cell diameter; each shell is charged `h` at its inner radius.
/// Returns `f64::INFINITY` if the sum does not settle.
pub fn lattice_tail_bound(lat: &Lattice2, r: f64, h: impl Fn(f64) -> f64) -> f64 {
    let rho = lat.cell_diameter();
    let v = lat.covolume();
    let delta = (rho / 4.0).max(1e-3);
    let mut total = Compensated::default();
    let mut prev_term = f64::INFINITY;
    let mut settled_steps = 0;
    for n in 0..4_000_000u64 {
        let s = r + n as f64 * delta;
        let outer = s + delta + rho;
        let inner = (s - rho).max(0.0);
        let count = PI * (outer * outer - inner * inner) / v;
        let term = h(s) * count;
        total.add(term);
        if term == 0.0 {
            return total.value();
        }
        let ratio = term / prev_term;
        if ratio < 0.5 && term < 1e-20 * total.value().max(1e-300) {
            settled_steps += 1;
            if settled_steps >= 8 {
                // remaining shells shrink at least geometrically with this ratio
                return total.value() + term * ratio / (1.0 - ratio);
            }
        } else {
            settled_steps = 0;
        }
        prev_term = term;
    }
    f64::INFINITY
}

/// Smallest radius (on a grid of step `ρ/4`) whose lattice tail is below `target`.
pub fn truncation_radius(
    lat: &Lattice2,
    target: f64,
    h: impl Fn(f64) -> f64 + Copy,
) -> Result<f64, LatticeError> {
    let step = (lat.cell_diameter() / 4.0).max(1e-3);
    let mut r = 0.0;
    for _ in 0..1_000_000 {
        let tail = lattice_tail_bound(lat, r, h);
        if !tail.is_finite() {
            return Err(LatticeError::TailNotSummable);
        }
        if tail < target {
            return Ok(r);
        }
        r += step;
    }
    Err(LatticeError::TailNotSummable)
}

/// Both sides of `Σ_{y ∈ a+Λ} f(y/B) = B²/Vol(Λ) · Σ_{x ∈ Λ'} e(a·x) f̂(Bx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: Complex64,
    pub discrepancy: f64,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
}

/// Evaluates both sides of Poisson summation over a shifted lattice, each
/// truncated where its certified tail drops below `tol/4`.
pub fn poisson_two_sides(
    weight: &WeightFn,
    lat: &Lattice2,
    shift: Vec2,
    scale: f64,
    tol: f64,
) -> Result<PoissonCheck, LatticeError> {
    assert!(scale > 0.0 && tol > 0.0);
    if weight.dim() != 2 {
        return Err(LatticeError::NotPlanar(weight.dim()));
    }
    if !weight.has_closed_form() {
        return Err(WeightError::NoClosedForm.into());
    }
    let lhs_major = |r: f64| weight.radial_majorant(r / scale);
    let r_lhs = truncation_radius(lat, tol / 4.0, lhs_major)?;
    let lhs_points = points_in_disk(&ShiftedLattice::new(*lat, shift), r_lhs);
    let lhs: Compensated = lhs_points
        .iter()
        .map(|y| weight.eval(&[y[0] / scale, y[1] / scale]))
        .collect();

    let dual = lat.dual();
    let prefactor = scale * scale / lat.covolume();
    let rhs_major = |r: f64| {
        prefactor
            * weight
                .transform_radial_majorant(scale * r)
                .expect("closed form checked above")
    };
    let r_rhs = truncation_radius(&dual, tol / 4.0, rhs_major)?;
    let rhs_points = points_in_disk(&ShiftedLattice::unshifted(dual), r_rhs);
    let mut rhs = CompensatedComplex::default();
    for x in &rhs_points {
        let fhat = weight.transform(&[scale * x[0], scale * x[1]])?;
        rhs.add(e(dot(shift, *x)) * fhat);
    }
    let rhs = rhs.value() * prefactor;
    let lhs = lhs.value();
    Ok(PoissonCheck {
        lhs,
        rhs,
        discrepancy: (Complex64::new(lhs, 0.0) - rhs).norm(),
        lhs_terms: lhs_points.len(),
        rhs_terms: rhs_points.len(),
    })
}
