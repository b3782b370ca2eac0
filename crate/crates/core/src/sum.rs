//! Compensated summation used by every long floating-point reduction.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for Compensated {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Compensated::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplex {
    re: Compensated,
    im: Compensated,
}

impl CompensatedComplex {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for CompensatedComplex {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedComplex::default();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// `e(x) = exp(2πix)`.
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// `e(num / den)` with the fraction reduced modulo 1 in exact arithmetic first.
pub fn e_rational(num: i128, den: i128) -> Complex64 {
    debug_assert!(den > 0);
    e(num.rem_euclid(den) as f64 / den as f64)
}
