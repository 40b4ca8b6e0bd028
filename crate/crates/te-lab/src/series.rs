//! Truncated complex power series in one variable.
//!
//! Used to differentiate implicitly defined eigenvalue branches: Newton's
//! method run in series arithmetic yields all Taylor coefficients at once.

use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub c: Vec<C64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series { c: vec![C64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(v: C64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = v;
        s
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Series { c: coeffs.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn scale(&self, k: C64) -> Self {
        Series { c: self.c.iter().map(|z| z * k).collect() }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let mut r = vec![C64::new(0.0, 0.0); n];
        r[0] = 1.0 / self.c[0];
        for k in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.c[j] * r[k - j];
            }
            r[k] = -acc * r[0];
        }
        Series { c: r }
    }

    pub fn div(&self, other: &Series) -> Series {
        self * &other.recip()
    }

    /// Principal square root; the constant term must be nonzero.
    pub fn sqrt(&self) -> Self {
        let n = self.c.len();
        let mut r = vec![C64::new(0.0, 0.0); n];
        r[0] = self.c[0].sqrt();
        for k in 1..n {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= r[j] * r[k - j];
            }
            r[k] = acc / (2.0 * r[0]);
        }
        Series { c: r }
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> C64 {
        let fact: f64 = (1..=k).map(|v| v as f64).product();
        self.c[k] * fact
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        Series { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        Series { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.c.len().min(o.c.len());
        let mut r = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            if self.c[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..(n - i) {
                r[i + j] += self.c[i] * o.c[j];
            }
        }
        Series { c: r }
    }
}
