//! Order-fixed summation helpers.
//!
//! Results depend only on the input order, never on how work was scheduled.

use num_complex::Complex64;

const LEAF: usize = 32;

/// Pairwise (cascade) sum over a fixed binary tree of leaf blocks.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= LEAF {
        return values
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Neumaier-compensated running sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        let (re, cre) = neumaier(self.sum.re, self.carry.re, v.re);
        let (im, cim) = neumaier(self.sum.im, self.carry.im, v.im);
        self.sum = Complex64::new(re, im);
        self.carry = Complex64::new(cre, cim);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

#[inline]
fn neumaier(sum: f64, carry: f64, v: f64) -> (f64, f64) {
    let t = sum + v;
    let c = if sum.abs() >= v.abs() {
        (sum - t) + v
    } else {
        (v - t) + sum
    };
    (t, carry + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let v: Vec<Complex64> = (0..1000)
            .map(|i| Complex64::new(i as f64, -(i as f64)))
            .collect();
        assert_eq!(pairwise_sum(&v), Complex64::new(499500.0, -499500.0));
        assert_eq!(pairwise_sum(&[]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(Complex64::new(1e16, 0.0));
        for _ in 0..100 {
            s.add(Complex64::new(1.0, 1.0));
        }
        s.add(Complex64::new(-1e16, 0.0));
        assert_eq!(s.value(), Complex64::new(100.0, 100.0));
    }
}
