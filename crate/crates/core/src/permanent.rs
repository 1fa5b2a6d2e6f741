//! Matrix permanents.
//!
//! The N-photon path sum `Σ_σ Π_μ M[σ(μ)][μ]` is the permanent of the
//! detector-by-emitter amplitude matrix. [`permanent_ryser`] is the working
//! routine; [`permanent_naive`] and [`path_amplitudes`] enumerate all `N!`
//! assignments and exist as an oracle and for path diagnostics.

use num_complex::Complex64;

use crate::correlation::AmplitudeMatrix;
use crate::error::{Error, Result};
use crate::reduce::CompensatedSum;

/// Largest size accepted by the enumerating routines.
pub const ORACLE_LIMIT: usize = 8;

/// Largest size accepted by Ryser's formula (subset index fits in a `u64`).
pub const RYSER_LIMIT: usize = 40;

/// Ryser's inclusion-exclusion formula with Gray-code subset order:
///
/// ```text
/// perm(M) = (-1)^n Σ_{S ⊆ cols} (-1)^{|S|} Π_i Σ_{j ∈ S} M[i][j]
/// ```
///
/// Consecutive subsets differ by one column, so each step updates the row
/// sums in `O(n)`.
pub fn permanent_ryser(m: &AmplitudeMatrix) -> Result<Complex64> {
    let n = m.order();
    if n > RYSER_LIMIT {
        return Err(Error::Domain(format!(
            "Ryser evaluation limited to N <= {RYSER_LIMIT}, got {n}"
        )));
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = CompensatedSum::new();
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let col = step.trailing_zeros() as usize;
        gray ^= 1 << col;
        let added = gray & (1 << col) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            if added {
                *sum += m.get(i, col);
            } else {
                *sum -= m.get(i, col);
            }
        }
        let product = row_sums
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s);
        if gray.count_ones() % 2 == 1 {
            total.add(-product);
        } else {
            total.add(product);
        }
    }
    let value = total.value();
    Ok(if n % 2 == 1 { -value } else { value })
}

/// Every emitter-to-detector assignment with its amplitude product.
///
/// Entry `(σ, p)` means emitter `μ` is detected at detector `σ[μ]`, and
/// `p = Π_μ M[σ[μ]][μ]`. Permutations come in lexicographic order.
pub fn path_amplitudes(m: &AmplitudeMatrix) -> Result<Vec<(Vec<usize>, Complex64)>> {
    let n = m.order();
    if n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge(n));
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut paths = Vec::new();
    loop {
        let product = sigma
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (mu, &i)| acc * m.get(i, mu));
        paths.push((sigma.clone(), product));
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    Ok(paths)
}

/// Brute-force `N!` expansion; refuses `N > 8`.
pub fn permanent_naive(m: &AmplitudeMatrix) -> Result<Complex64> {
    let mut total = CompensatedSum::new();
    for (_, p) in path_amplitudes(m)? {
        total.add(p);
    }
    Ok(total.value())
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len())
        .rev()
        .find(|&j| v[j] > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, vals: &[f64]) -> AmplitudeMatrix {
        AmplitudeMatrix::new(n, vals.iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap()
    }

    #[test]
    fn small_cases() {
        let id2 = AmplitudeMatrix::identity(2);
        assert_eq!(permanent_naive(&id2).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(permanent_ryser(&id2).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(permanent_naive(&real(2, &[1.0; 4])).unwrap().re, 2.0);
        assert_eq!(permanent_naive(&real(3, &[1.0; 9])).unwrap().re, 6.0);
        let m = real(2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(permanent_naive(&m).unwrap().re, 10.0);
        assert_eq!(permanent_ryser(&m).unwrap().re, 10.0);
        assert_eq!(
            permanent_ryser(&AmplitudeMatrix::identity(4)).unwrap().re,
            1.0
        );
        assert_eq!(permanent_ryser(&real(4, &[1.0; 16])).unwrap().re, 24.0);
        assert_eq!(permanent_ryser(&real(1, &[-3.5])).unwrap().re, -3.5);
    }

    #[test]
    fn all_ones_is_factorial() {
        let mut f = 1.0;
        for n in 1..=10usize {
            f *= n as f64;
            let m = real(n, &vec![1.0; n * n]);
            assert_eq!(
                permanent_ryser(&m).unwrap(),
                Complex64::new(f, 0.0),
                "n={n}"
            );
        }
    }

    #[test]
    fn paths() {
        let m = AmplitudeMatrix::new(
            2,
            vec![
                Complex64::new(1.0, 1.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 3.0),
                Complex64::new(4.0, -1.0),
            ],
        )
        .unwrap();
        let p = path_amplitudes(&m).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0], (vec![0, 1], m.get(0, 0) * m.get(1, 1)));
        assert_eq!(p[1], (vec![1, 0], m.get(1, 0) * m.get(0, 1)));
        assert_eq!(p[0].1 + p[1].1, permanent_naive(&m).unwrap());

        let id3 = AmplitudeMatrix::identity(3);
        let nonzero = path_amplitudes(&id3)
            .unwrap()
            .iter()
            .filter(|(_, v)| v.norm() > 0.0)
            .count();
        assert_eq!(nonzero, 1);
        assert_eq!(
            path_amplitudes(&AmplitudeMatrix::identity(4))
                .unwrap()
                .len(),
            24
        );
    }

    #[test]
    fn oracle_guard() {
        let m = AmplitudeMatrix::identity(9);
        assert_eq!(permanent_naive(&m), Err(Error::OracleTooLarge(9)));
        assert!(path_amplitudes(&m).is_err());
        assert_eq!(permanent_ryser(&m).unwrap().re, 1.0);
    }
}
