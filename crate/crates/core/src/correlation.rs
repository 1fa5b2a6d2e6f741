//! Amplitude matrices and `G(N)` correlation signals.
//!
//! With every emitter initially excited and each field operator carrying a
//! `1/sqrt(N)` prefactor, the N-fold correlation at detectors `r_1..r_N` is
//!
//! ```text
//! G(N) = N^(-N) |perm M|²,    M[i][μ] = U(r_i, R_μ)
//! ```
//!
//! which gives `G(1) = |U|²` and the `1/4` prefactor for `N = 2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffraction::{Source, SourceField};
use crate::error::{Error, Result};
use crate::geometry::{DetectorSet, EmitterArray, Point3, SetupConfig};
use crate::permanent::permanent_ryser;
use crate::quadrature::QuadratureSpec;

/// Square complex matrix; row = detector, column = emitter.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl AmplitudeMatrix {
    /// Row-major entries.
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain(
                "amplitude matrix must be at least 1x1".into(),
            ));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain(
                "amplitude matrix entries must be finite".into(),
            ));
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, entries }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, detector: usize, emitter: usize) -> Complex64 {
        self.entries[detector * self.n + emitter]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Rows reordered so that new row `i` is old row `order[i]`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for &r in order {
            entries.extend_from_slice(&self.entries[r * n..(r + 1) * n]);
        }
        Self { n, entries }
    }

    /// Columns reordered so that new column `j` is old column `order[j]`.
    pub fn permute_cols(&self, order: &[usize]) -> Self {
        let n = self.n;
        let entries = (0..n)
            .flat_map(|i| order.iter().map(move |&c| (i, c)))
            .map(|(i, c)| self.entries[i * n + c])
            .collect();
        Self { n, entries }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_row(&self, row: usize, c: Complex64) -> Self {
        let mut out = self.clone();
        for z in &mut out.entries[row * self.n..(row + 1) * self.n] {
            *z *= c;
        }
        out
    }
}

/// A correlation signal in arbitrary units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationValue {
    pub value: f64,
    pub order: usize,
    /// The constant `A` multiplying `|perm M|²`.
    pub normalization: f64,
}

/// `A = N^(-N)`.
pub fn normalization(order: usize) -> f64 {
    (order as f64).powi(-(order as i32))
}

fn entry_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Order indices by the sorted multiset of their entries, which does not
/// depend on how the other axis is ordered.
fn canonical_order(n: usize, line: impl Fn(usize) -> Vec<Complex64>) -> Vec<usize> {
    let keys: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let mut k = line(i);
            k.sort_by(entry_cmp);
            k
        })
        .collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        keys[a]
            .iter()
            .zip(&keys[b])
            .map(|(x, y)| entry_cmp(x, y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx
}

impl AmplitudeMatrix {
    /// Rows and columns reordered into a form shared by every row/column
    /// permutation of the same matrix (barring rows or columns with equal
    /// entry multisets but different layout).
    pub fn canonical(&self) -> Self {
        let n = self.n;
        let rows = canonical_order(n, |i| self.entries[i * n..(i + 1) * n].to_vec());
        let cols = canonical_order(n, |j| (0..n).map(|i| self.get(i, j)).collect());
        self.permute_rows(&rows).permute_cols(&cols)
    }
}

/// `A |perm M|²`, evaluated on the canonical form of `M` so the result is
/// bit-identical under any relabelling of detectors or emitters.
pub fn correlation_from_matrix(m: &AmplitudeMatrix) -> Result<CorrelationValue> {
    let a = normalization(m.order());
    let p = permanent_ryser(&m.canonical())?;
    Ok(CorrelationValue {
        value: a * p.norm_sqr(),
        order: m.order(),
        normalization: a,
    })
}

/// `M[i][μ] = sources[μ].amplitude(detectors[i])`.
pub fn matrix_from_sources(detectors: &[Point3], sources: &[Source]) -> Result<AmplitudeMatrix> {
    if detectors.len() != sources.len() {
        return Err(Error::DimensionMismatch {
            expected: sources.len(),
            actual: detectors.len(),
        });
    }
    let n = detectors.len();
    let mut entries = Vec::with_capacity(n * n);
    for (i, d) in detectors.iter().enumerate() {
        for (mu, s) in sources.iter().enumerate() {
            entries.push(s.amplitude(d).map_err(|e| e.with_cell(i, mu))?);
        }
    }
    AmplitudeMatrix::new(n, entries)
}

/// Build one [`SourceField`] per emitter, in parallel, keeping emitter order.
pub fn emitter_sources(
    emitters: &EmitterArray,
    config: &SetupConfig,
    quad: &QuadratureSpec,
) -> Result<Vec<Source>> {
    emitters
        .positions()
        .par_iter()
        .enumerate()
        .map(|(mu, e)| {
            SourceField::new(*e, config, quad)
                .map(Source::from)
                .map_err(|err| err.with_cell(0, mu))
        })
        .collect()
}

pub fn amplitude_matrix(
    detectors: &DetectorSet,
    emitters: &EmitterArray,
    config: &SetupConfig,
    quad: &QuadratureSpec,
) -> Result<AmplitudeMatrix> {
    if detectors.len() != emitters.len() {
        return Err(Error::DimensionMismatch {
            expected: emitters.len(),
            actual: detectors.len(),
        });
    }
    let sources = emitter_sources(emitters, config, quad)?;
    matrix_from_sources(detectors.positions(), &sources)
}

/// Intensity `|U(r, R)|²`.
pub fn g1(
    detector: &Point3,
    emitter: &Point3,
    config: &SetupConfig,
    quad: &QuadratureSpec,
) -> Result<CorrelationValue> {
    let u = crate::diffraction::diffracted_amplitude(detector, emitter, config, quad)?;
    Ok(CorrelationValue {
        value: u.norm_sqr(),
        order: 1,
        normalization: 1.0,
    })
}

/// `(1/4) |U11 U22 + U12 U21|²`.
pub fn g2(
    detectors: &DetectorSet,
    emitters: &EmitterArray,
    config: &SetupConfig,
    quad: &QuadratureSpec,
) -> Result<CorrelationValue> {
    if detectors.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: detectors.len(),
        });
    }
    gn(detectors, emitters, config, quad)
}

pub fn gn(
    detectors: &DetectorSet,
    emitters: &EmitterArray,
    config: &SetupConfig,
    quad: &QuadratureSpec,
) -> Result<CorrelationValue> {
    let m = amplitude_matrix(detectors, emitters, config, quad)?;
    correlation_from_matrix(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permanent::{path_amplitudes, permanent_naive};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_constants() {
        assert_eq!(normalization(1), 1.0);
        assert_eq!(normalization(2), 0.25);
        assert_eq!(normalization(4), 1.0 / 256.0);
    }

    #[test]
    fn g1_by_modulus() {
        let m = AmplitudeMatrix::new(1, vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(correlation_from_matrix(&m).unwrap().value, 0.0);
        let m = AmplitudeMatrix::new(1, vec![c(0.6, 0.8)]).unwrap();
        assert!((correlation_from_matrix(&m).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coincident_emitters_factorize() {
        // Identical columns: G2 = |U(r1)|² |U(r2)|².
        let (u1, u2) = (c(0.3, -1.2), c(2.0, 0.5));
        let m = AmplitudeMatrix::new(2, vec![u1, u1, u2, u2]).unwrap();
        let g = correlation_from_matrix(&m).unwrap().value;
        assert!((g - u1.norm_sqr() * u2.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn destructive_paths_cancel() {
        // U11 U22 = -U12 U21
        let m = AmplitudeMatrix::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert_eq!(correlation_from_matrix(&m).unwrap().value, 0.0);
    }

    #[test]
    fn four_photon_paths_sum_to_permanent() {
        let entries: Vec<Complex64> = (0..16)
            .map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let m = AmplitudeMatrix::new(4, entries).unwrap();
        let paths = path_amplitudes(&m).unwrap();
        assert_eq!(paths.len(), 24);
        let total: Complex64 = paths.iter().map(|(_, p)| p).sum();
        let ryser = permanent_ryser(&m).unwrap();
        assert!((total - ryser).norm() <= 1e-12 * ryser.norm());
        assert!((permanent_naive(&m).unwrap() - ryser).norm() <= 1e-12 * ryser.norm());
    }

    #[test]
    fn shape_checks() {
        assert!(AmplitudeMatrix::new(2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(AmplitudeMatrix::new(0, vec![]).is_err());
        assert!(AmplitudeMatrix::new(1, vec![c(f64::NAN, 0.0)]).is_err());
        let config = SetupConfig::default();
        let d = DetectorSet::from_xy(&[(0.0, 0.0)], &config).unwrap();
        let e = EmitterArray::from_x(&[0.0, 0.02], 0.1).unwrap();
        assert!(matches!(
            gn(&d, &e, &config, &QuadratureSpec::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn correlation_is_exactly_permutation_invariant() {
        let entries: Vec<Complex64> = (0..16)
            .map(|i| c((i as f64 * 0.71).sin() + 0.1, (i as f64 * 2.3).cos()))
            .collect();
        let m = AmplitudeMatrix::new(4, entries).unwrap();
        let base = correlation_from_matrix(&m).unwrap().value;
        for (rows, cols) in [
            ([1, 0, 2, 3], [0, 1, 2, 3]),
            ([3, 2, 1, 0], [2, 0, 3, 1]),
            ([0, 1, 2, 3], [1, 3, 0, 2]),
        ] {
            let p = m.permute_rows(&rows).permute_cols(&cols);
            assert_eq!(
                correlation_from_matrix(&p).unwrap().value.to_bits(),
                base.to_bits()
            );
            assert_eq!(p.canonical(), m.canonical());
        }
    }

    #[test]
    fn permutations_of_rows_and_cols() {
        let entries: Vec<Complex64> = (0..9).map(|i| c(i as f64 + 1.0, 0.5 * i as f64)).collect();
        let m = AmplitudeMatrix::new(3, entries).unwrap();
        let p = m.permute_rows(&[2, 0, 1]);
        assert_eq!(p.get(0, 1), m.get(2, 1));
        let q = m.permute_cols(&[1, 2, 0]);
        assert_eq!(q.get(2, 0), m.get(2, 1));
    }
}
