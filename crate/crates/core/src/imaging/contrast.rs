//! Two-lobe modulation depth and curve-shape comparison.

use serde::{Deserialize, Serialize};

use super::CorrelationCurve;
use crate::error::{Error, Result};

/// Minimum number of samples accepted by [`contrast`].
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContrastOptions {
    /// `resolved` iff `depth >= threshold`.
    pub threshold: f64,
    /// Width-3 box smoothing before peak search.
    pub smoothing: bool,
    /// Local maxima below `lobe_floor × max` are side lobes, not image lobes.
    pub lobe_floor: f64,
}

impl Default for ContrastOptions {
    fn default() -> Self {
        Self {
            threshold: 0.05,
            smoothing: false,
            lobe_floor: 0.5,
        }
    }
}

impl ContrastOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && (0.0..=1.0).contains(&self.threshold)) {
            return Err(Error::invalid("contrast.threshold", "must lie in [0, 1]"));
        }
        if !(self.lobe_floor.is_finite() && (0.0..=1.0).contains(&self.lobe_floor)) {
            return Err(Error::invalid("contrast.lobe_floor", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    /// `(min(p1, p2) - valley) / (min(p1, p2) + valley)`, clamped to `[0, 1]`.
    pub depth: f64,
    /// Scan positions of the two lobes, left first.
    pub lobes: Option<[f64; 2]>,
    /// Scan position of the minimum between the lobes.
    pub valley: Option<f64>,
    pub resolved: bool,
}

impl ContrastReport {
    fn unresolved() -> Self {
        Self {
            depth: 0.0,
            lobes: None,
            valley: None,
            resolved: false,
        }
    }
}

fn box_smooth(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            v[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Interior local maxima by strict comparison with the neighbours; a flat
/// top reports its leftmost sample.
pub(crate) fn local_maxima(v: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < v.len() {
        if v[i] > v[i - 1] {
            let mut j = i;
            while j + 1 < v.len() && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < v.len() && v[j + 1] < v[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Modulation depth between the two highest qualifying local maxima.
pub fn contrast_values(
    xs: &[f64],
    values: &[f64],
    options: &ContrastOptions,
) -> Result<ContrastReport> {
    options.validate()?;
    if xs.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: values.len(),
        });
    }
    if values.len() < MIN_SAMPLES {
        return Err(Error::invalid(
            "scan.samples",
            format!(
                "contrast needs at least {MIN_SAMPLES} samples, got {}",
                values.len()
            ),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("curve values must be finite".into()));
    }
    let v = if options.smoothing {
        box_smooth(values)
    } else {
        values.to_vec()
    };
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = options.lobe_floor * top;
    let mut maxima: Vec<usize> = local_maxima(&v)
        .into_iter()
        .filter(|&i| v[i] >= floor)
        .collect();
    if maxima.len() < 2 {
        return Ok(ContrastReport::unresolved());
    }
    // Highest first, leftmost among equals.
    maxima.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let (l, r) = (maxima[0].min(maxima[1]), maxima[0].max(maxima[1]));
    let mut valley = l;
    for i in l..=r {
        if v[i] < v[valley] {
            valley = i;
        }
    }
    let peak = v[l].min(v[r]);
    let denom = peak + v[valley];
    let depth = if denom > 0.0 {
        ((peak - v[valley]) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(ContrastReport {
        depth,
        lobes: Some([xs[l], xs[r]]),
        valley: Some(xs[valley]),
        resolved: depth >= options.threshold,
    })
}

pub fn contrast(curve: &CorrelationCurve, options: &ContrastOptions) -> Result<ContrastReport> {
    contrast_values(&curve.scan_x, &curve.values, options)
}

/// Zero-mean normalized cross-correlation of two max-normalized curves
/// sampled on the same grid; 1 means identical shape.
pub fn shape_similarity(a: &CorrelationCurve, b: &CorrelationCurve) -> Result<f64> {
    if a.scan_x != b.scan_x {
        return Err(Error::Domain("curves must share the same scan grid".into()));
    }
    let (a, b) = (a.normalized(), b.normalized());
    let n = a.values.len() as f64;
    let ma = a.values.iter().sum::<f64>() / n;
    let mb = b.values.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.values.iter().zip(&b.values) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Domain(
            "constant curve has no shape to compare".into(),
        ));
    }
    Ok(sab / (saa * sbb).sqrt())
}
