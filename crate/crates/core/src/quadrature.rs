//! Gauss-Legendre rules and the adaptive cubature used over each aperture.
//!
//! Each circular aperture is integrated in polar coordinates about its own
//! center, which keeps the rim exact. Only the upper half-disk (`y > 0`) is
//! sampled: emitters lie in the `xz` plane, so the source factor is even in
//! `y` and the lower half is folded in at evaluation time. The half-disk is
//! split into `(r, θ)` panels, each carrying a tensor Gauss-Legendre rule,
//! and the panel with the largest coarse/fine disagreement is bisected in
//! both directions until the summed disagreement falls below the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::WAVENUMBER;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[lo, hi]`.
    pub fn integrate<T, F>(&self, lo: f64, hi: f64, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }

    /// Composite rule: `panels` equal sub-intervals of `[lo, hi]`.
    pub fn integrate_composite<T, F>(&self, lo: f64, hi: f64, panels: usize, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let panels = panels.max(1);
        let h = (hi - lo) / panels as f64;
        let mut acc = T::default();
        for p in 0..panels {
            let a = lo + h * p as f64;
            let b = if p + 1 == panels { hi } else { a + h };
            acc = acc + self.integrate(a, b, &mut f);
        }
        acc
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Controls for the aperture cubature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per axis in every panel.
    pub order: usize,
    /// Target for the summed coarse/fine disagreement, relative to `∫|f|`.
    pub tolerance: f64,
    /// Maximum number of bisections of a base panel.
    pub max_depth: u32,
    /// Largest detector `|r_⊥| / r_z` the base panels must resolve.
    pub max_transverse_ratio: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 8,
            tolerance: 1e-6,
            max_depth: 14,
            max_transverse_ratio: 2.5,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.order < 4 {
            return Err(Error::invalid(
                "quadrature.order",
                format!("must be >= 4, got {}", self.order),
            ));
        }
        if self.order > 64 {
            return Err(Error::invalid(
                "quadrature.order",
                format!("must be <= 64, got {}", self.order),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::invalid(
                "quadrature.tolerance",
                format!("must lie in (0, 1), got {}", self.tolerance),
            ));
        }
        if self.max_depth == 0 || self.max_depth > 30 {
            return Err(Error::invalid(
                "quadrature.max_depth",
                format!("must lie in [1, 30], got {}", self.max_depth),
            ));
        }
        if !(self.max_transverse_ratio.is_finite() && self.max_transverse_ratio > 0.0) {
            return Err(Error::invalid(
                "quadrature.max_transverse_ratio",
                format!("must be > 0, got {}", self.max_transverse_ratio),
            ));
        }
        Ok(())
    }

    /// Same spec with twice the nodes per axis.
    pub fn doubled(&self) -> Self {
        Self {
            order: self.order * 2,
            ..*self
        }
    }
}

/// A cubature node carrying its full complex weight (Jacobian and integrand folded in).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNode {
    pub x: f64,
    pub y: f64,
    pub w: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleDiagnostics {
    pub panels: usize,
    pub nodes: usize,
    /// Integral of the weight function from the panel-level coarse rules.
    pub coarse: Complex64,
    /// Integral from the refined (child) rules; this is what the rule evaluates.
    pub fine: Complex64,
    pub error_estimate: f64,
    /// `∫|f|` over the half-disk; the tolerance is relative to this.
    pub l1_norm: f64,
}

/// Upper half-disk cubature with the integrand folded into the node weights.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfDiskRule {
    nodes: Vec<WeightedNode>,
    pub diagnostics: RuleDiagnostics,
}

impl HalfDiskRule {
    pub fn nodes(&self) -> &[WeightedNode] {
        &self.nodes
    }

    /// The same rule reflected through `x → -x`.
    pub fn mirrored(&self) -> Self {
        Self {
            nodes: self
                .nodes
                .iter()
                .map(|n| WeightedNode { x: -n.x, ..*n })
                .collect(),
            diagnostics: self.diagnostics,
        }
    }

    /// `∫_disk f(ρ) e^{i(αx + βy)} dρ`, with `f` even in `y`.
    ///
    /// Both halves are folded as `2 cos(βy)`, so the result is exactly even in `β`.
    pub fn evaluate(&self, alpha: f64, beta: f64) -> Complex64 {
        fold_sum(&self.nodes, alpha, beta)
    }
}

const LEAF: usize = 64;

fn fold_sum(nodes: &[WeightedNode], alpha: f64, beta: f64) -> Complex64 {
    if nodes.len() <= LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in nodes {
            let (s, c) = (alpha * n.x).sin_cos();
            let fold = 2.0 * (beta * n.y).cos();
            acc += n.w * Complex64::new(c * fold, s * fold);
        }
        return acc;
    }
    let mid = nodes.len() / 2;
    fold_sum(&nodes[..mid], alpha, beta) + fold_sum(&nodes[mid..], alpha, beta)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    depth: u32,
}

impl Panel {
    fn split(&self) -> [Panel; 4] {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        let d = self.depth + 1;
        [
            Panel {
                r0: self.r0,
                r1: rm,
                t0: self.t0,
                t1: tm,
                depth: d,
            },
            Panel {
                r0: self.r0,
                r1: rm,
                t0: tm,
                t1: self.t1,
                depth: d,
            },
            Panel {
                r0: rm,
                r1: self.r1,
                t0: self.t0,
                t1: tm,
                depth: d,
            },
            Panel {
                r0: rm,
                r1: self.r1,
                t0: tm,
                t1: self.t1,
                depth: d,
            },
        ]
    }
}

struct Leaf {
    panel: Panel,
    coarse: Complex64,
    fine: Complex64,
    l1: f64,
    error: f64,
    nodes: Vec<WeightedNode>,
}

#[derive(PartialEq)]
struct Candidate {
    error: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Builder<'a, F> {
    center_x: f64,
    gl: &'a GaussLegendre,
    f: F,
}

impl<F: Fn(f64, f64) -> Complex64> Builder<'_, F> {
    fn panel_nodes(&self, p: &Panel, out: &mut Vec<WeightedNode>) -> (Complex64, f64) {
        let (hr, mr) = (0.5 * (p.r1 - p.r0), 0.5 * (p.r1 + p.r0));
        let (ht, mt) = (0.5 * (p.t1 - p.t0), 0.5 * (p.t1 + p.t0));
        let mut sum = Complex64::new(0.0, 0.0);
        let mut l1 = 0.0;
        for (xr, wr) in self.gl.nodes.iter().zip(&self.gl.weights) {
            let r = mr + hr * xr;
            for (xt, wt) in self.gl.nodes.iter().zip(&self.gl.weights) {
                let t = mt + ht * xt;
                let (s, c) = t.sin_cos();
                let (x, y) = (self.center_x + r * c, r * s);
                let w = (self.f)(x, y) * (wr * hr * wt * ht * r);
                sum += w;
                l1 += w.norm();
                out.push(WeightedNode { x, y, w });
            }
        }
        (sum, l1)
    }

    fn leaf(&self, panel: Panel) -> Leaf {
        let mut scratch = Vec::new();
        let (coarse, _) = self.panel_nodes(&panel, &mut scratch);
        let mut nodes = Vec::with_capacity(4 * self.gl.len() * self.gl.len());
        let mut fine = Complex64::new(0.0, 0.0);
        let mut l1 = 0.0;
        for child in panel.split() {
            let (s, a) = self.panel_nodes(&child, &mut nodes);
            fine += s;
            l1 += a;
        }
        Leaf {
            panel,
            coarse,
            fine,
            l1,
            error: (coarse - fine).norm(),
            nodes,
        }
    }
}

/// Build a half-disk rule for `f` over the circle of `radius` centered at
/// `(center_x, 0)`, adapting until the coarse/fine disagreement summed over
/// panels is at most `spec.tolerance · ∫|f|`.
pub fn adaptive_half_disk<F>(
    center_x: f64,
    radius: f64,
    spec: &QuadratureSpec,
    f: F,
) -> Result<HalfDiskRule>
where
    F: Fn(f64, f64) -> Complex64,
{
    spec.validate()?;
    let gl = GaussLegendre::new(spec.order);
    let builder = Builder {
        center_x,
        gl: &gl,
        f,
    };

    // Base panels keep the detector phase below ~3 rad across each one.
    let omega = WAVENUMBER * spec.max_transverse_ratio;
    let nr = ((radius * omega / 3.0).ceil() as usize).max(2);
    let nt = ((PI * radius * omega / 3.0).ceil() as usize).max(4);

    let mut leaves: Vec<Option<Leaf>> = Vec::with_capacity(nr * nt);
    for i in 0..nr {
        for j in 0..nt {
            let panel = Panel {
                r0: radius * i as f64 / nr as f64,
                r1: radius * (i + 1) as f64 / nr as f64,
                t0: PI * j as f64 / nt as f64,
                t1: PI * (j + 1) as f64 / nt as f64,
                depth: 0,
            };
            leaves.push(Some(builder.leaf(panel)));
        }
    }

    let mut heap: BinaryHeap<Candidate> = leaves
        .iter()
        .enumerate()
        .filter_map(|(index, l)| {
            l.as_ref().map(|l| Candidate {
                error: l.error,
                index,
            })
        })
        .collect();

    let totals = |leaves: &[Option<Leaf>]| {
        leaves
            .iter()
            .flatten()
            .fold((0.0, 0.0), |(e, n), l| (e + l.error, n + l.l1))
    };
    let (mut error, mut l1) = totals(&leaves);

    while error > spec.tolerance * l1 {
        let Some(Candidate { index, .. }) = heap.pop() else {
            break;
        };
        let leaf = leaves[index]
            .take()
            .expect("heap entries point at live leaves");
        if leaf.panel.depth >= spec.max_depth {
            leaves[index] = Some(leaf);
            continue;
        }
        error -= leaf.error;
        l1 -= leaf.l1;
        for child in leaf.panel.split() {
            let new = builder.leaf(child);
            error += new.error;
            l1 += new.l1;
            heap.push(Candidate {
                error: new.error,
                index: leaves.len(),
            });
            leaves.push(Some(new));
        }
        if heap.is_empty() {
            break;
        }
    }

    let (error, l1) = totals(&leaves);
    let live: Vec<&Leaf> = leaves.iter().flatten().collect();
    let coarse = live
        .iter()
        .fold(Complex64::new(0.0, 0.0), |a, l| a + l.coarse);
    let fine = live
        .iter()
        .fold(Complex64::new(0.0, 0.0), |a, l| a + l.fine);
    if error > spec.tolerance * l1 {
        return Err(Error::Convergence {
            coarse,
            fine,
            error: error / l1,
            tolerance: spec.tolerance,
            context: None,
        });
    }
    let nodes: Vec<WeightedNode> = live.iter().flat_map(|l| l.nodes.iter().copied()).collect();
    Ok(HalfDiskRule {
        diagnostics: RuleDiagnostics {
            panels: live.len(),
            nodes: nodes.len(),
            coarse,
            fine,
            error_estimate: error,
            l1_norm: l1,
        },
        nodes,
    })
}
