//! Integer-order Bessel functions of the first kind.

use std::f64::consts::PI;

/// `J_n(x)` from the periodic integral `(1/2π) ∫ cos(nτ - x sin τ) dτ`.
///
/// The trapezoidal rule on a periodic analytic integrand converges
/// geometrically once the node count exceeds `|x| + n` by a margin.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let nodes = 48 + 2 * (x.abs().ceil() as usize + n as usize);
    let h = 2.0 * PI / nodes as f64;
    let nf = n as f64;
    let sum: f64 = (0..nodes)
        .map(|j| {
            let t = j as f64 * h;
            (nf * t - x * t.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j(0, x)
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j(1, x)
}

/// `2 J1(x) / x`, equal to 1 at the origin.
pub fn jinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 8.0
    } else {
        2.0 * bessel_j1(x) / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table 9.1
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j0(10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-14);
        assert!((bessel_j1(10.0) - 0.043_472_746_168_861_44).abs() < 1e-14);
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!(bessel_j1(0.0).abs() < 1e-15);
    }

    #[test]
    fn first_zero_of_j1() {
        assert!(bessel_j1(3.831_705_970_207_512).abs() < 1e-14);
    }

    #[test]
    fn jinc_continuity() {
        assert!((jinc(1e-9) - 1.0).abs() < 1e-15);
        assert!((jinc(1e-3) - 2.0 * bessel_j1(1e-3) / 1e-3).abs() < 1e-12);
    }
}
