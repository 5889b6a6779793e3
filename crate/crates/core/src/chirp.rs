//! Gauss-type sums and line heights for the Zak transform of a chirp.
//!
//! For a slope `p/q`:
//! - `c_n = (1/q) sum_{k<q} (-1)^{kp} e^{i pi (p/q) k^2} e^{-2 i pi n k / q}`, with `|c_n| = 1/sqrt(q)`;
//! - `xi_n(x) = (p/q) x + p/2 + n/q`;
//! - `A(x) = {n : xi_n(x) in [0, 1]}` (or `[0, 1)`);
//! - `B(n) = {x in [0, 1] : xi_n(x) in [0, 1]}`.
//!
//! Membership is decided on `2 p x + p q + 2 n` against `[0, 2q]`, which keeps
//! every integer part exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::RationalSlope;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// `[0, 1)`: every `x` sees exactly `q` indices.
    #[default]
    HalfOpen,
    /// `[0, 1]`.
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChirpCoefficient {
    pub n: i64,
    pub slope: RationalSlope,
    pub value: Complex64,
}

/// `c_{n,p,q}`, summed in increasing `k`. Each phase `pi N / q` is reduced
/// with `N` taken mod `2q` in integer arithmetic.
pub fn gauss_coefficient(n: i64, slope: RationalSlope) -> Complex64 {
    let (p, q) = (slope.p() as i128, slope.q() as i128);
    let n = n as i128;
    let modulus = 2 * q;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..q {
        let num = (q * k * p + p * k * k - 2 * n * k).rem_euclid(modulus);
        acc += Complex64::from_polar(1.0, PI * num as f64 / q as f64);
    }
    acc / q as f64
}

/// Checked entry point for raw integers.
pub fn gauss_coefficient_pq(n: i64, p: i64, q: i64) -> Result<ChirpCoefficient> {
    let slope = RationalSlope::new(p, q)?;
    Ok(ChirpCoefficient {
        n,
        slope,
        value: gauss_coefficient(n, slope),
    })
}

/// `(p/q) x + p/2 + n/q`.
pub fn xi_line(n: i64, slope: RationalSlope, x: f64) -> f64 {
    let (p, q) = (slope.p() as f64, slope.q() as f64);
    (p * x) / q + 0.5 * p + n as f64 / q
}

/// `2 p x + p q + 2 n`; the height `xi_n(x)` times `2q`.
fn scaled_height(n: i64, slope: RationalSlope, x: f64) -> f64 {
    let (p, q) = (slope.p(), slope.q());
    2.0 * p as f64 * x + (p * q + 2 * n) as f64
}

fn in_range(h: f64, q: i64, boundary: Boundary) -> bool {
    let top = 2.0 * q as f64;
    match boundary {
        Boundary::Closed => (0.0..=top).contains(&h),
        Boundary::HalfOpen => h >= 0.0 && h < top,
    }
}

/// `A(x)`, ascending.
pub fn admissible_set(slope: RationalSlope, x: f64, boundary: Boundary) -> Vec<i64> {
    let (p, q) = (slope.p(), slope.q());
    let base = 2.0 * p as f64 * x + (p * q) as f64;
    let lo = (-base / 2.0).floor() as i64 - 1;
    let hi = ((2.0 * q as f64 - base) / 2.0).ceil() as i64 + 1;
    (lo..=hi)
        .filter(|&n| in_range(scaled_height(n, slope, x), q, boundary))
        .collect()
}

/// `B(n)` as a closed interval with exact endpoints, or `None` when empty.
pub fn b_region(n: i64, slope: RationalSlope) -> Option<(Rational64, Rational64)> {
    let (p, q) = (slope.p(), slope.q());
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    if p == 0 {
        // xi_n(x) = n/q does not depend on x
        return if (0..=q).contains(&n) { Some((zero, one)) } else { None };
    }
    let a = Rational64::new(-p * q - 2 * n, 2 * p);
    let b = Rational64::new(2 * q - p * q - 2 * n, 2 * p);
    let (lo, hi) = if p > 0 { (a, b) } else { (b, a) };
    let lo = lo.max(zero);
    let hi = hi.min(one);
    (lo <= hi).then_some((lo, hi))
}

/// Indices `n` whose line meets the unit square for some `x` in `[0, 1]`.
pub fn active_indices(slope: RationalSlope) -> std::ops::RangeInclusive<i64> {
    let (p, q) = (slope.p(), slope.q());
    // 0 <= 2px + pq + 2n <= 2q for some x in [0,1]
    let lo = (-p * q - 2 * p.max(0)).div_euclid(2) - 1;
    let hi = (2 * q - p * q - 2 * p.min(0)).div_euclid(2) + 1;
    lo..=hi
}

/// Sorted `x` in `[0, 1]` where some `xi_n(x)` equals 0 or 1, plus both ends.
pub fn panel_breakpoints(slope: RationalSlope) -> Vec<f64> {
    let (p, q) = (slope.p(), slope.q());
    let mut out = vec![Rational64::from_integer(0), Rational64::from_integer(1)];
    if p != 0 {
        for n in active_indices(slope) {
            for j in [0, 1] {
                let x = Rational64::new(2 * j * q - p * q - 2 * n, 2 * p);
                if x > Rational64::from_integer(0) && x < Rational64::from_integer(1) {
                    out.push(x);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out.into_iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> RationalSlope {
        RationalSlope::new(p, q).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        for n in -5..5 {
            assert!((gauss_coefficient(n, s(0, 1)) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let c = gauss_coefficient(0, s(1, 2));
        assert!((c - Complex64::new(0.5, -0.5)).norm() < 1e-15);
        for n in -10..=10 {
            assert!((gauss_coefficient(n, s(3, 5)).norm() - 5f64.sqrt().recip()).abs() < 1e-12);
        }
        assert!(gauss_coefficient_pq(0, 2, 4).is_err());
    }

    #[test]
    fn coefficient_against_floating_definition() {
        for (p, q) in [(3, 5), (-7, 4), (2, 9), (5, 12)] {
            let sl = s(p, q);
            for n in [-13, -2, 0, 1, 7, 30] {
                let mut direct = Complex64::new(0.0, 0.0);
                for k in 0..q {
                    let kf = k as f64;
                    let sign = if (k * p).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    direct += sign
                        * Complex64::from_polar(1.0, PI * p as f64 / q as f64 * kf * kf)
                        * Complex64::from_polar(1.0, -2.0 * PI * n as f64 * kf / q as f64);
                }
                direct /= q as f64;
                assert!((direct - gauss_coefficient(n, sl)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn line_heights() {
        assert_eq!(xi_line(0, s(2, 1), 0.0), 1.0);
        assert_eq!(xi_line(-1, s(2, 1), 0.0), 0.0);
        let sl = s(3, 7);
        let d = xi_line(2, sl, 0.75) - xi_line(2, sl, 0.25);
        assert!((d / 0.5 - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn admissible_examples() {
        assert_eq!(admissible_set(s(2, 1), 0.0, Boundary::Closed), vec![-1, 0]);
        assert_eq!(admissible_set(s(1, 1), 0.5, Boundary::Closed), vec![-1, 0]);
        assert_eq!(admissible_set(s(2, 1), 0.0, Boundary::HalfOpen), vec![-1]);
        assert_eq!(admissible_set(s(0, 1), 0.3, Boundary::Closed), vec![0, 1]);
        assert_eq!(admissible_set(s(0, 1), 0.3, Boundary::HalfOpen), vec![0]);
    }

    #[test]
    fn b_region_examples() {
        let r = b_region(-1, s(2, 1)).unwrap();
        assert_eq!(r, (Rational64::new(0, 1), Rational64::new(1, 2)));
        assert!(b_region(40, s(3, 2)).is_none());
        assert!(b_region(-40, s(-3, 2)).is_none());
        assert_eq!(b_region(1, s(0, 1)).unwrap(), (Rational64::new(0, 1), Rational64::new(1, 1)));
        assert!(b_region(2, s(0, 1)).is_none());
    }

    #[test]
    fn breakpoints_partition_into_constant_sets() {
        for (p, q) in [(1, 1), (2, 1), (1, 2), (3, 2), (-5, 3)] {
            let sl = s(p, q);
            let bps = panel_breakpoints(sl);
            assert_eq!(bps.first(), Some(&0.0));
            assert_eq!(bps.last(), Some(&1.0));
            for w in bps.windows(2) {
                let (a, b) = (w[0], w[1]);
                let mid = admissible_set(sl, 0.5 * (a + b), Boundary::HalfOpen);
                assert_eq!(mid.len() as i64, q);
                for x in [a + 1e-9 * (b - a), b - 1e-9 * (b - a)] {
                    assert_eq!(admissible_set(sl, x, Boundary::HalfOpen), mid, "p/q={p}/{q} x={x}");
                }
            }
        }
    }
}
