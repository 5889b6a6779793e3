use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reduced fraction `p/q` read as `cot(alpha) = p/q` with `alpha` in `(0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct RationalSlope {
    p: i64,
    q: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

impl RationalSlope {
    /// Requires `q >= 1` and `gcd(|p|, q) = 1`.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 || gcd(p, q) != 1 {
            return Err(Error::NotCoprime { p, q });
        }
        Ok(Self { p, q })
    }

    /// Reduces `num/den` to lowest terms, moving the sign to the numerator.
    pub fn reduced(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::NotCoprime { p: num, q: den });
        }
        let g = gcd(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        Self::new(sign * num / g, sign * den / g)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn ratio(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Length of the closed geodesic of this slope on the unit torus.
    pub fn length(&self) -> f64 {
        ((self.p * self.p + self.q * self.q) as f64).sqrt()
    }

    pub fn alpha(&self) -> f64 {
        (self.q as f64).atan2(self.p as f64)
    }

    /// `q / sqrt(p^2 + q^2)`, always positive.
    pub fn sin_alpha(&self) -> f64 {
        self.q as f64 / self.length()
    }

    pub fn cos_alpha(&self) -> f64 {
        self.p as f64 / self.length()
    }
}

impl TryFrom<(i64, i64)> for RationalSlope {
    type Error = Error;

    fn try_from((p, q): (i64, i64)) -> Result<Self> {
        Self::new(p, q)
    }
}

impl From<RationalSlope> for (i64, i64) {
    fn from(s: RationalSlope) -> Self {
        (s.p, s.q)
    }
}

impl fmt::Display for RationalSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl std::str::FromStr for RationalSlope {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidInput(format!("not a rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Self::new(parse(n)?, parse(d)?),
            None => Self::new(parse(s)?, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_coprime() {
        assert_eq!(
            RationalSlope::new(2, 4),
            Err(Error::NotCoprime { p: 2, q: 4 })
        );
        assert!(RationalSlope::new(1, 0).is_err());
        assert!(RationalSlope::new(1, -2).is_err());
        assert!(RationalSlope::new(0, 1).is_ok());
        assert!(RationalSlope::new(0, 2).is_err());
    }

    #[test]
    fn reduces_and_normalizes_sign() {
        let s = RationalSlope::reduced(4, -6).unwrap();
        assert_eq!((s.p(), s.q()), (-2, 3));
        assert_eq!("3/5".parse::<RationalSlope>().unwrap(), RationalSlope::new(3, 5).unwrap());
        assert_eq!("-2".parse::<RationalSlope>().unwrap(), RationalSlope::new(-2, 1).unwrap());
    }

    #[test]
    fn angle_is_in_open_upper_half() {
        for (p, q) in [(2, 1), (-3, 2), (1, 1), (0, 1), (-7, 5)] {
            let s = RationalSlope::new(p, q).unwrap();
            let a = s.alpha();
            assert!(a > 0.0 && a < std::f64::consts::PI);
            assert!((a.cos() / a.sin() - s.ratio()).abs() < 1e-14);
            assert!((a.sin() - s.sin_alpha()).abs() < 1e-15);
            assert!((a.cos() - s.cos_alpha()).abs() < 1e-15);
        }
    }
}
