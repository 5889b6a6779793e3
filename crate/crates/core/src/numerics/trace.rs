use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform evaluation grid `start + i * step`, `i < len`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !start.is_finite() || !step.is_finite() {
            return Err(Error::NonFinite(format!("grid start {start}, step {step}")));
        }
        if step <= 0.0 || len == 0 {
            return Err(Error::InvalidInput(format!(
                "grid needs step > 0 and at least one point (step {step}, len {len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// `n` points from `a` to `b` inclusive; `n = 1` gives the single point `a`.
    pub fn linspace(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 1 {
            return Self::new(a, 1.0, 1);
        }
        if !(b > a) {
            return Err(Error::InvalidInput(format!("grid range needs a < b, got {a}:{b}")));
        }
        Self::new(a, (b - a) / (n - 1) as f64, n)
    }

    /// Cell midpoints of `n` equal cells of `[a, b]`.
    pub fn midpoints(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || n == 0 {
            return Err(Error::InvalidInput(format!("midpoint grid needs a < b and n > 0, got {a}:{b}:{n}")));
        }
        let h = (b - a) / n as f64;
        Self::new(a + 0.5 * h, h, n)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }
}

impl std::str::FromStr for Grid {
    type Err = Error;

    /// `a:b:n`, inclusive endpoints.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!("grid {s:?}: expected a:b:n")));
        }
        let bad = || Error::InvalidInput(format!("grid {s:?}: expected a:b:n"));
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Self::linspace(a, b, n)
    }
}

/// Complex samples on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTrace {
    start: f64,
    step: f64,
    values: Vec<Complex64>,
}

impl SampledTrace {
    pub fn new(start: f64, step: f64, values: Vec<Complex64>) -> Result<Self> {
        Grid::new(start, step, values.len())?;
        Ok(Self { start, step, values })
    }

    pub fn from_grid(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len
            )));
        }
        Self::new(grid.start, grid.step, values)
    }

    /// Samples `f` at every grid point, in grid order.
    pub fn tabulate<F: FnMut(f64) -> Complex64>(grid: &Grid, mut f: F) -> Self {
        let values = grid.points().map(&mut f).collect();
        Self {
            start: grid.start,
            step: grid.step,
            values,
        }
    }

    pub fn grid(&self) -> Grid {
        Grid {
            start: self.start,
            step: self.step,
            len: self.values.len(),
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.point(i), *v))
    }

    pub fn map<F: FnMut(f64, Complex64) -> Complex64>(&self, mut f: F) -> Self {
        Self {
            start: self.start,
            step: self.step,
            values: self.iter().map(|(t, v)| f(t, v)).collect(),
        }
    }

    /// `max_i |self_i - other_i|`; grids must coincide.
    pub fn max_abs_diff(&self, other: &SampledTrace) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Trapezoidal `sqrt(sum |v|^2 step)`.
    pub fn l2_norm(&self) -> f64 {
        let n = self.values.len();
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = if n > 1 && (i == 0 || i == n - 1) { 0.5 } else { 1.0 };
            acc += w * v.norm_sqr();
        }
        (acc * self.step).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn check_same_grid(&self, other: &SampledTrace) -> Result<()> {
        if self.values.len() != other.values.len() || self.start != other.start || self.step != other.step {
            return Err(Error::InvalidInput("traces live on different grids".into()));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,re,im")?;
        for (t, v) in self.iter() {
            writeln!(w, "{t:.16e},{:.16e},{:.16e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    /// Reads the `t,re,im` format; `t` must be uniformly spaced.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty csv".into()))?
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        if header.trim() != "t,re,im" {
            return Err(Error::InvalidInput(format!("unexpected csv header {header:?}")));
        }
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::InvalidInput(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(format!("bad csv row {line:?}")))?;
            if cols.len() != 3 {
                return Err(Error::InvalidInput(format!("bad csv row {line:?}")));
            }
            ts.push(cols[0]);
            values.push(Complex64::new(cols[1], cols[2]));
        }
        if values.is_empty() {
            return Err(Error::InvalidInput("csv has no rows".into()));
        }
        let step = if ts.len() > 1 { ts[1] - ts[0] } else { 1.0 };
        for (i, t) in ts.iter().enumerate() {
            if (t - (ts[0] + i as f64 * step)).abs() > 1e-9 * (1.0 + t.abs()) {
                return Err(Error::InvalidInput("csv grid is not uniform".into()));
            }
        }
        Self::new(ts[0], step, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_construction() {
        let g = Grid::linspace(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.points().collect::<Vec<_>>(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!("-3:3:121".parse::<Grid>().unwrap().len, 121);
        assert!(Grid::new(0.0, 0.0, 3).is_err());
        assert!(Grid::new(0.0, 1.0, 0).is_err());
        let m = Grid::midpoints(0.0, 1.0, 4).unwrap();
        assert_eq!(m.point(0), 0.125);
        assert_eq!(m.end(), 0.875);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let g = Grid::linspace(-2.0, 3.0, 11).unwrap();
        let tr = SampledTrace::tabulate(&g, |t| Complex64::new(t.sin() / 3.0, std::f64::consts::PI * t));
        let csv = tr.to_csv_string();
        assert!(csv.starts_with("t,re,im\n"));
        let back = SampledTrace::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(back.values(), tr.values());
        assert_eq!(back.len(), 11);
    }

    #[test]
    fn rejects_empty_trace() {
        assert!(SampledTrace::new(0.0, 1.0, vec![]).is_err());
    }
}
