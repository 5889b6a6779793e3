//! Composite Gauss-Legendre quadrature on caller-declared panels.
//!
//! Integrands here are analytic between breakpoints but may oscillate
//! strongly (chirps, large modulations). Panels are split at every declared
//! breakpoint and then walked left to right so that no panel is longer than
//! `max_panel` and no panel accumulates more than `max_phase` radians of the
//! caller's phase-rate bound. Summation order inside a panel is fixed
//! (ascending nodes), so results do not depend on evaluation order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidInput(format!(
                "quadrature order must be >= 2, got {order}"
            )));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel estimate of `int_a^b f`.
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    pub fn integrate_real<F>(&self, mut f: F, a: f64, b: f64) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panelization controls shared by every oscillatory quadrature in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per panel.
    pub order: usize,
    /// Upper bound on the phase (radians) swept inside one panel.
    pub max_phase: f64,
    /// Upper bound on a panel's length.
    pub max_panel: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 24,
            max_phase: 16.0,
            max_panel: 0.5,
        }
    }
}

impl QuadratureSpec {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }
}

/// A Gauss-Legendre rule bound to a panelization policy.
#[derive(Clone, Debug)]
pub struct Integrator {
    rule: GaussLegendre,
    spec: QuadratureSpec,
}

impl Integrator {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        if !(spec.max_phase > 0.0 && spec.max_panel > 0.0) {
            return Err(Error::InvalidInput(format!(
                "max_phase and max_panel must be positive: {spec:?}"
            )));
        }
        Ok(Self {
            rule: GaussLegendre::new(spec.order)?,
            spec,
        })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Splits `intervals` at `breakpoints`, then walks each piece so that every
    /// panel respects `max_panel` and `rate(a, b) * (b - a) <= max_phase`.
    /// `rate(a, b)` must bound the integrand's phase derivative on `[a, b]`.
    pub fn panels<R>(&self, intervals: &[(f64, f64)], breakpoints: &[f64], rate: R) -> Vec<(f64, f64)>
    where
        R: Fn(f64, f64) -> f64,
    {
        let mut out = Vec::new();
        for &(lo, hi) in intervals {
            if !(hi > lo) {
                continue;
            }
            let mut cuts = vec![lo];
            cuts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
            cuts.push(hi);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            for w in cuts.windows(2) {
                self.walk(w[0], w[1], &rate, &mut out);
            }
        }
        out
    }

    fn walk<R>(&self, a: f64, b: f64, rate: &R, out: &mut Vec<(f64, f64)>)
    where
        R: Fn(f64, f64) -> f64,
    {
        let tiny = 1e-13 * (1.0 + a.abs().max(b.abs()));
        let mut x = a;
        while b - x > tiny {
            let mut h = self.spec.max_panel.min(b - x);
            for _ in 0..4 {
                let r = rate(x, x + h).abs();
                if r * h <= self.spec.max_phase {
                    break;
                }
                h = self.spec.max_phase / r;
            }
            let mut end = x + h;
            if b - end <= tiny {
                end = b;
            }
            out.push((x, end));
            x = end;
        }
    }

    pub fn integrate_panels<F>(&self, mut f: F, panels: &[(f64, f64)]) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, b) in panels {
            acc += self.rule.integrate(&mut f, a, b);
        }
        acc
    }

    pub fn integrate_panels_real<F>(&self, mut f: F, panels: &[(f64, f64)]) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        panels
            .iter()
            .map(|&(a, b)| self.rule.integrate_real(&mut f, a, b))
            .sum()
    }

    /// Convenience: panelize then integrate.
    pub fn integrate<F, R>(&self, f: F, intervals: &[(f64, f64)], breakpoints: &[f64], rate: R) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
        R: Fn(f64, f64) -> f64,
    {
        let panels = self.panels(intervals, breakpoints, rate);
        self.integrate_panels(f, &panels)
    }
}

/// Composite Gauss-Legendre estimate of `int_a^b g` with panels split at
/// `breakpoints` (those outside `(a, b)` are ignored).
pub fn quad_integrate<F>(g: F, a: f64, b: f64, order: usize, breakpoints: &[f64]) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite(format!("integration bounds [{a}, {b}]")));
    }
    if !(a < b) {
        return Err(Error::InvalidInput(format!("need a < b, got [{a}, {b}]")));
    }
    let integrator = Integrator::new(QuadratureSpec::with_order(order))?;
    Ok(integrator.integrate(g, &[(a, b)], breakpoints, |_, _| 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn nodes_and_weights_are_consistent() {
        for n in [2, 3, 7, 24, 64] {
            let gl = GaussLegendre::new(n).unwrap();
            let wsum: f64 = gl.weights().iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}");
            assert!(gl.nodes().windows(2).all(|w| w[0] < w[1]));
            // exact for x^(2n-2)
            let k = 2 * n as i32 - 2;
            let v = gl.integrate_real(|x| x.powi(k), -1.0, 1.0);
            assert!((v - 2.0 / (k as f64 + 1.0)).abs() < 1e-13, "n={n}: {v}");
        }
        assert!(GaussLegendre::new(1).is_err());
    }

    #[test]
    fn constant_and_full_period() {
        let one = quad_integrate(|_| c(1.0), 0.0, 1.0, 8, &[]).unwrap();
        assert!((one - c(1.0)).norm() < 1e-15);
        let osc = quad_integrate(|t| Complex64::from_polar(1.0, 2.0 * PI * t), 0.0, 1.0, 24, &[]).unwrap();
        assert!(osc.norm() < 1e-12);
    }

    #[test]
    fn gaussian_on_symmetric_window() {
        // erf(6 sqrt(pi)) differs from 1 by ~1e-50
        let v = quad_integrate(|t| c((-PI * t * t).exp()), -6.0, 6.0, 24, &[]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn gaussian_error_decreases_with_order() {
        let mut prev = f64::INFINITY;
        for order in [4, 8, 16, 32] {
            let v = quad_integrate(|t| c((-PI * t * t).exp()), -6.0, 6.0, order, &[]).unwrap();
            let err = (v.re - 1.0).abs();
            assert!(err <= prev || err < 1e-14, "order {order}: {err} vs {prev}");
            prev = err;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(matches!(
            quad_integrate(|_| c(1.0), 0.0, f64::INFINITY, 8, &[]),
            Err(Error::NonFinite(_))
        ));
        assert!(quad_integrate(|_| c(1.0), 1.0, 0.0, 8, &[]).is_err());
    }

    #[test]
    fn panels_respect_breakpoints_and_phase_budget() {
        let integ = Integrator::new(QuadratureSpec::default()).unwrap();
        let panels = integ.panels(&[(-2.0, 3.0)], &[0.25, -5.0, 1.0], |a, b| 10.0 * a.abs().max(b.abs()));
        assert_eq!(panels.first().unwrap().0, -2.0);
        assert_eq!(panels.last().unwrap().1, 3.0);
        for w in panels.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        for &(a, b) in &panels {
            assert!(b - a <= 0.5 + 1e-15);
            assert!(10.0 * a.abs().max(b.abs()) * (b - a) <= 16.0 + 1e-9);
            assert!(!(a < 0.25 && b > 0.25) && !(a < 1.0 && b > 1.0));
        }
    }
}
