//! Zak transform on the unit lattice, `Zf(x, xi) = sum_k f(x + k) e^{-2 i pi k xi}`.
//!
//! Signals are compactly supported, so the sum is finite and evaluated
//! exactly. Synthesis goes through separable patches `u(x) v(xi)` on the unit
//! square, whose inverse is `f(x + m) = u(x) v^(-m)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frft::{FrftConvention, FrftPlan};
use crate::numerics::{
    signal_norm, Grid, Integrator, LatticePiece, LatticeSeries, QuadratureSpec, SignalExpr, VerificationReport,
};

/// Lattice offsets `k` with `x + k` inside the support window of `f`.
pub fn zak_terms(f: &SignalExpr, x: f64) -> std::ops::RangeInclusive<i64> {
    let (a, b) = f.support_window();
    ((a - x).ceil() as i64)..=((b - x).floor() as i64)
}

/// Exact finite Zak sum.
pub fn zak_eval(f: &SignalExpr, x: f64, xi: f64) -> Result<Complex64> {
    f.validate()?;
    if !x.is_finite() || !xi.is_finite() {
        return Err(Error::NonFinite(format!("zak point ({x}, {xi})")));
    }
    Ok(zak_sum(f, x, xi))
}

pub(crate) fn zak_sum(f: &SignalExpr, x: f64, xi: f64) -> Complex64 {
    // reducing first makes xi -> xi + 1 exact whenever the shift is
    let xi = xi - xi.floor();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in zak_terms(f, x) {
        let v = f.eval(x + k as f64);
        if v.re != 0.0 || v.im != 0.0 {
            acc += v * Complex64::from_polar(1.0, -2.0 * PI * k as f64 * xi);
        }
    }
    acc
}

/// A separable Zak-domain function `u(x) v(xi)` on `[0, 1]^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZakPatch {
    u: SignalExpr,
    v: SignalExpr,
}

impl ZakPatch {
    /// `u` and `v` must be supported in `[0, 1]`.
    pub fn new(u: SignalExpr, v: SignalExpr) -> Result<Self> {
        for (name, s) in [("u", &u), ("v", &v)] {
            s.validate()?;
            let (lo, hi) = s.support_window();
            if lo < 0.0 || hi > 1.0 {
                return Err(Error::InvalidInput(format!(
                    "patch factor {name} has support [{lo}, {hi}] outside [0, 1]"
                )));
            }
        }
        Ok(Self { u, v })
    }

    pub fn u(&self) -> &SignalExpr {
        &self.u
    }

    pub fn v(&self) -> &SignalExpr {
        &self.v
    }

    /// `supp u x supp v`.
    pub fn rect(&self) -> ((f64, f64), (f64, f64)) {
        (self.u.support_window(), self.v.support_window())
    }

    pub fn eval(&self, x: f64, xi: f64) -> Complex64 {
        self.u.eval(x) * self.v.eval(xi)
    }

    /// `int_0^1 v(xi) e^{2 i pi m xi} dxi` by panel quadrature.
    pub fn coefficient(&self, m: i64, order: usize) -> Result<Complex64> {
        circle_coefficient(&self.v, m, order)
    }

    /// The same coefficient from the closed-form transform, `v^(-m)`.
    pub fn coefficient_exact(&self, m: i64) -> Option<Complex64> {
        self.v.fourier(-(m as f64))
    }

    /// Lattice signal `sum_{m in range} u(t - m) v^(-m)`.
    pub fn synthesize(&self, m_min: i64, m_max: i64, order: usize) -> Result<SignalExpr> {
        if m_max < m_min {
            return Err(Error::InvalidInput(format!("empty m-range {m_min}..={m_max}")));
        }
        let coeffs = (m_min..=m_max)
            .map(|m| match self.coefficient_exact(m) {
                Some(c) => Ok(c),
                None => self.coefficient(m, order),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SignalExpr::Lattice(LatticeSeries::new(
            m_min,
            vec![LatticePiece {
                shape: self.u.clone(),
                coeffs,
            }],
        )?))
    }
}

pub(crate) fn circle_coefficient(v: &SignalExpr, m: i64, order: usize) -> Result<Complex64> {
    let integ = Integrator::new(QuadratureSpec::with_order(order))?;
    let rate = 2.0 * PI * (m as f64).abs();
    let intervals: Vec<(f64, f64)> = v
        .support_intervals()
        .into_iter()
        .map(|(a, b)| (a.max(0.0), b.min(1.0)))
        .filter(|(a, b)| b > a)
        .collect();
    Ok(integ.integrate(
        |xi| v.eval(xi) * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * xi),
        &intervals,
        &v.breakpoints(),
        |a, b| rate + v.phase_rate(a, b),
    ))
}

/// `f(x + m) = int_0^1 Z(x, xi) e^{2 i pi m xi} dxi = u(x) v^(-m)`.
pub fn inverse_zak(z: &ZakPatch, x: f64, m: i64, order: usize) -> Result<Complex64> {
    Ok(z.u.eval(x) * z.coefficient(m, order)?)
}

/// Grid and tolerance for [`verify_zak_identities`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZakCheckSpec {
    pub nx: usize,
    pub nxi: usize,
    pub order: usize,
    pub tol: f64,
}

impl Default for ZakCheckSpec {
    fn default() -> Self {
        Self {
            nx: 16,
            nxi: 16,
            order: 24,
            tol: 1e-6,
        }
    }
}

/// Maximal Poisson truncation (`|m| < 2M` with `M` a power of two).
pub const POISSON_MAX_M: i64 = 1 << 14;

pub(crate) fn breakpoints_mod_one(f: &SignalExpr) -> Vec<f64> {
    let mut b: Vec<f64> = f.breakpoints().into_iter().map(|t| t - t.floor()).collect();
    // the finite sum switches terms on and off at the window ends
    let (lo, hi) = f.support_window();
    b.extend([lo - lo.floor(), hi - hi.floor()]);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Fourier transform source for the Poisson check.
enum Spectrum<'a> {
    Analytic(&'a SignalExpr),
    Quadrature(FrftPlan<'a>),
}

impl Spectrum<'_> {
    fn eval(&self, eta: f64) -> Complex64 {
        match self {
            Spectrum::Analytic(f) => f.fourier(eta).expect("checked analytic"),
            Spectrum::Quadrature(p) => p.eval(eta),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Spectrum::Analytic(_) => "closed form",
            Spectrum::Quadrature(_) => "quadrature at alpha = pi/2",
        }
    }
}

/// Unitarity, quasi-periodicity, periodicity, Poisson summation (with a
/// tail-bound self-consistency check), and both marginals.
pub fn verify_zak_identities(f: &SignalExpr, spec: &ZakCheckSpec) -> Result<Vec<VerificationReport>> {
    f.validate()?;
    let name = f.to_string();
    let xs = Grid::midpoints(0.0, 1.0, spec.nx)?;
    let xis = Grid::midpoints(0.0, 1.0, spec.nxi)?;
    let integ = Integrator::new(QuadratureSpec::with_order(spec.order))?;
    let x_breaks = breakpoints_mod_one(f);
    let (a, b) = f.support_window();
    let span = (b - a).ceil() as usize + 2;
    let mut reports = Vec::new();

    // Unitarity: x by panels, xi by an N-point uniform rule, exact for trigonometric
    // polynomials of degree below N.
    let n_uniform = 2 * span + 4;
    let x_panels = integ.panels(&[(0.0, 1.0)], &x_breaks, |_, _| 0.0);
    let zz = integ.integrate_panels_real(
        |x| {
            (0..n_uniform)
                .map(|j| zak_sum(f, x, (j as f64 + 0.5) / n_uniform as f64).norm_sqr())
                .sum::<f64>()
                / n_uniform as f64
        },
        &x_panels,
    );
    let norm = signal_norm(f)?;
    reports.push(
        VerificationReport::new(format!("zak.unitarity[{name}]"), (zz.sqrt() - norm).abs(), spec.tol)
            .with("zak_norm", zz.sqrt())
            .with("signal_norm", norm)
            .with("xi_rule_points", n_uniform as u64)
            .with("order", spec.order as u64),
    );

    let mut quasi: f64 = 0.0;
    let mut periodic: f64 = 0.0;
    for x in xs.points() {
        for xi in xis.points() {
            let z = zak_sum(f, x, xi);
            for n in [-2i64, -1, 1, 2, 3] {
                let shifted = zak_sum(f, x + n as f64, xi);
                quasi = quasi.max((shifted - Complex64::from_polar(1.0, 2.0 * PI * n as f64 * xi) * z).norm());
                periodic = periodic.max((zak_sum(f, x, xi + n as f64) - z).norm());
            }
        }
    }
    let grid_meta = format!("{}x{} midpoints", spec.nx, spec.nxi);
    reports.push(
        VerificationReport::new(format!("zak.quasi_periodicity[{name}]"), quasi, spec.tol)
            .with("grid", grid_meta.clone())
            .with("shifts", "-2,-1,1,2,3"),
    );
    reports.push(
        VerificationReport::new(format!("zak.periodicity[{name}]"), periodic, spec.tol)
            .with("grid", grid_meta.clone())
            .with("shifts", "-2,-1,1,2,3"),
    );

    let spectrum = if f.fourier(0.0).is_some() {
        Spectrum::Analytic(f)
    } else {
        Spectrum::Quadrature(FrftPlan::new(f, PI / 2.0, FrftConvention::Paper, &QuadratureSpec::with_order(spec.order))?)
    };
    reports.extend(poisson_reports(f, &name, &spectrum, &xs, &xis, spec)?);

    // Marginals.
    let mut time_err: f64 = 0.0;
    for x in xs.points() {
        let kmax = zak_terms(f, x).map(|k| k.abs()).max().unwrap_or(0) as f64;
        let m = integ.integrate(|xi| zak_sum(f, x, xi), &[(0.0, 1.0)], &[], |_, _| 2.0 * PI * kmax);
        time_err = time_err.max((m - f.eval(x)).norm());
    }
    reports.push(
        VerificationReport::new(format!("zak.time_marginal[{name}]"), time_err, spec.tol)
            .with("points", spec.nx as u64)
            .with("order", spec.order as u64),
    );
    let mut freq_err: f64 = 0.0;
    let probes: Vec<f64> = xis.points().flat_map(|xi| [xi, xi - 2.0, xi + 3.0]).collect();
    for &xi in &probes {
        let m = integ.integrate(
            |x| Complex64::from_polar(1.0, -2.0 * PI * x * xi) * zak_sum(f, x, xi),
            &[(0.0, 1.0)],
            &x_breaks,
            |_, _| 2.0 * PI * (xi.abs() + span as f64),
        );
        freq_err = freq_err.max((m - spectrum.eval(xi)).norm());
    }
    reports.push(
        VerificationReport::new(format!("zak.frequency_marginal[{name}]"), freq_err, spec.tol)
            .with("points", probes.len() as u64)
            .with("spectrum", spectrum.name()),
    );
    Ok(reports)
}

/// Smallest power of two `M >= 16` past which sampled `|f^|` stays below
/// `1e-10` of its peak, capped at [`POISSON_MAX_M`].
fn poisson_truncation(spectrum: &Spectrum<'_>, xis: &Grid) -> i64 {
    let peak = xis.points().map(|xi| spectrum.eval(xi).norm()).fold(0.0, f64::max);
    let mut m = 16i64;
    while m < POISSON_MAX_M {
        let tail = xis
            .points()
            .step_by((xis.len / 4).max(1))
            .flat_map(|xi| [1.0, 1.5, 2.0].map(|s| (xi, s)))
            .map(|(xi, s)| {
                let k = s * m as f64;
                spectrum.eval(xi + k).norm().max(spectrum.eval(xi - k).norm())
            })
            .fold(0.0, f64::max);
        if tail <= 1e-10 * peak {
            break;
        }
        m *= 2;
    }
    m
}

fn poisson_reports(
    f: &SignalExpr,
    name: &str,
    spectrum: &Spectrum<'_>,
    xs: &Grid,
    xis: &Grid,
    spec: &ZakCheckSpec,
) -> Result<Vec<VerificationReport>> {
    let m = poisson_truncation(spectrum, xis);
    let decay = f.fourier_decay();
    let mut residual: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut bound_max: f64 = 0.0;
    let mut heuristic_tail: f64 = 0.0;
    for xi in xis.points() {
        // de la Vallee-Poussin weights: 1 for |k| <= M, linear to 0 at |k| = 2M.
        let terms: Vec<(f64, Complex64)> = (-2 * m + 1..2 * m)
            .map(|k| {
                let w = if k.abs() <= m { 1.0 } else { (2 * m - k.abs()) as f64 / m as f64 };
                (k as f64, spectrum.eval(xi + k as f64) * w)
            })
            .collect();
        if decay.is_none() {
            heuristic_tail = heuristic_tail.max(
                terms
                    .iter()
                    .filter(|(k, _)| k.abs() > m as f64)
                    .map(|(_, v)| v.norm())
                    .fold(0.0, f64::max)
                    * 4.0
                    * m as f64,
            );
        }
        for x in xs.points() {
            let mut zf = Complex64::new(0.0, 0.0);
            for (k, v) in &terms {
                zf += v * Complex64::from_polar(1.0, 2.0 * PI * k * x);
            }
            let rhs = Complex64::from_polar(1.0, 2.0 * PI * x * xi) * zf;
            let r = (zak_sum(f, x, xi) - rhs).norm();
            residual = residual.max(r);
            let bound = match &decay {
                Some(d) => poisson_tail_bound(d, m, x, xi),
                None => heuristic_tail,
            };
            bound_max = bound_max.max(bound);
            worst_excess = worst_excess.max(r - bound);
        }
    }
    let rigorous = decay.is_some();
    let main = VerificationReport::new(format!("zak.poisson[{name}]"), residual, spec.tol)
        .with("truncation_m", m)
        .with("weights", "de la Vallee-Poussin, |k| < 2M")
        .with("spectrum", spectrum.name())
        .with("tail_bound_max", bound_max)
        .with("tail_bound_rigorous", rigorous);
    let consistency = VerificationReport::new(format!("zak.poisson_tail_consistency[{name}]"), worst_excess.max(0.0), 1e-12)
        .with("tail_bound_max", bound_max)
        .with("tail_bound_rigorous", rigorous)
        .with("truncation_m", m);
    Ok(vec![main, consistency])
}

/// Bound on the weighted Poisson tail at `(x, xi)`, `|xi| < M`.
///
/// Jump part: Abel summation against `sum e^{2 i pi k (x - t_i)}`, whose partial
/// sums are at most `1/|sin pi (x - t_i)|`, and the weighted amplitudes have
/// total variation `2/(2M +- xi)` on each side. Smooth part: `2 c / (M - |xi|)`.
pub fn poisson_tail_bound(d: &crate::numerics::DecayModel, m: i64, x: f64, xi: f64) -> f64 {
    let mf = m as f64;
    let mut b = 2.0 * d.coeff / (mf - xi.abs());
    for (t, j) in &d.jumps {
        let s = (PI * (x - t)).sin().abs();
        b += j.norm() / (2.0 * PI * s) * (2.0 / (2.0 * mf + xi) + 2.0 / (2.0 * mf - xi));
    }
    b
}
