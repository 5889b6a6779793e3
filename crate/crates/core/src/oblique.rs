//! Oblique marginals of the Zak transform at rational cotangent `r = p/q`.
//!
//! For compactly supported `f`,
//!
//! ```text
//! int f(t) e^{-i pi r t^2} e^{-2 i pi w t} dt
//!     = int_0^1 e^{-2 i pi w x - i pi r x^2} sum_{n in A(x)} conj(c_n) Zf(x, w + xi_n(x)) dx
//! ```
//!
//! and `F_alpha f(xi)` is the right side at `w = xi / sin(alpha)`, times
//! `c_alpha e^{-i pi r xi^2}`. The coefficient enters conjugated: with `c_n`
//! itself the identity only holds for `q = 1` (where `c_n = 1`).
//! [`MomentVariant`] keeps the unconjugated form and a replaceable `sin(alpha)`
//! for negative controls.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::chirp::{active_indices, admissible_set, gauss_coefficient, panel_breakpoints, Boundary};
use crate::error::{Error, Result};
use crate::frft::{c_alpha, FrftConvention, FrftPlan};
use crate::numerics::{signal_norm, Grid, Integrator, QuadratureSpec, RationalSlope, SampledTrace, SignalExpr, VerificationReport};
use crate::torus::{height_section, CircleIntervalSet};
use crate::zak::{breakpoints_mod_one, zak_sum};

/// Formula variants. The default is the identity that holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[derive(Default)]
pub struct MomentVariant {
    /// Use `c_n` in place of `conj(c_n)`.
    pub unconjugated: bool,
    /// Replaces `sin(alpha) = q / sqrt(p^2 + q^2)` in the frequency scaling.
    pub sin_alpha: Option<f64>,
}


/// Panelization of `[0, 1]` for one signal and slope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObliqueQuadratureSpec {
    /// Sorted, in `[0, 1]`; `A(x)` and every `f(x + k)` are smooth between them.
    pub breakpoints: Vec<f64>,
    pub quad: QuadratureSpec,
    /// Bound on `|k|` over the Zak terms, entering the phase-rate estimate.
    pub reach: f64,
    /// Phase rate of the signal itself.
    pub own_rate: f64,
}

impl ObliqueQuadratureSpec {
    pub fn new(f: &SignalExpr, slope: RationalSlope, quad: QuadratureSpec) -> Self {
        let mut breakpoints = panel_breakpoints(slope);
        breakpoints.extend(breakpoints_mod_one(f));
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let (lo, hi) = f.support_window();
        Self {
            breakpoints,
            quad,
            reach: lo.abs().max(hi.abs()).ceil() + 1.0,
            own_rate: f.phase_rate(lo, hi),
        }
    }

    /// A panelization valid for both signals, so that one rule serves their sums.
    pub fn merge(&self, other: &Self) -> Self {
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.extend(&other.breakpoints);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Self {
            breakpoints,
            quad: self.quad,
            reach: self.reach.max(other.reach),
            own_rate: self.own_rate.max(other.own_rate),
        }
    }
}

/// Prepared right-hand side for one signal and slope.
#[derive(Clone, Debug)]
pub struct ObliquePlan<'a> {
    f: &'a SignalExpr,
    slope: RationalSlope,
    variant: MomentVariant,
    spec: ObliqueQuadratureSpec,
    integ: Integrator,
    /// `(n_min, coefficients)` over the active index range.
    coeffs: (i64, Vec<Complex64>),
}

impl<'a> ObliquePlan<'a> {
    pub fn new(f: &'a SignalExpr, slope: RationalSlope, quad: QuadratureSpec) -> Result<Self> {
        Self::with_variant(f, slope, quad, MomentVariant::default())
    }

    pub fn with_variant(f: &'a SignalExpr, slope: RationalSlope, quad: QuadratureSpec, variant: MomentVariant) -> Result<Self> {
        Self::with_spec(f, slope, ObliqueQuadratureSpec::new(f, slope, quad), variant)
    }

    /// `spec` must contain the breakpoints of `f`, e.g. by [`ObliqueQuadratureSpec::merge`].
    pub fn with_spec(f: &'a SignalExpr, slope: RationalSlope, spec: ObliqueQuadratureSpec, variant: MomentVariant) -> Result<Self> {
        f.validate()?;
        let range = active_indices(slope);
        let n_min = *range.start();
        let coeffs = range
            .map(|n| {
                let c = gauss_coefficient(n, slope);
                if variant.unconjugated {
                    c
                } else {
                    c.conj()
                }
            })
            .collect();
        Ok(Self {
            f,
            slope,
            variant,
            integ: Integrator::new(spec.quad)?,
            spec,
            coeffs: (n_min, coeffs),
        })
    }

    pub fn spec(&self) -> &ObliqueQuadratureSpec {
        &self.spec
    }

    fn coefficient(&self, n: i64) -> Complex64 {
        self.coeffs.1[(n - self.coeffs.0) as usize]
    }

    /// Right-hand side at modulation `omega`.
    pub fn moment(&self, omega: f64) -> Complex64 {
        let r = self.slope.ratio();
        let rate_bound = 2.0 * PI * (omega.abs() + r.abs() * (1.0 + self.spec.reach)) + self.spec.own_rate;
        let panels = self.integ.panels(&[(0.0, 1.0)], &self.spec.breakpoints, |_, _| rate_bound);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in panels {
            // admissible set is constant on the panel interior
            let active = admissible_set(self.slope, 0.5 * (a + b), Boundary::HalfOpen);
            let slope = self.slope;
            acc += self.integ.rule().integrate(
                |x| {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for &n in &active {
                        let eta = omega + crate::chirp::xi_line(n, slope, x);
                        sum += self.coefficient(n) * zak_sum(self.f, x, eta);
                    }
                    Complex64::from_polar(1.0, -PI * (2.0 * omega * x + r * x * x)) * sum
                },
                a,
                b,
            );
        }
        acc
    }

    pub fn sin_alpha(&self) -> f64 {
        self.variant.sin_alpha.unwrap_or_else(|| self.slope.sin_alpha())
    }

    /// Oblique reconstruction of `F_alpha f(xi)`, `cot(alpha) = p/q`.
    pub fn frft(&self, xi: f64) -> Result<Complex64> {
        if self.slope.p() == 0 {
            return Err(Error::Domain(
                "p = 0 is the angle pi/2; use the direct transform there".into(),
            ));
        }
        let c = c_alpha(self.slope.alpha())?;
        let r = self.slope.ratio();
        Ok(c * Complex64::from_polar(1.0, -PI * r * xi * xi) * self.moment(xi / self.sin_alpha()))
    }
}

/// Right-hand side of the chirp-moment identity.
pub fn chirp_moment(f: &SignalExpr, slope: RationalSlope, omega: f64, quad: &QuadratureSpec) -> Result<Complex64> {
    if !omega.is_finite() {
        return Err(Error::NonFinite(format!("omega = {omega}")));
    }
    Ok(ObliquePlan::new(f, slope, *quad)?.moment(omega))
}

/// Left-hand side `int f(t) e^{-i pi r t^2 - 2 i pi w t} dt` by direct quadrature.
pub fn chirp_moment_direct(f: &SignalExpr, slope: RationalSlope, omega: f64, quad: &QuadratureSpec) -> Result<Complex64> {
    f.validate()?;
    let r = slope.ratio();
    let integ = Integrator::new(*quad)?;
    let (lo, hi) = f.support_window();
    let own = f.phase_rate(lo, hi);
    Ok(integ.integrate(
        |t| f.eval(t) * Complex64::from_polar(1.0, -PI * (r * t * t + 2.0 * omega * t)),
        &f.support_intervals(),
        &f.breakpoints(),
        |a, b| 2.0 * PI * (r * a + omega).abs().max((r * b + omega).abs()) + own,
    ))
}

pub fn oblique_frft(f: &SignalExpr, slope: RationalSlope, grid: &Grid) -> Result<SampledTrace> {
    oblique_frft_with(f, slope, grid, &QuadratureSpec::default(), MomentVariant::default())
}

pub fn oblique_frft_with(
    f: &SignalExpr,
    slope: RationalSlope,
    grid: &Grid,
    quad: &QuadratureSpec,
    variant: MomentVariant,
) -> Result<SampledTrace> {
    let plan = ObliquePlan::with_variant(f, slope, *quad, variant)?;
    let values = grid.points().map(|xi| plan.frft(xi)).collect::<Result<Vec<_>>>()?;
    SampledTrace::from_grid(grid, values)
}

/// Relative chirp-moment error `|lhs - rhs| / |lhs|`.
pub fn chirp_moment_report(f: &SignalExpr, slope: RationalSlope, omega: f64, tol: f64) -> Result<VerificationReport> {
    let quad = QuadratureSpec::default();
    let lhs = chirp_moment_direct(f, slope, omega, &quad)?;
    let rhs = chirp_moment(f, slope, omega, &quad)?;
    let err = (lhs - rhs).norm() / lhs.norm();
    Ok(VerificationReport::new(format!("oblique.chirp_moment[{f}; {slope}; omega={omega}]"), err, tol)
        .with("lhs_re", lhs.re)
        .with("lhs_im", lhs.im)
        .with("rhs_re", rhs.re)
        .with("rhs_im", rhs.im))
}

/// Oblique reconstruction against the direct transform at `alpha = arccot(p/q)`,
/// max deviation relative to `||f||_2`.
pub fn verify_oblique_identity(f: &SignalExpr, slope: RationalSlope, grid: &Grid, tol: f64) -> Result<VerificationReport> {
    verify_oblique_identity_with(f, slope, grid, tol, MomentVariant::default())
}

pub fn verify_oblique_identity_with(
    f: &SignalExpr,
    slope: RationalSlope,
    grid: &Grid,
    tol: f64,
    variant: MomentVariant,
) -> Result<VerificationReport> {
    let (direct, oblique) = oblique_pair(f, slope, grid, variant)?;
    oblique_report(f, slope, &direct, &oblique, tol, variant)
}

/// Direct and oblique traces on a shared grid.
pub fn oblique_pair(
    f: &SignalExpr,
    slope: RationalSlope,
    grid: &Grid,
    variant: MomentVariant,
) -> Result<(SampledTrace, SampledTrace)> {
    let quad = QuadratureSpec::default();
    let direct = FrftPlan::new(f, slope.alpha(), FrftConvention::Paper, &quad)?.trace(grid);
    let oblique = oblique_frft_with(f, slope, grid, &quad, variant)?;
    Ok((direct, oblique))
}

pub fn oblique_report(
    f: &SignalExpr,
    slope: RationalSlope,
    direct: &SampledTrace,
    oblique: &SampledTrace,
    tol: f64,
    variant: MomentVariant,
) -> Result<VerificationReport> {
    let norm = signal_norm(f)?;
    let max_dev = direct.max_abs_diff(oblique)?;
    let diff = direct.map({
        let o = oblique.values().to_vec();
        let mut i = 0;
        move |_, v| {
            let d = v - o[i];
            i += 1;
            d
        }
    });
    let mut name = format!("oblique.identity[{f}; {slope}]");
    if variant != MomentVariant::default() {
        name.push_str(".variant");
    }
    Ok(VerificationReport::new(name, max_dev / norm, tol)
        .with("max_abs_deviation", max_dev)
        .with("l2_deviation", diff.l2_norm())
        .with("signal_norm", norm)
        .with("sin_alpha", variant.sin_alpha.unwrap_or_else(|| slope.sin_alpha()))
        .with("unconjugated_coefficients", variant.unconjugated)
        .with("grid", format!("{}:{}:{}", direct.start(), direct.grid().end(), direct.len())))
}

/// Set of `xi` whose lines `Gamma(xi)` (start height `p/2 + xi/sin(alpha)` mod `1/q`)
/// meet a given Zak-domain region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictedSupport {
    pub slope: RationalSlope,
    pub sin_alpha: f64,
    /// Start heights at `x = 0`, invariant under `+1/q`.
    pub heights: CircleIntervalSet,
}

impl PredictedSupport {
    pub fn height(&self, xi: f64) -> f64 {
        0.5 * self.slope.p() as f64 + xi / self.sin_alpha
    }

    pub fn contains(&self, xi: f64) -> bool {
        self.heights.contains(self.height(xi))
    }

    /// Period in `xi`.
    pub fn period(&self) -> f64 {
        self.sin_alpha / self.slope.q() as f64
    }

    /// Fraction of each period covered.
    pub fn density(&self) -> f64 {
        self.heights.measure()
    }

    /// The set restricted to `[lo, hi]`, as sorted disjoint intervals.
    pub fn intervals_in(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let s = self.sin_alpha;
        let base = 0.5 * self.slope.p() as f64;
        let (h_lo, h_hi) = (base + lo / s, base + hi / s);
        let mut out = Vec::new();
        for m in (h_lo.floor() as i64 - 1)..=(h_hi.floor() as i64 + 1) {
            for &(a, b) in self.heights.arcs() {
                let xa = (a + m as f64 - base) * s;
                let xb = (b + m as f64 - base) * s;
                let (xa, xb) = (xa.max(lo), xb.min(hi));
                if xb > xa {
                    out.push((xa, xb));
                }
            }
        }
        crate::numerics::signal::merge_intervals(out)
    }

    pub fn is_disjoint(&self, other: &PredictedSupport) -> bool {
        if self.slope == other.slope {
            self.heights.is_disjoint(&other.heights)
        } else {
            false
        }
    }
}

/// `((x0, x1), (y0, y1))` in the Zak square.
pub type Rect = ((f64, f64), (f64, f64));

/// Lines meeting any of the rectangles in `[0, 1]^2`.
pub fn predict_support(rects: &[Rect], slope: RationalSlope) -> Result<PredictedSupport> {
    if slope.p() == 0 {
        return Err(Error::Domain("predicted supports need p != 0".into()));
    }
    let r = slope.ratio();
    let mut starts = CircleIntervalSet::empty();
    for &((x0, x1), (y0, y1)) in rects {
        if !(x1 >= x0 && y1 >= y0) {
            return Err(Error::InvalidInput(format!("bad rectangle [{x0}, {x1}] x [{y0}, {y1}]")));
        }
        // start heights y - r x over the rectangle
        let (lo, hi) = if r > 0.0 { (y0 - r * x1, y1 - r * x0) } else { (y0 - r * x0, y1 - r * x1) };
        starts = starts.union(&CircleIntervalSet::arc(lo, hi));
    }
    Ok(PredictedSupport {
        slope,
        sin_alpha: slope.sin_alpha(),
        heights: height_section(slope, &starts),
    })
}

/// Fraction of `sum |v|^2` on grid points outside `support`.
pub fn mass_outside(trace: &SampledTrace, support: &PredictedSupport) -> f64 {
    let (mut total, mut outside) = (0.0, 0.0);
    for (xi, v) in trace.iter() {
        let e = v.norm_sqr();
        total += e;
        if !support.contains(xi) {
            outside += e;
        }
    }
    if total > 0.0 {
        outside / total
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> RationalSlope {
        RationalSlope::new(p, q).unwrap()
    }

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// Direct LHS with a plain uniform composite rule, independent of the panel walker.
    fn brute_lhs(f: &SignalExpr, r: f64, omega: f64) -> Complex64 {
        let (lo, hi) = f.support_window();
        let rule = crate::numerics::GaussLegendre::new(20).unwrap();
        let n = 400;
        let h = (hi - lo) / n as f64;
        let mut bps = f.breakpoints();
        bps.retain(|&b| b > lo && b < hi);
        let mut cuts: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
        cuts.extend(bps);
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|w| rule.integrate(|t| f.eval(t) * Complex64::from_polar(1.0, -PI * (r * t * t + 2.0 * omega * t)), w[0], w[1]))
            .sum()
    }

    #[test]
    fn gaussian_moment_matches_closed_form() {
        let g = SignalExpr::gaussian(1.0);
        let rhs = chirp_moment(&g, s(1, 1), 0.0, &quad()).unwrap();
        let closed = Complex64::new(1.0, 1.0).sqrt().inv();
        assert!((rhs - closed).norm() / closed.norm() < 1e-6, "{rhs} vs {closed}");
        assert!((brute_lhs(&g, 1.0, 0.0) - closed).norm() < 1e-9);
    }

    #[test]
    fn box_and_bump_moments() {
        let b = SignalExpr::boxcar(-0.5, 0.5);
        let lhs = brute_lhs(&b, 0.5, 0.0);
        let rhs = chirp_moment(&b, s(1, 2), 0.0, &quad()).unwrap();
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-6, "{lhs} vs {rhs}");

        let bump = SignalExpr::bump(-1.0, 1.0);
        let lhs = brute_lhs(&bump, 2.0, 1.3);
        let rhs = chirp_moment(&bump, s(2, 1), 1.3, &quad()).unwrap();
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn unconjugated_coefficients_fail_for_q_above_one() {
        let g = SignalExpr::gaussian(1.0).shift(0.3);
        for (p, q, fails) in [(1, 1, false), (1, 2, true), (3, 2, true), (2, 3, true)] {
            let sl = s(p, q);
            let lhs = chirp_moment_direct(&g, sl, 0.4, &quad()).unwrap();
            let plan = ObliquePlan::with_variant(
                &g,
                sl,
                quad(),
                MomentVariant {
                    unconjugated: true,
                    sin_alpha: None,
                },
            )
            .unwrap();
            let err = (plan.moment(0.4) - lhs).norm() / lhs.norm();
            assert_eq!(err > 1e-3, fails, "{p}/{q}: {err}");
        }
    }

    #[test]
    fn oblique_matches_direct() {
        let grid = Grid::linspace(-3.0, 3.0, 61).unwrap();
        let g = SignalExpr::gaussian(1.0);
        let rep = verify_oblique_identity(&g, s(2, 1), &grid, 1e-4).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
        let bump = SignalExpr::bump(-1.0, 1.0);
        let rep = verify_oblique_identity(&bump, s(1, 1), &grid, 1e-4).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
        let rep = verify_oblique_identity(&bump, s(3, 2), &grid, 1e-4).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
        let rep = verify_oblique_identity(&g, s(-1, 2), &grid, 1e-4).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
    }

    #[test]
    fn printed_sine_is_a_negative_control() {
        let grid = Grid::linspace(-3.0, 3.0, 61).unwrap();
        let g = SignalExpr::gaussian(1.0);
        let sl = s(2, 1);
        let wrong = MomentVariant {
            unconjugated: false,
            sin_alpha: Some(sl.p() as f64 / sl.length()),
        };
        let rep = verify_oblique_identity_with(&g, sl, &grid, 1e-4, wrong).unwrap();
        assert!(!rep.pass);
        assert!(rep.max_error > 1e-2);
    }

    #[test]
    fn xi_zero_is_scaled_moment() {
        let bump = SignalExpr::bump(-0.8, 1.1);
        let sl = s(3, 2);
        let tr = oblique_frft(&bump, sl, &Grid::new(0.0, 1.0, 1).unwrap()).unwrap();
        let m = chirp_moment(&bump, sl, 0.0, &quad()).unwrap();
        let c = c_alpha(sl.alpha()).unwrap();
        assert!((tr.values()[0] - c * m).norm() < 1e-15);
        assert!(matches!(
            oblique_frft(&bump, s(0, 1), &Grid::new(0.0, 1.0, 1).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unbounded_support_rejected() {
        let g = SignalExpr::gaussian(0.0);
        assert!(chirp_moment(&g, s(1, 1), 0.0, &quad()).is_err());
    }

    #[test]
    fn refinement_converges() {
        let g = SignalExpr::gaussian(1.0).modulate(0.4);
        let sl = s(3, 2);
        let exact = chirp_moment_direct(&g, sl, 0.7, &QuadratureSpec::with_order(40)).unwrap();
        let mut last = f64::INFINITY;
        for order in [4, 8, 16] {
            let spec = QuadratureSpec {
                order,
                max_phase: 16.0,
                max_panel: 0.5,
            };
            let err = (chirp_moment(&g, sl, 0.7, &spec).unwrap() - exact).norm();
            assert!(err < last || err < 1e-12, "order {order}: {err} vs {last}");
            last = err;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn panels_have_constant_admissible_sets() {
        let f = SignalExpr::triangle(-1.3, 0.9);
        for (p, q) in [(1, 1), (2, 1), (1, 2), (3, 2), (-2, 5)] {
            let sl = s(p, q);
            let spec = ObliqueQuadratureSpec::new(&f, sl, quad());
            assert!(spec.breakpoints.windows(2).all(|w| w[0] < w[1]));
            for w in spec.breakpoints.windows(2) {
                let mid = admissible_set(sl, 0.5 * (w[0] + w[1]), Boundary::HalfOpen);
                for x in [w[0] + 1e-9 * (w[1] - w[0]), w[1] - 1e-9 * (w[1] - w[0])] {
                    assert_eq!(admissible_set(sl, x, Boundary::HalfOpen), mid);
                }
            }
        }
    }

    #[test]
    fn support_prediction_basics() {
        let sl = s(2, 1);
        let none = predict_support(&[], sl).unwrap();
        assert!(!none.contains(0.3) && none.intervals_in(-5.0, 5.0).is_empty());
        let all = predict_support(&[((0.0, 1.0), (0.0, 1.0))], sl).unwrap();
        assert!((-50..50).all(|i| all.contains(i as f64 * 0.0731)));
        let one = predict_support(&[((0.0, 0.02), (0.3, 0.35))], s(1, 1)).unwrap();
        let ivs = one.intervals_in(-2.0, 2.0);
        assert!(!ivs.is_empty());
        for (a, b) in ivs {
            assert!(one.contains(0.5 * (a + b)));
        }
        assert!((one.period() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }
}
