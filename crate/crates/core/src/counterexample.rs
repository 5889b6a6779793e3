//! Families `f_1, ..., f_N` whose fractional transforms have pairwise disjoint
//! supports at every angle `alpha_j = arccot(p_j / q_j)`.
//!
//! Each `f_k` is the inverse Zak transform of a separable patch
//! `u(x) v_k(xi)` with `supp u = [0, delta_x]` and `supp v_k` inside the start-height
//! interval `J_k`. The sheared rectangle stays inside `J_k + Z/q_j` for every
//! slope, so `F_{alpha_j} f_k` lives on the lines starting in `J_k`, and those
//! are disjoint across `k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frft::{FrftConvention, FrftPlan};
use crate::numerics::{Grid, Integrator, QuadratureSpec, RationalSlope, SampledTrace, SignalExpr, VerificationReport};
use crate::oblique::{mass_outside, predict_support, PredictedSupport};
use crate::torus::{select_intervals, CircleIntervalSet, LineBundleFamily};
use crate::zak::ZakPatch;

/// Relative `L^2` truncation tail allowed for each `f_k`.
pub const TAIL_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyConfig {
    pub slopes: Vec<RationalSlope>,
    pub n: usize,
    /// Length of each start-height interval.
    pub width: f64,
    /// Gap between sections of distinct intervals.
    pub margin: f64,
    /// Lattice cells `|m| <= m_range`; smallest admissible when `None`.
    pub m_range: Option<i64>,
    /// Even power of the raised-cosine patch factors.
    pub power: u32,
}

impl FamilyConfig {
    pub fn new(slopes: Vec<RationalSlope>, n: usize) -> Self {
        Self {
            slopes,
            n,
            width: 0.06,
            margin: 0.01,
            m_range: None,
            power: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CounterexampleFamily {
    pub config: FamilyConfig,
    /// Start-height intervals `J_k`.
    pub intervals: Vec<(f64, f64)>,
    pub delta_x: f64,
    pub patches: Vec<ZakPatch>,
    pub signals: Vec<SignalExpr>,
    pub m_range: i64,
    /// Bound on `||f_k - truncated f_k|| / ||f_k||`, the same for every `k`.
    pub tail_bound: f64,
    /// `supports[j][k]` for slope `j` and signal `k`.
    pub supports: Vec<Vec<PredictedSupport>>,
}

/// `(2K)! / 4^K`.
fn rc_norm(k: u32) -> f64 {
    (1..=2 * k).fold(1.0, |acc, i| acc * i as f64) / 4f64.powi(k as i32)
}

/// `int_0^1 sin^{4K}(pi s) ds = binom(4K, 2K) / 16^K`.
fn rc_energy(k: u32) -> f64 {
    let n = 4 * k;
    let b = (0..2 * k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    b / 16f64.powi(k as i32)
}

/// Bound on the relative `L^2` tail `sqrt(sum_{|m| > M} |v^(m)|^2) / ||v||`
/// for `v = sin^{2K}` on an interval of length `len`.
///
/// The unit transform obeys `|g(z)| <= C z^{-(2K+1)}` for `z >= z0 > K`, with
/// `C = (2K)! / (4^K pi (1 - K^2/z0^2)^K)`; the sum is bounded by the integral.
pub fn raised_cosine_tail(power: u32, len: f64, m: i64) -> f64 {
    let k = power / 2;
    let z0 = len * m as f64;
    if z0 <= k as f64 + 1.0 {
        return f64::INFINITY;
    }
    let c = rc_norm(k) / (PI * (1.0 - (k * k) as f64 / (z0 * z0)).powi(k as i32));
    let e = (4 * k + 1) as f64;
    (2.0 * c * c * z0.powf(-e) / (e * rc_energy(k))).sqrt()
}

/// Smallest `M` with `raised_cosine_tail <= threshold`.
pub fn minimal_m_range(power: u32, len: f64, threshold: f64) -> i64 {
    let mut m = 1;
    while raised_cosine_tail(power, len, m) > threshold {
        m += 1 + m / 16;
    }
    // back off to the exact minimum
    while m > 1 && raised_cosine_tail(power, len, m - 1) <= threshold {
        m -= 1;
    }
    m
}

pub fn build_family(config: &FamilyConfig) -> Result<CounterexampleFamily> {
    let geom = select_intervals(&config.slopes, config.n, config.width, config.margin)?;
    build_family_with_intervals(config, &geom.intervals)
}

/// Same construction on caller-chosen start-height intervals (no separation check).
pub fn build_family_with_intervals(config: &FamilyConfig, intervals: &[(f64, f64)]) -> Result<CounterexampleFamily> {
    if config.slopes.is_empty() || intervals.is_empty() {
        return Err(Error::InvalidInput("need at least one slope and one interval".into()));
    }
    if config.power == 0 || !config.power.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("patch power {} must be even and positive", config.power)));
    }
    if let Some(s) = config.slopes.iter().find(|s| s.p() == 0) {
        return Err(Error::Domain(format!("slope {s} has p = 0; the angle pi/2 is not covered")));
    }
    let max_r = config.slopes.iter().map(|s| s.ratio().abs()).fold(0.0, f64::max);
    let mut patches = Vec::new();
    let mut len = f64::INFINITY;
    let mut delta_x = 0.5f64;
    for &(a, b) in intervals {
        if !(b > a) || a < 0.0 || b > 1.0 {
            return Err(Error::InvalidInput(format!("start-height interval [{a}, {b}] must lie in [0, 1]")));
        }
        let shrink = 0.25 * (b - a);
        delta_x = delta_x.min(shrink / max_r);
        len = len.min(b - a - 2.0 * shrink);
    }
    for &(a, b) in intervals {
        let shrink = 0.25 * (b - a);
        let u = SignalExpr::raised_cosine(0.0, delta_x, config.power);
        let v = SignalExpr::raised_cosine(a + shrink, b - shrink, config.power);
        patches.push(ZakPatch::new(u, v)?);
    }
    let needed = minimal_m_range(config.power, len, TAIL_THRESHOLD);
    let m_range = config.m_range.unwrap_or(needed);
    let tail_bound = raised_cosine_tail(config.power, len, m_range);
    if tail_bound > TAIL_THRESHOLD {
        return Err(Error::TailTooLarge {
            tail: tail_bound,
            threshold: TAIL_THRESHOLD,
            m_range,
        });
    }
    let signals = patches
        .iter()
        .map(|z| z.synthesize(-m_range, m_range, 24))
        .collect::<Result<Vec<_>>>()?;
    let mut supports = Vec::new();
    for &slope in &config.slopes {
        let row = patches
            .iter()
            .map(|z| {
                let (xr, (v0, v1)) = z.rect();
                predict_support(&[(xr, (v0, v1))], slope)
            })
            .collect::<Result<Vec<_>>>()?;
        supports.push(row);
    }
    Ok(CounterexampleFamily {
        config: config.clone(),
        intervals: intervals.to_vec(),
        delta_x,
        patches,
        signals,
        m_range,
        tail_bound,
        supports,
    })
}

impl CounterexampleFamily {
    pub fn geometry(&self) -> LineBundleFamily {
        LineBundleFamily {
            slopes: self.config.slopes.clone(),
            intervals: self.intervals.clone(),
            margin: self.config.margin,
        }
    }

    /// Deterministic construction record.
    pub fn metadata(&self) -> Value {
        let rects: Vec<Value> = self
            .patches
            .iter()
            .map(|z| {
                let ((x0, x1), (y0, y1)) = z.rect();
                json!([[x0, x1], [y0, y1]])
            })
            .collect();
        let supports: Vec<Value> = self
            .supports
            .iter()
            .map(|row| json!({ "slope": row[0].slope.to_string(), "heights": row.iter().map(|s| s.heights.arcs().to_vec()).collect::<Vec<_>>() }))
            .collect();
        json!({
            "slopes": self.config.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "n": self.signals.len(),
            "width": self.config.width,
            "margin": self.config.margin,
            "power": self.config.power,
            "intervals": self.intervals,
            "delta_x": self.delta_x,
            "patch_rects": rects,
            "m_range": self.m_range,
            "tail_bound": self.tail_bound,
            "tail_threshold": TAIL_THRESHOLD,
            "predicted_heights": supports,
        })
    }

    /// `F_{alpha_j} f_k` on `grid` for every slope `j` and signal `k`.
    pub fn traces(&self, grid: &Grid) -> Result<FamilyTraces> {
        let quad = QuadratureSpec::default();
        let mut out = Vec::new();
        for &slope in &self.config.slopes {
            let row = self
                .signals
                .iter()
                .map(|f| Ok(FrftPlan::new(f, slope.alpha(), FrftConvention::Paper, &quad)?.trace(grid)))
                .collect::<Result<Vec<_>>>()?;
            out.push(row);
        }
        Ok(FamilyTraces { traces: out })
    }

    /// Gram matrix `<f_k, f_l>` by quadrature.
    pub fn gram(&self) -> Result<Vec<Vec<Complex64>>> {
        let integ = Integrator::new(QuadratureSpec::default())?;
        let n = self.signals.len();
        let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for k in 0..n {
            for l in k..n {
                let (a, b) = (&self.signals[k], &self.signals[l]);
                let mut bps = a.breakpoints();
                bps.extend(b.breakpoints());
                let v = integ.integrate(|t| a.eval(t) * b.eval(t).conj(), &a.support_intervals(), &bps, |_, _| 0.0);
                g[k][l] = v;
                g[l][k] = v.conj();
            }
        }
        Ok(g)
    }
}

/// Cached transforms, `traces[j][k]`.
#[derive(Clone, Debug)]
pub struct FamilyTraces {
    pub traces: Vec<Vec<SampledTrace>>,
}

impl FamilyTraces {
    /// `F_{alpha_j} sum_k c_k f_k`, by linearity.
    pub fn combination(&self, j: usize, phases: &[Complex64]) -> SampledTrace {
        let row = &self.traces[j];
        let first = &row[0];
        let values = (0..first.len())
            .map(|i| row.iter().zip(phases).map(|(t, c)| c * t.values()[i]).sum())
            .collect();
        SampledTrace::new(first.start(), first.step(), values).expect("grid copied from a valid trace")
    }
}

fn check_phases(phases: &[Complex64], n: usize) -> Result<()> {
    if phases.len() != n {
        return Err(Error::InvalidInput(format!("{} phases for {n} signals", phases.len())));
    }
    for (index, c) in phases.iter().enumerate() {
        let modulus = c.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnimodular { index, modulus });
        }
    }
    Ok(())
}

/// Leakage per `(k, slope)` plus the pairwise disjointness audit per slope.
pub fn verify_disjoint_supports(
    family: &CounterexampleFamily,
    traces: &FamilyTraces,
    grid: &Grid,
    leak_tol: f64,
) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let total_norm2: Vec<f64> = (0..family.signals.len())
        .map(|k| crate::numerics::signal_norm(&family.signals[k]).map(|n| n * n).unwrap_or(f64::NAN))
        .collect();
    for (j, &slope) in family.config.slopes.iter().enumerate() {
        for k in 0..family.signals.len() {
            let tr = &traces.traces[j][k];
            let leak = mass_outside(tr, &family.supports[j][k]);
            let window_mass: f64 = tr.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.step;
            out.push(
                VerificationReport::new(format!("counterexample.leakage[k={k}; {slope}]"), leak, leak_tol)
                    .with("window", format!("{}:{}:{}", grid.start, grid.end(), grid.len))
                    .with("window_mass_fraction", window_mass / total_norm2[k]),
            );
        }
        let n = family.signals.len();
        let mut ok = true;
        let mut min_gap = f64::INFINITY;
        for k in 0..n {
            for l in k + 1..n {
                let (a, b) = (&family.supports[j][k].heights, &family.supports[j][l].heights);
                ok &= a.is_disjoint(b);
                min_gap = min_gap.min(a.distance(b));
            }
        }
        out.push(
            VerificationReport::audit(format!("counterexample.disjoint_predicted[{slope}]"), ok)
                .with("min_height_gap", if min_gap.is_finite() { min_gap } else { 1.0 }),
        );
    }
    out
}

/// Sup deviation of `|F sum c_k f_k|` from `|F sum f_k|` relative to the latter's max,
/// per slope, with the correlation witness recorded.
pub fn verify_phase_invariance(
    family: &CounterexampleFamily,
    traces: &FamilyTraces,
    phases: &[Complex64],
    tol: f64,
    correlation_max: f64,
) -> Result<Vec<VerificationReport>> {
    check_phases(phases, family.signals.len())?;
    let ones = vec![Complex64::new(1.0, 0.0); phases.len()];
    let label = phase_label(phases);
    let mut out = Vec::new();
    for (j, &slope) in family.config.slopes.iter().enumerate() {
        let base = traces.combination(j, &ones);
        let other = traces.combination(j, phases);
        let peak = base.max_abs();
        let dev = base
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max);
        let leak: f64 = (0..phases.len())
            .map(|k| mass_outside(&traces.traces[j][k], &family.supports[j][k]))
            .fold(0.0, f64::max);
        out.push(
            VerificationReport::new(format!("counterexample.phase_invariance[{label}; {slope}]"), dev / peak, tol)
                .with("peak", peak)
                .with("leakage_consistency_bound", 2.0 * leak.sqrt()),
        );
    }
    let corr = correlation(family, phases)?;
    out.push(
        VerificationReport::new(format!("counterexample.correlation[{label}]"), corr, correlation_max)
            .with("identity_phases", phases.iter().all(|c| (c - 1.0).norm() < 1e-15)),
    );
    Ok(out)
}

/// `|<sum c_k f_k, sum f_k>| / (||sum c_k f_k|| ||sum f_k||)`.
pub fn correlation(family: &CounterexampleFamily, phases: &[Complex64]) -> Result<f64> {
    check_phases(phases, family.signals.len())?;
    let g = family.gram()?;
    let n = phases.len();
    let (mut cross, mut cc, mut oo) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for k in 0..n {
        for l in 0..n {
            cross += phases[k] * g[k][l];
            cc += phases[k] * phases[l].conj() * g[k][l];
            oo += g[k][l];
        }
    }
    Ok(cross.norm() / (cc.re.sqrt() * oo.re.sqrt()))
}

fn phase_label(phases: &[Complex64]) -> String {
    phases
        .iter()
        .map(|c| format!("{:.6}pi", c.arg() / PI))
        .collect::<Vec<_>>()
        .join(",")
}

/// Sections of the family's height intervals, used by the negative control.
pub fn sections(family: &CounterexampleFamily, j: usize) -> Vec<CircleIntervalSet> {
    family.supports[j].iter().map(|s| s.heights.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> RationalSlope {
        RationalSlope::new(p, q).unwrap()
    }

    #[test]
    fn tail_bound_is_monotone_and_valid() {
        let a = raised_cosine_tail(8, 0.03, 200);
        let b = raised_cosine_tail(8, 0.03, 400);
        assert!(b < a);
        let m = minimal_m_range(8, 0.03, 1e-8);
        assert!(raised_cosine_tail(8, 0.03, m) <= 1e-8);
        assert!(raised_cosine_tail(8, 0.03, m - 1) > 1e-8);
        // direct partial tail of the actual coefficients stays under the bound
        let v = SignalExpr::raised_cosine(0.2, 0.23, 8);
        let norm2 = crate::numerics::signal_norm(&v).unwrap().powi(2);
        let m0 = 150;
        let direct: f64 = (m0 + 1..20_000)
            .map(|k| 2.0 * v.fourier(k as f64).unwrap().norm_sqr())
            .sum();
        assert!((direct / norm2).sqrt() <= raised_cosine_tail(8, 0.03, m0));
    }

    #[test]
    fn single_slope_family() {
        let fam = build_family(&FamilyConfig::new(vec![s(1, 1)], 2)).unwrap();
        assert_eq!(fam.signals.len(), 2);
        assert!(fam.geometry().audit().is_empty());
        assert!(fam.tail_bound <= TAIL_THRESHOLD);
        for f in &fam.signals {
            assert!(crate::numerics::signal_norm(f).unwrap() > 0.0);
            for (a, b) in f.support_intervals() {
                let m = a.floor();
                assert!(a - m >= 0.0 && b - m <= fam.delta_x + 1e-12);
            }
        }
    }

    #[test]
    fn three_slope_family_audits() {
        let fam = build_family(&FamilyConfig::new(vec![s(1, 1), s(2, 1), s(1, 2)], 2)).unwrap();
        assert!(fam.geometry().audit().is_empty());
        for j in 0..3 {
            let secs = sections(&fam, j);
            assert!(secs[0].is_disjoint(&secs[1]));
        }
        let again = build_family(&FamilyConfig::new(vec![s(1, 1), s(2, 1), s(1, 2)], 2)).unwrap();
        assert_eq!(fam.metadata().to_string(), again.metadata().to_string());
    }

    #[test]
    fn overlapping_intervals_fail_the_audit() {
        let mut cfg = FamilyConfig::new(vec![s(1, 1)], 2);
        cfg.margin = 0.0;
        let fam = build_family_with_intervals(&cfg, &[(0.1, 0.2), (0.15, 0.25)]).unwrap();
        let grid = Grid::linspace(-0.2, 0.2, 5).unwrap();
        let traces = FamilyTraces {
            traces: vec![vec![SampledTrace::tabulate(&grid, |_| Complex64::new(1.0, 0.0)); 2]],
        };
        let reps = verify_disjoint_supports(&fam, &traces, &grid, 1e-3);
        let audit = reps.iter().find(|r| r.check.starts_with("counterexample.disjoint")).unwrap();
        assert!(!audit.pass);
    }

    #[test]
    fn phases_must_be_unimodular() {
        let fam = build_family(&FamilyConfig::new(vec![s(1, 1)], 2)).unwrap();
        let bad = [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        assert!(matches!(correlation(&fam, &bad), Err(Error::NonUnimodular { index: 1, .. })));
        let id = [Complex64::new(1.0, 0.0); 2];
        assert!((correlation(&fam, &id).unwrap() - 1.0).abs() < 1e-12);
        let flip = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert!(correlation(&fam, &flip).unwrap() < 1e-6);
    }
}
