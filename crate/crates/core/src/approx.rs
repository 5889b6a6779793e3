//! Approximate Pauli solver: `phi = sum_k phi_k` with `|F_{alpha_k} phi| ~ f_k` on `[-T, T]`.
//!
//! `phi_k = F_{-alpha_k}[f_k e^{2 i pi omega_k t}]` is never sampled. Its
//! transforms are evaluated through the exact splitting `F_a = lambda_a Std_{theta_a}`:
//! `F_alpha phi_k = lambda_alpha lambda_{-alpha_k} Std_{theta_alpha + theta_{-alpha_k}} g_k`,
//! one compactly supported quadrature per point (or the identity map, up to
//! parity, when the total angle is a multiple of `pi`).
//!
//! Cross-terms equal `|c_beta| |u^(eta)|` for a chirped target `u`, with
//! `|c_beta| = |sin beta|^{-1/2}`, so the tail level is scaled by `sqrt|sin beta|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frft::{as_standard, multiple_of_pi, FrftConvention, FrftOperator, FrftPlan};
use crate::numerics::{Grid, QuadratureSpec, SampledTrace, SignalExpr, VerificationReport};

/// Scan and measurement controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxSpec {
    /// `|eta|` scanned up to this value.
    pub scan_range: f64,
    /// Defaults to `1 / (8T)` when `None`.
    pub scan_step: Option<f64>,
    /// Points of the `[-T, T]` measurement grid.
    pub grid_points: usize,
}

impl Default for ApproxSpec {
    fn default() -> Self {
        Self {
            scan_range: 64.0,
            scan_step: None,
            grid_points: 401,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxComponent {
    pub target: SignalExpr,
    pub angle: f64,
    pub omega: f64,
    /// Tail threshold `A_k` behind `omega`.
    pub threshold: f64,
}

impl ApproxComponent {
    /// `f_k(t) e^{2 i pi omega_k t}`.
    pub fn modulated(&self) -> SignalExpr {
        self.target.clone().modulate(self.omega)
    }
}

#[derive(Clone, Debug)]
pub struct ApproxSolution {
    pub components: Vec<ApproxComponent>,
    pub epsilon: f64,
    pub t: f64,
    pub grid: Grid,
    pub spec: ApproxSpec,
    /// `sup_[-T,T] | |F_{alpha_k} phi| - f_k |` per angle.
    pub achieved: Vec<f64>,
    /// `cross[j][k] = sup_[-T,T] |F_{alpha_j} phi_k|`; the diagonal holds `sup f_k`.
    pub cross: Vec<Vec<f64>>,
}

/// Smallest scanned `A >= 0` with `|u^(eta)| < level` at every scanned `A < |eta| <= range`.
/// Fails unless `A < 3/4 range`.
pub fn tail_threshold(u: &SignalExpr, level: f64, scan_range: f64, scan_step: f64) -> Result<f64> {
    if !(level > 0.0) || !(scan_range > 0.0) || !(scan_step > 0.0) || !scan_range.is_finite() {
        return Err(Error::InvalidInput(format!(
            "level {level}, range {scan_range} and step {scan_step} must be positive"
        )));
    }
    // F_{pi/2} has c = 1: plain u^(eta) by quadrature
    let plan = FrftPlan::new(u, PI / 2.0, FrftConvention::Paper, &QuadratureSpec::default())?;
    let n = (scan_range / scan_step).ceil() as usize;
    let mut threshold = 0.0;
    let mut tail_max = 0.0f64;
    for i in 0..=n {
        let eta = (i as f64 * scan_step).min(scan_range);
        let m = plan.eval(eta).norm().max(plan.eval(-eta).norm());
        if m >= level {
            threshold = eta;
        }
        if eta >= 0.75 * scan_range {
            tail_max = tail_max.max(m);
        }
    }
    // the level must hold on the whole last quarter, so isolated zeros do not count
    if threshold >= 0.75 * scan_range {
        return Err(Error::LevelUnattained {
            level,
            range: scan_range,
            last: tail_max,
        });
    }
    Ok(threshold)
}

fn check_target(f: &SignalExpr, t: f64) -> Result<()> {
    f.validate()?;
    let (lo, hi) = f.support_window();
    if lo < -t - 1e-12 || hi > t + 1e-12 {
        return Err(Error::InvalidInput(format!("target {f} has support [{lo}, {hi}] outside [-{t}, {t}]")));
    }
    let n = 4096;
    for i in 0..=n {
        let x = -t + 2.0 * t * i as f64 / n as f64;
        let v = f.eval(x);
        if v.im != 0.0 || v.re < 0.0 || !v.re.is_finite() {
            return Err(Error::InvalidInput(format!("target {f} is not a finite nonnegative real at {x}: {v}")));
        }
    }
    Ok(())
}

pub fn build_solution(targets: &[SignalExpr], angles: &[f64], epsilon: f64, t: f64) -> Result<ApproxSolution> {
    build_solution_with(targets, angles, epsilon, t, &ApproxSpec::default())
}

pub fn build_solution_with(
    targets: &[SignalExpr],
    angles: &[f64],
    epsilon: f64,
    t: f64,
    spec: &ApproxSpec,
) -> Result<ApproxSolution> {
    let n = targets.len();
    if n == 0 || n != angles.len() {
        return Err(Error::InvalidInput(format!("{n} targets for {} angles", angles.len())));
    }
    if !(epsilon > 0.0) || !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon {epsilon} and T {t} must be positive")));
    }
    for w in angles.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidInput(format!(
                "angles must be strictly increasing; {} then {} coincide or decrease",
                w[0], w[1]
            )));
        }
    }
    if angles[0] < 0.0 || angles[n - 1] > PI / 2.0 + 1e-15 {
        return Err(Error::Domain("angles must lie in [0, pi/2]".into()));
    }
    for f in targets {
        check_target(f, t)?;
    }
    let step = spec.scan_step.unwrap_or(1.0 / (8.0 * t));
    let mut components = Vec::with_capacity(n);
    for k in 0..n {
        let (mut a_k, mut min_gap) = (0.0f64, f64::INFINITY);
        for j in (0..n).filter(|&j| j != k) {
            let beta = angles[j] - angles[k];
            min_gap = min_gap.min(beta.abs());
            let u = targets[k].clone().chirp(beta.cos() / beta.sin());
            let level = epsilon * beta.sin().abs().sqrt() / (n - 1) as f64;
            a_k = a_k.max(tail_threshold(&u, level, spec.scan_range, step)?);
        }
        // one scan step past A keeps |xi| = T, a grid point, strictly inside the tail
        let omega = if n == 1 { 0.0 } else { a_k + step + t / min_gap.sin() };
        components.push(ApproxComponent {
            target: targets[k].clone(),
            angle: angles[k],
            omega,
            threshold: a_k,
        });
    }
    let grid = Grid::linspace(-t, t, spec.grid_points)?;
    let mut sol = ApproxSolution {
        components,
        epsilon,
        t,
        grid,
        spec: *spec,
        achieved: Vec::new(),
        cross: Vec::new(),
    };
    measure(&mut sol)?;
    for (k, &achieved) in sol.achieved.iter().enumerate() {
        if !(achieved <= epsilon) {
            return Err(Error::EpsilonNotAchieved {
                angle: angles[k],
                achieved,
                epsilon,
                diagnostics: format!(
                    "scan range {}, scan step {step}, grid {}:{}:{}, omegas {:?}",
                    spec.scan_range,
                    sol.grid.start,
                    sol.grid.end(),
                    sol.grid.len,
                    sol.components.iter().map(|c| c.omega).collect::<Vec<_>>()
                ),
            });
        }
    }
    Ok(sol)
}

fn measure(sol: &mut ApproxSolution) -> Result<()> {
    let n = sol.components.len();
    let mut per: Vec<Vec<SampledTrace>> = Vec::with_capacity(n);
    for j in 0..n {
        let alpha = sol.components[j].angle;
        per.push(
            (0..n)
                .map(|k| component_transform(&sol.components[k], alpha, &sol.grid))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    sol.cross = per.iter().map(|row| row.iter().map(|tr| tr.max_abs()).collect()).collect();
    sol.achieved = (0..n)
        .map(|j| {
            let f = &sol.components[j].target;
            let row = &per[j];
            (0..sol.grid.len)
                .map(|i| {
                    let s: Complex64 = row.iter().map(|tr| tr.values()[i]).sum();
                    (s.norm() - f.eval(sol.grid.point(i)).re).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(())
}

/// `F_alpha phi_k` on `grid`, `Paper` convention.
pub fn component_transform(c: &ApproxComponent, alpha: f64, grid: &Grid) -> Result<SampledTrace> {
    let (l1, t1) = as_standard(alpha, FrftConvention::Paper)?;
    let (l2, t2) = as_standard(-c.angle, FrftConvention::Paper)?;
    let g = c.modulated();
    let op = FrftOperator::new(&g, t1 + t2, FrftConvention::Standard, &QuadratureSpec::default())?;
    let lam = l1 * l2;
    Ok(SampledTrace::tabulate(grid, |xi| lam * op.eval(xi)))
}

fn check_phases(phases: &[Complex64], n: usize) -> Result<()> {
    if phases.len() != n {
        return Err(Error::InvalidInput(format!("{} phases for {n} components", phases.len())));
    }
    for (index, c) in phases.iter().enumerate() {
        let modulus = c.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnimodular { index, modulus });
        }
    }
    Ok(())
}

/// `|F_alpha sum_k c_k phi_k|` on `grid`, stored in the real part.
pub fn evaluate_modulus(sol: &ApproxSolution, phases: &[Complex64], alpha: f64, grid: &Grid) -> Result<SampledTrace> {
    check_phases(phases, sol.components.len())?;
    let traces = sol
        .components
        .iter()
        .map(|c| component_transform(c, alpha, grid))
        .collect::<Result<Vec<_>>>()?;
    let values = (0..grid.len)
        .map(|i| {
            let s: Complex64 = traces.iter().zip(phases).map(|(t, c)| c * t.values()[i]).sum();
            Complex64::new(s.norm(), 0.0)
        })
        .collect();
    SampledTrace::from_grid(grid, values)
}

/// `phi_k` itself: pointwise at multiples of `pi`, closed form at `-alpha_k = +-pi/2`
/// when the modulated target has one, quadrature otherwise.
enum Materialized {
    Pointwise { g: SignalExpr, reflect: bool },
    Closed { g: SignalExpr, sign: f64 },
    Quadrature { g: SignalExpr, beta: f64 },
}

impl Materialized {
    fn new(c: &ApproxComponent) -> Self {
        let g = c.modulated();
        let beta = -c.angle;
        if let Some(k) = multiple_of_pi(beta) {
            return Materialized::Pointwise {
                g,
                reflect: k.rem_euclid(2) == 1,
            };
        }
        if ((beta.abs() - PI / 2.0) / PI).abs() < 1e-15 && g.fourier(0.0).is_some() {
            // F_{-+pi/2} g(x) = g^(+-x), with c = 1
            let sign = if beta > 0.0 { 1.0 } else { -1.0 };
            return Materialized::Closed { g, sign };
        }
        Materialized::Quadrature { g, beta }
    }

    fn eval(&self, x: f64, quad: &QuadratureSpec) -> Result<Complex64> {
        Ok(match self {
            Materialized::Pointwise { g, reflect } => g.eval(if *reflect { -x } else { x }),
            Materialized::Closed { g, sign } => g.fourier(sign * x).expect("closed form checked"),
            Materialized::Quadrature { g, beta } => FrftPlan::new(g, *beta, FrftConvention::Paper, quad)?.eval(x),
        })
    }
}

/// Brute-force `|F_alpha sum_k c_k phi_k|`: `phi` tabulated at Gauss nodes of
/// panels of length at most `panel` covering `[-width, width]`, then transformed
/// by direct summation. Only reliable when the kernel chirp is resolved by the
/// panels (`cot(alpha) = 0` or `alpha` in `pi Z`).
pub fn brute_force_modulus(
    sol: &ApproxSolution,
    phases: &[Complex64],
    alpha: f64,
    grid: &Grid,
    width: f64,
    panel: f64,
) -> Result<SampledTrace> {
    check_phases(phases, sol.components.len())?;
    if !(width > 0.0 && panel > 0.0) {
        return Err(Error::InvalidInput(format!("width {width} and panel {panel} must be positive")));
    }
    let quad = QuadratureSpec::default();
    let parts: Vec<Materialized> = sol.components.iter().map(Materialized::new).collect();
    let phi = |x: f64| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, c) in parts.iter().zip(phases) {
            acc += c * p.eval(x, &quad)?;
        }
        Ok(acc)
    };
    if let Some(k) = multiple_of_pi(alpha) {
        let reflect = k.rem_euclid(2) == 1;
        let values = grid
            .points()
            .map(|xi| Ok(Complex64::new(phi(if reflect { -xi } else { xi })?.norm(), 0.0)))
            .collect::<Result<Vec<_>>>()?;
        return SampledTrace::from_grid(grid, values);
    }
    let mut cuts: Vec<f64> = parts
        .iter()
        .flat_map(|p| match p {
            Materialized::Pointwise { g, .. } => g.breakpoints(),
            _ => Vec::new(),
        })
        .filter(|b| b.abs() < width)
        .collect();
    let n = (2.0 * width / panel).ceil() as usize;
    cuts.extend((0..=n).map(|i| -width + 2.0 * width * i as f64 / n as f64));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = crate::numerics::GaussLegendre::new(quad.order)?;
    let mut tab = Vec::with_capacity(cuts.len() * quad.order);
    for w in cuts.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (node, weight) in rule.nodes().iter().zip(rule.weights()) {
            let x = mid + half * node;
            tab.push((x, phi(x)? * (half * weight)));
        }
    }
    let (cot, csc) = (alpha.cos() / alpha.sin(), 1.0 / alpha.sin());
    Ok(SampledTrace::tabulate(grid, |xi| {
        let s: Complex64 = tab
            .iter()
            .map(|&(x, v)| v * Complex64::from_polar(1.0, -PI * (cot * x * x + 2.0 * x * xi * csc)))
            .sum();
        // the outer factor c e^{-i pi cot xi^2} has modulus |sin alpha|^{-1/2}
        Complex64::new(s.norm() / alpha.sin().abs().sqrt(), 0.0)
    }))
}

/// Cross-term maxima at `factor * omega_k` against those at `omega_k`.
pub fn monotonicity_report(sol: &ApproxSolution, factor: f64) -> Result<VerificationReport> {
    let n = sol.components.len();
    let mut worst = 0.0f64;
    for k in 0..n {
        let mut c = sol.components[k].clone();
        c.omega *= factor;
        for j in (0..n).filter(|&j| j != k) {
            let after = component_transform(&c, sol.components[j].angle, &sol.grid)?.max_abs();
            worst = worst.max(after - sol.cross[j][k]);
        }
    }
    Ok(VerificationReport::new("approx.monotonicity", worst.max(0.0), 1e-12).with("factor", factor))
}

/// Achieved error per angle plus the cross-term bound `eps / (n - 1)`.
pub fn solution_reports(sol: &ApproxSolution) -> Vec<VerificationReport> {
    let n = sol.components.len();
    let mut out = Vec::new();
    for (k, c) in sol.components.iter().enumerate() {
        out.push(
            VerificationReport::new(format!("approx.sup_error[alpha={:.12}]", c.angle), sol.achieved[k], sol.epsilon)
                .with("omega", c.omega)
                .with("threshold", c.threshold)
                .with("target", c.target.to_string()),
        );
    }
    if n > 1 {
        let bound = sol.epsilon / (n - 1) as f64;
        for j in 0..n {
            for k in (0..n).filter(|&k| k != j) {
                out.push(VerificationReport::new(
                    format!("approx.cross_term[alpha={:.12}; k={k}]", sol.components[j].angle),
                    sol.cross[j][k],
                    bound,
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_threshold_is_below_envelope() {
        let b = SignalExpr::boxcar(-0.5, 0.5);
        let a = tail_threshold(&b, 0.1, 16.0, 1.0 / 64.0).unwrap();
        assert!(a <= 1.0 / (0.1 * PI) && a > 2.5, "{a}");
        // oracle: the last |sinc| >= 0.1 on the same scan
        let oracle = (0..=1024)
            .map(|i| i as f64 / 64.0)
            .filter(|&e| (e == 0.0) || ((PI * e).sin() / (PI * e)).abs() >= 0.1)
            .fold(0.0, f64::max);
        assert!((a - oracle).abs() < 1e-12);
        assert_eq!(tail_threshold(&b, 1.5, 16.0, 0.125).unwrap(), 0.0);
        let g = SignalExpr::gaussian(1.0);
        assert!(tail_threshold(&g, 1e-3, 16.0, 0.125).unwrap() < 2.0);
        assert!(matches!(
            tail_threshold(&b, 1e-4, 8.0, 0.125),
            Err(Error::LevelUnattained { .. })
        ));
    }

    #[test]
    fn single_component_inverts_exactly() {
        let f = SignalExpr::triangle(-1.0, 1.0);
        let sol = build_solution(std::slice::from_ref(&f), &[0.7], 1e-6, 1.0).unwrap();
        assert_eq!(sol.components[0].omega, 0.0);
        assert!(sol.achieved[0] < 1e-10);
        let one = [Complex64::new(1.0, 0.0)];
        let turned = [Complex64::from_polar(1.0, 2.1)];
        let a = evaluate_modulus(&sol, &one, 0.3, &sol.grid).unwrap();
        let b = evaluate_modulus(&sol, &turned, 0.3, &sol.grid).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = SignalExpr::triangle(-1.0, 1.0);
        assert!(build_solution(&[f.clone(), f.clone()], &[0.5, 0.5], 0.05, 1.0).is_err());
        assert!(build_solution(&[f.clone().scale(Complex64::new(-1.0, 0.0))], &[0.0], 0.05, 1.0).is_err());
        assert!(build_solution(&[SignalExpr::boxcar(-2.0, 1.0)], &[0.0], 0.05, 1.0).is_err());
        let sol = build_solution(&[f], &[0.0], 0.05, 1.0).unwrap();
        let bad = [Complex64::new(2.0, 0.0)];
        assert!(matches!(
            evaluate_modulus(&sol, &bad, 0.0, &sol.grid),
            Err(Error::NonUnimodular { .. })
        ));
    }

    #[test]
    fn unreachable_epsilon_fails_loudly() {
        let spec = ApproxSpec {
            scan_range: 8.0,
            ..ApproxSpec::default()
        };
        let targets = [SignalExpr::triangle(-1.0, 1.0), SignalExpr::boxcar(-1.0, 1.0)];
        let r = build_solution_with(&targets, &[0.0, PI / 2.0], 1e-3, 1.0, &spec);
        assert!(matches!(r, Err(Error::LevelUnattained { .. }) | Err(Error::EpsilonNotAchieved { .. })));
    }
}
