//! Fractional Fourier transform by direct oscillatory quadrature.
//!
//! `F_a f(xi) = c_a e^{s i pi xi^2 cot a} int f(x) e^{s i pi x^2 cot a} e^{-2 i pi x xi / sin a} dx`
//! with `c_a^2 = 1 - i cot a`, `Re c_a > 0`, and chirp sign `s = -1` for the
//! [`FrftConvention::Paper`] kernel or `s = +1` for [`FrftConvention::Standard`].
//!
//! The standard kernel is the Hermite group: `Std_a Std_b = Std_{a+b}`, with
//! `Std_{2 pi k} = I` and `Std_{pi + 2 pi k}` the parity. The `Paper` kernel
//! satisfies `Paper_a = lambda_a Std_{pi - a}` with `lambda_a = c_a / conj(c_a)`,
//! so it composes only up to a parity and a unimodular constant. Everything
//! downstream uses moduli, where the two agree after `xi -> -xi`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    signal_norm, Grid, Integrator, QuadratureSpec, SampledTrace, SignalExpr, VerificationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FrftConvention {
    /// Chirp sign `-1`.
    #[default]
    Paper,
    /// Chirp sign `+1`.
    Standard,
}

impl FrftConvention {
    pub fn chirp_sign(self) -> f64 {
        match self {
            FrftConvention::Paper => -1.0,
            FrftConvention::Standard => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrftConvention::Paper => "paper",
            FrftConvention::Standard => "standard",
        }
    }
}

impl std::str::FromStr for FrftConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(FrftConvention::Paper),
            "standard" => Ok(FrftConvention::Standard),
            _ => Err(Error::InvalidInput(format!("unknown convention {s:?} (paper|standard)"))),
        }
    }
}

/// `Some(k)` when `alpha = k pi` up to rounding.
pub fn multiple_of_pi(alpha: f64) -> Option<i64> {
    let k = (alpha / PI).round();
    if (alpha / PI - k).abs() <= 1e-12 * k.abs().max(1.0) {
        Some(k as i64)
    } else {
        None
    }
}

/// Principal `sqrt(1 - i cot alpha)`.
pub fn c_alpha(alpha: f64) -> Result<Complex64> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite(format!("alpha = {alpha}")));
    }
    if multiple_of_pi(alpha).is_some() {
        return Err(Error::MultipleOfPi { alpha });
    }
    let cot = alpha.cos() / alpha.sin();
    Ok(Complex64::new(1.0, -cot).sqrt())
}

/// `F_{k pi} f = f((-1)^k .)`.
pub fn frft_multiple_pi(f: &SignalExpr, k: i64) -> SignalExpr {
    if k.rem_euclid(2) == 0 {
        f.clone()
    } else {
        f.clone().reflect()
    }
}

/// A prepared transform of one signal at one angle.
#[derive(Clone, Debug)]
pub struct FrftPlan<'a> {
    f: &'a SignalExpr,
    sign: f64,
    cot: f64,
    csc: f64,
    c: Complex64,
    intervals: Vec<(f64, f64)>,
    breakpoints: Vec<f64>,
    integ: Integrator,
}

impl<'a> FrftPlan<'a> {
    pub fn new(f: &'a SignalExpr, alpha: f64, convention: FrftConvention, spec: &QuadratureSpec) -> Result<Self> {
        f.validate()?;
        let c = c_alpha(alpha)?;
        Ok(Self {
            f,
            sign: convention.chirp_sign(),
            cot: alpha.cos() / alpha.sin(),
            csc: 1.0 / alpha.sin(),
            c,
            intervals: f.support_intervals(),
            breakpoints: f.breakpoints(),
            integ: Integrator::new(*spec)?,
        })
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        let (s, cot, csc) = (self.sign, self.cot, self.csc);
        let f = self.f;
        let rate = |a: f64, b: f64| {
            let ka = (s * cot * a - xi * csc).abs();
            let kb = (s * cot * b - xi * csc).abs();
            2.0 * PI * ka.max(kb) + f.phase_rate(a, b)
        };
        let integral = self.integ.integrate(
            |x| f.eval(x) * Complex64::from_polar(1.0, PI * (s * cot * x * x - 2.0 * x * xi * csc)),
            &self.intervals,
            &self.breakpoints,
            rate,
        );
        self.c * Complex64::from_polar(1.0, s * PI * xi * xi * cot) * integral
    }

    pub fn trace(&self, grid: &Grid) -> SampledTrace {
        SampledTrace::tabulate(grid, |xi| self.eval(xi))
    }
}

/// Transform at a non-multiple of `pi` on `grid`, default quadrature.
pub fn frft(f: &SignalExpr, alpha: f64, grid: &Grid, convention: FrftConvention) -> Result<SampledTrace> {
    frft_with(f, alpha, grid, convention, &QuadratureSpec::default())
}

pub fn frft_with(
    f: &SignalExpr,
    alpha: f64,
    grid: &Grid,
    convention: FrftConvention,
    spec: &QuadratureSpec,
) -> Result<SampledTrace> {
    Ok(FrftPlan::new(f, alpha, convention, spec)?.trace(grid))
}

/// Transform at any angle, multiples of `pi` included.
#[derive(Clone, Debug)]
pub enum FrftOperator<'a> {
    Pointwise { f: &'a SignalExpr, reflect: bool },
    Integral(FrftPlan<'a>),
}

impl<'a> FrftOperator<'a> {
    pub fn new(f: &'a SignalExpr, alpha: f64, convention: FrftConvention, spec: &QuadratureSpec) -> Result<Self> {
        match multiple_of_pi(alpha) {
            Some(k) => Ok(FrftOperator::Pointwise {
                f,
                reflect: k.rem_euclid(2) == 1,
            }),
            None => Ok(FrftOperator::Integral(FrftPlan::new(f, alpha, convention, spec)?)),
        }
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        match self {
            FrftOperator::Pointwise { f, reflect } => f.eval(if *reflect { -xi } else { xi }),
            FrftOperator::Integral(p) => p.eval(xi),
        }
    }
}

/// `lambda_a = c_a / conj(c_a)`, with `Paper_a = lambda_a Std_{pi - a}` off `pi Z`.
pub fn paper_to_standard(alpha: f64) -> Result<(Complex64, f64)> {
    match multiple_of_pi(alpha) {
        Some(_) => Ok((Complex64::new(1.0, 0.0), alpha)),
        None => {
            let c = c_alpha(alpha)?;
            Ok((c / c.conj(), PI - alpha))
        }
    }
}

/// `(lambda, theta)` with `F_alpha = lambda Std_theta` in the given convention.
pub fn as_standard(alpha: f64, convention: FrftConvention) -> Result<(Complex64, f64)> {
    match convention {
        FrftConvention::Paper => paper_to_standard(alpha),
        FrftConvention::Standard => Ok((Complex64::new(1.0, 0.0), alpha)),
    }
}

/// Trapezoidal `||F_alpha f||` on `[-window, window]` over `||f||`.
pub fn parseval_ratio(
    f: &SignalExpr,
    alpha: f64,
    convention: FrftConvention,
    window: f64,
    step: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let n = (2.0 * window / step).round() as usize + 1;
    let grid = Grid::linspace(-window, window, n)?;
    let tr = frft_with(f, alpha, &grid, convention, spec)?;
    Ok(tr.l2_norm() / signal_norm(f)?)
}

pub fn parseval_report(
    f: &SignalExpr,
    alpha: f64,
    convention: FrftConvention,
    window: f64,
    step: f64,
    tol: f64,
) -> Result<VerificationReport> {
    let spec = QuadratureSpec::default();
    let ratio = parseval_ratio(f, alpha, convention, window, step, &spec)?;
    Ok(VerificationReport::new(format!("frft.parseval[{f}; alpha={alpha:.12}]"), (ratio - 1.0).abs(), tol)
        .with("ratio", ratio)
        .with("convention", convention.name())
        .with("window", window)
        .with("step", step)
        .with("order", spec.order))
}

/// `F_{pi/2}` of the centred box against `sin(pi xi)/(pi xi)`.
pub fn sinc_report(grid: &Grid, tol: f64) -> Result<VerificationReport> {
    let f = SignalExpr::boxcar(-0.5, 0.5);
    let spec = QuadratureSpec::default();
    let tr = frft_with(&f, PI / 2.0, grid, FrftConvention::Paper, &spec)?;
    let err = tr
        .iter()
        .map(|(xi, v)| {
            let want = if xi == 0.0 { 1.0 } else { (PI * xi).sin() / (PI * xi) };
            (v - Complex64::new(want, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    Ok(VerificationReport::new("frft.box_sinc", err, tol)
        .with("grid", format!("{}:{}:{}", grid.start, grid.end(), grid.len))
        .with("order", spec.order))
}

/// Measures the eigenvalue of `gamma_1`: `F_alpha gamma_1 = mu gamma_1`.
///
/// Standard convention: `mu = 1`. Paper convention: `mu = lambda_alpha`.
/// The error is the deviation from the predicted `mu` over the grid.
pub fn gaussian_eigen_report(alpha: f64, convention: FrftConvention, grid: &Grid, tol: f64) -> Result<VerificationReport> {
    let g = SignalExpr::gaussian(1.0);
    let (lambda, _) = as_standard(alpha, convention)?;
    let tr = frft(&g, alpha, grid, convention)?;
    let mut err: f64 = 0.0;
    let mut modulus_err: f64 = 0.0;
    for (xi, v) in tr.iter() {
        let gx = (-PI * xi * xi).exp();
        err = err.max((v - lambda * gx).norm());
        modulus_err = modulus_err.max((v.norm() - gx).abs());
    }
    let mu = tr.values()[grid.len / 2] / (-PI * grid.point(grid.len / 2).powi(2)).exp();
    Ok(VerificationReport::new(
        format!("frft.gaussian_eigenvalue[{}; alpha={alpha:.12}]", convention.name()),
        err,
        tol,
    )
    .with("measured_mu_re", mu.re)
    .with("measured_mu_im", mu.im)
    .with("modulus_error", modulus_err))
}

/// Unimodular factor `F_a F_b gamma_1 / F_{a+b} gamma_1` in the `Paper` convention,
/// obtained from measured eigenvalues. `max_error` is `||factor| - 1|`.
pub fn composition_discrepancy_report(alpha: f64, beta: f64) -> Result<VerificationReport> {
    let grid = Grid::linspace(0.0, 0.0, 1)?;
    let mu = |a: f64| -> Result<Complex64> {
        match multiple_of_pi(a) {
            Some(_) => Ok(Complex64::new(1.0, 0.0)),
            None => Ok(frft(&SignalExpr::gaussian(1.0), a, &grid, FrftConvention::Paper)?.values()[0]),
        }
    };
    let factor = mu(alpha)? * mu(beta)? / mu(alpha + beta)?;
    Ok(VerificationReport::new(
        format!("frft.composition_discrepancy[paper; {alpha:.12}+{beta:.12}]"),
        (factor.norm() - 1.0).abs(),
        1e-8,
    )
    .with("factor_re", factor.re)
    .with("factor_im", factor.im)
    .with("factor_arg_over_pi", factor.arg() / PI))
}

/// `|Paper_a f(xi)| = |Std_{-a} f(-xi)|` pointwise.
pub fn convention_bridge_report(f: &SignalExpr, alpha: f64, grid: &Grid, tol: f64) -> Result<VerificationReport> {
    let spec = QuadratureSpec::default();
    let paper = FrftPlan::new(f, alpha, FrftConvention::Paper, &spec)?;
    let standard = FrftPlan::new(f, -alpha, FrftConvention::Standard, &spec)?;
    let err = grid
        .points()
        .map(|xi| (paper.eval(xi).norm() - standard.eval(-xi).norm()).abs())
        .fold(0.0, f64::max);
    Ok(VerificationReport::new(format!("frft.convention_bridge[{f}; alpha={alpha:.12}]"), err, tol))
}
