//! Closed-form signal descriptors.
//!
//! Every transform in the crate integrates a [`SignalExpr`] directly, so the
//! only numerical error is quadrature error. Each node knows its compact
//! support, the points where it fails to be smooth, a bound on its own phase
//! rate (used for panelization) and, where one exists, its Fourier transform
//! `f^(eta) = int f(t) e^{-2 i pi t eta} dt`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{Integrator, QuadratureSpec};

/// `|gamma_u(t)| < 1e-16` outside `[-g, g]` with `g = sqrt(ln(1e16) / (pi Re u))`.
const GAUSSIAN_TAIL_LOG: f64 = 36.841_361_487_904_734;

#[derive(Clone, Debug, PartialEq)]
pub enum SignalExpr {
    /// `e^{-u pi t^2}`, `Re u > 0`.
    Gaussian { u: Complex64 },
    /// Indicator of `[a, b)`.
    Box { a: f64, b: f64 },
    /// `exp(1 - 1/(1 - s^2))` with `s` the affine map of `[a, b]` onto `[-1, 1]`; peak 1.
    Bump { a: f64, b: f64 },
    /// `sin^power(pi (t - a)/(b - a))` on `[a, b]`; `power` even and positive.
    RaisedCosine { a: f64, b: f64, power: u32 },
    /// Hat of height 1 at the midpoint of `[a, b]`.
    Triangle { a: f64, b: f64 },
    /// `e^{-i pi rate t^2} inner(t)`.
    Chirp { rate: f64, inner: Box<SignalExpr> },
    /// `e^{2 i pi freq t} inner(t)`.
    Modulate { freq: f64, inner: Box<SignalExpr> },
    /// `inner(t - by)`.
    Shift { by: f64, inner: Box<SignalExpr> },
    /// `inner(-t)`.
    Reflect { inner: Box<SignalExpr> },
    /// `factor * inner(t)`.
    Scale { factor: Complex64, inner: Box<SignalExpr> },
    Sum { terms: Vec<SignalExpr> },
    Lattice(LatticeSeries),
}

/// `f(t) = sum_P shape_P(t - m) coeffs_P[m - m_min]` with `m = floor(t)`.
///
/// Every shape is supported in `[0, 1)`, so one lattice cell contributes at a
/// time and evaluation is O(number of shapes).
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSeries {
    m_min: i64,
    pieces: Vec<LatticePiece>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticePiece {
    pub shape: SignalExpr,
    pub coeffs: Vec<Complex64>,
}

impl LatticeSeries {
    pub fn new(m_min: i64, pieces: Vec<LatticePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("lattice series needs at least one piece".into()));
        }
        let len = pieces[0].coeffs.len();
        if len == 0 {
            return Err(Error::InvalidInput("lattice series needs at least one cell".into()));
        }
        for p in &pieces {
            if p.coeffs.len() != len {
                return Err(Error::InvalidInput("lattice pieces must share one m-range".into()));
            }
            p.shape.validate()?;
            let (lo, hi) = p.shape.support_window();
            if lo < 0.0 || hi > 1.0 {
                return Err(Error::InvalidInput(format!(
                    "lattice shape support [{lo}, {hi}] must lie in [0, 1]"
                )));
            }
            if p.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite("lattice coefficient".into()));
            }
        }
        Ok(Self { m_min, pieces })
    }

    pub fn m_min(&self) -> i64 {
        self.m_min
    }

    pub fn m_max(&self) -> i64 {
        self.m_min + self.pieces[0].coeffs.len() as i64 - 1
    }

    pub fn pieces(&self) -> &[LatticePiece] {
        &self.pieces
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let m = t.floor();
        let idx = m as i64 - self.m_min;
        if idx < 0 || idx as usize >= self.pieces[0].coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        let x = t - m;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.pieces {
            acc += p.shape.eval(x) * p.coeffs[idx as usize];
        }
        acc
    }

    fn cells(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        let m_min = self.m_min;
        (0..self.pieces[0].coeffs.len()).map(move |i| (m_min + i as i64, i))
    }
}

/// Asymptotic Fourier decay: `|f^(eta)| <= |sum_i J_i e^{-2 i pi eta t_i}| / (2 pi |eta|) + coeff / eta^2`.
///
/// `jumps` are the discontinuities `(t_i, f(t_i+) - f(t_i-))`; `coeff` bounds
/// the remaining smooth part through the variation of `f'`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayModel {
    pub jumps: Vec<(f64, Complex64)>,
    pub coeff: f64,
}

impl DecayModel {
    fn smooth(coeff: f64) -> Self {
        Self { jumps: Vec::new(), coeff }
    }

    /// Upper bound on `|f^(eta)|`, valid for `eta != 0`.
    pub fn bound(&self, eta: f64) -> f64 {
        let a = eta.abs();
        let j: f64 = self.jumps.iter().map(|(_, jump)| jump.norm()).sum();
        j / (2.0 * PI * a) + self.coeff / (a * a)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `int_0^1 sin^{2K}(pi s) e^{-2 i pi z s} ds`.
pub(crate) fn raised_cosine_unit_fourier(k: u32, z: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, -PI * z);
    if z.abs() <= k as f64 + 0.5 {
        raised_cosine_unit_fourier_expansion(k, z)
    } else {
        let mut den = PI * z;
        for j in 1..=k {
            den *= (j * j) as f64 - z * z;
        }
        phase * (raised_cosine_norm(k) * (PI * z).sin() / den)
    }
}

/// Same integral through the cosine-power expansion; accurate for small `|z|`.
pub(crate) fn raised_cosine_unit_fourier_expansion(k: u32, z: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, -PI * z);
    let mut acc = binomial(2 * k, k) * sinc(z);
    for j in 1..=k {
        acc += binomial(2 * k, k - j) * (sinc(z - j as f64) + sinc(z + j as f64));
    }
    phase * (acc / 4f64.powi(k as i32))
}

/// `(2K)! / 4^K`.
fn raised_cosine_norm(k: u32) -> f64 {
    (1..=2 * k).fold(1.0, |acc, i| acc * i as f64) / 4f64.powi(k as i32)
}

/// `max_s |d/ds sin^{2K}(pi s)|`.
fn raised_cosine_max_slope(k: u32) -> f64 {
    let n = 2.0 * k as f64;
    n * PI * ((n - 1.0) / n).powf((n - 1.0) / 2.0) * n.powf(-0.5)
}

/// `max_s |d/ds exp(1 - 1/(1 - s^2))|` on `(-1, 1)`, by a dense scan.
fn bump_max_slope() -> f64 {
    let n = 20_000;
    let mut best: f64 = 0.0;
    for i in 1..n {
        let s = i as f64 / n as f64;
        let d = 1.0 - s * s;
        let g = (1.0 - 1.0 / d).exp() * 2.0 * s / (d * d);
        best = best.max(g);
    }
    // grid error of a smooth maximum is second order; 1e-3 covers it
    best * 1.001
}

impl SignalExpr {
    pub fn gaussian(u: f64) -> Self {
        SignalExpr::Gaussian { u: Complex64::new(u, 0.0) }
    }

    pub fn boxcar(a: f64, b: f64) -> Self {
        SignalExpr::Box { a, b }
    }

    pub fn bump(a: f64, b: f64) -> Self {
        SignalExpr::Bump { a, b }
    }

    pub fn triangle(a: f64, b: f64) -> Self {
        SignalExpr::Triangle { a, b }
    }

    pub fn raised_cosine(a: f64, b: f64, power: u32) -> Self {
        SignalExpr::RaisedCosine { a, b, power }
    }

    pub fn chirp(self, rate: f64) -> Self {
        SignalExpr::Chirp { rate, inner: Box::new(self) }
    }

    pub fn modulate(self, freq: f64) -> Self {
        SignalExpr::Modulate { freq, inner: Box::new(self) }
    }

    pub fn shift(self, by: f64) -> Self {
        SignalExpr::Shift { by, inner: Box::new(self) }
    }

    pub fn reflect(self) -> Self {
        SignalExpr::Reflect { inner: Box::new(self) }
    }

    pub fn scale(self, factor: Complex64) -> Self {
        SignalExpr::Scale { factor, inner: Box::new(self) }
    }

    pub fn sum(terms: Vec<SignalExpr>) -> Self {
        SignalExpr::Sum { terms }
    }

    /// Checks parameters: finite, `a < b`, `Re u > 0`, even positive powers.
    pub fn validate(&self) -> Result<()> {
        fn finite(name: &str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite(format!("{name} = {v}")))
            }
        }
        fn interval(a: f64, b: f64) -> Result<()> {
            finite("a", a)?;
            finite("b", b)?;
            if a < b {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")))
            }
        }
        match self {
            SignalExpr::Gaussian { u } => {
                finite("Re u", u.re)?;
                finite("Im u", u.im)?;
                if u.re > 0.0 {
                    Ok(())
                } else {
                    Err(Error::UnboundedSupport(format!("gaussian with Re u = {} <= 0", u.re)))
                }
            }
            SignalExpr::Box { a, b } | SignalExpr::Bump { a, b } | SignalExpr::Triangle { a, b } => {
                interval(*a, *b)
            }
            SignalExpr::RaisedCosine { a, b, power } => {
                interval(*a, *b)?;
                if *power == 0 || power % 2 == 1 {
                    return Err(Error::InvalidInput(format!(
                        "raised-cosine power must be even and positive, got {power}"
                    )));
                }
                Ok(())
            }
            SignalExpr::Chirp { rate: v, inner }
            | SignalExpr::Modulate { freq: v, inner }
            | SignalExpr::Shift { by: v, inner } => {
                finite("parameter", *v)?;
                inner.validate()
            }
            SignalExpr::Reflect { inner } => inner.validate(),
            SignalExpr::Scale { factor, inner } => {
                finite("factor", factor.re)?;
                finite("factor", factor.im)?;
                inner.validate()
            }
            SignalExpr::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidInput("empty sum".into()));
                }
                terms.iter().try_for_each(SignalExpr::validate)
            }
            SignalExpr::Lattice(_) => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let real = |v: f64| Complex64::new(v, 0.0);
        match self {
            SignalExpr::Gaussian { u } => (-(u * (PI * t * t))).exp(),
            SignalExpr::Box { a, b } => {
                if t >= *a && t < *b {
                    real(1.0)
                } else {
                    zero
                }
            }
            SignalExpr::Bump { a, b } => {
                let s = (2.0 * t - a - b) / (b - a);
                if s.abs() < 1.0 {
                    real((1.0 - 1.0 / (1.0 - s * s)).exp())
                } else {
                    zero
                }
            }
            SignalExpr::RaisedCosine { a, b, power } => {
                if t >= *a && t <= *b {
                    real((PI * (t - a) / (b - a)).sin().powi(*power as i32))
                } else {
                    zero
                }
            }
            SignalExpr::Triangle { a, b } => {
                let s = (2.0 * t - a - b) / (b - a);
                if s.abs() <= 1.0 {
                    real(1.0 - s.abs())
                } else {
                    zero
                }
            }
            SignalExpr::Chirp { rate, inner } => {
                Complex64::from_polar(1.0, -PI * rate * t * t) * inner.eval(t)
            }
            SignalExpr::Modulate { freq, inner } => {
                Complex64::from_polar(1.0, 2.0 * PI * freq * t) * inner.eval(t)
            }
            SignalExpr::Shift { by, inner } => inner.eval(t - by),
            SignalExpr::Reflect { inner } => inner.eval(-t),
            SignalExpr::Scale { factor, inner } => factor * inner.eval(t),
            SignalExpr::Sum { terms } => terms.iter().map(|s| s.eval(t)).sum(),
            SignalExpr::Lattice(l) => l.eval(t),
        }
    }

    /// Compact window outside of which `|f| < 1e-16 * peak` (exactly zero except for Gaussians).
    pub fn support_window(&self) -> (f64, f64) {
        match self {
            SignalExpr::Gaussian { u } => {
                let g = (GAUSSIAN_TAIL_LOG / (PI * u.re)).sqrt();
                (-g, g)
            }
            SignalExpr::Box { a, b }
            | SignalExpr::Bump { a, b }
            | SignalExpr::Triangle { a, b }
            | SignalExpr::RaisedCosine { a, b, .. } => (*a, *b),
            SignalExpr::Chirp { inner, .. }
            | SignalExpr::Modulate { inner, .. }
            | SignalExpr::Scale { inner, .. } => inner.support_window(),
            SignalExpr::Shift { by, inner } => {
                let (lo, hi) = inner.support_window();
                (lo + by, hi + by)
            }
            SignalExpr::Reflect { inner } => {
                let (lo, hi) = inner.support_window();
                (-hi, -lo)
            }
            SignalExpr::Sum { terms } => terms
                .iter()
                .map(SignalExpr::support_window)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| (l.min(a), h.max(b))),
            SignalExpr::Lattice(l) => {
                let (lo, hi) = l
                    .pieces
                    .iter()
                    .map(|p| p.shape.support_window())
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| (l.min(a), h.max(b)));
                (l.m_min as f64 + lo, l.m_max() as f64 + hi)
            }
        }
    }

    /// Sorted, disjoint intervals covering the support.
    pub fn support_intervals(&self) -> Vec<(f64, f64)> {
        let mut raw = Vec::new();
        self.collect_intervals(&mut raw);
        merge_intervals(raw)
    }

    fn collect_intervals(&self, out: &mut Vec<(f64, f64)>) {
        match self {
            SignalExpr::Chirp { inner, .. }
            | SignalExpr::Modulate { inner, .. }
            | SignalExpr::Scale { inner, .. } => inner.collect_intervals(out),
            SignalExpr::Shift { by, inner } => {
                let start = out.len();
                inner.collect_intervals(out);
                for iv in &mut out[start..] {
                    iv.0 += by;
                    iv.1 += by;
                }
            }
            SignalExpr::Reflect { inner } => {
                let start = out.len();
                inner.collect_intervals(out);
                for iv in &mut out[start..] {
                    *iv = (-iv.1, -iv.0);
                }
            }
            SignalExpr::Sum { terms } => terms.iter().for_each(|t| t.collect_intervals(out)),
            SignalExpr::Lattice(l) => {
                let shapes: Vec<Vec<(f64, f64)>> =
                    l.pieces.iter().map(|p| p.shape.support_intervals()).collect();
                for (m, i) in l.cells() {
                    for (p, ivs) in l.pieces.iter().zip(&shapes) {
                        if p.coeffs[i] != Complex64::new(0.0, 0.0) {
                            out.extend(ivs.iter().map(|&(a, b)| (a + m as f64, b + m as f64)));
                        }
                    }
                }
            }
            _ => out.push(self.support_window()),
        }
    }

    /// Points where the signal or one of its low derivatives is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            SignalExpr::Gaussian { .. } => {}
            SignalExpr::Box { a, b } | SignalExpr::Bump { a, b } | SignalExpr::RaisedCosine { a, b, .. } => {
                out.extend([*a, *b])
            }
            SignalExpr::Triangle { a, b } => out.extend([*a, 0.5 * (a + b), *b]),
            SignalExpr::Chirp { inner, .. }
            | SignalExpr::Modulate { inner, .. }
            | SignalExpr::Scale { inner, .. } => inner.collect_breakpoints(out),
            SignalExpr::Shift { by, inner } => {
                let start = out.len();
                inner.collect_breakpoints(out);
                out[start..].iter_mut().for_each(|x| *x += by);
            }
            SignalExpr::Reflect { inner } => {
                let start = out.len();
                inner.collect_breakpoints(out);
                out[start..].iter_mut().for_each(|x| *x = -*x);
            }
            SignalExpr::Sum { terms } => terms.iter().for_each(|t| t.collect_breakpoints(out)),
            SignalExpr::Lattice(l) => {
                let shapes: Vec<f64> = l.pieces.iter().flat_map(|p| p.shape.breakpoints()).collect();
                for (m, _) in l.cells() {
                    out.extend(shapes.iter().map(|x| x + m as f64));
                }
            }
        }
    }

    /// Upper bound on `|d/dt arg f(t)|` over `[lo, hi]`.
    pub fn phase_rate(&self, lo: f64, hi: f64) -> f64 {
        let reach = lo.abs().max(hi.abs());
        match self {
            SignalExpr::Gaussian { u } => 2.0 * PI * u.im.abs() * reach,
            SignalExpr::Box { .. }
            | SignalExpr::Bump { .. }
            | SignalExpr::RaisedCosine { .. }
            | SignalExpr::Triangle { .. }
            | SignalExpr::Lattice(_) => 0.0,
            SignalExpr::Chirp { rate, inner } => 2.0 * PI * rate.abs() * reach + inner.phase_rate(lo, hi),
            SignalExpr::Modulate { freq, inner } => 2.0 * PI * freq.abs() + inner.phase_rate(lo, hi),
            SignalExpr::Shift { by, inner } => inner.phase_rate(lo - by, hi - by),
            SignalExpr::Reflect { inner } => inner.phase_rate(-hi, -lo),
            SignalExpr::Scale { inner, .. } => inner.phase_rate(lo, hi),
            SignalExpr::Sum { terms } => terms.iter().map(|t| t.phase_rate(lo, hi)).fold(0.0, f64::max),
        }
    }

    /// Closed-form `f^(eta)` when one is known.
    pub fn fourier(&self, eta: f64) -> Option<Complex64> {
        let shift = |c: f64| Complex64::from_polar(1.0, -2.0 * PI * c * eta);
        match self {
            SignalExpr::Gaussian { u } => {
                let inv = u.inv();
                Some(inv.sqrt() * (-(inv * (PI * eta * eta))).exp())
            }
            SignalExpr::Box { a, b } => {
                let w = b - a;
                Some(shift(0.5 * (a + b)) * (w * sinc(w * eta)))
            }
            SignalExpr::Triangle { a, b } => {
                let h = 0.5 * (b - a);
                Some(shift(0.5 * (a + b)) * (h * sinc(h * eta).powi(2)))
            }
            SignalExpr::RaisedCosine { a, b, power } => {
                let w = b - a;
                Some(shift(*a) * raised_cosine_unit_fourier(power / 2, w * eta) * w)
            }
            SignalExpr::Bump { .. } | SignalExpr::Chirp { .. } => None,
            SignalExpr::Modulate { freq, inner } => inner.fourier(eta - freq),
            SignalExpr::Shift { by, inner } => inner.fourier(eta).map(|v| v * shift(*by)),
            SignalExpr::Reflect { inner } => inner.fourier(-eta),
            SignalExpr::Scale { factor, inner } => inner.fourier(eta).map(|v| v * factor),
            SignalExpr::Sum { terms } => terms.iter().map(|t| t.fourier(eta)).sum(),
            SignalExpr::Lattice(l) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in &l.pieces {
                    let shape = p.shape.fourier(eta)?;
                    let step = Complex64::from_polar(1.0, -2.0 * PI * eta);
                    let mut rot = Complex64::from_polar(1.0, -2.0 * PI * eta * l.m_min as f64);
                    let mut s = Complex64::new(0.0, 0.0);
                    for c in &p.coeffs {
                        s += c * rot;
                        rot *= step;
                    }
                    acc += shape * s;
                }
                Some(acc)
            }
        }
    }

    /// Fourier decay model; `None` for nodes whose transform has no simple envelope.
    pub fn fourier_decay(&self) -> Option<DecayModel> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            SignalExpr::Gaussian { u } => {
                let inv = u.inv();
                Some(DecayModel::smooth(inv.norm().sqrt() / (PI * std::f64::consts::E * inv.re)))
            }
            SignalExpr::Box { a, b } => Some(DecayModel {
                jumps: vec![(*a, one), (*b, -one)],
                coeff: 0.0,
            }),
            SignalExpr::Triangle { a, b } => Some(DecayModel::smooth(1.0 / (PI * PI * 0.5 * (b - a)))),
            SignalExpr::RaisedCosine { a, b, power } => {
                let slope = raised_cosine_max_slope(power / 2) / (b - a);
                Some(DecayModel::smooth(4.0 * slope / (4.0 * PI * PI)))
            }
            SignalExpr::Bump { a, b } => {
                let slope = bump_max_slope() * 2.0 / (b - a);
                Some(DecayModel::smooth(4.0 * slope / (4.0 * PI * PI)))
            }
            SignalExpr::Shift { by, inner } => inner.fourier_decay().map(|mut d| {
                d.jumps.iter_mut().for_each(|(t, _)| *t += by);
                d
            }),
            SignalExpr::Reflect { inner } => inner.fourier_decay().map(|mut d| {
                d.jumps.iter_mut().for_each(|(t, j)| {
                    *t = -*t;
                    *j = -*j;
                });
                d
            }),
            SignalExpr::Scale { factor, inner } => inner.fourier_decay().map(|mut d| {
                d.jumps.iter_mut().for_each(|(_, j)| *j *= factor);
                d.coeff *= factor.norm();
                d
            }),
            SignalExpr::Sum { terms } => {
                let mut acc = DecayModel::smooth(0.0);
                for t in terms {
                    let d = t.fourier_decay()?;
                    acc.jumps.extend(d.jumps);
                    acc.coeff += d.coeff;
                }
                Some(acc)
            }
            SignalExpr::Chirp { .. } | SignalExpr::Modulate { .. } | SignalExpr::Lattice(_) => None,
        }
    }
}

pub(crate) fn merge_intervals(mut raw: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    raw.retain(|(a, b)| b > a);
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
    for (a, b) in raw {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `sqrt(int_window |f|^2)`; the window must cover the support window of `f`.
pub fn l2_norm(f: &SignalExpr, window: (f64, f64), order: usize) -> Result<f64> {
    f.validate()?;
    let (lo, hi) = window;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::NonFinite(format!("window [{lo}, {hi}]")));
    }
    let (slo, shi) = f.support_window();
    let slack = 1e-12 * (1.0 + slo.abs().max(shi.abs()));
    if lo > slo + slack || hi < shi - slack {
        return Err(Error::Truncated {
            window_lo: lo,
            window_hi: hi,
            support_lo: slo,
            support_hi: shi,
        });
    }
    let integ = Integrator::new(QuadratureSpec::with_order(order))?;
    let intervals: Vec<(f64, f64)> = f
        .support_intervals()
        .into_iter()
        .map(|(a, b)| (a.max(lo), b.min(hi)))
        .filter(|(a, b)| b > a)
        .collect();
    let panels = integ.panels(&intervals, &f.breakpoints(), |_, _| 0.0);
    Ok(integ.integrate_panels_real(|t| f.eval(t).norm_sqr(), &panels).sqrt())
}

/// `l2_norm` over the signal's own support window.
pub fn signal_norm(f: &SignalExpr) -> Result<f64> {
    l2_norm(f, f.support_window(), 24)
}

impl fmt::Display for SignalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalExpr::Gaussian { u } if u.im == 0.0 => write!(f, "gaussian:{}", u.re),
            SignalExpr::Gaussian { u } => write!(f, "gaussian:{}:{}", u.re, u.im),
            SignalExpr::Box { a, b } => write!(f, "box:{a}:{b}"),
            SignalExpr::Bump { a, b } => write!(f, "bump:{a}:{b}"),
            SignalExpr::Triangle { a, b } => write!(f, "triangle:{a}:{b}"),
            SignalExpr::RaisedCosine { a, b, power } => write!(f, "raised-cosine:{a}:{b}:{power}"),
            SignalExpr::Chirp { rate, inner } => write!(f, "chirp({rate}, {inner})"),
            SignalExpr::Modulate { freq, inner } => write!(f, "modulate({freq}, {inner})"),
            SignalExpr::Shift { by, inner } => write!(f, "shift({by}, {inner})"),
            SignalExpr::Reflect { inner } => write!(f, "reflect({inner})"),
            SignalExpr::Scale { factor, inner } => write!(f, "scale({factor}, {inner})"),
            SignalExpr::Sum { terms } => {
                write!(f, "sum(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            SignalExpr::Lattice(l) => write!(
                f,
                "lattice(m={}..={}, pieces={})",
                l.m_min,
                l.m_max(),
                l.pieces.len()
            ),
        }
    }
}

impl FromStr for SignalExpr {
    type Err = Error;

    /// Base shapes: `gaussian[:re[:im]]`, `box[:a:b]`, `bump[:a:b]`,
    /// `triangle[:a:b]`, `raised-cosine:a:b:power`. Defaults are `u = 1`,
    /// `box` on `[-1/2, 1/2)`, `bump` and `triangle` on `[-1, 1]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidInput(format!("signal {s:?}: missing parameter {i}")))?
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("signal {s:?}: bad number {:?}", parts[i])))
        };
        let pair = |da: f64, db: f64| -> Result<(f64, f64)> {
            match parts.len() {
                1 => Ok((da, db)),
                3 => Ok((num(1)?, num(2)?)),
                _ => Err(Error::InvalidInput(format!("signal {s:?}: expected name:a:b"))),
            }
        };
        let sig = match parts[0].trim() {
            "gaussian" => match parts.len() {
                1 => SignalExpr::gaussian(1.0),
                2 => SignalExpr::gaussian(num(1)?),
                3 => SignalExpr::Gaussian { u: Complex64::new(num(1)?, num(2)?) },
                _ => return Err(Error::InvalidInput(format!("signal {s:?}: expected gaussian[:re[:im]]"))),
            },
            "box" => {
                let (a, b) = pair(-0.5, 0.5)?;
                SignalExpr::boxcar(a, b)
            }
            "bump" => {
                let (a, b) = pair(-1.0, 1.0)?;
                SignalExpr::bump(a, b)
            }
            "triangle" => {
                let (a, b) = pair(-1.0, 1.0)?;
                SignalExpr::triangle(a, b)
            }
            "raised-cosine" if parts.len() == 4 => {
                let power = parts[3]
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("signal {s:?}: bad power")))?;
                SignalExpr::raised_cosine(num(1)?, num(2)?, power)
            }
            other => return Err(Error::InvalidInput(format!("unknown signal {other:?}"))),
        };
        sig.validate()?;
        Ok(sig)
    }
}
