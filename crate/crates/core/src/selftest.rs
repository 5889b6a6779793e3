//! The acceptance suite as plain library calls. Reports carry no timings, so
//! two runs with equal tolerances serialize identically.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::approx::{brute_force_modulus, build_solution, evaluate_modulus, monotonicity_report, solution_reports};
use crate::chirp::gauss_coefficient;
use crate::counterexample::{build_family, verify_disjoint_supports, verify_phase_invariance, FamilyConfig};
use crate::error::Result;
use crate::frft::{parseval_report, sinc_report, FrftConvention};
use crate::numerics::{Grid, RationalSlope, ReportBundle, SignalExpr, Tolerances, VerificationReport};
use crate::oblique::{chirp_moment_report, verify_oblique_identity, verify_oblique_identity_with, MomentVariant};
use crate::zak::{verify_zak_identities, ZakCheckSpec};

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    /// Wall-clock budget in seconds.
    pub budget: f64,
    pub run: fn(&Tolerances) -> Result<Vec<VerificationReport>>,
}

pub const CRITERIA: [Criterion; 7] = [
    Criterion {
        id: 1,
        name: "gauss coefficient modulus",
        budget: 1.0,
        run: gauss_modulus,
    },
    Criterion {
        id: 2,
        name: "frft sanity",
        budget: 30.0,
        run: frft_sanity,
    },
    Criterion {
        id: 3,
        name: "zak identities",
        budget: 30.0,
        run: zak_identities,
    },
    Criterion {
        id: 4,
        name: "chirp moment",
        budget: 60.0,
        run: chirp_moments,
    },
    Criterion {
        id: 5,
        name: "oblique marginal",
        budget: 120.0,
        run: oblique_marginal,
    },
    Criterion {
        id: 6,
        name: "non-uniqueness witness",
        budget: 180.0,
        run: witness,
    },
    Criterion {
        id: 7,
        name: "approximate pauli",
        budget: 120.0,
        run: approximate_pauli,
    },
];

fn slope(p: i64, q: i64) -> RationalSlope {
    RationalSlope::new(p, q).expect("coprime literal")
}

fn matrix_slopes() -> [RationalSlope; 4] {
    [slope(1, 1), slope(2, 1), slope(1, 2), slope(3, 2)]
}

fn matrix_signals() -> [SignalExpr; 3] {
    [SignalExpr::gaussian(1.0), SignalExpr::bump(-1.0, 1.0), SignalExpr::boxcar(-0.5, 0.5)]
}

pub fn gauss_modulus(tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut worst = 0.0f64;
    let mut count = 0u64;
    let mut pairs = vec![(0, 1)];
    for p in (-8i64..=8).filter(|&p| p != 0) {
        for q in 1..=12 {
            pairs.push((p, q));
        }
    }
    for (p, q) in pairs {
        let Ok(s) = RationalSlope::new(p, q) else { continue };
        for n in -2 * q..=2 * q {
            let c = gauss_coefficient(n, s);
            worst = worst.max((c.norm() - (q as f64).sqrt().recip()).abs());
            count += 1;
        }
    }
    Ok(vec![VerificationReport::new("chirp.gauss_modulus", worst, tol.gauss_modulus).with("coefficients", count)])
}

pub fn parseval_corpus() -> Vec<SignalExpr> {
    vec![
        SignalExpr::gaussian(1.0),
        SignalExpr::bump(-1.0, 1.0),
        SignalExpr::triangle(-1.0, 1.0),
        SignalExpr::raised_cosine(-0.5, 0.5, 4),
    ]
}

pub fn frft_sanity(tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut out = vec![sinc_report(&Grid::linspace(-4.0, 4.0, 801)?, tol.frft_sinc)?];
    let angles = [PI / 6.0, PI / 4.0, slope(2, 1).alpha(), 3.0 * PI / 5.0];
    for f in parseval_corpus() {
        for &a in &angles {
            out.push(parseval_report(&f, a, FrftConvention::Paper, 12.0, 0.02, tol.parseval)?);
        }
    }
    Ok(out)
}

pub fn zak_corpus() -> Vec<SignalExpr> {
    vec![
        SignalExpr::gaussian(1.0),
        SignalExpr::boxcar(-0.5, 0.5),
        SignalExpr::bump(-0.7, 1.6),
        SignalExpr::triangle(-1.0, 1.0),
    ]
}

pub fn zak_identities(tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let spec = ZakCheckSpec {
        tol: tol.zak,
        ..ZakCheckSpec::default()
    };
    let mut out = Vec::new();
    for f in zak_corpus() {
        out.extend(verify_zak_identities(&f, &spec)?);
    }
    Ok(out)
}

pub fn chirp_moments(tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for s in matrix_slopes() {
        for f in matrix_signals() {
            for omega in [0.0, 1.3] {
                out.push(chirp_moment_report(&f, s, omega, tol.chirp_moment)?);
            }
        }
    }
    Ok(out)
}

pub fn oblique_marginal(tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let grid = Grid::linspace(-3.0, 3.0, 121)?;
    let mut out = Vec::new();
    for s in matrix_slopes() {
        for f in matrix_signals() {
            out.push(verify_oblique_identity(&f, s, &grid, tol.oblique)?);
        }
    }
    let s = slope(2, 1);
    let g = SignalExpr::gaussian(1.0);
    let printed_sine = MomentVariant {
        unconjugated: false,
        sin_alpha: Some(s.p() as f64 / s.length()),
    };
    let control = verify_oblique_identity_with(&g, s, &grid, tol.oblique, printed_sine)?;
    out.push(
        VerificationReport::audit("oblique.negative_control[printed sine; 2/1]", !control.pass)
            .with("residual", control.max_error)
            .with("tolerance", control.tolerance),
    );
    let s = slope(1, 2);
    let unconjugated = MomentVariant {
        unconjugated: true,
        sin_alpha: None,
    };
    let control = verify_oblique_identity_with(&g, s, &grid, tol.oblique, unconjugated)?;
    out.push(
        VerificationReport::audit("oblique.negative_control[unconjugated coefficients; 1/2]", !control.pass)
            .with("residual", control.max_error)
            .with("tolerance", control.tolerance),
    );
    Ok(out)
}

pub fn witness_phases() -> Vec<[Complex64; 2]> {
    vec![
        [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, PI / 3.0)],
    ]
}

pub fn witness(tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let family = build_family(&FamilyConfig::new(vec![slope(1, 1), slope(2, 1), slope(1, 2)], 2))?;
    let grid = Grid::linspace(-1.0, 1.0, 801)?;
    let traces = family.traces(&grid)?;
    let mut out = verify_disjoint_supports(&family, &traces, &grid, tol.leak);
    for phases in witness_phases() {
        out.extend(verify_phase_invariance(&family, &traces, &phases, tol.phase_invariance, tol.correlation_max)?);
    }
    out.push(
        VerificationReport::new("counterexample.truncation_tail", family.tail_bound, crate::counterexample::TAIL_THRESHOLD)
            .with("m_range", family.m_range),
    );
    Ok(out)
}

pub fn approximate_pauli(tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let targets = [SignalExpr::triangle(-1.0, 1.0), SignalExpr::boxcar(-1.0, 1.0)];
    let angles = [0.0, PI / 2.0];
    let sol = match build_solution(&targets, &angles, tol.approx_epsilon, 1.0) {
        Ok(s) => s,
        Err(e) => {
            return Ok(vec![VerificationReport::audit("approx.build", false).with("error", e.to_string())]);
        }
    };
    let mut out = solution_reports(&sol);
    out.push(monotonicity_report(&sol, 2.0)?);
    // brute force away from the box jumps at +-1
    let inner = Grid::linspace(-0.8, 0.8, 41)?;
    let ones = [Complex64::new(1.0, 0.0); 2];
    for &a in &angles {
        let fast = evaluate_modulus(&sol, &ones, a, &inner)?;
        let brute = brute_force_modulus(&sol, &ones, a, &inner, 1.0e4, 0.25)?;
        out.push(
            VerificationReport::new(format!("approx.brute_force[alpha={a:.12}]"), fast.max_abs_diff(&brute)?, 1e-4)
                .with("width", 1.0e4)
                .with("excluded_band", 0.2),
        );
    }
    let flip = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    let bound = 2.0 * tol.approx_epsilon;
    for &a in &angles {
        let x = evaluate_modulus(&sol, &ones, a, &sol.grid)?;
        let y = evaluate_modulus(&sol, &flip, a, &sol.grid)?;
        out.push(VerificationReport::new(format!("approx.phase_spread[alpha={a:.12}]"), x.max_abs_diff(&y)?, bound));
    }
    Ok(out)
}

/// Runs one criterion; errors become a failing report.
pub fn run_criterion(c: &Criterion, tol: &Tolerances) -> Vec<VerificationReport> {
    let reports = match (c.run)(tol) {
        Ok(r) => r,
        Err(e) => vec![VerificationReport::audit(format!("criterion.{}", c.id), false).with("error", e.to_string())],
    };
    reports.into_iter().map(|r| r.with("criterion", c.id)).collect()
}

/// Criteria 1 to 7 in order.
pub fn run_selftest(tol: &Tolerances) -> ReportBundle {
    ReportBundle::new(CRITERIA.iter().flat_map(|c| run_criterion(c, tol)).collect())
}
