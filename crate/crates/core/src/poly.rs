//! The polynomial application: the equation
//!
//! ```text
//! v^m − (m⁴ − 1)·v^(m+1) − m⁴·v + 1 = 0,   m >= 3,
//! ```
//!
//! solved on [0, 1] as the fixed point of F(p) = (p^m + 1) / ((m⁴ − 1)p^m + m⁴)
//! in the space ([0, 1], |p − s| + |s − q|, α(t) = 2√t), with every
//! hypothesis of the Banach-type theorem audited and the root cross-checked
//! by bisection.

use serde::Serialize;

use crate::audit::{
    check_alpha_subhomogeneity, check_alpha_zero, check_composed_triangle, check_identity_axiom,
    check_series_vanishing, check_symmetry, SeriesValue, Tally, Verdict, DEFAULT_K_SET,
};
use crate::error::{CsError, Result};
use crate::fixed_point::{check_banach, picard, uniqueness_probe, SolveResult, DEFAULT_MAX_ITER};
use crate::sampling::SampleConfig;
use crate::spaces::{make_builtin_space, ComposedSpace, SelfMap};

/// Start used when none is given: the midpoint of [0, 1].
pub const DEFAULT_X0: f64 = 0.5;

fn check_m(m: u32) -> Result<()> {
    if m < 3 {
        Err(CsError::Domain(format!(
            "the polynomial family is defined for m >= 3, got m = {m}"
        )))
    } else {
        Ok(())
    }
}

fn m4(m: u32) -> f64 {
    (m as f64).powi(4)
}

/// v^m − (m⁴ − 1)v^(m+1) − m⁴v + 1, grouped as 1 + v·(v^(m−1)·(1 − (m⁴ − 1)v) − m⁴).
pub fn residual(m: u32, v: f64) -> Result<f64> {
    check_m(m)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(CsError::Domain(format!(
            "residual is evaluated on [0, 1], got v = {v}"
        )));
    }
    let m4 = m4(m);
    Ok(1.0 + v * (v.powi(m as i32 - 1) * (1.0 - (m4 - 1.0) * v) - m4))
}

/// F(p) = (p^m + 1) / ((m⁴ − 1)p^m + m⁴).
pub(crate) fn poly_fn(m: u32) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let m4 = m4(m);
    move |p: f64| {
        let pm = p.powi(m as i32);
        (pm + 1.0) / ((m4 - 1.0) * pm + m4)
    }
}

#[derive(Debug, Clone)]
pub struct PolyProblem {
    pub m: u32,
    pub map: SelfMap,
    pub space: ComposedSpace,
}

pub fn poly_map(m: u32) -> Result<PolyProblem> {
    check_m(m)?;
    let space = make_builtin_space("app_metric", &[])?;
    let map = SelfMap::new(format!("poly_m{m}"), space.domain.clone(), poly_fn(m))
        .with_params(vec![m as f64]);
    Ok(PolyProblem { m, map, space })
}

/// The contraction factor used for the theorem check: 1/81 for m = 3 (the
/// factor proved for that case) and m⁻⁷ otherwise.
pub fn contraction_bound(m: u32) -> Result<f64> {
    check_m(m)?;
    Ok(if m == 3 {
        1.0 / 81.0
    } else {
        derived_contraction_bound(m)?
    })
}

/// Mean-value bound m⁻⁷: |F(p) − F(s)| = |p^m − s^m| / (D(p)·D(s)) with
/// |p^m − s^m| <= m|p − s| on [0, 1] and D >= m⁴.
pub fn derived_contraction_bound(m: u32) -> Result<f64> {
    check_m(m)?;
    Ok((m as f64).powi(-7))
}

/// Root of the residual on [0, 1] by bisection, to a bracket of width <= tol.
pub fn bisection_oracle(m: u32, tol: f64) -> Result<f64> {
    check_m(m)?;
    if !(tol > 0.0) {
        return Err(CsError::Config(format!(
            "oracle tolerance must be positive, got {tol}"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (f_lo, f_hi) = (residual(m, lo)?, residual(m, hi)?);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(CsError::Internal(format!(
            "no sign change on [0, 1]: residual(0) = {f_lo}, residual(1) = {f_hi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = residual(m, mid)?;
        if f == 0.0 {
            return Ok(mid);
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Picard iteration of F from `x0`.
pub fn solve_poly(m: u32, x0: f64, tol: f64) -> Result<SolveResult> {
    let problem = poly_map(m)?;
    problem.space.domain.check(x0)?;
    picard(&problem.space, &problem.map, x0, tol, DEFAULT_MAX_ITER)
}

/// Knobs of the hypothesis pipeline. Defaults are what the CLI runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm41Options {
    pub samples: SampleConfig,
    pub x0: f64,
    pub solve_tol: f64,
    pub oracle_tol: f64,
    pub series_gaps: Vec<usize>,
    pub series_schedule: Vec<usize>,
    pub series_tol: f64,
    pub starts: Vec<f64>,
}

impl Default for Thm41Options {
    fn default() -> Self {
        Thm41Options {
            samples: SampleConfig::default(),
            x0: DEFAULT_X0,
            solve_tol: 1e-12,
            oracle_tol: 1e-14,
            series_gaps: vec![5, 8],
            series_schedule: vec![5, 10, 20, 40, 80, 160, 320, 640, 1280],
            series_tol: 1e-6,
            starts: (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm41Report {
    pub m: u32,
    pub hypotheses: Vec<Hypothesis>,
    pub root: f64,
    pub oracle_root: f64,
    pub agreement: f64,
    /// Per-(gap, n) values of the series check.
    pub series: Vec<SeriesValue>,
}

impl Thm41Report {
    pub fn all_passed(&self) -> bool {
        self.hypotheses.iter().all(|h| h.verdict.passed)
    }
}

/// Audits every hypothesis of the Banach-type theorem for the degree-m
/// problem, solves it, and cross-checks the root against bisection. The
/// hypotheses appear in a fixed order.
pub fn verify_theorem_4_1(m: u32, opts: &Thm41Options) -> Result<Thm41Report> {
    let problem = poly_map(m)?;
    let (space, map, cfg) = (&problem.space, &problem.map, &opts.samples);
    let r = contraction_bound(m)?;

    let mut hypotheses = Vec::new();
    let mut push = |name: &str, verdict: Verdict| {
        hypotheses.push(Hypothesis {
            name: name.to_string(),
            verdict,
        })
    };

    push("identity_axiom", check_identity_axiom(space, cfg)?);
    push("composed_triangle", check_composed_triangle(space, cfg)?);
    push("symmetry", check_symmetry(space, cfg)?);
    push("alpha_zero", check_alpha_zero(&space.alpha)?);
    push(
        "alpha_subhomogeneity",
        check_alpha_subhomogeneity(&space.alpha, cfg, &DEFAULT_K_SET)?,
    );
    push("banach_contraction", check_banach(space, map, r, cfg)?);

    let solved = solve_poly(m, opts.x0, opts.solve_tol)?;
    let c0 = solved.orbit.step_distances.first().copied().unwrap_or(0.0);
    let series = check_series_vanishing(
        &space.alpha,
        r,
        c0,
        &opts.series_gaps,
        &opts.series_schedule,
        opts.series_tol,
    )?;
    push("series_vanishing", series.verdict);
    push(
        "uniqueness",
        uniqueness_probe(space, map, &opts.starts, opts.solve_tol, DEFAULT_MAX_ITER)?,
    );

    let oracle_root = bisection_oracle(m, opts.oracle_tol)?;
    let agreement = (solved.fixed_point - oracle_root).abs();
    let mut tally = Tally::new("oracle_agreement", None);
    tally.count();
    let allowed = 10.0 * opts.solve_tol;
    tally.slack(
        &[solved.fixed_point, oracle_root],
        allowed - agreement,
        !solved.converged || agreement > allowed,
    );
    push("oracle_agreement", tally.finish());

    Ok(Thm41Report {
        m,
        hypotheses,
        root: solved.fixed_point,
        oracle_root,
        agreement,
        series: series.values,
    })
}
