//! Sampling auditors for the composed S-metric axioms and the hypotheses of
//! the fixed-point theorems.
//!
//! Every inequality `LHS <= RHS` is scored by its slack `RHS - LHS`; a tuple
//! violates the inequality when its slack is below `-(1e-9 + 1e-9 * |RHS|)`.
//! Audits are falsifiers: a pass means no violation was found in the sample.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::error::{CsError, Result};
use crate::sampling::SampleConfig;
use crate::spaces::{AlphaFunction, ComposedSpace, PointDomain, SelfMap};

pub const ABS_TOL: f64 = 1e-9;
pub const REL_TOL: f64 = 1e-9;

/// Upper end of the range `[0, hi]` from which nonnegative reals are drawn
/// for the checks that quantify over `R+` rather than over a space.
pub const NONNEG_SAMPLE_HI: f64 = 10.0;

/// The k values used for the subhomogeneity check when none are given.
pub const DEFAULT_K_SET: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

pub fn tolerance(rhs: f64) -> f64 {
    ABS_TOL + REL_TOL * rhs.abs()
}

/// Outcome of a sampled check.
///
/// `worst_margin` is the slack of the witness when the check failed, and
/// the smallest slack seen otherwise (non-finite values serialize as null).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<Vec<f64>>,
    #[serde(serialize_with = "finite_or_null")]
    pub worst_margin: f64,
    pub seed: Option<u64>,
}

fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Folds per-tuple slacks into a [`Verdict`]. The witness is the violating
/// tuple with the most negative slack, ties going to the lexicographically
/// smallest tuple, so the result does not depend on evaluation order.
pub(crate) struct Tally {
    check: &'static str,
    seed: Option<u64>,
    checked: usize,
    min_slack: f64,
    witness: Option<(f64, Vec<f64>)>,
}

impl Tally {
    pub(crate) fn new(check: &'static str, seed: Option<u64>) -> Self {
        Tally {
            check,
            seed,
            checked: 0,
            min_slack: f64::INFINITY,
            witness: None,
        }
    }

    pub(crate) fn count(&mut self) {
        self.checked += 1;
    }

    /// Record an inequality `lhs <= rhs` evaluated at `tuple`.
    pub(crate) fn inequality(&mut self, tuple: &[f64], lhs: f64, rhs: f64) -> Result<()> {
        let slack = rhs - lhs;
        if slack.is_nan() {
            return Err(CsError::Numeric(format!(
                "{}: slack is NaN at {tuple:?} (lhs {lhs}, rhs {rhs})",
                self.check
            )));
        }
        self.slack(tuple, slack, slack < -tolerance(rhs));
        Ok(())
    }

    pub(crate) fn slack(&mut self, tuple: &[f64], slack: f64, violated: bool) {
        self.min_slack = self.min_slack.min(slack);
        if violated {
            let better = match &self.witness {
                None => true,
                Some((s, t)) => slack < *s || (slack == *s && lex_cmp(tuple, t) == Ordering::Less),
            };
            if better {
                self.witness = Some((slack, tuple.to_vec()));
            }
        }
    }

    pub(crate) fn finish(self) -> Verdict {
        let (passed, witness, worst_margin) = match self.witness {
            Some((s, t)) => (false, Some(t), s),
            None => (true, None, self.min_slack),
        };
        Verdict {
            check: self.check.to_string(),
            passed,
            checked: self.checked,
            witness,
            worst_margin,
            seed: self.seed,
        }
    }
}

fn nonneg_domain() -> PointDomain {
    PointDomain::RealInterval {
        lo: 0.0,
        hi: NONNEG_SAMPLE_HI,
    }
}

/// Margin used when distinct points are at distance zero: minus their spread.
fn spread(t: &[f64]) -> f64 {
    let max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = t.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// C_S(x,x,x) = 0 for every sampled x, and C_S(q,h,w) > 0 whenever the
/// entries are not all equal.
pub fn check_identity_axiom(space: &ComposedSpace, cfg: &SampleConfig) -> Result<Verdict> {
    let mut tally = Tally::new("identity_axiom", Some(cfg.seed));
    for t in cfg.tuples(&space.domain, 3)? {
        tally.count();
        let (q, h, w) = (t[0], t[1], t[2]);
        let diag = space.eval_metric(q, q, q)?;
        tally.slack(&[q, q, q], -diag, diag != 0.0);
        if !(q == h && h == w) {
            let d = space.eval_metric(q, h, w)?;
            if d > 0.0 {
                tally.slack(&t, 0.0, false);
            } else {
                tally.slack(&t, -spread(&t), true);
            }
        }
    }
    Ok(tally.finish())
}

fn triangle(
    space: &ComposedSpace,
    cfg: &SampleConfig,
    composed: bool,
    name: &'static str,
) -> Result<Verdict> {
    let mut tally = Tally::new(name, Some(cfg.seed));
    let wrap = |d: f64| if composed { space.eval_alpha(d) } else { Ok(d) };
    for t in cfg.tuples(&space.domain, 4)? {
        tally.count();
        let (q, h, w, u) = (t[0], t[1], t[2], t[3]);
        let lhs = space.eval_metric(q, h, w)?;
        let rhs = wrap(space.eval_metric(q, q, u)?)?
            + wrap(space.eval_metric(h, h, u)?)?
            + wrap(space.eval_metric(w, w, u)?)?;
        tally.inequality(&t, lhs, rhs)?;
    }
    Ok(tally.finish())
}

/// C_S(q,h,w) <= α(C_S(q,q,u)) + α(C_S(h,h,u)) + α(C_S(w,w,u)) on sampled quadruples.
pub fn check_composed_triangle(space: &ComposedSpace, cfg: &SampleConfig) -> Result<Verdict> {
    triangle(space, cfg, true, "composed_triangle")
}

/// The plain S-metric triangle inequality (α = identity).
pub fn check_classic_triangle(space: &ComposedSpace, cfg: &SampleConfig) -> Result<Verdict> {
    triangle(space, cfg, false, "classic_triangle")
}

/// C_S(q,q,h) = C_S(h,h,q) on sampled pairs.
pub fn check_symmetry(space: &ComposedSpace, cfg: &SampleConfig) -> Result<Verdict> {
    let mut tally = Tally::new("symmetry", Some(cfg.seed));
    for t in cfg.tuples(&space.domain, 2)? {
        tally.count();
        let (q, h) = (t[0], t[1]);
        let a = space.eval_metric(q, q, h)?;
        let b = space.eval_metric(h, h, q)?;
        let gap = (a - b).abs();
        tally.slack(&t, -gap, gap > tolerance(b));
    }
    Ok(tally.finish())
}

/// α(0) = 0 exactly.
pub fn check_alpha_zero(alpha: &AlphaFunction) -> Result<Verdict> {
    let mut tally = Tally::new("alpha_zero", None);
    tally.count();
    let v = alpha.eval(0.0)?;
    tally.slack(&[0.0, v], -v.abs(), v != 0.0);
    Ok(tally.finish())
}

/// α(k·s + t) <= k·α(s) + α(t) for sampled (s, t) in [0, 10]² and every k in
/// `k_set`. Witnesses are `[k, s, t]`.
pub fn check_alpha_subhomogeneity(
    alpha: &AlphaFunction,
    cfg: &SampleConfig,
    k_set: &[f64],
) -> Result<Verdict> {
    if k_set.is_empty() {
        return Err(CsError::Config("k_set is empty".into()));
    }
    if let Some(k) = k_set.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(CsError::Config(format!(
            "k_set entries must be positive, got {k}"
        )));
    }
    let domain = nonneg_domain();
    let mut tally = Tally::new("alpha_subhomogeneity", Some(cfg.seed));
    for st in cfg.tuples(&domain, 2)? {
        let (s, t) = (st[0], st[1]);
        let (alpha_s, alpha_t) = (alpha.eval(s)?, alpha.eval(t)?);
        for &k in k_set {
            tally.count();
            tally.inequality(&[k, s, t], alpha.eval(k * s + t)?, k * alpha_s + alpha_t)?;
        }
    }
    Ok(tally.finish())
}

/// α(d_n) <= d_n along the orbit of `x0`, with d_n = C_S(I_n, I_n, I_{n+1})
/// for n = 0..=n_max. Witnesses are `[n, d_n]`.
pub fn check_alpha_dominates_orbit(
    space: &ComposedSpace,
    map: &SelfMap,
    x0: f64,
    n_max: usize,
) -> Result<Verdict> {
    if n_max < 1 {
        return Err(CsError::Config("n_max must be at least 1".into()));
    }
    space.domain.check(x0)?;
    let mut tally = Tally::new("alpha_dominates_orbit", None);
    let mut x = x0;
    for n in 0..=n_max {
        let next = map.raw(x);
        if !space.domain.contains(next) {
            return Err(CsError::Escaped {
                iteration: n + 1,
                point: next,
            });
        }
        let d = space.eval_metric(x, x, next)?;
        tally.count();
        tally.inequality(&[n as f64, d], space.eval_alpha(d)?, d)?;
        x = next;
    }
    Ok(tally.finish())
}

/// Which reading of the iterated-α tail is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailVariant {
    /// Trailing term 2^(m−n−2)·α^(m−n−1)(r^m·c0), as the hypothesis is stated.
    #[default]
    Statement,
    /// Trailing term 2^(m−n−3)·α^(m−n−1)(r^(m−1)·c0), as it appears in the
    /// convergence argument.
    ProofChain,
}

/// Below this magnitude r^k·c0 is handled in log space for monomial α, so
/// that deep iterates of e.g. 2√t do not collapse through underflow.
const LOG_SPACE_BELOW: f64 = 1e-250;

/// α^j(r^k · c0).
fn iterated_at_power(alpha: &AlphaFunction, j: usize, r: f64, k: usize, c0: f64) -> Result<f64> {
    let direct = r.powi(k as i32) * c0;
    if direct >= LOG_SPACE_BELOW || c0 == 0.0 {
        return alpha.iterate(j, direct);
    }
    match alpha.monomial() {
        Some((c, p)) => {
            let mut log = k as f64 * r.ln() + c0.ln();
            for _ in 0..j {
                log = c.ln() + p * log;
            }
            Ok(log.exp())
        }
        None => alpha.iterate(j, direct),
    }
}

/// Σ_{k=n+3}^{m−2} 2^(k−n−1)·α^(k−n+1)(r^k·c0) plus the trailing term of `variant`.
///
/// When m < n + 5 the sum is empty and only the trailing term remains.
pub fn series_tail_with(
    alpha: &AlphaFunction,
    r: f64,
    c0: f64,
    n: usize,
    m: usize,
    variant: TailVariant,
) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(CsError::Domain(format!(
            "series ratio r must lie in (0, 1), got {r}"
        )));
    }
    if !(c0 >= 0.0 && c0.is_finite()) {
        return Err(CsError::Domain(format!(
            "c0 must be finite and >= 0, got {c0}"
        )));
    }
    if m < n + 2 {
        return Err(CsError::Domain(format!(
            "series tail needs m >= n + 2, got n = {n}, m = {m}"
        )));
    }
    let mut total = 0.0;
    for k in (n + 3)..=m.saturating_sub(2) {
        total += 2f64.powi((k - n - 1) as i32) * iterated_at_power(alpha, k - n + 1, r, k, c0)?;
    }
    let trailing = match variant {
        TailVariant::Statement => {
            2f64.powi((m - n - 2) as i32) * iterated_at_power(alpha, m - n - 1, r, m, c0)?
        }
        TailVariant::ProofChain => {
            2f64.powi(m as i32 - n as i32 - 3) * iterated_at_power(alpha, m - n - 1, r, m - 1, c0)?
        }
    };
    Ok(total + trailing)
}

pub fn series_tail(alpha: &AlphaFunction, r: f64, c0: f64, n: usize, m: usize) -> Result<f64> {
    series_tail_with(alpha, r, c0, n, m, TailVariant::Statement)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    pub gap: usize,
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub verdict: Verdict,
    pub values: Vec<SeriesValue>,
}

/// Evaluates `series_tail(α, r, c0, n, n + gap)` along `n_schedule` for
/// every gap. Passes iff each gap's sequence ends below `tol`. Witnesses
/// are `[gap, n, value]` at the last scheduled n.
pub fn check_series_vanishing(
    alpha: &AlphaFunction,
    r: f64,
    c0: f64,
    gaps: &[usize],
    n_schedule: &[usize],
    tol: f64,
) -> Result<SeriesReport> {
    if gaps.is_empty() || n_schedule.is_empty() {
        return Err(CsError::Config(
            "gaps and n_schedule must be non-empty".into(),
        ));
    }
    if let Some(g) = gaps.iter().find(|g| **g < 5) {
        return Err(CsError::Config(format!("gaps must be >= 5, got {g}")));
    }
    if n_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CsError::Config(
            "n_schedule must be strictly increasing".into(),
        ));
    }
    let mut tally = Tally::new("series_vanishing", None);
    let mut values = Vec::with_capacity(gaps.len() * n_schedule.len());
    for &gap in gaps {
        let mut last = f64::NAN;
        for &n in n_schedule {
            last = series_tail(alpha, r, c0, n, n + gap)?;
            tally.count();
            values.push(SeriesValue {
                gap,
                n,
                value: last,
            });
        }
        let n_last = *n_schedule.last().expect("non-empty");
        if last.is_nan() {
            return Err(CsError::Numeric(format!(
                "series tail is NaN at gap {gap}, n {n_last}"
            )));
        }
        tally.slack(&[gap as f64, n_last as f64, last], tol - last, last > tol);
    }
    Ok(SeriesReport {
        verdict: tally.finish(),
        values,
    })
}
