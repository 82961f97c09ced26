//! Picard iteration, contraction-factor estimation and the contraction
//! conditions (Banach, and the five-argument family covering Kannan and
//! Bianchini-type maps).

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::audit::{Tally, Verdict, NONNEG_SAMPLE_HI};
use crate::error::{CsError, Result};
use crate::sampling::SampleConfig;
use crate::spaces::{ComposedSpace, PointDomain, SelfMap};

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Triples closer than this are skipped when estimating a contraction ratio.
pub const DEGENERATE_BELOW: f64 = 1e-12;

/// The Picard sequence I_n = F^n(I_0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub iterates: Vec<f64>,
    /// d_n = C_S(I_n, I_n, I_{n+1})
    pub step_distances: Vec<f64>,
    /// d_{n+1} / d_n for every n with d_n > 0.
    #[serde(skip)]
    pub ratios: Vec<f64>,
}

impl Orbit {
    fn start(x0: f64) -> Self {
        Orbit {
            iterates: vec![x0],
            step_distances: Vec::new(),
            ratios: Vec::new(),
        }
    }

    fn push(&mut self, next: f64, d: f64) {
        if let Some(&prev) = self.step_distances.last() {
            if prev > 0.0 {
                self.ratios.push(d / prev);
            }
        }
        self.iterates.push(next);
        self.step_distances.push(d);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub fixed_point: f64,
    pub iterations: usize,
    /// C_S(x, x, F(x)) at the reported point.
    pub residual: f64,
    pub converged: bool,
    pub orbit: Orbit,
}

/// Iterates I_{n+1} = F(I_n) from `x0` until the step distance
/// C_S(I_n, I_n, I_{n+1}) drops to `tol` or `max_iter` steps have been taken.
/// `iterations` counts map applications; the last iterate is reported.
pub fn picard(
    space: &ComposedSpace,
    map: &SelfMap,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult> {
    if !(tol > 0.0) {
        return Err(CsError::Config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_iter < 1 {
        return Err(CsError::Config("max_iter must be at least 1".into()));
    }
    space.domain.check(x0)?;
    let mut orbit = Orbit::start(x0);
    let mut x = x0;
    let mut converged = false;
    for n in 1..=max_iter {
        let next = step(space, map, x, n)?;
        let d = space.eval_metric(x, x, next)?;
        orbit.push(next, d);
        x = next;
        if d <= tol {
            converged = true;
            break;
        }
    }
    let image = step(space, map, x, orbit.iterates.len())?;
    let residual = space.eval_metric(x, x, image)?;
    Ok(SolveResult {
        fixed_point: x,
        iterations: orbit.step_distances.len(),
        residual,
        converged,
        orbit,
    })
}

fn step(space: &ComposedSpace, map: &SelfMap, x: f64, iteration: usize) -> Result<f64> {
    let next = map.raw(x);
    if !next.is_finite() {
        return Err(CsError::Numeric(format!(
            "map '{}' gave {next} at {x}",
            map.id()
        )));
    }
    if !space.domain.contains(next) {
        return Err(CsError::Escaped {
            iteration,
            point: next,
        });
    }
    Ok(next)
}

fn image3(space: &ComposedSpace, map: &SelfMap, t: &[f64]) -> Result<(f64, f64, f64)> {
    Ok((
        step(space, map, t[0], 1)?,
        step(space, map, t[1], 1)?,
        step(space, map, t[2], 1)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionEstimate {
    pub sup_ratio: f64,
    pub argmax_tuple: [f64; 3],
    /// Non-degenerate triples that entered the maximum.
    pub samples: usize,
}

/// Largest sampled C_S(Fq,Fh,Fw) / C_S(q,h,w) over triples with
/// C_S(q,h,w) >= 1e-12.
pub fn estimate_contraction_factor(
    space: &ComposedSpace,
    map: &SelfMap,
    cfg: &SampleConfig,
) -> Result<ContractionEstimate> {
    let mut best: Option<(f64, [f64; 3])> = None;
    let mut samples = 0;
    for t in cfg.tuples(&space.domain, 3)? {
        let d = space.eval_metric(t[0], t[1], t[2])?;
        if d < DEGENERATE_BELOW {
            continue;
        }
        let (fq, fh, fw) = image3(space, map, &t)?;
        let ratio = space.eval_metric(fq, fh, fw)? / d;
        samples += 1;
        let tuple = [t[0], t[1], t[2]];
        let better = match &best {
            None => true,
            Some((r, bt)) => match ratio.total_cmp(r) {
                Ordering::Greater => true,
                Ordering::Equal => tuple
                    .iter()
                    .zip(bt)
                    .find(|(a, b)| a != b)
                    .is_some_and(|(a, b)| a < b),
                Ordering::Less => false,
            },
        };
        if better {
            best = Some((ratio, tuple));
        }
    }
    let (sup_ratio, argmax_tuple) = best.ok_or_else(|| {
        CsError::Config("every sampled triple is degenerate (zero distance)".into())
    })?;
    Ok(ContractionEstimate {
        sup_ratio,
        argmax_tuple,
        samples,
    })
}

/// C_S(Fq,Fh,Fw) <= r·C_S(q,h,w) on sampled triples.
pub fn check_banach(
    space: &ComposedSpace,
    map: &SelfMap,
    r: f64,
    cfg: &SampleConfig,
) -> Result<Verdict> {
    if !(r > 0.0 && r < 1.0) {
        return Err(CsError::Domain(format!(
            "contraction factor must lie in (0, 1), got {r}"
        )));
    }
    let mut tally = Tally::new("banach_contraction", Some(cfg.seed));
    for t in cfg.tuples(&space.domain, 3)? {
        tally.count();
        let (fq, fh, fw) = image3(space, map, &t)?;
        let lhs = space.eval_metric(fq, fh, fw)?;
        let rhs = r * space.eval_metric(t[0], t[1], t[2])?;
        tally.inequality(&t, lhs, rhs)?;
    }
    Ok(tally.finish())
}

pub type MfFn = dyn Fn([f64; 5]) -> f64 + Send + Sync;

/// A continuous control function R+⁵ → R+ for generalized contractions,
/// called as Mf(t₁, …, t₅).
#[derive(Clone)]
pub struct MfFunction {
    id: String,
    params: Vec<f64>,
    f: Arc<MfFn>,
}

impl MfFunction {
    pub fn new(
        id: impl Into<String>,
        params: Vec<f64>,
        f: impl Fn([f64; 5]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MfFunction {
            id: id.into(),
            params,
            f: Arc::new(f),
        }
    }

    /// r·t₁ with r in [0, 1).
    pub fn banach(r: f64) -> Result<Self> {
        unit_interval("banach", r, 1.0)?;
        Ok(Self::new("banach", vec![r], move |t| r * t[0]))
    }

    /// a·(t₂ + t₅) with a in [0, 1/2).
    pub fn kannan(a: f64) -> Result<Self> {
        unit_interval("kannan", a, 0.5)?;
        Ok(Self::new("kannan", vec![a], move |t| a * (t[1] + t[4])))
    }

    /// a·max{t₂, t₅} with a in [0, 1).
    pub fn bianchini(a: f64) -> Result<Self> {
        unit_interval("bianchini", a, 1.0)?;
        Ok(Self::new("bianchini", vec![a], move |t| a * t[1].max(t[4])))
    }

    pub fn builtin(id: &str, param: f64) -> Result<Self> {
        match id {
            "banach" => Self::banach(param),
            "kannan" => Self::kannan(param),
            "bianchini" => Self::bianchini(param),
            other => Err(CsError::Config(format!(
                "unknown Mf '{other}' (expected banach, kannan, bianchini)"
            ))),
        }
    }

    /// The factor r for which a built-in satisfies (M1): r, a/(1−a) and a.
    pub fn m1_factor(&self) -> Option<f64> {
        let p = *self.params.first()?;
        match self.id.as_str() {
            "banach" | "bianchini" => Some(p),
            "kannan" => Some(p / (1.0 - p)),
            _ => None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn eval(&self, t: [f64; 5]) -> f64 {
        (self.f)(t)
    }
}

fn unit_interval(id: &str, v: f64, hi: f64) -> Result<()> {
    if v >= 0.0 && v < hi {
        Ok(())
    } else {
        Err(CsError::Config(format!(
            "Mf '{id}' parameter must lie in [0, {hi}), got {v}"
        )))
    }
}

impl fmt::Debug for MfFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MfFunction")
            .field("id", &self.id)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

/// Side condition on w in property (M1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum M1Guard {
    /// w <= 2o + h
    #[default]
    Definition,
    /// w <= o + 2h
    Swapped,
}

fn nonneg_domain() -> PointDomain {
    PointDomain::RealInterval {
        lo: 0.0,
        hi: NONNEG_SAMPLE_HI,
    }
}

/// Property (M1): whenever h <= Mf(o, o, 0, w, h) and w <= 2o + h, then
/// h <= r·o. Triples are drawn from [0, 10]³; witnesses are `[o, h, w]`.
pub fn check_m1(mf: &MfFunction, r: f64, cfg: &SampleConfig) -> Result<Verdict> {
    check_m1_with(mf, r, cfg, M1Guard::Definition)
}

pub fn check_m1_with(
    mf: &MfFunction,
    r: f64,
    cfg: &SampleConfig,
    guard: M1Guard,
) -> Result<Verdict> {
    if !(0.0..1.0).contains(&r) {
        return Err(CsError::Domain(format!(
            "(M1) factor must lie in [0, 1), got {r}"
        )));
    }
    let domain = nonneg_domain();
    let mut tally = Tally::new("m1", Some(cfg.seed));
    for t in cfg.tuples(&domain, 3)? {
        tally.count();
        let (o, h, w) = (t[0], t[1], t[2]);
        let w_ok = match guard {
            M1Guard::Definition => w <= 2.0 * o + h,
            M1Guard::Swapped => w <= o + 2.0 * h,
        };
        if w_ok && h <= mf.eval([o, o, 0.0, w, h]) {
            tally.inequality(&t, h, r * o)?;
        }
    }
    Ok(tally.finish())
}

/// Property (M2): whenever h <= Mf(h, 0, h, h, 0), then h = 0 (within
/// 1e-9). Values are drawn from [0, 10]; witnesses are `[h]`.
pub fn check_m2(mf: &MfFunction, cfg: &SampleConfig) -> Result<Verdict> {
    let domain = nonneg_domain();
    let mut tally = Tally::new("m2", Some(cfg.seed));
    for t in cfg.tuples(&domain, 1)? {
        tally.count();
        let h = t[0];
        if h <= mf.eval([h, 0.0, h, h, 0.0]) {
            tally.inequality(&t, h, 0.0)?;
        }
    }
    Ok(tally.finish())
}

/// C_S(Fo,Fo,Fh) <= Mf(C_S(o,o,h), C_S(Fo,Fo,o), C_S(Fo,Fo,h), C_S(Fh,Fh,o),
/// C_S(Fh,Fh,h)) on sampled pairs. Requires a space claimed symmetric.
pub fn check_mf_contraction(
    space: &ComposedSpace,
    map: &SelfMap,
    mf: &MfFunction,
    cfg: &SampleConfig,
) -> Result<Verdict> {
    if !space.symmetric_claim {
        return Err(CsError::Precondition(
            "generalized contraction check needs a symmetric space".into(),
        ));
    }
    let mut tally = Tally::new("mf_contraction", Some(cfg.seed));
    let c = |a: f64, b: f64, d: f64| space.eval_metric(a, b, d);
    for t in cfg.tuples(&space.domain, 2)? {
        tally.count();
        let (o, h) = (t[0], t[1]);
        let (fo, fh) = (step(space, map, o, 1)?, step(space, map, h, 1)?);
        let args = [
            c(o, o, h)?,
            c(fo, fo, o)?,
            c(fo, fo, h)?,
            c(fh, fh, o)?,
            c(fh, fh, h)?,
        ];
        tally.inequality(&t, c(fo, fo, fh)?, mf.eval(args))?;
    }
    Ok(tally.finish())
}

/// C_S(x, x, F(x)) <= tol. Witness `[x, residual]`.
pub fn verify_fixed_point(
    space: &ComposedSpace,
    map: &SelfMap,
    x: f64,
    tol: f64,
) -> Result<Verdict> {
    let fx = step(space, map, x, 1)?;
    let residual = space.eval_metric(x, x, fx)?;
    let mut tally = Tally::new("fixed_point", None);
    tally.count();
    tally.slack(&[x, residual], tol - residual, residual > tol);
    Ok(tally.finish())
}

/// Runs Picard from every start. Passes iff every run converges and all
/// limits are pairwise within `tol`. A non-converged start is reported as
/// `[start]`; a pair of distinct limits as `[x_i, x_j]`.
pub fn uniqueness_probe(
    space: &ComposedSpace,
    map: &SelfMap,
    starts: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Verdict> {
    if starts.is_empty() {
        return Err(CsError::Config(
            "uniqueness probe needs at least one start".into(),
        ));
    }
    let mut tally = Tally::new("uniqueness", None);
    let mut limits = Vec::with_capacity(starts.len());
    for &x0 in starts {
        let run = picard(space, map, x0, tol, max_iter)?;
        if !run.converged {
            tally.slack(&[x0], f64::NEG_INFINITY, true);
        }
        limits.push(run.fixed_point);
    }
    for (i, &a) in limits.iter().enumerate() {
        for &b in &limits[i + 1..] {
            tally.count();
            let d = space.eval_metric(a, a, b)?;
            tally.slack(&[a, b], tol - d, d > tol);
        }
    }
    if limits.len() == 1 {
        tally.count();
    }
    Ok(tally.finish())
}

/// Bound that the geometric-decay property promises for d_n along a
/// contraction orbit: r^n · d_0 · (1 + 1e-6).
pub fn geometric_bound(r: f64, n: usize, d0: f64) -> f64 {
    r.powi(n as i32) * d0 * (1.0 + 1e-6)
}
