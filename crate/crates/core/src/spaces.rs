//! Point domains, composing functions, triple metrics, self-maps and the
//! built-in composed S-metric spaces.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CsError, Result};
use crate::expr::Expr;

/// The carrier set of a space. Unbounded sets are represented by finite
/// truncations so they can be sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointDomain {
    RealInterval { lo: f64, hi: f64 },
    NaturalsUpTo { max: u64 },
    FiniteRealSet { elements: Vec<f64> },
}

impl PointDomain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        let d = PointDomain::RealInterval { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn naturals(max: u64) -> Result<Self> {
        let d = PointDomain::NaturalsUpTo { max };
        d.validate()?;
        Ok(d)
    }

    pub fn finite_set(elements: Vec<f64>) -> Result<Self> {
        let d = PointDomain::FiniteRealSet { elements };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PointDomain::RealInterval { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(CsError::Config(format!(
                        "real_interval needs finite lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            PointDomain::NaturalsUpTo { max } => {
                if *max < 4 {
                    return Err(CsError::Config(format!(
                        "naturals_up_to needs max >= 4, got {max}"
                    )));
                }
            }
            PointDomain::FiniteRealSet { elements } => {
                if elements.is_empty() {
                    return Err(CsError::Config("finite_real_set must be non-empty".into()));
                }
                if let Some(x) = elements.iter().find(|x| !x.is_finite()) {
                    return Err(CsError::Config(format!(
                        "finite_real_set element {x} is not finite"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            PointDomain::RealInterval { lo, hi } => *lo <= x && x <= *hi,
            PointDomain::NaturalsUpTo { max } => x >= 0.0 && x <= *max as f64 && x.fract() == 0.0,
            PointDomain::FiniteRealSet { elements } => elements.contains(&x),
        }
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(CsError::Domain(format!("point {x} is outside {self}")))
        }
    }

    /// The sorted, de-duplicated member list of a discrete domain; `None`
    /// for intervals.
    pub fn discrete_points(&self) -> Option<Vec<f64>> {
        match self {
            PointDomain::RealInterval { .. } => None,
            PointDomain::NaturalsUpTo { max } => Some((0..=*max).map(|n| n as f64).collect()),
            PointDomain::FiniteRealSet { elements } => {
                let mut v = elements.clone();
                v.sort_by(f64::total_cmp);
                v.dedup();
                Some(v)
            }
        }
    }
}

impl fmt::Display for PointDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointDomain::RealInterval { lo, hi } => write!(f, "[{lo}, {hi}]"),
            PointDomain::NaturalsUpTo { max } => write!(f, "{{0, ..., {max}}}"),
            PointDomain::FiniteRealSet { elements } => write!(f, "a {}-point set", elements.len()),
        }
    }
}

/// The composing function wrapped around each right-hand term of the
/// triangle inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFunction {
    id: String,
    params: Vec<f64>,
    expr: Expr,
}

/// Ids accepted by [`AlphaFunction::builtin`].
pub const ALPHA_BUILTINS: &[&str] = &[
    "identity",
    "linear",
    "two_t_plus_one",
    "exp",
    "exp2",
    "two_sqrt",
    "expr",
];

impl AlphaFunction {
    /// Built-in composing functions:
    ///
    /// | id               | α(t)      | params |
    /// |------------------|-----------|--------|
    /// | `identity`       | t         |        |
    /// | `linear`         | b·t       | `[b]`  |
    /// | `two_t_plus_one` | 2t + 1    |        |
    /// | `exp`            | eᵗ        |        |
    /// | `exp2`           | e²ᵗ       |        |
    /// | `two_sqrt`       | 2√t       |        |
    pub fn builtin(id: &str, params: &[f64]) -> Result<Self> {
        let t = || Box::new(Expr::Var);
        let c = |v: f64| Box::new(Expr::Const(v));
        let (expr, arity) = match id {
            "identity" => (Expr::Var, 0),
            "linear" => {
                let b = *params.first().ok_or_else(|| {
                    CsError::Config("alpha 'linear' needs a slope parameter".into())
                })?;
                if !(b.is_finite() && b > 0.0) {
                    return Err(CsError::Config(format!(
                        "alpha 'linear' slope must be positive, got {b}"
                    )));
                }
                (Expr::Mul(c(b), t()), 1)
            }
            "two_t_plus_one" => (Expr::Add(Box::new(Expr::Mul(c(2.0), t())), c(1.0)), 0),
            "exp" => (Expr::Exp(t()), 0),
            "exp2" => (Expr::Exp(Box::new(Expr::Mul(c(2.0), t()))), 0),
            "two_sqrt" => (Expr::Mul(c(2.0), Box::new(Expr::Sqrt(t()))), 0),
            "expr" => {
                return Err(CsError::Config(
                    "alpha 'expr' needs an expression; use AlphaFunction::from_expr".into(),
                ))
            }
            other => {
                return Err(CsError::Config(format!(
                    "unknown alpha '{other}' (expected one of {})",
                    ALPHA_BUILTINS.join(", ")
                )))
            }
        };
        if params.len() != arity {
            return Err(CsError::Config(format!(
                "alpha '{id}' takes {arity} parameter(s), got {}",
                params.len()
            )));
        }
        Self::new(id.to_string(), params.to_vec(), expr)
    }

    /// A user composing function written in the expression grammar of
    /// [`crate::expr`], e.g. `"3*sqrt(t) + t^2"`.
    pub fn from_expr(src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        Self::new("expr".to_string(), Vec::new(), expr)
    }

    fn new(id: String, params: Vec<f64>, expr: Expr) -> Result<Self> {
        const PROBE: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
        let values: Vec<f64> = PROBE.iter().map(|&t| expr.eval(t)).collect();
        if let Some((t, v)) = PROBE
            .iter()
            .zip(&values)
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(CsError::Config(format!(
                "alpha '{id}' gives {v} at t = {t}; must be finite and >= 0"
            )));
        }
        if values.iter().all(|v| *v == values[0]) {
            return Err(CsError::Config(format!("alpha '{id}' is constant")));
        }
        Ok(AlphaFunction { id, params, expr })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// α(t) for t ≥ 0.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(CsError::Domain(format!(
                "alpha '{}' evaluated at {t} < 0",
                self.id
            )));
        }
        Ok(self.expr.eval(t))
    }

    /// α applied `j` times to `t`; `j = 0` returns `t`.
    pub fn iterate(&self, j: usize, t: f64) -> Result<f64> {
        let mut v = t;
        if !(v >= 0.0) {
            return Err(CsError::Domain(format!(
                "alpha '{}' iterated from {t} < 0",
                self.id
            )));
        }
        for _ in 0..j {
            v = self.eval(v)?;
        }
        Ok(v)
    }

    /// `(c, p)` when α(t) = c·tᵖ.
    pub fn monomial(&self) -> Option<(f64, f64)> {
        self.expr.as_monomial()
    }
}

pub type MetricFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;
pub type MapFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A triple distance `C_S : A³ → [0, ∞)`.
#[derive(Clone)]
pub struct TripleMetric {
    id: String,
    f: Arc<MetricFn>,
}

pub const METRIC_BUILTINS: &[&str] = &["squared_diff", "discrete_nat", "abs_sum", "app_metric"];

impl TripleMetric {
    pub fn new(
        id: impl Into<String>,
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TripleMetric {
            id: id.into(),
            f: Arc::new(f),
        }
    }

    /// | id             | C_S(q, h, w)                                   |
    /// |----------------|------------------------------------------------|
    /// | `squared_diff` | (q − w)² + (h − w)²                            |
    /// | `discrete_nat` | 0 if all equal, c + e for a repeated c and single e, 2(q + h + w) if distinct |
    /// | `abs_sum`      | \|q − w\| + \|h − w\|                          |
    /// | `app_metric`   | \|q − h\| + \|h − w\|                          |
    pub fn builtin(id: &str) -> Result<Self> {
        let m = match id {
            "squared_diff" => Self::new(id, |q, h, w| (q - w).powi(2) + (h - w).powi(2)),
            "discrete_nat" => Self::new(id, discrete_nat),
            "abs_sum" => Self::new(id, |q, h, w| (q - w).abs() + (h - w).abs()),
            "app_metric" => Self::new(id, |p, s, q| (p - s).abs() + (s - q).abs()),
            other => {
                return Err(CsError::Config(format!(
                    "unknown metric '{other}' (expected one of {})",
                    METRIC_BUILTINS.join(", ")
                )))
            }
        };
        Ok(m)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn raw(&self, q: f64, h: f64, w: f64) -> f64 {
        (self.f)(q, h, w)
    }
}

impl fmt::Debug for TripleMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripleMetric")
            .field("id", &self.id)
            .finish_non_exhaustive()
    }
}

fn discrete_nat(a: f64, b: f64, c: f64) -> f64 {
    match (a == b, b == c, a == c) {
        (true, true, _) => 0.0,
        (true, false, _) => a + c,
        (false, true, _) => b + a,
        (false, false, true) => a + b,
        (false, false, false) => 2.0 * (a + b + c),
    }
}

/// A map `F : A → A` whose fixed point is sought.
#[derive(Clone)]
pub struct SelfMap {
    id: String,
    params: Vec<f64>,
    f: Arc<MapFn>,
    domain: PointDomain,
}

pub const MAP_BUILTINS: &[&str] = &["identity", "constant", "scale", "poly"];

impl SelfMap {
    pub fn new(
        id: impl Into<String>,
        domain: PointDomain,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SelfMap {
            id: id.into(),
            params: Vec::new(),
            f: Arc::new(f),
            domain,
        }
    }

    /// | id         | F(x)                                 | params |
    /// |------------|--------------------------------------|--------|
    /// | `identity` | x                                    |        |
    /// | `constant` | c                                    | `[c]`  |
    /// | `scale`    | k·x                                  | `[k]`  |
    /// | `poly`     | (xᵐ + 1) / ((m⁴ − 1)xᵐ + m⁴)         | `[m]`  |
    pub fn builtin(id: &str, params: &[f64], domain: PointDomain) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(CsError::Config(format!(
                    "map '{id}' takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let mut map = match id {
            "identity" => {
                want(0)?;
                Self::new(id, domain, |x| x)
            }
            "constant" => {
                want(1)?;
                let c = params[0];
                domain.check(c)?;
                Self::new(id, domain, move |_| c)
            }
            "scale" => {
                want(1)?;
                let k = params[0];
                if !k.is_finite() {
                    return Err(CsError::Config(format!(
                        "map 'scale' factor must be finite, got {k}"
                    )));
                }
                Self::new(id, domain, move |x| k * x)
            }
            "poly" => {
                want(1)?;
                let m = params[0];
                if m.fract() != 0.0 || m < 3.0 || m > u32::MAX as f64 {
                    return Err(CsError::Domain(format!(
                        "map 'poly' needs an integer m >= 3, got {m}"
                    )));
                }
                let f = crate::poly::poly_fn(m as u32);
                Self::new(id, domain, f)
            }
            other => {
                return Err(CsError::Config(format!(
                    "unknown map '{other}' (expected one of {})",
                    MAP_BUILTINS.join(", ")
                )))
            }
        };
        map.params = params.to_vec();
        Ok(map)
    }

    pub fn with_params(mut self, params: Vec<f64>) -> Self {
        self.params = params;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn domain(&self) -> &PointDomain {
        &self.domain
    }

    /// F(x), without membership checks.
    pub fn raw(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// F(x) for x in the domain; fails if the image leaves the domain.
    pub fn apply(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        let y = self.raw(x);
        if !y.is_finite() {
            return Err(CsError::Numeric(format!(
                "map '{}' gave {y} at {x}",
                self.id
            )));
        }
        if !self.domain.contains(y) {
            return Err(CsError::Domain(format!(
                "map '{}' sends {x} to {y}, outside {}",
                self.id, self.domain
            )));
        }
        Ok(y)
    }
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfMap")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// A set with a triple metric and a composing function.
#[derive(Debug, Clone)]
pub struct ComposedSpace {
    pub domain: PointDomain,
    pub metric: TripleMetric,
    pub alpha: AlphaFunction,
    pub symmetric_claim: bool,
}

impl ComposedSpace {
    pub fn new(
        domain: PointDomain,
        metric: TripleMetric,
        alpha: AlphaFunction,
        symmetric_claim: bool,
    ) -> Result<Self> {
        domain.validate()?;
        Ok(ComposedSpace {
            domain,
            metric,
            alpha,
            symmetric_claim,
        })
    }

    pub fn with_alpha(mut self, alpha: AlphaFunction) -> Self {
        self.alpha = alpha;
        self
    }

    /// C_S(q, h, w) for points of the domain.
    pub fn eval_metric(&self, q: f64, h: f64, w: f64) -> Result<f64> {
        self.domain.check(q)?;
        self.domain.check(h)?;
        self.domain.check(w)?;
        let v = self.metric.raw(q, h, w);
        if !(v.is_finite() && v >= 0.0) {
            return Err(CsError::Numeric(format!(
                "metric '{}' gave {v} at ({q}, {h}, {w})",
                self.metric.id()
            )));
        }
        Ok(v)
    }

    pub fn eval_alpha(&self, t: f64) -> Result<f64> {
        self.alpha.eval(t)
    }
}

/// Domain and composing function each built-in space ships with.
///
/// `params` truncate unbounded domains: `[lo, hi]` for `squared_diff` and
/// `abs_sum` (default `[1, 100]`), `[max]` for `discrete_nat` (default 50).
/// `app_metric` lives on `[0, 1]` and takes no parameters.
pub fn make_builtin_space(name: &str, params: &[f64]) -> Result<ComposedSpace> {
    let interval = |default: (f64, f64)| -> Result<PointDomain> {
        match params {
            [] => PointDomain::interval(default.0, default.1),
            [lo, hi] => PointDomain::interval(*lo, *hi),
            _ => Err(CsError::Config(format!(
                "space '{name}' takes [lo, hi], got {params:?}"
            ))),
        }
    };
    let (domain, alpha) = match name {
        "squared_diff" => (interval((1.0, 100.0))?, AlphaFunction::builtin("exp", &[])?),
        "discrete_nat" => {
            let max = match params {
                [] => 50,
                [m] if m.fract() == 0.0 && *m >= 0.0 => *m as u64,
                _ => {
                    return Err(CsError::Config(format!(
                        "space 'discrete_nat' takes [max], got {params:?}"
                    )))
                }
            };
            (
                PointDomain::naturals(max)?,
                AlphaFunction::builtin("two_t_plus_one", &[])?,
            )
        }
        "abs_sum" => (
            interval((1.0, 100.0))?,
            AlphaFunction::builtin("exp2", &[])?,
        ),
        "app_metric" => {
            if !params.is_empty() {
                return Err(CsError::Config(
                    "space 'app_metric' takes no parameters".into(),
                ));
            }
            (
                PointDomain::interval(0.0, 1.0)?,
                AlphaFunction::builtin("two_sqrt", &[])?,
            )
        }
        other => {
            return Err(CsError::Config(format!(
                "unknown space '{other}' (expected one of {})",
                METRIC_BUILTINS.join(", ")
            )))
        }
    };
    ComposedSpace::new(domain, TripleMetric::builtin(name)?, alpha, true)
}
