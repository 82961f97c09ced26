//! JSON documents describing spaces and maps.
//!
//! ```json
//! {
//!   "metric": "abs_sum",
//!   "params": [0, 1],
//!   "domain": {"kind": "real_interval", "lo": 0, "hi": 1},
//!   "alpha": {"id": "two_sqrt"},
//!   "symmetric": true,
//!   "map": {"id": "scale", "params": [0.5]}
//! }
//! ```
//!
//! Only `metric` is required. `params` go to [`make_builtin_space`];
//! `domain`, `alpha` and `symmetric` override what the built-in ships with.
//! A user composing function is `{"id": "expr", "expr": "2*sqrt(t)"}`.

use serde::{Deserialize, Serialize};

use crate::error::{CsError, Result};
use crate::spaces::{
    make_builtin_space, AlphaFunction, ComposedSpace, PointDomain, SelfMap, METRIC_BUILTINS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
}

impl AlphaSpec {
    pub fn build(&self) -> Result<AlphaFunction> {
        match (self.id.as_str(), &self.expr) {
            ("expr", Some(src)) => AlphaFunction::from_expr(src),
            ("expr", None) => Err(CsError::Config(
                "alpha.expr is required when alpha.id is \"expr\"".into(),
            )),
            (_, Some(_)) => Err(CsError::Config(format!(
                "alpha.expr is only allowed with id \"expr\", not \"{}\"",
                self.id
            ))),
            (id, None) => AlphaFunction::builtin(id, &self.params),
        }
    }
}

impl From<&AlphaFunction> for AlphaSpec {
    fn from(a: &AlphaFunction) -> Self {
        if a.id() == "expr" {
            AlphaSpec {
                id: "expr".into(),
                params: Vec::new(),
                expr: Some(a.expr().to_string()),
            }
        } else {
            AlphaSpec {
                id: a.id().to_string(),
                params: a.params().to_vec(),
                expr: None,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub id: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl MapSpec {
    pub fn build(&self, domain: &PointDomain) -> Result<SelfMap> {
        SelfMap::builtin(&self.id, &self.params, domain.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub metric: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<PointDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
}

impl SpaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CsError::Config(format!("space document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("space documents always serialize")
    }

    pub fn build(&self) -> Result<ComposedSpace> {
        let mut space = make_builtin_space(&self.metric, &self.params)?;
        if let Some(d) = &self.domain {
            d.validate()
                .map_err(|e| CsError::Config(format!("domain: {e}")))?;
            space.domain = d.clone();
        }
        if let Some(a) = &self.alpha {
            space.alpha = a
                .build()
                .map_err(|e| CsError::Config(format!("alpha: {e}")))?;
        }
        if let Some(s) = self.symmetric {
            space.symmetric_claim = s;
        }
        Ok(space)
    }

    pub fn build_map(&self, domain: &PointDomain) -> Result<Option<SelfMap>> {
        self.map
            .as_ref()
            .map(|m| {
                m.build(domain)
                    .map_err(|e| CsError::Config(format!("map: {e}")))
            })
            .transpose()
    }

    /// Describes a space whose metric is a built-in; the domain, α and
    /// symmetry flag are written out explicitly.
    pub fn describe(space: &ComposedSpace, map: Option<&SelfMap>) -> Result<Self> {
        let metric = space.metric.id();
        if !METRIC_BUILTINS.contains(&metric) {
            return Err(CsError::Config(format!(
                "metric '{metric}' is not a built-in and cannot be serialized"
            )));
        }
        Ok(SpaceSpec {
            metric: metric.to_string(),
            params: Vec::new(),
            domain: Some(space.domain.clone()),
            alpha: Some(AlphaSpec::from(&space.alpha)),
            symmetric: Some(space.symmetric_claim),
            map: map.map(|m| MapSpec {
                id: m.id().to_string(),
                params: m.params().to_vec(),
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let s = SpaceSpec::from_json(r#"{"metric": "app_metric"}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(s.alpha.id(), "two_sqrt");
        assert_eq!(s.domain, PointDomain::RealInterval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn overrides() {
        let doc = r#"{"metric": "abs_sum", "domain": {"kind": "real_interval", "lo": 0, "hi": 1},
                      "alpha": {"id": "expr", "expr": "3*sqrt(t)"}, "symmetric": false,
                      "map": {"id": "scale", "params": [0.5]}}"#;
        let spec = SpaceSpec::from_json(doc).unwrap();
        let s = spec.build().unwrap();
        assert_eq!(s.eval_alpha(4.0).unwrap(), 6.0);
        assert!(!s.symmetric_claim);
        let f = spec.build_map(&s.domain).unwrap().unwrap();
        assert_eq!(f.apply(0.5).unwrap(), 0.25);
    }

    #[test]
    fn errors_name_the_field() {
        let e = SpaceSpec::from_json(r#"{"metirc": "abs_sum"}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("metirc"), "{e}");
        let e = SpaceSpec::from_json(r#"{"params": []}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("metric"), "{e}");
        let e = SpaceSpec::from_json(
            r#"{"metric": "abs_sum", "domain": {"kind": "real_interval", "lo": 2, "hi": 1}}"#,
        )
        .unwrap()
        .build()
        .unwrap_err()
        .to_string();
        assert!(e.contains("domain"), "{e}");
        let e = SpaceSpec::from_json(r#"{"metric": "abs_sum", "alpha": {"id": "expr"}}"#)
            .unwrap()
            .build()
            .unwrap_err()
            .to_string();
        assert!(e.contains("alpha"), "{e}");
    }

    #[test]
    fn describe_round_trip() {
        let space = make_builtin_space("discrete_nat", &[12.0]).unwrap();
        let spec = SpaceSpec::describe(&space, None).unwrap();
        let again = SpaceSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
        let rebuilt = again.build().unwrap();
        assert_eq!(rebuilt.domain, space.domain);
        assert_eq!(rebuilt.alpha, space.alpha);
    }
}
