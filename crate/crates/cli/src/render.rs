//! Plain-text rendering of a JSON report value.

use std::fmt::Write;

use serde_json::Value;

pub fn text(report: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = report {
        for (k, v) in map {
            if k == "schema" {
                continue;
            }
            field(&mut out, 0, k, v);
        }
    }
    out
}

fn is_verdict(v: &Value) -> bool {
    v.get("check").is_some() && v.get("passed").is_some()
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(true) => "yes".into(),
        Value::Bool(false) => "no".into(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(_) => "{...}".into(),
    }
}

fn verdict_line(v: &Value) -> String {
    let status = if v["passed"] == Value::Bool(true) {
        "PASS"
    } else {
        "FAIL"
    };
    let mut line = format!(
        "{status} {} (checked {}, worst margin {})",
        scalar(&v["check"]),
        scalar(&v["checked"]),
        scalar(&v["worst_margin"])
    );
    if !v["witness"].is_null() {
        let _ = write!(line, " witness {}", scalar(&v["witness"]));
    }
    line
}

fn field(out: &mut String, depth: usize, key: &str, v: &Value) {
    let pad = "  ".repeat(depth);
    match v {
        _ if is_verdict(v) => {
            let _ = writeln!(out, "{pad}{key}: {}", verdict_line(v));
        }
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, inner) in map {
                field(out, depth + 1, k, inner);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            let _ = writeln!(out, "{pad}{key}:");
            for item in items {
                match item {
                    _ if is_verdict(item) => {
                        let _ = writeln!(out, "{pad}  - {}", verdict_line(item));
                    }
                    Value::Object(map) => {
                        if let (Some(name), Some(verdict)) = (map.get("name"), map.get("verdict")) {
                            if verdict.get("check") == Some(name) {
                                let _ = writeln!(out, "{pad}  - {}", verdict_line(verdict));
                            } else {
                                let _ = writeln!(
                                    out,
                                    "{pad}  - {}: {}",
                                    scalar(name),
                                    verdict_line(verdict)
                                );
                            }
                        } else {
                            let parts: Vec<String> = map
                                .iter()
                                .map(|(k, v)| format!("{k}={}", scalar(v)))
                                .collect();
                            let _ = writeln!(out, "{pad}  - {}", parts.join(" "));
                        }
                    }
                    other => {
                        let _ = writeln!(out, "{pad}  - {}", scalar(other));
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar(other));
        }
    }
}
