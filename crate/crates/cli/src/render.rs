//! Plain-text rendering of JSON reports for `--format table`.

use serde_json::Value;

/// One `key: value` line per scalar leaf, nested keys joined with dots.
/// Arrays of scalars or of arrays stay on one line; arrays of objects are
/// expanded with their index.
pub fn table(v: &Value) -> String {
    let mut out = String::new();
    walk(&mut out, "", v);
    out
}

fn inline(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(inline),
        Value::Object(_) => false,
        _ => true,
    }
}

fn walk(out: &mut String, key: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if key.is_empty() {
                    k.clone()
                } else {
                    format!("{key}.{k}")
                };
                walk(out, &key, x);
            }
        }
        Value::Array(xs) if !inline(v) => {
            for (i, x) in xs.iter().enumerate() {
                walk(out, &format!("{key}[{i}]"), x);
            }
        }
        Value::String(s) => out.push_str(&format!("{key}: {s}\n")),
        _ => out.push_str(&format!("{key}: {v}\n")),
    }
}

/// The sweep report as one row per check.
pub fn sweep(v: &Value) -> String {
    let mut out = String::new();
    let checks = v["checks"].as_array().cloned().unwrap_or_default();
    let width = checks
        .iter()
        .filter_map(|c| c["id"].as_str())
        .map(str::len)
        .max()
        .unwrap_or(0);
    for c in &checks {
        out.push_str(&format!(
            "{:width$}  {:16}  {:>8} instances  {:>6} skipped  {:>6} counterexamples",
            c["id"].as_str().unwrap_or(""),
            c["status"].as_str().unwrap_or(""),
            c["instances"],
            c["skipped"],
            c["counterexamples"],
        ));
        if let Some(note) = c["note"].as_str() {
            out.push_str(&format!("  ({note})"));
        }
        out.push('\n');
        for e in c["examples"].as_array().into_iter().flatten() {
            out.push_str(&format!("    {}\n", e.as_str().unwrap_or("")));
        }
    }
    out.push_str(&format!("seed {}  passed {}\n", v["seed"], v["passed"]));
    out
}
