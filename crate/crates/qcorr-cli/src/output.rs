//! Report rendering: JSON, CSV and plain text, with every float rounded to
//! 12 significant digits so identical runs produce identical bytes.

use clap::ValueEnum;
use qcorr::ghz_audit::AuditResult;
use qcorr::CorrelationReport;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Round to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor();
    let scale = 10f64.powi(11 - magnitude as i32);
    (x * scale).round() / scale
}

/// Render with 12 significant digits; scientific notation outside a
/// comfortable positional range, trailing zeros trimmed.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..15).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    } else {
        let s = format!("{x:.11e}");
        match s.split_once('e') {
            Some((mantissa, exp)) => {
                let m = mantissa.trim_end_matches('0').trim_end_matches('.');
                format!("{m}e{exp}")
            }
            None => s,
        }
    }
}

/// Recursively round every number in a JSON value.
pub fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(sig12(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

#[allow(clippy::too_many_arguments)]
pub fn render_analyze(
    label: &str,
    dims: &[usize],
    report: &CorrelationReport,
    lambda: Option<f64>,
    profile: Option<&[f64]>,
    nonclassical_margin: f64,
    necessarily_nonclassical: bool,
    tol: f64,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Json => {
            let mut doc = json!({
                "label": label,
                "dims": dims,
                "tol": tol,
                "report": serde_json::to_value(report).expect("report serializes"),
                "lambda": lambda,
                "profile": profile,
                "nonclassical_margin": nonclassical_margin,
                "necessarily_nonclassical": necessarily_nonclassical,
            });
            round_floats(&mut doc);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        OutputFormat::Csv => {
            let mut out = String::from("key,value\n");
            out.push_str(&format!("label,{label}\n"));
            out.push_str(&format!(
                "dims,{}\n",
                dims.iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            out.push_str(&format!("log_base,{}\n", fmt12(report.log_base)));
            out.push_str(&format!("tol,{}\n", fmt12(tol)));
            for (j, e) in report.entropies.iter().enumerate() {
                out.push_str(&format!("entropy_{j},{}\n", fmt12(*e)));
            }
            out.push_str(&format!("total_entropy,{}\n", fmt12(report.total_entropy)));
            out.push_str(&format!("index,{}\n", fmt12(report.index)));
            if let Some(l) = lambda {
                out.push_str(&format!("lambda,{}\n", fmt12(l)));
            }
            if let Some(p) = profile {
                for (k, t) in p.iter().enumerate() {
                    out.push_str(&format!("profile_{k},{}\n", fmt12(*t)));
                }
            }
            out.push_str(&format!(
                "nonclassical_margin,{}\n",
                fmt12(nonclassical_margin)
            ));
            out.push_str(&format!(
                "necessarily_nonclassical,{necessarily_nonclassical}\n"
            ));
            for v in &report.verdicts {
                out.push_str(&format!(
                    "verdict_{},{},{}\n",
                    v.name,
                    fmt12(v.slack),
                    v.pass
                ));
            }
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "state {label} dims {:?} (log base {}, tol {})\n",
                dims,
                fmt12(report.log_base),
                fmt12(tol)
            ));
            for (j, e) in report.entropies.iter().enumerate() {
                out.push_str(&format!("  S({j}) = {}\n", fmt12(*e)));
            }
            out.push_str(&format!("  S(total) = {}\n", fmt12(report.total_entropy)));
            out.push_str(&format!(
                "  index of correlation = {}\n",
                fmt12(report.index)
            ));
            if let Some(l) = lambda {
                out.push_str(&format!("  lambda = {}\n", fmt12(l)));
            }
            if let Some(p) = profile {
                let terms: Vec<String> = p.iter().map(|t| fmt12(*t)).collect();
                out.push_str(&format!("  pairwise profile = [{}]\n", terms.join(", ")));
            }
            out.push_str(&format!(
                "  necessarily non-classical: {} (margin {})\n",
                if necessarily_nonclassical { "yes" } else { "no" },
                fmt12(nonclassical_margin)
            ));
            out.push_str("  verdicts:\n");
            for v in &report.verdicts {
                out.push_str(&format!(
                    "    {:<36} slack {:>18} {}\n",
                    v.name,
                    fmt12(v.slack),
                    if v.pass { "pass" } else { "FAIL" }
                ));
            }
            out
        }
    }
}

pub fn render_audit(result: &AuditResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut doc = serde_json::to_value(result).expect("audit serializes");
            round_floats(&mut doc);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        OutputFormat::Csv => {
            let mut out = String::from("key,value\n");
            out.push_str(&format!("n,{}\n", result.n));
            out.push_str(&format!(
                "profile,{}\n",
                result
                    .profile
                    .iter()
                    .map(|x| fmt12(*x))
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            out.push_str(&format!(
                "target,{}\n",
                result
                    .target
                    .iter()
                    .map(|x| fmt12(*x))
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            out.push_str(&format!("max_dev,{}\n", fmt12(result.max_dev)));
            out.push_str(&format!("ghz_form,{}\n", result.ghz_form));
            out.push_str(&format!(
                "best_objective,{}\n",
                fmt12(result.best_objective)
            ));
            out.push_str(&format!("starts,{}\n", result.starts));
            out.push_str(&format!("seed,{}\n", result.seed));
            out
        }
        OutputFormat::Text => {
            let profile: Vec<String> = result.profile.iter().map(|x| fmt12(*x)).collect();
            let target: Vec<String> = result.target.iter().map(|x| fmt12(*x)).collect();
            format!(
                "ghz audit n={} (seed {}, {} trials, {} starts, {} optimizer iterations)\n\
                 \x20 best profile   [{}]\n\
                 \x20 target profile [{}]\n\
                 \x20 max deviation  {}\n\
                 \x20 best objective {}\n\
                 \x20 simultaneous achievers {} ({} non-GHZ); stored-order-only matches {}\n\
                 \x20 verdict: {}\n",
                result.n,
                result.seed,
                result.trials,
                result.starts,
                result.iterations,
                profile.join(", "),
                target.join(", "),
                fmt12(result.max_dev),
                fmt12(result.best_objective),
                result.achievers,
                result.non_ghz_achievers,
                result.single_order_achievers,
                if result.ghz_form {
                    "all simultaneous profile-achievers are GHZ-form"
                } else {
                    "NON-GHZ PROFILE-ACHIEVER FOUND"
                }
            )
        }
    }
}

pub fn render_partitions(rows: &[(usize, u64, f64, f64)], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("n,exact,estimate,ratio\n");
            for (n, exact, estimate, ratio) in rows {
                out.push_str(&format!(
                    "{n},{exact},{},{}\n",
                    fmt12(*estimate),
                    fmt12(*ratio)
                ));
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(n, exact, estimate, ratio)| {
                    json!({
                        "n": n,
                        "exact": exact,
                        "estimate": sig12(*estimate),
                        "ratio": sig12(*ratio),
                    })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&Value::Array(items)).expect("json")
            )
        }
        OutputFormat::Text => {
            let mut out = format!(
                "{:>4} {:>12} {:>18} {:>10}\n",
                "n", "exact", "estimate", "ratio"
            );
            for (n, exact, estimate, ratio) in rows {
                out.push_str(&format!(
                    "{n:>4} {exact:>12} {:>18} {:>10}\n",
                    fmt12(*estimate),
                    fmt12(*ratio)
                ));
            }
            out
        }
    }
}
