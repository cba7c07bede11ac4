use std::fmt::Write as _;

use super::config::ExperimentConfig;
use super::experiment::ErrorCurve;
use super::ledger::BoundLedger;
use crate::error::Result;

/// `# `-prefixed header lines: the given preamble, then every config key.
pub fn config_header(preamble: &[String], cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    for p in preamble {
        let _ = writeln!(out, "# {p}");
    }
    for (k, v) in cfg.pairs() {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "# fingerprint={}", cfg.fingerprint());
    out
}

/// One row per `(n, estimator)`.
pub fn curve_csv(curve: &ErrorCurve, preamble: &[String]) -> String {
    let mut out = config_header(preamble, &curve.config);
    let _ = writeln!(out, "# std: unbiased, divisor trials-1; band = mean +/- 1 std");
    let _ = writeln!(out, "# trials_used={} excluded={}", curve.trials_used, curve.excluded.len());
    for e in &curve.excluded {
        let _ = writeln!(out, "# excluded trial {}: {}", e.trial, e.reason);
    }
    out.push_str("n,estimator,mean_abs_error,std,trials\n");
    for r in &curve.rows {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{}",
            r.n, r.estimator, r.mean_abs_error, r.std, r.trials
        );
    }
    out
}

pub fn curve_json(curve: &ErrorCurve, preamble: &[String]) -> Result<String> {
    let doc = serde_json::json!({
        "header": preamble,
        "curve": curve,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn ledger_csv(ledger: &BoundLedger, header: &str) -> String {
    let mut out = header.to_string();
    let _ = writeln!(
        out,
        "# gamma={:.16e} row_sum_norm={:.16e} diag_max={:.16e} witness_l1={}",
        ledger.gamma,
        ledger.row_sum_norm,
        ledger.diag_max,
        ledger
            .witness_l1
            .map(|w| format!("{w:.16e}"))
            .unwrap_or_else(|| "none".into())
    );
    out.push_str("n,quantity,measured,bound,passed\n");
    for r in &ledger.rows {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{}",
            r.n, r.quantity, r.check.measured, r.check.bound, r.check.passed
        );
    }
    out
}

pub fn ledger_json(ledger: &BoundLedger, header: &[String]) -> Result<String> {
    let doc = serde_json::json!({
        "header": header,
        "ledger": ledger,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}
