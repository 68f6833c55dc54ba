//! CSV and manifest output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bench::runner::RunResult;
use crate::error::{Error, Result};

/// Decimal (non-exponent) rendering with at least 17 significant digits.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (16 - magnitude).clamp(1, 340) as usize;
    format!("{x:.decimals$}")
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Header of every per-algorithm CSV file.
pub const CSV_HEADER: &str = "iteration,mse_db,mu,codebook_size";

/// CSV text for one algorithm: a header, one row per iteration and, if the
/// run diverged, a final `<iteration>,diverged,,` marker row.
pub fn algorithm_csv(result: &RunResult, index: usize) -> String {
    let alg = &result.algorithms[index];
    let mut out = String::with_capacity(64 * (alg.curve.values_db.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, db) in alg.curve.values_db.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i + 1,
            format_real(*db),
            format_real(alg.mu[i]),
            format_real(alg.model_size[i])
        );
    }
    if let Some(d) = alg.curve.divergence {
        let _ = writeln!(out, "{},diverged,,", d.step + 1);
    }
    out
}

/// Configuration, seeds and diagnostics, in the config file format.
pub fn manifest(result: &RunResult) -> String {
    let mut out = String::new();
    out.push_str("# configuration\n");
    out.push_str(&result.config.to_text());
    out.push_str("\n# derived\n");
    let _ = writeln!(out, "digest = {}", result.config.digest());
    let seeds: Vec<String> = result.seeds.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "replica_seeds = {}", seeds.join(", "));
    let _ = writeln!(out, "signal_scale = {}", format_real(result.signal_scale));
    let _ = writeln!(out, "untrained_mse_db = {}", format_real(result.untrained_mse_db));
    for alg in &result.algorithms {
        let n = alg.name();
        let d = &alg.diagnostics;
        let _ = writeln!(out, "{n}.file = {n}.csv");
        let _ = writeln!(
            out,
            "{n}.final_mse_db = {}",
            alg.curve.values_db.last().map_or("none".into(), |v| format_real(*v))
        );
        let _ = writeln!(out, "{n}.final_codebook_size = {}", format_real(alg.final_model_size()));
        let _ = writeln!(out, "{n}.lambda_max = {}", format_real(d.lambda_max));
        let _ = writeln!(out, "{n}.final_sigma_e = {}", format_real(d.final_sigma_e));
        let _ = writeln!(out, "{n}.final_step_bound = {}", format_real(d.final_step_bound));
        let _ = writeln!(out, "{n}.step_bound_violations = {}", d.step_bound_violations);
        if let Some(l) = &d.l_check {
            let _ = writeln!(out, "{n}.final_l_bound = {}", format_real(l.final_l_bound));
            let _ = writeln!(out, "{n}.l_bound_violations = {}", l.violations);
        }
        for div in &alg.divergences {
            let _ = writeln!(
                out,
                "{n}.divergence = replica {} step {} |error| {}",
                div.replica.unwrap_or(0),
                div.step + 1,
                format_real(div.magnitude)
            );
        }
    }
    out
}

/// Writes `<algorithm>.csv` for each algorithm plus `manifest.txt` into `dir`,
/// creating it if needed.
pub fn emit_csv(result: &RunResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    for (i, alg) in result.algorithms.iter().enumerate() {
        write(&dir.join(format!("{}.csv", alg.name())), &algorithm_csv(result, i))?;
    }
    write(&dir.join("manifest.txt"), &manifest(result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting_keeps_precision() {
        for x in [0.01, -23.456_789_012_345_67, 1.0, 320.0, 1.234e-7, 5e5, 0.0] {
            let s = format_real(x);
            assert!(!s.contains('e'), "{s}");
            let digits = s.trim_start_matches('-').replace('.', "");
            let significant = digits.trim_start_matches('0').len();
            assert!(significant >= 12 || x == 0.0, "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
