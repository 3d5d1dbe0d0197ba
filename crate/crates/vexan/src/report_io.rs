//! Report serialization: JSONL (one object per experiment) and the CSV
//! summary used as plot data.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use vexan_core::harness::ExperimentReport;

/// Write one JSON object per line. Field order and float formatting are
/// fixed by the serializer, so identical reports produce identical bytes.
pub fn write_jsonl(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ExperimentReport>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).context("parsing report line"))
        .collect()
}

/// Summary CSV: kind, measured constant, asserted bound, pass flag, plus the
/// per-resolution sweep columns.
pub fn write_csv_summary(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    let mut out = String::from("kind,measured,bound,pass,resolutions,values\n");
    for r in reports {
        let bound = r
            .asserted_bound
            .map(|b| b.to_string())
            .unwrap_or_default();
        let ns: Vec<String> = r.resolutions.iter().map(|s| s.n.to_string()).collect();
        let vals: Vec<String> = r.resolutions.iter().map(|s| s.value.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.kind,
            r.measured_constant,
            bound,
            r.pass,
            ns.join(";"),
            vals.join(";")
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// The JSONL text with `runtime_ms` zeroed out, for determinism comparisons.
pub fn strip_runtime(jsonl: &str) -> String {
    let mut out = String::new();
    for line in jsonl.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let mut v: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(_) => {
                out.push_str(line);
                out.push('\n');
                continue;
            }
        };
        if let Some(obj) = v.as_object_mut() {
            obj.insert("runtime_ms".into(), serde_json::json!(0.0));
        }
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use vexan_core::harness::ResolutionSample;

    fn sample_report() -> ExperimentReport {
        ExperimentReport {
            kind: "kolmogorov".into(),
            params: BTreeMap::from([("cases".to_string(), 5.0)]),
            measured_constant: 0.75,
            asserted_bound: Some(1.0),
            pass: true,
            argmax: Some("case 3".into()),
            resolutions: vec![ResolutionSample { n: 16, value: 0.7 }],
            runtime_ms: 12.5,
            seed: 3,
            kernel: None,
            error: None,
            details: BTreeMap::new(),
        }
    }

    #[test]
    fn jsonl_round_trip_and_schema_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        write_jsonl(&path, &[sample_report()]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in [
            "kind",
            "params",
            "measured_constant",
            "asserted_bound",
            "pass",
            "argmax",
            "resolutions",
            "runtime_ms",
            "seed",
            "kernel",
        ] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(v["resolutions"][0]["N"], 16);
        let back = read_jsonl(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].kind, "kolmogorov");
    }

    #[test]
    fn strip_runtime_normalizes() {
        let mut a = sample_report();
        let mut b = sample_report();
        a.runtime_ms = 1.0;
        b.runtime_ms = 99.0;
        let ja = serde_json::to_string(&a).unwrap() + "\n";
        let jb = serde_json::to_string(&b).unwrap() + "\n";
        assert_ne!(ja, jb);
        assert_eq!(strip_runtime(&ja), strip_runtime(&jb));
    }

    #[test]
    fn csv_summary_has_expected_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_csv_summary(&path, &[sample_report()]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "kind,measured,bound,pass,resolutions,values");
        let row = lines.next().unwrap();
        assert!(row.starts_with("kolmogorov,0.75,1,true,16,"));
    }
}
