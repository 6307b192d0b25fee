use serde::Serialize;
use std::time::{SystemTime, UNIX_EPOCH};
use wrlat_core::field::FieldKey;
use wrlat_core::Precision;

/// Flags that affect wall time or destination but never output bytes.
const VOLATILE: [&str; 2] = ["--jobs", "--out"];

/// Attached to every artifact so that a run can be reproduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub field: Option<FieldKey>,
    pub choice_index: Option<usize>,
    pub precision_bits: u32,
    pub tool_version: String,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(argv: &[String], field: Option<FieldKey>, choice_index: Option<usize>, precision: Precision) -> Self {
        RunManifest {
            command_line: normalize_argv(argv),
            field,
            choice_index,
            precision_bits: precision.bits,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
        }
    }
}

/// Drops the program path and the volatile flags with their values.
pub fn normalize_argv(argv: &[String]) -> Vec<String> {
    let mut out = vec!["wrlat".to_string()];
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if VOLATILE.contains(&a.as_str()) {
            it.next();
            continue;
        }
        if VOLATILE.iter().any(|f| a.starts_with(&format!("{f}="))) {
            continue;
        }
        out.push(a.clone());
    }
    out
}

/// `SOURCE_DATE_EPOCH` when set, so that builds and reports can be pinned.
pub fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn volatile_flags_are_dropped() {
        let a = normalize_argv(&argv("/tmp/x/wrlat scan -p 3 -n 9 --jobs 8 --out r.json --m 1..4"));
        let b = normalize_argv(&argv("wrlat scan -p 3 -n 9 --jobs=1 --m 1..4"));
        assert_eq!(a, b);
        assert_eq!(a, argv("wrlat scan -p 3 -n 9 --m 1..4"));
    }
}
