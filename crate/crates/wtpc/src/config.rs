//! Flat `key = value` config files and list-valued flag syntax.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{AppError, AppResult};

/// Keys accepted in a config file; each matches a long flag with `-` spelled `_`.
pub const KEYS: &[&str] = &[
    "data",
    "schema",
    "out",
    "delimiter",
    "class",
    "order",
    "grid",
    "mode",
    "alpha",
    "min_count",
    "iqr_k",
    "model",
    "enhanced",
    "profile",
    "dynamic",
    "future",
    "q1",
    "q2",
    "horizons",
    "level",
    "delta",
    "seed",
    "n",
];

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> AppResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| AppError::Config(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(AppError::Config(format!("line {}: unknown key {key:?}", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> AppResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_config(&text)
}

/// Parses an order grid such as `4..30`, `2,4,8` or `1..5,10`; ranges are inclusive.
pub fn parse_grid(spec: &str) -> AppResult<Vec<usize>> {
    let bad = || AppError::Usage(format!("invalid grid {spec:?}"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Parses a comma-separated list of positive numbers.
pub fn parse_horizons(spec: &str) -> AppResult<Vec<f64>> {
    let bad = || AppError::Usage(format!("invalid horizon list {spec:?}"));
    let out: Vec<f64> = spec
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().ok().filter(|h| *h > 0.0 && h.is_finite()).ok_or_else(bad))
        .collect::<AppResult<_>>()?;
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# run\ndata = a.csv\nq1=2 # ar\n\nmin-count = 10\n").unwrap();
        assert_eq!(m["data"], "a.csv");
        assert_eq!(m["q1"], "2");
        assert_eq!(m["min_count"], "10");
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("data").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("4..7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_grid("1..=3,10, 2").unwrap(), vec![1, 2, 3, 10]);
        assert!(parse_grid("7..4").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_grid("a..b").is_err());
    }

    #[test]
    fn horizons() {
        assert_eq!(parse_horizons("10,50, 100").unwrap(), vec![10.0, 50.0, 100.0]);
        assert!(parse_horizons("10,-5").is_err());
        assert!(parse_horizons("").is_err());
    }
}
