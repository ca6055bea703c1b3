//! Flat key = value configuration with sections, merged under CLI flags.

use serde_json::Value;
use std::path::Path;
use svstab::error::{Error, Result};

/// Parsed config file: a TOML table whose sections name subcommands.
#[derive(Debug, Clone, Default)]
pub struct Config {
    root: toml::Table,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)?;
        let root: toml::Table = body
            .parse()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(Config { root })
    }

    /// Value of `key` inside `[section]`, if present.
    pub fn get_f64(&self, section: &str, key: &str) -> Option<f64> {
        self.root
            .get(section)
            .and_then(|s| s.get(key))
            .and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Option<usize> {
        self.root
            .get(section)
            .and_then(|s| s.get(key))
            .and_then(|v| v.as_integer())
            .map(|i| i as usize)
    }

    pub fn get_str(&self, section: &str, key: &str) -> Option<String> {
        self.root
            .get(section)
            .and_then(|s| s.get(key))
            .and_then(|v| v.as_str())
            .map(|s| s.to_string())
    }
}

/// Prefer the CLI value when given, else the config entry, else the default.
pub fn resolve_f64(cli: Option<f64>, cfg: Option<f64>, default: f64) -> f64 {
    cli.or(cfg).unwrap_or(default)
}

pub fn resolve_usize(cli: Option<usize>, cfg: Option<usize>, default: usize) -> usize {
    cli.or(cfg).unwrap_or(default)
}

/// Parse a MATLAB-style range "a:step:b" or a comma list "a,b,c" or a single
/// number into a list.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "range must be start:step:end, got {spec}"
            )));
        }
        let a: f64 = parts[0].parse().map_err(|_| bad(spec))?;
        let step: f64 = parts[1].parse().map_err(|_| bad(spec))?;
        let b: f64 = parts[2].parse().map_err(|_| bad(spec))?;
        if step <= 0.0 && b > a {
            return Err(Error::Config("nonpositive step".into()));
        }
        let mut out = Vec::new();
        let mut v = a;
        let n = ((b - a) / step).round() as i64;
        for i in 0..=n.max(0) {
            v = a + step * i as f64;
            if (step > 0.0 && v > b + 1e-12) || (step < 0.0 && v < b - 1e-12) {
                break;
            }
            out.push(v);
        }
        let _ = v;
        Ok(out)
    } else if spec.contains(',') {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad(spec)))
            .collect()
    } else {
        Ok(vec![spec.parse().map_err(|_| bad(spec))?])
    }
}

fn bad(spec: &str) -> Error {
    Error::Config(format!("cannot parse number list: {spec}"))
}

/// Manifest payload helper.
pub fn params_json(pairs: &[(&str, Value)]) -> Value {
    let mut map = serde_json::Map::new();
    for (k, v) in pairs {
        map.insert((*k).into(), v.clone());
    }
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        let r = parse_range("0:0.2:1").unwrap();
        assert_eq!(r.len(), 6);
        assert!((r[5] - 1.0).abs() < 1e-12);
        let r = parse_range("1,2,3.5").unwrap();
        assert_eq!(r, vec![1.0, 2.0, 3.5]);
        let r = parse_range("4.2").unwrap();
        assert_eq!(r, vec![4.2]);
        assert!(parse_range("a:b").is_err());
    }
}
