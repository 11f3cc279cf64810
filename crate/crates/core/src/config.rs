//! Plain-text `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are rejected so that
//! typos do not silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{MhdError, Result};

pub const REQUIRED_KEYS: [&str; 10] = [
    "grid.N1",
    "grid.N2",
    "grid.N3",
    "grid.dt",
    "run.T",
    "reg.epsilon",
    "reg.gamma",
    "state.family",
    "forcing.family",
    "forcing.amplitude",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateFamily {
    Planar,
    Corrugated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcingFamily {
    Bump,
    Zero,
}

/// Either a fixed step or `auto` (90% of the stability limit).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Intervals per half-line in `x₁`.
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub dt: TimeStep,
    pub t_end: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub state_family: StateFamily,
    pub forcing_family: ForcingFamily,
    pub forcing_amplitude: f64,
}

fn config_error(key: &str, reason: impl Into<String>) -> MhdError {
    MhdError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_value<V: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<V> {
    let raw = map.get(key).ok_or_else(|| config_error(key, "missing required key"))?;
    raw.parse()
        .map_err(|_| config_error(key, format!("cannot parse value {raw:?}")))
}

impl SolverConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_error(line, format!("line {} is not key=value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !REQUIRED_KEYS.contains(&k) {
                return Err(config_error(k, "unknown key"));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(config_error(k, "duplicate key"));
            }
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        for key in REQUIRED_KEYS {
            if !map.contains_key(key) {
                return Err(config_error(key, "missing required key"));
            }
        }
        let dt = match map["grid.dt"].as_str() {
            "auto" => TimeStep::Auto,
            _ => TimeStep::Fixed(parse_value(map, "grid.dt")?),
        };
        let state_family = match map["state.family"].as_str() {
            "planar" => StateFamily::Planar,
            "corrugated" => StateFamily::Corrugated,
            other => return Err(config_error("state.family", format!("unknown family {other:?}"))),
        };
        let forcing_family = match map["forcing.family"].as_str() {
            "bump" => ForcingFamily::Bump,
            "zero" => ForcingFamily::Zero,
            other => return Err(config_error("forcing.family", format!("unknown family {other:?}"))),
        };
        let cfg = SolverConfig {
            n1: parse_value(map, "grid.N1")?,
            n2: parse_value(map, "grid.N2")?,
            n3: parse_value(map, "grid.N3")?,
            dt,
            t_end: parse_value(map, "run.T")?,
            epsilon: parse_value(map, "reg.epsilon")?,
            gamma: parse_value(map, "reg.gamma")?,
            state_family,
            forcing_family,
            forcing_amplitude: parse_value(map, "forcing.amplitude")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 8 {
            return Err(config_error("grid.N1", "need at least 8 intervals"));
        }
        for (key, n) in [("grid.N2", self.n2), ("grid.N3", self.n3)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(config_error(key, format!("{n} is not a power of two >= 4")));
            }
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(config_error("grid.dt", "must be positive or `auto`"));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(config_error("run.T", "must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(config_error("reg.epsilon", "must lie in (0, 1)"));
        }
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return Err(config_error("reg.gamma", "must be at least 1"));
        }
        if !self.forcing_amplitude.is_finite() {
            return Err(config_error("forcing.amplitude", "must be finite"));
        }
        Ok(())
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        let dt = match self.dt {
            TimeStep::Auto => "auto".to_string(),
            TimeStep::Fixed(v) => format!("{v:e}"),
        };
        let mut m = BTreeMap::new();
        m.insert("grid.N1".into(), self.n1.to_string());
        m.insert("grid.N2".into(), self.n2.to_string());
        m.insert("grid.N3".into(), self.n3.to_string());
        m.insert("grid.dt".into(), dt);
        m.insert("run.T".into(), format!("{:e}", self.t_end));
        m.insert("reg.epsilon".into(), format!("{:e}", self.epsilon));
        m.insert("reg.gamma".into(), format!("{:e}", self.gamma));
        m.insert("state.family".into(), self.state_family.to_string());
        m.insert("forcing.family".into(), self.forcing_family.to_string());
        m.insert("forcing.amplitude".into(), format!("{:e}", self.forcing_amplitude));
        m
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateFamily::Planar => "planar",
            StateFamily::Corrugated => "corrugated",
        })
    }
}

impl fmt::Display for ForcingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForcingFamily::Bump => "bump",
            ForcingFamily::Zero => "zero",
        })
    }
}

impl fmt::Display for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.to_map() {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "grid.N1=16\ngrid.N2=8\ngrid.N3=8\ngrid.dt=auto\nrun.T=0.5\n\
        reg.epsilon=0.1\nreg.gamma=4\nstate.family=planar\nforcing.family=bump\nforcing.amplitude=1\n";

    #[test]
    fn round_trip() {
        let cfg = SolverConfig::parse(GOOD).unwrap();
        assert_eq!(SolverConfig::parse(&cfg.to_string()).unwrap(), cfg);
    }

    #[test]
    fn missing_key_is_named() {
        let text = GOOD.replace("grid.dt=auto\n", "");
        match SolverConfig::parse(&text) {
            Err(MhdError::Config { key, .. }) => assert_eq!(key, "grid.dt"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn epsilon_range() {
        let text = GOOD.replace("reg.epsilon=0.1", "reg.epsilon=1.5");
        assert!(matches!(SolverConfig::parse(&text), Err(MhdError::Config { key, .. }) if key == "reg.epsilon"));
    }
}
