//! Sweep configuration files: flat `key=value` lines, `#` starts a comment.
//!
//! ```text
//! K = 4..8
//! L = 1..2
//! Nc = 1..2
//! modes = up,down
//! oracle = on
//! ```

use std::path::{Path, PathBuf};

use crate::model::Mode;
use crate::report::{parse_range, SweepSpec};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    pub spec: SweepSpec,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl SweepConfig {
    /// Apply one setting. Keys are case-sensitive except for the mode list aliases.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key.trim() {
            "K" => self.spec.k = parse_range(value)?,
            "L" => self.spec.l = parse_range(value)?,
            "Nc" => self.spec.nc = parse_range(value)?,
            "mode" | "modes" => {
                let modes = value.split(',').map(|m| m.trim().parse::<Mode>()).collect::<Result<Vec<_>, _>>()?;
                if modes.is_empty() {
                    return Err("empty mode list".into());
                }
                self.spec.modes = modes;
            }
            "oracle" => {
                self.spec.oracle = match value {
                    "on" | "true" | "1" | "yes" => true,
                    "off" | "false" | "0" | "no" => false,
                    other => return Err(format!("oracle expects on/off, got {other:?}")),
                }
            }
            "seed" => self.spec.seed = value.parse().map_err(|e| format!("bad seed {value:?}: {e}"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.json = match value {
                    "csv" => false,
                    "json" => true,
                    other => return Err(format!("format expects csv or json, got {other:?}")),
                }
            }
            other => return Err(format!("unknown sweep setting {other:?}")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut conf = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            conf.set(k, v).map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(conf)
    }
}

pub fn load_sweep_config(path: &Path) -> Result<SweepConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    SweepConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_flags_override() {
        let mut c =
            SweepConfig::parse("# grid\nK = 4..8\nL=1..2\nNc=2\nmodes = up, down\noracle=on\nformat=json\n").unwrap();
        assert_eq!(c.spec.k, 4..=8);
        assert_eq!(c.spec.nc, 2..=2);
        assert_eq!(c.spec.modes, vec![Mode::Up, Mode::Down]);
        assert!(c.spec.oracle && c.json);
        c.set("K", "5").unwrap();
        assert_eq!(c.spec.k, 5..=5);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(SweepConfig::parse("speed=3").is_err());
        assert!(SweepConfig::parse("K").is_err());
        assert!(SweepConfig::parse("oracle=maybe").is_err());
        assert!(SweepConfig::parse("modes=sideways").is_err());
    }
}
