use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Keys accepted in each section. Anything else is rejected so that typos
/// surface as config errors rather than silently ignored settings.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "physical",
        &[
            "wavelength_nm",
            "cavity_length_cm",
            "mirror_R",
            "n2_cm3_per_erg",
            "delta_n",
            "kerr_sign",
            "intensity_W_per_cm2",
            "detuning_MHz",
            "beam_area_cm2",
            "longitudinal_index",
        ],
    ),
    ("grid", &["nx", "ny", "extent_in_healing_lengths"]),
    ("run", &["dt_scaled", "steps", "snapshot_every", "speed_ratio", "dealias"]),
    ("dispersion", &["nx", "ny", "extent_in_healing_lengths", "modes", "seed", "periods"]),
    (
        "probe",
        &["nx", "ny", "extent_in_healing_lengths", "modulation_MHz", "source_x", "source_y", "gamma_scaled", "strength"],
    ),
    (
        "obstacle",
        &["nx", "ny", "extent_in_healing_lengths", "radius", "height", "speed_ratios", "window", "check_every"],
    ),
    ("scan", &["lower", "upper"]),
    ("oracle", &["nx", "ny", "extent_in_healing_lengths"]),
];

/// Parsed configuration: flat `key = value` pairs grouped in `[sections]`,
/// with `#` comments. The original text is kept for manifests.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
    text: String,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = || format!("line {}", lineno + 1);
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(at(), format!("unterminated section header `{line}`")))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(Error::config(name, "unknown section"));
                }
                sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(at(), format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let section = current
                .as_ref()
                .ok_or_else(|| Error::config(key, "key appears before any [section]"))?;
            let allowed = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(Error::config(format!("{section}.{key}"), "unknown key"));
            }
            let entries = sections.get_mut(section).expect("section was inserted");
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::config(format!("{section}.{key}"), "duplicate key"));
            }
        }
        Ok(Config {
            sections,
            text: text.to_string(),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(format!("{section}.{key}"), format!("cannot parse `{v}`"))),
        }
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T> {
        self.get(section, key)?
            .ok_or_else(|| Error::config(format!("{section}.{key}"), "missing required key"))
    }

    pub fn get_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        let Some(v) = self.raw(section, key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::config(format!("{section}.{key}"), format!("cannot parse list item `{}`", t.trim())))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Value from `section`, falling back to `[grid]`.
    pub fn grid_value<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key)? {
            Some(v) => Ok(Some(v)),
            None => self.get("grid", key),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_lists() {
        let c = Config::parse("# top\n[grid]\nnx = 64 # points\n\n[obstacle]\nspeed_ratios = 0.1, 0.5,1.5\n").unwrap();
        assert_eq!(c.require::<usize>("grid", "nx").unwrap(), 64);
        assert_eq!(c.list::<f64>("obstacle", "speed_ratios").unwrap().unwrap(), vec![0.1, 0.5, 1.5]);
        assert_eq!(c.grid_value::<usize>("obstacle", "nx").unwrap(), Some(64));
        assert_eq!(c.get::<f64>("grid", "ny").unwrap(), None);
        assert!(c.text().starts_with("# top"));
    }

    #[test]
    fn errors_name_the_offending_key() {
        let key = |text: &str| match Config::parse(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        };
        assert_eq!(key("[grid]\nnz = 3\n"), "grid.nz");
        assert_eq!(key("[grids]\n"), "grids");
        assert_eq!(key("nx = 3\n"), "nx");
        assert_eq!(key("[grid]\nnx = 3\nnx = 4\n"), "grid.nx");
        assert_eq!(key("[grid]\nnx 3\n"), "line 2");
        let c = Config::parse("[grid]\nnx = many\n").unwrap();
        assert!(matches!(c.require::<usize>("grid", "nx"), Err(Error::Config { key, .. }) if key == "grid.nx"));
        assert!(matches!(c.require::<usize>("grid", "ny"), Err(Error::Config { key, .. }) if key == "grid.ny"));
    }
}
