//! Flat `key = value` text used for config files and run manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::bitgen::GeneratorConfig;
use crate::error::{Error, Result};

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
/// Keys must be unique.
pub fn parse_kv(text: &str, source: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let location = || format!("{source}:{}", lineno + 1);
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            location: location(),
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-')
        {
            return Err(Error::Parse {
                location: location(),
                message: format!("bad key {key:?}"),
            });
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::Parse {
                location: location(),
                message: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, source: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        location: source.to_string(),
        message: format!("{key} = {value:?} is not a valid number"),
    })
}

pub const CONFIG_KEYS: [&str; 5] = [
    "n_pairs",
    "rounds",
    "precision_digits",
    "skip_digits",
    "block_index",
];

fn set_config_field(config: &mut GeneratorConfig, key: &str, value: &str, source: &str) -> Result<bool> {
    let slot = match key {
        "n_pairs" => &mut config.n_pairs,
        "rounds" => &mut config.rounds,
        "precision_digits" => &mut config.precision_digits,
        "skip_digits" => &mut config.skip_digits,
        "block_index" => &mut config.block_index,
        _ => return Ok(false),
    };
    *slot = parse_num(key, value, source)?;
    Ok(true)
}

/// Applies a config file's entries on top of `base`. Unknown keys are errors.
pub fn config_from_text(text: &str, source: &str, base: GeneratorConfig) -> Result<GeneratorConfig> {
    let mut config = base;
    for (key, value) in parse_kv(text, source)? {
        if !set_config_field(&mut config, &key, &value, source)? {
            return Err(Error::Parse {
                location: source.to_string(),
                message: format!("unknown config key {key:?}"),
            });
        }
    }
    Ok(config)
}

pub fn config_to_text(config: &GeneratorConfig) -> String {
    format!(
        "n_pairs = {}\nrounds = {}\nprecision_digits = {}\nskip_digits = {}\nblock_index = {}\n",
        config.n_pairs, config.rounds, config.precision_digits, config.skip_digits, config.block_index
    )
}

pub fn read_config(path: &Path, base: GeneratorConfig) -> Result<GeneratorConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    config_from_text(&text, &path.display().to_string(), base)
}

/// Record of one CLI run: effective config, products, and counts.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub success: bool,
    pub config: GeneratorConfig,
    pub outputs: Vec<PathBuf>,
    pub counts: BTreeMap<String, u64>,
    pub params: BTreeMap<String, String>,
    pub timing_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: GeneratorConfig) -> Self {
        RunManifest {
            command: command.to_string(),
            success: true,
            config,
            outputs: Vec::new(),
            counts: BTreeMap::new(),
            params: BTreeMap::new(),
            timing_seconds: 0.0,
        }
    }

    pub fn count(&self, key: &str) -> Option<u64> {
        self.counts.get(key).copied()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# mrng run manifest\n");
        s.push_str(&format!("command = {}\n", self.command));
        s.push_str(&format!(
            "status = {}\n",
            if self.success { "success" } else { "failure" }
        ));
        s.push_str(&config_to_text(&self.config));
        for (k, v) in &self.params {
            s.push_str(&format!("param.{k} = {v}\n"));
        }
        for (k, v) in &self.counts {
            s.push_str(&format!("count.{k} = {v}\n"));
        }
        for (i, p) in self.outputs.iter().enumerate() {
            s.push_str(&format!("output.{i} = {}\n", p.display()));
        }
        s.push_str(&format!("timing_seconds = {}\n", self.timing_seconds));
        s
    }

    pub fn from_text(text: &str, source: &str) -> Result<Self> {
        let kv = parse_kv(text, source)?;
        let missing = |key: &str| Error::Parse {
            location: source.to_string(),
            message: format!("missing {key}"),
        };
        let mut m = RunManifest::new(
            kv.get("command").ok_or_else(|| missing("command"))?,
            GeneratorConfig::default(),
        );
        m.success = match kv.get("status").map(String::as_str) {
            Some("success") => true,
            Some("failure") => false,
            _ => return Err(missing("status")),
        };
        let mut outputs = BTreeMap::new();
        for (key, value) in &kv {
            if set_config_field(&mut m.config, key, value, source)? {
                continue;
            }
            if let Some(name) = key.strip_prefix("param.") {
                m.params.insert(name.to_string(), value.clone());
            } else if let Some(name) = key.strip_prefix("count.") {
                m.counts.insert(name.to_string(), parse_num(key, value, source)?);
            } else if let Some(idx) = key.strip_prefix("output.") {
                outputs.insert(parse_num::<usize>(key, idx, source)?, PathBuf::from(value));
            } else if key == "timing_seconds" {
                m.timing_seconds = parse_num(key, value, source)?;
            }
        }
        m.outputs = outputs.into_values().collect();
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// `<path>.manifest`
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let kv = parse_kv("# header\n\nn_pairs = 10\n  rounds=3  # not a comment\n", "t").unwrap();
        assert_eq!(kv["n_pairs"], "10");
        assert_eq!(kv["rounds"], "3  # not a comment");
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_kv("n_pairs 10", "t").is_err());
        assert!(parse_kv("a = 1\na = 2", "t").is_err());
        assert!(parse_kv("bad key = 1", "t").is_err());
    }

    #[test]
    fn config_file_overrides_defaults() {
        let c = config_from_text("rounds = 2\nskip_digits = 60\n", "t", GeneratorConfig::desk()).unwrap();
        assert_eq!(c.rounds, 2);
        assert_eq!(c.skip_digits, 60);
        assert_eq!(c.n_pairs, 200);
        assert!(config_from_text("seed = 1", "t", GeneratorConfig::desk()).is_err());
        assert!(config_from_text("rounds = -1", "t", GeneratorConfig::desk()).is_err());
        let round = config_from_text(&config_to_text(&c), "t", GeneratorConfig::paper_scale()).unwrap();
        assert_eq!(round, c);
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(manifest_path(Path::new("out/bits.txt")), PathBuf::from("out/bits.txt.manifest"));
    }

    fn arb_manifest() -> impl Strategy<Value = RunManifest> {
        (
            "[a-z][a-z-]{0,10}",
            any::<bool>(),
            (1usize..100_000, 1usize..100, 41usize..200_000, 40usize..=100, 0usize..50),
            proptest::collection::vec("[A-Za-z0-9_./-]{1,20}", 0..4),
            proptest::collection::btree_map("[a-z_]{1,8}", any::<u64>(), 0..4),
            proptest::collection::btree_map("[a-z_]{1,8}", "[A-Za-z0-9_.,-]{1,12}", 0..3),
            0.0f64..1e6,
        )
            .prop_map(|(command, success, (n, r, p, s, b), outputs, counts, params, t)| RunManifest {
                command,
                success,
                config: GeneratorConfig {
                    n_pairs: n,
                    rounds: r,
                    precision_digits: p,
                    skip_digits: s,
                    block_index: b,
                },
                outputs: outputs.into_iter().map(PathBuf::from).collect(),
                counts,
                params,
                timing_seconds: t,
            })
    }

    proptest! {
        #[test]
        fn manifest_round_trips(m in arb_manifest()) {
            let back = RunManifest::from_text(&m.to_text(), "m").unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
