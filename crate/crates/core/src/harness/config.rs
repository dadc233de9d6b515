use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;

/// A parameter value: a number, a comma-separated list of numbers, or text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl ParamValue {
    /// Numbers parse as numbers, comma lists of numbers as lists,
    /// anything else as text.
    pub fn parse(raw: &str) -> Self {
        let raw = raw.trim();
        if let Ok(v) = raw.parse::<f64>() {
            return ParamValue::Number(v);
        }
        if raw.contains(',') {
            let items: Result<Vec<f64>, _> = raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
            if let Ok(items) = items {
                return ParamValue::List(items);
            }
        }
        ParamValue::Text(raw.to_string())
    }

    /// The value as a list; a single number is a one-element list.
    pub fn as_list(&self) -> Option<Vec<f64>> {
        match self {
            ParamValue::Number(v) => Some(vec![*v]),
            ParamValue::List(v) => Some(v.clone()),
            ParamValue::Text(_) => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            ParamValue::Number(v) => Some(*v),
            ParamValue::List(v) if v.len() == 1 => Some(v[0]),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl Threads {
    pub fn resolve(self) -> usize {
        match self {
            Threads::Count(n) => n.max(1),
            Threads::Auto => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }

    /// `THICKPOINTS_THREADS` if set and valid, else `Auto`.
    pub fn from_env() -> Result<Self, HarnessError> {
        match std::env::var("THICKPOINTS_THREADS") {
            Ok(v) => v.parse().map_err(|e: String| HarnessError::Config(format!("THICKPOINTS_THREADS: {e}"))),
            Err(_) => Ok(Threads::Auto),
        }
    }
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Threads::Count(n)),
            _ => Err(format!("threads must be a positive integer or 'auto', got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Parses `csv,json,svg`; duplicates collapse.
pub fn parse_formats(s: &str) -> Result<Vec<Format>, HarnessError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let f = match part.to_ascii_lowercase().as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "svg" => Format::Svg,
            other => return Err(HarnessError::Config(format!("unknown output format '{other}'"))),
        };
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(HarnessError::Config("no output formats given".into()));
    }
    out.sort();
    Ok(out)
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub master_seed: u64,
    pub replicas: u64,
    pub threads: Threads,
    pub params: BTreeMap<String, ParamValue>,
    pub output: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl ExperimentConfig {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            master_seed: 0,
            replicas: 1,
            threads: Threads::Auto,
            params: BTreeMap::new(),
            output: None,
            formats: vec![Format::Json],
        }
    }

    pub fn with_param(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), ParamValue::parse(value));
        self
    }

    /// Applies one `key = value` setting with a dotted key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let value = value.trim();
        match key.trim() {
            "experiment.name" => self.experiment = value.to_string(),
            "run.seed" => {
                self.master_seed =
                    value.parse().map_err(|_| HarnessError::Config(format!("run.seed must be a u64, got '{value}'")))?
            }
            "run.replicas" => {
                let n: u64 = value
                    .parse()
                    .map_err(|_| HarnessError::Config(format!("run.replicas must be an integer, got '{value}'")))?;
                if n == 0 {
                    return Err(HarnessError::Config("run.replicas must be at least 1".into()));
                }
                self.replicas = n;
            }
            "run.threads" => self.threads = value.parse().map_err(HarnessError::Config)?,
            "output.dir" => self.output = Some(PathBuf::from(value)),
            "output.formats" => self.formats = parse_formats(value)?,
            other => {
                let name = other.strip_prefix("param.").or_else(|| other.strip_prefix("sweep."));
                match name {
                    Some(n) if !n.is_empty() => {
                        self.params.insert(n.to_string(), ParamValue::parse(value));
                    }
                    _ => return Err(HarnessError::Config(format!("unknown config key '{other}'"))),
                }
            }
        }
        Ok(())
    }

    /// Reads a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), HarnessError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected 'key = value'", i + 1)))?;
            self.set(k, v).map_err(|e| match e {
                HarnessError::Config(m) => HarnessError::Config(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Parses a config file body into a fresh config.
    pub fn from_file_text(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::new("");
        cfg.apply_file_text(text)?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_values() {
        assert_eq!(ParamValue::parse("0.5"), ParamValue::Number(0.5));
        assert_eq!(ParamValue::parse("0.02, 0.05,0.08"), ParamValue::List(vec![0.02, 0.05, 0.08]));
        assert_eq!(ParamValue::parse("disc"), ParamValue::Text("disc".into()));
        assert_eq!(ParamValue::parse("a,b"), ParamValue::Text("a,b".into()));
        assert_eq!(ParamValue::List(vec![1.0, 2.5]).to_string(), "1,2.5");
    }

    #[test]
    fn file_format() {
        let text = "# demo\nexperiment.name = pair-thick\nrun.seed = 42\nrun.replicas = 3\nrun.threads = auto\n\
                    sweep.b = 0.02,0.05 # trailing\nparam.n_max_exp = 12\noutput.formats = json,csv\n";
        let cfg = ExperimentConfig::from_file_text(text).unwrap();
        assert_eq!(cfg.experiment, "pair-thick");
        assert_eq!(cfg.master_seed, 42);
        assert_eq!(cfg.replicas, 3);
        assert_eq!(cfg.threads, Threads::Auto);
        assert_eq!(cfg.params["b"], ParamValue::List(vec![0.02, 0.05]));
        assert_eq!(cfg.params["n_max_exp"], ParamValue::Number(12.0));
        assert_eq!(cfg.formats, vec![Format::Csv, Format::Json]);
    }

    #[test]
    fn bad_settings() {
        assert!(matches!(ExperimentConfig::from_file_text("bogus = 1"), Err(HarnessError::Config(_))));
        assert!(ExperimentConfig::from_file_text("run.replicas = 0").is_err());
        assert!(ExperimentConfig::from_file_text("run.threads = 0").is_err());
        assert!(ExperimentConfig::from_file_text("output.formats = pdf").is_err());
        let err = ExperimentConfig::from_file_text("a\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }
}
