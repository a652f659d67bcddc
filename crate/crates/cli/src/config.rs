use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::experiments::{flowout, forward, linearize, recover, series, trace};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config is not valid JSON: {0}")]
    Json(String),
    #[error("invalid parameters for {kind}: {message}")]
    Parameters { kind: Kind, message: String },
    #[error("config kind {found} does not match subcommand {expected}")]
    KindMismatch { expected: Kind, found: Kind },
    #[error("config has no kind; use a specific subcommand")]
    MissingKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    SeriesCheck,
    RecoverLower,
    RecoverHigher,
    Forward,
    LinearizeCheck,
    Trace,
    Flowout,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::SeriesCheck => "series-check",
            Kind::RecoverLower => "recover-lower",
            Kind::RecoverHigher => "recover-higher",
            Kind::Forward => "forward",
            Kind::LinearizeCheck => "linearize-check",
            Kind::Trace => "trace",
            Kind::Flowout => "flowout",
        };
        f.write_str(s)
    }
}

/// Kind-specific parameter block, already validated.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    Series(series::Params),
    RecoverLower(recover::LowerParams),
    RecoverHigher(recover::HigherParams),
    Forward(forward::Params),
    Linearize(linearize::Params),
    Trace(trace::Params),
    Flowout(flowout::Params),
}

impl Parameters {
    pub fn kind(&self) -> Kind {
        match self {
            Parameters::Series(_) => Kind::SeriesCheck,
            Parameters::RecoverLower(_) => Kind::RecoverLower,
            Parameters::RecoverHigher(_) => Kind::RecoverHigher,
            Parameters::Forward(_) => Kind::Forward,
            Parameters::Linearize(_) => Kind::LinearizeCheck,
            Parameters::Trace(_) => Kind::Trace,
            Parameters::Flowout(_) => Kind::Flowout,
        }
    }

    /// Parses and validates `raw` (an absent block means all defaults).
    pub fn parse(kind: Kind, raw: Option<Value>) -> Result<Self, SchemaError> {
        let raw = raw.unwrap_or_else(|| Value::Object(Default::default()));
        let bad = |message: String| SchemaError::Parameters { kind, message };
        fn de<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, String> {
            serde_json::from_value(v).map_err(|e| e.to_string())
        }
        let p = match kind {
            Kind::SeriesCheck => Parameters::Series(de(raw).map_err(bad)?),
            Kind::RecoverLower => Parameters::RecoverLower(de(raw).map_err(bad)?),
            Kind::RecoverHigher => Parameters::RecoverHigher(de(raw).map_err(bad)?),
            Kind::Forward => Parameters::Forward(de(raw).map_err(bad)?),
            Kind::LinearizeCheck => Parameters::Linearize(de(raw).map_err(bad)?),
            Kind::Trace => Parameters::Trace(de(raw).map_err(bad)?),
            Kind::Flowout => Parameters::Flowout(de(raw).map_err(bad)?),
        };
        let checked = match &p {
            Parameters::Series(x) => x.validate(),
            Parameters::RecoverLower(x) => x.validate(),
            Parameters::RecoverHigher(x) => x.validate(),
            Parameters::Forward(x) => x.validate(),
            Parameters::Linearize(x) => x.validate(),
            Parameters::Trace(x) => x.validate(),
            Parameters::Flowout(x) => x.validate(),
        };
        checked.map_err(bad)?;
        Ok(p)
    }
}

/// One fully resolved run. Its JSON form is echoed into the report and can
/// be fed back through `--config` to repeat the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub parameters: Parameters,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// On-disk layout. Every field is optional; command-line flags fill the gaps.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kind: Option<Kind>,
    parameters: Option<Value>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 0;

/// Command-line view of a run before the config file is merged in.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Resolves the config for a subcommand. `allowed` lists the kinds the
/// subcommand accepts; the first one is used when the file names none.
/// `allowed` empty means any kind, taken from the file.
pub fn resolve(allowed: &[Kind], ov: &Overrides) -> Result<ExperimentConfig, SchemaError> {
    let file = match &ov.config {
        Some(path) => read_file(path)?,
        None => ConfigFile::default(),
    };
    let kind = match (file.kind, allowed.first()) {
        (Some(k), _) if allowed.is_empty() || allowed.contains(&k) => k,
        (Some(k), Some(&expected)) => return Err(SchemaError::KindMismatch { expected, found: k }),
        (None, Some(&k)) => k,
        (Some(_), None) | (None, None) => return Err(SchemaError::MissingKind),
    };
    let parameters = Parameters::parse(kind, file.parameters)?;
    let seed = ov.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let output_dir = ov.out.clone().or(file.output_dir).unwrap_or_else(|| PathBuf::from(format!("runs/{kind}")));
    Ok(ExperimentConfig { kind, parameters, seed, output_dir })
}

fn read_file(path: &Path) -> Result<ConfigFile, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Read { path: path.to_path_buf(), source })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| SchemaError::Json(e.to_string()))?;
    // a report.json carries its run under "config"
    let value = match value {
        Value::Object(mut m) if m.contains_key("verdicts") && m.contains_key("config") => m.remove("config").unwrap_or(Value::Null),
        v => v,
    };
    serde_json::from_value(value).map_err(|e| SchemaError::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn defaults_without_a_file() {
        let c = resolve(&[Kind::SeriesCheck], &Overrides::default()).unwrap();
        assert_eq!(c.kind, Kind::SeriesCheck);
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.output_dir, PathBuf::from("runs/series-check"));
    }

    #[test]
    fn flags_override_the_file() {
        let f = file(r#"{"seed": 3, "output_dir": "a", "parameters": {"points": 30}}"#);
        let ov = Overrides { config: Some(f.path().into()), out: Some("b".into()), seed: None };
        let c = resolve(&[Kind::SeriesCheck], &ov).unwrap();
        assert_eq!((c.seed, c.output_dir), (3, PathBuf::from("b")));
        match c.parameters {
            Parameters::Series(p) => assert_eq!(p.points, 30),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_schema_errors() {
        let f = file(r#"{"parameters": {"pionts": 30}}"#);
        let ov = Overrides { config: Some(f.path().into()), ..Default::default() };
        assert!(matches!(resolve(&[Kind::SeriesCheck], &ov), Err(SchemaError::Parameters { .. })));
        let f = file(r#"{"colour": 1}"#);
        let ov = Overrides { config: Some(f.path().into()), ..Default::default() };
        assert!(matches!(resolve(&[Kind::SeriesCheck], &ov), Err(SchemaError::Json(_))));
    }

    #[test]
    fn kind_must_fit_the_subcommand() {
        let f = file(r#"{"kind": "forward"}"#);
        let ov = Overrides { config: Some(f.path().into()), ..Default::default() };
        assert!(matches!(resolve(&[Kind::SeriesCheck], &ov), Err(SchemaError::KindMismatch { .. })));
        assert_eq!(resolve(&[], &ov).unwrap().kind, Kind::Forward);
        assert!(matches!(resolve(&[], &Overrides::default()), Err(SchemaError::MissingKind)));
    }

    #[test]
    fn echo_round_trips() {
        let c = resolve(&[Kind::RecoverLower], &Overrides { seed: Some(9), ..Default::default() }).unwrap();
        let f = file(&serde_json::to_string(&c).unwrap());
        let again = resolve(&[], &Overrides { config: Some(f.path().into()), ..Default::default() }).unwrap();
        assert_eq!(c, again);
    }
}
