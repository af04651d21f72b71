use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use catstate::fock::DensityMatrix;
use catstate::format::round_sig;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// One runnable scenario. Returns a JSON summary that is also printed.
pub trait Scenario: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &mut RunContext) -> Result<Value>;
}

#[derive(Default)]
pub struct ScenarioRegistry {
    entries: BTreeMap<&'static str, Box<dyn Scenario>>,
}

impl ScenarioRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        crate::scenarios::register_all(&mut r);
        r
    }

    /// Later registrations replace earlier ones with the same name.
    pub fn register(&mut self, scenario: Box<dyn Scenario>) {
        self.entries.insert(scenario.name(), scenario);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Scenario> {
        self.entries.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Scenario> {
        self.entries.values().map(|s| s.as_ref())
    }

    pub fn lookup(&self, name: &str) -> Result<&dyn Scenario> {
        self.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            CliError::Config(format!("unknown scenario `{name}` (known: {})", known.join(", ")))
        })
    }
}

/// Output directory plus a record of every file written, so a failed run
/// can remove what it produced.
pub struct RunContext {
    pub config: RunConfig,
    out: PathBuf,
    created_dir: bool,
    artifacts: Vec<String>,
}

impl RunContext {
    pub fn new(config: RunConfig) -> Result<Self> {
        let out = config.out.clone();
        let created_dir = !out.exists();
        std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
        Ok(Self {
            config,
            out,
            created_dir,
            artifacts: Vec::new(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    pub fn artifacts(&self) -> &[String] {
        &self.artifacts
    }

    fn track(&mut self, name: &str) -> PathBuf {
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.to_string());
        }
        self.out.join(name)
    }

    pub fn write_with<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> catstate::Result<()>,
    {
        let path = self.track(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = json_text(value)?;
        self.write_with(name, |w| Ok(w.write_all(text.as_bytes())?))
    }

    pub fn write_state(&mut self, name: &str, rho: &DensityMatrix) -> Result<()> {
        self.write_json(name, &rho.to_record())
    }

    /// Deletes tracked files, and the output directory if this run made it
    /// and it is now empty.
    pub fn discard(&mut self) {
        for name in self.artifacts.drain(..) {
            let _ = std::fs::remove_file(self.out.join(name));
        }
        if self.created_dir {
            let _ = std::fs::remove_dir(&self.out);
        }
    }
}

/// Rounds every float to the shared significant-digit count.
pub fn rounded(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(catstate::Error::from)?;
    let mut text = serde_json::to_string_pretty(&rounded(v)).map_err(catstate::Error::from)?;
    text.push('\n');
    Ok(text)
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let record = serde_json::from_str(&text).map_err(catstate::Error::from)?;
    Ok(DensityMatrix::from_record(&record)?)
}
