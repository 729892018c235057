//! Run configuration: a single TOML file plus flag/env overrides.
//!
//! Precedence rules:
//! - command-line flags override config-file values;
//! - per task, a fixture path beats an endpoint entry, which beats the
//!   default endpoint;
//! - the `COUNTERFACT_ENDPOINT` environment variable overrides the *default*
//!   endpoint only, never per-task entries or fixtures.
//!
//! Relative paths inside the config file resolve against the config file's
//! own directory, so a config can travel with its fixtures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use counterfact::backends::{
    Backend, MockBackend, RemoteBackend, RemoteOptions, Task, ENDPOINT_ENV,
};
use counterfact::explain::{Form, FormSet};
use counterfact::keyphrase::KeyphraseConfig;

/// On-disk schema. Every section and key is optional; unknown keys are
/// rejected so typos fail loudly.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    backend: BackendSection,
    keyphrase: Option<KeyphraseSection>,
    sample: Option<SampleSection>,
    output: Option<OutputSection>,
    /// Forms to render by default (`cf-a`, `cf-n`, `cf-m`).
    forms: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BackendSection {
    /// Default endpoint used for any task without a more specific route.
    endpoint: Option<String>,
    timeout_ms: Option<u64>,
    retries: Option<u32>,
    /// Per-task endpoint overrides.
    #[serde(default)]
    endpoints: PerTask<String>,
    /// Per-task fixture files (deterministic mock backends).
    #[serde(default)]
    fixtures: PerTask<PathBuf>,
}

/// One optional value per backend task, keyed by the task's wire name.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerTask<T> {
    generate: Option<T>,
    nli: Option<T>,
    annotate: Option<T>,
    summarize_ext: Option<T>,
    summarize_abs: Option<T>,
}

impl<T> PerTask<T> {
    fn get(&self, task: Task) -> Option<&T> {
        match task {
            Task::Generate => self.generate.as_ref(),
            Task::Nli => self.nli.as_ref(),
            Task::Annotate => self.annotate.as_ref(),
            Task::SummarizeExt => self.summarize_ext.as_ref(),
            Task::SummarizeAbs => self.summarize_abs.as_ref(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyphraseSection {
    pos_whitelist: Option<Vec<String>>,
    alpha: Option<f64>,
    threshold: Option<f64>,
    limit: Option<usize>,
    damping: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleSection {
    size: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    /// Base directory for default output paths when `--out` is not given.
    dir: Option<PathBuf>,
    /// Set to false to suppress timestamp headers (same as --no-timestamp).
    timestamp: Option<bool>,
}

/// Fully resolved run configuration.
#[derive(Debug)]
pub struct RunConfig {
    base_dir: PathBuf,
    backend: BackendSection,
    pub keyphrase: KeyphraseConfig,
    sample_size: Option<usize>,
    sample_seed: Option<u64>,
    out_dir: Option<PathBuf>,
    timestamp: bool,
    forms: Option<FormSet>,
}

impl RunConfig {
    /// Load the config file, or produce an all-defaults config when no path
    /// is given.
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        let (file, base_dir) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {}", p.display()))?;
                let parsed: FileConfig = toml::from_str(&text)
                    .with_context(|| format!("cannot parse config {}", p.display()))?;
                let base = p.parent().filter(|d| !d.as_os_str().is_empty());
                (parsed, base.unwrap_or(Path::new(".")).to_path_buf())
            }
            None => (FileConfig::default(), PathBuf::from(".")),
        };

        let keyphrase = merge_keyphrase(file.keyphrase.as_ref())?;
        let forms = file
            .forms
            .as_ref()
            .map(|names| parse_forms(names))
            .transpose()
            .context("invalid `forms` entry in config")?;
        let sample = file.sample.unwrap_or_default();
        let output = file.output.unwrap_or_default();

        Ok(RunConfig {
            base_dir,
            backend: file.backend,
            keyphrase,
            sample_size: sample.size,
            sample_seed: sample.seed,
            out_dir: output.dir,
            timestamp: output.timestamp.unwrap_or(true),
            forms,
        })
    }

    /// Resolve a path from the config file relative to the config directory.
    fn relative(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Whether outputs should carry a generation timestamp.
    pub fn timestamp(&self, no_timestamp_flag: bool) -> bool {
        self.timestamp && !no_timestamp_flag
    }

    /// Forms to render: explicit flag values beat the config list; the
    /// default is all three forms.
    pub fn forms(&self, flag: &[String]) -> Result<FormSet> {
        if !flag.is_empty() {
            return parse_forms(flag);
        }
        Ok(self.forms.clone().unwrap_or_else(Form::all))
    }

    /// Sampling request after merging flags over config. `Some((n, seed))`
    /// when sampling was requested; an error if a size is requested with no
    /// seed anywhere.
    pub fn sampling(
        &self,
        flag_size: Option<usize>,
        flag_seed: Option<u64>,
    ) -> Result<Option<(usize, u64)>> {
        let size = flag_size.or(self.sample_size);
        let Some(n) = size else { return Ok(None) };
        match flag_seed.or(self.sample_seed) {
            Some(seed) => Ok(Some((n, seed))),
            None => bail!("sampling requested (size {n}) but no seed given; pass --seed or set [sample].seed"),
        }
    }

    /// Output destination: `--out` beats `[output].dir/<default_name>`;
    /// neither means stdout.
    pub fn resolve_out(&self, flag: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
        flag.or_else(|| self.out_dir.as_ref().map(|d| self.relative(d).join(default_name)))
    }

    /// Build the backend routing for the tasks a command needs.
    ///
    /// Every required task must resolve to a fixture file or an endpoint;
    /// anything unrouted is a configuration error listing the missing tasks.
    pub fn backends(&self, required: &[Task]) -> Result<counterfact::BackendSet> {
        let options = RemoteOptions {
            timeout: Duration::from_millis(self.backend.timeout_ms.unwrap_or(10_000)),
            retries: self.backend.retries.unwrap_or(2),
        };
        let default_endpoint =
            std::env::var(ENDPOINT_ENV).ok().or_else(|| self.backend.endpoint.clone());

        let mut mock_cache: BTreeMap<PathBuf, Arc<MockBackend>> = BTreeMap::new();
        let mut set = counterfact::BackendSet::new();
        let mut missing = Vec::new();

        for &task in required {
            if let Some(raw) = self.backend.fixtures.get(task) {
                let path = self.relative(raw);
                let mock = match mock_cache.get(&path) {
                    Some(m) => Arc::clone(m),
                    None => {
                        let m = Arc::new(
                            MockBackend::from_path(&path)
                                .with_context(|| format!("fixture {}", path.display()))?,
                        );
                        mock_cache.insert(path.clone(), Arc::clone(&m));
                        m
                    }
                };
                if !mock.capabilities().supports(task) {
                    bail!("fixture {} has no \"{task}\" section", path.display());
                }
                set = set.with(task, mock);
            } else if let Some(url) = self.backend.endpoints.get(task) {
                let remote =
                    RemoteBackend::new(url.clone()).with_options(options.clone()).with_tasks([task]);
                set = set.with(task, Arc::new(remote));
            } else if let Some(url) = &default_endpoint {
                let remote =
                    RemoteBackend::new(url.clone()).with_options(options.clone()).with_tasks([task]);
                set = set.with(task, Arc::new(remote));
            } else {
                missing.push(task.as_str());
            }
        }

        if !missing.is_empty() {
            bail!(
                "no backend routed for task(s) {}; add [backend.fixtures] or [backend.endpoints] \
                 entries, set [backend].endpoint, or export {ENDPOINT_ENV}",
                missing.join(", ")
            );
        }
        Ok(set)
    }
}

fn parse_forms(names: &[String]) -> Result<FormSet> {
    let mut set = FormSet::new();
    for name in names {
        let form: Form = name.parse().map_err(anyhow::Error::msg)?;
        set.insert(form);
    }
    Ok(set)
}

fn merge_keyphrase(section: Option<&KeyphraseSection>) -> Result<KeyphraseConfig> {
    let mut config = KeyphraseConfig::default();
    let Some(s) = section else { return Ok(config) };
    if let Some(tags) = &s.pos_whitelist {
        let mut whitelist = std::collections::BTreeSet::new();
        for tag in tags {
            let parsed: counterfact::backends::PosTag =
                serde_json::from_value(serde_json::Value::String(tag.to_uppercase()))
                    .with_context(|| format!("unknown POS tag {tag:?} in keyphrase.pos_whitelist"))?;
            whitelist.insert(parsed);
        }
        config.pos_whitelist = whitelist;
    }
    if let Some(alpha) = s.alpha {
        if !(alpha.is_finite() && alpha >= 0.0) {
            bail!("keyphrase.alpha must be a finite non-negative number, got {alpha}");
        }
        config.alpha = alpha;
    }
    if let Some(threshold) = s.threshold {
        if !(threshold.is_finite() && (0.0..=1.0).contains(&threshold)) {
            bail!("keyphrase.threshold must lie in [0, 1], got {threshold}");
        }
        config.threshold = threshold;
    }
    if let Some(limit) = s.limit {
        if limit == 0 {
            bail!("keyphrase.limit must be at least 1");
        }
        config.limit = limit;
    }
    if let Some(damping) = s.damping {
        if !(damping.is_finite() && (0.0..1.0).contains(&damping)) {
            bail!("keyphrase.damping must lie in [0, 1), got {damping}");
        }
        config.damping = damping;
    }
    Ok(config)
}
