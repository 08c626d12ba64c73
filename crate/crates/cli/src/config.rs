//! Run configuration, layered as flags > environment > config file > defaults.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, ValueEnum};
use namegender_core::webclients::{
    ApiKeys, ClientConfig, ClientMode, ENV_FACE_KEY, ENV_GENDERIZE_KEY, ENV_IMG_KEY, MAX_THUMBNAILS,
};
use namegender_core::BackendId;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_MIN_COUNTRY_INSTANCES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DictCountry {
    /// Pass the person's country to the dictionary.
    With,
    /// Ignore countries in dictionary lookups.
    Without,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalFlags {
    /// Comma-separated methods: ssa, census, dict, genderize, face, mixed1, mixed2.
    #[arg(long, global = true, value_delimiter = ',')]
    pub methods: Option<Vec<BackendId>>,
    /// Web client mode: live, cached or replay.
    #[arg(long, global = true)]
    pub mode: Option<ClientMode>,
    /// TOML config file. Relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cache_file: Option<PathBuf>,
    /// Fixture directory for replay mode.
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    #[arg(long, global = true)]
    pub endpoint_genderize: Option<String>,
    #[arg(long, global = true)]
    pub endpoint_face: Option<String>,
    #[arg(long, global = true)]
    pub endpoint_images: Option<String>,
    /// Dataset column holding country codes.
    #[arg(long, global = true)]
    pub country_column: Option<String>,
    /// Countries with fewer records are pooled into "other".
    #[arg(long, global = true)]
    pub min_country_instances: Option<usize>,
    /// Directory of yobYYYY.txt files.
    #[arg(long, global = true)]
    pub ssa_dir: Option<PathBuf>,
    /// CSV with header name,male_count,female_count.
    #[arg(long, global = true)]
    pub census_csv: Option<PathBuf>,
    /// nam_dict-compatible dictionary file.
    #[arg(long, global = true)]
    pub dict_file: Option<PathBuf>,
    #[arg(long, global = true)]
    pub dict_country: Option<DictCountry>,
    /// Thumbnails retrieved per person (at most 5).
    #[arg(long, global = true)]
    pub thumbnails: Option<usize>,
    /// Requests per second per upstream; 0 disables pacing.
    #[arg(long, global = true)]
    pub rate_limit: Option<f64>,
    /// Records evaluated concurrently.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEndpoints {
    genderize: Option<String>,
    face: Option<String>,
    images: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileKeys {
    genderize: Option<String>,
    face: Option<String>,
    images: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    methods: Option<Vec<String>>,
    mode: Option<String>,
    ssa_dir: Option<PathBuf>,
    census_csv: Option<PathBuf>,
    dict_file: Option<PathBuf>,
    cache_file: Option<PathBuf>,
    fixtures_dir: Option<PathBuf>,
    country_column: Option<String>,
    min_country_instances: Option<usize>,
    dict_country: Option<DictCountry>,
    thumbnails: Option<usize>,
    rate_limit: Option<f64>,
    max_in_flight: Option<usize>,
    workers: Option<usize>,
    timeout_secs: Option<u64>,
    #[serde(default)]
    endpoints: FileEndpoints,
    #[serde(default)]
    keys: FileKeys,
}

impl FileConfig {
    fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let mut config: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.ssa_dir,
            &mut config.census_csv,
            &mut config.dict_file,
            &mut config.cache_file,
            &mut config.fixtures_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub methods: Vec<BackendId>,
    pub ssa_dir: Option<PathBuf>,
    pub census_csv: Option<PathBuf>,
    pub dict_file: Option<PathBuf>,
    pub cache_file: Option<PathBuf>,
    pub fixtures_dir: Option<PathBuf>,
    pub country_column: String,
    pub min_country_instances: usize,
    pub dict_use_country: bool,
    pub thumbnails_k: usize,
    pub workers: usize,
    pub client: ClientConfig,
}

pub fn is_web(m: BackendId) -> bool {
    matches!(
        m,
        BackendId::Genderize | BackendId::Face | BackendId::Mixed1 | BackendId::Mixed2
    )
}

impl RunConfig {
    /// Resolves the layered configuration. `env` looks up environment variables.
    pub fn resolve(flags: &GlobalFlags, env: impl Fn(&str) -> Option<String>) -> Result<RunConfig, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let usage = |msg: String| CliError::Usage(msg);

        let mode = match (flags.mode, &file.mode) {
            (Some(m), _) => m,
            (None, Some(s)) => s.parse().map_err(usage)?,
            (None, None) => ClientMode::default(),
        };
        let file_methods = file
            .methods
            .as_ref()
            .map(|names| {
                names
                    .iter()
                    .map(|n| n.parse::<BackendId>().map_err(|e| usage(format!("config: {e}"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;

        let mut client = ClientConfig {
            mode,
            ..ClientConfig::default()
        };
        let pick = |flag: &Option<String>, file: &Option<String>, default: &str| {
            flag.clone().or_else(|| file.clone()).unwrap_or_else(|| default.to_string())
        };
        client.endpoints.genderize = pick(&flags.endpoint_genderize, &file.endpoints.genderize, &client.endpoints.genderize);
        client.endpoints.face = pick(&flags.endpoint_face, &file.endpoints.face, &client.endpoints.face);
        client.endpoints.images = pick(&flags.endpoint_images, &file.endpoints.images, &client.endpoints.images);
        let key = |name: &str, file: &Option<String>| env(name).filter(|v| !v.is_empty()).or_else(|| file.clone());
        client.keys = ApiKeys {
            genderize: key(ENV_GENDERIZE_KEY, &file.keys.genderize),
            face: key(ENV_FACE_KEY, &file.keys.face),
            images: key(ENV_IMG_KEY, &file.keys.images),
        };
        if let Some(rate) = flags.rate_limit.or(file.rate_limit) {
            if !rate.is_finite() || rate < 0.0 {
                return Err(usage(format!("rate limit must be a non-negative number, got {rate}")));
            }
            client.rate_per_second = rate;
        }
        if let Some(n) = file.max_in_flight {
            client.max_in_flight = n.max(1);
        }
        if let Some(secs) = file.timeout_secs {
            client.timeout = Duration::from_secs(secs);
        }

        let config = RunConfig {
            methods: Vec::new(),
            ssa_dir: flags.ssa_dir.clone().or(file.ssa_dir),
            census_csv: flags.census_csv.clone().or(file.census_csv),
            dict_file: flags.dict_file.clone().or(file.dict_file),
            cache_file: flags.cache_file.clone().or(file.cache_file),
            fixtures_dir: flags.fixtures.clone().or(file.fixtures_dir),
            country_column: flags
                .country_column
                .clone()
                .or(file.country_column)
                .unwrap_or_else(|| "country".to_string()),
            min_country_instances: flags
                .min_country_instances
                .or(file.min_country_instances)
                .unwrap_or(DEFAULT_MIN_COUNTRY_INSTANCES),
            dict_use_country: flags.dict_country.or(file.dict_country) != Some(DictCountry::Without),
            thumbnails_k: flags.thumbnails.or(file.thumbnails).unwrap_or(MAX_THUMBNAILS),
            workers: flags.workers.or(file.workers).unwrap_or(4),
            client,
        };
        let methods = match flags.methods.clone().or(file_methods) {
            Some(m) => m,
            None => config.available_methods(),
        };
        config.with_methods(methods)
    }

    /// Methods whose inputs are configured, in table order.
    fn available_methods(&self) -> Vec<BackendId> {
        let web = self.cache_file.is_some()
            || self.fixtures_dir.is_some()
            || self.client.keys != ApiKeys::default();
        BackendId::ALL
            .into_iter()
            .filter(|&m| match m {
                BackendId::Ssa => self.ssa_dir.is_some(),
                BackendId::Census => self.census_csv.is_some(),
                BackendId::Dict => self.dict_file.is_some(),
                _ => web,
            })
            .collect()
    }

    fn with_methods(mut self, methods: Vec<BackendId>) -> Result<RunConfig, CliError> {
        let mut seen = Vec::new();
        for m in methods {
            if !seen.contains(&m) {
                seen.push(m);
            }
        }
        if seen.is_empty() {
            return Err(CliError::Usage(
                "no methods configured: pass --methods or give the data they need".into(),
            ));
        }
        for &m in &seen {
            let missing = match m {
                BackendId::Ssa if self.ssa_dir.is_none() => Some("--ssa-dir"),
                BackendId::Census if self.census_csv.is_none() => Some("--census-csv"),
                BackendId::Dict if self.dict_file.is_none() => Some("--dict-file"),
                _ => None,
            };
            if let Some(flag) = missing {
                return Err(CliError::Usage(format!("method {m} needs {flag}")));
            }
        }
        if self.client.mode == ClientMode::Replay
            && seen.iter().any(|&m| is_web(m))
            && self.cache_file.is_none()
            && self.fixtures_dir.is_none()
        {
            return Err(CliError::Usage(
                "replay mode needs --cache-file or --fixtures".into(),
            ));
        }
        if self.thumbnails_k > MAX_THUMBNAILS {
            return Err(CliError::Usage(format!(
                "--thumbnails must be at most {MAX_THUMBNAILS}"
            )));
        }
        if self.min_country_instances == 0 {
            return Err(CliError::Usage("--min-country-instances must be at least 1".into()));
        }
        self.workers = self.workers.max(1);
        self.methods = seen;
        Ok(self)
    }

    pub fn needs_web(&self) -> bool {
        self.methods.iter().any(|&m| is_web(m))
    }
}
