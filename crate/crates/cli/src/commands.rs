use std::fs;
use std::path::Path;

use namegender_core::dataset::{load_dataset, DatasetError};
use namegender_core::namedb::{parse_census_csv, parse_dict_file, parse_ssa_dir, DbError};
use namegender_core::pipeline::{Backends, PipelineError};
use namegender_core::report::{
    countries_csv, country_table, method_table, methods_csv, parse_countries_csv, parse_methods_csv,
};
use namegender_core::webclients::{
    ClientError, ClientMode, FixtureStore, ResponseCache, WebClients, ENV_FACE_KEY, ENV_GENDERIZE_KEY,
    ENV_IMG_KEY,
};
use namegender_core::{BackendId, CoreError, CountryCode, PersonRecord};

use crate::config::{is_web, GlobalFlags, RunConfig};
use crate::CliError;

fn run_config(flags: &GlobalFlags) -> Result<RunConfig, CliError> {
    RunConfig::resolve(flags, |name| std::env::var(name).ok())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn from_db(e: DbError) -> CliError {
    runtime(e)
}

fn from_dataset(e: DatasetError) -> CliError {
    match e {
        DatasetError::MissingColumn { .. } => CliError::Usage(e.to_string()),
        e => runtime(e),
    }
}

fn is_usage(e: &PipelineError) -> bool {
    match e {
        PipelineError::NotConfigured(..) => true,
        PipelineError::Client(ClientError::Config(_)) => true,
        PipelineError::Core(CoreError::EmptyName) => true,
        PipelineError::Record { source, .. } => is_usage(source),
        _ => false,
    }
}

fn from_pipeline(e: PipelineError) -> CliError {
    if is_usage(&e) {
        CliError::Usage(e.to_string())
    } else {
        runtime(e)
    }
}

fn web_clients(config: &RunConfig) -> Result<WebClients, CliError> {
    let cache = config
        .cache_file
        .as_ref()
        .map(|p| ResponseCache::open(p).map_err(|e| runtime(format!("cache {}: {e}", p.display()))))
        .transpose()?;
    let fixtures = match (&config.fixtures_dir, config.client.mode) {
        (Some(dir), ClientMode::Replay) => Some(
            FixtureStore::open(dir).map_err(|e| runtime(format!("fixtures {}: {e}", dir.display())))?,
        ),
        (Some(_), _) => {
            log::warn!("fixtures are only consulted in replay mode");
            None
        }
        (None, _) => None,
    };
    WebClients::with_default_transport(config.client.clone(), cache, fixtures).map_err(|e| match e {
        ClientError::Config(m) => CliError::Usage(m),
        e => runtime(e),
    })
}

fn backends(config: &RunConfig) -> Result<Backends, CliError> {
    let wants = |m: BackendId| config.methods.contains(&m);
    let mut b = Backends::new();
    b.dict_use_country = config.dict_use_country;
    b.thumbnails_k = config.thumbnails_k;
    if wants(BackendId::Ssa) {
        b.ssa = config.ssa_dir.as_deref().map(parse_ssa_dir).transpose().map_err(from_db)?;
    }
    if wants(BackendId::Census) {
        b.census = config.census_csv.as_deref().map(parse_census_csv).transpose().map_err(from_db)?;
    }
    if wants(BackendId::Dict) {
        b.dict = config.dict_file.as_deref().map(parse_dict_file).transpose().map_err(from_db)?;
    }
    if config.needs_web() {
        b.web = Some(web_clients(config)?);
    }
    b.check(&config.methods).map_err(from_pipeline)?;
    Ok(b)
}

pub fn infer(flags: &GlobalFlags, name: &str, country: Option<&str>) -> Result<(), CliError> {
    if name.trim().is_empty() {
        return Err(CliError::Usage("name must not be empty".into()));
    }
    let country: Option<CountryCode> = country
        .map(|c| c.parse().map_err(|e: CoreError| CliError::Usage(e.to_string())))
        .transpose()?;
    let config = run_config(flags)?;
    let backends = backends(&config)?;
    let predictions = backends
        .predict(&config.methods, name, country)
        .map_err(from_pipeline)?;
    for (method, p) in config.methods.iter().zip(predictions) {
        println!("{method}\t{}\t{}", p.label().as_str(), p.score());
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

pub fn evaluate(flags: &GlobalFlags, dataset: &Path, out_dir: &Path) -> Result<(), CliError> {
    let config = run_config(flags)?;
    let records = load_dataset(dataset, &config.country_column).map_err(from_dataset)?;
    let backends = backends(&config)?;
    let run = backends
        .evaluate(&config.methods, records, config.workers)
        .map_err(from_pipeline)?;
    let metrics = run.method_metrics().map_err(runtime)?;
    let countries = run
        .country_report(config.min_country_instances)
        .map_err(runtime)?;

    fs::create_dir_all(out_dir).map_err(|e| runtime(format!("{}: {e}", out_dir.display())))?;
    let tables = format!("{}\n{}", method_table(&metrics), country_table(&countries));
    write(&out_dir.join("methods.csv"), &methods_csv(&metrics))?;
    write(&out_dir.join("countries.csv"), &countries_csv(&countries))?;
    write(&out_dir.join("report.txt"), &tables)?;
    print!("{tables}");
    println!("\nreports written to {}", out_dir.display());
    Ok(())
}

fn existing_cache(config: &RunConfig) -> Result<ResponseCache, CliError> {
    let path = config
        .cache_file
        .as_ref()
        .ok_or_else(|| CliError::Usage("no cache file given (--cache-file)".into()))?;
    if !path.is_file() {
        return Err(CliError::Usage(format!("cache file {} does not exist", path.display())));
    }
    ResponseCache::open(path).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

pub fn cache_stats(flags: &GlobalFlags) -> Result<(), CliError> {
    let config = run_config_for_cache(flags)?;
    let stats = existing_cache(&config)?.stats().map_err(runtime)?;
    for (backend, n) in &stats.per_backend {
        println!("{backend}\t{n}");
    }
    println!("records\t{}", stats.records);
    println!("superseded\t{}", stats.superseded);
    println!("corrupt\t{}", stats.corrupt);
    Ok(())
}

pub fn cache_prune(flags: &GlobalFlags) -> Result<(), CliError> {
    let config = run_config_for_cache(flags)?;
    let cache = existing_cache(&config)?;
    let dropped = cache.prune().map_err(runtime)?;
    println!("dropped {dropped} record(s), {} remain", cache.len());
    Ok(())
}

/// Cache maintenance needs no methods, only the cache path.
fn run_config_for_cache(flags: &GlobalFlags) -> Result<RunConfig, CliError> {
    let mut flags = flags.clone();
    if flags.methods.is_none() {
        flags.methods = Some(vec![BackendId::Genderize]);
    }
    flags.mode = Some(ClientMode::Cached);
    run_config(&flags)
}

pub fn cache_warm(flags: &GlobalFlags, dataset: &Path) -> Result<(), CliError> {
    let mut config = run_config(flags)?;
    config.methods.retain(|&m| is_web(m));
    if config.methods.is_empty() {
        return Err(CliError::Usage("cache warm needs at least one web method".into()));
    }
    if config.cache_file.is_none() {
        return Err(CliError::Usage("no cache file given (--cache-file)".into()));
    }
    let keys = &config.client.keys;
    let names = config.methods.iter().any(|&m| m != BackendId::Face);
    let images = config.methods.iter().any(|&m| m != BackendId::Genderize);
    for (needed, key, env) in [
        (names, &keys.genderize, ENV_GENDERIZE_KEY),
        (images, &keys.images, ENV_IMG_KEY),
        (images, &keys.face, ENV_FACE_KEY),
    ] {
        if needed && key.is_none() {
            return Err(CliError::Usage(format!("cache warm needs an API key in {env}")));
        }
    }
    config.client.mode = ClientMode::Cached;
    let records: Vec<PersonRecord> = load_dataset(dataset, &config.country_column).map_err(from_dataset)?;
    let backends = backends(&config)?;
    backends
        .evaluate(&config.methods, records, config.workers)
        .map_err(from_pipeline)?;
    let web = backends.web.as_ref().expect("web methods configured");
    println!(
        "{} network request(s); cache holds {} record(s)",
        web.network_requests(),
        web.cache().map_or(0, ResponseCache::len)
    );
    Ok(())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

pub fn report(flags: &GlobalFlags, dir: &Path) -> Result<(), CliError> {
    let min = flags
        .min_country_instances
        .unwrap_or(crate::config::DEFAULT_MIN_COUNTRY_INSTANCES);
    let metrics = parse_methods_csv(&read(&dir.join("methods.csv"))?)
        .map_err(|e| runtime(format!("methods.csv: {e}")))?;
    let countries = parse_countries_csv(&read(&dir.join("countries.csv"))?, min)
        .map_err(|e| runtime(format!("countries.csv: {e}")))?;
    print!("{}\n{}", method_table(&metrics), country_table(&countries));
    Ok(())
}
