//! Runs the configured methods over people: single-name inference and batch
//! evaluation.

use std::cell::OnceCell;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::country::CountryCode;
use crate::eval::{EvalError, EvaluationRun};
use crate::fusion::{mixed1, mixed2, ImageEvidence};
use crate::namedb::{lookup_counts, lookup_dict, NameDatabase};
use crate::normalize::{extract_first_name, image_query};
use crate::types::{BackendId, CoreError, PersonRecord, Prediction};
use crate::webclients::{ClientError, WebClients, MAX_THUMBNAILS};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0} is not configured: {1}")]
    NotConfigured(BackendId, &'static str),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("record {index} ({name:?}): {source}")]
    Record {
        index: usize,
        name: String,
        #[source]
        source: Box<PipelineError>,
    },
}

/// Everything the methods need. Fields left `None` disable the methods that use them.
#[derive(Debug, Default)]
pub struct Backends {
    pub ssa: Option<NameDatabase>,
    pub census: Option<NameDatabase>,
    pub dict: Option<NameDatabase>,
    pub web: Option<WebClients>,
    /// Pass the person's country to the dictionary for disambiguation.
    pub dict_use_country: bool,
    pub thumbnails_k: usize,
}

impl Backends {
    pub fn new() -> Backends {
        Backends {
            dict_use_country: true,
            thumbnails_k: MAX_THUMBNAILS,
            ..Backends::default()
        }
    }

    /// Checks that every requested method has what it needs.
    pub fn check(&self, methods: &[BackendId]) -> Result<(), PipelineError> {
        for &m in methods {
            let ok = match m {
                BackendId::Ssa => self.ssa.is_some(),
                BackendId::Census => self.census.is_some(),
                BackendId::Dict => self.dict.is_some(),
                BackendId::Genderize | BackendId::Face | BackendId::Mixed1 | BackendId::Mixed2 => {
                    self.web.is_some()
                }
            };
            if !ok {
                let what = match m {
                    BackendId::Ssa => "no SSA directory given",
                    BackendId::Census => "no census CSV given",
                    BackendId::Dict => "no dictionary file given",
                    _ => "web clients unavailable",
                };
                return Err(PipelineError::NotConfigured(m, what));
            }
        }
        if self.thumbnails_k > MAX_THUMBNAILS {
            return Err(CoreError::ContractViolation(format!(
                "thumbnail count {} exceeds {MAX_THUMBNAILS}",
                self.thumbnails_k
            ))
            .into());
        }
        Ok(())
    }
}

fn loaded(db: &Option<NameDatabase>, m: BackendId) -> Result<&NameDatabase, PipelineError> {
    db.as_ref().ok_or(PipelineError::NotConfigured(m, "database not loaded"))
}

impl Backends {
    fn web(&self, method: BackendId) -> Result<&WebClients, PipelineError> {
        self.web
            .as_ref()
            .ok_or(PipelineError::NotConfigured(method, "web clients unavailable"))
    }

    /// Image-based prediction for a full name. Thumbnails the face API rejects
    /// count as images without a face.
    pub fn image_evidence(&self, full_name: &str) -> Result<ImageEvidence, PipelineError> {
        let web = self.web(BackendId::Face)?;
        let query = image_query(full_name)?;
        let thumbs = web.fetch_thumbnails(&query, self.thumbnails_k)?;
        let mut observations = Vec::new();
        for thumb in &thumbs {
            match web.detect_faces(&thumb.bytes, thumb.rank) {
                Ok(obs) => observations.extend(obs),
                Err(ClientError::Upstream { status, message, .. }) => {
                    log::warn!("{query}#{}: face API rejected image (HTTP {status}): {message}", thumb.rank);
                }
                Err(e) => return Err(e.into()),
            }
        }
        let retrieved = thumbs.iter().map(|t| usize::from(t.rank)).max().unwrap_or(0);
        Ok(ImageEvidence::from_observations(query, &observations, retrieved))
    }

    /// Predictions for each requested method, in the order given.
    ///
    /// The name API and the image pipeline are each consulted at most once;
    /// when only Mixed1 needs images, they are fetched only if the name API
    /// abstains.
    pub fn predict(
        &self,
        methods: &[BackendId],
        full_name: &str,
        country: Option<CountryCode>,
    ) -> Result<Vec<Prediction>, PipelineError> {
        let key = extract_first_name(full_name)?;
        let name_pred: OnceCell<Prediction> = OnceCell::new();
        let image_pred: OnceCell<Prediction> = OnceCell::new();

        let genderize = || -> Result<Prediction, PipelineError> {
            if let Some(p) = name_pred.get() {
                return Ok(*p);
            }
            let p = self.web(BackendId::Genderize)?.genderize_lookup(key.primary(), country)?;
            Ok(*name_pred.get_or_init(|| p))
        };
        let image = || -> Result<Prediction, PipelineError> {
            if let Some(p) = image_pred.get() {
                return Ok(*p);
            }
            let p = self.image_evidence(full_name)?.prediction();
            Ok(*image_pred.get_or_init(|| p))
        };

        methods
            .iter()
            .map(|&m| match m {
                BackendId::Ssa => Ok(lookup_counts(loaded(&self.ssa, m)?, &key)?),
                BackendId::Census => Ok(lookup_counts(loaded(&self.census, m)?, &key)?),
                BackendId::Dict => {
                    let c = if self.dict_use_country { country } else { None };
                    Ok(lookup_dict(loaded(&self.dict, m)?, &key, c)?)
                }
                BackendId::Genderize => genderize(),
                BackendId::Face => image(),
                BackendId::Mixed1 => mixed1(genderize()?, image),
                BackendId::Mixed2 => Ok(mixed2(genderize()?, image()?)),
            })
            .collect()
    }

    pub fn predict_record(
        &self,
        methods: &[BackendId],
        record: &PersonRecord,
    ) -> Result<Vec<Prediction>, PipelineError> {
        self.predict(methods, record.full_name(), record.country())
    }

    /// Runs every method over every record with up to `workers` threads.
    ///
    /// Results are ordered by record, so the run is deterministic whenever
    /// the upstream responses are. On failure the error for the lowest
    /// record index is returned.
    pub fn evaluate(
        &self,
        methods: &[BackendId],
        records: Vec<PersonRecord>,
        workers: usize,
    ) -> Result<EvaluationRun, PipelineError> {
        self.check(methods)?;
        let workers = workers.clamp(1, records.len().max(1));
        let next = AtomicUsize::new(0);
        let mut results: Vec<Option<Result<Vec<Prediction>, PipelineError>>> =
            (0..records.len()).map(|_| None).collect();

        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= records.len() {
                                break;
                            }
                            local.push((i, self.predict_record(methods, &records[i])));
                        }
                        local
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("worker panicked") {
                    results[i] = Some(r);
                }
            }
        });

        let mut per_method: Vec<Vec<Prediction>> = vec![Vec::with_capacity(records.len()); methods.len()];
        for (i, result) in results.into_iter().enumerate() {
            let preds = result.expect("every record processed").map_err(|e| PipelineError::Record {
                index: i + 1,
                name: records[i].full_name().to_string(),
                source: Box::new(e),
            })?;
            for (slot, p) in per_method.iter_mut().zip(preds) {
                slot.push(p);
            }
        }
        let mut run = EvaluationRun::new(records);
        for (&m, preds) in methods.iter().zip(per_method) {
            run.insert(m, preds)?;
        }
        Ok(run)
    }
}
