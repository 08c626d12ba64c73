//! Genderize-style name API: request shape and response decoding.

use serde::{Deserialize, Serialize};

use crate::country::CountryCode;
use crate::types::{BackendId, Prediction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderizeResponse {
    #[serde(default)]
    pub name: String,
    pub gender: Option<String>,
    #[serde(default)]
    pub probability: Option<f64>,
    #[serde(default)]
    pub count: Option<u64>,
}

/// Cache key for a name lookup, e.g. `name=andrea&country_id=IT`.
pub fn canonical_query(first_name: &str, country: Option<CountryCode>) -> String {
    match country {
        Some(c) => format!("name={first_name}&country_id={c}"),
        None => format!("name={first_name}"),
    }
}

impl GenderizeResponse {
    pub fn decode(body: &[u8]) -> Result<GenderizeResponse, String> {
        serde_json::from_slice(body).map_err(|e| e.to_string())
    }

    /// `score = ±(2p - 1)`, signed by the reported gender; null gender abstains.
    ///
    /// The upstream reports `p` toward the reported gender, so it is never
    /// below 0.5 for a non-null answer.
    pub fn to_prediction(&self) -> Result<Prediction, String> {
        let sign = match self.gender.as_deref() {
            None => return Ok(Prediction::abstain(BackendId::Genderize)),
            Some("male") => 1.0,
            Some("female") => -1.0,
            Some(other) => return Err(format!("unexpected gender {other:?}")),
        };
        let p = self
            .probability
            .ok_or_else(|| "gender without probability".to_string())?;
        if !(0.5..=1.0).contains(&p) {
            return Err(format!("probability {p} outside [0.5, 1]"));
        }
        Prediction::new(sign * (2.0 * p - 1.0), BackendId::Genderize).map_err(|e| e.to_string())
    }
}
