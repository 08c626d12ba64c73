//! Domain types shared by every backend, the fusion layer and the evaluator.
//!
//! The signed score in `[-1, +1]` is the single confidence currency: positive
//! means male, negative means female and exactly zero means the backend
//! abstained. Each backend documents its own mapping into this scale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::country::CountryCode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("full name is empty")]
    EmptyName,
    #[error("unrecognized country code {0:?}")]
    UnknownCountry(String),
    #[error("unknown backend {0:?}")]
    UnknownBackend(String),
    #[error("unknown gender {0:?}")]
    UnknownGender(String),
}

/// Five-valued gender label.
///
/// `MostlyMale` and `MostlyFemale` only appear as raw dictionary codes; a
/// [`Prediction`] always carries `Male`, `Female` or `Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderLabel {
    Male,
    Female,
    MostlyMale,
    MostlyFemale,
    Unknown,
}

impl GenderLabel {
    /// Label implied by the sign of a score.
    pub fn from_score(score: f64) -> GenderLabel {
        if score > 0.0 {
            GenderLabel::Male
        } else if score < 0.0 {
            GenderLabel::Female
        } else {
            GenderLabel::Unknown
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GenderLabel::Male => "male",
            GenderLabel::Female => "female",
            GenderLabel::MostlyMale => "mostly_male",
            GenderLabel::MostlyFemale => "mostly_female",
            GenderLabel::Unknown => "unknown",
        }
    }
}

impl fmt::Display for GenderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ground-truth gender of a labeled person. Never unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrueGender {
    Male,
    Female,
}

impl TrueGender {
    pub fn label(self) -> GenderLabel {
        match self {
            TrueGender::Male => GenderLabel::Male,
            TrueGender::Female => GenderLabel::Female,
        }
    }
}

impl FromStr for TrueGender {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "M" | "m" => Ok(TrueGender::Male),
            "F" | "f" => Ok(TrueGender::Female),
            other => Err(CoreError::UnknownGender(other.to_string())),
        }
    }
}

/// Identifier of an inference method. Report columns follow declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BackendId {
    #[serde(rename = "SSA")]
    Ssa,
    Census,
    Dict,
    Genderize,
    Face,
    Mixed1,
    Mixed2,
}

impl BackendId {
    pub const ALL: [BackendId; 7] = [
        BackendId::Ssa,
        BackendId::Census,
        BackendId::Dict,
        BackendId::Genderize,
        BackendId::Face,
        BackendId::Mixed1,
        BackendId::Mixed2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BackendId::Ssa => "SSA",
            BackendId::Census => "Census",
            BackendId::Dict => "Dict",
            BackendId::Genderize => "Genderize",
            BackendId::Face => "Face",
            BackendId::Mixed1 => "Mixed1",
            BackendId::Mixed2 => "Mixed2",
        }
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ssa" => Ok(BackendId::Ssa),
            "census" | "ipums" => Ok(BackendId::Census),
            "dict" | "sexmachine" => Ok(BackendId::Dict),
            "genderize" => Ok(BackendId::Genderize),
            "face" | "face++" | "faceplusplus" => Ok(BackendId::Face),
            "mixed1" => Ok(BackendId::Mixed1),
            "mixed2" => Ok(BackendId::Mixed2),
            _ => Err(CoreError::UnknownBackend(s.to_string())),
        }
    }
}

/// A backend's verdict on one person.
///
/// The label is always derived from the sign of the score, so the two can
/// never disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    label: GenderLabel,
    score: f64,
    source: BackendId,
}

impl Prediction {
    /// Builds a prediction from a signed score. Negative zero is stored as zero.
    pub fn new(score: f64, source: BackendId) -> Result<Prediction, CoreError> {
        if !score.is_finite() || score.abs() > 1.0 {
            return Err(CoreError::ContractViolation(format!(
                "score {score} outside [-1, 1]"
            )));
        }
        let score = if score == 0.0 { 0.0 } else { score };
        Ok(Prediction {
            label: GenderLabel::from_score(score),
            score,
            source,
        })
    }

    pub fn abstain(source: BackendId) -> Prediction {
        Prediction {
            label: GenderLabel::Unknown,
            score: 0.0,
            source,
        }
    }

    /// Maps a probability of "male" onto the signed scale as `2p - 1`.
    pub fn from_probability(p_male: f64, source: BackendId) -> Result<Prediction, CoreError> {
        if !(0.0..=1.0).contains(&p_male) {
            return Err(CoreError::ContractViolation(format!(
                "probability {p_male} outside [0, 1]"
            )));
        }
        Prediction::new(2.0 * p_male - 1.0, source)
    }

    pub fn label(&self) -> GenderLabel {
        self.label
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn source(&self) -> BackendId {
        self.source
    }

    pub fn is_abstain(&self) -> bool {
        self.label == GenderLabel::Unknown
    }

    /// Probability of "male" recovered from the score.
    pub fn p_male(&self) -> f64 {
        (self.score + 1.0) / 2.0
    }

    pub fn relabel(self, source: BackendId) -> Prediction {
        Prediction { source, ..self }
    }

    pub fn negated(self) -> Prediction {
        Prediction::new(-self.score, self.source).expect("negation stays in range")
    }
}

impl<'de> Deserialize<'de> for Prediction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            score: f64,
            source: BackendId,
        }
        let raw = Raw::deserialize(deserializer)?;
        Prediction::new(raw.score, raw.source).map_err(serde::de::Error::custom)
    }
}

pub fn prediction_from_probability(
    p_male: f64,
    source: BackendId,
) -> Result<Prediction, CoreError> {
    Prediction::from_probability(p_male, source)
}

pub fn abstain(source: BackendId) -> Prediction {
    Prediction::abstain(source)
}

/// One labeled individual from a ground-truth dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonRecord {
    full_name: String,
    country: Option<CountryCode>,
    true_gender: TrueGender,
}

impl PersonRecord {
    pub fn new(
        full_name: impl Into<String>,
        country: Option<CountryCode>,
        true_gender: TrueGender,
    ) -> Result<PersonRecord, CoreError> {
        let full_name = full_name.into();
        if full_name.trim().is_empty() {
            return Err(CoreError::EmptyName);
        }
        Ok(PersonRecord {
            full_name,
            country,
            true_gender,
        })
    }

    pub fn full_name(&self) -> &str {
        &self.full_name
    }

    pub fn country(&self) -> Option<CountryCode> {
        self.country
    }

    pub fn true_gender(&self) -> TrueGender {
        self.true_gender
    }
}
