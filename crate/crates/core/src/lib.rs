//! Gender inference from names and web-retrieved face images.
//!
//! Offline backends read public name lists ([`namedb`]), online backends talk
//! to a genderize-style name API and a face-detection API ([`webclients`]),
//! and [`fusion`] combines name and image evidence. [`eval`] scores every
//! method per class and per country.

pub mod country;
pub mod dataset;
pub mod eval;
pub mod fusion;
pub mod namedb;
pub mod normalize;
pub mod pipeline;
pub mod report;
pub mod types;
pub mod webclients;

pub use country::CountryCode;
pub use normalize::{extract_first_name, image_query, NameKey};
pub use types::{
    abstain, prediction_from_probability, BackendId, CoreError, GenderLabel, PersonRecord,
    Prediction, TrueGender,
};
