//! Face-detection API response decoding.
//!
//! Expected body: `{"faces":[{"face_rectangle":{"top","left","width","height"},
//! "attributes":{"gender":{"value":"Male","confidence":97.5}}}]}`. Faces
//! without a gender attribute are skipped. A missing gender confidence is
//! read as 100, since some API versions only report the value.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceGender {
    Male,
    Female,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl BoundingBox {
    pub fn area(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceObservation {
    pub image_rank: u8,
    pub bounding_box: BoundingBox,
    pub gender: FaceGender,
    /// Percent, 0..=100.
    pub confidence: f64,
}

impl FaceObservation {
    pub fn new(
        image_rank: u8,
        bounding_box: BoundingBox,
        gender: FaceGender,
        confidence: f64,
    ) -> Result<FaceObservation, String> {
        if !(1..=5).contains(&image_rank) {
            return Err(format!("image rank {image_rank} outside 1..=5"));
        }
        if bounding_box.width == 0 || bounding_box.height == 0 {
            return Err("empty face rectangle".to_string());
        }
        if !(0.0..=100.0).contains(&confidence) {
            return Err(format!("confidence {confidence} outside [0, 100]"));
        }
        Ok(FaceObservation {
            image_rank,
            bounding_box,
            gender,
            confidence,
        })
    }

    /// `±confidence / 100`, positive for male.
    pub fn signed_score(&self) -> f64 {
        let magnitude = self.confidence / 100.0;
        match self.gender {
            FaceGender::Male => magnitude,
            FaceGender::Female => -magnitude,
        }
    }
}

#[derive(Deserialize)]
struct RawBody {
    #[serde(default)]
    faces: Vec<RawFace>,
}

#[derive(Deserialize)]
struct RawFace {
    face_rectangle: RawRect,
    #[serde(default)]
    attributes: Option<RawAttributes>,
}

#[derive(Deserialize)]
struct RawRect {
    top: u32,
    left: u32,
    width: u32,
    height: u32,
}

#[derive(Deserialize)]
struct RawAttributes {
    gender: Option<RawGender>,
}

#[derive(Deserialize)]
struct RawGender {
    value: String,
    confidence: Option<f64>,
}

pub fn decode_faces(body: &[u8], image_rank: u8) -> Result<Vec<FaceObservation>, String> {
    let raw: RawBody = serde_json::from_slice(body).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(raw.faces.len());
    for face in raw.faces {
        let Some(gender) = face.attributes.and_then(|a| a.gender) else {
            continue;
        };
        let g = match gender.value.to_ascii_lowercase().as_str() {
            "male" => FaceGender::Male,
            "female" => FaceGender::Female,
            other => return Err(format!("unexpected gender value {other:?}")),
        };
        let rect = face.face_rectangle;
        let bbox = BoundingBox {
            x: rect.left,
            y: rect.top,
            width: rect.width,
            height: rect.height,
        };
        out.push(FaceObservation::new(
            image_rank,
            bbox,
            g,
            gender.confidence.unwrap_or(100.0),
        )?);
    }
    Ok(out)
}

/// Human-readable message from an error body, if any.
pub fn error_message(body: &[u8]) -> String {
    serde_json::from_slice::<serde_json::Value>(body)
        .ok()
        .and_then(|v| v.get("error_message").and_then(|m| m.as_str()).map(str::to_string))
        .unwrap_or_else(|| String::from_utf8_lossy(&body[..body.len().min(200)]).into_owned())
}
