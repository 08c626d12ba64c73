//! Image-evidence aggregation and the two name+image combiners.

use serde::Serialize;

use crate::types::{BackendId, Prediction};
use crate::webclients::FaceObservation;

/// Per-thumbnail scores for one image query; `None` where no face was found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageEvidence {
    pub query: String,
    pub per_image: Vec<Option<f64>>,
}

impl ImageEvidence {
    /// Keeps the largest face of each image (first one on equal area).
    pub fn from_observations(
        query: impl Into<String>,
        observations: &[FaceObservation],
        images_retrieved: usize,
    ) -> ImageEvidence {
        let mut chosen: Vec<Option<&FaceObservation>> = vec![None; images_retrieved];
        for obs in observations {
            let rank = usize::from(obs.image_rank);
            if rank == 0 || rank > images_retrieved {
                log::warn!("face observation for image {rank} beyond {images_retrieved} retrieved; ignored");
                continue;
            }
            let slot = &mut chosen[rank - 1];
            if slot.is_none_or(|best| obs.bounding_box.area() > best.bounding_box.area()) {
                *slot = Some(obs);
            }
        }
        ImageEvidence {
            query: query.into(),
            per_image: chosen
                .into_iter()
                .map(|o| o.map(FaceObservation::signed_score))
                .collect(),
        }
    }

    /// Mean of the present per-image scores; abstains when no image has a face.
    pub fn prediction(&self) -> Prediction {
        let present: Vec<f64> = self.per_image.iter().flatten().copied().collect();
        if present.is_empty() {
            return Prediction::abstain(BackendId::Face);
        }
        let max_abs = present.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let mean = present.iter().sum::<f64>() / present.len() as f64;
        // summation rounding must not push the mean past its largest term
        let mean = mean.clamp(-max_abs, max_abs);
        Prediction::new(mean, BackendId::Face).expect("mean of unit scores is a unit score")
    }
}

pub fn aggregate_faces(observations: &[FaceObservation], images_retrieved: usize) -> Prediction {
    ImageEvidence::from_observations("", observations, images_retrieved).prediction()
}

/// Cascade: keep a deciding name prediction, otherwise ask the image side.
///
/// `image` is only invoked when the name backend abstains, so pictures are
/// never retrieved for names that already resolve.
pub fn mixed1<E>(
    name_pred: Prediction,
    image: impl FnOnce() -> Result<Prediction, E>,
) -> Result<Prediction, E> {
    debug_assert_eq!(name_pred.source(), BackendId::Genderize);
    if !name_pred.is_abstain() {
        return Ok(name_pred.relabel(BackendId::Mixed1));
    }
    Ok(image()?.relabel(BackendId::Mixed1))
}

/// Equal-weight mean of the two signed scores. An abstaining side contributes 0.
pub fn mixed2(name_pred: Prediction, image_pred: Prediction) -> Prediction {
    let score = (name_pred.score() + image_pred.score()) / 2.0;
    Prediction::new(score, BackendId::Mixed2).expect("mean of unit scores is a unit score")
}
