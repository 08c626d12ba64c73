//! Image search listing decoding (custom-search JSON shape).

use serde::Deserialize;

#[derive(Deserialize)]
struct Listing {
    #[serde(default)]
    items: Vec<Item>,
}

#[derive(Deserialize)]
struct Item {
    link: Option<String>,
    image: Option<ImageInfo>,
}

#[derive(Deserialize)]
struct ImageInfo {
    #[serde(rename = "thumbnailLink")]
    thumbnail_link: Option<String>,
}

/// Thumbnail URLs in rank order; falls back to the full image link.
pub fn decode_listing(body: &[u8]) -> Result<Vec<String>, String> {
    let listing: Listing = serde_json::from_slice(body).map_err(|e| e.to_string())?;
    Ok(listing
        .items
        .into_iter()
        .filter_map(|item| item.image.and_then(|i| i.thumbnail_link).or(item.link))
        .collect())
}
