//! Turning raw full names into lookup keys.
//!
//! The first whitespace-delimited token is taken as the first name. It is
//! lowercased and compatibility-decomposed with combining marks removed, so
//! `"José"` and `"JOSE"` both become `"jose"`. Hyphenated first names are kept
//! whole as the primary key; their parts and the accented spelling become
//! ordered fallback variants.

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::types::CoreError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NameKey {
    primary: String,
    variants: Vec<String>,
}

impl NameKey {
    pub fn primary(&self) -> &str {
        &self.primary
    }

    pub fn variants(&self) -> &[String] {
        &self.variants
    }

    /// Primary first, then variants; lookups take the first hit.
    pub fn candidates(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.primary.as_str()).chain(self.variants.iter().map(String::as_str))
    }
}

fn trim_token(s: &str) -> &str {
    s.trim_matches(|c: char| !(c.is_alphanumeric() || is_combining_mark(c)))
}

fn fold_once(s: &str) -> String {
    let lowered = s.to_lowercase();
    let stripped: String = lowered
        .nfkd()
        .filter(|c| !is_combining_mark(*c) && !c.is_whitespace())
        .collect();
    stripped.to_lowercase()
}

/// Lowercase, compatibility-decompose and drop combining marks until stable.
fn fold(s: &str) -> String {
    let mut current = fold_once(s);
    for _ in 0..4 {
        let next = fold_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    // symbols such as U+1F150 are uppercase without a lowercase mapping
    current.nfc().filter(|c| !c.is_uppercase()).collect::<String>()
}

/// Folded and trimmed key for a single token, or `None` if nothing usable remains.
fn token_key(token: &str) -> Option<(String, String)> {
    let composed: String = token.nfc().collect();
    let trimmed = trim_token(&composed);
    if trimmed.is_empty() {
        return None;
    }
    let folded = fold(trimmed);
    let folded = trim_token(&folded).to_string();
    if folded.is_empty() {
        return None;
    }
    let unfolded: String = trimmed.to_lowercase().nfc().collect();
    Some((folded, unfolded))
}

pub fn extract_first_name(full_name: &str) -> Result<NameKey, CoreError> {
    let (primary, unfolded) = full_name
        .split_whitespace()
        .find_map(token_key)
        .ok_or(CoreError::EmptyName)?;

    let mut variants: Vec<String> = Vec::new();
    let push = |v: String, variants: &mut Vec<String>| {
        if !v.is_empty() && v != primary && !variants.contains(&v) {
            variants.push(v);
        }
    };
    if primary.contains('-') {
        for part in primary.split('-') {
            let part = trim_token(part);
            push(part.to_string(), &mut variants);
        }
    }
    if !unfolded.chars().any(char::is_whitespace) {
        push(unfolded, &mut variants);
    }
    Ok(NameKey { primary, variants })
}

/// Normalized database key for a name as it appears in a name list.
pub fn normalize_key(name: &str) -> Result<String, CoreError> {
    extract_first_name(name).map(|k| k.primary)
}

/// Whitespace-collapsed full name used as an image search query.
pub fn image_query(full_name: &str) -> Result<String, CoreError> {
    let query = full_name.split_whitespace().collect::<Vec<_>>().join(" ");
    if query.is_empty() {
        return Err(CoreError::EmptyName);
    }
    Ok(query)
}
