//! Stable digests of resolved configuration values.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the compact JSON rendering of `value`.
///
/// Struct fields serialize in declaration order, so the digest is stable for a
/// given configuration type.
pub fn config_digest<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("configuration values serialize to JSON");
    hex::encode(Sha256::digest(&json))
}
