use md5::{Digest, Md5};

use crate::error::{Error, Result};

pub fn md5_hex(bytes: &[u8]) -> String {
    let digest = Md5::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// True iff the MD5 of `bytes` equals `expected_md5` (32 lowercase hex chars).
pub fn verify_checksum(bytes: &[u8], expected_md5: &str) -> Result<bool> {
    let well_formed = expected_md5.len() == 32
        && expected_md5
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
    if !well_formed {
        return Err(Error::InvalidInput(format!(
            "malformed MD5 digest {expected_md5:?}"
        )));
    }
    Ok(md5_hex(bytes) == expected_md5)
}

/// Reads the digest from a `<batch>.md5` sidecar. Accepts both a bare digest
/// and `md5sum` output (`<digest>  <file>`).
pub fn parse_sidecar(contents: &str) -> Result<String> {
    contents
        .split_whitespace()
        .next()
        .map(str::to_owned)
        .ok_or_else(|| Error::InvalidInput("empty checksum sidecar".into()))
}
