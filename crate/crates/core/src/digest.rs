use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// First 8 hex digits of the SHA-256 of `data`.
pub(crate) fn short_hash(data: &[u8]) -> String {
    hex(&Sha256::digest(data)[..4])
}

/// First 16 hex digits of the SHA-256 of `data`.
pub(crate) fn content_hash(data: &[u8]) -> String {
    hex(&Sha256::digest(data)[..8])
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(short_hash(b"abc"), "ba7816bf");
        assert_eq!(content_hash(b"abc"), "ba7816bf8f01cfea");
    }
}
