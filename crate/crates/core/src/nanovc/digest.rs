use std::fmt;
use std::str::FromStr;

use sha2::{Digest as _, Sha256};
use thiserror::Error;

/// SHA-256 content address. Rendered as 64 lowercase hex characters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest([u8; 32]);

/// A digest string failed to parse.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid digest `{given}`: expected 64 lowercase hex characters")]
pub struct InvalidDigest {
    pub given: String,
}

impl Digest {
    /// Hash raw bytes.
    pub fn of(bytes: &[u8]) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        Digest(hasher.finalize().into())
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Digest(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, InvalidDigest> {
        let bytes = hex::decode(s).map_err(|_| InvalidDigest {
            given: s.to_string(),
        })?;
        let arr: [u8; 32] = bytes.try_into().map_err(|_| InvalidDigest {
            given: s.to_string(),
        })?;
        // hex::decode accepts uppercase; the rendered form is lowercase only.
        if s.chars().any(|c| c.is_ascii_uppercase()) {
            return Err(InvalidDigest {
                given: s.to_string(),
            });
        }
        Ok(Digest(arr))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", &self.to_hex()[..12])
    }
}

impl FromStr for Digest {
    type Err = InvalidDigest;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Digest::from_hex(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let d = Digest::of(b"hello");
        let parsed = Digest::from_hex(&d.to_hex()).unwrap();
        assert_eq!(d, parsed);
    }

    #[test]
    fn rejects_uppercase_and_short() {
        assert!(Digest::from_hex("AB").is_err());
        let upper = Digest::of(b"x").to_hex().to_uppercase();
        assert!(Digest::from_hex(&upper).is_err());
    }
}
