//! Hex escaping for byte strings that must survive text formats.
//!
//! Printable ASCII passes through unchanged except backslash; everything
//! else (including tab, the fingerprint field separator) becomes `\xNN`
//! with lowercase hex digits. The mapping is reversible.

use crate::error::{Error, Result};

/// Escape a byte string for text output.
pub fn escape_bytes(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    for &b in bytes {
        if (0x20..=0x7e).contains(&b) && b != b'\\' {
            out.push(b as char);
        } else {
            out.push_str(&format!("\\x{:02x}", b));
        }
    }
    out
}

/// Reverse [`escape_bytes`]. Fails on malformed escapes.
pub fn unescape_bytes(text: &str) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(text.len());
    let mut chars = text.bytes();
    while let Some(b) = chars.next() {
        if b != b'\\' {
            out.push(b);
            continue;
        }
        let (x, hi, lo) = (chars.next(), chars.next(), chars.next());
        match (x, hi, lo) {
            (Some(b'x'), Some(hi), Some(lo)) => {
                let hex = |d: u8| -> Result<u8> {
                    match d {
                        b'0'..=b'9' => Ok(d - b'0'),
                        b'a'..=b'f' => Ok(d - b'a' + 10),
                        b'A'..=b'F' => Ok(d - b'A' + 10),
                        _ => Err(Error::FingerprintFormat(format!(
                            "bad hex digit {:?} in escape",
                            d as char
                        ))),
                    }
                };
                out.push(hex(hi)? << 4 | hex(lo)?);
            }
            _ => {
                return Err(Error::FingerprintFormat(
                    "dangling or malformed \\x escape".into(),
                ))
            }
        }
    }
    Ok(out)
}
