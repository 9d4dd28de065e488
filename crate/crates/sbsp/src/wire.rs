//! Little-endian fixed-width payload encoding helpers.
//!
//! Algorithm messages are flat sequences of 64-bit fields behind a one-byte
//! tag. Fixed-width encoding keeps payload byte counts directly comparable
//! across algorithms.

pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(tag: u8) -> Writer {
        Writer { buf: vec![tag] }
    }

    pub fn u64(mut self, value: u64) -> Writer {
        self.buf.extend_from_slice(&value.to_le_bytes());
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    rest: &'a [u8],
}

#[derive(Debug)]
pub(crate) struct WireError;

impl std::fmt::Display for WireError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "malformed payload")
    }
}

impl<'a> Reader<'a> {
    /// Splits off the tag byte.
    pub fn new(payload: &'a [u8]) -> Result<(u8, Reader<'a>), WireError> {
        match payload.split_first() {
            Some((&tag, rest)) => Ok((tag, Reader { rest })),
            None => Err(WireError),
        }
    }

    pub fn u64(&mut self) -> Result<u64, WireError> {
        if self.rest.len() < 8 {
            return Err(WireError);
        }
        let (head, tail) = self.rest.split_at(8);
        self.rest = tail;
        Ok(u64::from_le_bytes(head.try_into().unwrap()))
    }

    /// Number of whole u64 fields remaining.
    pub fn remaining_u64s(&self) -> usize {
        self.rest.len() / 8
    }

    pub fn done(&self) -> Result<(), WireError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(WireError)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let payload = Writer::new(7).u64(42).u64(u64::MAX).finish();
        assert_eq!(payload.len(), 17);
        let (tag, mut r) = Reader::new(&payload).unwrap();
        assert_eq!(tag, 7);
        assert_eq!(r.u64().unwrap(), 42);
        assert_eq!(r.u64().unwrap(), u64::MAX);
        assert!(r.done().is_ok());
    }

    #[test]
    fn truncated_payload_fails() {
        let payload = Writer::new(1).u64(5).finish();
        let (_, mut r) = Reader::new(&payload[..5]).unwrap();
        assert!(r.u64().is_err());
        assert!(Reader::new(&[]).is_err());
    }
}
