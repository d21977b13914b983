//! Track labels and ISRC identifiers.

use alloc::string::{String, ToString};
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two mutually exclusive track classes.
///
/// A Song contains one or more singing voices (lyrics or onomatopoeia); an
/// Instrumental contains no sound derived from the human voice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Song,
    Instrumental,
}

impl Label {
    /// Parse case-insensitively from manifest text.
    pub fn parse(s: &str) -> Option<Label> {
        if s.eq_ignore_ascii_case("song") {
            Some(Label::Song)
        } else if s.eq_ignore_ascii_case("instrumental") {
            Some(Label::Instrumental)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Song => "Song",
            Label::Instrumental => "Instrumental",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Song => Label::Instrumental,
            Label::Instrumental => Label::Song,
        }
    }

    /// Index used for confusion matrices and per-class arrays: Song = 0,
    /// Instrumental = 1.
    pub fn index(self) -> usize {
        match self {
            Label::Song => 0,
            Label::Instrumental => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// International Standard Recording Code: the 12-character identifier keying
/// every corpus record.
///
/// Layout: 2 country letters, 3 alphanumeric registrant characters, 2 digits
/// of year, 5 digits of designation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Isrc(String);

impl Isrc {
    pub fn new(code: &str) -> Result<Isrc> {
        let bytes = code.as_bytes();
        let ok = bytes.len() == 12
            && bytes[..2].iter().all(u8::is_ascii_uppercase)
            && bytes[2..5]
                .iter()
                .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
            && bytes[5..].iter().all(u8::is_ascii_digit);
        if ok {
            Ok(Isrc(code.to_string()))
        } else {
            Err(Error::InvalidIsrc(code.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Isrc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Isrc {
    type Error = Error;
    fn try_from(s: String) -> Result<Isrc> {
        Isrc::new(&s)
    }
}

impl From<Isrc> for String {
    fn from(isrc: Isrc) -> String {
        isrc.0
    }
}
