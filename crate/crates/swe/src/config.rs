//! Flat `key = value` documents with `[section]` headers and `#` comments.
//!
//! The reader only tokenizes. Interpretation happens in [`crate::scenario`],
//! which pulls keys out of a [`Document`] with [`Document::take`] and
//! finally calls [`Document::finish`] to reject anything left over.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Error tied to a line of the source document (1-based), when there is one.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    /// Source line, if the error concerns a specific one.
    pub line: Option<usize>,
    /// What went wrong.
    pub message: String,
}

impl ConfigError {
    /// Error on `line`.
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    /// Error not tied to a line.
    pub fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// A value with the line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// Raw text after `=`, trimmed, comment stripped.
    pub value: String,
    /// 1-based line number.
    pub line: usize,
}

/// Parsed document: `section.key -> entry`. Keys before any header live in
/// the section `""`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    entries: BTreeMap<(String, String), Entry>,
    sections: BTreeMap<String, usize>,
    missing: Vec<String>,
}

impl Document {
    /// Tokenize `text`. Duplicate keys, malformed lines and duplicate
    /// sections are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut doc = Document::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = match raw.find('#') {
                Some(c) => &raw[..c],
                None => raw,
            }
            .trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(line, format!("unterminated section header `{body}`")))?
                    .trim();
                if name.is_empty() || !name.chars().all(is_name_char) {
                    return Err(ConfigError::at(line, format!("invalid section name `{name}`")));
                }
                if let Some(prev) = doc.sections.insert(name.to_string(), line) {
                    return Err(ConfigError::at(line, format!("section [{name}] already opened on line {prev}")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, found `{body}`")))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(is_name_char) {
                return Err(ConfigError::at(line, format!("invalid key `{key}`")));
            }
            let value = value.trim();
            if value.is_empty() {
                return Err(ConfigError::at(line, format!("empty value for `{key}`")));
            }
            let slot = (section.clone(), key.to_string());
            if let Some(prev) = doc.entries.get(&slot) {
                return Err(ConfigError::at(
                    line,
                    format!("duplicate key `{}` (first set on line {})", qualified(&section, key), prev.line),
                ));
            }
            doc.entries.insert(
                slot,
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(doc)
    }

    /// Whether a `[section]` header appeared.
    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    /// Remove and return an entry.
    pub fn take(&mut self, section: &str, key: &str) -> Option<Entry> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    /// Remove and parse an optional value.
    pub fn opt<T: FromValue>(&mut self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        match self.take(section, key) {
            None => Ok(None),
            Some(e) => T::from_value(&e.value)
                .map(Some)
                .map_err(|why| ConfigError::at(e.line, format!("`{}`: {why}", qualified(section, key)))),
        }
    }

    /// Remove and parse a value, falling back to `default`.
    pub fn or<T: FromValue>(&mut self, section: &str, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.opt(section, key)?.unwrap_or(default))
    }

    /// Remove and parse a required value. A missing key is remembered and
    /// reported together with the others by [`Document::finish`]; the
    /// returned `None` lets the caller carry on collecting.
    pub fn req<T: FromValue>(&mut self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        let v = self.opt(section, key)?;
        if v.is_none() {
            self.missing.push(qualified(section, key));
        }
        Ok(v)
    }

    /// Line of a value still in the document, for validation messages.
    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.entries.get(&(section.to_string(), key.to_string())).map(|e| e.line)
    }

    /// Fail on missing required keys, then on leftover (unknown) keys.
    pub fn finish(self) -> Result<(), ConfigError> {
        if !self.missing.is_empty() {
            return Err(ConfigError::general(format!(
                "missing required keys: {}",
                self.missing.join(", ")
            )));
        }
        if let Some(((section, key), e)) = self.entries.iter().min_by_key(|(_, e)| e.line) {
            return Err(ConfigError::at(e.line, format!("unknown key `{}`", qualified(section, key))));
        }
        Ok(())
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.'
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

/// Conversion from the raw value text.
pub trait FromValue: Sized {
    /// Parse, or explain why not.
    fn from_value(s: &str) -> Result<Self, String>;
}

impl FromValue for f64 {
    fn from_value(s: &str) -> Result<Self, String> {
        let v = f64::from_str(s).map_err(|_| format!("`{s}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    }
}

impl FromValue for usize {
    fn from_value(s: &str) -> Result<Self, String> {
        usize::from_str(s).map_err(|_| format!("`{s}` is not a non-negative integer"))
    }
}

impl FromValue for bool {
    fn from_value(s: &str) -> Result<Self, String> {
        match s {
            "true" | "yes" | "on" => Ok(true),
            "false" | "no" | "off" => Ok(false),
            _ => Err(format!("`{s}` is not a boolean")),
        }
    }
}

impl FromValue for String {
    fn from_value(s: &str) -> Result<Self, String> {
        Ok(s.to_string())
    }
}

impl FromValue for Vec<f64> {
    fn from_value(s: &str) -> Result<Self, String> {
        s.split(',').map(|p| f64::from_value(p.trim())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_and_lines() {
        let mut d = Document::parse("top = 1\n# note\n[grid]\nmx = 36 # cells\n\n[time]\nt_end = 2.5\n").unwrap();
        assert!(d.has_section("grid"));
        assert_eq!(d.line_of("grid", "mx"), Some(4));
        assert_eq!(d.req::<usize>("grid", "mx").unwrap(), Some(36));
        assert_eq!(d.opt::<f64>("time", "t_end").unwrap(), Some(2.5));
        assert_eq!(d.opt::<f64>("", "top").unwrap(), Some(1.0));
        d.finish().unwrap();
    }

    #[test]
    fn malformed_lines_are_located() {
        let e = Document::parse("[grid]\nmx 36\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = Document::parse("[grid\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = Document::parse("[a]\nx = 1\nx = 2\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = Document::parse("[a]\n[a]\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = Document::parse("[a]\nx =\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn bad_value_reports_its_line() {
        let mut d = Document::parse("[grid]\n\nmx = many\n").unwrap();
        let e = d.req::<usize>("grid", "mx").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().contains("grid.mx"), "{e}");
        let mut d = Document::parse("[t]\nx = inf\n").unwrap();
        assert!(d.opt::<f64>("t", "x").is_err());
    }

    #[test]
    fn missing_keys_are_listed_before_unknown_ones() {
        let mut d = Document::parse("[grid]\nbogus = 1\n").unwrap();
        d.req::<usize>("grid", "mx").unwrap();
        d.req::<usize>("grid", "my").unwrap();
        let e = d.finish().unwrap_err();
        assert_eq!(e.line, None);
        assert!(e.message.contains("grid.mx") && e.message.contains("grid.my"), "{e}");

        let d = Document::parse("[grid]\nbogus = 1\n").unwrap();
        let e = d.finish().unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("grid.bogus"));
    }

    #[test]
    fn lists_and_booleans() {
        let mut d = Document::parse("a = 0.5, 1 ,2\nb = yes\nc = maybe\n").unwrap();
        assert_eq!(d.opt::<Vec<f64>>("", "a").unwrap(), Some(vec![0.5, 1.0, 2.0]));
        assert_eq!(d.opt::<bool>("", "b").unwrap(), Some(true));
        assert!(d.opt::<bool>("", "c").is_err());
    }
}
