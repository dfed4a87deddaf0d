//! Structured text reports: one `key = value` pair per line, in insertion
//! order, with `#` comment lines. Keys use dots for nesting (`h.2.value`).

use std::fmt::{self, Display};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    title: Option<String>,
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: Some(title.into()),
            entries: Vec::new(),
        }
    }

    /// Appends a pair. Keys may not contain whitespace or `=`; values are
    /// kept on a single line.
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        let key = key.into();
        debug_assert!(!key.is_empty() && !key.contains(|c: char| c.is_whitespace() || c == '='));
        let value = value.to_string().replace('\n', " ");
        self.entries.push((key, value));
        self
    }

    pub fn extend(&mut self, prefix: &str, other: &Report) -> &mut Self {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}{k}"), v.clone()));
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn title(&self) -> Option<&str> {
        self.title.as_deref()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Report::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if r.title.is_none() && r.entries.is_empty() {
                    r.title = Some(c.trim().to_string());
                }
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno + 1, format!("expected `key = value`, got `{line}`")))?;
            let k = k.trim();
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(Error::parse(lineno + 1, format!("bad key `{k}`")));
            }
            r.entries.push((k.to_string(), v.trim().to_string()));
        }
        Ok(r)
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = &self.title {
            writeln!(f, "# {t}")?;
        }
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Fixed-precision float for reports, so output is stable across runs.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9}")
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new("certificate");
        r.push("n", 4).push("z", "1/2").push("h.2.value", num(24.864895));
        let text = r.to_string();
        let back = Report::parse(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.get_f64("h.2.value"), Some(24.864895));
        assert!(Report::parse("no equals sign").is_err());
    }

    #[test]
    fn nonfinite_numbers() {
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(num(1.5), "1.500000000");
    }
}
