//! Line-oriented reports.
//!
//! A report is a sequence of records. Each record has a kind and an ordered
//! list of fields. The `record` format writes `kind=<kind>` followed by one
//! `key=value` line per field, with a blank line between records; the `text`
//! format writes a heading and indented `key: value` lines. Values never
//! contain newlines: they are escaped as `\n`.

use std::fmt::{self, Display};
use std::str::FromStr;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Record,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "text" => Ok(Format::Text),
            "record" => Ok(Format::Record),
            _ => Err(Error::Parse(format!("unknown format `{s}` (expected text or record)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace('\n', "\\n")
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Record { kind: kind.to_string(), fields: Vec::new() }
    }

    pub fn field(mut self, key: &str, value: impl Display) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.fields.push((key.to_string(), escape(&value.to_string())));
    }

    /// `value` or `-` when absent.
    pub fn opt<T: Display>(self, key: &str, value: Option<T>) -> Self {
        match value {
            Some(v) => self.field(key, v),
            None => self.field(key, "-"),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Record => {
                out.push_str(&format!("kind={}\n", self.kind));
                for (k, v) in &self.fields {
                    out.push_str(&format!("{k}={v}\n"));
                }
            }
            Format::Text => {
                out.push_str(&format!("[{}]\n", self.kind));
                let width = self.fields.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                for (k, v) in &self.fields {
                    out.push_str(&format!("  {k:<width$}  {v}\n"));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn single(r: Record) -> Self {
        Report { records: vec![r] }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn render(&self, format: Format) -> String {
        self.records.iter().map(|r| r.render(format)).collect::<Vec<_>>().join("\n")
    }

    /// Parses the `record` format back into records.
    pub fn parse(src: &str) -> Result<Report, Error> {
        let mut records = Vec::new();
        for block in src.split("\n\n").filter(|b| !b.trim().is_empty()) {
            let mut lines = block.lines();
            let head = lines.next().unwrap_or_default();
            let kind = head
                .strip_prefix("kind=")
                .ok_or_else(|| Error::Parse(format!("record must start with kind=, got `{head}`")))?;
            let mut r = Record::new(kind);
            for line in lines {
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("malformed record line `{line}`")))?;
                r.fields.push((k.to_string(), v.to_string()));
            }
            records.push(r);
        }
        Ok(Report { records })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Text))
    }
}
