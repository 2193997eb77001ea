use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{Link, LinkKind, RequirementRecord, RequirementSet};
use crate::error::{Error, Result};

/// Lowercase, replace every non-letter with a space, collapse whitespace.
pub fn clean_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.chars().flat_map(char::to_lowercase) {
        if c.is_alphabetic() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn columns(&self) -> Vec<&str> {
        match self {
            OneOrMany::One(c) => vec![c.as_str()],
            OneOrMany::Many(cs) => cs.iter().map(String::as_str).collect(),
        }
    }
}

/// Column names of an issue-tracker export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssueSchema {
    pub id: String,
    /// One column, or several whose contents are joined (e.g. title and body).
    description: OneOrMany,
    #[serde(default)]
    pub depends_on: Option<String>,
    #[serde(default)]
    pub blocks: Option<String>,
    #[serde(default)]
    pub relates: Option<String>,
    /// Columns holding any other link type (duplicates, clones, ...).
    #[serde(default)]
    pub other: Vec<String>,
}

impl IssueSchema {
    pub fn new(id: impl Into<String>, description: &[&str]) -> Self {
        IssueSchema {
            id: id.into(),
            description: OneOrMany::Many(description.iter().map(|s| s.to_string()).collect()),
            depends_on: None,
            blocks: None,
            relates: None,
            other: Vec::new(),
        }
    }

    pub fn with_depends_on(mut self, column: impl Into<String>) -> Self {
        self.depends_on = Some(column.into());
        self
    }

    pub fn with_blocks(mut self, column: impl Into<String>) -> Self {
        self.blocks = Some(column.into());
        self
    }

    pub fn with_relates(mut self, column: impl Into<String>) -> Self {
        self.relates = Some(column.into());
        self
    }

    pub fn description_columns(&self) -> Vec<&str> {
        self.description.columns()
    }

    /// Bugzilla export defaults.
    pub fn bugzilla() -> Self {
        IssueSchema::new("ID", &["Title"])
            .with_depends_on("Depends_on")
            .with_blocks("Blocks")
    }
}

/// Result of ingesting an export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ingested {
    pub set: RequirementSet,
    /// Rows dropped because the description had no letters.
    pub skipped_empty_description: usize,
    /// Rows dropped because the id cell was empty.
    pub skipped_missing_id: usize,
}

/// Quote balance is not checked by the CSV reader, so find an unterminated
/// quoted field up front and report the line it starts on.
fn check_quotes(bytes: &[u8]) -> Result<()> {
    let mut line = 1u64;
    let mut open_line = 0u64;
    let mut in_quotes = false;
    for &b in bytes {
        match b {
            b'"' => {
                in_quotes = !in_quotes;
                if in_quotes {
                    open_line = line;
                }
            }
            b'\n' => line += 1,
            _ => {}
        }
    }
    if in_quotes {
        return Err(Error::Parse {
            line: open_line,
            message: "unterminated quoted field".into(),
        });
    }
    Ok(())
}

fn split_ids(cell: &str) -> impl Iterator<Item = &str> {
    cell.split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
}

/// Parse a UTF-8 CSV export with a header row into requirement records.
pub fn parse_issue_export<R: Read>(
    mut input: R,
    schema: &IssueSchema,
    source_label: &str,
) -> Result<Ingested> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })?;
    if std::str::from_utf8(&bytes).is_err() {
        return Err(Error::Parse {
            line: 0,
            message: "input is not valid UTF-8".into(),
        });
    }
    check_quotes(&bytes)?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes.as_slice());
    let header: HashMap<String, usize> = reader
        .headers()
        .map_err(parse_error)?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_string(), i))
        .collect();
    let column = |name: &str| -> Result<usize> {
        header.get(name).copied().ok_or_else(|| Error::Schema {
            module: "corpus",
            message: format!("mapped column `{name}` not found in header"),
        })
    };

    let id_col = column(&schema.id)?;
    let text_cols = schema
        .description_columns()
        .into_iter()
        .map(column)
        .collect::<Result<Vec<_>>>()?;
    let mut link_cols = Vec::new();
    for (name, kind) in [
        (&schema.depends_on, LinkKind::DependsOn),
        (&schema.blocks, LinkKind::Blocks),
        (&schema.relates, LinkKind::RelatesTo),
    ] {
        if let Some(name) = name {
            link_cols.push((column(name)?, kind));
        }
    }
    for name in &schema.other {
        link_cols.push((column(name)?, LinkKind::Other));
    }

    let mut records = Vec::new();
    let mut skipped_empty_description = 0;
    let mut skipped_missing_id = 0;
    for row in reader.records() {
        let row = row.map_err(parse_error)?;
        let id = row[id_col].trim();
        if id.is_empty() {
            skipped_missing_id += 1;
            continue;
        }
        let raw_text: Vec<&str> = text_cols.iter().map(|&c| &row[c]).collect();
        let text = clean_text(&raw_text.join(" "));
        if text.is_empty() {
            skipped_empty_description += 1;
            continue;
        }
        let links = link_cols
            .iter()
            .flat_map(|&(col, kind)| {
                split_ids(&row[col]).map(move |target| Link {
                    kind,
                    target: target.to_string(),
                })
            })
            .collect();
        records.push(RequirementRecord {
            id: id.to_string(),
            text,
            links,
        });
    }
    if skipped_empty_description > 0 {
        log::warn!("skipped {skipped_empty_description} rows with an empty description");
    }
    Ok(Ingested {
        set: RequirementSet::new(source_label, records)?,
        skipped_empty_description,
        skipped_missing_id,
    })
}

fn parse_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        line,
        message: err.to_string(),
    }
}
