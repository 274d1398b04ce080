//! Recovery of the citation chain from a dataset README.
//!
//! The README is scanned for Markdown headings. BibTeX entries found under
//! `Original Source`, `Current Version` and `Previous Versions` fill the
//! dataset fields of the chain. Any other heading nested inside a
//! `Citation` (or `Citations`, `References`) section names a task, and the
//! entries under it become that task's blocks. Entries may sit in fenced
//! code blocks or directly in the text; one fence may hold several entries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationChain {
    /// Entry of the work that first created the dataset; several entries
    /// under the heading are joined by a blank line.
    pub original_source: String,
    pub current_version: String,
    pub previous_versions: Vec<String>,
    /// Entries per task heading, keyed by the heading text.
    pub task_bibs: BTreeMap<String, Vec<String>>,
    /// Problems met while scanning. Malformed entries are still kept verbatim.
    pub warnings: Vec<String>,
}

impl CitationChain {
    pub fn is_empty(&self) -> bool {
        self.original_source.is_empty()
            && self.current_version.is_empty()
            && self.previous_versions.is_empty()
            && self.task_bibs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Slot {
    Ignored,
    Original,
    Current,
    Previous,
    Task(String),
}

impl Slot {
    fn label(&self) -> String {
        match self {
            Slot::Ignored => String::new(),
            Slot::Original => "Original Source".into(),
            Slot::Current => "Current Version".into(),
            Slot::Previous => "Previous Versions".into(),
            Slot::Task(name) => name.clone(),
        }
    }
}

/// `(level, text)` of an ATX heading line.
fn heading(line: &str) -> Option<(usize, &str)> {
    let trimmed = line.trim_start();
    let level = trimmed.chars().take_while(|&c| c == '#').count();
    if level == 0 || level > 6 {
        return None;
    }
    let rest = &trimmed[level..];
    if !rest.is_empty() && !rest.starts_with([' ', '\t']) {
        return None;
    }
    Some((level, rest.trim().trim_end_matches('#').trim()))
}

fn is_fence(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with("```") || t.starts_with("~~~")
}

/// Net brace depth change of a line.
fn brace_delta(line: &str) -> i64 {
    line.chars()
        .map(|c| match c {
            '{' => 1,
            '}' => -1,
            _ => 0,
        })
        .sum()
}

/// Whether an entry looks like `@type{key, ...}` with balanced braces.
fn well_formed(entry: &str) -> bool {
    let Some(body) = entry.strip_prefix('@') else {
        return false;
    };
    let kind_len = body.chars().take_while(|c| c.is_ascii_alphanumeric()).count();
    if kind_len == 0 || !body[kind_len..].trim_start().starts_with('{') {
        return false;
    }
    let mut depth = 0i64;
    for c in body.chars() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0 && entry.trim_end().ends_with('}')
}

/// Splits the content of a fenced block into entries, each starting at a
/// line that begins with `@`. Text before the first entry is kept as one
/// (malformed) entry.
fn split_entries(block: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut current = String::new();
    for line in block.lines() {
        if line.trim_start().starts_with('@') && !current.trim().is_empty() {
            out.push(current.trim().to_string());
            current.clear();
        }
        current.push_str(line);
        current.push('\n');
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

struct Scanner {
    chain: CitationChain,
    /// Entries in document order, used when no original source is given.
    first_entry: Option<String>,
}

impl Scanner {
    fn add(&mut self, slot: &Slot, entry: String) {
        if *slot == Slot::Ignored {
            return;
        }
        if !well_formed(&entry) {
            let head = entry.lines().next().unwrap_or("");
            self.chain.warnings.push(format!("malformed BibTeX under {:?} kept verbatim: {head}", slot.label()));
        }
        self.first_entry.get_or_insert_with(|| entry.clone());
        let join = |field: &mut String, entry: String| {
            if !field.is_empty() {
                field.push_str("\n\n");
            }
            field.push_str(&entry);
        };
        match slot {
            Slot::Ignored => {}
            Slot::Original => join(&mut self.chain.original_source, entry),
            Slot::Current => join(&mut self.chain.current_version, entry),
            Slot::Previous => self.chain.previous_versions.push(entry),
            Slot::Task(name) => self.chain.task_bibs.entry(name.clone()).or_default().push(entry),
        }
    }
}

/// Extracts the citation chain of a README. Never fails: missing sections
/// leave fields empty and malformed entries are kept with a warning.
///
/// When entries exist but none sits under `Original Source`, the first
/// entry of the document is promoted to the original source and a warning
/// is recorded, so a chain with any entry always has an original source.
pub fn parse_citation(readme: &str) -> CitationChain {
    let mut scanner = Scanner {
        chain: CitationChain::default(),
        first_entry: None,
    };
    let mut slot = Slot::Ignored;
    let mut citation_level: Option<usize> = None;
    let mut fence: Option<String> = None;
    let mut bare: Option<(String, i64)> = None;

    for line in readme.lines() {
        if let Some(block) = fence.as_mut() {
            if is_fence(line) {
                for entry in split_entries(block) {
                    scanner.add(&slot, entry);
                }
                fence = None;
            } else {
                block.push_str(line);
                block.push('\n');
            }
            continue;
        }
        if let Some((text, depth)) = bare.as_mut() {
            let ends = line.trim().is_empty() || heading(line).is_some() || is_fence(line);
            if !ends {
                text.push('\n');
                text.push_str(line);
                *depth += brace_delta(line);
                if *depth <= 0 {
                    let (text, _) = bare.take().expect("bare entry in progress");
                    scanner.add(&slot, text.trim().to_string());
                }
                continue;
            }
            let (text, _) = bare.take().expect("bare entry in progress");
            scanner.add(&slot, text.trim().to_string());
        }
        if is_fence(line) {
            fence = Some(String::new());
            continue;
        }
        if let Some((level, text)) = heading(line) {
            if citation_level.is_some_and(|c| level <= c) {
                citation_level = None;
            }
            let key = text.trim_end_matches(':').trim().to_ascii_lowercase();
            slot = match key.as_str() {
                "original source" => Slot::Original,
                "current version" => Slot::Current,
                "previous versions" | "previous version" => Slot::Previous,
                "citation" | "citations" | "reference" | "references" => {
                    citation_level = Some(level);
                    Slot::Ignored
                }
                _ if citation_level.is_some() => {
                    let name = text.trim_end_matches(':').trim();
                    let name = name.strip_prefix("Task:").map_or(name, str::trim);
                    Slot::Task(name.to_string())
                }
                _ => Slot::Ignored,
            };
            continue;
        }
        if line.trim_start().starts_with('@') {
            let depth = brace_delta(line);
            if depth <= 0 && line.contains('{') {
                scanner.add(&slot, line.trim().to_string());
            } else {
                bare = Some((line.to_string(), depth));
            }
        }
    }
    if let Some(block) = fence {
        scanner.chain.warnings.push("unterminated code fence".into());
        for entry in split_entries(&block) {
            scanner.add(&slot, entry);
        }
    }
    if let Some((text, _)) = bare {
        scanner.add(&slot, text.trim().to_string());
    }

    let mut chain = scanner.chain;
    if chain.original_source.is_empty() {
        if let Some(first) = scanner.first_entry {
            chain.warnings.push("no Original Source entry; the first entry found is used".into());
            chain.original_source = first;
        }
    }
    chain
}
