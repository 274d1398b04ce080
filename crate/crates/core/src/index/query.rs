//! Filtering, sorting and rendering of index records.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value as Json};

use super::{IndexDatabase, IndexError, IndexRecord};
use crate::metrics::{Value, CATALOGUE};
use crate::task::TaskType;

/// Grammar accepted by [`Filter::parse`], printed on usage errors.
pub const FILTER_GRAMMAR: &str = "\
filter  := clause ('&' clause)*
clause  := '!'? FIELD (OP VALUE)?
OP      := '=' | '==' | '!=' | '<' | '<=' | '>' | '>='
FIELD   := a metric name (num_nodes, average_degree, ...), num_tasks,
           passed, id, path, a task type name, or 'task'
VALUE   := a number, true/false, or a bare word

A clause without an operator tests a flag (passed, is_directed, or a task
type name). 'task=NodeClassification' keeps datasets with that task file.
Comparisons against an undefined metric never match.";

/// A column of an index record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Id,
    Path,
    Passed,
    /// Every task type, one column each, in canonical order.
    Tasks,
    NumTasks,
    Task(TaskType),
    Metric(&'static str),
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Id => "id",
            Field::Path => "path",
            Field::Passed => "passed",
            Field::Tasks => "tasks",
            Field::NumTasks => "num_tasks",
            Field::Task(t) => t.as_str(),
            Field::Metric(m) => m,
        }
    }

    /// The columns this field stands for.
    fn columns(self) -> Vec<Field> {
        match self {
            Field::Tasks => TaskType::ALL.into_iter().map(Field::Task).collect(),
            f => vec![f],
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Field {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, IndexError> {
        let fixed = [Field::Id, Field::Path, Field::Passed, Field::Tasks, Field::NumTasks];
        if let Some(f) = fixed.into_iter().find(|f| f.name() == s) {
            return Ok(f);
        }
        if let Ok(t) = s.parse::<TaskType>() {
            return Ok(Field::Task(t));
        }
        CATALOGUE
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(name, _)| Field::Metric(name))
            .ok_or_else(|| IndexError::UnknownField(s.to_string()))
    }
}

enum Cell {
    Text(String),
    Bool(bool),
    Count(usize),
    Metric(Value),
    Missing,
}

fn cell(r: &IndexRecord, field: Field) -> Cell {
    match field {
        Field::Id => Cell::Text(r.id.clone()),
        Field::Path => Cell::Text(r.path.clone()),
        Field::Passed => Cell::Bool(r.passed),
        Field::Tasks | Field::NumTasks => Cell::Count(r.tasks.len()),
        Field::Task(t) => Cell::Bool(r.has_task(t)),
        Field::Metric(name) => match r.metrics.as_ref().and_then(|m| m.get(name)) {
            Some(result) => Cell::Metric(result.value),
            None => Cell::Missing,
        },
    }
}

impl Cell {
    fn number(&self) -> Option<f64> {
        match self {
            Cell::Count(n) => Some(*n as f64),
            Cell::Bool(b) => Some(f64::from(u8::from(*b))),
            Cell::Metric(v) if !v.is_nan() => Some(v.as_f64()),
            _ => None,
        }
    }

    fn truthy(&self) -> bool {
        match self {
            Cell::Text(s) => !s.is_empty(),
            _ => self.number().is_some_and(|x| x != 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Op {
    fn holds(self, ord: Ordering) -> bool {
        match self {
            Op::Eq => ord == Ordering::Equal,
            Op::Ne => ord != Ordering::Equal,
            Op::Lt => ord == Ordering::Less,
            Op::Le => ord != Ordering::Greater,
            Op::Gt => ord == Ordering::Greater,
            Op::Ge => ord != Ordering::Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Test {
    Flag,
    HasTask(TaskType),
    Number(Op, f64),
    Text(Op, String),
}

#[derive(Debug, Clone, PartialEq)]
struct Clause {
    negate: bool,
    field: Field,
    test: Test,
}

impl Clause {
    fn matches(&self, r: &IndexRecord) -> bool {
        let c = cell(r, self.field);
        let hit = match &self.test {
            Test::Flag => c.truthy(),
            Test::HasTask(t) => r.has_task(*t),
            Test::Number(op, x) => c.number().and_then(|y| y.partial_cmp(x)).is_some_and(|o| op.holds(o)),
            Test::Text(op, s) => match c {
                Cell::Text(t) => op.holds(t.as_str().cmp(s.as_str())),
                _ => false,
            },
        };
        hit != self.negate
    }
}

/// A parsed filter expression: a conjunction of clauses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Filter {
    clauses: Vec<Clause>,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> IndexError {
        IndexError::FilterParse {
            offset,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, first: impl Fn(char) -> bool, rest: impl Fn(char) -> bool) -> Option<(usize, &str)> {
        let start = self.pos;
        let mut chars = self.text[start..].char_indices();
        match chars.next() {
            Some((_, c)) if first(c) => {}
            _ => return None,
        }
        let len = chars.find(|&(_, c)| !rest(c)).map_or(self.text.len() - start, |(i, _)| i);
        self.pos = start + len;
        Some((start, &self.text[start..start + len]))
    }

    fn op(&mut self) -> Option<(usize, Op)> {
        let at = self.pos;
        for (s, op) in [("<=", Op::Le), (">=", Op::Ge), ("!=", Op::Ne), ("==", Op::Eq), ("<", Op::Lt), (">", Op::Gt), ("=", Op::Eq)] {
            if self.eat(s) {
                return Some((at, op));
            }
        }
        None
    }
}

fn word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '+')
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

impl Filter {
    /// Parses a filter expression. An empty expression matches everything.
    pub fn parse(text: &str) -> Result<Filter, IndexError> {
        let mut lx = Lexer { text, pos: 0 };
        let mut clauses = Vec::new();
        lx.skip_ws();
        if lx.peek().is_none() {
            return Ok(Filter { clauses });
        }
        loop {
            lx.skip_ws();
            let negate_at = lx.pos;
            let negate = lx.peek() == Some('!') && !text[lx.pos..].starts_with("!=") && lx.eat("!");
            lx.skip_ws();
            let (name_at, name) = lx
                .take_while(|c| c.is_ascii_alphabetic() || c == '_', |c| c.is_ascii_alphanumeric() || c == '_')
                .map(|(at, s)| (at, s.to_string()))
                .ok_or_else(|| lx.error(lx.pos, "expected a field name"))?;
            lx.skip_ws();
            let op = lx.op();
            let value = match op {
                None => None,
                Some(_) => {
                    lx.skip_ws();
                    let v = lx
                        .take_while(word_char, word_char)
                        .map(|(at, s)| (at, s.to_string()))
                        .ok_or_else(|| lx.error(lx.pos, "expected a value"))?;
                    Some(v)
                }
            };
            clauses.push(Self::clause(&lx, negate, negate_at, (name_at, &name), op, value)?);
            lx.skip_ws();
            match lx.peek() {
                None => break,
                Some('&') => {
                    if !lx.eat("&&") {
                        lx.eat("&");
                    }
                }
                Some(_) => return Err(lx.error(lx.pos, "expected '&' or the end of the filter")),
            }
        }
        Ok(Filter { clauses })
    }

    fn clause(
        lx: &Lexer<'_>,
        negate: bool,
        negate_at: usize,
        (name_at, name): (usize, &str),
        op: Option<(usize, Op)>,
        value: Option<(usize, String)>,
    ) -> Result<Clause, IndexError> {
        if name == "task" {
            let (Some((op_at, op)), Some((value_at, value))) = (op, value) else {
                return Err(lx.error(name_at + name.len(), "'task' must be compared with '=' or '!=' to a task type"));
            };
            if !matches!(op, Op::Eq | Op::Ne) {
                return Err(lx.error(op_at, "'task' supports only '=' and '!='"));
            }
            let t: TaskType = value
                .parse()
                .map_err(|_| lx.error(value_at, format!("unknown task type {value:?}")))?;
            return Ok(Clause {
                negate: negate != (op == Op::Ne),
                field: Field::Task(t),
                test: Test::HasTask(t),
            });
        }
        let field: Field = name.parse()?;
        let Some(((op_at, op), (value_at, value))) = op.zip(value) else {
            return match field {
                Field::Passed | Field::Task(_) | Field::Metric(_) | Field::NumTasks => Ok(Clause {
                    negate,
                    field,
                    test: Test::Flag,
                }),
                _ => Err(lx.error(negate_at, format!("{name} is not a flag"))),
            };
        };
        let test = match field {
            Field::Tasks => return Err(lx.error(name_at, "use task=TYPE to test task membership")),
            Field::Id | Field::Path => {
                if !matches!(op, Op::Eq | Op::Ne) {
                    return Err(lx.error(op_at, format!("{name} supports only '=' and '!='")));
                }
                Test::Text(op, value)
            }
            Field::Passed | Field::Task(_) => {
                if !matches!(op, Op::Eq | Op::Ne) {
                    return Err(lx.error(op_at, format!("{name} supports only '=' and '!='")));
                }
                let b = parse_bool(&value).ok_or_else(|| lx.error(value_at, "expected true or false"))?;
                Test::Number(op, f64::from(u8::from(b)))
            }
            Field::NumTasks | Field::Metric(_) => {
                let x = value
                    .parse::<f64>()
                    .ok()
                    .or_else(|| parse_bool(&value).map(|b| f64::from(u8::from(b))))
                    .ok_or_else(|| lx.error(value_at, format!("expected a number, found {value:?}")))?;
                Test::Number(op, x)
            }
        };
        Ok(Clause { negate, field, test })
    }

    pub fn matches(&self, r: &IndexRecord) -> bool {
        self.clauses.iter().all(|c| c.matches(r))
    }
}

impl FromStr for Filter {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, IndexError> {
        Filter::parse(s)
    }
}

fn compare_cells(a: &Cell, b: &Cell) -> Ordering {
    match (a, b) {
        (Cell::Text(x), Cell::Text(y)) => x.cmp(y),
        _ => match (a.number(), b.number()) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        },
    }
}

fn is_missing(c: &Cell) -> bool {
    !matches!(c, Cell::Text(_)) && c.number().is_none()
}

/// Records matching `filter`, stably sorted by `sort_key` when given.
/// Undefined values sort last in either direction. The database is left
/// untouched.
pub fn query_index<'a>(
    db: &'a IndexDatabase,
    filter: Option<&str>,
    sort_key: Option<&str>,
    descending: bool,
) -> Result<Vec<&'a IndexRecord>, IndexError> {
    let filter = Filter::parse(filter.unwrap_or(""))?;
    let key: Option<Field> = sort_key.map(str::parse).transpose()?;
    let mut out: Vec<&IndexRecord> = db.records.iter().filter(|r| filter.matches(r)).collect();
    if let Some(key) = key {
        out.sort_by(|a, b| {
            let (x, y) = (cell(a, key), cell(b, key));
            match (is_missing(&x), is_missing(&y)) {
                (false, true) => Ordering::Less,
                (true, false) => Ordering::Greater,
                (true, true) => Ordering::Equal,
                (false, false) if descending => compare_cells(&y, &x),
                (false, false) => compare_cells(&x, &y),
            }
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Json,
    Csv,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "json" => Ok(TableFormat::Json),
            "csv" => Ok(TableFormat::Csv),
            other => Err(format!("unknown table format {other:?} (expected markdown, json or csv)")),
        }
    }
}

fn markdown_cell(field: Field, c: &Cell) -> String {
    match (field, c) {
        (Field::Task(_), Cell::Bool(true)) => "✓".into(),
        (Field::Task(_), Cell::Bool(false)) => String::new(),
        (_, Cell::Text(s)) => s.replace('|', "\\|"),
        (_, Cell::Bool(b)) => b.to_string(),
        (_, Cell::Count(n)) => n.to_string(),
        (_, Cell::Metric(v)) => v.to_string(),
        (_, Cell::Missing) => String::new(),
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Count(n) => n.to_string(),
        Cell::Metric(Value::Real(x)) => x.to_string(),
        Cell::Metric(v) => v.to_string(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(c: &Cell) -> Json {
    match c {
        Cell::Text(s) => Json::String(s.clone()),
        Cell::Bool(b) => Json::Bool(*b),
        Cell::Count(n) => Json::from(*n),
        Cell::Metric(v) => v.to_json(),
        Cell::Missing => Json::Null,
    }
}

/// Renders records as a table with one row per dataset. The dataset id is
/// always the first column; `tasks` expands to one column per task type.
/// Markdown marks supported tasks with a check. JSON and CSV keep every
/// value exactly: reals are written in shortest round-trip form and an
/// undefined metric is `null` in JSON and `NaN` in CSV.
pub fn render_table(records: &[&IndexRecord], fields: &[&str], format: TableFormat) -> Result<String, IndexError> {
    let mut columns = vec![Field::Id];
    for name in fields {
        for col in name.parse::<Field>()?.columns() {
            if !columns.contains(&col) {
                columns.push(col);
            }
        }
    }
    Ok(match format {
        TableFormat::Markdown => {
            let mut out = String::new();
            let row = |cells: Vec<String>| format!("| {} |\n", cells.join(" | "));
            out.push_str(&row(columns.iter().map(|c| c.name().to_string()).collect()));
            out.push_str(&format!("|{}\n", "---|".repeat(columns.len())));
            for r in records {
                out.push_str(&row(columns.iter().map(|&c| markdown_cell(c, &cell(r, c))).collect()));
            }
            out
        }
        TableFormat::Json => {
            let rows: Vec<Json> = records
                .iter()
                .map(|r| {
                    let obj: Map<String, Json> =
                        columns.iter().map(|&c| (c.name().to_string(), json_cell(&cell(r, c)))).collect();
                    Json::Object(obj)
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
            text.push('\n');
            text
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header = columns.iter().map(|c| c.name());
            w.write_record(header).map_err(|e| IndexError::Io(e.into()))?;
            for r in records {
                w.write_record(columns.iter().map(|&c| csv_cell(&cell(r, c))))
                    .map_err(|e| IndexError::Io(e.into()))?;
            }
            let bytes = w.into_inner().map_err(|e| IndexError::Io(e.into_error()))?;
            String::from_utf8(bytes).expect("CSV of UTF-8 cells is UTF-8")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn offset(text: &str) -> usize {
        match Filter::parse(text) {
            Err(IndexError::FilterParse { offset, .. }) => offset,
            other => panic!("expected a parse error for {text:?}, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_offsets() {
        assert_eq!(offset("num_nodes>>3"), 10);
        assert_eq!(offset("num_nodes>"), 10);
        assert_eq!(offset("num_nodes>3 &"), 13);
        assert_eq!(offset("num_nodes>3 x"), 12);
        assert_eq!(offset("task=Nope"), 5);
        assert_eq!(offset("num_nodes=abc"), 10);
        assert_eq!(offset("3>num_nodes"), 0);
    }

    #[test]
    fn unknown_fields() {
        assert!(matches!(Filter::parse("nonsuch>1"), Err(IndexError::UnknownField(f)) if f == "nonsuch"));
        assert!(matches!("nonsuch".parse::<Field>(), Err(IndexError::UnknownField(_))));
    }

    #[test]
    fn accepted_forms() {
        for text in ["", "  ", "passed", "!passed", "task=LinkPrediction", "num_nodes >= 3 & average_degree<2.5", "id=cora&&is_directed"] {
            Filter::parse(text).unwrap();
        }
    }
}
