//! Dense ARFF reading and writing.

use std::fmt::Write as _;

use lcwnb_core::Dataset;

use crate::error::{Error, Result};
use crate::raw::{Cell, Column, ColumnType, RawDataset};

#[derive(Debug, Clone, PartialEq)]
struct Token {
    text: String,
    quoted: bool,
}

/// Splits on commas outside quotes, trimming whitespace. A `%` outside
/// quotes starts a comment.
fn split_values(s: &str, line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let mut text = String::new();
        let mut quoted = false;
        match chars.peek().copied() {
            None | Some('%') => {
                if !out.is_empty() {
                    return Err(Error::parse(line, "trailing comma"));
                }
                return Ok(out);
            }
            Some(q @ ('\'' | '"')) => {
                chars.next();
                quoted = true;
                loop {
                    match chars.next() {
                        None => return Err(Error::parse(line, "unterminated quoted value")),
                        Some('\\') => match chars.next() {
                            Some(c) => text.push(c),
                            None => return Err(Error::parse(line, "unterminated quoted value")),
                        },
                        Some(c) if c == q => break,
                        Some(c) => text.push(c),
                    }
                }
                while chars.peek().is_some_and(|c| c.is_whitespace()) {
                    chars.next();
                }
            }
            Some(_) => {
                while let Some(&c) = chars.peek() {
                    if c == ',' || c == '%' {
                        break;
                    }
                    text.push(c);
                    chars.next();
                }
                text.truncate(text.trim_end().len());
            }
        }
        out.push(Token { text, quoted });
        match chars.next() {
            Some(',') => continue,
            None | Some('%') => return Ok(out),
            Some(c) => return Err(Error::parse(line, format!("unexpected `{c}` after value"))),
        }
    }
}

/// Reads a name that is either quoted or runs to the next whitespace.
/// Returns the name and the remainder of the line.
fn split_name(s: &str, line: usize) -> Result<(String, &str)> {
    let s = s.trim_start();
    match s.chars().next() {
        Some(q @ ('\'' | '"')) => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, c) in s.char_indices().skip(1) {
                if escaped {
                    name.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((name, &s[i + 1..]));
                } else {
                    name.push(c);
                }
            }
            Err(Error::parse(line, "unterminated quoted name"))
        }
        Some(_) => {
            let end = s.find(char::is_whitespace).unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
        None => Err(Error::parse(line, "missing name")),
    }
}

fn keyword(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    let rest = s.strip_prefix('@')?;
    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    Some((rest[..end].to_ascii_lowercase(), &rest[end..]))
}

fn parse_attribute(rest: &str, line: usize) -> Result<Column> {
    let (name, rest) = split_name(rest, line)?;
    let ty = rest.trim();
    if let Some(body) = ty.strip_prefix('{') {
        let body = body
            .trim_end()
            .strip_suffix('}')
            .ok_or_else(|| Error::parse(line, format!("attribute `{name}`: unclosed value list")))?;
        let values: Vec<String> = split_values(body, line)?.into_iter().map(|t| t.text).collect();
        if values.is_empty() {
            return Err(Error::parse(line, format!("attribute `{name}`: empty value list")));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::parse(line, format!("attribute `{name}`: duplicate value `{v}`")));
            }
        }
        return Ok(Column::nominal(name, values));
    }
    let word = ty.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
    match word.as_str() {
        "numeric" | "real" | "integer" => Ok(Column::numeric(name)),
        "string" | "date" | "relational" => Err(Error::parse(
            line,
            format!("attribute `{name}`: {word} attributes are not supported"),
        )),
        "" => Err(Error::parse(line, format!("attribute `{name}`: missing type"))),
        other => Err(Error::parse(line, format!("attribute `{name}`: unknown type `{other}`"))),
    }
}

fn parse_cell(token: &Token, column: &Column, line: usize) -> Result<Cell> {
    if !token.quoted && token.text == "?" {
        return Ok(Cell::Missing);
    }
    match &column.kind {
        ColumnType::Numeric => token.text.parse::<f64>().map(Cell::Numeric).map_err(|_| {
            Error::parse(line, format!("attribute `{}`: `{}` is not a number", column.name, token.text))
        }),
        ColumnType::Nominal(domain) => domain
            .iter()
            .position(|v| *v == token.text)
            .map(Cell::Nominal)
            .ok_or_else(|| {
                Error::parse(
                    line,
                    format!("attribute `{}`: undeclared value `{}`", column.name, token.text),
                )
            }),
    }
}

/// Parses dense ARFF text. The last attribute becomes the class; use
/// [`RawDataset::set_class`] to pick another.
pub fn parse_arff(text: &str) -> Result<RawDataset> {
    let mut relation = None;
    let mut columns: Vec<Column> = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;
    let mut last_line = 0;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if in_data {
            if trimmed.starts_with('{') {
                return Err(Error::parse(line, "sparse ARFF rows are not supported"));
            }
            let tokens = split_values(trimmed, line)?;
            if tokens.is_empty() {
                continue;
            }
            if tokens.len() != columns.len() {
                return Err(Error::parse(
                    line,
                    format!("expected {} values, found {}", columns.len(), tokens.len()),
                ));
            }
            let row = tokens
                .iter()
                .zip(&columns)
                .map(|(t, c)| parse_cell(t, c, line))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            continue;
        }
        let (kw, rest) =
            keyword(trimmed).ok_or_else(|| Error::parse(line, format!("expected a header declaration, found `{trimmed}`")))?;
        match kw.as_str() {
            "relation" => {
                if relation.is_some() {
                    return Err(Error::parse(line, "duplicate @relation"));
                }
                relation = Some(split_name(rest, line)?.0);
            }
            "attribute" => {
                if relation.is_none() {
                    return Err(Error::parse(line, "@attribute before @relation"));
                }
                let col = parse_attribute(rest, line)?;
                if columns.iter().any(|c| c.name == col.name) {
                    return Err(Error::parse(line, format!("duplicate attribute `{}`", col.name)));
                }
                columns.push(col);
            }
            "data" => {
                if columns.is_empty() {
                    return Err(Error::parse(line, "@data before any @attribute"));
                }
                in_data = true;
            }
            other => return Err(Error::parse(line, format!("unknown declaration `@{other}`"))),
        }
    }
    if !in_data {
        return Err(Error::parse(last_line.max(1), "missing @data section"));
    }
    let raw = RawDataset {
        relation: relation.unwrap_or_default(),
        class_index: columns.len() - 1,
        columns,
        rows,
    };
    raw.check_class()?;
    Ok(raw)
}

fn quote(s: &str) -> String {
    let plain = !s.is_empty()
        && s != "?"
        && !s.chars().any(|c| c.is_whitespace() || matches!(c, ',' | '\'' | '"' | '%' | '{' | '}' | '\\'));
    if plain {
        s.to_string()
    } else {
        let mut out = String::with_capacity(s.len() + 2);
        out.push('\'');
        for c in s.chars() {
            if c == '\'' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('\'');
        out
    }
}

/// Writes a categorical dataset with the class as the last attribute.
pub fn write_arff(dataset: &Dataset, relation: &str, class_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}\n", quote(relation));
    for attr in &dataset.attributes {
        let values: Vec<String> = attr.domain.iter().map(|v| quote(v)).collect();
        let _ = writeln!(out, "@attribute {} {{{}}}", quote(&attr.name), values.join(","));
    }
    let labels: Vec<String> = dataset.classes.labels.iter().map(|v| quote(v)).collect();
    let _ = writeln!(out, "@attribute {} {{{}}}\n\n@data", quote(class_name), labels.join(","));
    for inst in &dataset.instances {
        let mut cells: Vec<String> = inst
            .values
            .iter()
            .zip(&dataset.attributes)
            .map(|(&v, a)| quote(&a.domain[v]))
            .collect();
        cells.push(match inst.label {
            Some(y) => quote(&dataset.classes.labels[y]),
            None => "?".into(),
        });
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
