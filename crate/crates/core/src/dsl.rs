//! Line-oriented section syntax shared by every data file format.
//!
//! ```text
//! # comment lines attach to the next section
//! [kind arg1 arg2] optional inline payload   # trailing comment
//! key = value
//! ```
//!
//! An inline payload is either `key = value` or a bare value.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::fgab::Entry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into(), expected: Vec::new() }
    }

    pub fn expecting(pos: Pos, message: impl Into<String>, expected: &[&str]) -> Self {
        ParseError { pos, message: message.into(), expected: expected.iter().map(|s| s.to_string()).collect() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyValue {
    pub key: Token,
    pub value: Token,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Pair(KeyValue),
    Bare(Token),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub kind: Token,
    pub args: Vec<Token>,
    pub payload: Option<Payload>,
    pub entries: Vec<KeyValue>,
    /// Comment text (without `#`) preceding the header or trailing any of its lines.
    pub comments: Vec<String>,
}

impl Section {
    pub fn pos(&self) -> Pos {
        self.kind.pos
    }

    /// Looks a key up among the inline pair and the body entries.
    pub fn get(&self, key: &str) -> Option<&Token> {
        if let Some(Payload::Pair(kv)) = &self.payload {
            if kv.key.text == key {
                return Some(&kv.value);
            }
        }
        self.entries.iter().find(|kv| kv.key.text == key).map(|kv| &kv.value)
    }

    pub fn require(&self, key: &str) -> Result<&Token, ParseError> {
        self.get(key).ok_or_else(|| {
            ParseError::expecting(self.pos(), format!("section [{}] is missing `{key}`", self.kind.text), &[key])
        })
    }

    pub fn bare(&self) -> Option<&Token> {
        match &self.payload {
            Some(Payload::Bare(t)) => Some(t),
            _ => None,
        }
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ParseError> {
        let inline = match &self.payload {
            Some(Payload::Pair(kv)) => Some(kv),
            _ => None,
        };
        for kv in inline.into_iter().chain(&self.entries) {
            if !allowed.contains(&kv.key.text.as_str()) {
                return Err(ParseError::expecting(
                    kv.key.pos,
                    format!("unknown key `{}` in [{}]", kv.key.text, self.kind.text),
                    allowed,
                ));
            }
        }
        Ok(())
    }

    pub fn arity(&self, n: usize, shape: &str) -> Result<(), ParseError> {
        if self.args.len() != n {
            return Err(ParseError::expecting(
                self.pos(),
                format!("[{}] takes {n} argument(s), found {}", self.kind.text, self.args.len()),
                &[shape],
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub sections: Vec<Section>,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\'' | '(' | ')' | ',' | '+' | '^')
}

/// Splits `text` at the first `#`, returning (content, comment).
fn split_comment(text: &str) -> (&str, Option<&str>) {
    match text.find('#') {
        Some(i) => (&text[..i], Some(text[i + 1..].trim())),
        None => (text, None),
    }
}

fn token(text: &str, line: usize, col0: usize) -> Token {
    Token { text: text.to_string(), pos: Pos { line, col: col0 + 1 } }
}

/// Column (0-based, in chars) of byte offset `off` within `line`.
fn char_col(line: &str, off: usize) -> usize {
    line[..off].chars().count()
}

fn parse_pair(line: &str, start: usize, lineno: usize) -> Result<Option<KeyValue>, ParseError> {
    let body = &line[start..];
    let Some(eq) = body.find('=') else { return Ok(None) };
    let key = body[..eq].trim();
    if key.is_empty() || !key.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Ok(None);
    }
    let key_off = start + body.find(key).unwrap_or(0);
    let raw_value = &body[eq + 1..];
    let value = raw_value.trim();
    let value_off = start + eq + 1 + (raw_value.len() - raw_value.trim_start().len());
    if value.is_empty() {
        return Err(ParseError::expecting(
            Pos { line: lineno, col: char_col(line, start + eq) + 2 },
            format!("missing value for `{key}`"),
            &["value"],
        ));
    }
    Ok(Some(KeyValue {
        key: token(key, lineno, char_col(line, key_off)),
        value: token(value, lineno, char_col(line, value_off)),
    }))
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    let mut pending_comments: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let (content, comment) = split_comment(raw);
        let trimmed = content.trim();
        if trimmed.is_empty() {
            if let Some(c) = comment {
                pending_comments.push(c.to_string());
            } else {
                pending_comments.clear();
            }
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') {
            let close = content.find(']').ok_or_else(|| {
                ParseError::expecting(
                    Pos { line: lineno, col: char_col(content, content.len()) + 1 },
                    "unterminated section header",
                    &["]"],
                )
            })?;
            let inner = &content[indent + 1..close];
            let mut words = Vec::new();
            let mut off = indent + 1;
            for w in inner.split(' ') {
                if !w.is_empty() {
                    if let Some(bad) = w.chars().find(|&c| !is_ident_char(c)) {
                        return Err(ParseError::new(
                            Pos { line: lineno, col: char_col(content, off) + 1 },
                            format!("unexpected character `{bad}` in section header"),
                        ));
                    }
                    words.push(token(w, lineno, char_col(content, off)));
                }
                off += w.len() + 1;
            }
            if words.is_empty() {
                return Err(ParseError::expecting(
                    Pos { line: lineno, col: char_col(content, indent) + 2 },
                    "empty section header",
                    &["section name"],
                ));
            }
            let rest_start = close + 1;
            let rest = content[rest_start..].trim();
            let payload = if rest.is_empty() {
                None
            } else if let Some(kv) = parse_pair(content, rest_start, lineno)? {
                Some(Payload::Pair(kv))
            } else {
                let off = rest_start + content[rest_start..].find(rest).unwrap_or(0);
                Some(Payload::Bare(token(rest, lineno, char_col(content, off))))
            };
            let mut comments = std::mem::take(&mut pending_comments);
            comments.extend(comment.map(str::to_string));
            let kind = words.remove(0);
            doc.sections.push(Section { kind, args: words, payload, entries: Vec::new(), comments });
        } else {
            let Some(section) = doc.sections.last_mut() else {
                return Err(ParseError::expecting(
                    Pos { line: lineno, col: indent + 1 },
                    "content before the first section header",
                    &["["],
                ));
            };
            let kv = parse_pair(content, 0, lineno)?.ok_or_else(|| {
                ParseError::expecting(Pos { line: lineno, col: char_col(content, indent) + 1 }, "expected `key = value`", &["key = value", "["])
            })?;
            section.comments.append(&mut pending_comments);
            section.comments.extend(comment.map(str::to_string));
            section.entries.push(kv);
        }
    }
    Ok(doc)
}

/// Parses `[[1,2],[*,0]]`.
pub fn parse_matrix(tok: &Token) -> Result<Vec<Vec<Entry>>, ParseError> {
    let s: Vec<char> = tok.text.chars().collect();
    let at = |i: usize| Pos { line: tok.pos.line, col: tok.pos.col + i };
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < s.len() && s[*i].is_whitespace() {
            *i += 1;
        }
    };
    let expect = |i: &mut usize, c: char| -> Result<(), ParseError> {
        skip_ws(i);
        if *i < s.len() && s[*i] == c {
            *i += 1;
            Ok(())
        } else {
            Err(ParseError::expecting(at(*i), "malformed matrix", &[&c.to_string()]))
        }
    };
    expect(&mut i, '[')?;
    let mut rows = Vec::new();
    skip_ws(&mut i);
    if i < s.len() && s[i] == ']' {
        i += 1;
    } else {
        loop {
            expect(&mut i, '[')?;
            let mut row = Vec::new();
            skip_ws(&mut i);
            if i < s.len() && s[i] == ']' {
                i += 1;
            } else {
                loop {
                    skip_ws(&mut i);
                    let start = i;
                    if i < s.len() && s[i] == '*' {
                        i += 1;
                        row.push(Entry::Undetermined);
                    } else {
                        if i < s.len() && s[i] == '-' {
                            i += 1;
                        }
                        while i < s.len() && s[i].is_ascii_digit() {
                            i += 1;
                        }
                        let num: String = s[start..i].iter().collect();
                        let n = BigInt::from_str(&num)
                            .map_err(|_| ParseError::expecting(at(start), "expected a matrix entry", &["integer", "*"]))?;
                        row.push(Entry::Fixed(n));
                    }
                    skip_ws(&mut i);
                    match s.get(i) {
                        Some(',') => i += 1,
                        Some(']') => {
                            i += 1;
                            break;
                        }
                        _ => return Err(ParseError::expecting(at(i), "malformed matrix row", &[",", "]"])),
                    }
                }
            }
            rows.push(row);
            skip_ws(&mut i);
            match s.get(i) {
                Some(',') => i += 1,
                Some(']') => {
                    i += 1;
                    break;
                }
                _ => return Err(ParseError::expecting(at(i), "malformed matrix", &[",", "]"])),
            }
        }
    }
    skip_ws(&mut i);
    if i != s.len() {
        return Err(ParseError::new(at(i), "trailing characters after matrix"));
    }
    if let Some(w) = rows.first().map(Vec::len) {
        if let Some(bad) = rows.iter().position(|r| r.len() != w) {
            return Err(ParseError::new(tok.pos, format!("row {bad} has a different length than row 0")));
        }
    }
    Ok(rows)
}

pub fn format_entries(rows: &[Vec<Entry>]) -> String {
    let body: Vec<String> = rows
        .iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .map(|e| match e {
                    Entry::Fixed(x) => x.to_string(),
                    Entry::Undetermined => "*".to_string(),
                })
                .collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", body.join(","))
}

pub fn parse_int<T: FromStr>(tok: &Token, what: &str) -> Result<T, ParseError> {
    tok.text.parse().map_err(|_| ParseError::expecting(tok.pos, format!("expected {what}, found `{}`", tok.text), &[what]))
}

pub fn parse_bool(tok: &Token) -> Result<bool, ParseError> {
    match tok.text.as_str() {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(ParseError::expecting(tok.pos, format!("expected a boolean, found `{}`", tok.text), &["true", "false"])),
    }
}
