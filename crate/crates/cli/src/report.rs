//! The report shared by all three methods.

use std::fmt::Write as _;

use invphase_core::fgab::FgAbGroup;
use serde::Serialize;
use serde_json::Value;

use crate::spec::Method;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradedEntry {
    /// Where the piece sits, in the method's own coordinates.
    pub position: String,
    pub group: FgAbGroup,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub problem: String,
    pub method: Method,
    /// What was computed, in words.
    pub question: String,
    pub graded: Vec<GradedEntry>,
    pub group: Option<FgAbGroup>,
    pub group_text: String,
    pub extension_ambiguous: bool,
    pub instances: usize,
    /// Method-specific detail: pages and differentials, or the exact sequence.
    pub details: Value,
    #[serde(skip)]
    pub rendered: String,
}

impl Report {
    pub fn new(problem: &str, method: Method, question: String, graded: Vec<GradedEntry>, group: Option<FgAbGroup>) -> Self {
        let group_text = group.as_ref().map_or_else(|| "undetermined".to_string(), FgAbGroup::to_string);
        Report {
            schema: SCHEMA,
            problem: problem.to_string(),
            method,
            question,
            graded,
            extension_ambiguous: false,
            group,
            group_text,
            instances: 1,
            details: Value::Null,
            rendered: String::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem: {}", self.problem);
        let _ = writeln!(out, "method: {}", self.method);
        let _ = writeln!(out, "question: {}", self.question);
        out.push('\n');
        out.push_str(&self.rendered);
        if !self.rendered.ends_with('\n') {
            out.push('\n');
        }
        out
    }
}

/// One line of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub source: String,
    pub method: String,
    pub group: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub agree: bool,
}

impl Comparison {
    /// Agreement means every report determined its group and all groups are equal.
    pub fn of(rows: Vec<CompareRow>) -> Self {
        let first = rows.first().and_then(|r| r.group.clone());
        let agree = !rows.is_empty() && first.is_some() && rows.iter().all(|r| r.group == first);
        Comparison { rows, agree }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = self.rows.iter().map(|r| r.source.len()).max().unwrap_or(0);
        let m = self.rows.iter().map(|r| r.method.len()).max().unwrap_or(0);
        for r in &self.rows {
            let _ = writeln!(out, "{:<w$}  {:<m$}  {}", r.source, r.method, r.group.as_deref().unwrap_or("undetermined"));
        }
        let _ = writeln!(out, "{}", if self.agree { "agree" } else { "DISAGREE" });
        out
    }
}

/// Reads the comparable part of a JSON report.
pub fn row_from_json(source: &str, text: &str) -> Result<CompareRow, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("{source}: not JSON: {e}"))?;
    if v.get("schema").and_then(Value::as_u64) != Some(u64::from(SCHEMA)) {
        return Err(format!("{source}: not a schema {SCHEMA} report"));
    }
    let method = v.get("method").and_then(Value::as_str).ok_or_else(|| format!("{source}: no method"))?.to_string();
    let group = match v.get("group") {
        None | Some(Value::Null) => None,
        Some(g) => {
            let g: FgAbGroup = serde_json::from_value(g.clone()).map_err(|e| format!("{source}: bad group: {e}"))?;
            Some(g.to_string())
        }
    };
    Ok(CompareRow { source: source.to_string(), method, group })
}
