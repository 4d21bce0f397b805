//! Verification reports and their JSON, LaTeX and Markdown renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::spectra::{bound_table, BoundRow, SpectraError, QUOTED_BOUNDS};
use crate::wbk::{CheckStatus, IdentityCheck, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Latex,
    Markdown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub format: Format,
    pub entries: Vec<IdentityCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundRow>,
}

impl Report {
    pub fn new(format: Format) -> Report {
        Report {
            format,
            entries: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn from_verify(format: Format, v: VerifyReport) -> Report {
        Report {
            format,
            entries: v.entries,
            bounds: Vec::new(),
        }
    }

    /// Adds the quoted minimal-eigenvalue bounds.
    pub fn with_bounds(mut self) -> Result<Report, SpectraError> {
        let rows: Vec<_> = QUOTED_BOUNDS.iter().map(|(_, p)| *p).collect();
        self.bounds = bound_table(&rows, None)?;
        Ok(self)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == CheckStatus::Pass)
    }

    pub fn render(&self) -> String {
        match self.format {
            Format::Json => emit_json(self),
            Format::Latex => emit_latex(self),
            Format::Markdown => emit_markdown(self),
        }
    }

    fn by_bundle(&self) -> BTreeMap<&str, Vec<&IdentityCheck>> {
        let mut groups: BTreeMap<&str, Vec<&IdentityCheck>> = BTreeMap::new();
        for e in &self.entries {
            groups.entry(e.bundle.as_str()).or_default().push(e);
        }
        for g in groups.values_mut() {
            g.sort_by(|a, b| a.id.cmp(&b.id));
        }
        groups
    }
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
    }
}

fn bound_cell(r: &BoundRow) -> String {
    format!("{} scal", r.value.to_compact())
}

pub fn emit_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Escapes text for LaTeX text mode.
pub fn latex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '{' => out.push_str("\\{"),
            '}' => out.push_str("\\}"),
            '$' => out.push_str("\\$"),
            '&' => out.push_str("\\&"),
            '%' => out.push_str("\\%"),
            '#' => out.push_str("\\#"),
            '_' => out.push_str("\\_"),
            '^' => out.push_str("\\textasciicircum{}"),
            '~' => out.push_str("\\textasciitilde{}"),
            '"' => out.push_str("\\textquotedbl{}"),
            '<' => out.push_str("\\textless{}"),
            '>' => out.push_str("\\textgreater{}"),
            '|' => out.push_str("\\textbar{}"),
            '-' => out.push_str("-{}"),
            _ => out.push(c),
        }
    }
    out
}

const LATEX_PREAMBLE: &str = "\\documentclass{article}
\\usepackage[utf8]{inputenc}
\\usepackage[T1]{fontenc}
\\usepackage{longtable}
\\usepackage{array}
\\begin{document}
";

pub fn emit_latex(report: &Report) -> String {
    let mut s = String::from(LATEX_PREAMBLE);
    let groups = report.by_bundle();
    if groups.is_empty() && report.bounds.is_empty() {
        s.push_str("No entries.\n");
    }
    for (bundle, entries) in &groups {
        let _ = writeln!(s, "\\section*{{{}}}", latex_escape(bundle));
        s.push_str("\\begin{longtable}{>{\\raggedright}p{0.2\\textwidth}>{\\raggedright}p{0.6\\textwidth}l}\n");
        s.push_str("\\hline\nIdentity & Source & Status \\\\\n\\hline\n\\endhead\n");
        for e in entries {
            let _ = writeln!(
                s,
                "{} & {} & {} \\\\",
                latex_escape(&e.id),
                latex_escape(&e.provenance),
                status_word(e.status)
            );
        }
        s.push_str("\\hline\n\\end{longtable}\n\n");
    }
    if !report.bounds.is_empty() {
        s.push_str("\\section*{Minimal eigenvalue bounds}\n");
        s.push_str(
            "\\begin{tabular}{rrrll}\n\\hline\n$k$ & $a$ & $b$ & Bundle & Bound \\\\\n\\hline\n",
        );
        for r in &report.bounds {
            let _ = writeln!(
                s,
                "{} & {} & {} & {} & {} \\\\",
                r.k,
                r.a,
                r.b,
                latex_escape(&r.bundle),
                bound_cell(r)
            );
        }
        s.push_str("\\hline\n\\end{tabular}\n");
    }
    s.push_str("\\end{document}\n");
    s
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

pub fn emit_markdown(report: &Report) -> String {
    let mut s = String::from("# Verification report\n");
    let groups = report.by_bundle();
    if groups.is_empty() && report.bounds.is_empty() {
        s.push_str("\nNo entries.\n");
    }
    for (bundle, entries) in &groups {
        let _ = writeln!(s, "\n## {bundle}\n");
        s.push_str("| Identity | Status | Expected | Actual | Source |\n|---|---|---|---|---|\n");
        for e in entries {
            let _ = writeln!(
                s,
                "| {} | {} | `{}` | `{}` | {} |",
                md_escape(&e.id),
                status_word(e.status),
                md_escape(&e.expected),
                md_escape(&e.actual),
                md_escape(&e.provenance)
            );
        }
    }
    if !report.bounds.is_empty() {
        s.push_str("\n## Minimal eigenvalue bounds\n\n| k | a | b | Bundle | Bound |\n|---|---|---|---|---|\n");
        for r in &report.bounds {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | `{}` |",
                r.k,
                r.a,
                r.b,
                r.bundle,
                bound_cell(r)
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str) -> IdentityCheck {
        IdentityCheck {
            id: id.into(),
            bundle: "HE".into(),
            status: CheckStatus::Pass,
            expected: "B[-1,+2]: 1".into(),
            actual: "B[-1,+2]: 1".into(),
            provenance: "eq1: \"by subtracting the first\"".into(),
            notes: vec![],
        }
    }

    #[test]
    fn empty_latex_is_a_document() {
        let s = emit_latex(&Report::new(Format::Latex));
        assert!(s.starts_with("\\documentclass"));
        assert!(s.trim_end().ends_with("\\end{document}"));
        assert!(!s.contains("tabular"));
    }

    #[test]
    fn single_entry_table() {
        let mut r = Report::new(Format::Latex);
        r.entries.push(entry("eq1"));
        let s = emit_latex(&r);
        assert_eq!(s.matches("\\begin{longtable}").count(), 1);
        assert!(s.contains("eq1: \\textquotedbl{}by subtracting the first\\textquotedbl{}"));
    }

    #[test]
    fn bounds_row_for_lambda1() {
        let r = Report::new(Format::Latex).with_bounds().unwrap();
        let s = emit_latex(&r);
        assert!(
            s.contains("0 & 2 & 0 & L20E & (n+1)/(2n(n+2)) scal \\\\"),
            "{s}"
        );
    }

    #[test]
    fn escaping() {
        assert_eq!(latex_escape("B_{-1,-1}"), "B\\_\\{-{}1,-{}1\\}");
        assert_eq!(latex_escape("a & b % c"), "a \\& b \\% c");
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new(Format::Json).with_bounds().unwrap();
        r.entries.push(entry("eq1"));
        let back: Report = serde_json::from_str(&emit_json(&r)).unwrap();
        assert_eq!(back, r);
    }
}
