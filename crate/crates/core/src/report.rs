//! Line-oriented law reports shared by every checker.
//!
//! One violation per line: an axiom tag followed by the ids of the witnessing
//! tuple, optionally followed by a free-form note after `--`.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub tag: String,
    pub ids: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Violation {
    pub fn new(tag: impl Into<String>, ids: impl Into<Vec<usize>>) -> Self {
        Violation { tag: tag.into(), ids: ids.into(), note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag)?;
        for id in &self.ids {
            write!(f, " {id}")?;
        }
        if let Some(note) = &self.note {
            write!(f, " -- {note}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub violations: Vec<Violation>,
}

impl LawReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: LawReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.violations.iter().any(|v| v.tag == tag)
    }

    pub fn with_tag<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.tag == tag)
    }

    /// Lines in sorted order, so output does not depend on evaluation order.
    pub fn lines(&self) -> Vec<String> {
        let mut sorted = self.violations.clone();
        sorted.sort();
        sorted.iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_sorted() {
        let mut r = LawReport::new();
        r.push(Violation::new("R4", vec![3, 1]));
        r.push(Violation::new("R1", vec![2]).with_note("f o bar f != f"));
        assert_eq!(r.lines(), vec!["R1 2 -- f o bar f != f".to_string(), "R4 3 1".to_string()]);
        assert!(r.has_tag("R4"));
        assert!(!r.has_tag("R2"));
    }
}
