//! The line-based BA interchange format.
//!
//! ```text
//! q0            initial states, one per line
//! a,q0->q1      transitions `symbol,src->dst`
//! q1            final states, one per line
//! ```
//!
//! Blank lines and lines starting with `#` are skipped. A document without
//! any transition line reads its first identifier as the initial state and
//! all remaining identifiers as final states.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::{BuchiAutomaton, Transition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed transition `{text}`, expected `symbol,src->dst`")]
    MalformedTransition { line: usize, text: String },
    #[error("line {line}: `{text}` is not a valid identifier")]
    BadIdentifier { line: usize, text: String },
    #[error("line {line}: transition after the final-state section")]
    SectionOrder { line: usize },
}

fn valid_identifier(s: &str) -> bool {
    !s.is_empty() && !s.contains(',') && !s.contains("->") && !s.chars().any(char::is_whitespace)
}

fn identifier(line: usize, s: &str) -> Result<String, ParseError> {
    if valid_identifier(s) {
        Ok(s.to_string())
    } else {
        Err(ParseError::BadIdentifier {
            line,
            text: s.to_string(),
        })
    }
}

fn transition(line: usize, s: &str) -> Result<Transition, ParseError> {
    let malformed = || ParseError::MalformedTransition {
        line,
        text: s.to_string(),
    };
    let (lhs, dst) = s.split_once("->").ok_or_else(malformed)?;
    let (symbol, src) = lhs.split_once(',').ok_or_else(malformed)?;
    if dst.contains("->") {
        return Err(malformed());
    }
    Ok(Transition {
        symbol: identifier(line, symbol)?,
        src: identifier(line, src)?,
        dst: identifier(line, dst)?,
    })
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
enum Section {
    Initial,
    Transitions,
    Final,
}

/// Parses a BA document.
pub fn parse_ba(text: &str) -> Result<BuchiAutomaton, ParseError> {
    let mut initial = Vec::new();
    let mut transitions = Vec::new();
    let mut finals = Vec::new();
    let mut section = Section::Initial;
    let mut bare_without_transitions = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if s.contains("->") {
            if section == Section::Final {
                return Err(ParseError::SectionOrder { line });
            }
            section = Section::Transitions;
            transitions.push(transition(line, s)?);
        } else {
            let id = identifier(line, s)?;
            match section {
                Section::Initial => bare_without_transitions.push(id),
                Section::Transitions | Section::Final => {
                    section = Section::Final;
                    finals.push(id);
                }
            }
        }
    }

    if transitions.is_empty() {
        let mut ids = bare_without_transitions.into_iter();
        initial.extend(ids.next());
        finals.extend(ids);
    } else {
        initial = bare_without_transitions;
    }

    Ok(BuchiAutomaton::from_parts(initial, transitions, finals))
}

/// Writes `a` as a BA document with every section in lexicographic order.
///
/// States that are neither initial, final nor touched by a transition have
/// no representation in the format and are not written.
pub fn serialize_ba(a: &BuchiAutomaton) -> String {
    let mut out = String::new();
    let initial: BTreeSet<&String> = a.initial().iter().collect();
    for q in &initial {
        writeln!(out, "{q}").unwrap();
    }
    for t in a.transitions() {
        writeln!(out, "{},{}->{}", t.symbol, t.src, t.dst).unwrap();
    }
    for q in a.final_states() {
        writeln!(out, "{q}").unwrap();
    }
    out
}
