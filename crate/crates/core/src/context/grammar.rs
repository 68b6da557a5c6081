use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::kb::{normalize, tokens, Category, KnowledgeBase};
use super::{ContextRecord, Polarity, Provenance, RecordType, VerbalInput};
use crate::env::Cell;

static COORDINATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)").unwrap());
static CONJUNCTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(?:and|but|while|also)\b").unwrap());

const BLOCKED_WORDS: &[&str] = &["blocked", "closed", "collapsed", "impassable", "destroyed", "obstructed"];
const CLEAR_WORDS: &[&str] = &["clear", "cleared", "open", "safe", "passable"];

/// Records extracted from one input plus human-readable diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub records: Vec<ContextRecord>,
    pub notes: Vec<String>,
}

/// Cells of the longest landmark phrase contained in `phrase` (ties go to
/// the phrase listed first in the knowledge base). Empty on a miss.
pub fn ground_landmark(phrase: &str, kb: &KnowledgeBase) -> Vec<Cell> {
    let toks = tokens(phrase);
    longest_landmark(&toks, kb).map(|(_, cells)| cells.to_vec()).unwrap_or_default()
}

fn longest_landmark<'k>(toks: &[String], kb: &'k KnowledgeBase) -> Option<(&'k str, &'k [Cell])> {
    let mut best: Option<(&str, &[Cell])> = None;
    for (name, cells) in kb.landmarks() {
        let needle: Vec<&str> = name.split(' ').collect();
        if find_phrase(toks, &needle).is_some() && best.is_none_or(|(b, _)| name.len() > b.len()) {
            best = Some((name.as_str(), cells.as_slice()));
        }
    }
    best
}

/// Token offset of the first occurrence of `needle` in `toks`.
fn find_phrase(toks: &[String], needle: &[&str]) -> Option<usize> {
    if needle.is_empty() || needle.len() > toks.len() {
        return None;
    }
    toks.windows(needle.len()).position(|w| w.iter().zip(needle).all(|(a, b)| a == b))
}

/// Splits on sentence punctuation and commas outside parentheses, then on
/// coordinating conjunctions.
fn clauses(text: &str) -> Vec<String> {
    let mut pieces = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if depth == 0 && matches!(ch, '.' | ';' | '!' | '?' | ',' | '\n') {
            pieces.push(std::mem::take(&mut current));
        } else {
            current.push(ch);
        }
    }
    pieces.push(current);
    pieces
        .iter()
        .flat_map(|p| CONJUNCTION.split(p).map(str::trim).map(str::to_owned).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect()
}

/// Earliest keyword mention in the clause: (category, token offset).
fn classify(toks: &[String], kb: &KnowledgeBase) -> Option<Category> {
    let mut best: Option<(usize, usize, Category)> = None;
    for (cat, words) in kb.keywords() {
        for w in words {
            let needle: Vec<&str> = w.split(' ').collect();
            if let Some(pos) = find_phrase(toks, &needle) {
                // earlier wins, then longer phrase
                let key = (pos, usize::MAX - needle.len());
                if best.is_none_or(|(p, l, _)| key < (p, l)) {
                    best = Some((key.0, key.1, *cat));
                }
            }
        }
    }
    best.map(|(_, _, c)| c)
}

fn contains_any(toks: &[String], words: &[&str]) -> bool {
    toks.iter().any(|t| words.contains(&t.as_str()))
}

/// Deterministic grammar backend. Each clause is classified by its earliest
/// keyword and grounded by its longest landmark, or failing that by literal
/// `(row,col)` mentions. Input that cannot be grounded yields no records.
pub fn extract_context(input: &VerbalInput, kb: &KnowledgeBase) -> Extraction {
    let mut out = Extraction::default();
    let lowered = input.text.to_lowercase();
    for clause in clauses(&lowered) {
        let toks = tokens(&clause);
        let Some(category) = classify(&toks, kb) else {
            if longest_landmark(&toks, kb).is_some() || COORDINATE.is_match(&clause) {
                out.notes.push(format!("location without an information keyword in `{clause}`"));
            }
            continue;
        };
        let (info_type, polarity) = match category {
            Category::Hazard => (RecordType::Z, Polarity::Avoid),
            Category::Victim => (RecordType::X, Polarity::Seek),
            Category::Poi => (RecordType::Poi, Polarity::Seek),
            Category::Route if contains_any(&toks, BLOCKED_WORDS) => (RecordType::Y, Polarity::Avoid),
            Category::Route if contains_any(&toks, CLEAR_WORDS) => (RecordType::Y, Polarity::Seek),
            Category::Route => {
                out.notes.push(format!("route mention without a blocked/clear qualifier in `{clause}`"));
                continue;
            }
        };
        let record = |cells: Vec<Cell>| ContextRecord {
            info_type,
            cells,
            polarity,
            provenance: Provenance::Grammar,
            source_text: input.text.clone(),
        };
        if let Some((_, cells)) = longest_landmark(&toks, kb) {
            out.records.push(record(cells.to_vec()));
            continue;
        }
        let mut grounded = false;
        for cap in COORDINATE.captures_iter(&clause) {
            let (Ok(row), Ok(col)) = (cap[1].parse::<usize>(), cap[2].parse::<usize>()) else { continue };
            let cell = Cell::new(row, col);
            if kb.cell_allowed(cell) {
                out.records.push(record(vec![cell]));
                grounded = true;
            } else {
                out.notes.push(format!("coordinate {cell} is outside the map"));
            }
        }
        if !grounded {
            out.notes.push(format!("no grounding for {info_type} mention in `{clause}`"));
        }
    }
    note_conflicts(&mut out);
    if out.records.is_empty() && out.notes.is_empty() {
        out.notes.push(format!("nothing actionable in `{}`", normalize(&input.text)));
    }
    out
}

fn note_conflicts(out: &mut Extraction) {
    let mut seen: HashMap<Cell, Polarity> = HashMap::new();
    for r in &out.records {
        for &c in &r.cells {
            if let Some(prev) = seen.insert(c, r.polarity) {
                if prev != r.polarity {
                    out.notes.push(format!("conflicting reports for {c}; the later one wins"));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::VerbalSource;

    fn input(text: &str) -> VerbalInput {
        VerbalInput::new(text, VerbalSource::Human, 0).unwrap()
    }

    fn kb() -> KnowledgeBase {
        KnowledgeBase::default_kb()
    }

    #[test]
    fn hazard_near_landmark() {
        let ex = extract_context(&input("There is fire near the old warehouse"), &kb());
        assert_eq!(ex.records.len(), 1);
        let r = &ex.records[0];
        assert_eq!((r.info_type, r.polarity, r.provenance), (RecordType::Z, Polarity::Avoid, Provenance::Grammar));
        assert_eq!(r.cells, vec![Cell::new(6, 5)]);
    }

    #[test]
    fn greeting_yields_nothing() {
        let ex = extract_context(&input("hello there"), &kb());
        assert!(ex.records.is_empty());
        assert!(!ex.notes.is_empty());
    }

    #[test]
    fn collapsed_bridge_by_coordinate() {
        let ex = extract_context(&input("the bridge at (7,5) is collapsed"), &kb());
        assert_eq!(ex.records.len(), 1);
        assert_eq!((ex.records[0].info_type, ex.records[0].polarity), (RecordType::Y, Polarity::Avoid));
        assert_eq!(ex.records[0].cells, vec![Cell::new(7, 5)]);
    }

    #[test]
    fn longest_match_grounding() {
        let kb = KnowledgeBase::from_parts(
            vec![("warehouse".into(), vec![Cell::new(6, 5)]), ("warehouse annex".into(), vec![Cell::new(7, 6)])],
            vec![],
            None,
        )
        .unwrap();
        assert_eq!(ground_landmark("warehouse annex", &kb), vec![Cell::new(7, 6)]);
        assert_eq!(ground_landmark("old warehouse", &KnowledgeBase::default_kb()), vec![Cell::new(6, 5)]);
        assert!(ground_landmark("city hall", &KnowledgeBase::default_kb()).is_empty());
    }

    #[test]
    fn tie_goes_to_first_listed() {
        let kb = KnowledgeBase::from_parts(
            vec![("north".into(), vec![Cell::new(0, 0)]), ("south".into(), vec![Cell::new(1, 1)])],
            vec![],
            None,
        )
        .unwrap();
        assert_eq!(ground_landmark("south or north", &kb), vec![Cell::new(0, 0)]);
    }

    #[test]
    fn out_of_bounds_coordinate_dropped() {
        let ex = extract_context(&input("fire at (12,3)"), &kb());
        assert!(ex.records.is_empty());
        assert!(ex.notes.iter().any(|n| n.contains("outside")));
    }

    #[test]
    fn multiple_mentions_in_one_input() {
        let ex = extract_context(&input("Smoke near the depot and fire at (2,2); the east lane is clear"), &kb());
        let summary: Vec<_> = ex.records.iter().map(|r| (r.info_type, r.polarity, r.cells.clone())).collect();
        assert_eq!(
            summary,
            vec![
                (RecordType::Z, Polarity::Avoid, vec![Cell::new(5, 6)]),
                (RecordType::Z, Polarity::Avoid, vec![Cell::new(2, 2)]),
                (RecordType::Y, Polarity::Seek, vec![Cell::new(5, 4), Cell::new(5, 5)]),
            ]
        );
    }

    #[test]
    fn conflicting_reports_are_noted() {
        let ex = extract_context(&input("fire near the depot, supplies at the depot"), &kb());
        assert_eq!(ex.records.len(), 2);
        assert!(ex.notes.iter().any(|n| n.contains("conflicting")));
    }
}
