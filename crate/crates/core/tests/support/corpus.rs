//! Hand-enumerated grammar corpus against the shipped knowledge base.
//! Each entry lists the exact records expected, in order.

use sarhrl_core::context::{extract_context, KnowledgeBase, Polarity, Provenance, RecordType, VerbalInput, VerbalSource};
use sarhrl_core::env::Cell;

use Polarity::{Avoid, Seek};
use RecordType::{Poi, X, Y, Z};

pub type Expected = (RecordType, Polarity, &'static [(usize, usize)]);

pub const CORPUS: &[(&str, &[Expected])] = &[
    ("There is fire near the old warehouse", &[(Z, Avoid, &[(6, 5)])]),
    ("A victim is trapped near the clinic", &[(X, Seek, &[(7, 7)])]),
    (
        "The bridge at (7,5) is collapsed, supplies are stored at the depot",
        &[(Y, Avoid, &[(7, 5)]), (Poi, Seek, &[(5, 6)])],
    ),
    ("hello there", &[]),
    ("Nothing to report", &[]),
    ("Smoke is rising from the pharmacy", &[(Z, Avoid, &[(6, 1)])]),
    ("The east lane is clear", &[(Y, Seek, &[(5, 4), (5, 5)])]),
    // "flooded" is not a keyword
    ("The river crossing is flooded", &[]),
    ("Flooding at the river crossing", &[(Z, Avoid, &[(7, 5), (6, 5)])]),
    ("Survivor spotted at (3,3)", &[(X, Seek, &[(3, 3)])]),
    ("Gas leak reported near the school", &[(Z, Avoid, &[(2, 1)])]),
    ("The road by the market square is blocked", &[(Y, Avoid, &[(4, 3)])]),
    ("The road by the market square is open", &[(Y, Seek, &[(4, 3)])]),
    ("The road by the market square", &[]),
    ("Fire at (12,3)", &[]),
    ("Fire at (8,0)", &[]),
    ("Fire at (0,7)", &[(Z, Avoid, &[(0, 7)])]),
    ("Medical kit available at the north gate", &[(Poi, Seek, &[(0, 0)])]),
    ("Fire near the depot and a survivor at the clinic", &[(Z, Avoid, &[(5, 6)]), (X, Seek, &[(7, 7)])]),
    ("Explosion at the warehouse; the bridge is safe", &[(Z, Avoid, &[(6, 5)]), (Y, Seek, &[(7, 5)])]),
    ("The tunnel is obstructed at (2,4)", &[(Y, Avoid, &[(2, 4)])]),
    ("FIRE NEAR THE OLD WAREHOUSE!", &[(Z, Avoid, &[(6, 5)])]),
    ("Water tank at (1,1) but fire at (1,2)", &[(Poi, Seek, &[(1, 1)]), (Z, Avoid, &[(1, 2)])]),
    (
        "The street near the clinic is closed while the lane at (4,4) is passable",
        &[(Y, Avoid, &[(7, 7)]), (Y, Seek, &[(4, 4)])],
    ),
    ("Chemical spill", &[]),
    ("Fire near the depot, supplies at the depot", &[(Z, Avoid, &[(5, 6)]), (Poi, Seek, &[(5, 6)])]),
    ("Injured person near (6,6) and (6,7)", &[(X, Seek, &[(6, 6)])]),
    ("Casualty at (2,2) (3,3)", &[(X, Seek, &[(2, 2)]), (X, Seek, &[(3, 3)])]),
    ("Smoke near the old warehouse and the pharmacy", &[(Z, Avoid, &[(6, 5)])]),
    ("The path past the school is destroyed", &[(Y, Avoid, &[(2, 1)])]),
    ("Shelter is open at the market square", &[(Poi, Seek, &[(4, 3)])]),
    ("The bridge is impassable because of fire", &[(Y, Avoid, &[(7, 5)])]),
    ("Fire on the bridge", &[(Z, Avoid, &[(7, 5)])]),
    ("First aid station at (5,3)", &[(Poi, Seek, &[(5, 3)])]),
    ("People trapped at the school", &[(X, Seek, &[(2, 1)])]),
    ("Live wire down near (3,4)", &[(Z, Avoid, &[(3, 4)])]),
    ("The corridor to the depot is passable", &[(Y, Seek, &[(5, 6)])]),
    ("Fire at the city hall", &[]),
    ("Flames at ( 6 , 2 )", &[(Z, Avoid, &[(6, 2)])]),
    ("A point of interest at (1,6)", &[(Poi, Seek, &[(1, 6)])]),
    ("Hazard at (4,0)", &[(Z, Avoid, &[(4, 0)])]),
];

/// Runs the corpus through the grammar backend; one message per mismatch.
pub fn mismatches(kb: &KnowledgeBase) -> Vec<String> {
    let mut out = Vec::new();
    for (text, expected) in CORPUS {
        let input = VerbalInput::new(*text, VerbalSource::Human, 0).unwrap();
        let ex = extract_context(&input, kb);
        let got: Vec<(RecordType, Polarity, Vec<Cell>)> = ex.records.iter().map(|r| (r.info_type, r.polarity, r.cells.clone())).collect();
        let want: Vec<(RecordType, Polarity, Vec<Cell>)> = expected
            .iter()
            .map(|(t, p, cells)| (*t, *p, cells.iter().map(|&(r, c)| Cell::new(r, c)).collect()))
            .collect();
        if got != want {
            out.push(format!("`{text}`: expected {want:?}, got {got:?}"));
        }
        if ex.records.iter().any(|r| r.provenance != Provenance::Grammar || r.source_text != *text) {
            out.push(format!("`{text}`: wrong provenance or source text"));
        }
        if ex.records.is_empty() && ex.notes.is_empty() {
            out.push(format!("`{text}`: no records and no diagnostic note"));
        }
    }
    out
}
