//! Two-sided bounded check that a reduction's section equals its product.

use std::collections::HashSet;

use serde_json::{json, Value};

use super::oracle::{factor_ball, ProductOracle};
use super::search::{Bfs, Projector, Pruner};
use super::{witness_translate, ReductionError, SectionReduction};
use crate::format::encode_element;
use crate::group::Element;
use crate::words::Word;

/// A `G` element of the section with its shortest-then-least word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionEntry {
    pub element: Element,
    pub word: Word,
}

#[derive(Clone, Debug)]
pub struct SectionExploration {
    /// Section elements in discovery order (by word length, then word).
    pub entries: Vec<SectionEntry>,
    /// Distinct states of `<T>` visited.
    pub states: u64,
    pub truncated: bool,
}

/// Every `g` with `(g, h)` a product of at most `max_len` generators,
/// found by one deduplicated breadth-first pass. States whose `H`
/// component cannot reach `h` in the remaining steps (by abelianization)
/// are skipped; the set found is the same as without skipping.
pub fn explore_section(
    red: &SectionReduction,
    max_len: usize,
    max_states: Option<u64>,
) -> Result<SectionExploration, ReductionError> {
    let letters = red.generators();
    let pruner = Pruner::new(Projector::Component(1), letters, red.target(), max_len);
    let (bfs, _) = Bfs::run(
        red.ambient().identity(),
        letters,
        max_len,
        max_states,
        Some(&pruner),
        |_| false,
    )?;
    let entries = bfs
        .states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.component(1) == Some(red.target()))
        .map(|(i, s)| SectionEntry {
            element: s.component(0).expect("pair").clone(),
            word: bfs.word(i),
        })
        .collect();
    Ok(SectionExploration {
        entries,
        states: bfs.states.len() as u64,
        truncated: bfs.truncated,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessViolation {
    pub element: Element,
    pub word: Word,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub ball_radius: usize,
    pub word_bound: usize,
    /// Word length allowed for completeness witnesses.
    pub completeness_len: usize,
    pub states: u64,
    /// Size of the oracle's product set at `ball_radius`.
    pub product_ball: usize,
    /// Oracle elements with no witness within `completeness_len`.
    pub completeness_failures: Vec<Element>,
    /// Section elements found with words of length at most `word_bound`.
    pub section_checked: usize,
    pub soundness_violations: Vec<SoundnessViolation>,
    /// Set when the result cannot be trusted in either direction.
    pub inconclusive: Option<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.inconclusive.is_none() && self.completeness_failures.is_empty() && self.soundness_violations.is_empty()
    }

    pub fn status(&self) -> &'static str {
        if self.inconclusive.is_some() {
            "inconclusive"
        } else if self.passed() {
            "passed"
        } else {
            "failed"
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status(),
            "ball_radius": self.ball_radius,
            "word_bound": self.word_bound,
            "completeness_len": self.completeness_len,
            "states": self.states,
            "product_ball": self.product_ball,
            "completeness_failures": self.completeness_failures.iter().map(encode_element).collect::<Vec<_>>(),
            "section_checked": self.section_checked,
            "soundness_violations": self.soundness_violations.iter().map(|v| json!({
                "element": encode_element(&v.element),
                "word": v.word,
                "reason": v.reason,
            })).collect::<Vec<_>>(),
            "inconclusive": self.inconclusive,
        })
    }
}

/// Checks both inclusions between the section of `red` at its target and
/// the product it encodes, up to the given bounds.
///
/// * Completeness: every product with factors of at most `ball_radius`
///   generators has a witness of length at most
///   [`SectionReduction::completeness_length`].
/// * Soundness: every section element with a word of length at most
///   `word_bound` is in the oracle's product set with factors of at most
///   `word_bound - separators` generators, and its word splits into blocks
///   whose products lie in the respective factors.
///
/// Soundness is established only up to `word_bound`.
pub fn section_equivalence_check(
    red: &SectionReduction,
    ball_radius: usize,
    word_bound: usize,
    max_states: Option<u64>,
) -> Result<EquivalenceReport, ReductionError> {
    let completeness_len = red.completeness_length(ball_radius);
    let explored = explore_section(red, completeness_len.max(word_bound), max_states)?;
    let pattern = red.pattern();
    let mut report = EquivalenceReport {
        ball_radius,
        word_bound,
        completeness_len,
        states: explored.states,
        product_ball: 0,
        completeness_failures: Vec::new(),
        section_checked: 0,
        soundness_violations: Vec::new(),
        inconclusive: None,
    };
    if explored.truncated {
        report.inconclusive = Some("state cap reached before the search bound".into());
    } else if word_bound < red.separators() {
        report.inconclusive = Some(format!(
            "word bound {word_bound} is below the {} separators every section word contains",
            red.separators()
        ));
    }

    let reachable: HashSet<&Element> = explored
        .entries
        .iter()
        .filter(|e| e.word.len() <= completeness_len)
        .map(|e| &e.element)
        .collect();
    let ball = ProductOracle::new(&pattern, ball_radius).elements();
    report.product_ball = ball.len();
    report.completeness_failures = ball.into_iter().filter(|g| !reachable.contains(g)).collect();

    let factor_len = word_bound.saturating_sub(red.separators());
    let oracle = ProductOracle::new(&pattern, factor_len);
    let balls: Vec<HashSet<Element>> = pattern
        .factors()
        .iter()
        .map(|gens| factor_ball(pattern.group(), gens, factor_len).into_iter().collect())
        .collect();
    for entry in explored.entries.iter().filter(|e| e.word.len() <= word_bound) {
        report.section_checked += 1;
        let violation = |reason: String| SoundnessViolation {
            element: entry.element.clone(),
            word: entry.word.clone(),
            reason,
        };
        if !oracle.contains(&entry.element) {
            report
                .soundness_violations
                .push(violation("not in the oracle product set".into()));
            continue;
        }
        match witness_translate(red, &entry.word) {
            Ok(f) => {
                if f.separators != pattern.between() {
                    report
                        .soundness_violations
                        .push(violation("separator letters carry unexpected G components".into()));
                } else if let Some(i) = f.factors.iter().zip(&balls).position(|(m, b)| !b.contains(m)) {
                    report
                        .soundness_violations
                        .push(violation(format!("block {i} is not in its factor")));
                }
            }
            Err(e) => report.soundness_violations.push(violation(e.to_string())),
        }
    }
    Ok(report)
}
