//! Breadth-first bounded membership in a finitely generated submonoid.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{ReductionError, SectionReduction};
use crate::group::{Element, GroupDescriptor};
use crate::words::{evaluate_word, sub, AbelianReach, Alphabet, EnumerationBudget, Projection, Word};

/// Which coordinates the abelian pruning looks at.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Projector {
    Whole,
    Component(usize),
}

impl Projector {
    fn apply(self, e: &Element) -> Vec<BigInt> {
        match self {
            Self::Whole => e.abelianize(),
            Self::Component(i) => e.component(i).expect("product element").abelianize(),
        }
    }
}

pub(crate) struct Pruner {
    projector: Projector,
    reach: AbelianReach,
    target_ab: Vec<BigInt>,
}

impl Pruner {
    pub(crate) fn new(projector: Projector, letters: &[Element], target: &Element, max_len: usize) -> Self {
        let letter_ab: Vec<Vec<BigInt>> = letters.iter().map(|l| projector.apply(l)).collect();
        // For `Component`, `target` is the component itself.
        let target_ab = target.abelianize();
        let reach = AbelianReach::new(&letter_ab, target_ab.len(), max_len);
        Self {
            projector,
            reach,
            target_ab,
        }
    }

    fn admits(&self, state: &Element, remaining: usize) -> bool {
        self.reach
            .admits(&sub(&self.target_ab, &self.projector.apply(state)), remaining)
    }
}

/// Layered breadth-first exploration deduplicated by normal form.
///
/// States are numbered in discovery order; the first discovery of a state
/// is along its shortest, then lexicographically least, word.
pub(crate) struct Bfs {
    pub states: Vec<Element>,
    pub parent: Vec<(u32, u32)>,
    pub depth: Vec<u32>,
    pub expanded: u64,
    pub frontier_peak: u64,
    pub truncated: bool,
    /// The frontier emptied before `max_len` without pruning, so every
    /// element of the submonoid was listed.
    pub saturated: bool,
}

impl Bfs {
    /// Runs until depth `max_len`, the state cap, or `stop` returns true for
    /// a newly discovered state. Returns the index of the stopping state.
    pub(crate) fn run(
        identity: Element,
        letters: &[Element],
        max_len: usize,
        max_states: Option<u64>,
        pruner: Option<&Pruner>,
        mut stop: impl FnMut(&Element) -> bool,
    ) -> Result<(Self, Option<usize>), ReductionError> {
        let mut bfs = Bfs {
            states: vec![identity.clone()],
            parent: vec![(u32::MAX, u32::MAX)],
            depth: vec![0],
            expanded: 0,
            frontier_peak: 1,
            truncated: false,
            saturated: false,
        };
        if stop(&identity) {
            return Ok((bfs, Some(0)));
        }
        if pruner.is_some_and(|p| !p.admits(&identity, max_len)) {
            return Ok((bfs, None));
        }
        let mut index: HashMap<Element, u32> = HashMap::new();
        index.insert(identity, 0);
        let mut layer = 0..1usize;
        for d in 1..=max_len {
            let remaining = max_len - d;
            let children: Vec<Vec<Option<Element>>> = bfs.states[layer.clone()]
                .par_iter()
                .map(|s| {
                    letters
                        .iter()
                        .map(|l| {
                            let c = s.multiply(l).expect("letters conform");
                            match pruner {
                                Some(p) if !p.admits(&c, remaining) => None,
                                _ => Some(c),
                            }
                        })
                        .collect()
                })
                .collect();
            bfs.expanded += layer.len() as u64;
            let start = bfs.states.len();
            for (offset, row) in children.into_iter().enumerate() {
                let parent = (layer.start + offset) as u32;
                for (letter, child) in row.into_iter().enumerate() {
                    let Some(child) = child else { continue };
                    let slot = match index.entry(child) {
                        Entry::Occupied(_) => continue,
                        Entry::Vacant(v) => v,
                    };
                    if max_states.is_some_and(|cap| bfs.states.len() as u64 >= cap) {
                        bfs.truncated = true;
                        return Ok((bfs, None));
                    }
                    let id = bfs.states.len();
                    bfs.states.push(slot.key().clone());
                    slot.insert(id as u32);
                    bfs.parent.push((parent, letter as u32));
                    bfs.depth.push(d as u32);
                    if stop(&bfs.states[id]) {
                        return Ok((bfs, Some(id)));
                    }
                }
            }
            layer = start..bfs.states.len();
            bfs.frontier_peak = bfs.frontier_peak.max(layer.len() as u64);
            if layer.is_empty() {
                bfs.saturated = pruner.is_none();
                break;
            }
        }
        Ok((bfs, None))
    }

    pub(crate) fn word(&self, mut state: usize) -> Word {
        let mut letters = Vec::new();
        while state != 0 {
            let (p, l) = self.parent[state];
            letters.push(l as usize);
            state = p as usize;
        }
        letters.reverse();
        Word(letters)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipOutcome {
    /// Shortest, then lexicographically least, word with the queried value.
    Member { witness: Word },
    /// No word of length at most `max_len` has the value. `exhausted` is
    /// false when the state cap stopped the search early; `saturated` is
    /// true when the submonoid itself turned out finite and fully listed.
    NotFoundWithin {
        max_len: usize,
        exhausted: bool,
        saturated: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipVerdict {
    pub outcome: MembershipOutcome,
    /// Distinct states discovered.
    pub states: u64,
    /// States whose successors were generated.
    pub expanded: u64,
    pub frontier_peak: u64,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self.outcome, MembershipOutcome::Member { .. })
    }

    pub fn witness(&self) -> Option<&Word> {
        match &self.outcome {
            MembershipOutcome::Member { witness } => Some(witness),
            MembershipOutcome::NotFoundWithin { .. } => None,
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self.outcome, MembershipOutcome::NotFoundWithin { exhausted: false, .. })
    }

    pub fn to_json(&self) -> Value {
        let outcome = match &self.outcome {
            MembershipOutcome::Member { witness } => json!({ "status": "member", "witness": witness }),
            MembershipOutcome::NotFoundWithin {
                max_len,
                exhausted,
                saturated,
            } => json!({
                "status": if *exhausted { "not-found" } else { "truncated" },
                "max_len": max_len,
                "exhausted": exhausted,
                "saturated": saturated,
            }),
        };
        json!({
            "outcome": outcome,
            "states": self.states,
            "expanded": self.expanded,
            "frontier_peak": self.frontier_peak,
        })
    }
}

/// Whether `query` is a product of at most `budget.max_len` letters of
/// `alphabet`. `budget.max_candidates` caps the number of distinct states.
///
/// The returned witness is re-evaluated before returning.
pub fn submonoid_membership(
    alphabet: &Alphabet,
    query: &Element,
    budget: &EnumerationBudget,
) -> Result<MembershipVerdict, ReductionError> {
    submonoid_membership_in(alphabet.group(), alphabet, query, budget)
}

fn submonoid_membership_in(
    group: &GroupDescriptor,
    alphabet: &Alphabet,
    query: &Element,
    budget: &EnumerationBudget,
) -> Result<MembershipVerdict, ReductionError> {
    group.check(query)?;
    let letters = alphabet.letters();
    let pruner = match budget.projection {
        Projection::None => None,
        Projection::Abelianization => Some(Pruner::new(Projector::Whole, letters, query, budget.max_len)),
    };
    let (bfs, hit) = Bfs::run(
        group.identity(),
        letters,
        budget.max_len,
        budget.max_candidates,
        pruner.as_ref(),
        |s| s == query,
    )?;
    let outcome = match hit {
        Some(state) => {
            let witness = bfs.word(state);
            if evaluate_word(alphabet, &witness)? != *query {
                return Err(ReductionError::Internal(
                    "witness does not re-evaluate to the query".into(),
                ));
            }
            MembershipOutcome::Member { witness }
        }
        None => MembershipOutcome::NotFoundWithin {
            max_len: budget.max_len,
            exhausted: !bfs.truncated,
            saturated: bfs.saturated,
        },
    };
    Ok(MembershipVerdict {
        outcome,
        states: bfs.states.len() as u64,
        expanded: bfs.expanded,
        frontier_peak: bfs.frontier_peak,
    })
}

/// [`submonoid_membership`] in `<T>` for the reduction's generators.
pub fn bounded_submonoid_membership(
    red: &SectionReduction,
    query: &Element,
    budget: &EnumerationBudget,
) -> Result<MembershipVerdict, ReductionError> {
    submonoid_membership_in(red.ambient(), &red.alphabet(), query, budget)
}
