//! Positive words over a finite alphabet of group elements: evaluation and
//! exhaustive enumeration with abelianization pruning.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::certificate::{GadgetCertificate, Verdict};
use crate::group::{Element, GroupDescriptor, GroupError, HeisenbergElement};

#[derive(Debug, Error)]
pub enum WordError {
    #[error("letter index {index} out of range for an alphabet of {len} letters")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("letter {index} does not belong to the alphabet's group: {source}")]
    ForeignLetter { index: usize, source: GroupError },
    #[error("target does not belong to the alphabet's group: {0}")]
    ForeignTarget(GroupError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Ordered list of letters, all in one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    group: GroupDescriptor,
    letters: Vec<Element>,
}

impl Alphabet {
    pub fn new(group: GroupDescriptor, letters: Vec<Element>) -> Result<Self, WordError> {
        group.validate()?;
        for (index, l) in letters.iter().enumerate() {
            group
                .check(l)
                .map_err(|source| WordError::ForeignLetter { index, source })?;
        }
        Ok(Self { group, letters })
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn letters(&self) -> &[Element] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Inverse-free word, stored as 0-based letter indices.
///
/// Words order by length first, then lexicographically by letter index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Left-to-right product of the letters of `word`; the empty word is the
/// identity.
pub fn evaluate_word(alphabet: &Alphabet, word: &Word) -> Result<Element, WordError> {
    let mut acc = alphabet.group.identity();
    for &i in &word.0 {
        let letter = alphabet.letters.get(i).ok_or(WordError::IndexOutOfRange {
            index: i,
            len: alphabet.len(),
        })?;
        acc = acc.multiply(letter)?;
    }
    Ok(acc)
}

/// Pruning applied during enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    #[default]
    None,
    /// Discard prefixes whose abelianization can no longer reach the
    /// target's within the remaining length.
    Abelianization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationBudget {
    pub max_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_candidates: Option<u64>,
    pub projection: Projection,
}

impl EnumerationBudget {
    pub fn new(max_len: usize) -> Self {
        Self {
            max_len,
            max_candidates: None,
            projection: Projection::None,
        }
    }

    pub fn pruned(max_len: usize) -> Self {
        Self::new(max_len).with_projection(Projection::Abelianization)
    }

    pub fn with_projection(mut self, projection: Projection) -> Self {
        self.projection = projection;
        self
    }

    pub fn with_max_candidates(mut self, cap: u64) -> Self {
        self.max_candidates = Some(cap);
        self
    }
}

/// Result of [`find_words_with_value`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSearch {
    /// Matching words in length-then-lexicographic order. Partial when
    /// `truncated` is set.
    pub words: Vec<Word>,
    /// Number of words (tree nodes) visited.
    pub examined: u64,
    pub truncated: bool,
}

/// Entries beyond this make the exact reachability table too large to be
/// worth building; the interval bound is used alone.
const REACH_TABLE_CAP: usize = 400_000;

/// Which abelianized differences a sum of at most `r` letters can produce.
///
/// Uses an exact table of minimal letter counts when it is small enough,
/// and a per-coordinate interval bound otherwise. Both are sound: they only
/// reject differences no sum of at most `r` letters can reach.
#[derive(Clone, Debug)]
pub struct AbelianReach {
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
    table: Option<HashMap<Vec<i64>, usize>>,
}

impl AbelianReach {
    pub fn new(letter_vectors: &[Vec<BigInt>], dim: usize, max_len: usize) -> Self {
        let mut lo = vec![BigInt::zero(); dim];
        let mut hi = vec![BigInt::zero(); dim];
        for v in letter_vectors {
            for (c, a) in v.iter().enumerate() {
                if *a < lo[c] {
                    lo[c] = a.clone();
                }
                if *a > hi[c] {
                    hi[c] = a.clone();
                }
            }
        }
        let table = Self::build_table(letter_vectors, dim, max_len);
        Self { lo, hi, table }
    }

    fn build_table(letter_vectors: &[Vec<BigInt>], dim: usize, max_len: usize) -> Option<HashMap<Vec<i64>, usize>> {
        let mut letters: Vec<Vec<i64>> = letter_vectors
            .iter()
            .map(|v| v.iter().map(|a| i64::try_from(a).ok()).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()?;
        letters.sort();
        letters.dedup();
        let mut table = HashMap::new();
        let origin = vec![0i64; dim];
        table.insert(origin.clone(), 0usize);
        let mut frontier = vec![origin];
        for depth in 1..=max_len {
            let mut next = Vec::new();
            for f in &frontier {
                for l in &letters {
                    let s: Vec<i64> = f.iter().zip(l).map(|(a, b)| a.checked_add(*b)).collect::<Option<_>>()?;
                    if let Entry::Vacant(slot) = table.entry(s) {
                        next.push(slot.key().clone());
                        slot.insert(depth);
                    }
                }
            }
            if table.len() > REACH_TABLE_CAP {
                return None;
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Some(table)
    }

    pub fn has_exact_table(&self) -> bool {
        self.table.is_some()
    }

    /// Whether `remainder` is a sum of at most `remaining` letter vectors
    /// (exact when the table is present, an over-approximation otherwise).
    pub fn admits(&self, remainder: &[BigInt], remaining: usize) -> bool {
        let r = BigInt::from(remaining);
        for (c, a) in remainder.iter().enumerate() {
            let lo = (&self.lo[c] * &r).min(BigInt::zero());
            let hi = (&self.hi[c] * &r).max(BigInt::zero());
            if *a < lo || *a > hi {
                return false;
            }
        }
        match &self.table {
            None => true,
            Some(t) => {
                let key: Option<Vec<i64>> = remainder.iter().map(|a| i64::try_from(a).ok()).collect();
                match key.and_then(|k| t.get(&k).copied()) {
                    Some(min_len) => min_len <= remaining,
                    // Every sum of at most `max_len` letters is in the table.
                    None => false,
                }
            }
        }
    }
}

pub(crate) fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

struct Enumerator<'a> {
    letters: &'a [Element],
    letter_ab: Vec<Vec<BigInt>>,
    target: &'a Element,
    target_ab: Vec<BigInt>,
    reach: Option<AbelianReach>,
    max_len: usize,
    cap: Option<u64>,
    examined: u64,
    truncated: bool,
    prefix: Vec<usize>,
    found: Vec<Word>,
}

impl Enumerator<'_> {
    fn visit(&mut self, value: &Element, ab: &[BigInt]) -> Result<(), GroupError> {
        if self.cap.is_some_and(|cap| self.examined >= cap) {
            self.truncated = true;
            return Ok(());
        }
        self.examined += 1;
        if value == self.target {
            self.found.push(Word(self.prefix.clone()));
        }
        if self.prefix.len() == self.max_len {
            return Ok(());
        }
        let remaining = self.max_len - self.prefix.len() - 1;
        for i in 0..self.letters.len() {
            let next_ab: Vec<BigInt> = ab.iter().zip(&self.letter_ab[i]).map(|(a, b)| a + b).collect();
            if let Some(reach) = &self.reach {
                if !reach.admits(&sub(&self.target_ab, &next_ab), remaining) {
                    continue;
                }
            }
            let next = value.multiply(&self.letters[i])?;
            self.prefix.push(i);
            self.visit(&next, &next_ab)?;
            self.prefix.pop();
            if self.truncated {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// All words of length at most `budget.max_len` whose value is `target`, in
/// length-then-lexicographic order.
///
/// With [`Projection::Abelianization`] the search skips prefixes that cannot
/// reach the target's abelianization; the returned set is unchanged.
pub fn find_words_with_value(
    alphabet: &Alphabet,
    target: &Element,
    budget: &EnumerationBudget,
) -> Result<WordSearch, WordError> {
    alphabet.group.check(target).map_err(WordError::ForeignTarget)?;
    let letter_ab: Vec<Vec<BigInt>> = alphabet.letters.iter().map(Element::abelianize).collect();
    let target_ab = target.abelianize();
    let dim = target_ab.len();
    let reach = match budget.projection {
        Projection::None => None,
        Projection::Abelianization => Some(AbelianReach::new(&letter_ab, dim, budget.max_len)),
    };
    let mut e = Enumerator {
        letters: &alphabet.letters,
        letter_ab,
        target,
        target_ab,
        reach,
        max_len: budget.max_len,
        cap: budget.max_candidates,
        examined: 0,
        truncated: false,
        prefix: Vec::new(),
        found: Vec::new(),
    };
    let root_ok = e.reach.as_ref().is_none_or(|r| r.admits(&e.target_ab, budget.max_len));
    if root_ok {
        let id = alphabet.group.identity();
        let zero = vec![BigInt::zero(); dim];
        e.visit(&id, &zero)?;
    }
    let mut words = e.found;
    words.sort();
    Ok(WordSearch {
        words,
        examined: e.examined,
        truncated: e.truncated,
    })
}

/// The alphabet `(t, y, x)` in `H3` with `t = x^{-1} z`.
pub fn prop21_alphabet() -> Alphabet {
    let t = HeisenbergElement::from_i64(&[-1], &[0], 1);
    let y = HeisenbergElement::from_i64(&[0], &[1], 0);
    let x = HeisenbergElement::from_i64(&[1], &[0], 0);
    Alphabet::new(GroupDescriptor::heisenberg(1), vec![t.into(), y.into(), x.into()]).expect("letters live in H3")
}

/// The word `t^n y x^n` over [`prop21_alphabet`].
pub fn t_y_x_word(n: usize) -> Word {
    let mut w = vec![0; n];
    w.push(1);
    w.extend(std::iter::repeat_n(2, n));
    Word(w)
}

/// Exhaustively checks that among all words over `(t, y, x)` of length at
/// most `max_len`, the ones with value `y` are exactly `t^n y x^n`.
///
/// `max_n` is the largest `n` the caller needs covered; the bound must admit
/// `t^{max_n} y x^{max_n}`.
pub fn check_prop21(max_n: usize, max_len: usize) -> Result<GadgetCertificate, WordError> {
    if max_len < 2 * max_n + 1 {
        return Err(WordError::Usage(format!(
            "max_len {max_len} is too short to contain t^{max_n} y x^{max_n}"
        )));
    }
    let alphabet = prop21_alphabet();
    let y = alphabet.letters[1].clone();
    let search = find_words_with_value(&alphabet, &y, &EnumerationBudget::new(max_len))?;
    let expected: Vec<Word> = (0..=(max_len - 1) / 2).map(t_y_x_word).collect();

    let extra = search.words.iter().find(|w| !expected.contains(w));
    let missing = expected.iter().find(|w| !search.words.contains(w));
    let verdict = match (extra, missing) {
        (Some(w), _) => Verdict::Counterexample {
            witness: json!(w),
            reason: "word with value y not of the form t^n y x^n".into(),
        },
        (None, Some(w)) => Verdict::Counterexample {
            witness: json!(w),
            reason: "t^n y x^n does not evaluate to y".into(),
        },
        (None, None) => Verdict::Verified,
    };
    Ok(GadgetCertificate {
        gadget: "prop21".into(),
        mode: "all-words".into(),
        bounds: json!({ "max_n": max_n, "max_len": max_len }),
        verdict,
        examined: search.examined,
        details: json!({
            "alphabet": ["t", "y", "x"],
            "words_with_value_y": search.words,
        }),
    })
}
