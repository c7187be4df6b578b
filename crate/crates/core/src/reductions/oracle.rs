//! Brute-force products of submonoid balls, computed directly in `G`.

use std::collections::HashSet;

use rayon::prelude::*;

use super::{ProductInstance, ReductionError};
use crate::group::{Element, GroupDescriptor};

/// `M_0 c_1 M_1 c_2 .. c_k M_k` for submonoids `M_i = <S_i>` and fixed
/// elements `c_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductPattern {
    group: GroupDescriptor,
    factors: Vec<Vec<Element>>,
    between: Vec<Element>,
}

impl ProductPattern {
    pub fn new(group: GroupDescriptor, factors: Vec<Vec<Element>>, between: Vec<Element>) -> Self {
        assert_eq!(
            factors.len(),
            between.len() + 1,
            "one fixed element between consecutive factors"
        );
        Self {
            group,
            factors,
            between,
        }
    }

    /// `M_1 .. M_n`.
    pub fn plain(group: GroupDescriptor, factors: Vec<Vec<Element>>) -> Self {
        let between = vec![group.identity(); factors.len() - 1];
        Self::new(group, factors, between)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn factors(&self) -> &[Vec<Element>] {
        &self.factors
    }

    pub fn between(&self) -> &[Element] {
        &self.between
    }
}

/// Distinct values of positive words of length at most `radius` over
/// `generators`, in order of first appearance by length.
pub fn factor_ball(group: &GroupDescriptor, generators: &[Element], radius: usize) -> Vec<Element> {
    let id = group.identity();
    let mut seen: HashSet<Element> = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut layer = 0..1;
    for _ in 0..radius {
        let start = out.len();
        for i in layer.clone() {
            for s in generators {
                let c = out[i].multiply(s).expect("generators conform");
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        }
        layer = start..out.len();
        if layer.is_empty() {
            break;
        }
    }
    out
}

fn times(set: &HashSet<Element>, right: &[Element]) -> HashSet<Element> {
    set.par_iter()
        .flat_map_iter(|a| right.iter().map(move |b| a.multiply(b).expect("same group")))
        .collect()
}

/// The product set of a [`ProductPattern`] with every factor cut to words of
/// at most `radius` generators. All factors but the last are multiplied out;
/// membership then looks up `p^{-1} g` in the last ball for each prefix `p`.
#[derive(Clone, Debug)]
pub struct ProductOracle {
    radius: usize,
    prefixes: Vec<Element>,
    last: HashSet<Element>,
    last_ball: Vec<Element>,
}

impl ProductOracle {
    pub fn new(pattern: &ProductPattern, radius: usize) -> Self {
        let g = &pattern.group;
        let mut prefixes: HashSet<Element> = HashSet::from([g.identity()]);
        let k = pattern.factors.len();
        for (i, gens) in pattern.factors[..k - 1].iter().enumerate() {
            prefixes = times(&prefixes, &factor_ball(g, gens, radius));
            prefixes = times(&prefixes, std::slice::from_ref(&pattern.between[i]));
        }
        let mut prefixes: Vec<Element> = prefixes.into_iter().collect();
        prefixes.sort();
        let last_ball = factor_ball(g, &pattern.factors[k - 1], radius);
        Self {
            radius,
            prefixes,
            last: last_ball.iter().cloned().collect(),
            last_ball,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.prefixes
            .par_iter()
            .any(|p| self.last.contains(&p.inverse().multiply(g).expect("same group")))
    }

    /// Every element of the product set, sorted.
    pub fn elements(&self) -> Vec<Element> {
        let set: HashSet<Element> = self
            .prefixes
            .par_iter()
            .flat_map_iter(|p| self.last_ball.iter().map(move |m| p.multiply(m).expect("same group")))
            .collect();
        let mut out: Vec<Element> = set.into_iter().collect();
        out.sort();
        out
    }
}

/// Whether `g = m_1 .. m_n` with each `m_i` a product of at most
/// `per_factor_len` generators of the `i`-th submonoid. Conjugators, if
/// present, are ignored: this is the plain product `M_1 .. M_n`.
pub fn product_membership_oracle(
    instance: &ProductInstance,
    g: &Element,
    per_factor_len: usize,
) -> Result<bool, ReductionError> {
    instance.group().check(g)?;
    let pattern = ProductPattern::plain(instance.group().clone(), instance.submonoids().to_vec());
    Ok(ProductOracle::new(&pattern, per_factor_len).contains(g))
}
