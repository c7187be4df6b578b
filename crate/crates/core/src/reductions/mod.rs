//! Section reductions: a finitely generated submonoid `<T>` of `G x H` and a
//! target `h in H` whose section `{g : (g, h) in <T>}` is a prescribed
//! product of submonoids of `G`.
//!
//! Four constructions are provided:
//!
//! * [`build_pair_product_section`]: `A B` inside `G x H3` via the letters
//!   `t = x^{-1} z`, `y`, `x`;
//! * [`build_conjugate_product_section`]: `M g_1 M .. g_n M` inside
//!   `G x H3/<z^e>` via a unique-product gadget;
//! * [`build_product_section_h5`]: `M_1 .. M_n` inside `G x H5`;
//! * [`build_conjugate_section_h5`]: `M_1 .. M_n` inside
//!   `G x (H5 x H3/<z^e>)` via the polygon gadget.

mod equivalence;
mod oracle;
mod search;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::format::encode_element;
use crate::gadgets::{
    make_h5_vectors, make_main_gadget_elements, make_polygon_gadget, make_unique_product_gadget, GadgetError,
};
use crate::group::{Element, GroupDescriptor, GroupError, HeisenbergElement};
use crate::words::{evaluate_word, Alphabet, Word, WordError};

pub use equivalence::{
    explore_section, section_equivalence_check, EquivalenceReport, SectionEntry, SectionExploration, SoundnessViolation,
};
pub use oracle::{factor_ball, product_membership_oracle, ProductOracle, ProductPattern};
pub use search::{bounded_submonoid_membership, submonoid_membership, MembershipOutcome, MembershipVerdict};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Word(#[from] WordError),
    /// A construction produced something its own guarantees rule out.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

/// A finite generating set `S` of the submonoid `<S>` of a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmonoidPresentation {
    group: GroupDescriptor,
    generators: Vec<Element>,
}

impl SubmonoidPresentation {
    pub fn new(group: GroupDescriptor, generators: Vec<Element>) -> Result<Self, ReductionError> {
        group.validate()?;
        for g in &generators {
            group.check(g)?;
        }
        Ok(Self { group, generators })
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// The generators with the identity appended unless already present.
    pub fn with_identity(&self) -> Vec<Element> {
        let mut gens = self.generators.clone();
        if !gens.iter().any(Element::is_identity) {
            gens.push(self.group.identity());
        }
        gens
    }
}

/// Submonoids `M_1, .., M_n` of a common group, and optionally conjugators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductInstance {
    group: GroupDescriptor,
    submonoids: Vec<Vec<Element>>,
    conjugators: Option<Vec<Element>>,
}

impl ProductInstance {
    pub fn new(
        group: GroupDescriptor,
        submonoids: Vec<Vec<Element>>,
        conjugators: Option<Vec<Element>>,
    ) -> Result<Self, ReductionError> {
        group.validate()?;
        if submonoids.is_empty() {
            return Err(ReductionError::Usage("an instance needs at least one submonoid".into()));
        }
        for g in submonoids.iter().flatten().chain(conjugators.iter().flatten()) {
            group.check(g)?;
        }
        Ok(Self {
            group,
            submonoids,
            conjugators,
        })
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.submonoids.len()
    }

    pub fn submonoids(&self) -> &[Vec<Element>] {
        &self.submonoids
    }

    pub fn conjugators(&self) -> Option<&[Element]> {
        self.conjugators.as_deref()
    }

    pub fn factor(&self, i: usize) -> SubmonoidPresentation {
        SubmonoidPresentation {
            group: self.group.clone(),
            generators: self.submonoids[i].clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        let enc = |v: &[Element]| v.iter().map(encode_element).collect::<Vec<_>>();
        let mut out = json!({
            "version": crate::format::FORMAT_VERSION,
            "group": crate::format::encode_group(&self.group),
            "submonoids": self.submonoids.iter().map(|s| enc(s)).collect::<Vec<_>>(),
        });
        if let Some(c) = &self.conjugators {
            out["conjugators"] = json!(enc(c));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Pair,
    Conjugate,
    ProductH5,
    ConjugateH5,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pair => "pair",
            Self::Conjugate => "conjugate",
            Self::ProductH5 => "product-h5",
            Self::ConjugateH5 => "conjugate-h5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Pair, Self::Conjugate, Self::ProductH5, Self::ConjugateH5]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

impl std::fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How a generator of `T` is placed in a word with section value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Belongs to the block of factor `i` only.
    Factor(usize),
    /// May occur in any block.
    Free,
    /// The `j`-th block boundary; occurs exactly once, in order.
    Separator(usize),
}

/// A generating set `T` of a submonoid of `G x H` and a target `h in H`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionReduction {
    kind: ReductionKind,
    instance: ProductInstance,
    ambient: GroupDescriptor,
    generators: Vec<Element>,
    roles: Vec<Role>,
    target: Element,
    meta: Value,
}

impl SectionReduction {
    pub fn kind(&self) -> ReductionKind {
        self.kind
    }

    /// The instance the reduction was built from.
    pub fn instance(&self) -> &ProductInstance {
        &self.instance
    }

    /// `G x H`.
    pub fn ambient(&self) -> &GroupDescriptor {
        &self.ambient
    }

    pub fn g_group(&self) -> &GroupDescriptor {
        self.ambient.factor(0).expect("ambient is a pair")
    }

    pub fn h_group(&self) -> &GroupDescriptor {
        self.ambient.factor(1).expect("ambient is a pair")
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn target(&self) -> &Element {
        &self.target
    }

    pub fn meta(&self) -> &Value {
        &self.meta
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.ambient.clone(), self.generators.clone()).expect("generators conform")
    }

    /// `(g, h)` for the reduction's target `h`.
    pub fn query(&self, g: Element) -> Element {
        Element::pair(g, self.target.clone())
    }

    /// Number of separator letters in every word with section value.
    pub fn separators(&self) -> usize {
        self.roles.iter().filter(|r| matches!(r, Role::Separator(_))).count()
    }

    /// Number of blocks the separators cut such a word into.
    pub fn blocks(&self) -> usize {
        self.separators() + 1
    }

    /// Length within which every product with factors of at most `radius`
    /// generators has a witness: full blocks of `radius` letters (shorter
    /// factors padded with the identity) plus the separators.
    pub fn completeness_length(&self, radius: usize) -> usize {
        self.blocks() * radius + self.separators()
    }

    /// The product the section is expected to equal.
    pub fn pattern(&self) -> ProductPattern {
        let inst = &self.instance;
        match self.kind {
            ReductionKind::Conjugate => {
                let s = inst.submonoids[0].clone();
                let conj = inst.conjugators.clone().unwrap_or_default();
                ProductPattern::new(inst.group.clone(), vec![s; conj.len() + 1], conj)
            }
            _ => ProductPattern::plain(inst.group.clone(), inst.submonoids.clone()),
        }
    }

    /// A copy with a different target, keeping everything else.
    pub fn with_target(&self, target: Element) -> Result<Self, ReductionError> {
        self.h_group().check(&target)?;
        Ok(Self { target, ..self.clone() })
    }
}

fn pair_ambient(g: &GroupDescriptor, h: GroupDescriptor) -> GroupDescriptor {
    GroupDescriptor::product(vec![g.clone(), h])
}

fn require_same_group(a: &GroupDescriptor, b: &GroupDescriptor) -> Result<(), ReductionError> {
    if a != b {
        return Err(ReductionError::Usage(format!(
            "submonoids live in different groups: {a} and {b}"
        )));
    }
    Ok(())
}

fn encode_all(v: &[Element]) -> Vec<Value> {
    v.iter().map(encode_element).collect()
}

/// `T = {(a, t)} u {(1, y)} u {(b, x)}` over `A u {1}` and `B u {1}` in
/// `G x H3`, `t = x^{-1} z`, target `y`. Every word with value `y` in the
/// `H3` coordinate has the shape `t^n y x^n`.
pub fn build_pair_product_section(
    a: &SubmonoidPresentation,
    b: &SubmonoidPresentation,
) -> Result<SectionReduction, ReductionError> {
    require_same_group(&a.group, &b.group)?;
    let g = &a.group;
    let t: Element = HeisenbergElement::from_i64(&[-1], &[0], 1).into();
    let y: Element = HeisenbergElement::from_i64(&[0], &[1], 0).into();
    let x: Element = HeisenbergElement::from_i64(&[1], &[0], 0).into();
    let mut generators = Vec::new();
    let mut roles = Vec::new();
    for s in a.with_identity() {
        generators.push(Element::pair(s, t.clone()));
        roles.push(Role::Factor(0));
    }
    generators.push(Element::pair(g.identity(), y.clone()));
    roles.push(Role::Separator(0));
    for s in b.with_identity() {
        generators.push(Element::pair(s, x.clone()));
        roles.push(Role::Factor(1));
    }
    let instance = ProductInstance::new(g.clone(), vec![a.generators.clone(), b.generators.clone()], None)?;
    let meta = json!({
        "instance": instance.to_json(),
        "letters": { "t": encode_element(&t), "y": encode_element(&y), "x": encode_element(&x) },
    });
    Ok(SectionReduction {
        kind: ReductionKind::Pair,
        ambient: pair_ambient(g, GroupDescriptor::heisenberg(1)),
        instance,
        generators,
        roles,
        target: y,
        meta,
    })
}

/// `T = S x {1} u {(g_i, h_i)}` in `G x H3/<z^e>` with the unique-product
/// letters `h_i`, target `v = h_1 .. h_n`. The section is
/// `<S> g_1 <S> g_2 .. g_n <S>`.
pub fn build_conjugate_product_section(
    s: &SubmonoidPresentation,
    conjugators: &[Element],
) -> Result<SectionReduction, ReductionError> {
    if conjugators.is_empty() {
        return Err(ReductionError::Usage(
            "the conjugate reduction needs at least one conjugator".into(),
        ));
    }
    let g = &s.group;
    let gadget = make_unique_product_gadget(conjugators.len())?;
    let h_group = gadget.group();
    let one_h = h_group.identity();
    let mut generators = Vec::new();
    let mut roles = Vec::new();
    for x in &s.generators {
        generators.push(Element::pair(x.clone(), one_h.clone()));
        roles.push(Role::Free);
    }
    for (j, (c, h)) in conjugators.iter().zip(gadget.quotient_letters()).enumerate() {
        g.check(c)?;
        generators.push(Element::pair(c.clone(), h.into()));
        roles.push(Role::Separator(j));
    }
    let instance = ProductInstance::new(g.clone(), vec![s.generators.clone()], Some(conjugators.to_vec()))?;
    let meta = json!({ "instance": instance.to_json(), "gadget": gadget.to_json() });
    Ok(SectionReduction {
        kind: ReductionKind::Conjugate,
        ambient: pair_ambient(g, h_group),
        instance,
        generators,
        roles,
        target: gadget.target().clone().into(),
        meta,
    })
}

/// Rewrites `g in M^{g_1} .. M^{g_n}` (with `M^c = c^{-1} M c`) as the
/// membership of `(g_1 g g_n^{-1}, v)` in the conjugate reduction with
/// conjugators `g_1 g_2^{-1}, .., g_{n-1} g_n^{-1}`. For `n = 1` the single
/// conjugator `1_G` is used, so the section is `M 1 M = M`.
pub fn reduce_conjugate_membership(
    g: &Element,
    s: &SubmonoidPresentation,
    conjugators: &[Element],
) -> Result<(SectionReduction, Element), ReductionError> {
    let (first, last) = match (conjugators.first(), conjugators.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(ReductionError::Usage("at least one conjugator is required".into())),
    };
    s.group.check(g)?;
    let between: Vec<Element> = if conjugators.len() == 1 {
        vec![s.group.identity()]
    } else {
        conjugators
            .windows(2)
            .map(|w| w[0].multiply(&w[1].inverse()))
            .collect::<Result<_, _>>()?
    };
    let red = build_conjugate_product_section(s, &between)?;
    let shifted = first.multiply(g)?.multiply(&last.inverse())?;
    let query = red.query(shifted);
    Ok((red, query))
}

/// `T = U_i (S_i u {1}) x {uu_i} u {(1, vv_j)}` in `G x H5`, target
/// `h = vv_1 .. vv_{n-1}`. For `n = 1`, `T = S_1 x {1}` with target `1`.
pub fn build_product_section_h5(instance: &ProductInstance) -> Result<SectionReduction, ReductionError> {
    if instance.conjugators.is_some() {
        return Err(ReductionError::Usage(
            "product-h5 takes no conjugators; use the conjugate reduction for conjugate products".into(),
        ));
    }
    let g = &instance.group;
    let n = instance.n();
    let h_group = GroupDescriptor::heisenberg(2);
    if n == 1 {
        let one_h: Element = HeisenbergElement::identity(2).into();
        let gens: Vec<Element> = instance.submonoids[0]
            .iter()
            .map(|s| Element::pair(s.clone(), one_h.clone()))
            .collect();
        return Ok(SectionReduction {
            kind: ReductionKind::ProductH5,
            ambient: pair_ambient(g, h_group),
            roles: vec![Role::Factor(0); gens.len()],
            generators: gens,
            target: one_h,
            meta: json!({ "instance": instance.to_json() }),
            instance: instance.clone(),
        });
    }
    let vectors = make_h5_vectors(n)?;
    let main = make_main_gadget_elements(&vectors);
    let mut generators = Vec::new();
    let mut roles = Vec::new();
    for (i, uu) in main.uu().iter().enumerate() {
        for s in instance.factor(i).with_identity() {
            generators.push(Element::pair(s, uu.clone().into()));
            roles.push(Role::Factor(i));
        }
    }
    for (j, vv) in main.vv().iter().enumerate() {
        generators.push(Element::pair(g.identity(), vv.clone().into()));
        roles.push(Role::Separator(j));
    }
    let meta = json!({
        "instance": instance.to_json(),
        "vectors": vectors.to_json(),
        "elements": main.to_json(),
    });
    Ok(SectionReduction {
        kind: ReductionKind::ProductH5,
        ambient: pair_ambient(g, h_group),
        instance: instance.clone(),
        generators,
        roles,
        target: main.target().clone().into(),
        meta,
    })
}

/// The polygon construction composed with the conjugate reduction.
///
/// With `uu_i = x^{u_i} z^{<u_i, v_i>}` and `h_i = (1, y^{-v_i})`, the
/// submonoid `M = <U_i (S_i u {1}) x {uu_i}>` of `G x H5` satisfies
/// `(M^{h_1} .. M^{h_n}) n G = M_1 .. M_n`. The conjugate reduction over
/// `G x H5` with conjugators `h_k h_{k+1}^{-1}` then gives generators in
/// `G x H5 x H3/<z^e>`, arranged here as `G x (H5 x H3/<z^e>)`, with target
/// `(y^{v_n - v_1}, v)`.
pub fn build_conjugate_section_h5(instance: &ProductInstance) -> Result<SectionReduction, ReductionError> {
    if instance.conjugators.is_some() {
        return Err(ReductionError::Usage(
            "conjugate-h5 takes no conjugators; the conjugating elements come from the polygon gadget".into(),
        ));
    }
    let g = &instance.group;
    let n = instance.n();
    if n == 1 {
        let h_group = GroupDescriptor::product(vec![
            GroupDescriptor::heisenberg(2),
            GroupDescriptor::heisenberg_mod(1, 1),
        ]);
        let one_h = h_group.identity();
        let gens: Vec<Element> = instance.submonoids[0]
            .iter()
            .map(|s| Element::pair(s.clone(), one_h.clone()))
            .collect();
        return Ok(SectionReduction {
            kind: ReductionKind::ConjugateH5,
            ambient: pair_ambient(g, h_group),
            roles: vec![Role::Factor(0); gens.len()],
            generators: gens,
            target: one_h,
            meta: json!({ "instance": instance.to_json() }),
            instance: instance.clone(),
        });
    }
    let polygon = make_polygon_gadget(n)?;
    let gadget = make_unique_product_gadget(n - 1)?;
    let q_group = gadget.group();
    let one_q = q_group.identity();
    let h_group = GroupDescriptor::product(vec![GroupDescriptor::heisenberg(2), q_group]);
    let lifted = polygon.lifted_vertices();
    let conj = polygon.conjugators();
    let mut generators = Vec::new();
    let mut roles = Vec::new();
    for (i, uu) in lifted.iter().enumerate() {
        for s in instance.factor(i).with_identity() {
            generators.push(Element::pair(
                s,
                Element::Product(vec![uu.clone().into(), one_q.clone()]),
            ));
            roles.push(Role::Factor(i));
        }
    }
    let mut between = Vec::new();
    for (k, hk) in gadget.quotient_letters().into_iter().enumerate() {
        let c = conj[k].multiply(&conj[k + 1].inverse())?;
        between.push(encode_element(&c.clone().into()));
        generators.push(Element::pair(g.identity(), Element::Product(vec![c.into(), hk.into()])));
        roles.push(Role::Separator(k));
    }
    let offset = conj[0].multiply(&conj[n - 1].inverse())?;
    let target = Element::Product(vec![offset.into(), gadget.target().clone().into()]);
    let meta = json!({
        "instance": instance.to_json(),
        "polygon": polygon.to_json(),
        "unique_product": gadget.to_json(),
        "conjugators": between,
    });
    Ok(SectionReduction {
        kind: ReductionKind::ConjugateH5,
        ambient: pair_ambient(g, h_group),
        instance: instance.clone(),
        generators,
        roles,
        target,
        meta,
    })
}

/// Builds the reduction of the given kind, checking that the instance has
/// the shape the kind expects.
pub fn build_reduction(kind: ReductionKind, instance: &ProductInstance) -> Result<SectionReduction, ReductionError> {
    match kind {
        ReductionKind::Pair => {
            if instance.conjugators.is_some() {
                return Err(ReductionError::Usage("pair takes no conjugators".into()));
            }
            if instance.n() != 2 {
                return Err(ReductionError::Usage(format!(
                    "pair needs exactly 2 submonoids, the instance has {}",
                    instance.n()
                )));
            }
            build_pair_product_section(&instance.factor(0), &instance.factor(1))
        }
        ReductionKind::Conjugate => {
            let Some(conj) = instance.conjugators() else {
                return Err(ReductionError::Usage(
                    "conjugate needs a \"conjugators\" list in the instance".into(),
                ));
            };
            if instance.n() != 1 {
                return Err(ReductionError::Usage(format!(
                    "conjugate needs exactly 1 submonoid, the instance has {}",
                    instance.n()
                )));
            }
            build_conjugate_product_section(&instance.factor(0), conj)
        }
        ReductionKind::ProductH5 => build_product_section_h5(instance),
        ReductionKind::ConjugateH5 => build_conjugate_section_h5(instance),
    }
}

/// Ordered factorization read off a witness word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// Product of the `G` components in each block, `m_0, .., m_k`.
    pub factors: Vec<Element>,
    /// `G` components of the separator letters between the blocks.
    pub separators: Vec<Element>,
}

impl Factorization {
    /// `m_0 s_1 m_1 .. s_k m_k`.
    pub fn product(&self) -> Result<Element, GroupError> {
        let mut acc = self.factors[0].clone();
        for (s, m) in self.separators.iter().zip(&self.factors[1..]) {
            acc = acc.multiply(s)?.multiply(m)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "factors": encode_all(&self.factors),
            "separators": encode_all(&self.separators),
        })
    }
}

/// Splits a word whose `H` component is the target into its blocks and
/// multiplies out the `G` components of each block.
///
/// Fails with [`ReductionError::Internal`] if the separators are missing or
/// out of order, or a letter sits in a block it does not belong to; the
/// constructions guarantee neither can happen.
pub fn witness_translate(red: &SectionReduction, word: &Word) -> Result<Factorization, ReductionError> {
    let value = evaluate_word(&red.alphabet(), word)?;
    if value.component(1) != Some(&red.target) {
        return Err(ReductionError::Usage(
            "the word does not evaluate into the target section".into(),
        ));
    }
    let g_of = |i: usize| red.generators[i].component(0).expect("pair").clone();
    let id = red.g_group().identity();
    let mut factors = vec![id.clone()];
    let mut separators = Vec::new();
    for &letter in &word.0 {
        let block = separators.len();
        match red.roles[letter] {
            Role::Separator(j) => {
                if j != block {
                    return Err(ReductionError::Internal(format!(
                        "separator {j} appears where separator {block} was expected"
                    )));
                }
                separators.push(g_of(letter));
                factors.push(id.clone());
            }
            Role::Factor(i) if i != block => {
                return Err(ReductionError::Internal(format!(
                    "a letter of factor {i} appears in block {block}"
                )));
            }
            Role::Factor(_) | Role::Free => {
                let m = factors.last_mut().expect("non-empty");
                *m = m.multiply(&g_of(letter))?;
            }
        }
    }
    if separators.len() != red.separators() {
        return Err(ReductionError::Internal(format!(
            "word has {} separators, expected {}",
            separators.len(),
            red.separators()
        )));
    }
    let f = Factorization { factors, separators };
    if Some(&f.product()?) != value.component(0) {
        return Err(ReductionError::Internal(
            "block products do not multiply back to the G component".into(),
        ));
    }
    Ok(f)
}
