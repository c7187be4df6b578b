//! Combinatorial gadgets: super-increasing sequences, unique-product
//! families in `H3/<z^e>`, the `H5` vector family and the convex-polygon
//! family, plus exhaustive verifiers for each (see [`verify`]).

pub mod verify;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::format::encode_element;
use crate::group::{dot, Element, GroupDescriptor, HeisenbergElement, QuotientElement};
use crate::words::Alphabet;

pub use verify::{verify_gadget, CheckMode, GadgetRef, VerifyOptions};

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("{0}")]
    Usage(String),
    #[error("gadget construction failed: {0}")]
    Construction(String),
}

/// Integer vector in the plane.
pub type Vec2 = [BigInt; 2];

pub fn vec2(a: i64, b: i64) -> Vec2 {
    [BigInt::from(a), BigInt::from(b)]
}

pub(crate) fn ints_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|n| Value::String(n.to_string())).collect())
}

pub(crate) fn rows_json<R: AsRef<[BigInt]>>(rows: &[R]) -> Value {
    Value::Array(rows.iter().map(|r| ints_json(r.as_ref())).collect())
}

fn dot2(u: &Vec2, v: &Vec2) -> BigInt {
    dot(u, v)
}

/// Positive integers with `b_i > i * b_{i-1}` (1-based), so that the plane
/// vectors `(1, b_i)` recombine uniquely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperIncreasingSequence {
    terms: Vec<BigInt>,
}

impl SuperIncreasingSequence {
    pub fn new(terms: Vec<BigInt>) -> Result<Self, GadgetError> {
        if terms.is_empty() {
            return Err(GadgetError::Usage("sequence must be non-empty".into()));
        }
        if !terms[0].is_positive() {
            return Err(GadgetError::Usage(format!("b_1 = {} must be positive", terms[0])));
        }
        for i in 1..terms.len() {
            // 1-based index of terms[i] is i + 1
            if terms[i] <= BigInt::from(i + 1) * &terms[i - 1] {
                return Err(GadgetError::Usage(format!(
                    "b_{} = {} is not greater than {} * b_{} = {}",
                    i + 1,
                    terms[i],
                    i + 1,
                    i,
                    BigInt::from(i + 1) * &terms[i - 1]
                )));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The plane vectors `(1, b_i)`.
    pub fn vectors(&self) -> Vec<Vec2> {
        self.terms.iter().map(|b| [BigInt::one(), b.clone()]).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({ "kind": "superincreasing", "n": self.len(), "b": ints_json(&self.terms) })
    }
}

/// Minimal canonical sequence `b_1 = 1`, `b_i = i * b_{i-1} + 1`.
pub fn make_superincreasing(m: usize) -> Result<SuperIncreasingSequence, GadgetError> {
    if m == 0 {
        return Err(GadgetError::Usage("sequence length must be at least 1".into()));
    }
    let mut terms = vec![BigInt::one()];
    for i in 2..=m {
        let next = BigInt::from(i) * &terms[i - 2] + 1;
        terms.push(next);
    }
    SuperIncreasingSequence::new(terms)
}

/// Letters `h_i = x^{b_i} y` of `H3` whose in-order product `h_1 .. h_n` is,
/// in `H3/<z^e>`, the value of no other positive word in them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniqueProductGadget {
    b: SuperIncreasingSequence,
    modulus: BigInt,
    letters: Vec<HeisenbergElement>,
    target: QuotientElement,
}

impl UniqueProductGadget {
    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn b(&self) -> &SuperIncreasingSequence {
        &self.b
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// The letters `h_i` in `H3`.
    pub fn letters(&self) -> &[HeisenbergElement] {
        &self.letters
    }

    /// `v = h_1 .. h_n` in `H3/<z^e>`.
    pub fn target(&self) -> &QuotientElement {
        &self.target
    }

    pub fn group(&self) -> GroupDescriptor {
        GroupDescriptor::heisenberg_mod(1, self.modulus.clone())
    }

    pub fn quotient_letters(&self) -> Vec<QuotientElement> {
        self.letters
            .iter()
            .map(|h| QuotientElement::project(h, &self.modulus).expect("positive modulus"))
            .collect()
    }

    /// The letters as an alphabet over `H3/<z^e>`.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(
            self.group(),
            self.quotient_letters().into_iter().map(Element::from).collect(),
        )
        .expect("letters live in the quotient")
    }

    /// `sum_{i<j} (b_j - b_i)`, the largest possible defect.
    pub fn max_defect(&self) -> BigInt {
        let b = self.b.terms();
        let mut s = BigInt::zero();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                s += &b[j] - &b[i];
            }
        }
        s
    }

    /// `h_{p(0)} .. h_{p(n-1)}` in `H3` (not reduced).
    pub fn product_in_order(&self, order: &[usize]) -> HeisenbergElement {
        order.iter().fold(HeisenbergElement::identity(1), |acc, &i| {
            acc.multiply(&self.letters[i]).expect("rank 1")
        })
    }

    /// The exponent `f` with `h_{p(0)} .. h_{p(n-1)} = (h_1 .. h_n) z^f` in `H3`.
    pub fn defect(&self, order: &[usize]) -> BigInt {
        let identity: Vec<usize> = (0..self.n()).collect();
        self.product_in_order(order).z() - self.product_in_order(&identity).z()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "unique-product",
            "n": self.n(),
            "b": ints_json(self.b.terms()),
            "e": self.modulus.to_string(),
            "h": self.letters.iter().map(|h| encode_element(&h.clone().into())).collect::<Vec<_>>(),
            "v": encode_element(&self.target.clone().into()),
        })
    }
}

/// `h_i = x^{b_i} y` with the canonical super-increasing `b` and the least
/// admissible modulus `e = 1 + sum_{i<j} (b_j - b_i)`.
pub fn make_unique_product_gadget(n: usize) -> Result<UniqueProductGadget, GadgetError> {
    let b = make_superincreasing(n)?;
    let letters: Vec<HeisenbergElement> = b
        .terms()
        .iter()
        .map(|bi| HeisenbergElement::new(vec![bi.clone()], vec![BigInt::one()], BigInt::zero()).expect("rank 1"))
        .collect();
    let mut g = UniqueProductGadget {
        b,
        modulus: BigInt::one(),
        letters,
        target: QuotientElement::identity(1, &BigInt::one()).expect("positive modulus"),
    };
    g.modulus = g.max_defect() + 1;
    let identity: Vec<usize> = (0..n).collect();
    g.target = QuotientElement::project(&g.product_in_order(&identity), &g.modulus).expect("positive modulus");
    Ok(g)
}

/// Plane vectors `u_1..u_n`, `v_1..v_{n-1}` with
/// `<u_i, v_j> < 0` iff `i <= j` (and `> 0` otherwise), `sum u_i = 0`, and
/// unique non-negative recombination of `sum v_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H5VectorGadget {
    u: Vec<Vec2>,
    v: Vec<Vec2>,
    chain_a: Vec<BigInt>,
    chain_b: Vec<BigInt>,
    inner: Vec<Vec<BigInt>>,
}

impl H5VectorGadget {
    /// Builds the gadget from explicit vectors, computing the inner-product
    /// matrix. The invariants are not checked here; see [`verify_gadget`].
    pub fn from_vectors(u: Vec<Vec2>, v: Vec<Vec2>) -> Self {
        let inner = u.iter().map(|ui| v.iter().map(|vj| dot2(ui, vj)).collect()).collect();
        Self {
            u,
            v,
            chain_a: Vec::new(),
            chain_b: Vec::new(),
            inner,
        }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[Vec2] {
        &self.u
    }

    pub fn v(&self) -> &[Vec2] {
        &self.v
    }

    /// `a_1 .. a_n`; empty for the two-vector special case.
    pub fn chain_a(&self) -> &[BigInt] {
        &self.chain_a
    }

    /// `b_1 .. b_{n-1}`; empty for the two-vector special case.
    pub fn chain_b(&self) -> &[BigInt] {
        &self.chain_b
    }

    /// `e_{ij} = <u_i, v_j>` (0-based indices).
    pub fn inner(&self) -> &[Vec<BigInt>] {
        &self.inner
    }

    fn order_violation(&self) -> Option<(usize, usize)> {
        for (i, row) in self.inner.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let ok = if i <= j { e.is_negative() } else { e.is_positive() };
                if !ok {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn zero_sum(&self) -> bool {
        let sx: BigInt = self.u.iter().map(|p| &p[0]).sum();
        let sy: BigInt = self.u.iter().map(|p| &p[1]).sum();
        sx.is_zero() && sy.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "h5-vectors",
            "n": self.n(),
            "u": rows_json(&self.u),
            "v": rows_json(&self.v),
            "chain": { "a": ints_json(&self.chain_a), "b": ints_json(&self.chain_b) },
            "e_matrix": rows_json(&self.inner),
        })
    }
}

/// Canonical `H5` vector family.
///
/// For `n >= 3` the chain `a_1 < b_1 < a_2 < .. < b_{n-1} < a_n` is built
/// minimally (`a_1 = 1`, `b_i = max(a_i, i b_{i-1}) + 1`, `a_{i+1} = b_i + 1`)
/// and `v_j = (1, b_j)`, `u_i = (a_i, -1)` for `1 < i < n`,
/// `u_1 = (-sum_{1<i<n} a_i, 0)`, `u_n = (0, n - 2)`. For `n = 2` those
/// formulas give `u_2 = 0`, so the fixed family `u = ((-1,0), (1,0))`,
/// `v = ((1,1))` is used instead.
pub fn make_h5_vectors(n: usize) -> Result<H5VectorGadget, GadgetError> {
    if n < 2 {
        return Err(GadgetError::Usage(format!(
            "the H5 vector family needs n >= 2, got {n}"
        )));
    }
    let g = if n == 2 {
        H5VectorGadget::from_vectors(vec![vec2(-1, 0), vec2(1, 0)], vec![vec2(1, 1)])
    } else {
        let mut a = vec![BigInt::one()];
        let mut b: Vec<BigInt> = Vec::new();
        for i in 1..n {
            let prev = b.last().cloned().unwrap_or_default();
            let bi = (&a[i - 1]).max(&(BigInt::from(i) * prev)).clone() + 1;
            a.push(&bi + 1);
            b.push(bi);
        }
        let interior: BigInt = a[1..n - 1].iter().sum();
        let mut u = vec![[-interior, BigInt::zero()]];
        for ai in &a[1..n - 1] {
            u.push([ai.clone(), -BigInt::one()]);
        }
        u.push([BigInt::zero(), BigInt::from(n - 2)]);
        let v = b.iter().map(|bj| [BigInt::one(), bj.clone()]).collect();
        let mut g = H5VectorGadget::from_vectors(u, v);
        g.chain_a = a;
        g.chain_b = b;
        g
    };
    if let Some((i, j)) = g.order_violation() {
        return Err(GadgetError::Construction(format!(
            "sign condition fails at e_{{{},{}}}",
            i + 1,
            j + 1
        )));
    }
    if !g.zero_sum() {
        return Err(GadgetError::Construction("u vectors do not sum to zero".into()));
    }
    // (1, b_j) with b super-increasing recombine uniquely.
    if n > 2 {
        SuperIncreasingSequence::new(g.chain_b.clone()).map_err(|e| GadgetError::Construction(e.to_string()))?;
    }
    Ok(g)
}

/// Vertices `u_i` of a convex lattice polygon with `sum u_i = 0`, and
/// directions `v_i` whose linear functional is maximized over the polygon
/// only at `u_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonGadget {
    u: Vec<Vec2>,
    v: Vec<Vec2>,
    radius: u64,
}

impl PolygonGadget {
    pub fn from_vectors(u: Vec<Vec2>, v: Vec<Vec2>, radius: u64) -> Self {
        Self { u, v, radius }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[Vec2] {
        &self.u
    }

    pub fn v(&self) -> &[Vec2] {
        &self.v
    }

    /// Circle radius the vertices were rounded from (0 for fixed families).
    pub fn radius(&self) -> u64 {
        self.radius
    }

    /// First `(i, j)`, `j != i`, with `<u_j, v_i> >= <u_i, v_i>`.
    pub fn argmax_violation(&self) -> Option<(usize, usize)> {
        for (i, vi) in self.v.iter().enumerate() {
            let best = dot2(&self.u[i], vi);
            for (j, uj) in self.u.iter().enumerate() {
                if j != i && dot2(uj, vi) >= best {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn zero_sum(&self) -> bool {
        let sx: BigInt = self.u.iter().map(|p| &p[0]).sum();
        let sy: BigInt = self.u.iter().map(|p| &p[1]).sum();
        sx.is_zero() && sy.is_zero()
    }

    /// `uu_i = x^{u_i} z^{<u_i, v_i>}` in `H5`.
    pub fn lifted_vertices(&self) -> Vec<HeisenbergElement> {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(ui, vi)| HeisenbergElement::new(ui.to_vec(), vec![BigInt::zero(); 2], dot2(ui, vi)).expect("rank 2"))
            .collect()
    }

    /// `y^{-v_i}` in `H5`.
    pub fn conjugators(&self) -> Vec<HeisenbergElement> {
        self.v
            .iter()
            .map(|vi| HeisenbergElement::y_pow(&[-&vi[0], -&vi[1]]))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "polygon",
            "n": self.n(),
            "radius": self.radius,
            "u": rows_json(&self.u),
            "v": rows_json(&self.v),
        })
    }
}

const MAX_POLYGON_RADIUS: u64 = 1 << 40;

/// Rounded regular polygon.
///
/// Vertex `k` (0-based) is the rounding of `N (cos 2πk/n, sin 2πk/n)`; `v_k`
/// is that rounded point, and `u_k` is it after the rounding remainder is
/// pushed back one unit at a time (vertices in order, cyclically) so the
/// vertices sum to zero. Starting from `N = 2`, `N` doubles until the
/// unique-argmax condition holds. For `n = 2` the segment `u = v = ((1,0), (-1,0))`
/// is returned.
pub fn make_polygon_gadget(n: usize) -> Result<PolygonGadget, GadgetError> {
    if n < 2 {
        return Err(GadgetError::Usage(format!("polygon gadget needs n >= 2, got {n}")));
    }
    if n == 2 {
        let u = vec![vec2(1, 0), vec2(-1, 0)];
        return Ok(PolygonGadget::from_vectors(u.clone(), u, 0));
    }
    let mut radius = 2u64;
    while radius <= MAX_POLYGON_RADIUS {
        let g = rounded_polygon(n, radius);
        if g.zero_sum() && g.argmax_violation().is_none() {
            return Ok(g);
        }
        radius *= 2;
    }
    Err(GadgetError::Construction(format!(
        "no valid rounded {n}-gon up to radius {MAX_POLYGON_RADIUS}"
    )))
}

fn rounded_polygon(n: usize, radius: u64) -> PolygonGadget {
    let r = radius as f64;
    let v: Vec<Vec2> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [
                BigInt::from((r * angle.cos()).round() as i64),
                BigInt::from((r * angle.sin()).round() as i64),
            ]
        })
        .collect();
    let mut u = v.clone();
    for c in 0..2 {
        let excess: BigInt = u.iter().map(|p| &p[c]).sum();
        let step = if excess.is_positive() { -1 } else { 1 };
        let count = usize::try_from(excess.abs()).expect("excess bounded by n");
        for t in 0..count {
            u[t % n][c] += step;
        }
    }
    PolygonGadget::from_vectors(u, v, radius)
}

/// The `H5` elements `uu_i = x^{u_i} z^{sum_{j<i} e_{ij}}`, `vv_j = y^{v_j}` and
/// target `h = vv_1 .. vv_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainGadgetElements {
    uu: Vec<HeisenbergElement>,
    vv: Vec<HeisenbergElement>,
    target: HeisenbergElement,
}

impl MainGadgetElements {
    pub fn n(&self) -> usize {
        self.uu.len()
    }

    pub fn uu(&self) -> &[HeisenbergElement] {
        &self.uu
    }

    pub fn vv(&self) -> &[HeisenbergElement] {
        &self.vv
    }

    pub fn target(&self) -> &HeisenbergElement {
        &self.target
    }

    /// `uu_1^l vv_1 uu_2^l vv_2 .. vv_{n-1} uu_n^l`.
    pub fn interleaved_power(&self, l: u64) -> HeisenbergElement {
        let mut acc = HeisenbergElement::identity(2);
        for (i, uu) in self.uu.iter().enumerate() {
            if i > 0 {
                acc = acc.multiply(&self.vv[i - 1]).expect("rank 2");
            }
            acc = acc.multiply(&uu.pow(l)).expect("rank 2");
        }
        acc
    }

    /// The alphabet `(uu_1, .., uu_n, vv_1, .., vv_{n-1})` over `H5`.
    pub fn alphabet(&self) -> Alphabet {
        let letters = self.uu.iter().chain(&self.vv).cloned().map(Element::from).collect();
        Alphabet::new(GroupDescriptor::heisenberg(2), letters).expect("letters live in H5")
    }

    pub fn to_json(&self) -> Value {
        let enc =
            |hs: &[HeisenbergElement]| -> Vec<Value> { hs.iter().map(|h| encode_element(&h.clone().into())).collect() };
        json!({
            "kind": "main-elements",
            "n": self.n(),
            "uu": enc(&self.uu),
            "vv": enc(&self.vv),
            "h": encode_element(&self.target.clone().into()),
        })
    }
}

pub fn make_main_gadget_elements(g: &H5VectorGadget) -> MainGadgetElements {
    let uu =
        g.u.iter()
            .enumerate()
            .map(|(i, ui)| {
                let z: BigInt = g.inner[i][..i].iter().sum();
                HeisenbergElement::new(ui.to_vec(), vec![BigInt::zero(); 2], z).expect("rank 2")
            })
            .collect();
    let vv: Vec<HeisenbergElement> = g.v.iter().map(|vj| HeisenbergElement::y_pow(vj)).collect();
    let target = vv.iter().fold(HeisenbergElement::identity(2), |acc, v| {
        acc.multiply(v).expect("rank 2")
    });
    MainGadgetElements { uu, vv, target }
}
