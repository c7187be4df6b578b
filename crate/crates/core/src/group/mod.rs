//! Ambient groups: free abelian lattices `Z^k`, Heisenberg groups, their
//! central quotients, and finite direct products of these.
//!
//! [`GroupDescriptor`] describes a group; [`Element`] is a value in one. Elements
//! carry enough shape to multiply on their own, and every binary operation
//! checks that both operands have the same shape.
//!
//! Conventions: `[g, h] = g^{-1} h^{-1} g h` and `a^g = g^{-1} a g`.

mod heisenberg;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use heisenberg::{dot, HeisenbergElement, QuotientElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),
}

/// Recursive description of a supported group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupDescriptor {
    /// Free abelian group `Z^rank`; rank 0 is the trivial group.
    Lattice {
        rank: usize,
    },
    /// `H_{2d+1}`.
    Heisenberg {
        d: usize,
    },
    /// `H_{2d+1}/<z^e>`.
    HeisenbergMod {
        d: usize,
        #[serde(with = "crate::format::int")]
        e: BigInt,
    },
    Product(Vec<GroupDescriptor>),
}

impl GroupDescriptor {
    pub fn lattice(rank: usize) -> Self {
        Self::Lattice { rank }
    }

    pub fn heisenberg(d: usize) -> Self {
        Self::Heisenberg { d }
    }

    pub fn heisenberg_mod(d: usize, e: impl Into<BigInt>) -> Self {
        Self::HeisenbergMod { d, e: e.into() }
    }

    pub fn product(factors: Vec<GroupDescriptor>) -> Self {
        Self::Product(factors)
    }

    /// Checks the structural invariants (`d >= 1`, `e >= 1`, arity `>= 1`).
    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            Self::Lattice { .. } => Ok(()),
            Self::Heisenberg { d } if *d == 0 => Err(GroupError::InvalidDescriptor("heisenberg d must be >= 1".into())),
            Self::Heisenberg { .. } => Ok(()),
            Self::HeisenbergMod { d, e } => {
                if *d == 0 {
                    Err(GroupError::InvalidDescriptor("heisenberg-mod d must be >= 1".into()))
                } else if !e.is_positive() {
                    Err(GroupError::InvalidDescriptor(format!(
                        "heisenberg-mod e must be >= 1, got {e}"
                    )))
                } else {
                    Ok(())
                }
            }
            Self::Product(fs) => {
                if fs.is_empty() {
                    return Err(GroupError::InvalidDescriptor(
                        "product must have at least one factor".into(),
                    ));
                }
                fs.iter().try_for_each(Self::validate)
            }
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            Self::Lattice { rank } => Element::Lattice(vec![BigInt::zero(); *rank]),
            Self::Heisenberg { d } => Element::Heisenberg(HeisenbergElement::identity(*d)),
            Self::HeisenbergMod { d, e } => {
                Element::Quotient(QuotientElement::identity(*d, e).expect("validated descriptor"))
            }
            Self::Product(fs) => Element::Product(fs.iter().map(Self::identity).collect()),
        }
    }

    /// Checks that `element` belongs to this group.
    pub fn check(&self, element: &Element) -> Result<(), GroupError> {
        let mismatch = || GroupError::ShapeMismatch {
            expected: self.to_string(),
            found: element.shape(),
        };
        match (self, element) {
            (Self::Lattice { rank }, Element::Lattice(v)) if v.len() == *rank => Ok(()),
            (Self::Heisenberg { d }, Element::Heisenberg(h)) if h.rank() == *d => Ok(()),
            (Self::HeisenbergMod { d, e }, Element::Quotient(q)) if q.rank() == *d && q.modulus() == e => Ok(()),
            (Self::Product(fs), Element::Product(es)) if fs.len() == es.len() => {
                fs.iter().zip(es).try_for_each(|(f, e)| f.check(e))
            }
            _ => Err(mismatch()),
        }
    }

    /// Rank of the free abelianization, i.e. the length of [`Element::abelianize`].
    pub fn abelian_rank(&self) -> usize {
        match self {
            Self::Lattice { rank } => *rank,
            Self::Heisenberg { d } | Self::HeisenbergMod { d, .. } => 2 * d,
            Self::Product(fs) => fs.iter().map(Self::abelian_rank).sum(),
        }
    }

    /// Factor `i` of a product descriptor.
    pub fn factor(&self, i: usize) -> Option<&GroupDescriptor> {
        match self {
            Self::Product(fs) => fs.get(i),
            _ => None,
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lattice { rank } => write!(f, "Z^{rank}"),
            Self::Heisenberg { d } => write!(f, "H{}", 2 * d + 1),
            Self::HeisenbergMod { d, e } => write!(f, "H{}/<z^{e}>", 2 * d + 1),
            Self::Product(fs) => {
                write!(f, "(")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Element of an ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Lattice(Vec<BigInt>),
    Heisenberg(HeisenbergElement),
    Quotient(QuotientElement),
    Product(Vec<Element>),
}

impl Element {
    pub fn lattice_i64(v: &[i64]) -> Self {
        Self::Lattice(v.iter().map(|&a| BigInt::from(a)).collect())
    }

    /// `(g, h)` in `G x H`.
    pub fn pair(g: Element, h: Element) -> Self {
        Self::Product(vec![g, h])
    }

    pub fn component(&self, i: usize) -> Option<&Element> {
        match self {
            Self::Product(es) => es.get(i),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Self::Lattice(v) => v.iter().all(Zero::is_zero),
            Self::Heisenberg(h) => h.is_identity(),
            Self::Quotient(q) => q.is_identity(),
            Self::Product(es) => es.iter().all(Self::is_identity),
        }
    }

    /// Short structural description used in error messages.
    pub fn shape(&self) -> String {
        match self {
            Self::Lattice(v) => format!("Z^{}", v.len()),
            Self::Heisenberg(h) => format!("H{}", 2 * h.rank() + 1),
            Self::Quotient(q) => format!("H{}/<z^{}>", 2 * q.rank() + 1, q.modulus()),
            Self::Product(es) => {
                let parts: Vec<String> = es.iter().map(Self::shape).collect();
                format!("({})", parts.join(" x "))
            }
        }
    }

    pub fn multiply(&self, rhs: &Element) -> Result<Element, GroupError> {
        match (self, rhs) {
            (Self::Lattice(a), Self::Lattice(b)) => {
                if a.len() != b.len() {
                    return Err(GroupError::DimensionMismatch {
                        left: a.len(),
                        right: b.len(),
                    });
                }
                Ok(Self::Lattice(a.iter().zip(b).map(|(p, q)| p + q).collect()))
            }
            (Self::Heisenberg(a), Self::Heisenberg(b)) => Ok(Self::Heisenberg(a.multiply(b)?)),
            (Self::Quotient(a), Self::Quotient(b)) => Ok(Self::Quotient(a.multiply(b)?)),
            (Self::Product(a), Self::Product(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(p, q)| p.multiply(q))
                .collect::<Result<Vec<_>, _>>()
                .map(Self::Product),
            _ => Err(GroupError::ShapeMismatch {
                expected: self.shape(),
                found: rhs.shape(),
            }),
        }
    }

    pub fn inverse(&self) -> Element {
        match self {
            Self::Lattice(v) => Self::Lattice(v.iter().map(|a| -a).collect()),
            Self::Heisenberg(h) => Self::Heisenberg(h.inverse()),
            Self::Quotient(q) => Self::Quotient(q.inverse()),
            Self::Product(es) => Self::Product(es.iter().map(Self::inverse).collect()),
        }
    }

    /// `self^by = by^{-1} self by`.
    pub fn conjugate(&self, by: &Element) -> Result<Element, GroupError> {
        by.inverse().multiply(self)?.multiply(by)
    }

    /// `[self, other] = self^{-1} other^{-1} self other`.
    pub fn commutator(&self, other: &Element) -> Result<Element, GroupError> {
        self.inverse()
            .multiply(&other.inverse())?
            .multiply(self)?
            .multiply(other)
    }

    /// Non-negative power.
    pub fn pow(&self, k: u64) -> Result<Element, GroupError> {
        let mut acc = self.identity_like();
        for _ in 0..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Identity of the group this element lives in.
    pub fn identity_like(&self) -> Element {
        match self {
            Self::Lattice(v) => Self::Lattice(vec![BigInt::zero(); v.len()]),
            Self::Heisenberg(h) => Self::Heisenberg(HeisenbergElement::identity(h.rank())),
            Self::Quotient(q) => {
                Self::Quotient(QuotientElement::identity(q.rank(), q.modulus()).expect("valid modulus"))
            }
            Self::Product(es) => Self::Product(es.iter().map(Self::identity_like).collect()),
        }
    }

    /// Image under the free abelianization: lattice coordinates, and the x-
    /// and y-blocks of (quotient) Heisenberg factors, concatenated in factor
    /// order.
    pub fn abelianize(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        self.abelianize_into(&mut out);
        out
    }

    fn abelianize_into(&self, out: &mut Vec<BigInt>) {
        match self {
            Self::Lattice(v) => out.extend(v.iter().cloned()),
            Self::Heisenberg(h) => {
                out.extend(h.x().iter().cloned());
                out.extend(h.y().iter().cloned());
            }
            Self::Quotient(q) => {
                out.extend(q.base().x().iter().cloned());
                out.extend(q.base().y().iter().cloned());
            }
            Self::Product(es) => es.iter().for_each(|e| e.abelianize_into(out)),
        }
    }
}

impl From<HeisenbergElement> for Element {
    fn from(h: HeisenbergElement) -> Self {
        Self::Heisenberg(h)
    }
}

impl From<QuotientElement> for Element {
    fn from(q: QuotientElement) -> Self {
        Self::Quotient(q)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            Self::Heisenberg(h) => write!(f, "{h}"),
            Self::Quotient(q) => write!(f, "{q}"),
            Self::Product(es) => {
                write!(f, "[")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "]")
            }
        }
    }
}
