//! Normal-form arithmetic in the discrete Heisenberg groups `H_{2d+1}` and
//! their central quotients `H_{2d+1}/<z^e>`.
//!
//! Every element is stored as `x^a y^b z^c` where `x^a = x_1^{a_1}..x_d^{a_d}`
//! and `y^b` likewise. With the relation `x_i y_i = y_i x_i z` the product of
//! two normal forms is
//!
//! ```text
//! (a1, b1, c1) * (a2, b2, c2) = (a1 + a2, b1 + b2, c1 + c2 - <a2, b1>)
//! ```
//!
//! since moving `x^{a2}` left across `y^{b1}` emits `z^{-<a2,b1>}`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::GroupError;

/// Standard inner product of two equal-length integer vectors.
pub fn dot(u: &[BigInt], v: &[BigInt]) -> BigInt {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn add(u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

fn neg(u: &[BigInt]) -> Vec<BigInt> {
    u.iter().map(|a| -a).collect()
}

/// Element `x^a y^b z^c` of `H_{2d+1}`, where `d = a.len() = b.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisenbergElement {
    x: Vec<BigInt>,
    y: Vec<BigInt>,
    z: BigInt,
}

impl HeisenbergElement {
    pub fn new(x: Vec<BigInt>, y: Vec<BigInt>, z: BigInt) -> Result<Self, GroupError> {
        if x.len() != y.len() {
            return Err(GroupError::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.is_empty() {
            return Err(GroupError::InvalidDescriptor(
                "Heisenberg rank d must be at least 1".into(),
            ));
        }
        Ok(Self { x, y, z })
    }

    /// Convenience constructor from machine integers. Panics if the blocks
    /// differ in length or are empty.
    pub fn from_i64(x: &[i64], y: &[i64], z: i64) -> Self {
        Self::new(
            x.iter().map(|&a| BigInt::from(a)).collect(),
            y.iter().map(|&b| BigInt::from(b)).collect(),
            BigInt::from(z),
        )
        .expect("well-formed Heisenberg exponents")
    }

    pub fn identity(d: usize) -> Self {
        assert!(d >= 1, "Heisenberg rank must be positive");
        Self {
            x: vec![BigInt::zero(); d],
            y: vec![BigInt::zero(); d],
            z: BigInt::zero(),
        }
    }

    /// `x^u`, i.e. `x_1^{u_1} .. x_d^{u_d}`.
    pub fn x_pow(u: &[BigInt]) -> Self {
        let mut g = Self::identity(u.len());
        g.x = u.to_vec();
        g
    }

    /// `y^v`.
    pub fn y_pow(v: &[BigInt]) -> Self {
        let mut g = Self::identity(v.len());
        g.y = v.to_vec();
        g
    }

    /// `z^c` in `H_{2d+1}`.
    pub fn z_pow(d: usize, c: BigInt) -> Self {
        let mut g = Self::identity(d);
        g.z = c;
        g
    }

    /// The generator `x_i` (0-based index).
    pub fn x_gen(d: usize, i: usize) -> Self {
        let mut g = Self::identity(d);
        g.x[i] = BigInt::one();
        g
    }

    /// The generator `y_i` (0-based index).
    pub fn y_gen(d: usize, i: usize) -> Self {
        let mut g = Self::identity(d);
        g.y[i] = BigInt::one();
        g
    }

    pub fn rank(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[BigInt] {
        &self.x
    }

    pub fn y(&self) -> &[BigInt] {
        &self.y
    }

    pub fn z(&self) -> &BigInt {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero() && self.x.iter().all(Zero::is_zero) && self.y.iter().all(Zero::is_zero)
    }

    /// Central elements are exactly those with empty x- and y-blocks.
    pub fn is_central(&self) -> bool {
        self.x.iter().all(Zero::is_zero) && self.y.iter().all(Zero::is_zero)
    }

    fn check_rank(&self, other: &Self) -> Result<(), GroupError> {
        if self.rank() != other.rank() {
            return Err(GroupError::DimensionMismatch {
                left: self.rank(),
                right: other.rank(),
            });
        }
        Ok(())
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self, GroupError> {
        self.check_rank(rhs)?;
        Ok(Self {
            x: add(&self.x, &rhs.x),
            y: add(&self.y, &rhs.y),
            z: &self.z + &rhs.z - dot(&rhs.x, &self.y),
        })
    }

    /// `(x^a y^b z^c)^{-1} = x^{-a} y^{-b} z^{-c-<a,b>}`.
    pub fn inverse(&self) -> Self {
        Self {
            x: neg(&self.x),
            y: neg(&self.y),
            z: -&self.z - dot(&self.x, &self.y),
        }
    }

    /// `[g, h] = g^{-1} h^{-1} g h`. In class 2 this is
    /// `z^{<a_g, b_h> - <a_h, b_g>}`.
    pub fn commutator(&self, other: &Self) -> Result<Self, GroupError> {
        self.check_rank(other)?;
        let c = dot(&self.x, &other.y) - dot(&other.x, &self.y);
        Ok(Self::z_pow(self.rank(), c))
    }

    /// `self^by = by^{-1} self by`.
    pub fn conjugate(&self, by: &Self) -> Result<Self, GroupError> {
        by.inverse().multiply(self)?.multiply(by)
    }

    /// Non-negative power by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::identity(self.rank());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.multiply(&base).expect("same rank");
            }
            base = base.multiply(&base).expect("same rank");
            k >>= 1;
        }
        acc
    }
}

fn fmt_block(f: &mut fmt::Formatter<'_>, name: &str, v: &[BigInt]) -> fmt::Result {
    if v.len() == 1 {
        write!(f, "{name}^{}", v[0])
    } else {
        write!(f, "{name}^(")?;
        for (i, a) in v.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for HeisenbergElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_block(f, "x", &self.x)?;
        write!(f, " ")?;
        fmt_block(f, "y", &self.y)?;
        write!(f, " z^{}", self.z)
    }
}

/// Element of `H_{2d+1}/<z^e>`, with the z-exponent kept in `[0, e)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotientElement {
    base: HeisenbergElement,
    modulus: BigInt,
}

impl QuotientElement {
    /// Canonical image of `g` in `H_{2d+1}/<z^e>`.
    pub fn project(g: &HeisenbergElement, modulus: &BigInt) -> Result<Self, GroupError> {
        if !modulus.is_positive() {
            return Err(GroupError::InvalidDescriptor(format!(
                "quotient modulus must be positive, got {modulus}"
            )));
        }
        let mut base = g.clone();
        base.z = base.z.mod_floor(modulus);
        Ok(Self {
            base,
            modulus: modulus.clone(),
        })
    }

    pub fn identity(d: usize, modulus: &BigInt) -> Result<Self, GroupError> {
        Self::project(&HeisenbergElement::identity(d), modulus)
    }

    pub fn base(&self) -> &HeisenbergElement {
        &self.base
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn is_identity(&self) -> bool {
        self.base.is_identity()
    }

    fn check_shape(&self, other: &Self) -> Result<(), GroupError> {
        if self.modulus != other.modulus {
            return Err(GroupError::ShapeMismatch {
                expected: format!("H/<z^{}>", self.modulus),
                found: format!("H/<z^{}>", other.modulus),
            });
        }
        Ok(())
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self, GroupError> {
        self.check_shape(rhs)?;
        Self::project(&self.base.multiply(&rhs.base)?, &self.modulus)
    }

    pub fn inverse(&self) -> Self {
        Self::project(&self.base.inverse(), &self.modulus).expect("modulus already validated")
    }
}

impl fmt::Display for QuotientElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod z^{})", self.base, self.modulus)
    }
}
