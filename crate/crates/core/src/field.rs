//! Exact scalars in `Q` or an imaginary quadratic field `Q(γ)`, `γ² = d`.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// The field a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Rational,
    /// `Q(√d)` with `d < 0`.
    Imaginary {
        discriminant: i64,
    },
}

impl FieldTag {
    pub fn imaginary(discriminant: i64) -> Result<Self> {
        if discriminant >= 0 {
            return Err(Error::Input(format!(
                "imaginary quadratic field needs d < 0, got {discriminant}"
            )));
        }
        Ok(FieldTag::Imaginary { discriminant })
    }

    /// `dim_Q` of the field.
    pub fn degree(self) -> usize {
        match self {
            FieldTag::Rational => 1,
            FieldTag::Imaginary { .. } => 2,
        }
    }

    fn join(self, other: FieldTag) -> FieldTag {
        match (self, other) {
            (FieldTag::Rational, t) | (t, FieldTag::Rational) => t,
            (a, b) => {
                assert_eq!(a, b, "arithmetic across different quadratic fields");
                a
            }
        }
    }
}

/// `a + b γ` with `a, b ∈ Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFieldScalar {
    a: BigRational,
    b: BigRational,
    field: FieldTag,
}

impl QuadraticFieldScalar {
    pub fn new(a: BigRational, b: BigRational, field: FieldTag) -> Result<Self> {
        if field == FieldTag::Rational && !b.is_zero() {
            return Err(Error::Input(format!(
                "coefficient {a} + {b}γ has an irrational part but the field is Q"
            )));
        }
        Ok(QuadraticFieldScalar { a, b, field })
    }

    pub fn rational(a: BigRational) -> Self {
        QuadraticFieldScalar {
            a,
            b: BigRational::zero(),
            field: FieldTag::Rational,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// `γ` itself.
    pub fn generator(field: FieldTag) -> Result<Self> {
        Self::new(BigRational::zero(), BigRational::one(), field)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The same number viewed in a (possibly larger) field.
    pub fn promote(&self, field: FieldTag) -> Result<Self> {
        match (self.field, field) {
            (f, g) if f == g => Ok(self.clone()),
            (FieldTag::Rational, g) => Ok(QuadraticFieldScalar {
                field: g,
                ..self.clone()
            }),
            (f, g) => Err(Error::Input(format!(
                "cannot view an element of {f:?} in {g:?}"
            ))),
        }
    }

    fn d(field: FieldTag) -> BigRational {
        match field {
            FieldTag::Rational => BigRational::zero(),
            FieldTag::Imaginary { discriminant } => {
                BigRational::from_integer(BigInt::from(discriminant))
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadraticFieldScalar {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            field: self.field.join(o.field),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadraticFieldScalar {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            field: self.field.join(o.field),
        }
    }

    pub fn neg(&self) -> Self {
        QuadraticFieldScalar {
            a: -&self.a,
            b: -&self.b,
            field: self.field,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let field = self.field.join(o.field);
        let d = Self::d(field);
        QuadraticFieldScalar {
            a: &self.a * &o.a + d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
            field,
        }
    }

    /// `a² - d b²`; positive for nonzero elements of an imaginary field.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - Self::d(self.field) * &self.b * &self.b
    }

    /// `(a - bγ) / (a² - d b²)`; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadraticFieldScalar {
            a: &self.a / &n,
            b: -&self.b / &n,
            field: self.field,
        })
    }

    /// Complex value, given the complex number `γ` acts as.
    pub fn to_complex(&self, gamma: num_complex::Complex64) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        num_complex::Complex64::new(a, 0.0) + gamma * b
    }
}

impl fmt::Display for QuadraticFieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}γ", self.b)
        } else if self.b.is_negative() {
            write!(f, "{} - {}γ", self.a, -&self.b)
        } else {
            write!(f, "{} + {}γ", self.a, self.b)
        }
    }
}
