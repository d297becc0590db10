//! Exact scalars: arbitrary-precision rationals and quadratic extensions.

use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number. Always stored reduced with positive denominator.
///
/// Crossing any external boundary, a scalar is the string `p/q` (or just `p`
/// for integers); both forms parse back bit-for-bit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d`; panics on `d = 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Scalar(self.0.recip())
    }

    /// Exact square root if `self` is a square in the rationals.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.0.numer().sqrt();
        let d = self.0.denom().sqrt();
        if &(&n * &n) == self.0.numer() && &(&d * &d) == self.0.denom() {
            Some(Scalar(BigRational::new(n, d)))
        } else {
            None
        }
    }

    /// Floor of the value as a `BigInt`.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parse error for scalar strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseScalarError(pub String);

impl fmt::Display for ParseScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational: {}", self.0)
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n = BigInt::from_str(num.trim()).map_err(|_| ParseScalarError(s.to_string()))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| ParseScalarError(s.to_string()))?;
        if d.sign() == Sign::NoSign {
            return Err(ParseScalarError(s.to_string()));
        }
        Ok(Scalar(BigRational::new(n, d)))
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar((self.0).$method(&rhs.0))
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(&self.0 / &rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        self.0 *= rhs.0;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

/// An element `a + b*sqrt(d)` of a quadratic extension of the rationals.
///
/// The radicand `d` is fixed per computation context; values with `b = 0`
/// are plain rationals and mix freely with any radicand. Construction
/// canonicalizes: when `d` is a square the irrational part is folded into
/// `a`, and `b = 0` forces `d = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: Scalar,
    b: Scalar,
    d: Scalar,
}

impl QuadScalar {
    pub fn new(a: Scalar, b: Scalar, d: Scalar) -> Self {
        let mut q = QuadScalar { a, b, d };
        q.canonicalize();
        q
    }

    pub fn from_rational(a: Scalar) -> Self {
        QuadScalar {
            a,
            b: Scalar::zero(),
            d: Scalar::zero(),
        }
    }

    /// `sqrt(d)` itself, canonicalized.
    pub fn sqrt_of(d: Scalar) -> Self {
        QuadScalar::new(Scalar::zero(), Scalar::one(), d)
    }

    fn canonicalize(&mut self) {
        if self.b.is_zero() || self.d.is_zero() {
            self.b = Scalar::zero();
            self.d = Scalar::zero();
            return;
        }
        if let Some(r) = self.d.sqrt_exact() {
            self.a += core::mem::replace(&mut self.b, Scalar::zero()) * r;
            self.d = Scalar::zero();
        }
    }

    pub fn rational_part(&self) -> &Scalar {
        &self.a
    }

    pub fn irrational_part(&self) -> &Scalar {
        &self.b
    }

    pub fn radicand(&self) -> &Scalar {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Scalar> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn compatible(&self, rhs: &QuadScalar) -> Scalar {
        if self.b.is_zero() {
            rhs.d.clone()
        } else if rhs.b.is_zero() {
            self.d.clone()
        } else {
            assert!(self.d == rhs.d, "mixed radicands in QuadScalar arithmetic");
            self.d.clone()
        }
    }

    pub fn add(&self, rhs: &QuadScalar) -> QuadScalar {
        let d = self.compatible(rhs);
        QuadScalar::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }

    pub fn sub(&self, rhs: &QuadScalar) -> QuadScalar {
        let d = self.compatible(rhs);
        QuadScalar::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }

    pub fn mul(&self, rhs: &QuadScalar) -> QuadScalar {
        let d = self.compatible(rhs);
        let a = &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * &d);
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        QuadScalar::new(a, b, d)
    }

    pub fn scale(&self, s: &Scalar) -> QuadScalar {
        QuadScalar::new(&self.a * s, &self.b * s, self.d.clone())
    }

    pub fn neg(&self) -> QuadScalar {
        QuadScalar::new(-&self.a, -&self.b, self.d.clone())
    }

    /// Norm `a^2 - b^2 d`, the product with the conjugate.
    pub fn norm(&self) -> Scalar {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &self.d)
    }

    pub fn recip(&self) -> QuadScalar {
        assert!(!self.is_zero(), "division by zero");
        let n = self.norm();
        assert!(!n.is_zero(), "non-invertible quadratic scalar");
        QuadScalar::new(&self.a / &n, &(-&self.b) / &n, self.d.clone())
    }

    pub fn div(&self, rhs: &QuadScalar) -> QuadScalar {
        self.mul(&rhs.recip())
    }

    /// Exact square root of a rational `e` inside `Q(sqrt(d_ctx))`.
    ///
    /// Tries a rational root first, then `y*sqrt(d_ctx)`. `None` means the
    /// root lies outside the field.
    pub fn sqrt_rational_in_context(e: &Scalar, d_ctx: &Scalar) -> Option<QuadScalar> {
        if let Some(r) = e.sqrt_exact() {
            return Some(QuadScalar::from_rational(r));
        }
        if !d_ctx.is_zero() {
            if let Some(y) = (e / d_ctx).sqrt_exact() {
                return Some(QuadScalar::new(Scalar::zero(), y, d_ctx.clone()));
            }
        }
        None
    }

    /// Exact square root inside the same quadratic field, when one exists.
    ///
    /// For a rational value this also tries the field `Q(sqrt(d))`.
    /// Returns `None` when the root needs a degree-4 tower.
    pub fn sqrt_in_tower(&self) -> Option<QuadScalar> {
        if self.is_rational() {
            return QuadScalar::sqrt_rational_in_context(&self.a, &self.d);
        }
        // solve (x + y sqrt(d))^2 = a + b sqrt(d): x^2 + y^2 d = a, 2xy = b.
        // Then x^2 is a root of 4t^2 - 4at + b^2 d = 0: t = (a +- sqrt(a^2 - b^2 d))/2.
        let disc = self.norm();
        let root = disc.sqrt_exact()?;
        for sign in [Scalar::one(), -Scalar::one()] {
            let t = &(&self.a + &(&sign * &root)) / &Scalar::from_int(2);
            if t.is_negative() {
                continue;
            }
            if let Some(x) = t.sqrt_exact() {
                if x.is_zero() {
                    continue;
                }
                let y = &(&self.b / &x) / &Scalar::from_int(2);
                // check y^2 d = a - x^2
                let lhs = &(&y * &y) * &self.d;
                let rhs = &self.a - &(&x * &x);
                if lhs == rhs {
                    return Some(QuadScalar::new(x, y, self.d.clone()));
                }
            }
        }
        None
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl fmt::Debug for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
