//! Arbitrary-precision rational scalars with an inline small-value fast path.
//!
//! Coefficients in this crate are almost always tiny fractions, but identities
//! must hold exactly whatever the size. `Rat` stores a reduced `i64/i64`
//! fraction inline and falls back to `BigRational` on overflow; the
//! representation is canonical (the big variant never holds a value that fits
//! inline), so equality is structural.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    /// Reduced fraction, denominator > 0.
    Small(i64, i64),
    /// Falls outside the i64 range (canonically never demotable).
    Big(Box<BigRational>),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Rat(Repr);

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    fn from_i128(mut n: i128, mut d: i128) -> Rat {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Rat(Repr::Small(0, 1));
        }
        let g = gcd_i128(n, d);
        n /= g;
        d /= g;
        if n >= i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
            Rat(Repr::Small(n as i64, d as i64))
        } else {
            Rat(Repr::Big(Box::new(BigRational::new(
                BigInt::from(n),
                BigInt::from(d),
            ))))
        }
    }

    fn from_big(b: BigRational) -> Rat {
        if let (Some(n), Some(d)) = (b.numer().to_i64(), b.denom().to_i64()) {
            Rat(Repr::Small(n, d))
        } else {
            Rat(Repr::Big(Box::new(b)))
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn new_int(n: i64) -> Rat {
        Rat(Repr::Small(n, 1))
    }

    pub fn new_frac(n: i64, d: i64) -> Rat {
        Rat::from_i128(n as i128, d as i128)
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "division by zero");
                Rat::from_i128(*d as i128, *n as i128)
            }
            Repr::Big(b) => Rat::from_big(b.recip()),
        }
    }

    /// Some(n) when the value is an integer fitting i64.
    pub fn to_i64_integer(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            Repr::Small(..) => None,
            Repr::Big(b) => {
                if b.denom().is_one() {
                    b.numer().to_i64()
                } else {
                    None
                }
            }
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.denom().is_one(),
        }
    }

    fn add_impl(&self, other: &Rat) -> Rat {
        match (&self.0, &other.0) {
            (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
                let (n1, d1, n2, d2) = (*n1 as i128, *d1 as i128, *n2 as i128, *d2 as i128);
                Rat::from_i128(n1 * d2 + n2 * d1, d1 * d2)
            }
            _ => Rat::from_big(self.to_big() + other.to_big()),
        }
    }

    fn sub_impl(&self, other: &Rat) -> Rat {
        match (&self.0, &other.0) {
            (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
                let (n1, d1, n2, d2) = (*n1 as i128, *d1 as i128, *n2 as i128, *d2 as i128);
                Rat::from_i128(n1 * d2 - n2 * d1, d1 * d2)
            }
            _ => Rat::from_big(self.to_big() - other.to_big()),
        }
    }

    fn mul_impl(&self, other: &Rat) -> Rat {
        match (&self.0, &other.0) {
            (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
                Rat::from_i128(*n1 as i128 * *n2 as i128, *d1 as i128 * *d2 as i128)
            }
            _ => Rat::from_big(self.to_big() * other.to_big()),
        }
    }

    fn div_impl(&self, other: &Rat) -> Rat {
        match (&self.0, &other.0) {
            (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
                assert!(*n2 != 0, "division by zero");
                Rat::from_i128(*n1 as i128 * *d2 as i128, *d1 as i128 * *n2 as i128)
            }
            _ => Rat::from_big(self.to_big() / other.to_big()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self))
    }
}

impl Default for Rat {
    fn default() -> Rat {
        Rat::zero()
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat(Repr::Small(0, 1))
    }

    fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Small(0, _))
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat(Repr::Small(1, 1))
    }

    fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Small(1, 1))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $impl:ident) => {
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$impl(&rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                self.$impl(rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$impl(&rhs)
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                self.$impl(rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self.0 {
            Repr::Small(n, d) => {
                if n == i64::MIN {
                    Rat::from_i128(-(n as i128), d as i128)
                } else {
                    Rat(Repr::Small(-n, d))
                }
            }
            Repr::Big(b) => Rat::from_big(-*b),
        }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -self.clone()
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = self.add_impl(rhs);
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        *self = self.add_impl(&rhs);
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = self.sub_impl(rhs);
    }
}

impl SubAssign<Rat> for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        *self = self.sub_impl(&rhs);
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = self.mul_impl(rhs);
    }
}

impl MulAssign<Rat> for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        *self = self.mul_impl(&rhs);
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

pub fn rat(n: i64) -> Rat {
    Rat::new_int(n)
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new_frac(n, d)
}

pub fn is_zero(x: &Rat) -> bool {
    x.is_zero()
}

pub fn is_one(x: &Rat) -> bool {
    x.is_one()
}

/// Renders `p/q`, or just `p` for integers.
pub fn render(x: &Rat) -> String {
    match &x.0 {
        Repr::Small(n, 1) => n.to_string(),
        Repr::Small(n, d) => format!("{n}/{d}"),
        Repr::Big(b) => {
            if b.denom().is_one() {
                b.numer().to_string()
            } else {
                format!("{}/{}", b.numer(), b.denom())
            }
        }
    }
}

/// Renders a doubled half-integer `k2/2` as `k` or `k/2`.
pub fn render_half(k2: i64) -> String {
    if k2 % 2 == 0 {
        format!("{}", k2 / 2)
    } else {
        format!("{}/2", k2)
    }
}

/// Parses `p`, `p/q` or `-p/q` of any size.
pub fn parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::from_big(BigRational::new(n, d)))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rat::from_big(BigRational::from_integer(n)))
        }
    }
}

/// Signed power with rational base.
pub fn pow_i(x: &Rat, e: i32) -> Rat {
    if e == 0 {
        return Rat::one();
    }
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= x;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Deterministic small nonzero rational from a pseudo-random stream.
pub fn small_nonzero(rng: &mut impl rand::Rng) -> Rat {
    loop {
        let n = rng.gen_range(-6i64..=6);
        if n != 0 {
            let d = rng.gen_range(1i64..=3);
            return frac(n, d);
        }
    }
}

pub fn abs(x: &Rat) -> Rat {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn render_and_parse_round_trip() {
        for s in ["3", "-4", "7/2", "-11/6", "0"] {
            let x = parse(s).unwrap();
            assert_eq!(render(&x), s);
        }
        assert_eq!(parse("2/4").map(|x| render(&x)).unwrap(), "1/2");
        assert!(parse("1/0").is_none());
    }

    #[test]
    fn halves() {
        assert_eq!(render_half(4), "2");
        assert_eq!(render_half(-3), "-3/2");
    }

    #[test]
    fn big_overflow_round_trips() {
        // (2^40 / 3)^3 overflows i64 but must stay exact
        let x = frac(1 << 40, 3);
        let cube = pow_i(&x, 3);
        assert_eq!(cube, pow_i(&x, 2) * x.clone());
        assert_eq!(pow_i(&cube, -1) * cube.clone(), Rat::one());
        let s = render(&cube);
        assert_eq!(parse(&s).unwrap(), cube);
        // canonical repr: a big value that shrinks back demotes again
        let shrunk = cube.clone() * pow_i(&x, -2);
        assert_eq!(shrunk, x);
    }

    #[test]
    fn matches_bigrational_on_random_ops() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let a = frac(rng.gen_range(-1000..1000), rng.gen_range(1..50));
            let b = frac(rng.gen_range(-1000..1000), rng.gen_range(1..50));
            let (ba, bb) = (a.to_big(), b.to_big());
            assert_eq!((&a + &b).to_big(), &ba + &bb);
            assert_eq!((&a - &b).to_big(), &ba - &bb);
            assert_eq!((&a * &b).to_big(), &ba * &bb);
            if !b.is_zero() {
                assert_eq!((&a / &b).to_big(), &ba / &bb);
            }
        }
    }

    #[test]
    fn integer_extraction() {
        assert_eq!(rat(7).to_i64_integer(), Some(7));
        assert_eq!(frac(7, 2).to_i64_integer(), None);
        assert!(frac(8, 2).is_integer());
    }
}
