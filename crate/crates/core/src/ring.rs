//! The supported base rings: the integers and the integers localized at a prime.
//!
//! Elements of both rings are stored as reduced rationals. For `Localized(p)`
//! every denominator is coprime to `p`; for `Integers` every denominator is 1.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{value} is not an element of {ring}")]
    NotInRing { value: String, ring: Ring },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    /// ℤ localized at the prime `p`: fractions whose denominator is prime to `p`.
    Localized(u64),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Localized(p) => write!(f, "Z_({p})"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

impl Ring {
    pub fn localized(p: u64) -> Result<Ring, RingError> {
        if is_prime(p) {
            Ok(Ring::Localized(p))
        } else {
            Err(RingError::NotPrime(p))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Ring::Integers => None,
            Ring::Localized(p) => Some(*p),
        }
    }

    fn p(&self) -> BigInt {
        BigInt::from(self.prime().expect("localized ring"))
    }

    pub fn contains(&self, a: &Scalar) -> bool {
        match self {
            Ring::Integers => a.is_integer(),
            Ring::Localized(_) => !a.denom().is_multiple_of(&self.p()),
        }
    }

    pub fn check(&self, a: &Scalar) -> Result<(), RingError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(RingError::NotInRing {
                value: a.to_string(),
                ring: *self,
            })
        }
    }

    /// p-adic valuation of a nonzero element of `Z_(p)`.
    pub fn valuation(&self, a: &Scalar) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let p = self.p();
        let mut n = a.numer().abs();
        let mut v = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            v += 1;
        }
        Some(v)
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match self {
            Ring::Integers => a.is_integer() && a.numer().abs().is_one(),
            Ring::Localized(_) => {
                !a.is_zero() && self.contains(a) && self.valuation(a) == Some(0)
            }
        }
    }

    /// Euclidean size: |a| over ℤ, the valuation over `Z_(p)`. `None` for zero.
    pub fn size(&self, a: &Scalar) -> Option<BigInt> {
        if a.is_zero() {
            return None;
        }
        match self {
            Ring::Integers => Some(a.numer().abs()),
            Ring::Localized(_) => self.valuation(a).map(BigInt::from),
        }
    }

    /// Splits `a` as `unit * normal` where `normal` is the canonical associate:
    /// nonnegative over ℤ, a power of `p` over `Z_(p)`. Zero maps to `(0, 1)`.
    pub fn normalize(&self, a: &Scalar) -> (Scalar, Scalar) {
        if a.is_zero() {
            return (Scalar::zero(), Scalar::one());
        }
        match self {
            Ring::Integers => {
                if a.is_negative() {
                    (-a.clone(), -Scalar::one())
                } else {
                    (a.clone(), Scalar::one())
                }
            }
            Ring::Localized(_) => {
                let v = self.valuation(a).unwrap_or(0);
                let normal = Scalar::from_integer(num_traits::pow(self.p(), v as usize));
                let unit = a / &normal;
                (normal, unit)
            }
        }
    }

    /// `a | b` in the ring.
    pub fn divides(&self, a: &Scalar, b: &Scalar) -> bool {
        if a.is_zero() {
            return b.is_zero();
        }
        self.contains(&(b / a))
    }

    /// Extended gcd: returns `(g, s, t)` with `g = s*a + t*b` and `g` normalized.
    pub fn gcdext(&self, a: &Scalar, b: &Scalar) -> (Scalar, Scalar, Scalar) {
        if a.is_zero() && b.is_zero() {
            return (Scalar::zero(), Scalar::one(), Scalar::zero());
        }
        match self {
            Ring::Integers => {
                let e = a.numer().extended_gcd(b.numer());
                let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
                if g.is_negative() {
                    g = -g;
                    s = -s;
                    t = -t;
                }
                (
                    Scalar::from_integer(g),
                    Scalar::from_integer(s),
                    Scalar::from_integer(t),
                )
            }
            Ring::Localized(_) => {
                let va = self.valuation(a);
                let vb = self.valuation(b);
                let take_a = match (va, vb) {
                    (Some(x), Some(y)) => x <= y,
                    (Some(_), None) => true,
                    _ => false,
                };
                if take_a {
                    let (g, _) = self.normalize(a);
                    let s = &g / a;
                    (g, s, Scalar::zero())
                } else {
                    let (g, _) = self.normalize(b);
                    let t = &g / b;
                    (g, Scalar::zero(), t)
                }
            }
        }
    }

    /// Canonical remainder of `a` modulo the normalized nonzero element `m`.
    ///
    /// Over ℤ the result lies in `[0, m)`. Over `Z_(p)` with `m = p^v` it is
    /// the integer representative in `[0, p^v)` of `a` in `Z/p^v`.
    pub fn reduce_mod(&self, a: &Scalar, m: &Scalar) -> Scalar {
        debug_assert!(!m.is_zero());
        match self {
            Ring::Integers => Scalar::from_integer(a.numer().mod_floor(m.numer())),
            Ring::Localized(_) => {
                let modulus = m.numer().clone();
                if modulus.is_one() {
                    return Scalar::zero();
                }
                let inv = mod_inverse(a.denom(), &modulus)
                    .expect("denominator coprime to p is invertible mod p^v");
                Scalar::from_integer((a.numer() * inv).mod_floor(&modulus))
            }
        }
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.abs().is_one() {
        Some((e.x * e.gcd.signum()).mod_floor(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(Ring::localized(2).is_ok());
        assert!(Ring::localized(97).is_ok());
        assert_eq!(Ring::localized(1), Err(RingError::NotPrime(1)));
        assert_eq!(Ring::localized(9), Err(RingError::NotPrime(9)));
    }

    #[test]
    fn membership_and_units() {
        let z = Ring::Integers;
        let z3 = Ring::Localized(3);
        assert!(z.contains(&int(5)));
        assert!(!z.contains(&frac(1, 2)));
        assert!(z3.contains(&frac(1, 2)));
        assert!(!z3.contains(&frac(1, 3)));
        assert!(z.is_unit(&int(-1)));
        assert!(!z.is_unit(&int(2)));
        assert!(z3.is_unit(&int(2)));
        assert!(z3.is_unit(&frac(5, 4)));
        assert!(!z3.is_unit(&int(6)));
        assert!(!z3.is_unit(&int(0)));
    }

    #[test]
    fn normalization() {
        let z5 = Ring::Localized(5);
        let (n, u) = z5.normalize(&frac(-50, 3));
        assert_eq!(n, int(25));
        assert_eq!(u, frac(-2, 3));
        let (n, u) = Ring::Integers.normalize(&int(-7));
        assert_eq!((n, u), (int(7), int(-1)));
    }

    #[test]
    fn gcdext_identity() {
        for ring in [Ring::Integers, Ring::Localized(2), Ring::Localized(3)] {
            for (a, b) in [(12, 18), (0, 5), (-4, 0), (7, -3), (8, 12)] {
                let (a, b) = (int(a), int(b));
                let (g, s, t) = ring.gcdext(&a, &b);
                assert_eq!(&s * &a + &t * &b, g);
                assert!(ring.divides(&g, &a) && ring.divides(&g, &b));
                assert!(ring.contains(&s) && ring.contains(&t));
            }
        }
    }

    #[test]
    fn reduction_mod_prime_power() {
        let z3 = Ring::Localized(3);
        // 1/2 ≡ 5 mod 9
        assert_eq!(z3.reduce_mod(&frac(1, 2), &int(9)), int(5));
        assert_eq!(z3.reduce_mod(&int(7), &int(1)), int(0));
        assert_eq!(Ring::Integers.reduce_mod(&int(-3), &int(5)), int(2));
    }
}
