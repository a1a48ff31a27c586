use std::fmt;
use std::ops::{Add, Mul, Rem, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use rug::ops::Pow;
use rug::Integer;

use super::Scalar;
use crate::error::{Error, Result};

/// Non-negative integer of unbounded size, backed by GMP.
///
/// GMP supplies subquadratic multiplication, division and GCD, which is what
/// the GCD elimination phase leans on for `k` in the hundreds of millions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Natural(Integer);

impl Natural {
    /// Wraps a GMP integer; negative values are rejected.
    pub fn from_integer(v: Integer) -> Result<Self> {
        if v < 0 {
            return Err(Error::invalid(format!("negative value {v}")));
        }
        Ok(Natural(v))
    }

    pub fn as_integer(&self) -> &Integer {
        &self.0
    }

    pub fn into_integer(self) -> Integer {
        self.0
    }

    /// `base^exp` as a big integer.
    pub fn pow_u64(base: u64, exp: u64) -> Self {
        let exp = u32::try_from(exp).expect("exponent fits u32");
        Natural(Integer::from(base).pow(exp))
    }

    pub fn from_u128(v: u128) -> Self {
        Natural(Integer::from(v))
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    /// Decimal digit count.
    pub fn decimal_digits(&self) -> usize {
        if self.0 == 0 {
            1
        } else {
            self.0.to_string_radix(10).len()
        }
    }

    pub fn is_perfect_square(&self) -> bool {
        self.0.is_perfect_square()
    }
}

impl From<u64> for Natural {
    fn from(v: u64) -> Self {
        Natural(Integer::from(v))
    }
}

impl From<u32> for Natural {
    fn from(v: u32) -> Self {
        Natural(Integer::from(v))
    }
}

impl FromStr for Natural {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| *c != '_' && !c.is_whitespace()).collect();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::invalid(format!("not a decimal natural: {s:?}")));
        }
        let v = Integer::from_str_radix(&t, 10)
            .map_err(|e| Error::invalid(format!("{s:?}: {e}")))?;
        Ok(Natural(v))
    }
}

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.significant_bits() > 256 {
            write!(f, "Natural(<{} bits>)", self.0.significant_bits())
        } else {
            write!(f, "Natural({})", self.0)
        }
    }
}

impl Add for Natural {
    type Output = Natural;
    fn add(self, rhs: Natural) -> Natural {
        Natural(self.0 + rhs.0)
    }
}

impl Sub for Natural {
    type Output = Natural;
    fn sub(self, rhs: Natural) -> Natural {
        let v = self.0 - rhs.0;
        assert!(v >= 0, "Natural subtraction underflow");
        Natural(v)
    }
}

impl Mul for Natural {
    type Output = Natural;
    fn mul(self, rhs: Natural) -> Natural {
        Natural(self.0 * rhs.0)
    }
}

impl Rem for Natural {
    type Output = Natural;
    fn rem(self, rhs: Natural) -> Natural {
        Natural(self.0 % rhs.0)
    }
}

impl Zero for Natural {
    fn zero() -> Self {
        Natural(Integer::new())
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Natural {
    fn one() -> Self {
        Natural(Integer::from(1))
    }
}

impl Scalar for Natural {
    fn from_u64(v: u64) -> Self {
        Natural(Integer::from(v))
    }

    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    fn bits(&self) -> u64 {
        self.0.significant_bits() as u64
    }

    fn bit(&self, i: u64) -> bool {
        match u32::try_from(i) {
            Ok(i) => self.0.get_bit(i),
            Err(_) => false,
        }
    }

    fn trailing_zeros(&self) -> u64 {
        self.0.find_one(0).map(u64::from).unwrap_or(0)
    }

    fn shr(&self, n: u64) -> Self {
        let n = u32::try_from(n).unwrap_or(u32::MAX);
        Natural(Integer::from(&self.0 >> n))
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        Natural(Integer::from(&self.0 + &rhs.0))
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        debug_assert!(self.0 >= rhs.0);
        Natural(Integer::from(&self.0 - &rhs.0))
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        Natural(Integer::from(&self.0 * &rhs.0))
    }

    fn div_ref(&self, rhs: &Self) -> Self {
        Natural(Integer::from(&self.0 / &rhs.0))
    }

    fn rem_ref(&self, rhs: &Self) -> Self {
        Natural(Integer::from(&self.0 % &rhs.0))
    }

    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        Natural(Integer::from(&self.0 * &rhs.0) % &m.0)
    }

    fn gcd_ref(&self, rhs: &Self) -> Self {
        Natural(Integer::from(self.0.gcd_ref(&rhs.0)))
    }

    fn pow_mod(&self, exp: &Self, m: &Self) -> Self {
        let r = Integer::from(self.0.pow_mod_ref(&exp.0, &m.0).expect("non-negative exponent"));
        Natural(r)
    }
}
