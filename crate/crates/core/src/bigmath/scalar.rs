use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{One, PrimInt, Unsigned, Zero};

/// Unsigned integer type the number-theoretic routines are written against.
///
/// Implemented for the primitive unsigned words and for [`Natural`](super::Natural).
/// Arithmetic helpers take references so the big-integer implementation
/// does not have to clone on every call; the primitive implementations are
/// `Copy` and the references vanish after inlining.
pub trait Scalar:
    Clone + Ord + Eq + Hash + Debug + Display + Send + Sync + Zero + One + 'static
{
    fn from_u64(v: u64) -> Self;

    /// `None` when the value does not fit.
    fn to_u64(&self) -> Option<u64>;

    /// Number of significant bits; zero for zero.
    fn bits(&self) -> u64;

    fn bit(&self, i: u64) -> bool;

    /// Count of trailing zero bits. Undefined for zero.
    fn trailing_zeros(&self) -> u64;

    fn shr(&self, n: u64) -> Self;

    fn add_ref(&self, rhs: &Self) -> Self;

    /// `self - rhs`; callers guarantee `self >= rhs`.
    fn sub_ref(&self, rhs: &Self) -> Self;

    /// Plain product. For primitive words the caller guarantees no overflow.
    fn mul_ref(&self, rhs: &Self) -> Self;

    fn div_ref(&self, rhs: &Self) -> Self;

    fn rem_ref(&self, rhs: &Self) -> Self;

    /// `self * rhs mod m` without overflow, for `self, rhs < m`.
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self;

    fn gcd_ref(&self, rhs: &Self) -> Self;

    fn is_even(&self) -> bool {
        !self.bit(0)
    }

    /// Left-to-right square and multiply. `m >= 2`.
    fn pow_mod(&self, exp: &Self, m: &Self) -> Self {
        let base = self.rem_ref(m);
        let mut acc = Self::one();
        let nbits = exp.bits();
        for i in (0..nbits).rev() {
            acc = acc.mul_mod(&acc, m);
            if exp.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }
}

macro_rules! impl_scalar_prim {
    ($($t:ty => $mulmod:path;)*) => ($(
        impl Scalar for $t {
            #[inline]
            fn from_u64(v: u64) -> Self {
                v as $t
            }
            #[inline]
            fn to_u64(&self) -> Option<u64> {
                u64::try_from(*self).ok()
            }
            #[inline]
            fn bits(&self) -> u64 {
                (<$t>::BITS - self.leading_zeros()) as u64
            }
            #[inline]
            fn bit(&self, i: u64) -> bool {
                i < <$t>::BITS as u64 && (*self >> i) & 1 == 1
            }
            #[inline]
            fn trailing_zeros(&self) -> u64 {
                PrimInt::trailing_zeros(*self) as u64
            }
            #[inline]
            fn shr(&self, n: u64) -> Self {
                if n >= <$t>::BITS as u64 { 0 } else { *self >> n }
            }
            #[inline]
            fn add_ref(&self, rhs: &Self) -> Self {
                *self + *rhs
            }
            #[inline]
            fn sub_ref(&self, rhs: &Self) -> Self {
                *self - *rhs
            }
            #[inline]
            fn mul_ref(&self, rhs: &Self) -> Self {
                *self * *rhs
            }
            #[inline]
            fn div_ref(&self, rhs: &Self) -> Self {
                *self / *rhs
            }
            #[inline]
            fn rem_ref(&self, rhs: &Self) -> Self {
                *self % *rhs
            }
            #[inline]
            fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
                $mulmod(*self, *rhs, *m)
            }
            #[inline]
            fn gcd_ref(&self, rhs: &Self) -> Self {
                Integer::gcd(self, rhs)
            }
        }
    )*);
}

#[inline]
fn mul_mod_u32(a: u32, b: u32, m: u32) -> u32 {
    ((a as u64 * b as u64) % m as u64) as u32
}

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Shift-and-add product for moduli that need the full 128 bits.
fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let add = |x: u128, y: u128| if x >= m - y { x - (m - y) } else { x + y };
    let (mut a, mut b) = (a % m, b % m);
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut acc = 0u128;
    while b != 0 {
        if b & 1 == 1 {
            acc = add(acc, a);
        }
        a = add(a, a);
        b >>= 1;
    }
    acc
}

impl_scalar_prim! {
    u32 => mul_mod_u32;
    u64 => mul_mod_u64;
    u128 => mul_mod_u128;
}

/// Marker for the primitive implementations, handy in generic tests.
pub trait PrimScalar: Scalar + PrimInt + Unsigned {}
impl<T: Scalar + PrimInt + Unsigned> PrimScalar for T {}
