//! Dyadic fixed-point intervals with outward rounding.
//!
//! A [`FixedInterval`] stores `lo / 2^scale ..= hi / 2^scale`. Every operation
//! rounds the lower endpoint toward -inf and the upper endpoint toward +inf, so
//! the exact result of the corresponding real operation is always enclosed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) fn div_floor(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den)
}

pub(crate) fn div_ceil(num: &BigInt, den: &BigInt) -> BigInt {
    -((-num).div_floor(den))
}

fn shr_floor(value: &BigInt, bits: u32) -> BigInt {
    div_floor(value, &(BigInt::one() << bits))
}

fn shr_ceil(value: &BigInt, bits: u32) -> BigInt {
    div_ceil(value, &(BigInt::one() << bits))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FixedInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u32,
}

impl FixedInterval {
    pub fn zero(scale: u32) -> Self {
        Self {
            lo: BigInt::zero(),
            hi: BigInt::zero(),
            scale,
        }
    }

    pub fn one(scale: u32) -> Self {
        let unit = BigInt::one() << scale;
        Self {
            lo: unit.clone(),
            hi: unit,
            scale,
        }
    }

    /// Smallest enclosure of a rational at this scale.
    #[cfg(test)]
    pub fn from_rational(value: &BigRational, scale: u32) -> Self {
        let shifted = value.numer() << scale;
        Self {
            lo: div_floor(&shifted, value.denom()),
            hi: div_ceil(&shifted, value.denom()),
            scale,
        }
    }

    /// Exact re-expression at a finer scale.
    pub fn rescale_up(&self, scale: u32) -> Self {
        assert!(scale >= self.scale);
        let shift = scale - self.scale;
        Self {
            lo: &self.lo << shift,
            hi: &self.hi << shift,
            scale,
        }
    }

    #[cfg(test)]
    pub fn width_units(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.scale, other.scale);
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            scale: self.scale,
        }
    }

    /// Product of two intervals whose lower endpoints are nonnegative.
    pub fn mul_nonneg(&self, other: &Self) -> Self {
        debug_assert_eq!(self.scale, other.scale);
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Self {
            lo: shr_floor(&(&self.lo * &other.lo), self.scale),
            hi: shr_ceil(&(&self.hi * &other.hi), self.scale),
            scale: self.scale,
        }
    }

    pub fn pow_nonneg(&self, mut exponent: u64) -> Self {
        let mut result = Self::one(self.scale);
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul_nonneg(&base);
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.mul_nonneg(&base);
            }
        }
        result
    }

    /// Multiplication by an exact rational of either sign.
    pub fn mul_rational(&self, factor: &BigRational) -> Self {
        let (num, den) = (factor.numer(), factor.denom());
        let a = &self.lo * num;
        let b = &self.hi * num;
        let (small, large) = if num.is_negative() { (b, a) } else { (a, b) };
        Self {
            lo: div_floor(&small, den),
            hi: div_ceil(&large, den),
            scale: self.scale,
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let scale = self.scale.max(other.scale);
        let a = self.rescale_up(scale);
        let b = other.rescale_up(scale);
        let lo = a.lo.max(b.lo);
        let hi = a.hi.min(b.hi);
        (lo <= hi).then_some(Self { lo, hi, scale })
    }

    pub fn to_rationals(&self) -> (BigRational, BigRational) {
        let den = BigInt::one() << self.scale;
        (
            BigRational::new(self.lo.clone(), den.clone()),
            BigRational::new(self.hi.clone(), den),
        )
    }
}
