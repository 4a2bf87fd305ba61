//! Certified enclosure of pi via Machin's formula
//! `pi = 16 atan(1/5) - 4 atan(1/239)`.
//!
//! Both arctangent series are alternating with strictly decreasing terms, so
//! every partial sum ending on a subtracted term is a lower bound and every
//! partial sum ending on an added term is an upper bound. Terms are rounded in
//! the direction that keeps each partial sum on its side.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use super::fixed::{div_ceil, div_floor, FixedInterval};

fn pi_cache() -> &'static Mutex<HashMap<u32, FixedInterval>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, FixedInterval>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Encloses `atan(1/q)` at the given scale, for `q >= 2`.
fn atan_inverse(q: u64, scale: u32) -> FixedInterval {
    let unit = BigInt::one() << scale;
    let q = BigInt::from(q);
    let q_squared = &q * &q;

    // running partial sums: `low` rounds every term against the sum, `high` with it
    let mut low = BigInt::from(0);
    let mut high = BigInt::from(0);
    let mut best_lower: Option<BigInt> = None;
    let mut best_upper: Option<BigInt> = None;
    let mut power = q.clone();
    let mut j: u64 = 0;
    loop {
        let den = &power * BigInt::from(2 * j + 1);
        let term_lo = div_floor(&unit, &den);
        let term_hi = div_ceil(&unit, &den);
        let tiny = term_hi <= BigInt::one();
        if j.is_multiple_of(2) {
            low += &term_lo;
            high += &term_hi;
            best_upper = Some(high.clone());
        } else {
            low -= &term_hi;
            high -= &term_lo;
            best_lower = Some(low.clone());
        }
        if tiny && best_lower.is_some() && best_upper.is_some() && j % 2 == 1 {
            break;
        }
        power *= &q_squared;
        j += 1;
    }
    FixedInterval {
        lo: best_lower.expect("odd partial sum recorded"),
        hi: best_upper.expect("even partial sum recorded"),
        scale,
    }
}

fn compute_pi(scale: u32) -> FixedInterval {
    let a5 = atan_inverse(5, scale);
    let a239 = atan_inverse(239, scale);
    FixedInterval {
        lo: BigInt::from(16) * &a5.lo - BigInt::from(4) * &a239.hi,
        hi: BigInt::from(16) * &a5.hi - BigInt::from(4) * &a239.lo,
        scale,
    }
}

/// Enclosure of pi with endpoints at `scale` fractional bits.
///
/// Computed once per scale; concurrent callers may race to fill an entry but
/// always write the same value.
pub(crate) fn pi_enclosure(scale: u32) -> FixedInterval {
    if let Some(hit) = pi_cache().lock().expect("pi cache poisoned").get(&scale) {
        return hit.clone();
    }
    let value = compute_pi(scale);
    pi_cache()
        .lock()
        .expect("pi cache poisoned")
        .entry(scale)
        .or_insert(value)
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    // pi to 60 significant digits
    const PI_DIGITS: &str = "314159265358979323846264338327950288419716939937510582097494";

    fn pi_oracle() -> BigRational {
        let num: BigInt = PI_DIGITS.parse().unwrap();
        let den = BigInt::from(10).pow(59);
        BigRational::new(num, den)
    }

    #[test]
    fn encloses_pi_and_is_narrow() {
        let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(58));
        for scale in [8u32, 64, 150, 190] {
            let iv = pi_enclosure(scale);
            let (lo, hi) = iv.to_rationals();
            let oracle = pi_oracle();
            assert!(lo <= &oracle + &tol, "scale {scale}");
            assert!(&oracle - &tol <= hi, "scale {scale}");
            assert!(
                iv.width_units() <= BigInt::from(20 * scale),
                "scale {scale}"
            );
        }
    }

    #[test]
    fn cache_returns_identical_values() {
        assert_eq!(pi_enclosure(333), pi_enclosure(333));
        assert_eq!(pi_enclosure(333), compute_pi(333));
    }
}
