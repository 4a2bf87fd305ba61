//! Enclosures of `2 sin(pi m / M)` for rational multiples of pi.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::fixed::{div_ceil, div_floor, FixedInterval};
use super::pi::pi_enclosure;

/// Extra fractional bits used inside the series evaluation.
fn guard_bits(scale: u32) -> u32 {
    12 + (32 - scale.leading_zeros())
}

/// Folds `m` into `(0, M/2]` using `|sin(pi m/M)| = |sin(pi (M-m)/M)|`.
///
/// Returns `None` when `m` is a multiple of `M`.
pub(crate) fn fold_numerator(m: i64, modulus: u64) -> Option<u64> {
    let r = m.unsigned_abs() % modulus;
    if r == 0 {
        return None;
    }
    Some(r.min(modulus - r))
}

/// Bounds on `sin(x)` for an exact dyadic `0 <= x <= 2`.
///
/// The Taylor series is alternating with decreasing terms on that range, so
/// partial sums ending on a subtracted term bound from below and partial sums
/// ending on an added term bound from above.
fn sin_series(x: &BigInt, scale: u32) -> (BigInt, BigInt) {
    let unit = BigInt::one() << scale;
    let x_sq_lo = div_floor(&(x * x), &unit);
    let x_sq_hi = div_ceil(&(x * x), &unit);

    let mut term_lo = x.clone();
    let mut term_hi = x.clone();
    let mut low = BigInt::zero();
    let mut high = BigInt::zero();
    let mut best_lower: Option<BigInt> = None;
    let mut best_upper: Option<BigInt> = None;
    let mut j: u64 = 0;
    loop {
        if j.is_multiple_of(2) {
            low += &term_lo;
            high += &term_hi;
            best_upper = Some(high.clone());
        } else {
            low -= &term_hi;
            high -= &term_lo;
            best_lower = Some(low.clone());
        }
        if j % 2 == 1 && term_hi <= BigInt::one() {
            break;
        }
        let den = &unit * BigInt::from((2 * j + 2) * (2 * j + 3));
        term_lo = div_floor(&(&term_lo * &x_sq_lo), &den);
        term_hi = div_ceil(&(&term_hi * &x_sq_hi), &den);
        j += 1;
    }
    (
        best_lower.expect("odd partial sum recorded"),
        best_upper.expect("even partial sum recorded"),
    )
}

/// Enclosure of `2 sin(pi m / M)` for a folded numerator `0 < m <= M/2`,
/// rounded outward to `scale` fractional bits.
pub(crate) fn two_sin_fixed(m: u64, modulus: u64, scale: u32) -> FixedInterval {
    debug_assert!(m > 0 && 2 * m <= modulus);
    if 2 * m == modulus {
        let two = BigInt::from(2) << scale;
        return FixedInterval {
            lo: two.clone(),
            hi: two,
            scale,
        };
    }
    let inner = scale + guard_bits(scale);
    let pi = pi_enclosure(inner);
    let num = BigInt::from(m);
    let den = BigInt::from(modulus);
    let x_lo = div_floor(&(&pi.lo * &num), &den);
    let x_hi = div_ceil(&(&pi.hi * &num), &den);

    // sin is increasing on [0, pi/2]; x_lo is below the true argument
    let (lower, _) = sin_series(&x_lo, inner);
    let one = BigInt::one() << inner;
    let upper = if &x_hi * 2 <= pi.lo {
        let (_, upper) = sin_series(&x_hi, inner);
        upper.min(one)
    } else {
        one
    };
    let lower = if lower.is_negative() {
        BigInt::zero()
    } else {
        lower
    };

    let drop = guard_bits(scale) - 1; // doubling absorbs one bit
    let unit = BigInt::one() << drop;
    FixedInterval {
        lo: div_floor(&lower, &unit),
        hi: div_ceil(&upper, &unit),
        scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn folding() {
        assert_eq!(fold_numerator(1, 5), Some(1));
        assert_eq!(fold_numerator(4, 5), Some(1));
        assert_eq!(fold_numerator(-3, 5), Some(2));
        assert_eq!(fold_numerator(7, 5), Some(2));
        assert_eq!(fold_numerator(10, 5), None);
        assert_eq!(fold_numerator(3, 6), Some(3));
    }

    #[test]
    fn series_brackets_small_arguments() {
        // sin(1/2) = 0.479425538604203...
        let scale = 60;
        let x = BigInt::one() << (scale - 1);
        let (lo, hi) = sin_series(&x, scale);
        let den = BigInt::one() << scale;
        let lo = BigRational::new(lo, den.clone());
        let hi = BigRational::new(hi, den);
        let oracle = BigRational::new(479425538604203u64.into(), 1_000_000_000_000_000u64.into());
        let slack = BigRational::new(1.into(), 1_000_000_000_000_000u64.into());
        assert!(lo <= &oracle + &slack);
        assert!(&oracle - &slack <= hi);
    }

    #[test]
    fn half_turn_is_exact() {
        let iv = two_sin_fixed(3, 6, 40);
        assert_eq!(iv.lo, iv.hi);
        assert_eq!(iv.lo, BigInt::from(2) << 40);
    }
}
