use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::fixed::FixedInterval;
use super::sine::two_sin_fixed;
use super::{ArithError, CertifiedInterval, SineProductTerm};
use super::{DEFAULT_MAX_PRECISION_BITS, INITIAL_PRECISION_BITS};

/// Precision budget for adaptive evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub initial_precision_bits: u32,
    pub max_precision_bits: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            initial_precision_bits: INITIAL_PRECISION_BITS,
            max_precision_bits: DEFAULT_MAX_PRECISION_BITS,
        }
    }
}

impl EvalConfig {
    pub fn with_max_precision_bits(max_precision_bits: u32) -> Self {
        Self {
            max_precision_bits,
            ..Self::default()
        }
    }
}

/// Encloses `scale * sum(coefficient * term)` to within `target_width`,
/// using the default precision budget.
pub fn evaluate_sum(
    terms: &[(BigRational, SineProductTerm)],
    scale: &BigRational,
    target_width: &BigRational,
) -> Result<CertifiedInterval, ArithError> {
    evaluate_sum_with(terms, scale, target_width, &EvalConfig::default())
}

/// Like [`evaluate_sum`] with an explicit precision budget.
///
/// All sine factors are evaluated at one shared working precision. The
/// precision starts at `initial_precision_bits` and doubles until the width
/// target is met; successive enclosures are intersected. Exceeding
/// `max_precision_bits` is a certification failure.
pub fn evaluate_sum_with(
    terms: &[(BigRational, SineProductTerm)],
    scale: &BigRational,
    target_width: &BigRational,
    config: &EvalConfig,
) -> Result<CertifiedInterval, ArithError> {
    if !target_width.is_positive() {
        return Err(ArithError::InvalidArgument(
            "target width must be positive".into(),
        ));
    }
    if config.max_precision_bits == 0 {
        return Err(ArithError::InvalidArgument(
            "maximum precision must be positive".into(),
        ));
    }
    let mut precision = config
        .initial_precision_bits
        .clamp(1, config.max_precision_bits);
    let mut best: Option<FixedInterval> = None;
    loop {
        let current = evaluate_at(terms, scale, precision);
        let refined = match &best {
            Some(prev) => prev
                .intersect(&current)
                .ok_or(ArithError::InconsistentEnclosures)?,
            None => current,
        };
        let result = CertifiedInterval::from_fixed(&refined, precision);
        if &result.width() <= target_width {
            return Ok(result);
        }
        if precision >= config.max_precision_bits {
            return Err(ArithError::PrecisionExceeded {
                max_bits: config.max_precision_bits,
                width: result.width(),
            });
        }
        best = Some(refined);
        precision = precision.saturating_mul(2).min(config.max_precision_bits);
    }
}

fn evaluate_at(
    terms: &[(BigRational, SineProductTerm)],
    scale: &BigRational,
    precision: u32,
) -> FixedInterval {
    let mut sines: HashMap<(u64, u64), FixedInterval> = HashMap::new();
    let mut total = FixedInterval::zero(precision);
    for (coefficient, term) in terms {
        if coefficient.is_zero() {
            continue;
        }
        let mut product = FixedInterval::one(precision);
        for (m, e) in term.factors() {
            let factor = sines
                .entry((m, term.modulus()))
                .or_insert_with(|| two_sin_fixed(m, term.modulus(), precision));
            product = product.mul_nonneg(&factor.pow_nonneg(e));
        }
        total = total.add(&product.mul_rational(coefficient));
    }
    if scale.is_one() {
        total
    } else if scale.is_zero() {
        FixedInterval {
            lo: BigInt::zero(),
            hi: BigInt::zero(),
            scale: precision,
        }
    } else {
        total.mul_rational(scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn full_product(modulus: u64) -> SineProductTerm {
        SineProductTerm::new(modulus, (1..modulus as i64).map(|j| (j, 1))).unwrap()
    }

    #[test]
    fn empty_sum_is_exact_zero() {
        let iv = evaluate_sum(&[], &int(5), &frac(1, 8)).unwrap();
        assert_eq!(iv.lo(), &int(0));
        assert_eq!(iv.hi(), &int(0));
    }

    #[test]
    fn rejects_nonpositive_target() {
        assert!(evaluate_sum(&[], &int(1), &int(0)).is_err());
        assert!(evaluate_sum(&[], &int(1), &int(-1)).is_err());
    }

    #[test]
    fn product_of_all_sines_is_the_modulus() {
        let iv = evaluate_sum(&[(int(1), full_product(5))], &int(1), &frac(1, 8)).unwrap();
        assert!(iv.contains(&int(5)));
        assert!(iv.width() <= frac(1, 8));
        assert_eq!(super::super::certify_integer(&iv).unwrap(), BigInt::from(5));
    }

    #[test]
    fn negative_coefficients_cancel() {
        let t = full_product(7);
        let iv = evaluate_sum(
            &[(int(3), t.clone()), (int(-2), t)],
            &frac(1, 7),
            &frac(1, 1000),
        )
        .unwrap();
        assert!(iv.contains(&int(1)));
    }

    #[test]
    fn tiny_target_forces_doubling() {
        let target = BigRational::new(BigInt::one(), BigInt::one() << 500u32);
        let iv = evaluate_sum(&[(int(1), full_product(9))], &int(1), &target).unwrap();
        assert!(iv.precision_bits() >= 512);
        assert!(iv.contains(&int(9)));
    }

    #[test]
    fn precision_cap_is_enforced() {
        let target = BigRational::new(BigInt::one(), BigInt::one() << 500u32);
        let config = EvalConfig::with_max_precision_bits(128);
        let err = evaluate_sum_with(&[(int(1), full_product(9))], &int(1), &target, &config);
        assert!(matches!(
            err,
            Err(ArithError::PrecisionExceeded { max_bits: 128, .. })
        ));
    }

    #[test]
    fn two_two_one_sum() {
        // subsets {1,2},{1,3},{2,3} of {1,2,3}; each product over s in S, t not in S
        // of |2 sin(pi (s-t)/3)| equals 3
        let terms: Vec<_> = [[(1i64, 1u64), (2, 1)], [(2, 1), (1, 1)], [(1, 1), (2, 1)]]
            .iter()
            .map(|f| (int(1), SineProductTerm::new(3, f.iter().copied()).unwrap()))
            .collect();
        let iv = evaluate_sum(&terms, &frac(4, 9), &frac(1, 8)).unwrap();
        assert!(iv.contains(&int(4)));
    }
}
