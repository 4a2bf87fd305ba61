//! Certified evaluation of rational combinations of products of
//! `|2 sin(pi m / M)|^e`, and the integrality certificate that turns a narrow
//! enclosure into an exact integer.
//!
//! Endpoints are exact rationals. Internally all arithmetic is carried out on
//! dyadic fixed-point intervals with outward rounding at a working precision
//! that doubles until the requested width is reached.

mod fixed;
mod pi;
mod sine;
mod sum;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use fixed::FixedInterval;

pub use sum::{evaluate_sum, evaluate_sum_with, EvalConfig};

/// Default precision ceiling, in bits, for adaptive evaluation.
pub const DEFAULT_MAX_PRECISION_BITS: u32 = 16384;
/// Precision the adaptive schedule starts from.
pub const INITIAL_PRECISION_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no integer in [{lo}, {hi}]")]
    NoIntegerInInterval { lo: BigRational, hi: BigRational },
    #[error("interval [{lo}, {hi}] does not isolate a single integer")]
    AmbiguousInterval { lo: BigRational, hi: BigRational },
    #[error("width {width} still above target at {max_bits} bits")]
    PrecisionExceeded { max_bits: u32, width: BigRational },
    #[error("successive enclosures are disjoint")]
    InconsistentEnclosures,
}

/// A real number enclosed by exact rational bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedInterval {
    lo: BigRational,
    hi: BigRational,
    precision_bits: u32,
}

impl CertifiedInterval {
    pub fn new(lo: BigRational, hi: BigRational, precision_bits: u32) -> Result<Self, ArithError> {
        if lo > hi {
            return Err(ArithError::InvalidArgument(format!(
                "interval bounds out of order: {lo} > {hi}"
            )));
        }
        if precision_bits == 0 {
            return Err(ArithError::InvalidArgument(
                "precision_bits must be positive".into(),
            ));
        }
        Ok(Self {
            lo,
            hi,
            precision_bits,
        })
    }

    /// Degenerate interval holding one exact value.
    pub fn point(value: BigRational, precision_bits: u32) -> Self {
        Self {
            lo: value.clone(),
            hi: value,
            precision_bits: precision_bits.max(1),
        }
    }

    pub(crate) fn from_fixed(iv: &FixedInterval, precision_bits: u32) -> Self {
        let (lo, hi) = iv.to_rationals();
        Self {
            lo,
            hi,
            precision_bits,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, value: &BigRational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn is_subset_of(&self, other: &CertifiedInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Combines this enclosure with a newer one of the same quantity.
    ///
    /// The result is contained in both, so refinement never widens. Disjoint
    /// enclosures mean one of them is unsound and are reported as an error.
    pub fn refine(&self, newer: &CertifiedInterval) -> Result<CertifiedInterval, ArithError> {
        let lo = (&self.lo).max(&newer.lo).clone();
        let hi = (&self.hi).min(&newer.hi).clone();
        if lo > hi {
            return Err(ArithError::InconsistentEnclosures);
        }
        Ok(CertifiedInterval {
            lo,
            hi,
            precision_bits: self.precision_bits.max(newer.precision_bits),
        })
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] @{}b", self.lo, self.hi, self.precision_bits)
    }
}

/// `prod |2 sin(pi m / M)|^e` in canonical form.
///
/// Numerators are folded into `(0, M/2]` (the absolute value is invariant
/// under `m -> M - m` and `m -> -m`) and zero exponents are dropped, so two
/// terms with the same value-defining data compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SineProductTerm {
    modulus: u64,
    factors: BTreeMap<u64, u64>,
}

impl SineProductTerm {
    pub fn new(
        modulus: u64,
        factors: impl IntoIterator<Item = (i64, u64)>,
    ) -> Result<Self, ArithError> {
        if modulus == 0 {
            return Err(ArithError::InvalidArgument(
                "modulus must be positive".into(),
            ));
        }
        let mut folded = BTreeMap::new();
        for (m, e) in factors {
            if e == 0 {
                continue;
            }
            let r = sine::fold_numerator(m, modulus).ok_or_else(|| {
                ArithError::InvalidArgument(format!("{m} is a multiple of the modulus {modulus}"))
            })?;
            *folded.entry(r).or_insert(0) += e;
        }
        Ok(Self {
            modulus,
            factors: folded,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Folded numerators and their total exponents.
    pub fn factors(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.factors.iter().map(|(&m, &e)| (m, e))
    }

    pub fn is_empty_product(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Rigorous enclosure of `2 sin(pi m / M)` for `0 < m < M`, of width at most
/// `2^(1 - precision_bits)`.
///
/// The enclosure at precision `p` is intersected with the one at `p / 2`, all
/// the way down, so doubling the precision always yields a subset of the
/// previous interval.
pub fn sin_enclosure(
    m: i64,
    modulus: u64,
    precision_bits: u32,
) -> Result<CertifiedInterval, ArithError> {
    if modulus == 0 || m <= 0 || m as u64 >= modulus {
        return Err(ArithError::InvalidArgument(format!(
            "need 0 < m < M, got m={m}, M={modulus}"
        )));
    }
    if precision_bits == 0 {
        return Err(ArithError::InvalidArgument(
            "precision_bits must be positive".into(),
        ));
    }
    let folded = sine::fold_numerator(m, modulus).expect("0 < m < M");
    let iv = nested_sine(folded, modulus, precision_bits);
    Ok(CertifiedInterval::from_fixed(&iv, precision_bits))
}

fn nested_sine(m: u64, modulus: u64, precision_bits: u32) -> FixedInterval {
    // two extra bits keep the outward rounding inside 2^(1-p)
    let raw = sine::two_sin_fixed(m, modulus, precision_bits + 2);
    if precision_bits <= 1 {
        return raw;
    }
    let coarser = nested_sine(m, modulus, precision_bits / 2);
    raw.intersect(&coarser)
        .expect("sound enclosures of the same value overlap")
}

/// Returns the unique integer in `iv`, provided the interval is narrower
/// than 1/2.
///
/// No integer at all is a hard failure (the enclosed quantity is not an
/// integer, so the formula or its implementation is wrong). Several integers,
/// or a single one inside an interval of width >= 1/2, is ambiguous and the
/// caller should refine.
pub fn certify_integer(iv: &CertifiedInterval) -> Result<BigInt, ArithError> {
    let first = ceil_rational(iv.lo());
    let last = floor_rational(iv.hi());
    if first > last {
        return Err(ArithError::NoIntegerInInterval {
            lo: iv.lo().clone(),
            hi: iv.hi().clone(),
        });
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if first != last || iv.width() >= half {
        return Err(ArithError::AmbiguousInterval {
            lo: iv.lo().clone(),
            hi: iv.hi().clone(),
        });
    }
    Ok(first)
}

fn floor_rational(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

fn ceil_rational(x: &BigRational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}
