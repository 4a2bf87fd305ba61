//! Dimensions `s(n,d,k) = h^0(SM(n,d), theta^k)` and
//! `v(n,d,k) = h^0(M(n,d), theta_F^k)`.
//!
//! `s` comes from the SL(n) Verlinde subset sum
//!
//! ```text
//! s(n,0,k) = (n/(n+k))^g * sum over S in {1..n+k}, |S| = n, of
//!            prod_{s in S, t not in S} |2 sin(pi (s-t)/(n+k))|^(g-1)
//! ```
//!
//! together with the genus-one closed form and the degree reduction
//! `d -> d mod n`. `v` is obtained from `s` by the transfer
//! `v * h^g = s * k^g`, `h = gcd(n, d)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_arith::{
    certify_integer, evaluate_sum_with, ArithError, CertifiedInterval, EvalConfig, SineProductTerm,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerlindeError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("degree not ≡ 0 mod rank at genus ≥ 2")]
    Unsupported { genus: u32, rank: u64, degree: i64 },
    #[error("certification failed: {0}")]
    Certification(#[from] ArithError),
    #[error("integrality violated: {numerator} is not divisible by {denominator}")]
    IntegralityViolation {
        numerator: BigUint,
        denominator: BigUint,
    },
    #[error("trigonometric sum certified a negative value {0}")]
    NegativeValue(BigInt),
}

/// `gcd(n, d)` with `gcd(n, 0) = n`; negative degrees use `|d|`.
pub fn degree_gcd(rank: u64, degree: i64) -> u64 {
    rank.gcd(&degree.unsigned_abs())
}

/// One dimension question: genus `g >= 1`, rank `n >= 1`, degree `d`,
/// level `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VerlindeQuery {
    genus: u32,
    rank: u64,
    degree: i64,
    level: u64,
}

impl VerlindeQuery {
    pub fn new(genus: u32, rank: u64, degree: i64, level: u64) -> Result<Self, VerlindeError> {
        if genus == 0 {
            return Err(VerlindeError::InvalidQuery(
                "genus must be at least 1".into(),
            ));
        }
        if rank == 0 {
            return Err(VerlindeError::InvalidQuery(
                "rank must be at least 1".into(),
            ));
        }
        if level == 0 {
            return Err(VerlindeError::InvalidQuery(
                "level must be at least 1".into(),
            ));
        }
        if rank > i64::MAX as u64 {
            return Err(VerlindeError::InvalidQuery("rank out of range".into()));
        }
        Ok(Self {
            genus,
            rank,
            degree,
            level,
        })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `h = gcd(n, d)`.
    pub fn gcd(&self) -> u64 {
        degree_gcd(self.rank, self.degree)
    }

    /// `n / h`.
    pub fn reduced_rank(&self) -> u64 {
        self.rank / self.gcd()
    }

    /// `d / h`.
    pub fn reduced_degree(&self) -> i64 {
        self.degree / self.gcd() as i64
    }
}

impl fmt::Display for VerlindeQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(g={}, n={}, d={}, k={})",
            self.genus, self.rank, self.degree, self.level
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    TrigSum,
    EllipticClosedForm,
    #[serde(rename = "theorem1-transfer")]
    Theorem1Transfer,
    TrivialRankOne,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::TrigSum => "trig-sum",
            Method::EllipticClosedForm => "elliptic-closed-form",
            Method::Theorem1Transfer => "theorem1-transfer",
            Method::TrivialRankOne => "trivial-rank-one",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A dimension together with how it was obtained.
///
/// `enclosure` holds the final certified interval when the value came from a
/// trigonometric sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimResult {
    pub value: BigUint,
    pub method: Method,
    pub certified: bool,
    pub enclosure: Option<CertifiedInterval>,
}

impl DimResult {
    fn exact(value: BigUint, method: Method) -> Self {
        Self {
            value,
            method,
            certified: false,
            enclosure: None,
        }
    }
}

/// How the `n`-subsets of `{1..n+k}` are turned into sum terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumeration {
    /// One term per subset, in lexicographic order.
    Direct,
    /// Subsets with identical sine products (for instance all translates
    /// `S -> S + 1 mod n+k`) are merged into one term with a multiplicity.
    Merged,
}

/// The prefactor `(n/(n+k))^g`.
pub fn beauville_scale(genus: u32, rank: u64, level: u64) -> BigRational {
    BigRational::new(BigInt::from(rank), BigInt::from(rank + level)).pow(genus as i32)
}

/// Terms of the Verlinde subset sum with sine denominators `modulus`.
///
/// With `modulus = n + k` this is the genuine formula; other moduli are only
/// useful as negative controls.
pub fn beauville_terms(
    genus: u32,
    rank: u64,
    level: u64,
    modulus: u64,
    enumeration: Enumeration,
) -> Result<Vec<(BigRational, SineProductTerm)>, ArithError> {
    let size = rank + level;
    let exponent = genus as u64 - 1;
    let mut direct = Vec::new();
    for subset in (1..=size).combinations(rank as usize) {
        let mut inside = vec![false; size as usize + 1];
        for &s in &subset {
            inside[s as usize] = true;
        }
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for &s in &subset {
            for t in (1..=size).filter(|&t| !inside[t as usize]) {
                *counts.entry(s as i64 - t as i64).or_insert(0) += exponent;
            }
        }
        direct.push(SineProductTerm::new(modulus, counts)?);
    }
    Ok(match enumeration {
        Enumeration::Direct => direct
            .into_iter()
            .map(|t| (BigRational::one(), t))
            .collect(),
        Enumeration::Merged => {
            let mut merged: BTreeMap<SineProductTerm, u64> = BTreeMap::new();
            for t in direct {
                *merged.entry(t).or_insert(0) += 1;
            }
            merged
                .into_iter()
                .map(|(t, c)| (BigRational::from_integer(c.into()), t))
                .collect()
        }
    })
}

/// Computes dimensions under a fixed precision budget, memoising
/// trigonometric sums.
#[derive(Debug, Default)]
pub struct Engine {
    config: EvalConfig,
    memo: Mutex<HashMap<(u32, u64, u64), DimResult>>,
}

impl Engine {
    pub fn new(config: EvalConfig) -> Self {
        Self {
            config,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    /// Certifies `scale * sum(terms)` as a nonnegative integer.
    pub fn certify_trig_sum(
        &self,
        terms: &[(BigRational, SineProductTerm)],
        scale: &BigRational,
    ) -> Result<DimResult, VerlindeError> {
        let mut target = BigRational::new(BigInt::one(), BigInt::from(8));
        loop {
            let enclosure = evaluate_sum_with(terms, scale, &target, &self.config)?;
            match certify_integer(&enclosure) {
                Ok(value) => {
                    let value = value
                        .to_biguint()
                        .ok_or_else(|| VerlindeError::NegativeValue(value.clone()))?;
                    return Ok(DimResult {
                        value,
                        method: Method::TrigSum,
                        certified: true,
                        enclosure: Some(enclosure),
                    });
                }
                Err(ArithError::AmbiguousInterval { .. }) => {
                    target /= BigInt::from(16);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    /// Every memoised trigonometric sum as `((g, n, k), result)`, sorted.
    pub fn cached_sums(&self) -> Vec<((u32, u64, u64), DimResult)> {
        let memo = self.memo.lock().expect("memo poisoned");
        let mut out: Vec<_> = memo.iter().map(|(k, v)| (*k, v.clone())).collect();
        out.sort_by_key(|(k, _)| *k);
        out
    }

    /// The Verlinde number `s(n, 0, k)` at genus `g`.
    pub fn beauville_sum(
        &self,
        genus: u32,
        rank: u64,
        level: u64,
    ) -> Result<DimResult, VerlindeError> {
        VerlindeQuery::new(genus, rank, 0, level)?;
        let key = (genus, rank, level);
        if let Some(hit) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let terms = beauville_terms(genus, rank, level, rank + level, Enumeration::Merged)?;
        let result = self.certify_trig_sum(&terms, &beauville_scale(genus, rank, level))?;
        self.memo
            .lock()
            .expect("memo poisoned")
            .insert(key, result.clone());
        Ok(result)
    }

    /// `s(n,d,k)`, the dimension of level-`k` theta functions on `SM(n,d)`.
    pub fn sl_dim(&self, q: &VerlindeQuery) -> Result<DimResult, VerlindeError> {
        if q.rank() == 1 {
            return Ok(DimResult::exact(BigUint::one(), Method::TrivialRankOne));
        }
        if q.degree().rem_euclid(q.rank() as i64) == 0 {
            return self.beauville_sum(q.genus(), q.rank(), q.level());
        }
        if q.genus() == 1 {
            let sections = elliptic_h0(q.gcd() as i64)?;
            return Ok(DimResult::exact(
                symmetric_power_dim(sections, q.level()),
                Method::EllipticClosedForm,
            ));
        }
        Err(VerlindeError::Unsupported {
            genus: q.genus(),
            rank: q.rank(),
            degree: q.degree(),
        })
    }

    /// `v(n,d,k) = s(n,d,k) * (k/h)^g`, the dimension of level-`k` theta
    /// functions on the full moduli space `M(n,d)`.
    pub fn gl_dim(&self, q: &VerlindeQuery) -> Result<DimResult, VerlindeError> {
        let s = self.sl_dim(q)?;
        let numerator = &s.value * BigUint::from(q.level()).pow(q.genus());
        let denominator = BigUint::from(q.gcd()).pow(q.genus());
        let (value, remainder) = numerator.div_rem(&denominator);
        if !remainder.is_zero() {
            return Err(VerlindeError::IntegralityViolation {
                numerator,
                denominator,
            });
        }
        Ok(DimResult {
            value,
            method: Method::Theorem1Transfer,
            certified: s.certified,
            enclosure: None,
        })
    }
}

fn default_engine() -> &'static Engine {
    static ENGINE: std::sync::OnceLock<Engine> = std::sync::OnceLock::new();
    ENGINE.get_or_init(Engine::default)
}

/// [`Engine::beauville_sum`] on a shared default engine.
pub fn beauville_sum(genus: u32, rank: u64, level: u64) -> Result<DimResult, VerlindeError> {
    default_engine().beauville_sum(genus, rank, level)
}

/// [`Engine::sl_dim`] on a shared default engine.
pub fn sl_dim(q: &VerlindeQuery) -> Result<DimResult, VerlindeError> {
    default_engine().sl_dim(q)
}

/// [`Engine::gl_dim`] on a shared default engine.
pub fn gl_dim(q: &VerlindeQuery) -> Result<DimResult, VerlindeError> {
    default_engine().gl_dim(q)
}

/// `h^0(J, theta^m) = m^g` on a `g`-dimensional principally polarised
/// abelian variety.
pub fn jacobian_theta_dim(genus: u32, multiple: u64) -> Result<BigUint, VerlindeError> {
    if multiple < 1 {
        return Err(VerlindeError::InvalidQuery(
            "theta multiple must be at least 1".into(),
        ));
    }
    Ok(BigUint::from(multiple).pow(genus))
}

/// Dimension of the `k`-th symmetric power of an `m`-dimensional space,
/// `C(m+k-1, k)`.
pub fn symmetric_power_dim(dimension: u64, power: u64) -> BigUint {
    if power == 0 {
        return BigUint::one();
    }
    if dimension == 0 {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(dimension + power - 1), BigUint::from(power))
}

/// `h^0` of a line bundle of degree `e >= 1` on a genus-one curve.
pub fn elliptic_h0(degree: i64) -> Result<u64, VerlindeError> {
    if degree < 1 {
        return Err(VerlindeError::InvalidQuery(format!(
            "h^0 of a degree-{degree} bundle on an elliptic curve depends on the bundle"
        )));
    }
    Ok(degree as u64)
}
