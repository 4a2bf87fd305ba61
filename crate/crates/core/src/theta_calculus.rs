//! Formal calculus of theta bundles on moduli of vector bundles.
//!
//! Line bundles on the curve are elements of the free abelian group on named
//! symbols, each symbol carrying a degree. A theta bundle `theta_F` on a full
//! moduli space depends only on `rk F` and the class of `det F`, so it is
//! modelled by a [`ThetaDescriptor`].

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::verlinde::degree_gcd;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("rank {rank} is not a multiple of rank {base}")]
    NotAMultiple { rank: u64, base: u64 },
    #[error("pullback exponent {numerator}/{denominator} is not an integer")]
    NonIntegralExponent { numerator: u64, denominator: u64 },
    #[error("constraint class has degree {actual}, expected {expected}")]
    DegreeMismatch { expected: i64, actual: i64 },
    #[error("translation needs a degree-0 class, got degree {0}")]
    NonZeroDegree(i64),
    #[error("symbol {symbol} used with degrees {first} and {second}")]
    DegreeConflict {
        symbol: String,
        first: i64,
        second: i64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// An element `prod symbol^exponent` of the free abelian group on line-bundle
/// symbols.
///
/// Zero exponents are dropped and symbols are kept sorted, so equality of
/// classes is structural equality. The empty class is `O`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalLineClass {
    exponents: BTreeMap<String, i64>,
    degrees: BTreeMap<String, i64>,
}

impl FormalLineClass {
    pub fn identity() -> Self {
        Self::default()
    }

    /// The class of a single line bundle `name` of degree `degree`.
    pub fn symbol(name: impl Into<String>, degree: i64) -> Self {
        let name = name.into();
        Self {
            exponents: BTreeMap::from([(name.clone(), 1)]),
            degrees: BTreeMap::from([(name, degree)]),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponent(&self, name: &str) -> i64 {
        self.exponents.get(name).copied().unwrap_or(0)
    }

    pub fn symbol_degree(&self, name: &str) -> Option<i64> {
        self.degrees.get(name).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, i64)> {
        self.exponents.iter().map(|(s, &e)| (s.as_str(), e))
    }

    /// Total degree on the curve.
    pub fn degree(&self) -> i64 {
        self.exponents
            .iter()
            .map(|(s, e)| e * self.degrees[s])
            .sum()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self, ThetaError> {
        let mut exponents = self.exponents.clone();
        let mut degrees = self.degrees.clone();
        for (symbol, &e) in &other.exponents {
            let deg = other.degrees[symbol];
            if let Some(&existing) = degrees.get(symbol) {
                if existing != deg {
                    return Err(ThetaError::DegreeConflict {
                        symbol: symbol.clone(),
                        first: existing,
                        second: deg,
                    });
                }
            }
            degrees.insert(symbol.clone(), deg);
            *exponents.entry(symbol.clone()).or_insert(0) += e;
        }
        Ok(Self::canonical(exponents, degrees))
    }

    pub fn pow(&self, power: i64) -> Self {
        let exponents = self
            .exponents
            .iter()
            .map(|(s, e)| (s.clone(), e * power))
            .collect();
        Self::canonical(exponents, self.degrees.clone())
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }

    fn canonical(mut exponents: BTreeMap<String, i64>, mut degrees: BTreeMap<String, i64>) -> Self {
        exponents.retain(|_, e| *e != 0);
        degrees.retain(|s, _| exponents.contains_key(s));
        Self { exponents, degrees }
    }

    /// Renders the class with exponent 1 left implicit, e.g. `L.detF^2`.
    pub fn monomial(&self) -> String {
        if self.is_identity() {
            return "O".into();
        }
        self.exponents
            .iter()
            .map(|(s, &e)| {
                if e == 1 {
                    s.clone()
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Every exponent is written out, e.g. `L1^1.detF^2`; the identity is `O`.
impl fmt::Display for FormalLineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("O");
        }
        let rendered: Vec<String> = self
            .exponents
            .iter()
            .map(|(s, e)| format!("{s}^{e}"))
            .collect();
        f.write_str(&rendered.join("."))
    }
}

/// `theta_F`, determined by `rk F` and `det F`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaDescriptor {
    rank: u64,
    det: FormalLineClass,
}

impl ThetaDescriptor {
    pub fn new(rank: u64, det: FormalLineClass) -> Result<Self, ThetaError> {
        if rank == 0 {
            return Err(ThetaError::InvalidInput(
                "rank of F must be at least 1".into(),
            ));
        }
        Ok(Self { rank, det })
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn det(&self) -> &FormalLineClass {
        &self.det
    }
}

impl fmt::Display for ThetaDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theta{{rank={}, det={}}}", self.rank, self.det)
    }
}

/// Rank and degree `(n_F, d_F)` of a bundle complementary to `M(n,d)`:
/// `n_F = k n'`, `d_F = k (n' (g-1) - d')` where `n = h n'`, `d = h d'`.
pub fn complementary_invariants(genus: u32, rank: u64, degree: i64, multiple: u64) -> (u64, i64) {
    let h = degree_gcd(rank, degree);
    let reduced_rank = rank / h;
    let reduced_degree = degree / h as i64;
    let n_f = multiple * reduced_rank;
    let d_f = multiple as i64 * (reduced_rank as i64 * (genus as i64 - 1) - reduced_degree);
    debug_assert_eq!(euler_pairing(genus, rank, degree, n_f, d_f), 0);
    (n_f, d_f)
}

/// `chi(E (x) F)` for `E` of rank `n`, degree `d` and `F` of rank `n_F`,
/// degree `d_F` on a genus-`g` curve.
pub fn euler_pairing(genus: u32, rank: u64, degree: i64, rank_f: u64, degree_f: i64) -> i64 {
    let (n, nf) = (rank as i64, rank_f as i64);
    n * degree_f + nf * degree - n * nf * (genus as i64 - 1)
}

/// The descriptor of a complementary bundle with `det F` named `symbol`.
pub fn complementary_descriptor(
    genus: u32,
    rank: u64,
    degree: i64,
    multiple: u64,
    symbol: &str,
) -> Result<ThetaDescriptor, ThetaError> {
    if rank == 0 || multiple == 0 {
        return Err(ThetaError::InvalidInput(
            "rank and multiple must be positive".into(),
        ));
    }
    let (n_f, d_f) = complementary_invariants(genus, rank, degree, multiple);
    ThetaDescriptor::new(n_f, FormalLineClass::symbol(symbol, d_f))
}

/// `theta_F = theta_{F0}^a (x) det^*(twist)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rescaling {
    pub multiple: u64,
    pub twist: FormalLineClass,
}

impl fmt::Display for Rescaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={}, twist={}", self.multiple, self.twist)
    }
}

/// Rescaling law: if `rk F = a rk F0` then
/// `theta_F = theta_{F0}^a (x) det^*(det F (x) det F0^-a)`.
pub fn theta_rescale(f: &ThetaDescriptor, f0: &ThetaDescriptor) -> Result<Rescaling, ThetaError> {
    if !f.rank.is_multiple_of(f0.rank) {
        return Err(ThetaError::NotAMultiple {
            rank: f.rank,
            base: f0.rank,
        });
    }
    let multiple = f.rank / f0.rank;
    let twist = f.det.tensor(&f0.det.pow(-(multiple as i64)))?;
    Ok(Rescaling { multiple, twist })
}

/// Translation law `theta_{F (x) M} = theta_F (x) det^* M^{rk F}` for a
/// degree-0 class `M`.
pub fn theta_translate(
    f: &ThetaDescriptor,
    m: &FormalLineClass,
) -> Result<(ThetaDescriptor, FormalLineClass), ThetaError> {
    theta_translate_power(f, m, 1)
}

/// The level-`k` version: `theta_{F (x) M}^k = theta_F^k (x) det^* M^{k rk F}`.
pub fn theta_translate_power(
    f: &ThetaDescriptor,
    m: &FormalLineClass,
    level: u64,
) -> Result<(ThetaDescriptor, FormalLineClass), ThetaError> {
    let degree = m.degree();
    if degree != 0 {
        return Err(ThetaError::NonZeroDegree(degree));
    }
    Ok((f.clone(), m.pow((f.rank * level) as i64)))
}

/// `theta^c [x] theta_{E1 (x) F}` on `SM(n1, L1) x M(n2, d2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackFactorization {
    pub left_exponent: u64,
    pub right: ThetaDescriptor,
}

impl fmt::Display for PullbackFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theta^{} [x] {}", self.left_exponent, self.right)
    }
}

/// Pullback of `theta_F` along `SM(n1, L1) x M(n2, d2) -> M(n1 n2, ...)`.
///
/// The left exponent is `c = n2 rk F / (n1 / gcd(n1, d1))`; the right factor
/// has rank `n1 rk F` and determinant `L1^{rk F} (x) det F^{n1}`.
pub fn pullback_split(
    n1: u64,
    d1: i64,
    n2: u64,
    f: &ThetaDescriptor,
    l1: &FormalLineClass,
) -> Result<PullbackFactorization, ThetaError> {
    if n1 == 0 || n2 == 0 {
        return Err(ThetaError::InvalidInput("ranks must be positive".into()));
    }
    let minimal = n1 / degree_gcd(n1, d1);
    let numerator = n2 * f.rank;
    let (left_exponent, rem) = numerator.div_rem(&minimal);
    if rem != 0 {
        return Err(ThetaError::NonIntegralExponent {
            numerator,
            denominator: minimal,
        });
    }
    let det = l1.pow(f.rank as i64).tensor(&f.det.pow(n1 as i64))?;
    Ok(PullbackFactorization {
        left_exponent,
        right: ThetaDescriptor::new(n1 * f.rank, det)?,
    })
}

/// `root^power = class`, asserting the existence of an `power`-th root of
/// degree `root_degree` without constructing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootConstraint {
    pub root: String,
    pub power: u64,
    pub class: FormalLineClass,
    pub root_degree: i64,
}

impl fmt::Display for RootConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}^{} = {}",
            self.root,
            self.power,
            self.class.monomial()
        )
    }
}

/// `tau^* theta_F = theta [x] theta_N^{n^2/h}` on `SM(n, L) x J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianPullback {
    pub right_exponent: u64,
    pub constraint: RootConstraint,
}

impl JacobianPullback {
    /// `(n (g-1), deg L + h deg det F)`, equal by construction.
    pub fn degree_check(&self) -> (i64, i64) {
        (
            self.constraint.power as i64 * self.constraint.root_degree,
            self.constraint.class.degree(),
        )
    }
}

impl fmt::Display for JacobianPullback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (expected, actual) = self.degree_check();
        writeln!(
            f,
            "theta [x] theta_{}^{}",
            self.constraint.root, self.right_exponent
        )?;
        writeln!(f, "constraint: {}", self.constraint)?;
        write!(f, "degree check: {expected} = {actual}")
    }
}

/// Pullback of a minimal theta bundle along `SM(n, L) x J_0 -> M(n, d)`.
///
/// `l` must have degree `d` and `det_f` the degree of a minimal complementary
/// determinant; the `n`-th root `N` of `L (x) det F^h` must then have degree
/// `g - 1`, which is checked.
pub fn jacobian_pullback(
    genus: u32,
    rank: u64,
    degree: i64,
    l: &FormalLineClass,
    det_f: &FormalLineClass,
) -> Result<JacobianPullback, ThetaError> {
    if rank == 0 || genus == 0 {
        return Err(ThetaError::InvalidInput(
            "rank and genus must be positive".into(),
        ));
    }
    let h = degree_gcd(rank, degree);
    let class = l.tensor(&det_f.pow(h as i64))?;
    let root_degree = genus as i64 - 1;
    let expected = rank as i64 * root_degree;
    if class.degree() != expected {
        return Err(ThetaError::DegreeMismatch {
            expected,
            actual: class.degree(),
        });
    }
    Ok(JacobianPullback {
        right_exponent: rank * rank / h,
        constraint: RootConstraint {
            root: "N".into(),
            power: rank,
            class,
            root_degree,
        },
    })
}

/// `jacobian_pullback` with `L` and `det F` named `L`, `detF` and given their
/// natural degrees `d` and `d_F`.
pub fn standard_jacobian_pullback(
    genus: u32,
    rank: u64,
    degree: i64,
) -> Result<JacobianPullback, ThetaError> {
    if rank == 0 || genus == 0 {
        return Err(ThetaError::InvalidInput(
            "rank and genus must be positive".into(),
        ));
    }
    let (_, d_f) = complementary_invariants(genus, rank, degree, 1);
    jacobian_pullback(
        genus,
        rank,
        degree,
        &FormalLineClass::symbol("L", degree),
        &FormalLineClass::symbol("detF", d_f),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(name: &str, deg: i64) -> FormalLineClass {
        FormalLineClass::symbol(name, deg)
    }

    #[test]
    fn complementary_examples() {
        assert_eq!(complementary_invariants(2, 2, 0, 1), (1, 1));
        assert_eq!(complementary_invariants(2, 3, 1, 2), (6, 4));
        for g in 1..6 {
            for k in 1..5 {
                assert_eq!(complementary_invariants(g, 1, g as i64 - 1, k), (k, 0));
            }
        }
    }

    #[test]
    fn euler_pairing_vanishes() {
        for g in 1..5u32 {
            for n in 1..7u64 {
                for d in -8..=8i64 {
                    for k in 1..4u64 {
                        let (nf, df) = complementary_invariants(g, n, d, k);
                        assert_eq!(euler_pairing(g, n, d, nf, df), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn class_display() {
        assert_eq!(FormalLineClass::identity().to_string(), "O");
        let c = sym("detF", 1).tensor(&sym("L1", 0)).unwrap();
        assert_eq!(c.to_string(), "L1^1.detF^1");
        assert_eq!(c.pow(2).monomial(), "L1^2.detF^2");
        assert_eq!(
            sym("L", 0)
                .tensor(&sym("detF", 1).pow(2))
                .unwrap()
                .monomial(),
            "L.detF^2"
        );
        assert_eq!(sym("x", 0).pow(-3).to_string(), "x^-3");
    }

    #[test]
    fn degree_conflicts_are_rejected() {
        assert!(matches!(
            sym("L", 1).tensor(&sym("L", 2)),
            Err(ThetaError::DegreeConflict { .. })
        ));
    }

    #[test]
    fn rescale_examples() {
        let f = ThetaDescriptor::new(2, sym("detF", 3)).unwrap();
        let f0 = ThetaDescriptor::new(1, sym("detF0", 1)).unwrap();
        let r = theta_rescale(&f, &f0).unwrap();
        assert_eq!(r.multiple, 2);
        assert_eq!(r.twist.exponent("detF"), 1);
        assert_eq!(r.twist.exponent("detF0"), -2);
        assert_eq!(r.to_string(), "a=2, twist=detF^1.detF0^-2");

        let same = theta_rescale(&f, &f).unwrap();
        assert_eq!((same.multiple, same.twist.is_identity()), (1, true));

        let bad = ThetaDescriptor::new(3, sym("detF", 0)).unwrap();
        assert!(matches!(
            theta_rescale(&bad, &f),
            Err(ThetaError::NotAMultiple { rank: 3, base: 2 })
        ));
    }

    #[test]
    fn rescale_twist_of_complementary_pair_has_degree_zero() {
        let f = complementary_descriptor(3, 4, 2, 6, "detF").unwrap();
        let f0 = complementary_descriptor(3, 4, 2, 2, "detF0").unwrap();
        assert_eq!(theta_rescale(&f, &f0).unwrap().twist.degree(), 0);
    }

    #[test]
    fn translate_examples() {
        let f = ThetaDescriptor::new(3, sym("detF", 2)).unwrap();
        let m = sym("M", 0);
        let (base, twist) = theta_translate(&f, &m).unwrap();
        assert_eq!(base, f);
        assert_eq!(twist.exponent("M"), 3);

        let (_, trivial) = theta_translate(&f, &FormalLineClass::identity()).unwrap();
        assert!(trivial.is_identity());

        let f2 = ThetaDescriptor::new(2, sym("detF", 2)).unwrap();
        let (_, twist) = theta_translate_power(&f2, &m, 3).unwrap();
        assert_eq!(twist.exponent("M"), 6);

        assert!(matches!(
            theta_translate(&f, &sym("M", 1)),
            Err(ThetaError::NonZeroDegree(1))
        ));
        // a degree-0 class built from nonzero-degree symbols is accepted
        let balanced = sym("A", 2).tensor(&sym("B", 1).pow(-2)).unwrap();
        assert!(theta_translate(&f, &balanced).is_ok());
    }

    #[test]
    fn pullback_examples() {
        let o = ThetaDescriptor::new(1, sym("detF", 0)).unwrap();
        let split = pullback_split(2, 0, 3, &o, &sym("L1", 0)).unwrap();
        assert_eq!(split.left_exponent, 3);
        assert_eq!(split.right.rank(), 2);
        assert_eq!(
            split.to_string(),
            "theta^3 [x] theta{rank=2, det=L1^1.detF^2}"
        );

        // Jacobian setting: n2 = 1, rk F = n1 / gcd(n1, d1)
        let f = ThetaDescriptor::new(3, sym("detF", 1)).unwrap();
        assert_eq!(
            pullback_split(6, 2, 1, &f, &sym("L1", 2))
                .unwrap()
                .left_exponent,
            1
        );

        assert!(matches!(
            pullback_split(3, 1, 1, &o, &sym("L1", 1)),
            Err(ThetaError::NonIntegralExponent {
                numerator: 1,
                denominator: 3
            })
        ));
    }

    #[test]
    fn duality_setting_pullback_exponent_is_level() {
        for h in 1..=4u64 {
            for k in 1..=4u64 {
                for nbar in 1..=3u64 {
                    for dbar in -4..=4i64 {
                        if degree_gcd(nbar, dbar) != 1 {
                            continue;
                        }
                        let o = ThetaDescriptor::new(1, FormalLineClass::identity()).unwrap();
                        let l1 = sym("L1", h as i64 * dbar);
                        let split =
                            pullback_split(h * nbar, h as i64 * dbar, k * nbar, &o, &l1).unwrap();
                        assert_eq!(split.left_exponent, k);
                    }
                }
            }
        }
    }

    #[test]
    fn jacobian_examples() {
        let j = standard_jacobian_pullback(2, 2, 0).unwrap();
        assert_eq!(j.right_exponent, 2);
        assert_eq!(j.constraint.to_string(), "N^2 = L.detF^2");
        assert_eq!(j.degree_check(), (2, 2));
        assert_eq!(
            standard_jacobian_pullback(2, 2, 1).unwrap().right_exponent,
            4
        );

        let wrong = jacobian_pullback(2, 2, 0, &sym("L", 1), &sym("detF", 1));
        assert!(matches!(
            wrong,
            Err(ThetaError::DegreeMismatch {
                expected: 2,
                actual: 3
            })
        ));
    }

    #[test]
    fn jacobian_degree_consistency_grid() {
        for g in 1..=5u32 {
            for n in 1..=6u64 {
                for d in -6..=6i64 {
                    let j = standard_jacobian_pullback(g, n, d).unwrap();
                    let (expected, actual) = j.degree_check();
                    assert_eq!(expected, actual);
                }
            }
        }
    }

    fn class_strategy() -> impl Strategy<Value = FormalLineClass> {
        // fixed degrees per symbol so random classes can always be tensored
        let names = ["A", "B", "L1", "M", "detF"];
        prop::collection::vec((0usize..5, -5i64..=5), 0..6).prop_map(move |parts| {
            parts
                .into_iter()
                .fold(FormalLineClass::identity(), |acc, (i, e)| {
                    let s = FormalLineClass::symbol(names[i], i as i64 - 2).pow(e);
                    acc.tensor(&s).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn line_classes_form_an_abelian_group(
            a in class_strategy(),
            b in class_strategy(),
            c in class_strategy(),
        ) {
            let ab_c = a.tensor(&b).unwrap().tensor(&c).unwrap();
            let a_bc = a.tensor(&b.tensor(&c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            prop_assert_eq!(a.tensor(&b).unwrap(), b.tensor(&a).unwrap());
            prop_assert_eq!(a.tensor(&FormalLineClass::identity()).unwrap(), a.clone());
            prop_assert!(a.tensor(&a.inverse()).unwrap().is_identity());
            prop_assert_eq!(a.tensor(&b).unwrap().degree(), a.degree() + b.degree());
        }

        #[test]
        fn rescale_by_self_is_trivial(rank in 1u64..50, class in class_strategy()) {
            let f = ThetaDescriptor::new(rank, class).unwrap();
            let r = theta_rescale(&f, &f).unwrap();
            prop_assert_eq!(r.multiple, 1);
            prop_assert!(r.twist.is_identity());
        }

        #[test]
        fn complementary_rescale_twist_degree_vanishes(
            g in 1u32..8,
            n in 1u64..12,
            d in -20i64..20,
            k in 1u64..6,
            a in 1u64..6,
        ) {
            let f = complementary_descriptor(g, n, d, a * k, "detF").unwrap();
            let f0 = complementary_descriptor(g, n, d, k, "detF0").unwrap();
            let r = theta_rescale(&f, &f0).unwrap();
            prop_assert_eq!(r.multiple, a);
            prop_assert_eq!(r.twist.degree(), 0);
        }
    }
}
