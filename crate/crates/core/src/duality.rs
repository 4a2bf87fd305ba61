//! Executable checks of the dimension identities around level-rank duality.
//!
//! Every check produces a [`CheckReport`]; mismatches are data, not errors.
//! [`grid_sweep`] runs a check over a box of parameters, skipping (and
//! counting) instances whose dimensions are not computable.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::verlinde::{
    degree_gcd, elliptic_h0, symmetric_power_dim, Engine, VerlindeError, VerlindeQuery,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualityError {
    #[error(transparent)]
    Verlinde(#[from] VerlindeError),
    #[error("partner degree overflows 64 bits for {0}")]
    Overflow(InvolutionTriple),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

/// A triple `(n, d, k)` at genus `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InvolutionTriple {
    #[serde(rename = "g")]
    pub genus: u32,
    #[serde(rename = "n")]
    pub rank: u64,
    #[serde(rename = "d")]
    pub degree: i64,
    #[serde(rename = "k")]
    pub level: u64,
}

impl InvolutionTriple {
    pub fn new(genus: u32, rank: u64, degree: i64, level: u64) -> Result<Self, VerlindeError> {
        VerlindeQuery::new(genus, rank, degree, level)?;
        Ok(Self {
            genus,
            rank,
            degree,
            level,
        })
    }

    pub fn gcd(&self) -> u64 {
        degree_gcd(self.rank, self.degree)
    }

    pub fn reduced_rank(&self) -> u64 {
        self.rank / self.gcd()
    }

    pub fn reduced_degree(&self) -> i64 {
        self.degree / self.gcd() as i64
    }

    pub fn query(&self) -> VerlindeQuery {
        VerlindeQuery::new(self.genus, self.rank, self.degree, self.level)
            .expect("triple invariants match query invariants")
    }
}

impl fmt::Display for InvolutionTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n={}, d={}, k={}, g={})",
            self.rank, self.degree, self.level, self.genus
        )
    }
}

/// `(n, d, k) -> (k n', k (n'(g-1) - d'), h)` with `h = gcd(n, d)`,
/// `n = h n'`, `d = h d'`.
pub fn involution(t: &InvolutionTriple) -> Result<InvolutionTriple, DualityError> {
    let h = t.gcd();
    let nbar = t.reduced_rank();
    let dbar = t.reduced_degree() as i128;
    let level = t.level as i128;
    let rank = t
        .level
        .checked_mul(nbar)
        .ok_or(DualityError::Overflow(*t))?;
    let degree = level * (nbar as i128 * (t.genus as i128 - 1) - dbar);
    let degree = i64::try_from(degree).map_err(|_| DualityError::Overflow(*t))?;
    Ok(InvolutionTriple {
        genus: t.genus,
        rank,
        degree,
        level: h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub input: InvolutionTriple,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of running one check on one or more instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub instances_run: u64,
    pub skipped_unsupported: u64,
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl CheckReport {
    fn new(check: CheckName) -> Self {
        Self {
            check: check.as_str().into(),
            status: Status::Pass,
            instances_run: 0,
            skipped_unsupported: 0,
            failures: Vec::new(),
            label: check.label().map(str::to_owned),
        }
    }

    fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Pass => self.instances_run += 1,
            Outcome::Fail(f) => {
                self.instances_run += 1;
                self.failures.push(f);
            }
            Outcome::Skipped => self.skipped_unsupported += 1,
        }
        self.status = if self.failures.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckName {
    Theorem1,
    Involution,
    BottSzenes,
    Duality,
    Elliptic,
}

impl CheckName {
    pub const ALL: [CheckName; 5] = [
        CheckName::Theorem1,
        CheckName::Involution,
        CheckName::BottSzenes,
        CheckName::Duality,
        CheckName::Elliptic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Theorem1 => "theorem1",
            CheckName::Involution => "involution",
            CheckName::BottSzenes => "bott-szenes",
            CheckName::Duality => "duality",
            CheckName::Elliptic => "elliptic",
        }
    }

    // the dimension equality is provable in the computable range, but the
    // pairing it comes from is conjectural
    fn label(&self) -> Option<&'static str> {
        match self {
            CheckName::Duality => Some("conjectural"),
            _ => None,
        }
    }
}

impl FromStr for CheckName {
    type Err = DualityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| DualityError::UnknownCheck(s.into()))
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

enum Outcome {
    Pass,
    Fail(Failure),
    Skipped,
}

impl Outcome {
    fn compare(input: InvolutionTriple, lhs: &BigUint, rhs: &BigUint) -> Self {
        if lhs == rhs {
            Outcome::Pass
        } else {
            Outcome::Fail(Failure {
                input,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            })
        }
    }

    fn from_result(input: InvolutionTriple, result: Result<Outcome, DualityError>) -> Self {
        match result {
            Ok(o) => o,
            Err(DualityError::Verlinde(VerlindeError::Unsupported { .. })) => Outcome::Skipped,
            Err(e) => Outcome::Fail(Failure {
                input,
                lhs: format!("error: {e}"),
                rhs: String::new(),
            }),
        }
    }
}

fn single(check: CheckName, outcome: Outcome) -> CheckReport {
    let mut report = CheckReport::new(check);
    report.record(outcome);
    report
}

fn theorem1_outcome(engine: &Engine, q: &VerlindeQuery) -> Result<Outcome, DualityError> {
    let g = q.genus();
    let s = engine.sl_dim(q)?.value;
    let v = engine.gl_dim(q)?.value;
    let n = BigUint::from(q.rank());
    let cover = BigUint::from(q.level()) * &n * &n / BigUint::from(q.gcd());
    let lhs = s * cover.pow(g);
    let rhs = v * n.pow(2 * g);
    let input = InvolutionTriple::new(g, q.rank(), q.degree(), q.level())?;
    Ok(Outcome::compare(input, &lhs, &rhs))
}

/// Both sides of the covering count for `SM x J -> M`:
/// `s * (k n^2 / h)^g` against `v * n^(2g)`.
pub fn theorem1_ledger(engine: &Engine, q: &VerlindeQuery) -> Result<CheckReport, VerlindeError> {
    match theorem1_outcome(engine, q) {
        Ok(o) => Ok(single(CheckName::Theorem1, o)),
        Err(DualityError::Verlinde(e)) => Err(e),
        Err(e) => unreachable!("theorem1 ledger cannot fail with {e}"),
    }
}

fn duality_outcome(engine: &Engine, t: &InvolutionTriple) -> Result<Outcome, DualityError> {
    let partner = involution(t)?;
    let s = engine.sl_dim(&t.query())?.value;
    let v = engine.gl_dim(&partner.query())?.value;
    Ok(Outcome::compare(*t, &s, &v))
}

/// `s(n1, d1, k) = v(n2, d2, h)` for the partner `(n2, d2, h)` of
/// `(n1, d1, k)`.
pub fn duality_dim_check(
    engine: &Engine,
    t: &InvolutionTriple,
) -> Result<CheckReport, DualityError> {
    Ok(single(CheckName::Duality, duality_outcome(engine, t)?))
}

fn bott_szenes_outcome(
    engine: &Engine,
    rank: u64,
    level: u64,
    genus: u32,
) -> Result<Outcome, DualityError> {
    let s_nk = engine.beauville_sum(genus, rank, level)?.value;
    let s_kn = engine.beauville_sum(genus, level, rank)?.value;
    let lhs = s_nk * BigUint::from(level).pow(genus);
    let rhs = s_kn * BigUint::from(rank).pow(genus);
    let input = InvolutionTriple::new(genus, rank, 0, level)?;
    Ok(Outcome::compare(input, &lhs, &rhs))
}

/// `s(n,0,k) k^g = s(k,0,n) n^g`, i.e. `s(n,0,k) = v(k,0,n)`.
pub fn bott_szenes_check(
    engine: &Engine,
    rank: u64,
    level: u64,
    genus: u32,
) -> Result<CheckReport, VerlindeError> {
    match bott_szenes_outcome(engine, rank, level, genus) {
        Ok(o) => Ok(single(CheckName::BottSzenes, o)),
        Err(DualityError::Verlinde(e)) => Err(e),
        Err(e) => unreachable!("bott-szenes check cannot fail with {e}"),
    }
}

fn elliptic_outcome(engine: &Engine, t: &InvolutionTriple) -> Result<Outcome, DualityError> {
    debug_assert_eq!(t.genus, 1);
    let partner = involution(t)?;
    let expected = symmetric_power_dim(elliptic_h0(t.gcd() as i64)?, t.level);
    let s = engine.sl_dim(&t.query())?.value;
    let v = engine.gl_dim(&partner.query())?.value;
    if s != expected {
        return Ok(Outcome::compare(*t, &s, &expected));
    }
    Ok(Outcome::compare(*t, &s, &v))
}

/// Genus one: `s(h n', h d', k)` and `v(k n', -k d', h)` both equal
/// `dim S^k H^0(C', O(h q)) = C(h+k-1, k)`.
pub fn elliptic_check(engine: &Engine, t: &InvolutionTriple) -> Result<CheckReport, DualityError> {
    if t.genus != 1 {
        return Err(VerlindeError::InvalidQuery("elliptic check needs genus 1".into()).into());
    }
    Ok(single(CheckName::Elliptic, elliptic_outcome(engine, t)?))
}

fn involution_outcome(t: &InvolutionTriple) -> Result<Outcome, DualityError> {
    let partner = involution(t)?;
    let back = involution(&partner)?;
    let nbar = t.reduced_rank();
    let flipped = nbar as i64 * (t.genus as i64 - 1) - t.reduced_degree();
    let structural = partner.gcd() == t.level
        && partner.reduced_rank() == nbar
        && partner.reduced_degree() == flipped;
    if back == *t && structural {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail(Failure {
            input: *t,
            lhs: back.to_string(),
            rhs: partner.to_string(),
        }))
    }
}

/// Runs the involution twice and checks that `t` comes back, along with the
/// structure of the partner (`gcd(n2, d2) = k`, same `n'`, flipped `d'`).
pub fn involution_check(t: &InvolutionTriple) -> Result<CheckReport, DualityError> {
    Ok(single(CheckName::Involution, involution_outcome(t)?))
}

/// The deck group `T_n` of `SM x J -> M` and its character group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeckGroupInfo {
    pub rank: u64,
    pub genus: u32,
    pub order: BigUint,
    pub character_count: BigUint,
}

/// `T_n` is `(Z/n)^(2g)`: `g` factors of order `n^2`.
pub fn deck_group(rank: u64, genus: u32) -> DeckGroupInfo {
    let per_factor = BigUint::from(rank) * BigUint::from(rank);
    let order = (0..genus).fold(BigUint::one(), |acc, _| acc * &per_factor);
    DeckGroupInfo {
        rank,
        genus,
        character_count: order.clone(),
        order,
    }
}

/// A finite box of parameters. Ranks and levels start at 1, so a zero
/// maximum (or `genus_min > genus_max`) is an empty grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBounds {
    pub max_rank: u64,
    pub max_level: u64,
    pub genus_min: u32,
    pub genus_max: u32,
    pub max_abs_degree: i64,
}

impl GridBounds {
    /// Tuples in lexicographic `(g, n, d, k)` order.
    pub fn triples(&self) -> Vec<InvolutionTriple> {
        let mut out = Vec::new();
        for genus in self.genus_min.max(1)..=self.genus_max {
            for rank in 1..=self.max_rank {
                for degree in -self.max_abs_degree..=self.max_abs_degree {
                    for level in 1..=self.max_level {
                        out.push(InvolutionTriple {
                            genus,
                            rank,
                            degree,
                            level,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Runs `check` over every tuple in `bounds` (in parallel; the report does
/// not depend on scheduling).
///
/// `bott-szenes` ignores the degree bound and uses `d = 0`; `elliptic` only
/// visits genus one.
pub fn grid_sweep(engine: &Engine, check: CheckName, bounds: &GridBounds) -> CheckReport {
    let mut instances = bounds.triples();
    match check {
        CheckName::BottSzenes => instances.retain(|t| t.degree == 0),
        CheckName::Elliptic => instances.retain(|t| t.genus == 1),
        _ => {}
    }
    let outcomes: Vec<Outcome> = instances
        .par_iter()
        .map(|t| {
            let result = match check {
                CheckName::Theorem1 => theorem1_outcome(engine, &t.query()),
                CheckName::Involution => involution_outcome(t),
                CheckName::BottSzenes => bott_szenes_outcome(engine, t.rank, t.level, t.genus),
                CheckName::Duality => duality_outcome(engine, t),
                CheckName::Elliptic => elliptic_outcome(engine, t),
            };
            Outcome::from_result(*t, result)
        })
        .collect();
    let mut report = CheckReport::new(check);
    for outcome in outcomes {
        report.record(outcome);
    }
    report.failures.sort_by_key(|f| f.input);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(n: u64, d: i64, k: u64, g: u32) -> InvolutionTriple {
        InvolutionTriple::new(g, n, d, k).unwrap()
    }

    fn q(g: u32, n: u64, d: i64, k: u64) -> VerlindeQuery {
        VerlindeQuery::new(g, n, d, k).unwrap()
    }

    #[test]
    fn involution_examples() {
        assert_eq!(involution(&t(2, 0, 3, 2)).unwrap(), t(3, 3, 2, 2));
        assert_eq!(involution(&t(3, 1, 2, 2)).unwrap(), t(6, 4, 1, 2));
        let x = t(4, -6, 5, 3);
        assert_eq!(involution(&involution(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn ledger_examples() {
        let engine = Engine::default();
        for query in [q(2, 2, 0, 1), q(2, 2, 0, 3), q(4, 1, 7, 3), q(1, 6, 4, 2)] {
            assert!(theorem1_ledger(&engine, &query).unwrap().passed());
        }
        assert!(matches!(
            theorem1_ledger(&engine, &q(2, 3, 1, 1)),
            Err(VerlindeError::Unsupported { .. })
        ));
    }

    #[test]
    fn duality_examples() {
        let engine = Engine::default();
        let r = duality_dim_check(&engine, &t(2, 0, 1, 2)).unwrap();
        assert!(r.passed());
        assert_eq!(r.label.as_deref(), Some("conjectural"));
        assert!(duality_dim_check(&engine, &t(1, 0, 1, 4)).unwrap().passed());
        assert!(duality_dim_check(&engine, &t(2, 0, 3, 2)).unwrap().passed());
        assert!(duality_dim_check(&engine, &t(3, 1, 2, 2)).is_err());
    }

    #[test]
    fn bott_szenes_examples() {
        let engine = Engine::default();
        assert!(bott_szenes_check(&engine, 2, 1, 2).unwrap().passed());
        assert!(bott_szenes_check(&engine, 4, 4, 3).unwrap().passed());
        assert!(bott_szenes_check(&engine, 2, 3, 2).unwrap().passed());
    }

    #[test]
    fn elliptic_examples() {
        let engine = Engine::default();
        for x in [t(4, 2, 3, 1), t(6, -4, 2, 1), t(3, 0, 3, 1), t(5, 3, 4, 1)] {
            assert!(elliptic_check(&engine, &x).unwrap().passed(), "{x}");
        }
        assert!(elliptic_check(&engine, &t(2, 0, 1, 2)).is_err());
    }

    #[test]
    fn deck_group_examples() {
        assert_eq!(deck_group(2, 2).order, BigUint::from(16u32));
        assert_eq!(deck_group(1, 7).order, BigUint::one());
        assert_eq!(deck_group(3, 1).character_count, BigUint::from(9u32));
        for n in 1..6u64 {
            for g in 1..6u32 {
                let info = deck_group(n, g);
                assert_eq!(info.order, BigUint::from(n).pow(2 * g));
                assert_eq!(info.order, info.character_count);
            }
        }
    }

    #[test]
    fn sweeps() {
        let engine = Engine::default();
        let bounds = GridBounds {
            max_rank: 4,
            max_level: 4,
            genus_min: 1,
            genus_max: 3,
            max_abs_degree: 4,
        };
        let r = grid_sweep(&engine, CheckName::Involution, &bounds);
        assert!(r.passed());
        assert_eq!(r.instances_run, 3 * 4 * 9 * 4);

        let bs = GridBounds {
            max_rank: 3,
            max_level: 3,
            genus_min: 2,
            genus_max: 2,
            max_abs_degree: 0,
        };
        let r = grid_sweep(&engine, CheckName::BottSzenes, &bs);
        assert!(r.passed());
        assert_eq!(r.instances_run, 9);

        let empty = GridBounds {
            max_rank: 0,
            ..bounds
        };
        let r = grid_sweep(&engine, CheckName::Theorem1, &empty);
        assert_eq!((r.instances_run, r.passed()), (0, true));
        let reversed = GridBounds {
            genus_min: 3,
            genus_max: 2,
            ..bounds
        };
        assert_eq!(
            grid_sweep(&engine, CheckName::Duality, &reversed).instances_run,
            0
        );
    }

    #[test]
    fn unsupported_instances_are_counted_not_failed() {
        let engine = Engine::default();
        let bounds = GridBounds {
            max_rank: 3,
            max_level: 2,
            genus_min: 2,
            genus_max: 2,
            max_abs_degree: 2,
        };
        let r = grid_sweep(&engine, CheckName::Theorem1, &bounds);
        assert!(r.passed());
        assert!(r.skipped_unsupported > 0);
        assert_eq!(r.instances_run + r.skipped_unsupported, 3 * 5 * 2);
    }

    #[test]
    fn check_names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
        }
        assert!("nope".parse::<CheckName>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn involution_is_an_involution(
            n in 1u64..=1_000_000,
            d in -1_000_000i64..=1_000_000,
            k in 1u64..=1000,
            g in 1u32..=50,
        ) {
            let x = t(n, d, k, g);
            let partner = involution(&x).unwrap();
            prop_assert_eq!(partner.gcd(), k);
            prop_assert_eq!(involution(&partner).unwrap(), x);
        }
    }
}
