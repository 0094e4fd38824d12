//! Piatetski-Shapiro sequences: membership, prime counts, main terms and the
//! admissible region for the iterated sequence.
//!
//! Membership is decided by locating an integer in a power interval:
//! `m = floor(n^c)` for some `n` iff `[m^γ, (m+1)^γ)` contains an integer,
//! with `γ = 1/c`. Both ends are compared exactly through
//! [`crate::certified_real`], so no enumeration of the sequence is needed.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::certified_real::{self, CertifiedError, RationalExponent};
use crate::sieve::{self, SieveConfig, SieveError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PsError {
    #[error(transparent)]
    Certified(#[from] CertifiedError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error("sigma = {0} is not below 1")]
    SigmaOutOfRange(String),
    #[error("invalid family: {0}")]
    InvalidSpec(String),
    #[error("out of domain: {0}")]
    Domain(String),
}

fn ratio(e: &RationalExponent) -> BigRational {
    e.to_rational()
}

/// Exponents `c_1..c_d` of an intersection problem, each in `(1, 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsFamilySpec {
    c: Vec<RationalExponent>,
}

impl PsFamilySpec {
    pub fn new(c: Vec<RationalExponent>) -> Result<Self, PsError> {
        if c.is_empty() {
            return Err(PsError::InvalidSpec("at least one exponent is required".into()));
        }
        for e in &c {
            if e.is_integer() || e.numerator() <= e.denominator() || e.numerator() >= 2 * e.denominator() {
                return Err(PsError::InvalidSpec(format!("exponent {e} is not in (1, 2)")));
            }
        }
        Ok(Self { c })
    }

    pub fn exponents(&self) -> &[RationalExponent] {
        &self.c
    }

    pub fn dimension(&self) -> usize {
        self.c.len()
    }

    pub fn gammas(&self) -> Vec<BigRational> {
        self.c.iter().map(|e| ratio(&e.recip())).collect()
    }

    pub fn deltas(&self) -> Vec<BigRational> {
        self.gammas().into_iter().map(|g| BigRational::one() - g).collect()
    }

    pub fn sigma(&self) -> BigRational {
        self.deltas().into_iter().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn gamma_product(&self) -> BigRational {
        self.gammas().into_iter().fold(BigRational::one(), |a, b| a * b)
    }
}

/// Exponents of the iterated sequence `floor(floor(h^c1)^c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IteratedSpec {
    pub c1: RationalExponent,
    pub c2: RationalExponent,
}

impl IteratedSpec {
    pub fn new(c1: RationalExponent, c2: RationalExponent) -> Result<Self, PsError> {
        PsFamilySpec::new(vec![c1, c2])?;
        Ok(Self { c1, c2 })
    }

    pub fn gamma1(&self) -> BigRational {
        ratio(&self.c1.recip())
    }

    pub fn gamma2(&self) -> BigRational {
        ratio(&self.c2.recip())
    }
}

/// `floor(n^c)`.
pub fn ps_value(n: u64, c: RationalExponent) -> Result<u64, PsError> {
    if n == 0 {
        return Err(PsError::Domain("n must be positive".into()));
    }
    Ok(certified_real::floor_pow(n, c)?)
}

/// `true` iff `m = floor(n^c)` for some integer `n >= 1`.
pub fn is_member(m: u64, c: RationalExponent) -> Result<bool, PsError> {
    if m == 0 {
        return Err(PsError::Domain("m must be positive".into()));
    }
    let range = certified_real::integers_in_power_interval(m, m + 1, c.recip())?;
    Ok(!range.is_empty())
}

/// `true` iff `m = floor(floor(h^c1)^c2)` for some `h >= 1`.
///
/// First `k` is located in `[m^γ2, (m+1)^γ2)` (at most one integer since
/// `γ2 < 1`), then `h` in `[k^γ1, (k+1)^γ1)`.
pub fn iterated_member(m: u64, spec: &IteratedSpec) -> Result<bool, PsError> {
    if m == 0 {
        return Err(PsError::Domain("m must be positive".into()));
    }
    let Some(k) = certified_real::integer_in_interval(m, m + 1, spec.c2.recip(), true)? else {
        return Ok(false);
    };
    Ok(!certified_real::integers_in_power_interval(k, k + 1, spec.c1.recip())?.is_empty())
}

/// Number of primes `p <= x` lying in every sequence of the family.
pub fn intersection_prime_count(x: u64, spec: &PsFamilySpec, cfg: &SieveConfig) -> Result<u64, PsError> {
    if x < 2 {
        return Err(PsError::Domain(format!("x = {x} < 2")));
    }
    let counts = sieve::par_segments(2, x, cfg, |seg| -> Result<u64, PsError> {
        let mut count = 0;
        for p in seg.iter_primes() {
            let mut all = true;
            for &c in spec.exponents() {
                if !is_member(p, c)? {
                    all = false;
                    break;
                }
            }
            count += all as u64;
        }
        Ok(count)
    })?;
    counts.into_iter().sum()
}

/// Number of primes `p <= x` in the iterated sequence.
pub fn iterated_prime_count(x: u64, spec: &IteratedSpec, cfg: &SieveConfig) -> Result<u64, PsError> {
    if x < 2 {
        return Err(PsError::Domain(format!("x = {x} < 2")));
    }
    let counts = sieve::par_segments(2, x, cfg, |seg| -> Result<u64, PsError> {
        let mut count = 0;
        for p in seg.iter_primes() {
            count += iterated_member(p, spec)? as u64;
        }
        Ok(count)
    })?;
    counts.into_iter().sum()
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// `γ_1⋯γ_d / (1 − σ) · x^(1−σ) / log x`.
pub fn intersection_main_term(x: f64, spec: &PsFamilySpec) -> Result<f64, PsError> {
    let sigma = spec.sigma();
    if sigma >= BigRational::one() {
        return Err(PsError::SigmaOutOfRange(sigma.to_string()));
    }
    let one_minus = BigRational::one() - sigma;
    let lead = to_f64(&(spec.gamma_product() / &one_minus));
    Ok(lead * (to_f64(&one_minus) * x.ln()).exp() / x.ln())
}

/// Single-sequence main term `x^(1/c) / (c log x)`.
pub fn single_main_term(x: f64, c: RationalExponent) -> f64 {
    let gamma = c.recip().to_f64();
    (gamma * x.ln()).exp() / (c.to_f64() * x.ln())
}

/// `x^(γ1 γ2) / (c1 c2 log x)`.
pub fn iterated_main_term(x: f64, spec: &IteratedSpec) -> Result<f64, PsError> {
    if x < 3.0 {
        return Err(PsError::Domain(format!("x = {x} < 3")));
    }
    let g = to_f64(&(spec.gamma1() * spec.gamma2()));
    let cc = spec.c1.to_f64() * spec.c2.to_f64();
    Ok((g * x.ln()).exp() / (cc * x.ln()))
}

/// Threshold `σ_d` below which the intersection asymptotic holds.
pub fn sigma_threshold(d: usize) -> Result<Ratio<u64>, PsError> {
    match d {
        0 | 1 => Err(PsError::Domain(format!("d = {d} < 2"))),
        2..=10 => Ok(Ratio::new(290, 3297)),
        _ => Ok(Ratio::new(1, d as u64 + 1)),
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `26 γ1 γ2 − 2 γ2 − 23`.
pub fn binding_expression(g1: &BigRational, g2: &BigRational) -> BigRational {
    int(26) * g1 * g2 - int(2) * g2 - int(23)
}

/// `true` iff `26 γ1 γ2 − 2 γ2 − 23 > 0`, exactly.
pub fn admissible_region_check(spec: &IteratedSpec) -> bool {
    admissible_gammas(&spec.gamma1(), &spec.gamma2())
}

pub fn admissible_gammas(g1: &BigRational, g2: &BigRational) -> bool {
    binding_expression(g1, g2).is_positive()
}

/// The seven expressions that must all be positive for the iterated-prime
/// asymptotic, in a fixed order; index [`BINDING_INDEX`] is the binding one.
pub fn condition_expressions(g1: &BigRational, g2: &BigRational) -> [BigRational; 7] {
    let p = g1 * g2;
    [
        int(9) * &p - int(3) * g2 - int(5),
        int(6) * &p - int(5),
        int(14) * &p - int(2) * g2 - int(11),
        int(4) * &p + g2 - int(4),
        int(15) * &p - int(3) * g2 - int(11),
        int(26) * &p - int(2) * g2 - int(23),
        int(15) * &p - int(14),
    ]
}

pub const BINDING_INDEX: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub values: [BigRational; 7],
    pub holds: [bool; 7],
    /// The binding expression is `<=` every other one.
    pub binding_is_minimal: bool,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

pub fn condition_system_check(g1: &BigRational, g2: &BigRational) -> ConditionReport {
    let values = condition_expressions(g1, g2);
    let holds = std::array::from_fn(|i| values[i].is_positive());
    let binding = &values[BINDING_INDEX];
    let binding_is_minimal = values.iter().all(|v| binding <= v);
    ConditionReport {
        values,
        holds,
        binding_is_minimal,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPoint {
    pub c1: Ratio<u64>,
    pub c2: Ratio<u64>,
    pub admissible: bool,
}

/// `resolution × resolution` grid over `c1, c2 ∈ (1, 2)` at
/// `c = 1 + i/(resolution+1)`, `i = 1..=resolution`, rows ordered by `c1`
/// then `c2`.
pub fn region_grid(resolution: u64) -> Result<Vec<RegionPoint>, PsError> {
    if resolution < 2 {
        return Err(PsError::Domain(format!("resolution = {resolution} < 2")));
    }
    let den = resolution + 1;
    let gamma = |i: u64| BigRational::new(BigInt::from(den), BigInt::from(den + i));
    let mut out = Vec::with_capacity((resolution * resolution) as usize);
    for i in 1..=resolution {
        for j in 1..=resolution {
            out.push(RegionPoint {
                c1: Ratio::new(den + i, den),
                c2: Ratio::new(den + j, den),
                admissible: admissible_gammas(&gamma(i), &gamma(j)),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: u32, q: u32) -> RationalExponent {
        RationalExponent::new(p, q).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    /// Sequence members up to `limit` by direct enumeration with u128 powers.
    fn enumerate(c: RationalExponent, limit: u64) -> std::collections::BTreeSet<u64> {
        let (p, qq) = (c.numerator(), c.denominator());
        let mut out = std::collections::BTreeSet::new();
        for n in 1u64.. {
            // floor(n^(p/q)) by linear search from the float estimate
            let mut k = ((n as f64).powf(p as f64 / qq as f64)) as u64;
            let np = (n as u128).pow(p);
            while k > 0 && (k as u128).pow(qq) > np {
                k -= 1;
            }
            while ((k + 1) as u128).pow(qq) <= np {
                k += 1;
            }
            if k > limit {
                break;
            }
            out.insert(k);
        }
        out
    }

    #[test]
    fn values_and_membership_examples() {
        let c = e(3, 2);
        assert_eq!(ps_value(1, c).unwrap(), 1);
        assert_eq!(ps_value(3, c).unwrap(), 5);
        assert_eq!(ps_value(6, c).unwrap(), 14);
        assert!(is_member(5, c).unwrap());
        assert!(!is_member(3, c).unwrap());
        assert!(is_member(1, c).unwrap());
    }

    #[test]
    fn membership_matches_enumeration() {
        for c in [e(3, 2), e(4, 3), e(7, 5)] {
            let set = enumerate(c, 20_000);
            for m in 1..=20_000 {
                assert_eq!(is_member(m, c).unwrap(), set.contains(&m), "c = {c}, m = {m}");
            }
        }
    }

    #[test]
    fn iterated_examples() {
        let s = IteratedSpec::new(e(3, 2), e(3, 2)).unwrap();
        assert!(iterated_member(2, &s).unwrap());
        assert!(iterated_member(11, &s).unwrap());
        assert!(!iterated_member(3, &s).unwrap());
    }

    #[test]
    fn counts_examples() {
        let cfg = SieveConfig::default();
        let one = PsFamilySpec::new(vec![e(3, 2)]).unwrap();
        assert_eq!(intersection_prime_count(10, &one, &cfg).unwrap(), 2);
        let two = PsFamilySpec::new(vec![e(3, 2), e(4, 3)]).unwrap();
        assert_eq!(intersection_prime_count(2, &two, &cfg).unwrap(), 1);
        let it = IteratedSpec::new(e(3, 2), e(3, 2)).unwrap();
        assert_eq!(iterated_prime_count(2, &it, &cfg).unwrap(), 1);
        assert_eq!(iterated_prime_count(11, &it, &cfg).unwrap(), 2);
    }

    #[test]
    fn main_terms_by_substitution() {
        let x: f64 = 100.0;
        let s = PsFamilySpec::new(vec![e(3, 2)]).unwrap();
        let want = x.powf(2.0 / 3.0) / x.ln();
        assert!((intersection_main_term(x, &s).unwrap() - want).abs() < 1e-12 * want);

        let x: f64 = 1e6;
        let s = PsFamilySpec::new(vec![e(21, 20)]).unwrap();
        let want = x.powf(20.0 / 21.0) / x.ln();
        assert!((intersection_main_term(x, &s).unwrap() - want).abs() < 1e-12 * want);

        let x: f64 = 1e7;
        let s = PsFamilySpec::new(vec![e(21, 20), e(26, 25)]).unwrap();
        let sigma = 1.0 / 21.0 + 1.0 / 26.0;
        let want = (20.0 / 21.0) * (25.0 / 26.0) / (1.0 - sigma) * x.powf(1.0 - sigma) / x.ln();
        assert!((intersection_main_term(x, &s).unwrap() - want).abs() < 1e-12 * want);

        let it = IteratedSpec::new(e(3, 2), e(4, 3)).unwrap();
        for x in [10.0f64, 1e4, 1e7] {
            let want = x.powf(0.5) / (2.0 * x.ln());
            assert!((iterated_main_term(x, &it).unwrap() - want).abs() < 1e-12 * want);
        }
        assert!(iterated_main_term(2.0, &it).is_err());
    }

    #[test]
    fn sigma_out_of_range() {
        let s = PsFamilySpec::new(vec![e(3, 2), e(3, 2), e(3, 2)]).unwrap();
        assert!(matches!(intersection_main_term(100.0, &s), Err(PsError::SigmaOutOfRange(_))));
    }

    #[test]
    fn thresholds() {
        assert_eq!(sigma_threshold(2).unwrap(), Ratio::new(290, 3297));
        assert_eq!(sigma_threshold(10).unwrap(), Ratio::new(290, 3297));
        assert_eq!(sigma_threshold(11).unwrap(), Ratio::new(1, 12));
        assert!(sigma_threshold(1).is_err());
        // 290/3297 < 1/11 and ≈ 1/11.36
        assert!(sigma_threshold(2).unwrap() < Ratio::new(1, 11));
        let inv = 3297.0 / 290.0;
        assert!((inv - 11.36).abs() < 0.01);
    }

    #[test]
    fn admissible_region_examples() {
        assert!(admissible_gammas(&q(1, 1), &q(1, 1)));
        assert!(!admissible_gammas(&q(95, 100), &q(95, 100)));
        assert!(admissible_gammas(&q(99, 100), &q(99, 100)));
        assert_eq!(binding_expression(&q(99, 100), &q(99, 100)), q(5026, 10000));
        assert_eq!(binding_expression(&q(95, 100), &q(95, 100)), q(-1435, 1000));
    }

    #[test]
    fn condition_system_examples() {
        let r = condition_system_check(&q(99, 100), &q(99, 100));
        assert!(r.all_hold() && r.binding_is_minimal);
        let r = condition_system_check(&q(9, 10), &q(9, 10));
        assert_eq!(r.values[BINDING_INDEX], q(-374, 100));
        assert!(!r.holds[BINDING_INDEX]);
        let r = condition_system_check(&q(1, 1), &q(1, 1));
        assert_eq!(r.values[BINDING_INDEX], q(1, 1));
        assert!(r.binding_is_minimal);
    }

    #[test]
    fn region_grid_samples() {
        let g = region_grid(3).unwrap();
        assert_eq!(g.len(), 9);
        let mid = g.iter().find(|p| p.c1 == Ratio::new(3, 2) && p.c2 == Ratio::new(3, 2)).unwrap();
        assert!(!mid.admissible);
        // close to the unit corner the inequality holds
        let fine = region_grid(200).unwrap();
        assert!(fine[0].admissible);
        assert!(region_grid(1).is_err());
    }
}
