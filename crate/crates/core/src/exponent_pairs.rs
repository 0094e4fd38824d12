//! Exponent pairs, the bilinear sum bound and a balancing helper.
//!
//! Pairs are exact rationals. The A and B processes are the classical van der
//! Corput maps
//!
//! ```text
//! A(κ, λ) = (κ / (2κ + 2), (κ + λ + 1) / (2κ + 2))
//! B(κ, λ) = (λ − 1/2, κ + 1/2)
//! ```
//!
//! and every pair reachable from `(0, 1)` satisfies `0 <= κ <= 1/2 <= λ <= 1`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairError {
    #[error("({0}, {1}) violates 0 <= κ <= 1/2 <= λ <= 1")]
    InvalidPair(String, String),
    #[error("depth {0} exceeds the cap {MAX_DEPTH}")]
    DepthTooLarge(usize),
    #[error("derivative order s = {0} must be at least 2")]
    InvalidOrder(u32),
}

pub const MAX_DEPTH: usize = 12;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentPair {
    kappa: BigRational,
    lambda: BigRational,
    /// Derivation from `(0, 1)`, outermost process first. Empty for the
    /// trivial pair and for named constants.
    word: String,
    named: bool,
}

impl ExponentPair {
    pub fn new(kappa: BigRational, lambda: BigRational) -> Result<Self, PairError> {
        let half = q(1, 2);
        if kappa.is_negative() || kappa > half || lambda < half || lambda > BigRational::one() {
            return Err(PairError::InvalidPair(kappa.to_string(), lambda.to_string()));
        }
        Ok(Self {
            kappa,
            lambda,
            word: String::new(),
            named: false,
        })
    }

    pub fn from_ratio(kn: i64, kd: i64, ln: i64, ld: i64) -> Result<Self, PairError> {
        Self::new(q(kn, kd), q(ln, ld))
    }

    /// `(0, 1)`.
    pub fn trivial() -> Self {
        Self::new(BigRational::zero(), BigRational::one()).unwrap()
    }

    fn named(kn: i64, kd: i64, ln: i64, ld: i64) -> Self {
        let mut p = Self::from_ratio(kn, kd, ln, ld).unwrap();
        p.named = true;
        p
    }

    /// `(13/84, 55/84)`.
    pub fn bourgain() -> Self {
        Self::named(13, 84, 55, 84)
    }

    /// `(11/28, 11/21)`.
    pub fn eleven_twentyeighths() -> Self {
        Self::named(11, 28, 11, 21)
    }

    pub fn kappa(&self) -> &BigRational {
        &self.kappa
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn kappa_f64(&self) -> f64 {
        self.kappa.to_f64().unwrap()
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().unwrap()
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn is_named(&self) -> bool {
        self.named
    }

    pub fn is_valid(&self) -> bool {
        let half = q(1, 2);
        !self.kappa.is_negative() && self.kappa <= half && half <= self.lambda && self.lambda <= BigRational::one()
    }

    pub fn same_pair(&self, other: &ExponentPair) -> bool {
        self.kappa == other.kappa && self.lambda == other.lambda
    }

    pub fn a_process(&self) -> ExponentPair {
        let den = BigRational::from_integer(2.into()) * &self.kappa + BigRational::from_integer(2.into());
        ExponentPair {
            kappa: &self.kappa / &den,
            lambda: (&self.kappa + &self.lambda + BigRational::one()) / &den,
            word: format!("A{}", self.word),
            named: false,
        }
    }

    pub fn b_process(&self) -> Result<ExponentPair, PairError> {
        let half = q(1, 2);
        let out = ExponentPair {
            kappa: &self.lambda - &half,
            lambda: &self.kappa + &half,
            word: format!("B{}", self.word),
            named: false,
        };
        if !out.is_valid() {
            return Err(PairError::InvalidPair(out.kappa.to_string(), out.lambda.to_string()));
        }
        Ok(out)
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.kappa, self.lambda)?;
        if !self.word.is_empty() {
            write!(f, " [{}]", self.word)?;
        }
        Ok(())
    }
}

/// Distinct pairs reachable from `(0, 1)` by words of length `<= max_depth`,
/// followed by the named constants not already present. Each pair keeps its
/// shortest, then lexicographically smallest, word.
pub fn enumerate_pairs(max_depth: usize) -> Result<Vec<ExponentPair>, PairError> {
    if max_depth > MAX_DEPTH {
        return Err(PairError::DepthTooLarge(max_depth));
    }
    let mut seen: HashSet<(BigRational, BigRational)> = HashSet::new();
    let mut out = Vec::new();
    let mut level = vec![ExponentPair::trivial()];
    for depth in 0..=max_depth {
        level.sort_by(|a, b| a.word.cmp(&b.word));
        let mut next = Vec::new();
        for p in level {
            if depth < max_depth {
                next.push(p.a_process());
                if let Ok(b) = p.b_process() {
                    next.push(b);
                }
            }
            if seen.insert((p.kappa.clone(), p.lambda.clone())) {
                out.push(p);
            }
        }
        level = next;
    }
    for p in [ExponentPair::bourgain(), ExponentPair::eleven_twentyeighths()] {
        if seen.insert((p.kappa.clone(), p.lambda.clone())) {
            out.push(p);
        }
    }
    Ok(out)
}

/// The four terms of the bilinear bound; the total is `X^(3ε)` times their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub terms: [f64; 4],
    pub total: f64,
}

/// `X^(3ε) [M^(1/2) X^(1/2) + Δ^(-1/2) X + M^((λ−κ−1)/(2κ+2)) X
///  + Δ^(κ/(2κ+2)) M^((λ−1)/(2κ+2)) X^((2+κ)/(2κ+2))]`.
pub fn bilinear_bound_terms(m: f64, x: f64, delta: f64, pair: &ExponentPair, eps: f64) -> BoundTerms {
    let k = pair.kappa_f64();
    let l = pair.lambda_f64();
    let den = 2.0 * k + 2.0;
    let terms = [
        m.sqrt() * x.sqrt(),
        x / delta.sqrt(),
        m.powf((l - k - 1.0) / den) * x,
        delta.powf(k / den) * m.powf((l - 1.0) / den) * x.powf((2.0 + k) / den),
    ];
    let total = x.powf(3.0 * eps) * terms.iter().sum::<f64>();
    BoundTerms { terms, total }
}

pub fn bilinear_bound(m: f64, x: f64, delta: f64, pair: &ExponentPair, eps: f64) -> f64 {
    bilinear_bound_terms(m, x, delta, pair, eps).total
}

/// `|Σ_j γ_j (γ_j − 1) ⋯ (γ_j − s + 1) E_j|` over `(E_j, γ_j)`.
pub fn delta_coefficient(terms: &[(f64, f64)], s: u32) -> Result<f64, PairError> {
    if s < 2 {
        return Err(PairError::InvalidOrder(s));
    }
    let sum: f64 = terms
        .iter()
        .map(|&(e, g)| e * (0..s).map(|i| g - i as f64).product::<f64>())
        .sum();
    Ok(sum.abs())
}

/// Exact version of [`delta_coefficient`].
pub fn delta_coefficient_exact(terms: &[(BigRational, BigRational)], s: u32) -> Result<BigRational, PairError> {
    if s < 2 {
        return Err(PairError::InvalidOrder(s));
    }
    let sum = terms.iter().fold(BigRational::zero(), |acc, (e, g)| {
        let falling = (0..s).fold(BigRational::one(), |p, i| p * (g - BigRational::from_integer(i.into())));
        acc + e * falling
    });
    Ok(sum.abs())
}

/// Pair minimizing [`bilinear_bound`] over `enumerate_pairs(depth)`; ties go
/// to the shorter word, then the lexicographically smaller one.
pub fn optimize_pair(m: f64, x: f64, delta: f64, eps: f64, depth: usize) -> Result<(ExponentPair, f64), PairError> {
    let pairs = enumerate_pairs(depth)?;
    let scored: Vec<(usize, f64)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, p)| (i, bilinear_bound(m, x, delta, p, eps)))
        .collect();
    let best = scored
        .into_iter()
        .min_by(|(i, a), (j, b)| {
            a.total_cmp(b)
                .then(pairs[*i].word.len().cmp(&pairs[*j].word.len()))
                .then(pairs[*i].word.cmp(&pairs[*j].word))
                .then(i.cmp(j))
        })
        .expect("pair set is never empty");
    Ok((pairs[best.0].clone(), best.1))
}

/// `L(E) = Σ A_i E^(a_i) + Σ B_j E^(−b_j)` restricted to `E ∈ (E1, E2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceTerms {
    pub rising: Vec<(f64, f64)>,
    pub falling: Vec<(f64, f64)>,
    pub e1: f64,
    pub e2: f64,
}

impl BalanceTerms {
    pub fn new(rising: Vec<(f64, f64)>, falling: Vec<(f64, f64)>, e1: f64, e2: f64) -> Result<Self, PairError> {
        let positive = rising.iter().chain(&falling).all(|&(c, a)| c > 0.0 && a > 0.0);
        if !positive || !(e1 >= 0.0) || !(e1 <= e2) {
            return Err(PairError::InvalidPair("balance terms".into(), format!("E1 = {e1}, E2 = {e2}")));
        }
        Ok(Self { rising, falling, e1, e2 })
    }

    pub fn eval(&self, e: f64) -> f64 {
        self.rising.iter().map(|&(a, p)| a * e.powf(p)).sum::<f64>()
            + self.falling.iter().map(|&(b, p)| b * e.powf(-p)).sum::<f64>()
    }
}

/// `Σ_{i,j} (A_i^(b_j) B_j^(a_i))^(1/(a_i+b_j)) + Σ A_i E1^(a_i) + Σ B_j E2^(−b_j)`.
pub fn balance_bound(t: &BalanceTerms) -> f64 {
    let mut cross = 0.0;
    for &(a_coef, a) in &t.rising {
        for &(b_coef, b) in &t.falling {
            cross += ((b * a_coef.ln() + a * b_coef.ln()) / (a + b)).exp();
        }
    }
    let low: f64 = t.rising.iter().map(|&(c, a)| c * t.e1.powf(a)).sum();
    let high: f64 = t.falling.iter().map(|&(c, b)| if t.e2.is_infinite() { 0.0 } else { c * t.e2.powf(-b) }).sum();
    cross + low + high
}

/// Fraction of a uniform midpoint grid on `[1, 2]` where
/// `|Σ a_i t^(α_i)| <= Θ`, and the comparison value
/// `(Θ / Σ|a_i|)^(1/(d−1))`.
pub fn small_value_measure(a: &[f64], alpha: &[f64], theta: f64, grid: usize) -> Result<(f64, f64), PairError> {
    let d = a.len();
    if d < 2 || alpha.len() != d || grid < 1000 {
        return Err(PairError::InvalidPair(format!("d = {d}"), format!("grid = {grid}")));
    }
    let hits = (0..grid)
        .filter(|&i| {
            let t = 1.0 + (i as f64 + 0.5) / grid as f64;
            let v: f64 = a.iter().zip(alpha).map(|(&c, &e)| c * t.powf(e)).sum();
            v.abs() <= theta
        })
        .count();
    let norm: f64 = a.iter().map(|c| c.abs()).sum();
    Ok((hits as f64 / grid as f64, (theta / norm).powf(1.0 / (d as f64 - 1.0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(kn: i64, kd: i64, ln: i64, ld: i64) -> ExponentPair {
        ExponentPair::from_ratio(kn, kd, ln, ld).unwrap()
    }

    #[test]
    fn a_process_examples() {
        assert!(ExponentPair::trivial().a_process().same_pair(&pair(0, 1, 1, 1)));
        let p = pair(1, 2, 1, 2).a_process();
        assert!(p.same_pair(&pair(1, 6, 2, 3)));
        assert_eq!(p.word(), "A");
        assert!(pair(1, 6, 2, 3).a_process().same_pair(&pair(1, 14, 11, 14)));
    }

    #[test]
    fn b_process_examples() {
        assert!(ExponentPair::trivial().b_process().unwrap().same_pair(&pair(1, 2, 1, 2)));
        assert!(pair(1, 2, 1, 2).b_process().unwrap().same_pair(&pair(0, 1, 1, 1)));
        assert!(pair(1, 6, 2, 3).b_process().unwrap().same_pair(&pair(1, 6, 2, 3)));
    }

    #[test]
    fn invalid_pairs_rejected() {
        assert!(ExponentPair::from_ratio(3, 5, 1, 2).is_err());
        assert!(ExponentPair::from_ratio(-1, 5, 1, 2).is_err());
        assert!(ExponentPair::from_ratio(1, 5, 1, 3).is_err());
    }

    #[test]
    fn enumeration_levels() {
        let zero = enumerate_pairs(0).unwrap();
        assert_eq!(zero.len(), 3);
        let one = enumerate_pairs(1).unwrap();
        assert!(one.iter().any(|p| p.same_pair(&pair(1, 2, 1, 2)) && p.word() == "B"));
        let four = enumerate_pairs(4).unwrap();
        assert!(four.iter().any(|p| p.same_pair(&pair(1, 6, 2, 3))));
        assert!(four.iter().any(|p| p.same_pair(&ExponentPair::bourgain())));
        assert!(four.iter().any(|p| p.same_pair(&ExponentPair::eleven_twentyeighths())));
        assert!(four.iter().all(ExponentPair::is_valid));
        assert!(enumerate_pairs(13).is_err());
        // no duplicates
        let set: HashSet<_> = four.iter().map(|p| (p.kappa().clone(), p.lambda().clone())).collect();
        assert_eq!(set.len(), four.len());
    }

    #[test]
    fn bound_substitutions() {
        let x: f64 = 2f64.powi(40);
        let m = x.sqrt();
        let delta = 7.0;
        let t = bilinear_bound_terms(m, x, delta, &pair(1, 2, 1, 2), 0.0);
        let want = [x.powf(0.75), x / delta.sqrt(), x.powf(5.0 / 6.0), delta.powf(1.0 / 6.0) * x.powf(0.75)];
        for (a, b) in t.terms.iter().zip(want) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
        let t = bilinear_bound_terms(1.0, x, delta, &ExponentPair::trivial(), 0.0);
        let want = x.sqrt() + x / delta.sqrt() + x + x;
        assert!((t.total - want).abs() <= 1e-12 * want);
        // Δ → ∞: the second term vanishes, the fourth grows
        let a = bilinear_bound_terms(m, x, 1e6, &pair(1, 6, 2, 3), 0.0);
        let b = bilinear_bound_terms(m, x, 1e12, &pair(1, 6, 2, 3), 0.0);
        assert!(b.terms[1] < a.terms[1] && b.terms[3] > a.terms[3]);
    }

    #[test]
    fn delta_examples() {
        assert!((delta_coefficient(&[(1.0, 0.5)], 2).unwrap() - 0.25).abs() < 1e-15);
        assert!((delta_coefficient(&[(2.0, 2.0 / 3.0)], 3).unwrap() - 16.0 / 27.0).abs() < 1e-15);
        // γ=1/2 gives −1/4 per unit E; γ=3/2 gives +3/4, so E = (1, 1/3) cancels
        let exact = delta_coefficient_exact(&[(q(1, 1), q(1, 2)), (q(1, 3), q(3, 2))], 2).unwrap();
        assert!(exact.is_zero());
        assert_eq!(delta_coefficient_exact(&[(q(2, 1), q(2, 3))], 3).unwrap(), q(16, 27));
        assert!(delta_coefficient(&[(1.0, 0.5)], 1).is_err());
    }

    #[test]
    fn optimizer_matches_exhaustive_scan() {
        let x: f64 = 2f64.powi(40);
        let (m, delta) = (x.powf(0.6), x.powf(0.2));
        let (best, value) = optimize_pair(m, x, delta, 0.0, 4).unwrap();
        let scan = enumerate_pairs(4)
            .unwrap()
            .iter()
            .map(|p| bilinear_bound(m, x, delta, p, 0.0))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(value, scan);
        assert_eq!(bilinear_bound(m, x, delta, &best, 0.0), value);
        // degenerate M = X
        let (_, v) = optimize_pair(x, x, delta, 0.0, 3).unwrap();
        assert!(v.is_finite() && v >= x);
    }

    #[test]
    fn balance_examples() {
        let t = BalanceTerms::new(vec![(1.0, 1.0)], vec![(1.0, 1.0)], 0.0, f64::INFINITY).unwrap();
        assert!((balance_bound(&t) - 1.0).abs() < 1e-15);
        let t = BalanceTerms::new(vec![(4.0, 1.0)], vec![(1.0, 1.0)], 0.0, f64::INFINITY).unwrap();
        assert!((balance_bound(&t) - 2.0).abs() < 1e-15);
        assert!(BalanceTerms::new(vec![(0.0, 1.0)], vec![], 0.0, 1.0).is_err());
        assert!(BalanceTerms::new(vec![], vec![], 2.0, 1.0).is_err());
    }

    #[test]
    fn small_value_examples() {
        let (m, _) = small_value_measure(&[1.0, -1.0], &[0.5, 1.0 / 3.0], 10.0, 1000).unwrap();
        assert_eq!(m, 1.0);
        let (m, _) = small_value_measure(&[1.0, 1.0], &[0.5, 1.0 / 3.0], 0.0, 1000).unwrap();
        assert_eq!(m, 0.0);
        let (coarse, bound) = small_value_measure(&[1.0, -1.0], &[0.5, 1.0 / 3.0], 0.01, 1000).unwrap();
        let (fine, _) = small_value_measure(&[1.0, -1.0], &[0.5, 1.0 / 3.0], 0.01, 64_000).unwrap();
        assert!(coarse <= 1.0 && fine <= 1.0);
        assert!(fine > 0.0 && coarse <= 2.0 * fine && fine <= 2.0 * coarse);
        assert!(bound > 0.0);
        assert!(small_value_measure(&[1.0], &[0.5], 0.1, 1000).is_err());
    }
}
