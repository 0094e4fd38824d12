//! Vaughan and Heath-Brown decompositions of the von Mangoldt function.
//!
//! Every quantity is a sum of `log d` over divisors `d` of `n` weighted by
//! integers, so it is carried exactly as an integer combination of `log p`
//! over the primes `p | n` ([`LogCombination`]). Comparing against Λ(n) is
//! then an exact integer comparison; the float value is only produced on
//! request.

use std::collections::HashMap;

use num_rational::Ratio;
use thiserror::Error;

use crate::sieve::{divisors, factorize};
use crate::summation::Neumaier;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error("out of domain: {0}")]
    Domain(String),
}

/// `Σ coeffs[i] · log primes[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogCombination {
    primes: Vec<u64>,
    coeffs: Vec<i64>,
}

impl LogCombination {
    fn zero(primes: &[u64]) -> Self {
        Self {
            primes: primes.to_vec(),
            coeffs: vec![0; primes.len()],
        }
    }

    fn add_scaled(&mut self, exps: &[u32], w: i64) {
        for (c, &e) in self.coeffs.iter_mut().zip(exps) {
            *c += w * e as i64;
        }
    }

    fn add(&mut self, other: &LogCombination) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// `(prime, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> Vec<(u64, i64)> {
        self.primes
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, &c)| c != 0)
            .map(|(&p, &c)| (p, c))
            .collect()
    }

    pub fn value(&self) -> f64 {
        let mut acc = Neumaier::new();
        for (p, c) in self.terms() {
            acc.add(c as f64 * (p as f64).ln());
        }
        acc.total()
    }
}

/// Divisors of `n` with their exponent vectors over the primes of `n`.
struct DivisorLattice {
    n: u64,
    primes: Vec<u64>,
    divisors: Vec<u64>,
    exps: Vec<Vec<u32>>,
    index: HashMap<u64, usize>,
}

impl DivisorLattice {
    fn new(n: u64) -> Self {
        let fac = factorize(n);
        let primes: Vec<u64> = fac.iter().map(|&(p, _)| p).collect();
        let divisors = divisors(n);
        let exps = divisors
            .iter()
            .map(|&d| {
                primes
                    .iter()
                    .map(|&p| {
                        let (mut d, mut e) = (d, 0);
                        while d % p == 0 {
                            d /= p;
                            e += 1;
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let index = divisors.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        Self {
            n,
            primes,
            divisors,
            exps,
            index,
        }
    }

    fn mu(&self, i: usize) -> i64 {
        let e = &self.exps[i];
        if e.iter().any(|&x| x > 1) {
            0
        } else if e.iter().filter(|&&x| x == 1).count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Index of the prime if divisor `i` is a prime power.
    fn prime_power_base(&self, i: usize) -> Option<usize> {
        let e = &self.exps[i];
        let nz: Vec<usize> = (0..e.len()).filter(|&j| e[j] > 0).collect();
        (nz.len() == 1).then(|| nz[0])
    }

    /// Λ(d) for divisor `i`, as a combination.
    fn lambda(&self, i: usize) -> LogCombination {
        let mut out = LogCombination::zero(&self.primes);
        if let Some(j) = self.prime_power_base(i) {
            out.coeffs[j] = 1;
        }
        out
    }

    fn cofactor(&self, of: usize, d: usize) -> usize {
        self.index[&(self.divisors[of] / self.divisors[d])]
    }

    /// Indices of divisors of divisor `m`.
    fn divisors_of(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        let dm = self.divisors[m];
        (0..=m).filter(move |&i| dm % self.divisors[i] == 0)
    }

    /// Dirichlet convolution of integer-valued functions on the lattice.
    fn convolve(&self, f: &[i64], g: &[i64]) -> Vec<i64> {
        (0..self.divisors.len())
            .map(|m| self.divisors_of(m).map(|d| f[d] * g[self.cofactor(m, d)]).sum())
            .collect()
    }
}

/// Λ(n) as an exact combination.
pub fn mangoldt_combination(n: u64) -> LogCombination {
    let lat = DivisorLattice::new(n);
    lat.lambda(lat.divisors.len() - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaughanParams {
    pub u: f64,
    pub v: f64,
}

impl VaughanParams {
    pub fn new(u: f64, v: f64) -> Result<Self, IdentityError> {
        if !(u >= 1.0 && v >= 1.0) {
            return Err(IdentityError::Domain(format!("U = {u}, V = {v} must be >= 1")));
        }
        Ok(Self { u, v })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaughanTerms {
    pub term1: LogCombination,
    pub term2: LogCombination,
    pub term3: LogCombination,
}

impl VaughanTerms {
    pub fn total(&self) -> LogCombination {
        let mut t = self.term1.clone();
        t.add(&self.term2);
        t.add(&self.term3);
        t
    }

    pub fn values(&self) -> (f64, f64, f64) {
        (self.term1.value(), self.term2.value(), self.term3.value())
    }
}

/// The three terms of Vaughan's identity at `n > U`.
pub fn vaughan_terms(n: u64, params: VaughanParams) -> Result<VaughanTerms, IdentityError> {
    let VaughanParams { u, v } = params;
    if (n as f64) <= u {
        return Err(IdentityError::Domain(format!("n = {n} must exceed U = {u}")));
    }
    let lat = DivisorLattice::new(n);
    let nd = lat.divisors.len();
    let le = |i: usize, bound: f64| (lat.divisors[i] as f64) <= bound;

    // a(k) = Σ_{cd=k, c<=U, d<=V} Λ(c) μ(d)
    let mut term1 = LogCombination::zero(&lat.primes);
    for k in 0..nd {
        for c in lat.divisors_of(k) {
            let d = lat.cofactor(k, c);
            if le(c, u) && le(d, v) {
                let mu = lat.mu(d);
                if mu != 0 {
                    if let Some(j) = lat.prime_power_base(c) {
                        term1.coeffs[j] -= mu;
                    }
                }
            }
        }
    }

    // Σ_{cd=n, d<=V} (log c) μ(d)
    let top = nd - 1;
    let mut term2 = LogCombination::zero(&lat.primes);
    for d in 0..nd {
        if le(d, v) {
            let c = lat.cofactor(top, d);
            term2.add_scaled(&lat.exps[c], lat.mu(d));
        }
    }

    // −Σ_{kc=n, k>1, c>U} Λ(c) b(k),  b(k) = Σ_{d|k, d<=V} μ(d)
    let mut term3 = LogCombination::zero(&lat.primes);
    for k in 1..nd {
        let c = lat.cofactor(top, k);
        if le(c, u) {
            continue;
        }
        let b: i64 = lat.divisors_of(k).filter(|&d| le(d, v)).map(|d| lat.mu(d)).sum();
        if b != 0 {
            if let Some(j) = lat.prime_power_base(c) {
                term3.coeffs[j] -= b;
            }
        }
    }
    debug_assert_eq!(lat.n, n);
    Ok(VaughanTerms { term1, term2, term3 })
}

fn binomial(k: u32, j: u32) -> i64 {
    (0..j).fold(1i64, |acc, i| acc * (k - i) as i64 / (i + 1) as i64)
}

/// Largest `k` accepted by [`heath_brown_sum`].
pub const HEATH_BROWN_MAX_K: u32 = 6;

/// Heath-Brown's combination
/// `Σ_j (−1)^(j−1) C(k,j) Σ_{n1⋯n_{2j} = n, n_{j+1..2j} <= z} log n1 · μ(n_{j+1})⋯μ(n_{2j})`,
/// returned exactly. Requires `n <= 2 z^k`.
pub fn heath_brown_combination(n: u64, z: f64, k: u32) -> Result<LogCombination, IdentityError> {
    if n == 0 || k == 0 || k > HEATH_BROWN_MAX_K || z < 1.0 {
        return Err(IdentityError::Domain(format!("n = {n}, z = {z}, k = {k}")));
    }
    if n as f64 > 2.0 * z.powi(k as i32) * (1.0 + 1e-12) {
        return Err(IdentityError::Domain(format!("n = {n} exceeds 2 z^k = {}", 2.0 * z.powi(k as i32))));
    }
    let lat = DivisorLattice::new(n);
    let nd = lat.divisors.len();
    let ones = vec![1i64; nd];
    let mu_z: Vec<i64> = (0..nd)
        .map(|i| if (lat.divisors[i] as f64) <= z { lat.mu(i) } else { 0 })
        .collect();
    let mut delta = vec![0i64; nd];
    delta[0] = 1;

    let top = nd - 1;
    let mut total = LogCombination::zero(&lat.primes);
    // g = 1^{*(j-1)} * μ_z^{*j}, built incrementally
    let mut g = delta;
    for j in 1..=k {
        g = lat.convolve(&g, &mu_z);
        if j > 1 {
            g = lat.convolve(&g, &ones);
        }
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let w = sign * binomial(k, j);
        for d in 0..nd {
            let cof = g[lat.cofactor(top, d)];
            if cof != 0 {
                total.add_scaled(&lat.exps[d], w * cof);
            }
        }
    }
    Ok(total)
}

pub fn heath_brown_sum(n: u64, z: f64, k: u32) -> Result<f64, IdentityError> {
    Ok(heath_brown_combination(n, z, k)?.value())
}

/// Smallest admissible `z` for `n`: `max(1, (n/2)^(1/k))`.
pub fn minimal_z(n: u64, k: u32) -> f64 {
    // floor of the root, exactly: largest z with 2 z^k <= n
    let mut z = (n as f64 / 2.0).powf(1.0 / k as f64).floor() as u64;
    while z > 0 && 2 * z.pow(k) > n {
        z -= 1;
    }
    while 2 * (z + 1).pow(k) <= n {
        z += 1;
    }
    (n as f64 / 2.0).powf(1.0 / k as f64).max(z as f64).max(1.0)
}

/// Dyadic ranges of the Type I / Type II split.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSplit {
    pub beta: Ratio<u64>,
    /// `max{x^(1−β), x^(2β)}`
    pub m_bound: f64,
    pub k_lo: f64,
    pub k_hi: f64,
}

pub fn type_split_ranges(x: f64, beta: Ratio<u64>) -> Result<TypeSplit, IdentityError> {
    let b = *beta.numer() as f64 / *beta.denom() as f64;
    if !(x >= 2.0) || beta.numer() == &0 || beta >= Ratio::new(1, 2) {
        return Err(IdentityError::Domain(format!("x = {x}, beta = {beta}")));
    }
    Ok(TypeSplit {
        beta,
        m_bound: x.powf(1.0 - b).max(x.powf(2.0 * b)),
        k_lo: x.powf(b),
        k_hi: x.powf(1.0 - b),
    })
}
