//! Segmented wheel-30 sieve, von Mangoldt and Möbius functions.
//!
//! Prime flags are packed one byte per 30 integers: bit `i` of byte `b`
//! stands for `lo + 30 b + WHEEL[i]`. Segments are independent and can be
//! sieved concurrently; [`par_segments`] returns their results in ascending
//! order.

use rayon::prelude::*;
use thiserror::Error;

const WHEEL: [u64; 8] = [1, 7, 11, 13, 17, 19, 23, 29];

/// `WHEEL_INDEX[r]` is the bit for residue `r` mod 30, or 8 if `gcd(r,30) > 1`.
const WHEEL_INDEX: [u8; 30] = {
    let mut t = [8u8; 30];
    let mut i = 0;
    while i < 8 {
        t[WHEEL[i] as usize] = i as u8;
        i += 1;
    }
    t
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("bound {requested} exceeds the configured capacity {limit}")]
    CapacityExceeded { requested: u64, limit: u64 },
    #[error("invalid bound {0}")]
    InvalidBound(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct SieveConfig {
    /// Integers per segment, a multiple of 30.
    pub segment_len: u64,
    /// Largest bound accepted by prime sieving.
    pub max_prime_bound: u64,
    /// Largest bound accepted when μ and Λ are tabulated.
    pub max_arith_bound: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_len: (1u64 << 20).div_ceil(30) * 30,
            max_prime_bound: 10_000_000_000,
            max_arith_bound: 1_000_000_000,
        }
    }
}

impl SieveConfig {
    pub fn with_segment_len(mut self, len: u64) -> Self {
        self.segment_len = len.max(30).div_ceil(30) * 30;
        self
    }

    fn check_primes(&self, x: u64) -> Result<(), SieveError> {
        if x > self.max_prime_bound {
            return Err(SieveError::CapacityExceeded {
                requested: x,
                limit: self.max_prime_bound,
            });
        }
        Ok(())
    }
}

/// `n = base^exponent` with `base` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub base: u64,
    pub exponent: u32,
}

impl PrimePower {
    /// Λ(n) = log p.
    pub fn ln(&self) -> f64 {
        (self.base as f64).ln()
    }
}

/// Plain sieve of Eratosthenes on `0..=limit`.
pub fn simple_sieve(limit: u64) -> Vec<bool> {
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2usize;
    while p * p <= n {
        if is_prime[p] {
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    is_prime
}

/// Primes up to `limit`, from [`simple_sieve`].
pub fn small_primes(limit: u64) -> Vec<u64> {
    simple_sieve(limit)
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// Floor square root of a `u64`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Sieving primes for segments reaching up to `hi` (exclusive).
#[derive(Debug, Clone)]
pub struct BasePrimes {
    primes: Vec<u64>,
    /// For primes >= 7: `inv[r]` is the multiplier residue `k mod 30` with
    /// `p k ≡ WHEEL[r] (mod 30)`.
    wheel_mult: Vec<[u8; 8]>,
}

impl BasePrimes {
    pub fn new(hi: u64) -> Self {
        let primes = small_primes(isqrt(hi.saturating_sub(1)) + 1);
        let wheel_mult = primes
            .iter()
            .map(|&p| {
                let mut m = [0u8; 8];
                if p >= 7 {
                    for (r, slot) in m.iter_mut().enumerate() {
                        let k = (0..30u64).find(|k| (p * k) % 30 == WHEEL[r]).unwrap();
                        *slot = k as u8;
                    }
                }
                m
            })
            .collect();
        Self { primes, wheel_mult }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
}

/// Prime flags, and optionally μ and Λ, for the integers in `lo..hi`.
#[derive(Debug, Clone)]
pub struct SieveSegment {
    lo: u64,
    hi: u64,
    /// Wheel bytes starting at `lo - lo % 30`.
    flags: Vec<u8>,
    mu: Option<Vec<i8>>,
    lambda: Option<Vec<Option<PrimePower>>>,
}

impl SieveSegment {
    /// Prime flags only.
    pub fn primes(lo: u64, hi: u64, base: &BasePrimes) -> Self {
        assert!(lo < hi, "empty segment");
        let start = lo - lo % 30;
        let nbytes = (hi - start).div_ceil(30) as usize;
        let mut flags = vec![0xffu8; nbytes];
        if start == 0 {
            flags[0] &= !1; // 1 is not prime
        }
        let end = start + 30 * nbytes as u64;
        for (&p, mult) in base.primes.iter().zip(&base.wheel_mult) {
            if p < 7 {
                continue;
            }
            if p * p >= end {
                break;
            }
            let first = (p * p).max(start);
            let kmin = first.div_ceil(p);
            for (r, &kr) in mult.iter().enumerate() {
                let kr = kr as u64;
                let k = kmin + (kr + 30 - kmin % 30) % 30;
                let mut m = p * k;
                let bit = 1u8 << r;
                while m < end {
                    flags[((m - start) / 30) as usize] &= !bit;
                    m += 30 * p;
                }
            }
        }
        Self {
            lo,
            hi,
            flags,
            mu: None,
            lambda: None,
        }
    }

    /// Prime flags together with μ and Λ, by factor sieving.
    pub fn with_arithmetic(lo: u64, hi: u64, base: &BasePrimes) -> Self {
        assert!(lo < hi, "empty segment");
        let len = (hi - lo) as usize;
        let mut rem: Vec<u64> = (lo..hi).collect();
        let mut mu = vec![1i8; len];
        let mut distinct = vec![0u8; len];
        let mut lambda: Vec<Option<PrimePower>> = vec![None; len];
        for &p in &base.primes {
            if p * p >= hi && p >= hi {
                break;
            }
            let mut m = lo.div_ceil(p).max(1) * p;
            while m < hi {
                let i = (m - lo) as usize;
                let mut e = 0u32;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                    e += 1;
                }
                mu[i] = if e >= 2 { 0 } else { -mu[i] };
                distinct[i] += 1;
                lambda[i] = Some(PrimePower { base: p, exponent: e });
                m += p;
            }
        }
        for i in 0..len {
            let n = lo + i as u64;
            if rem[i] > 1 {
                mu[i] = -mu[i];
                distinct[i] += 1;
                lambda[i] = Some(PrimePower { base: rem[i], exponent: 1 });
            }
            if distinct[i] != 1 || n < 2 {
                lambda[i] = None;
            }
            if n == 0 {
                mu[i] = 0;
            }
        }
        let mut seg = Self::primes(lo, hi, base);
        seg.mu = Some(mu);
        seg.lambda = Some(lambda);
        seg
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(self.lo <= n && n < self.hi, "{n} outside segment");
        match n {
            2 | 3 | 5 => true,
            _ => {
                let idx = WHEEL_INDEX[(n % 30) as usize];
                if idx == 8 {
                    return false;
                }
                let start = self.lo - self.lo % 30;
                self.flags[((n - start) / 30) as usize] & (1 << idx) != 0
            }
        }
    }

    /// Primes of the segment in ascending order.
    pub fn iter_primes(&self) -> impl Iterator<Item = u64> + '_ {
        let start = self.lo - self.lo % 30;
        let (lo, hi) = (self.lo, self.hi);
        let small = [2u64, 3, 5].into_iter().filter(move |&p| lo <= p && p < hi);
        let wheel = self.flags.iter().enumerate().flat_map(move |(b, &byte)| {
            let base = start + 30 * b as u64;
            (0..8).filter_map(move |r| (byte & (1 << r) != 0).then_some(base + WHEEL[r]))
        });
        small.chain(wheel.filter(move |&n| lo <= n && n < hi))
    }

    pub fn mu(&self, n: u64) -> Option<i8> {
        self.mu.as_ref().map(|m| m[(n - self.lo) as usize])
    }

    pub fn lambda(&self, n: u64) -> Option<Option<PrimePower>> {
        self.lambda.as_ref().map(|l| l[(n - self.lo) as usize])
    }

    pub fn mu_values(&self) -> Option<&[i8]> {
        self.mu.as_deref()
    }

    pub fn lambda_values(&self) -> Option<&[Option<PrimePower>]> {
        self.lambda.as_deref()
    }
}

/// Segment boundaries covering `lo..hi`, aligned to multiples of 30.
pub fn segment_bounds(lo: u64, hi: u64, cfg: &SieveConfig) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = ((a - a % 30) + cfg.segment_len).min(hi);
        out.push((a, b));
        a = b;
    }
    out
}

/// Applies `f` to every prime-flag segment of `lo..=hi`, concurrently,
/// returning results in ascending segment order.
pub fn par_segments<T, F>(lo: u64, hi: u64, cfg: &SieveConfig, f: F) -> Result<Vec<T>, SieveError>
where
    T: Send,
    F: Fn(&SieveSegment) -> T + Sync,
{
    cfg.check_primes(hi)?;
    if hi < lo {
        return Ok(Vec::new());
    }
    let base = BasePrimes::new(hi + 1);
    Ok(segment_bounds(lo, hi + 1, cfg)
        .into_par_iter()
        .map(|(a, b)| f(&SieveSegment::primes(a, b, &base)))
        .collect())
}

/// Like [`par_segments`] with μ and Λ tabulated.
pub fn par_arith_segments<T, F>(lo: u64, hi: u64, cfg: &SieveConfig, f: F) -> Result<Vec<T>, SieveError>
where
    T: Send,
    F: Fn(&SieveSegment) -> T + Sync,
{
    if hi > cfg.max_arith_bound {
        return Err(SieveError::CapacityExceeded {
            requested: hi,
            limit: cfg.max_arith_bound,
        });
    }
    if hi < lo {
        return Ok(Vec::new());
    }
    let base = BasePrimes::new(hi + 1);
    Ok(segment_bounds(lo, hi + 1, cfg)
        .into_par_iter()
        .map(|(a, b)| f(&SieveSegment::with_arithmetic(a, b, &base)))
        .collect())
}

/// Lazy ascending iterator over the primes `<= x`.
pub struct PrimeIter {
    base: BasePrimes,
    bounds: std::vec::IntoIter<(u64, u64)>,
    buffer: std::vec::IntoIter<u64>,
}

impl Iterator for PrimeIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(p) = self.buffer.next() {
                return Some(p);
            }
            let (a, b) = self.bounds.next()?;
            let seg = SieveSegment::primes(a, b, &self.base);
            self.buffer = seg.iter_primes().collect::<Vec<_>>().into_iter();
        }
    }
}

pub fn primes_up_to(x: u64, cfg: &SieveConfig) -> Result<PrimeIter, SieveError> {
    if x < 2 {
        return Err(SieveError::InvalidBound(x));
    }
    cfg.check_primes(x)?;
    Ok(PrimeIter {
        base: BasePrimes::new(x + 1),
        bounds: segment_bounds(0, x + 1, cfg).into_iter(),
        buffer: Vec::new().into_iter(),
    })
}

/// π(x), segments counted in parallel.
pub fn prime_count(x: u64, cfg: &SieveConfig) -> Result<u64, SieveError> {
    Ok(par_segments(0, x, cfg, |s| s.iter_primes().count() as u64)?.into_iter().sum())
}

/// Prime factorization by trial division, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Structural von Mangoldt value: `Some(p^k)` if `n` is a prime power.
pub fn mangoldt(n: u64) -> Option<PrimePower> {
    match factorize(n).as_slice() {
        [(p, e)] => Some(PrimePower { base: *p, exponent: *e }),
        _ => None,
    }
}

/// Λ(n) as a real number.
pub fn mangoldt_ln(n: u64) -> f64 {
    mangoldt(n).map_or(0.0, |pp| pp.ln())
}

pub fn moebius(n: u64) -> i8 {
    assert!(n >= 1, "μ is defined for n >= 1");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sorted divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SieveConfig {
        SieveConfig::default()
    }

    #[test]
    fn small_examples() {
        let p: Vec<u64> = primes_up_to(10, &cfg()).unwrap().collect();
        assert_eq!(p, vec![2, 3, 5, 7]);
        let p: Vec<u64> = primes_up_to(2, &cfg()).unwrap().collect();
        assert_eq!(p, vec![2]);
        assert!(primes_up_to(1, &cfg()).is_err());
    }

    #[test]
    fn million_has_78498_primes() {
        // independent monolithic sieve
        let oracle = simple_sieve(1_000_000).iter().filter(|&&b| b).count();
        assert_eq!(oracle, 78498);
        assert_eq!(primes_up_to(1_000_000, &cfg()).unwrap().count(), 78498);
        assert_eq!(prime_count(1_000_000, &cfg()).unwrap(), 78498);
    }

    #[test]
    fn segmented_matches_monolithic_with_odd_segment_sizes() {
        let oracle = simple_sieve(200_000);
        for len in [30u64, 90, 3000, 65_550] {
            let c = cfg().with_segment_len(len);
            let got: Vec<u64> = primes_up_to(200_000, &c).unwrap().collect();
            let want: Vec<u64> = (0..=200_000u64).filter(|&i| oracle[i as usize]).collect();
            assert_eq!(got, want, "segment length {len}");
        }
    }

    #[test]
    fn unaligned_segment() {
        let base = BasePrimes::new(10_000);
        let seg = SieveSegment::primes(9_001, 9_100, &base);
        let oracle = simple_sieve(9_100);
        let got: Vec<u64> = seg.iter_primes().collect();
        let want: Vec<u64> = (9_001..9_100).filter(|&i| oracle[i as usize]).collect();
        assert_eq!(got, want);
        for n in 9_001..9_100 {
            assert_eq!(seg.is_prime(n), oracle[n as usize]);
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let c = SieveConfig {
            max_prime_bound: 1000,
            ..cfg()
        };
        assert_eq!(
            primes_up_to(1001, &c).err(),
            Some(SieveError::CapacityExceeded { requested: 1001, limit: 1000 })
        );
    }

    #[test]
    fn mangoldt_and_moebius_examples() {
        assert_eq!(mangoldt_ln(1), 0.0);
        assert_eq!(mangoldt(8), Some(PrimePower { base: 2, exponent: 3 }));
        assert!((mangoldt_ln(8) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(mangoldt_ln(12), 0.0);
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(30), -1);
    }

    #[test]
    fn divisor_sums() {
        for n in 1..=10_000u64 {
            let ds = divisors(n);
            let mu_sum: i64 = ds.iter().map(|&d| moebius(d) as i64).sum();
            assert_eq!(mu_sum, (n == 1) as i64, "n = {n}");
            let lam: f64 = ds.iter().map(|&d| mangoldt_ln(d)).sum();
            let ln = (n as f64).ln();
            assert!((lam - ln).abs() <= 1e-12 * ln.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn segment_arithmetic_matches_trial_division() {
        let c = cfg().with_segment_len(4_980);
        let segs = par_arith_segments(1, 30_000, &c, |s| {
            (s.lo()..s.hi())
                .all(|n| s.mu(n) == Some(moebius(n)) && s.lambda(n) == Some(mangoldt(n)) && s.is_prime(n) == (factorize(n).len() == 1 && factorize(n)[0].1 == 1))
        })
        .unwrap();
        assert!(segs.into_iter().all(|ok| ok));
    }

    #[test]
    fn divisors_match_trial_division() {
        for n in 1..=10_000u64 {
            let naive: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(divisors(n), naive);
        }
    }
}
