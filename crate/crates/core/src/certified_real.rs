//! Certified evaluation of `n^(p/q)` for rational exponents.
//!
//! Every floor and ceiling of a rational power is decidable exactly:
//! `k <= n^(p/q)` iff `k^q <= n^p`. The fast path evaluates in `f64` and
//! accepts the answer only when the value sits well away from an integer;
//! anything closer goes through a dyadic enclosure and, if that still
//! straddles an integer, through the exact big-integer comparison.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifiedError {
    #[error("invalid exponent {0}")]
    InvalidExponent(String),
    #[error("base must be positive")]
    ZeroBase,
    #[error("interval width target not reached after {escalations} escalations")]
    EscalationExhausted { escalations: u32 },
    #[error("more than one integer in [{lo_base}^e, {hi_base}^e)")]
    MultipleIntegers { lo_base: u64, hi_base: u64 },
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("lo_base must be smaller than hi_base")]
    EmptyRange,
}

/// Exact positive rational `numerator / denominator` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalExponent {
    numerator: u32,
    denominator: u32,
}

impl RationalExponent {
    pub fn new(numerator: u32, denominator: u32) -> Result<Self, CertifiedError> {
        if numerator == 0 || denominator == 0 {
            return Err(CertifiedError::InvalidExponent(format!("{numerator}/{denominator}")));
        }
        let g = numerator.gcd(&denominator);
        Ok(Self {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    /// A Piatetski-Shapiro exponent: rational, greater than one, not an integer.
    pub fn ps_exponent(numerator: u32, denominator: u32) -> Result<Self, CertifiedError> {
        let e = Self::new(numerator, denominator)?;
        if e.denominator == 1 || e.numerator <= e.denominator {
            return Err(CertifiedError::InvalidExponent(format!(
                "{e} is not a non-integer exponent above 1"
            )));
        }
        Ok(e)
    }

    pub fn numerator(&self) -> u32 {
        self.numerator
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn recip(&self) -> Self {
        Self {
            numerator: self.denominator,
            denominator: self.numerator,
        }
    }

    pub fn is_integer(&self) -> bool {
        self.denominator == 1
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.into(), self.denominator.into())
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for RationalExponent {
    type Err = CertifiedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CertifiedError::InvalidExponent(s.to_string());
        let (p, q) = match s.trim().split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: u32 = p.parse().map_err(|_| bad())?;
        let q: u32 = q.parse().map_err(|_| bad())?;
        Self::new(p, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    initial_bits: u32,
    max_escalations: u32,
}

impl PrecisionContext {
    pub fn new(initial_bits: u32, max_escalations: u32) -> Result<Self, CertifiedError> {
        if initial_bits < 64 || max_escalations < 1 {
            return Err(CertifiedError::InvalidExponent(format!(
                "precision context ({initial_bits} bits, {max_escalations} escalations)"
            )));
        }
        Ok(Self {
            initial_bits,
            max_escalations,
        })
    }

    pub fn initial_bits(&self) -> u32 {
        self.initial_bits
    }

    pub fn max_escalations(&self) -> u32 {
        self.max_escalations
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            initial_bits: 128,
            max_escalations: 4,
        }
    }
}

/// Closed dyadic enclosure `[lo_mantissa / 2^scale, hi_mantissa / 2^scale]`.
///
/// When the enclosed value is irrational it lies strictly inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedInterval {
    lo_mantissa: BigUint,
    hi_mantissa: BigUint,
    scale: u32,
    precision_bits: u32,
}

impl CertifiedInterval {
    fn point(v: BigUint, precision_bits: u32) -> Self {
        Self {
            lo_mantissa: v.clone(),
            hi_mantissa: v,
            scale: 0,
            precision_bits,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo_mantissa == self.hi_mantissa
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn lo(&self) -> BigRational {
        dyadic(&self.lo_mantissa, self.scale)
    }

    pub fn hi(&self) -> BigRational {
        dyadic(&self.hi_mantissa, self.scale)
    }

    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi().to_f64().unwrap_or(f64::INFINITY)
    }

    /// `true` if `other` lies inside `self`.
    pub fn contains(&self, other: &CertifiedInterval) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    pub fn contains_value(&self, x: &BigRational) -> bool {
        &self.lo() <= x && x <= &self.hi()
    }

    /// The floor of the enclosed value if the enclosure pins it down.
    pub fn floor_if_determined(&self) -> Option<BigUint> {
        let lo_floor = &self.lo_mantissa >> self.scale;
        if self.is_exact() {
            return Some(lo_floor);
        }
        // Irrational value: strictly below hi, so hi itself may be an integer.
        let hi_floor = (&self.hi_mantissa - 1u32) >> self.scale;
        (lo_floor == hi_floor).then_some(lo_floor)
    }
}

fn dyadic(m: &BigUint, scale: u32) -> BigRational {
    BigRational::new(m.clone().into(), (BigUint::one() << scale).into())
}

fn bits(v: &BigUint) -> u64 {
    v.bits()
}

/// Encloses `n^(p/q)`. The width after the first pass is at most
/// `2^-(initial_bits/2) * n^(p/q)`; each escalation doubles the working
/// precision and the returned intervals are nested.
pub fn pow_interval(
    n: u64,
    e: RationalExponent,
    ctx: &PrecisionContext,
) -> Result<CertifiedInterval, CertifiedError> {
    if n == 0 {
        return Err(CertifiedError::ZeroBase);
    }
    let q = e.denominator;
    let base_pow = BigUint::from(n).pow(e.numerator);
    let root = base_pow.nth_root(q);
    if root.pow(q) == base_pow {
        return Ok(CertifiedInterval::point(root, ctx.initial_bits));
    }
    let half = (ctx.initial_bits / 2) as u64;
    let mut precision = ctx.initial_bits;
    for _ in 0..=ctx.max_escalations {
        let scale = (precision as u64).saturating_sub(bits(&root)) as u32;
        let scaled = (&base_pow << (scale as u64 * q as u64)).nth_root(q);
        let interval = CertifiedInterval {
            hi_mantissa: &scaled + 1u32,
            lo_mantissa: scaled,
            scale,
            precision_bits: precision,
        };
        // width 2^-scale <= 2^-half * lo  iff  lo_mantissa >= 2^half
        if bits(&interval.lo_mantissa) > half {
            return Ok(interval);
        }
        precision = precision.saturating_mul(2);
    }
    Err(CertifiedError::EscalationExhausted {
        escalations: ctx.max_escalations,
    })
}

/// Encloses `n^(p/q)` at exactly `precision` significant bits.
pub fn pow_interval_at(n: u64, e: RationalExponent, precision: u32) -> Result<CertifiedInterval, CertifiedError> {
    let ctx = PrecisionContext::new(precision.max(64), 1)?;
    pow_interval(n, e, &ctx)
}

/// Relative margin under which an `f64` power is not trusted.
const FLOAT_MARGIN: f64 = 1e-11;
const FLOAT_LIMIT: f64 = 4.0e15;

/// `floor(n^e)` from `f64` if it is unambiguous.
#[inline]
fn float_floor(n: u64, e: f64) -> Option<u64> {
    let v = (n as f64).powf(e);
    if !(v < FLOAT_LIMIT) {
        return None;
    }
    let f = v.floor();
    let tol = FLOAT_MARGIN * (v + 1.0);
    (v - f > tol && f + 1.0 - v > tol).then_some(f as u64)
}

fn exact_floor(n: u64, e: RationalExponent) -> BigUint {
    BigUint::from(n).pow(e.numerator).nth_root(e.denominator)
}

/// `floor(n^(p/q))`, exact.
pub fn certified_floor(
    n: u64,
    e: RationalExponent,
    ctx: &PrecisionContext,
) -> Result<BigUint, CertifiedError> {
    if n == 0 {
        return Err(CertifiedError::ZeroBase);
    }
    if let Some(f) = float_floor(n, e.to_f64()) {
        return Ok(BigUint::from(f));
    }
    match pow_interval(n, e, ctx) {
        Ok(iv) => {
            if let Some(f) = iv.floor_if_determined() {
                return Ok(f);
            }
        }
        Err(CertifiedError::EscalationExhausted { .. }) => {}
        Err(err) => return Err(err),
    }
    // The interval straddles an integer k: decide k^q <= n^p directly.
    Ok(exact_floor(n, e))
}

/// `floor(n^(p/q))` as `u64`.
pub fn floor_pow(n: u64, e: RationalExponent) -> Result<u64, CertifiedError> {
    if n == 0 {
        return Err(CertifiedError::ZeroBase);
    }
    if let Some(f) = float_floor(n, e.to_f64()) {
        return Ok(f);
    }
    exact_floor(n, e).to_u64().ok_or(CertifiedError::Overflow)
}

/// `ceil(n^(p/q))` as `u64`: the smallest `k` with `k^q >= n^p`.
pub fn ceil_pow(n: u64, e: RationalExponent) -> Result<u64, CertifiedError> {
    if n == 0 {
        return Err(CertifiedError::ZeroBase);
    }
    if let Some(f) = float_floor(n, e.to_f64()) {
        return Ok(f + 1);
    }
    let base_pow = BigUint::from(n).pow(e.numerator);
    let root = base_pow.nth_root(e.denominator);
    let c = if root.pow(e.denominator) == base_pow { root } else { root + 1u32 };
    c.to_u64().ok_or(CertifiedError::Overflow)
}

/// The integers `k` with `lo_base^e <= k < hi_base^e`, as the half-open
/// range `ceil(lo_base^e) .. ceil(hi_base^e)`.
pub fn integers_in_power_interval(
    lo_base: u64,
    hi_base: u64,
    e: RationalExponent,
) -> Result<std::ops::Range<u64>, CertifiedError> {
    if lo_base >= hi_base {
        return Err(CertifiedError::EmptyRange);
    }
    Ok(ceil_pow(lo_base, e)?..ceil_pow(hi_base, e)?)
}

/// The integer `k` with `lo_base^e <= k < hi_base^e`, if any. With
/// `assert_unique` a second qualifying integer is an error; otherwise the
/// smallest one is returned.
pub fn integer_in_interval(
    lo_base: u64,
    hi_base: u64,
    e: RationalExponent,
    assert_unique: bool,
) -> Result<Option<u64>, CertifiedError> {
    let range = integers_in_power_interval(lo_base, hi_base, e)?;
    if range.is_empty() {
        return Ok(None);
    }
    if assert_unique && range.end - range.start > 1 {
        return Err(CertifiedError::MultipleIntegers { lo_base, hi_base });
    }
    Ok(Some(range.start))
}

/// Exact check that `k = floor(n^(p/q))`, i.e. `k^q <= n^p < (k+1)^q`.
pub fn is_floor_of_power(k: &BigUint, n: u64, e: RationalExponent) -> bool {
    let np = BigUint::from(n).pow(e.numerator);
    let q = e.denominator;
    k.pow(q) <= np && np < (k + 1u32).pow(q)
}

impl From<&RationalExponent> for BigRational {
    fn from(e: &RationalExponent) -> Self {
        e.to_rational()
    }
}
