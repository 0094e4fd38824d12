//! Brute-force evaluators for the exponential sums of the toolkit.
//!
//! `m ∼ M` always means `M < m <= 2M`. Sums are accumulated with Neumaier
//! compensation inside fixed-size chunks, and chunks are combined by a
//! balanced tree, so serial and parallel runs agree bit for bit.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::certified_real::RationalExponent;
use crate::exponent_pairs::{self, ExponentPair, PairError};
use crate::sieve::{self, SieveConfig};
use crate::summation::{par_chunked_sum, tree_sum, tree_sum_real, ComplexAccumulator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpSumError {
    #[error("{what} = {value} exceeds the cap {cap}")]
    CapacityExceeded { what: &'static str, value: f64, cap: f64 },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error("trivial bound violated: |S| = {abs} > {bound}")]
    TrivialBoundViolated { abs: f64, bound: f64 },
}

/// Cap on `M·N` for [`eval_bilinear`].
pub const BILINEAR_CAP: f64 = (1u64 << 26) as f64;
/// Cap on `X` for von Mangoldt weighted sums.
pub const MANGOLDT_SUM_CAP: f64 = 1e6;

/// `e(t) = exp(2πi t)`, with `t` reduced mod 1 first.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let r = t - t.round();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `ψ(x) = {x} − 1/2`.
pub fn sawtooth(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// `lo < i <= 2 lo` as an inclusive integer range.
pub fn dyadic_range(lo: f64) -> (u64, u64) {
    (lo.floor() as u64 + 1, (2.0 * lo).floor() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTerm {
    pub e: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// `S = Σ_{m∼M} Σ_{n∼N, mn∼X} a_m b_n e(Σ_j E_j m^β_j n^γ_j / (M^β_j N^γ_j))`
/// with `X = M N`. `a[i]` is the coefficient of `m = floor(M) + 1 + i`, and
/// likewise for `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSumSpec {
    pub m: f64,
    pub n: f64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub terms: Vec<PhaseTerm>,
}

impl BilinearSumSpec {
    pub fn new(m: f64, n: f64, a: Vec<Complex64>, b: Vec<Complex64>, terms: Vec<PhaseTerm>) -> Result<Self, ExpSumError> {
        if !(m >= 1.0 && n >= 1.0) {
            return Err(ExpSumError::InvalidSpec(format!("M = {m}, N = {n}")));
        }
        let (ml, mh) = dyadic_range(m);
        let (nl, nh) = dyadic_range(n);
        if a.len() as u64 != mh + 1 - ml || b.len() as u64 != nh + 1 - nl {
            return Err(ExpSumError::InvalidSpec(format!(
                "coefficient lengths {}/{} do not match the dyadic ranges",
                a.len(),
                b.len()
            )));
        }
        Ok(Self { m, n, a, b, terms })
    }

    /// Unit coefficients.
    pub fn unit(m: f64, n: f64, terms: Vec<PhaseTerm>) -> Result<Self, ExpSumError> {
        let (ml, mh) = dyadic_range(m);
        let (nl, nh) = dyadic_range(n);
        let one = Complex64::new(1.0, 0.0);
        Self::new(m, n, vec![one; (mh + 1 - ml) as usize], vec![one; (nh + 1 - nl) as usize], terms)
    }

    /// Random instance: `M, N` uniform in `[2, max_side]`, unit-modulus
    /// coefficients, one to three phase terms with `E ∈ [−X^(1/2), X^(1/2)]`
    /// and exponents in `(0, 1)`.
    pub fn random<R: Rng>(rng: &mut R, max_side: f64) -> Self {
        let m = rng.gen_range(2.0..max_side).floor();
        let n = rng.gen_range(2.0..max_side).floor();
        let (ml, mh) = dyadic_range(m);
        let (nl, nh) = dyadic_range(n);
        let unit = |rng: &mut R| Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let a = (ml..=mh).map(|_| unit(rng)).collect();
        let b = (nl..=nh).map(|_| unit(rng)).collect();
        let x = m * n;
        let terms = (0..rng.gen_range(1..=3))
            .map(|_| PhaseTerm {
                e: rng.gen_range(-1.0..1.0) * x.sqrt(),
                beta: rng.gen_range(0.05..0.95),
                gamma: rng.gen_range(0.05..0.95),
            })
            .collect();
        Self { m, n, a, b, terms }
    }

    pub fn x(&self) -> f64 {
        self.m * self.n
    }

    pub fn m_range(&self) -> (u64, u64) {
        dyadic_range(self.m)
    }

    pub fn n_range(&self) -> (u64, u64) {
        dyadic_range(self.n)
    }

    /// `Σ|a_m| · Σ|b_n|`.
    pub fn trivial_bound(&self) -> f64 {
        let sa: f64 = self.a.iter().map(|z| z.norm()).sum();
        let sb: f64 = self.b.iter().map(|z| z.norm()).sum();
        sa * sb
    }

    /// Smallest `ε` with `max |a_m|, |b_n| <= X^ε`.
    pub fn coefficient_exponent(&self) -> f64 {
        let max = self.a.iter().chain(&self.b).map(|z| z.norm()).fold(0.0, f64::max);
        (max.ln() / self.x().ln()).max(0.0)
    }

    pub fn phase(&self, m: u64, n: u64) -> f64 {
        let (mr, nr) = (m as f64 / self.m, n as f64 / self.n);
        self.terms.iter().map(|t| t.e * mr.powf(t.beta) * nr.powf(t.gamma)).sum()
    }

    /// The same spec with every frequency negated and coefficients conjugated.
    pub fn conjugated(&self) -> Self {
        Self {
            a: self.a.iter().map(|z| z.conj()).collect(),
            b: self.b.iter().map(|z| z.conj()).collect(),
            terms: self.terms.iter().map(|t| PhaseTerm { e: -t.e, ..*t }).collect(),
            ..self.clone()
        }
    }
}

pub fn eval_bilinear(spec: &BilinearSumSpec) -> Result<Complex64, ExpSumError> {
    if spec.m * spec.n > BILINEAR_CAP {
        return Err(ExpSumError::CapacityExceeded {
            what: "M*N",
            value: spec.m * spec.n,
            cap: BILINEAR_CAP,
        });
    }
    let (ml, mh) = spec.m_range();
    let (nl, nh) = spec.n_range();
    let x = spec.x();
    Ok(par_chunked_sum(ml, mh + 1, |m| {
        let mut acc = ComplexAccumulator::new();
        let am = spec.a[(m - ml) as usize];
        for n in nl..=nh {
            let mn = (m * n) as f64;
            if mn > x && mn <= 2.0 * x {
                acc.add(am * spec.b[(n - nl) as usize] * e(spec.phase(m, n)));
            }
        }
        acc.total()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    VonMangoldt,
    Unit,
}

/// `Σ_{h ≠ 0, |h_j| < bound_j} |Σ_{X < m <= aX} w(m) e(Σ_j h_j m^γ_j)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct HSumSpec {
    pub x: f64,
    pub a: f64,
    pub gammas: Vec<RationalExponent>,
    pub h_bounds: Vec<f64>,
    pub weight: Weight,
}

impl HSumSpec {
    pub fn validate(&self) -> Result<(), ExpSumError> {
        let ok_a = self.a > 1.0 && self.a < 1.0 + 1.0 / self.x.ln();
        let ok_g = self
            .gammas
            .iter()
            .all(|g| 2 * g.numerator() > g.denominator() && g.numerator() < g.denominator());
        if !ok_a || !ok_g || self.gammas.len() != self.h_bounds.len() || self.gammas.is_empty() {
            return Err(ExpSumError::InvalidSpec(format!("{self:?}")));
        }
        if self.h_bounds.iter().any(|&b| !(b > 0.0)) {
            return Err(ExpSumError::InvalidSpec("h bounds must be positive".into()));
        }
        Ok(())
    }

    /// All nonzero integer vectors with `|h_j| < bound_j`, lexicographic.
    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        let maxes: Vec<i64> = self.h_bounds.iter().map(|&b| (b.ceil() as i64 - 1).max(0)).collect();
        let mut out = vec![Vec::new()];
        for &hm in &maxes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (-hm..=hm).map(move |h| {
                        let mut v = prefix.clone();
                        v.push(h);
                        v
                    })
                })
                .collect();
        }
        out.retain(|v| v.iter().any(|&h| h != 0));
        out
    }
}

/// `(m, w(m))` for `lo < m <= hi`, skipping zero weights.
fn weighted_range(lo: f64, hi: f64, weight: Weight) -> Result<Vec<(u64, f64)>, ExpSumError> {
    let (a, b) = (lo.floor() as u64 + 1, hi.floor() as u64);
    if b < a {
        return Ok(Vec::new());
    }
    match weight {
        Weight::Unit => Ok((a..=b).map(|m| (m, 1.0)).collect()),
        Weight::VonMangoldt => {
            if hi > MANGOLDT_SUM_CAP {
                return Err(ExpSumError::CapacityExceeded {
                    what: "X",
                    value: hi,
                    cap: MANGOLDT_SUM_CAP,
                });
            }
            let segs = sieve::par_arith_segments(a, b, &SieveConfig::default(), |s| {
                (s.lo()..s.hi())
                    .filter_map(|m| s.lambda(m).flatten().map(|pp| (m, pp.ln())))
                    .collect::<Vec<_>>()
            })
            .map_err(|e| ExpSumError::InvalidSpec(e.to_string()))?;
            Ok(segs.into_iter().flatten().collect())
        }
    }
}

fn weighted_sum<F: Fn(u64) -> f64>(terms: &[(u64, f64)], phase: F) -> Complex64 {
    let mut acc = ComplexAccumulator::new();
    for &(m, w) in terms {
        acc.add(w * e(phase(m)));
    }
    acc.total()
}

pub fn eval_h_sum(spec: &HSumSpec) -> Result<f64, ExpSumError> {
    spec.validate()?;
    let terms = weighted_range(spec.x, spec.a * spec.x, spec.weight)?;
    let powers: Vec<Vec<f64>> = spec
        .gammas
        .iter()
        .map(|g| terms.iter().map(|&(m, _)| (m as f64).powf(g.to_f64())).collect())
        .collect();
    let freqs = spec.frequencies();
    let norms: Vec<f64> = freqs
        .par_iter()
        .map(|h| {
            let mut acc = ComplexAccumulator::new();
            for (i, &(_, w)) in terms.iter().enumerate() {
                let t: f64 = h.iter().zip(&powers).map(|(&hj, p)| hj as f64 * p[i]).sum();
                acc.add(w * e(t));
            }
            acc.total().norm()
        })
        .collect();
    Ok(tree_sum_real(&norms))
}

/// Parameters of the weighted sum
/// `Ψ = Σ_{X<m<=aX} Λ(m) e(h((m+1)^γ2 − w/W)^γ1 + k m^γ2 + j (m+1)^γ2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiParams {
    pub x: f64,
    pub a: f64,
    pub h: i64,
    pub k: i64,
    pub j: i64,
    pub w: u64,
    pub big_w: u64,
    pub gamma1: RationalExponent,
    pub gamma2: RationalExponent,
}

pub fn psi_phase(p: &PsiParams, m: u64) -> f64 {
    let (g1, g2) = (p.gamma1.to_f64(), p.gamma2.to_f64());
    let next = (m as f64 + 1.0).powf(g2);
    let shifted = next - p.w as f64 / p.big_w as f64;
    p.h as f64 * shifted.powf(g1) + p.k as f64 * (m as f64).powf(g2) + p.j as f64 * next
}

pub fn eval_psi_sum(p: &PsiParams) -> Result<Complex64, ExpSumError> {
    if p.big_w == 0 || p.w >= p.big_w {
        return Err(ExpSumError::InvalidSpec(format!("w = {} not in [0, {})", p.w, p.big_w)));
    }
    let terms = weighted_range(p.x, p.a * p.x, Weight::VonMangoldt)?;
    Ok(weighted_sum(&terms, |m| psi_phase(p, m)))
}

/// Weyl-van der Corput inequality for `f` supported on `0..f.len()`:
/// `|Σ f|² <= (|I|+Q)/Q · Σ_{|q|<Q} (1 − |q|/Q) Σ_n f(n) conj(f(n−q))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub fn weyl_vdc_check(f: &[Complex64], q: usize) -> Result<WeylCheck, ExpSumError> {
    if q == 0 {
        return Err(ExpSumError::InvalidSpec("Q must be positive".into()));
    }
    let len = f.len();
    let mut total = ComplexAccumulator::new();
    f.iter().for_each(|&z| total.add(z));
    let lhs = total.total().norm_sqr();
    let shifts: Vec<Complex64> = (-(q as i64) + 1..q as i64)
        .map(|s| {
            let mut acc = ComplexAccumulator::new();
            for n in 0..len as i64 {
                let m = n - s;
                if (0..len as i64).contains(&m) {
                    acc.add(f[n as usize] * f[m as usize].conj());
                }
            }
            acc.total() * (1.0 - s.unsigned_abs() as f64 / q as f64)
        })
        .collect();
    let rhs = (len + q) as f64 / q as f64 * tree_sum(&shifts).re;
    Ok(WeylCheck {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + 1e-9) + 1e-12,
    })
}

/// `Y^κ N^λ + Y^(−1)`.
pub fn single_sum_vdp_bound(y: f64, n: f64, pair: &ExponentPair) -> f64 {
    y.powf(pair.kappa_f64()) * n.powf(pair.lambda_f64()) + 1.0 / y
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub m: f64,
    pub n: f64,
    pub abs_s: f64,
    pub trivial_bound: f64,
    pub delta: f64,
    pub bound: f64,
    pub pair: ExponentPair,
    pub ratio: f64,
    pub degenerate_delta: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub max_ratio: f64,
}

/// Derivative order used for Δ in the ratio report.
pub const REPORT_DERIVATIVE_ORDER: u32 = 2;

/// `|S|` against the best bound over the pair set. A zero Δ makes every
/// pair bound infinite; such rows fall back to the trivial bound
/// `Σ|a| Σ|b|` (reported with the trivial pair) and are flagged.
pub fn empirical_ratio_report(specs: &[BilinearSumSpec], pair_depth: usize, eps: f64) -> Result<RatioReport, ExpSumError> {
    let rows = specs
        .iter()
        .map(|spec| -> Result<RatioRow, ExpSumError> {
            let s = eval_bilinear(spec)?;
            let abs_s = s.norm();
            let trivial_bound = spec.trivial_bound();
            if abs_s > trivial_bound * (1.0 + 1e-12) {
                return Err(ExpSumError::TrivialBoundViolated { abs: abs_s, bound: trivial_bound });
            }
            let ts: Vec<(f64, f64)> = spec.terms.iter().map(|t| (t.e, t.gamma)).collect();
            let delta = exponent_pairs::delta_coefficient(&ts, REPORT_DERIVATIVE_ORDER)?;
            let (m, n) = (spec.m, spec.n);
            if delta == 0.0 {
                return Ok(RatioRow {
                    m,
                    n,
                    abs_s,
                    trivial_bound,
                    delta,
                    bound: trivial_bound,
                    pair: ExponentPair::trivial(),
                    ratio: abs_s / trivial_bound,
                    degenerate_delta: true,
                });
            }
            let (pair, bound) = exponent_pairs::optimize_pair(m, spec.x(), delta, eps, pair_depth)?;
            Ok(RatioRow {
                m,
                n,
                abs_s,
                trivial_bound,
                delta,
                bound,
                pair,
                ratio: abs_s / bound,
                degenerate_delta: false,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(RatioReport { rows, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sawtooth_examples() {
        assert_eq!(sawtooth(0.0), -0.5);
        assert_eq!(sawtooth(0.75), 0.25);
        assert_eq!(sawtooth(-0.25), 0.25);
    }

    #[test]
    fn zero_phase_counts_lattice_points() {
        let spec = BilinearSumSpec::unit(20.0, 30.0, vec![]).unwrap();
        let s = eval_bilinear(&spec).unwrap();
        // divisor-count oracle: pairs (m, n) with m in (20,40], n in (30,60], 600 < mn <= 1200
        let count = (601..=1200u64)
            .map(|k| (21..=40u64).filter(|m| k % m == 0 && (31..=60).contains(&(k / m))).count())
            .sum::<usize>();
        assert_eq!(s.re, count as f64);
        assert_eq!(s.im, 0.0);
    }

    #[test]
    fn single_term_sanity() {
        // M = N = 1: m = n = 2, mn = 4 lies in (X, 2X] only for X in [2, 4)
        let spec = BilinearSumSpec::unit(1.0, 1.0, vec![PhaseTerm { e: 0.3, beta: 0.5, gamma: 0.25 }]).unwrap();
        let want = e(0.3 * 2f64.powf(0.5) * 2f64.powf(0.25));
        // X = 1 here, so mn = 4 > 2X: empty
        assert_eq!(eval_bilinear(&spec).unwrap(), Complex64::new(0.0, 0.0));
        let spec = BilinearSumSpec::unit(1.5, 1.5, vec![PhaseTerm { e: 0.3, beta: 0.5, gamma: 0.25 }]).unwrap();
        let (m, n) = (2.0 / 1.5f64, 2.0 / 1.5f64);
        let want2 = e(0.3 * m.powf(0.5) * n.powf(0.25));
        assert!((eval_bilinear(&spec).unwrap() - want2).norm() < 1e-15);
        assert!(want.norm() > 0.0);
    }

    #[test]
    fn conjugation_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let spec = BilinearSumSpec::random(&mut rng, 64.0);
            let a = eval_bilinear(&spec).unwrap();
            let b = eval_bilinear(&spec.conjugated()).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn capacity() {
        let spec = BilinearSumSpec::unit(9000.0, 9000.0, vec![]).unwrap();
        assert!(matches!(eval_bilinear(&spec), Err(ExpSumError::CapacityExceeded { .. })));
    }

    #[test]
    fn h_sum_empty_range() {
        let spec = HSumSpec {
            x: 100.0,
            a: 1.1,
            gammas: vec![RationalExponent::new(2, 3).unwrap()],
            h_bounds: vec![0.5],
            weight: Weight::VonMangoldt,
        };
        assert_eq!(eval_h_sum(&spec).unwrap(), 0.0);
    }

    #[test]
    fn h_sum_matches_direct_loop() {
        let spec = HSumSpec {
            x: 100.0,
            a: 1.2,
            gammas: vec![RationalExponent::new(2, 3).unwrap()],
            h_bounds: vec![2.0],
            weight: Weight::VonMangoldt,
        };
        let mut direct = 0.0;
        for h in [-1i64, 1] {
            let mut s = Complex64::new(0.0, 0.0);
            for m in 101..=120u64 {
                let lam = sieve::mangoldt_ln(m);
                s += lam * Complex64::from_polar(1.0, TAU * h as f64 * (m as f64).powf(2.0 / 3.0));
            }
            direct += s.norm();
        }
        assert!((eval_h_sum(&spec).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn h_sum_conjugate_pair() {
        let spec = HSumSpec {
            x: 10_000.0,
            a: 1.1,
            gammas: vec![RationalExponent::new(3, 5).unwrap()],
            h_bounds: vec![2.0],
            weight: Weight::Unit,
        };
        let mut s = Complex64::new(0.0, 0.0);
        for m in 10_001..=11_000u64 {
            s += e((m as f64).powf(0.6));
        }
        assert!((eval_h_sum(&spec).unwrap() - 2.0 * s.norm()).abs() < 1e-9);
    }

    fn psi(h: i64, k: i64, j: i64) -> PsiParams {
        PsiParams {
            x: 1000.0,
            a: 1.1,
            h,
            k,
            j,
            w: 3,
            big_w: 16,
            gamma1: RationalExponent::new(9, 10).unwrap(),
            gamma2: RationalExponent::new(1, 2).unwrap(),
        }
    }

    #[test]
    fn psi_sum_cases() {
        let cheb: f64 = (1001..=1100u64).map(sieve::mangoldt_ln).sum();
        assert!((eval_psi_sum(&psi(0, 0, 0)).unwrap() - Complex64::new(cheb, 0.0)).norm() < 1e-10);
        let direct: Complex64 = (1001..=1100u64)
            .map(|m| sieve::mangoldt_ln(m) * Complex64::from_polar(1.0, TAU * (m as f64).sqrt()))
            .sum();
        assert!((eval_psi_sum(&psi(0, 1, 0)).unwrap() - direct).norm() < 1e-9);
        let a = eval_psi_sum(&psi(2, -3, 5)).unwrap();
        let b = eval_psi_sum(&psi(-2, 3, -5)).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        assert!(eval_psi_sum(&PsiParams { w: 16, ..psi(0, 0, 0) }).is_err());
    }

    #[test]
    fn weyl_examples() {
        let ones = vec![Complex64::new(1.0, 0.0); 25];
        let c = weyl_vdc_check(&ones, 1).unwrap();
        assert_eq!(c.lhs, 625.0);
        assert_eq!(c.rhs, 26.0 * 25.0);
        assert!(c.ok);
        let mut spike = vec![Complex64::new(0.0, 0.0); 30];
        spike[7] = Complex64::new(3.0, 4.0);
        let c = weyl_vdc_check(&spike, 5).unwrap();
        assert!((c.lhs - 25.0).abs() < 1e-12 && c.rhs >= c.lhs && c.ok);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let f: Vec<Complex64> = (0..100)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            assert!(weyl_vdc_check(&f, 10).unwrap().ok);
        }
    }

    #[test]
    fn vdp_bound_examples() {
        let p = ExponentPair::from_ratio(1, 2, 1, 2).unwrap();
        assert_eq!(single_sum_vdp_bound(1.0, 1.0, &p), 2.0);
        let n: f64 = 1234.0;
        assert!((single_sum_vdp_bound(n, n, &p) - (n + 1.0 / n)).abs() < 1e-9);
        let p = ExponentPair::from_ratio(1, 6, 2, 3).unwrap();
        let want = 2f64.powf(10.0 / 6.0 + 40.0 / 3.0) + 2f64.powi(-10);
        assert!((single_sum_vdp_bound(1024.0, 1048576.0, &p) - want).abs() < 1e-9 * want);
    }

    #[test]
    fn ratio_report_cases() {
        let zero = BilinearSumSpec::unit(16.0, 16.0, vec![]).unwrap();
        let flat = BilinearSumSpec::unit(16.0, 16.0, vec![PhaseTerm { e: 1.0, beta: 0.5, gamma: 0.5 }]).unwrap();
        let r = empirical_ratio_report(&[zero.clone(), flat], 3, 0.0).unwrap();
        assert!(r.rows[0].degenerate_delta && r.rows[0].ratio <= 1.0);
        assert_eq!(r.rows[0].bound, zero.trivial_bound());
        assert!(r.rows[1].ratio.is_finite() && r.rows[1].ratio > 0.0);
        // a real nonzero Δ with zero-phase coefficients: |S| equals the count
        let s = eval_bilinear(&zero).unwrap().norm();
        assert!(s <= zero.trivial_bound());
    }
}
