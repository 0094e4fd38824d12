//! Lattices, polar lattices, band-limited interval approximations and two
//! Fourier-analytic counting devices built on them.
//!
//! The majorant and minorant of an interval indicator are the classical
//! Beurling–Selberg functions. With Beurling's entire function
//!
//! ```text
//! B(z) = (sin πz / π)² [ Σ_{n>=0} (z−n)^−2 − Σ_{n>=1} (z+n)^−2 + 2/z ]
//! ```
//!
//! which satisfies `B >= sgn`, `∫(B − sgn) = 1` and has Fourier transform
//! supported in `[−1, 1]`, the functions
//!
//! ```text
//! S⁺(x) =  ½ [B(w(x−a)) + B(w(b−x))]
//! S⁻(x) = −½ [B(w(a−x)) + B(w(x−b))]
//! ```
//!
//! sandwich the indicator of `[a, b]`, have spectrum in `[−w, w]`, and miss it
//! by exactly `1/w` in L¹.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exp_sums::e;
use crate::summation::{neumaier_sum, tree_sum, tree_sum_real, ComplexAccumulator, Neumaier, CHUNK};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("basis is singular or not square")]
    SingularBasis,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} = {value} exceeds the cap {cap}")]
    CapacityExceeded { what: &'static str, value: f64, cap: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Largest dimension supported by [`lattice_count`].
pub const MAX_COUNT_DIM: usize = 3;
/// Largest number of points for the exact branch of [`lattice_count`].
pub const MAX_COUNT_POINTS: usize = 100_000;
/// Largest number of summands `x` for [`kolesnik_expand`].
pub const MAX_KOLESNIK_POINTS: usize = 100_001;
/// Largest `W` for [`kolesnik_expand`].
pub const MAX_KOLESNIK_W: u64 = 1 << 12;

/// A full-rank lattice `Γ = Z ℤ^d` with the basis vectors as columns of `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
    det: f64,
}

impl Lattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self, LatticeError> {
        if !basis.is_square() || basis.nrows() == 0 {
            return Err(LatticeError::SingularBasis);
        }
        let det = basis.determinant().abs();
        let scale: f64 = basis.column_iter().map(|c| c.norm()).product();
        if !(det > 1e-12 * scale) || !det.is_finite() {
            return Err(LatticeError::SingularBasis);
        }
        Ok(Self { basis, det })
    }

    /// Basis vectors given as columns.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self, LatticeError> {
        let d = cols.len();
        if cols.iter().any(|c| c.len() != d) {
            return Err(LatticeError::SingularBasis);
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| cols[j][i]))
    }

    pub fn diagonal(v: &[f64]) -> Result<Self, LatticeError> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v)))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Whether `v` is a lattice vector, to absolute tolerance `tol` in the
    /// integer coordinates.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let inv = self.basis.clone().try_inverse().expect("validated basis");
        let k = inv * nalgebra::DVector::from_column_slice(v);
        k.iter().all(|x| (x - x.round()).abs() <= tol)
    }

    /// Smallest sup-norm of a nonzero lattice vector.
    pub fn sup_norm_minimum(&self) -> f64 {
        let d = self.dim();
        let inv = self.basis.clone().try_inverse().expect("validated basis");
        // any vector of sup-norm below the first column's sup-norm has small
        // integer coordinates
        let r0 = self.basis.column(0).amax();
        let radius = r0 * (d as f64).sqrt();
        let bounds: Vec<i64> = (0..d).map(|i| (inv.row(i).norm() * radius).floor() as i64).collect();
        let mut best = r0;
        for k in integer_box(&bounds.iter().map(|&b| (-b, b)).collect::<Vec<_>>()) {
            if k.iter().all(|&x| x == 0) {
                continue;
            }
            let kv = nalgebra::DVector::from_iterator(d, k.iter().map(|&x| x as f64));
            best = best.min((&self.basis * kv).amax());
        }
        best
    }
}

/// All integer vectors in the box `Π [lo_i, hi_i]`, lexicographic.
fn integer_box(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in bounds {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |x| {
                    let mut v = p.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// The polar lattice `Π = {π : π·λ ∈ ℤ for all λ ∈ Γ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarLattice {
    lattice: Lattice,
}

impl PolarLattice {
    pub fn basis(&self) -> &DMatrix<f64> {
        self.lattice.basis()
    }

    pub fn det(&self) -> f64 {
        self.lattice.det()
    }

    pub fn as_lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Largest deviation of `π_i · z_j` from the nearest integer.
    pub fn integrality_defect(&self, source: &Lattice) -> f64 {
        let prod = self.basis().transpose() * source.basis();
        prod.iter().map(|x| (x - x.round()).abs()).fold(0.0, f64::max)
    }

    /// Nonzero polar vectors with Euclidean norm below `w`, in lexicographic
    /// order of their integer coordinates.
    /// Nonzero polar vectors `q` with `|q| < w`.
    pub fn shell(&self, w: f64) -> Vec<Vec<f64>> {
        let p = self.basis();
        self.shell_coords(w)
            .iter()
            .map(|m| {
                let mv = nalgebra::DVector::from_iterator(m.len(), m.iter().map(|&x| x as f64));
                (p * mv).iter().copied().collect()
            })
            .collect()
    }

    /// Integer coordinates `m` of the shell vectors `q = P m`.
    pub fn shell_coords(&self, w: f64) -> Vec<Vec<i64>> {
        let p = self.basis();
        let d = p.nrows();
        let inv = p.clone().try_inverse().expect("validated basis");
        let bounds: Vec<(i64, i64)> = (0..d)
            .map(|i| {
                let b = (inv.row(i).norm() * w).floor() as i64;
                (-b, b)
            })
            .collect();
        integer_box(&bounds)
            .into_iter()
            .filter(|m| m.iter().any(|&x| x != 0))
            .filter(|m| {
                let mv = nalgebra::DVector::from_iterator(d, m.iter().map(|&x| x as f64));
                (p * mv).norm() < w
            })
            .collect()
    }
}

/// Inverse transpose of the basis.
pub fn polar(l: &Lattice) -> Result<PolarLattice, LatticeError> {
    let inv = l.basis.clone().try_inverse().ok_or(LatticeError::SingularBasis)?;
    Ok(PolarLattice {
        lattice: Lattice::new(inv.transpose())?,
    })
}

/// Random `d = 2` lattice whose translates of `[−1, 1]²` are pairwise
/// disjoint (sup-norm minimum at least 2) with `det <= max_det`.
pub fn random_separated_lattice<R: Rng>(rng: &mut R, max_det: f64) -> Lattice {
    loop {
        let cols = vec![
            vec![rng.gen_range(2.0..3.5), rng.gen_range(-1.5..1.5)],
            vec![rng.gen_range(-1.5..1.5), rng.gen_range(2.0..3.5)],
        ];
        if let Ok(l) = Lattice::from_columns(&cols) {
            if l.det() <= max_det && l.sup_norm_minimum() >= 2.0 {
                return l;
            }
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `ψ'(t) = Σ_{k>=0} (t+k)^−2` for `t >= 1`.
fn trigamma(mut t: f64) -> f64 {
    let mut acc = 0.0;
    while t < 20.0 {
        acc += 1.0 / (t * t);
        t += 1.0;
    }
    let i = 1.0 / t;
    let i2 = i * i;
    acc + i + i2 * (0.5 + i * (1.0 / 6.0 + i2 * (-1.0 / 30.0 + i2 * (1.0 / 42.0 + i2 * (-1.0 / 30.0)))))
}

/// Beurling's function on the real line. Uses the reflection formula for
/// the trigamma function so that only `ψ'(t)` with `t >= 1` is needed.
pub fn beurling(x: f64) -> f64 {
    if x >= 0.0 {
        // 1 + 2 (sin πx/π)² (1/x − ψ'(x+1))
        let s = sinc(x);
        if x == 0.0 {
            return 1.0;
        }
        1.0 + 2.0 * s * s * x * x * (1.0 / x - trigamma(x + 1.0))
    } else {
        // −1 + 2 sinc(y)² + 2 (sin πy/π)² (ψ'(y+1) − 1/y), y = −x
        let y = -x;
        let s = sinc(y);
        -1.0 + 2.0 * s * s + 2.0 * s * s * y * y * (trigamma(y + 1.0) - 1.0 / y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Majorant,
    Minorant,
}

/// Band-limited approximation of the indicator of `[a, b]` with spectrum in
/// `[−w, w]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandLimitedFn {
    pub a: f64,
    pub b: f64,
    pub w: f64,
    pub kind: Kind,
}

impl BandLimitedFn {
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b, w) = (self.a, self.b, self.w);
        match self.kind {
            Kind::Majorant => 0.5 * (beurling(w * (x - a)) + beurling(w * (b - x))),
            Kind::Minorant => -0.5 * (beurling(w * (a - x)) + beurling(w * (x - b))),
        }
    }

    pub fn indicator(&self, x: f64) -> f64 {
        if self.a <= x && x <= self.b {
            1.0
        } else {
            0.0
        }
    }

    /// Truncation radius used by [`Self::fourier`]: the neglected tails are
    /// at most about `1/(π² w² R) <= 1e−7 (b − a)`.
    pub fn default_radius(&self) -> f64 {
        (1e7 / (PI * PI * self.w * self.w * (self.b - self.a))).max(10.0 * (self.b - self.a))
    }

    /// `∫ F(x) e(−tx) dx` by the trapezoidal rule with step below `1/(5w)`
    /// on `[a − R, b + R]`. Because `F` is band-limited to `[−w, w]`, the
    /// Poisson summation formula makes the infinite Riemann sum exact for
    /// `|t| <= 4w`; only the truncation at `R` contributes an error.
    pub fn fourier_with(&self, t: f64, radius: f64) -> Complex64 {
        let h = 1.0 / (6.0 * self.w);
        let x0 = self.a - radius;
        let n = ((self.b - self.a + 2.0 * radius) / h).ceil() as u64;
        let chunks: Vec<Complex64> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = ComplexAccumulator::new();
                for k in c * CHUNK..((c + 1) * CHUNK).min(n + 1) {
                    let x = x0 + k as f64 * h;
                    acc.add(self.eval(x) * e(-t * x));
                }
                acc.total()
            })
            .collect();
        tree_sum(&chunks) * h
    }

    pub fn fourier(&self, t: f64) -> Complex64 {
        self.fourier_with(t, self.default_radius())
    }

    /// `∫ |F − χ|` computed from the zero-frequency transform.
    pub fn l1_gap(&self) -> f64 {
        let total = self.fourier(0.0).re;
        match self.kind {
            Kind::Majorant => total - (self.b - self.a),
            Kind::Minorant => (self.b - self.a) - total,
        }
    }
}

/// `(minorant, majorant)` of the indicator of `[a, b]`.
pub fn selberg_pair(a: f64, b: f64, w: f64) -> Result<(BandLimitedFn, BandLimitedFn), LatticeError> {
    if !(b > a) || !(w > 1.0) {
        return Err(LatticeError::InvalidParameter(format!("[{a}, {b}], w = {w}")));
    }
    Ok((
        BandLimitedFn { a, b, w, kind: Kind::Minorant },
        BandLimitedFn { a, b, w, kind: Kind::Majorant },
    ))
}

/// `g(x) = Σ_k Π_j χ^{σ(j,k)}(x_j) − (d−1) Π_j χ⁺(x_j)` where `σ(j,k)` is the
/// minorant for `j = k` and the majorant otherwise. `pairs[j]` is the
/// `(minorant, majorant)` pair for coordinate `j`.
pub fn smoothed_g(x: &[f64], pairs: &[(BandLimitedFn, BandLimitedFn)]) -> Result<f64, LatticeError> {
    if x.len() != pairs.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: pairs.len(),
            got: x.len(),
        });
    }
    let d = x.len();
    let minus: Vec<f64> = x.iter().zip(pairs).map(|(&xj, p)| p.0.eval(xj)).collect();
    let plus: Vec<f64> = x.iter().zip(pairs).map(|(&xj, p)| p.1.eval(xj)).collect();
    let full: f64 = plus.iter().product();
    let mut acc = Neumaier::new();
    for k in 0..d {
        acc.add((0..d).map(|j| if j == k { minus[j] } else { plus[j] }).product());
    }
    acc.add(-((d - 1) as f64) * full);
    Ok(acc.total())
}

/// `ĝ(0) = d (2 + 1/w)^{d−1} (2 − 1/w) − (d−1) (2 + 1/w)^d` for the box
/// `[−1, 1]^d`.
pub fn g_hat_zero(d: u32, w: f64) -> f64 {
    let p = 2.0 + 1.0 / w;
    let m = 2.0 - 1.0 / w;
    d as f64 * p.powi(d as i32 - 1) * m - (d as f64 - 1.0) * p.powi(d as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCount {
    pub estimate: Complex64,
    pub error_budget: f64,
    pub exact: Complex64,
    /// `|Σ a e(q·α)|` summed over the polar shell.
    pub shell_sum: f64,
    pub shell_size: usize,
}

pub const DEFAULT_C1: f64 = 10.0;
pub const DEFAULT_C2: f64 = 10.0;

/// Compares `Σ_{α_n ∈ [−1,1]^d mod Γ} a_n` with `(2^d/det Γ) Σ a_n` and the
/// error budget `(C₁ w^−1 |Σ a_n| + C₂ Σ_{q ∈ Π, 0<|q|<w} |Σ a_n e(q·α_n)|) / det Γ`.
/// An empty polar shell leaves only the first budget term.
pub fn lattice_count(
    weights: &[Complex64],
    points: &[Vec<f64>],
    l: &Lattice,
    w: f64,
    c1: f64,
    c2: f64,
) -> Result<LatticeCount, LatticeError> {
    let d = l.dim();
    if d > MAX_COUNT_DIM {
        return Err(LatticeError::CapacityExceeded {
            what: "d",
            value: d as f64,
            cap: MAX_COUNT_DIM as f64,
        });
    }
    if points.len() > MAX_COUNT_POINTS {
        return Err(LatticeError::CapacityExceeded {
            what: "N",
            value: points.len() as f64,
            cap: MAX_COUNT_POINTS as f64,
        });
    }
    if weights.len() != points.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: points.len(),
            got: weights.len(),
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(LatticeError::DimensionMismatch { expected: d, got: p.len() });
    }
    if !(w > 1.0) {
        return Err(LatticeError::InvalidParameter(format!("w = {w}")));
    }
    let mut total = ComplexAccumulator::new();
    weights.iter().for_each(|&a| total.add(a));
    let total = total.total();
    let estimate = total * (2f64.powi(d as i32) / l.det());

    let inv = l.basis().clone().try_inverse().ok_or(LatticeError::SingularBasis)?;
    let reach: Vec<f64> = (0..d).map(|i| inv.row(i).iter().map(|x| x.abs()).sum()).collect();
    let hits: Vec<bool> = points
        .par_iter()
        .map(|p| {
            let pv = nalgebra::DVector::from_column_slice(p);
            let k = &inv * &pv;
            let bounds: Vec<(i64, i64)> = (0..d)
                .map(|i| ((k[i] - reach[i]).ceil() as i64, (k[i] + reach[i]).floor() as i64))
                .collect();
            integer_box(&bounds).into_iter().any(|m| {
                let mv = nalgebra::DVector::from_iterator(d, m.iter().map(|&x| x as f64));
                let r = &pv - l.basis() * mv;
                r.iter().all(|x| x.abs() <= 1.0)
            })
        })
        .collect();
    let mut exact = ComplexAccumulator::new();
    for (a, hit) in weights.iter().zip(&hits) {
        if *hit {
            exact.add(*a);
        }
    }

    let pl = polar(l)?;
    let shell = pl.shell_coords(w);
    let norms = shell_norms(weights, points, pl.basis(), &shell);
    let shell_sum = tree_sum_real(&norms);
    let error_budget = (c1 / w * total.norm() + c2 * shell_sum) / l.det();
    Ok(LatticeCount {
        estimate,
        error_budget,
        exact: exact.total(),
        shell_sum,
        shell_size: shell.len(),
    })
}

/// `|Σ_n a_n e(q·α_n)|` for every `q = P m` in the shell. Since
/// `q·α = m·(Pᵀα)`, each term factors as `Π_i e(m_i β_i)` with `β = Pᵀα`;
/// per point the one-dimensional factors are tabulated once and reused
/// across the shell. Points are processed in fixed chunks whose partial
/// sums are combined in order, so the result does not depend on threading.
fn shell_norms(weights: &[Complex64], points: &[Vec<f64>], p: &DMatrix<f64>, shell: &[Vec<i64>]) -> Vec<f64> {
    if shell.is_empty() {
        return Vec::new();
    }
    let d = p.nrows();
    let reach: Vec<i64> = (0..d)
        .map(|i| shell.iter().map(|m| m[i].abs()).max().unwrap_or(0))
        .collect();
    let pt = p.transpose();
    let chunk_sums: Vec<Vec<Complex64>> = weights
        .par_chunks(SHELL_CHUNK)
        .zip(points.par_chunks(SHELL_CHUNK))
        .map(|(ws, ps)| {
            let mut acc = vec![Complex64::new(0.0, 0.0); shell.len()];
            let mut tables: Vec<Vec<Complex64>> = vec![Vec::new(); d];
            for (a, alpha) in ws.iter().zip(ps) {
                let beta = &pt * nalgebra::DVector::from_column_slice(alpha);
                for i in 0..d {
                    tables[i] = (-reach[i]..=reach[i]).map(|k| e(k as f64 * beta[i])).collect();
                }
                for (slot, m) in acc.iter_mut().zip(shell) {
                    let mut z = *a;
                    for i in 0..d {
                        z *= tables[i][(m[i] + reach[i]) as usize];
                    }
                    *slot += z;
                }
            }
            acc
        })
        .collect();
    (0..shell.len())
        .map(|s| {
            let col: Vec<Complex64> = chunk_sums.iter().map(|c| c[s]).collect();
            tree_sum(&col).norm()
        })
        .collect()
}

const SHELL_CHUNK: usize = 256;

/// One summand of a Kolesnik expansion: weight `a(x)`, first argument
/// `g(x)` and the fractional part `ν = {h(x)} ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KolesnikPoint {
    pub a: Complex64,
    pub g: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KolesnikResult {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `(λr + r)/W · Σ|a|`.
    pub lipschitz_term: f64,
    /// `|(r/W) Σ_j sin(2πrj/W)/sin(πj/W) A_j Σ_x |a(x)| e(j h(x))|`.
    pub boundary_term: f64,
    /// Sum of the two terms above.
    pub error_bound: f64,
    /// Bound on the effect of truncating the `j` sums at `J_cap`.
    pub truncation_tail: f64,
}

/// `A_j = (sin(πj/W) / (πj/W))^{r+1}`.
pub fn kolesnik_a(j: i64, r: u32, big_w: u64) -> f64 {
    sinc(j as f64 / big_w as f64).powi(r as i32 + 1)
}

/// `sin(2πrj/W) / sin(πj/W)`, continuously extended at multiples of `W`.
fn dirichlet_ratio(j: i64, r: u32, big_w: u64) -> f64 {
    let t = j as f64 / big_w as f64;
    let den = (PI * t).sin();
    if den.abs() < 1e-12 {
        // the numerator is a Dirichlet kernel with 2r terms
        let k = (t.round() as i64).rem_euclid(2);
        let sign = if k == 0 || r % 2 == 0 { 1.0 } else { -1.0 };
        2.0 * r as f64 * sign
    } else {
        (2.0 * PI * r as f64 * t).sin() / den
    }
}

/// `Σ_{|j|<=J} c_j cos(2πjθ)` for symmetric coefficients `c_{−j} = c_j`.
fn cosine_series(c: &[f64], theta: f64) -> f64 {
    let step = e(theta);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = c[0];
    for &cj in &c[1..] {
        z *= step;
        acc += 2.0 * cj * z.re;
    }
    acc
}

/// Evaluates both sides of the Kolesnik expansion
///
/// ```text
/// Σ_x a(x) e(f(g(x), {h(x)}))
///   ≈ (1/W) Σ_{w<W} Σ_{|j|<=J} B_{j,w} Σ_x a(x) e(f(g(x), w/W) + j h(x))
/// ```
///
/// with `B_{j,w} = A_j e(−(2w+1)j/(2W))`. The `j` sum runs over both signs:
/// the right side is the Fourier expansion of a partition of unity on
/// `ℝ/ℤ` into `W` smoothed arcs, which needs the negative frequencies.
/// `lambda` bounds `|∂f/∂ν|`.
pub fn kolesnik_expand<F>(
    points: &[KolesnikPoint],
    f: F,
    lambda: f64,
    r: u32,
    big_w: u64,
    j_cap: u64,
) -> Result<KolesnikResult, LatticeError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if points.len() > MAX_KOLESNIK_POINTS {
        return Err(LatticeError::CapacityExceeded {
            what: "x-range",
            value: points.len() as f64,
            cap: MAX_KOLESNIK_POINTS as f64,
        });
    }
    if big_w > MAX_KOLESNIK_W {
        return Err(LatticeError::CapacityExceeded {
            what: "W",
            value: big_w as f64,
            cap: MAX_KOLESNIK_W as f64,
        });
    }
    if r == 0 || big_w == 0 {
        return Err(LatticeError::InvalidParameter(format!("r = {r}, W = {big_w}")));
    }
    let wf = big_w as f64;
    let a_coef: Vec<f64> = (0..=j_cap as i64).map(|j| kolesnik_a(j, r, big_w)).collect();
    let d_coef: Vec<f64> = (0..=j_cap as i64)
        .map(|j| dirichlet_ratio(j, r, big_w) * a_coef[j as usize])
        .collect();

    let per_chunk: Vec<(Complex64, Complex64, f64, f64)> = points
        .par_chunks(CHUNK as usize)
        .map(|chunk| {
            let mut lhs = ComplexAccumulator::new();
            let mut rhs = ComplexAccumulator::new();
            let mut boundary = Neumaier::new();
            let mut mass = Neumaier::new();
            for p in chunk {
                lhs.add(p.a * e(f(p.g, p.nu)));
                let mut inner = ComplexAccumulator::new();
                for w in 0..big_w {
                    let theta = p.nu - (2 * w + 1) as f64 / (2.0 * wf);
                    let weight = cosine_series(&a_coef, theta);
                    inner.add(weight * e(f(p.g, w as f64 / wf)));
                }
                rhs.add(p.a * inner.total() / wf);
                let abs = p.a.norm();
                boundary.add(abs * cosine_series(&d_coef, p.nu));
                mass.add(abs);
            }
            (lhs.total(), rhs.total(), boundary.total(), mass.total())
        })
        .collect();
    let lhs = tree_sum(&per_chunk.iter().map(|c| c.0).collect::<Vec<_>>());
    let rhs = tree_sum(&per_chunk.iter().map(|c| c.1).collect::<Vec<_>>());
    let boundary = tree_sum_real(&per_chunk.iter().map(|c| c.2).collect::<Vec<_>>());
    let mass = tree_sum_real(&per_chunk.iter().map(|c| c.3).collect::<Vec<_>>());

    let rf = r as f64;
    let lipschitz_term = (lambda * rf + rf) / wf * mass;
    let boundary_term = (rf / wf * boundary).abs();
    // Σ_{|j|>J} |A_j| <= 2 ∫_J^∞ (W/πt)^{r+1} dt
    let truncation_tail = if j_cap == 0 {
        f64::INFINITY
    } else {
        2.0 * (wf / PI).powi(r as i32 + 1) / (rf * (j_cap as f64).powi(r as i32)) * mass
    };
    Ok(KolesnikResult {
        lhs,
        rhs,
        lipschitz_term,
        boundary_term,
        error_bound: lipschitz_term + boundary_term,
        truncation_tail,
    })
}

/// Parameters of the floor-function sum
/// `ℱ = Σ_{X<m<=aX} Λ(m) e(k m^γ2 + h ⌊(m+1)^γ2⌋^γ1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorSumParams {
    pub x: u64,
    pub a: f64,
    pub k: i64,
    pub h: i64,
    pub gamma1: crate::RationalExponent,
    pub gamma2: crate::RationalExponent,
    pub eps: f64,
    pub j_cap_factor: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorSumDecomposition {
    pub f: Complex64,
    pub f1: Complex64,
    pub f2: f64,
    pub f3: f64,
    pub r: u32,
    pub big_w: u64,
    pub lambda: f64,
    pub truncation_tail: f64,
}

/// Evaluates `ℱ` directly and through its Kolesnik decomposition with
/// `g(x) = x`, `h(x) = (x+1)^γ2`, `f(μ,ν) = kμ^γ2 + h((μ+1)^γ2 − ν)^γ1`,
/// `r = ⌊1/ε⌋ + 1` and `W = X^{1−γ1γ2+ε}` rounded to an integer.
pub fn floor_sum_decomposition(p: &FloorSumParams) -> Result<FloorSumDecomposition, LatticeError> {
    use crate::certified_real::floor_pow;
    if !(p.eps > 0.0) || !(p.a > 1.0) || p.x < 2 {
        return Err(LatticeError::InvalidParameter(format!("{p:?}")));
    }
    let (g1, g2) = (p.gamma1.to_f64(), p.gamma2.to_f64());
    let xf = p.x as f64;
    let r = (1.0 / p.eps).floor() as u32 + 1;
    let big_w = (xf.powf(1.0 - g1 * g2 + p.eps).round() as u64).max(1);
    // |∂f/∂ν| = |h| γ1 ((μ+1)^γ2 − ν)^{γ1−1}, largest at the left end
    let lambda = p.h.unsigned_abs() as f64 * g1 * ((xf + 1.0).powf(g2) - 1.0).powf(g1 - 1.0);
    let hi = (p.a * xf).floor() as u64;
    let mut pts = Vec::new();
    let mut direct = ComplexAccumulator::new();
    for m in p.x + 1..=hi {
        let lam = crate::sieve::mangoldt_ln(m);
        if lam == 0.0 {
            continue;
        }
        let fl = floor_pow(m + 1, p.gamma2).map_err(|e| LatticeError::InvalidParameter(e.to_string()))?;
        let val = ((m + 1) as f64).powf(g2);
        let nu = (val - fl as f64).clamp(0.0, 1.0 - f64::EPSILON);
        let mf = m as f64;
        direct.add(lam * e(p.k as f64 * mf.powf(g2) + p.h as f64 * (fl as f64).powf(g1)));
        pts.push(KolesnikPoint {
            a: Complex64::new(lam, 0.0),
            g: mf,
            nu,
        });
    }
    let (k, h) = (p.k as f64, p.h as f64);
    let f = |mu: f64, nu: f64| k * mu.powf(g2) + h * ((mu + 1.0).powf(g2) - nu).powf(g1);
    let res = kolesnik_expand(&pts, f, lambda, r, big_w, p.j_cap_factor * big_w)?;
    Ok(FloorSumDecomposition {
        f: direct.total(),
        f1: res.rhs,
        f2: res.lipschitz_term,
        f3: res.boundary_term,
        r,
        big_w,
        lambda,
        truncation_tail: res.truncation_tail,
    })
}

/// Riemann-sum quadrature of `F` over `[lo, hi]` with `n` midpoints.
pub fn midpoint_integral<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    h * neumaier_sum((0..n).map(|i| f(lo + (i as f64 + 0.5) * h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct partial sums of the defining series, for moderate `x`.
    fn beurling_series(x: f64) -> f64 {
        let s = (PI * x).sin() / PI;
        let mut t = 2.0 / x;
        for n in 0..200_000 {
            let n = n as f64;
            t += 1.0 / ((x - n) * (x - n));
            if n >= 1.0 {
                t -= 1.0 / ((x + n) * (x + n));
            }
        }
        // tails Σ_{n>N} ((x−n)^−2 − (x+n)^−2) ≈ 2x/N²
        s * s * (t + 2.0 * x / 200_000f64.powi(2))
    }

    #[test]
    fn beurling_matches_series() {
        for &x in &[-7.3, -2.5, -0.4, 0.2, 0.77, 1.5, 3.1, 12.25] {
            assert!((beurling(x) - beurling_series(x)).abs() < 1e-8, "x = {x}");
        }
        for n in -5..=5 {
            let want = if n >= 0 { 1.0 } else { -1.0 };
            assert!((beurling(n as f64) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn beurling_dominates_sign() {
        for i in 0..20_000 {
            let x = -50.0 + i as f64 * 0.005;
            let sgn = if x >= 0.0 { 1.0 } else { -1.0 };
            assert!(beurling(x) >= sgn - 1e-12, "x = {x}");
        }
    }

    #[test]
    fn polar_examples() {
        let id = Lattice::diagonal(&[1.0, 1.0]).unwrap();
        assert_eq!(polar(&id).unwrap().basis(), id.basis());
        let d = Lattice::diagonal(&[2.0, 3.0]).unwrap();
        let p = polar(&d).unwrap();
        assert!((p.basis()[(0, 0)] - 0.5).abs() < 1e-15 && (p.basis()[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
        let v = [4.0, 7.0, 2.5];
        let g = Lattice::diagonal(&v.map(|x| 1.0 / x)).unwrap();
        let p = polar(&g).unwrap();
        for (i, &vi) in v.iter().enumerate() {
            assert!((p.basis()[(i, i)] - vi).abs() < 1e-12);
        }
    }

    #[test]
    fn polar_invariants_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let l = random_separated_lattice(&mut rng, 12.0);
            let p = polar(&l).unwrap();
            assert!(p.integrality_defect(&l) < 1e-9);
            assert!((p.det() * l.det() - 1.0).abs() < 1e-12);
            let pp = polar(p.as_lattice()).unwrap();
            for j in 0..2 {
                let col: Vec<f64> = l.basis().column(j).iter().copied().collect();
                assert!(pp.as_lattice().contains(&col, 1e-9));
                let col: Vec<f64> = pp.basis().column(j).iter().copied().collect();
                assert!(l.contains(&col, 1e-9));
            }
        }
    }

    #[test]
    fn singular_basis() {
        assert_eq!(
            Lattice::from_columns(&[vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(LatticeError::SingularBasis)
        );
    }

    #[test]
    fn selberg_far_and_mid() {
        let w = 10.0;
        let (lo, hi) = selberg_pair(0.0, 5.0, w).unwrap();
        for x in [-10.0 / w, 5.0 + 10.0 / w] {
            assert!(lo.eval(x).abs() < 1e-6 && hi.eval(x).abs() < 1e-6);
        }
        assert!((lo.eval(2.5) - 1.0).abs() < 1e-6 && (hi.eval(2.5) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn selberg_gaps_by_independent_quadrature() {
        let w = 4.0;
        let (lo, hi) = selberg_pair(-1.0, 1.0, w).unwrap();
        let big = 4000.0;
        let n = 4_000_000;
        let gap = midpoint_integral(|x| hi.eval(x) - lo.eval(x), -big, big, n);
        assert!((gap - 2.0 / w).abs() < 0.01 * 2.0 / w, "gap {gap}");
        assert!((hi.l1_gap() - 1.0 / w).abs() < 1e-3 / w);
        assert!((lo.l1_gap() - 1.0 / w).abs() < 1e-3 / w);
    }

    #[test]
    fn smoothed_g_examples() {
        let w = 20.0;
        let p = selberg_pair(-1.0, 1.0, w).unwrap();
        assert_eq!(smoothed_g(&[0.3], &[p]).unwrap(), p.0.eval(0.3));
        let v = smoothed_g(&[0.0, 0.0], &[p, p]).unwrap();
        assert!((v - 1.0).abs() < 1e-2);
        assert!(matches!(smoothed_g(&[0.0], &[p, p]), Err(LatticeError::DimensionMismatch { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let g = smoothed_g(&x, &[p, p]).unwrap();
            let inside = x.iter().all(|v| v.abs() <= 1.0) as u8 as f64;
            assert!(g <= p.1.eval(x[0]) * p.1.eval(x[1]) + 1e-12);
            assert!(g <= inside + 1e-9);
        }
    }

    #[test]
    fn g_hat_examples() {
        assert!((g_hat_zero(1, 10.0) - 1.9).abs() < 1e-12);
        assert!((g_hat_zero(2, 10.0) - 3.57).abs() < 1e-12);
        assert!((g_hat_zero(3, 1e12) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn lattice_count_trivial_cases() {
        let l = Lattice::diagonal(&[10.0, 10.0]).unwrap();
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![10.0 * i as f64, -10.0 * (i % 3) as f64]).collect();
        let wts: Vec<Complex64> = (0..20).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let c = lattice_count(&wts, &pts, &l, 8.0, DEFAULT_C1, DEFAULT_C2).unwrap();
        let sum: Complex64 = wts.iter().sum();
        assert_eq!(c.exact, sum);
        let one = lattice_count(&[Complex64::new(1.0, 0.0)], &[vec![3.3, 0.2]], &l, 8.0, 10.0, 10.0).unwrap();
        assert_eq!(one.exact, Complex64::new(0.0, 0.0));
        assert!((one.estimate.re - 0.04).abs() < 1e-15);
    }

    #[test]
    fn lattice_count_grid_against_direct_count() {
        let l = Lattice::diagonal(&[10.0, 10.0]).unwrap();
        let mut pts = Vec::new();
        for i in 0..100 {
            for j in 0..100 {
                pts.push(vec![0.37 * i as f64, 0.53 * j as f64]);
            }
        }
        let wts = vec![Complex64::new(1.0, 0.0); pts.len()];
        let c = lattice_count(&wts, &pts, &l, 8.0, DEFAULT_C1, DEFAULT_C2).unwrap();
        let near = |v: f64| {
            let r = v - 10.0 * (v / 10.0).round();
            r.abs() <= 1.0
        };
        let direct = pts.iter().filter(|p| near(p[0]) && near(p[1])).count() as f64;
        assert_eq!(c.exact.re, direct);
        assert!((c.estimate - c.exact).norm() <= c.error_budget);
    }

    #[test]
    fn kolesnik_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<KolesnikPoint> = (0..500)
            .map(|x| KolesnikPoint {
                a: Complex64::from_polar(1.0, rng.gen_range(0.0..6.0)),
                g: (x as f64).sqrt(),
                nu: 0.0,
            })
            .collect();
        let res = kolesnik_expand(&pts, |mu, _| mu, 0.0, 3, 16, 128).unwrap();
        assert!((res.lhs - res.rhs).norm() < 1e-9);
    }

    #[test]
    fn kolesnik_linear_in_nu() {
        let pts: Vec<KolesnikPoint> = (1..=100)
            .map(|x| {
                let h = x as f64 * 2f64.sqrt();
                KolesnikPoint {
                    a: Complex64::new(1.0, 0.0),
                    g: x as f64,
                    nu: h - h.floor(),
                }
            })
            .collect();
        let res = kolesnik_expand(&pts, |_, nu| nu, 1.0, 3, 16, 128).unwrap();
        assert!((res.lhs - res.rhs).norm() <= 10.0 * res.error_bound);
        assert!(res.truncation_tail < 1e-2 * res.error_bound);
    }

    #[test]
    fn floor_sum_decomposition_small() {
        let p = FloorSumParams {
            x: 1000,
            a: 1.1,
            k: 1,
            h: 2,
            gamma1: crate::RationalExponent::new(100, 101).unwrap(),
            gamma2: crate::RationalExponent::new(100, 101).unwrap(),
            eps: 0.3,
            j_cap_factor: 8,
        };
        let d = floor_sum_decomposition(&p).unwrap();
        assert_eq!(d.r, 4);
        assert!((d.f - d.f1).norm() <= 10.0 * (d.f2 + d.f3));
    }
}
