//! Compensated accumulation and deterministic reductions.

use num_complex::Complex64;
use rayon::prelude::*;

/// Neumaier (improved Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Component-wise Neumaier accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexAccumulator {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in it {
        acc.add(x);
    }
    acc.total()
}

/// Pairwise reduction over a fixed balanced tree. The shape depends only on
/// `values.len()`, so the result is independent of how the leaves were
/// produced.
pub fn tree_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            tree_sum(l) + tree_sum(r)
        }
    }
}

pub fn tree_sum_real(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            tree_sum_real(l) + tree_sum_real(r)
        }
    }
}

/// Leaf size for chunked parallel sums.
pub const CHUNK: u64 = 1 << 12;

/// Sums `f(i)` for `i` in `lo..hi`. The range is cut into fixed chunks of
/// [`CHUNK`] indices, each chunk is accumulated serially with compensation
/// and the chunk totals are combined by [`tree_sum`]. Output is bit-identical
/// for any thread count.
pub fn par_chunked_sum<F>(lo: u64, hi: u64, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let chunks = (hi - lo).div_ceil(CHUNK);
    let partials: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = lo + c * CHUNK;
            let end = (start + CHUNK).min(hi);
            let mut acc = ComplexAccumulator::new();
            for i in start..end {
                acc.add(f(i));
            }
            acc.total()
        })
        .collect();
    tree_sum(&partials)
}
