//! Finitely supported coefficient sequences and their Laurent symbols.
//!
//! `CoeffSeq` is the workhorse container for masks, filters and Gramian
//! vectors: a run of `f64` coefficients together with the integer index of
//! the first entry. `LaurentPoly` reinterprets the same data as
//! `p(z) = Σ c_α z^α` and adds the ring operations and substitutions the
//! filter algebra needs (`z → -z`, `z → 1/z`, even/odd split, evaluation
//! on the unit circle).

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Entries whose magnitude falls below `max |c|` times this factor are
/// trimmed from the ends when canonicalizing. Keeps repeated convolutions
/// from growing phantom support out of rounding dust.
pub const RELATIVE_TRIM_TOL: f64 = 1e-14;

/// A finitely supported real sequence `{c_α}` with `c_offset` first.
///
/// Canonical form: the first and last stored entries are nonzero, or the
/// sequence is the canonical zero (no entries, offset 0).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    offset: i64,
    values: Vec<f64>,
}

impl CoeffSeq {
    /// Builds a sequence from the index of its first entry and raw values,
    /// trimming negligible ends.
    pub fn new(offset: i64, values: Vec<f64>) -> Self {
        let mut seq = CoeffSeq { offset, values };
        seq.canonicalize();
        seq
    }

    /// The canonical zero sequence.
    pub fn zero() -> Self {
        CoeffSeq {
            offset: 0,
            values: Vec::new(),
        }
    }

    /// Single entry `c` at index `k`.
    pub fn delta(c: f64, k: i64) -> Self {
        CoeffSeq::new(k, vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inclusive support `[first, last]`, or `None` for the zero sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.values.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.values.len() as i64 - 1))
        }
    }

    /// Coefficient at `idx`, zero outside the stored range.
    pub fn coeff(&self, idx: i64) -> f64 {
        let rel = idx - self.offset;
        if rel < 0 || rel >= self.values.len() as i64 {
            0.0
        } else {
            self.values[rel as usize]
        }
    }

    /// Iterates `(index, coefficient)` over the stored range.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.offset + i as i64, v))
    }

    /// Plain sum of all coefficients.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// All coefficients multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        CoeffSeq::new(self.offset, self.values.iter().map(|v| v * s).collect())
    }

    /// Same values, support shifted by `k` (multiplication by `z^k` of the symbol).
    pub fn translated(&self, k: i64) -> Self {
        CoeffSeq {
            offset: self.offset + k,
            values: self.values.clone(),
        }
    }

    /// Index-reversed sequence: entry at `idx` moves to `-idx`.
    pub fn reversed(&self) -> Self {
        let mut values: Vec<f64> = self.values.clone();
        values.reverse();
        let offset = -(self.offset + self.values.len() as i64 - 1);
        CoeffSeq { offset, values }
    }

    /// True iff `c_idx = c_{lo+hi-idx}` exactly over the support.
    pub fn is_symmetric(&self) -> bool {
        let n = self.values.len();
        (0..n / 2).all(|i| self.values[i] == self.values[n - 1 - i])
    }

    /// Largest absolute coefficient difference against `other` over the
    /// union of supports.
    pub fn max_abs_diff(&self, other: &CoeffSeq) -> f64 {
        let lo = match (self.support(), other.support()) {
            (None, None) => return 0.0,
            (Some((a, _)), None) => a,
            (None, Some((b, _))) => b,
            (Some((a, _)), Some((b, _))) => a.min(b),
        };
        let hi = self
            .support()
            .map(|s| s.1)
            .into_iter()
            .chain(other.support().map(|s| s.1))
            .max()
            .unwrap();
        (lo..=hi).fold(0.0f64, |acc, i| {
            acc.max((self.coeff(i) - other.coeff(i)).abs())
        })
    }

    fn canonicalize(&mut self) {
        let max = self.max_abs();
        if max == 0.0 {
            self.values.clear();
            self.offset = 0;
            return;
        }
        let tol = RELATIVE_TRIM_TOL * max;
        let mut first = 0;
        while first < self.values.len() && self.values[first].abs() <= tol {
            first += 1;
        }
        let mut last = self.values.len();
        while last > first && self.values[last - 1].abs() <= tol {
            last -= 1;
        }
        if first > 0 || last < self.values.len() {
            self.offset += first as i64;
            self.values = self.values[first..last].to_vec();
        }
    }
}

/// A Laurent polynomial `p(z) = Σ c_α z^α` over the same storage as
/// [`CoeffSeq`].
///
/// Evaluation at `z = 1` equals the plain coefficient sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly(CoeffSeq);

impl From<CoeffSeq> for LaurentPoly {
    fn from(seq: CoeffSeq) -> Self {
        LaurentPoly(seq)
    }
}

impl From<LaurentPoly> for CoeffSeq {
    fn from(p: LaurentPoly) -> Self {
        p.0
    }
}

impl LaurentPoly {
    pub fn new(offset: i64, values: Vec<f64>) -> Self {
        LaurentPoly(CoeffSeq::new(offset, values))
    }

    pub fn zero() -> Self {
        LaurentPoly(CoeffSeq::zero())
    }

    pub fn one() -> Self {
        LaurentPoly::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        LaurentPoly(CoeffSeq::new(0, vec![c]))
    }

    /// `c · z^k`.
    pub fn monomial(c: f64, k: i64) -> Self {
        LaurentPoly(CoeffSeq::delta(c, k))
    }

    pub fn coeffs(&self) -> &CoeffSeq {
        &self.0
    }

    pub fn coeff(&self, idx: i64) -> f64 {
        self.0.coeff(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        match (self.0.support(), other.0.support()) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some((alo, ahi)), Some((blo, bhi))) => {
                let lo = alo.min(blo);
                let hi = ahi.max(bhi);
                let values = (lo..=hi)
                    .map(|i| self.0.coeff(i) + other.0.coeff(i))
                    .collect();
                LaurentPoly(CoeffSeq::new(lo, values))
            }
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> LaurentPoly {
        LaurentPoly(self.0.scaled(s))
    }

    /// Full convolution of coefficients; support is the Minkowski sum of
    /// the factor supports.
    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let (Some((alo, _)), Some((blo, _))) = (self.0.support(), other.0.support()) else {
            return LaurentPoly::zero();
        };
        let av = self.0.values();
        let bv = other.0.values();
        let mut out = vec![0.0; av.len() + bv.len() - 1];
        for (i, &a) in av.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in bv.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPoly(CoeffSeq::new(alo + blo, out))
    }

    /// Substitution `z → -z`: coefficient at `α` picks up `(-1)^α`.
    pub fn subst_neg(&self) -> LaurentPoly {
        let values = self
            .0
            .iter()
            .map(|(idx, v)| if idx.rem_euclid(2) == 1 { -v } else { v })
            .collect();
        LaurentPoly(CoeffSeq::new(self.0.offset(), values))
    }

    /// Substitution `z → z⁻¹`: reverses coefficients and negates the offset.
    pub fn subst_recip(&self) -> LaurentPoly {
        LaurentPoly(self.0.reversed())
    }

    /// Splits into `(p_e, p_o)` with `p(z) = p_e(z²) + z·p_o(z²)`.
    pub fn even_odd_split(&self) -> (LaurentPoly, LaurentPoly) {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        let Some((lo, hi)) = self.0.support() else {
            return (LaurentPoly::zero(), LaurentPoly::zero());
        };
        let elo = lo.div_euclid(2);
        let olo = (lo - 1).div_euclid(2);
        for k in elo..=(hi.div_euclid(2)) {
            even.push(self.0.coeff(2 * k));
        }
        for k in olo..=((hi - 1).div_euclid(2)) {
            odd.push(self.0.coeff(2 * k + 1));
        }
        (
            LaurentPoly(CoeffSeq::new(elo, even)),
            LaurentPoly(CoeffSeq::new(olo, odd)),
        )
    }

    /// `p(e^{-iω}) = Σ c_α e^{-iωα}`.
    pub fn eval_unit_circle(&self, omega: f64) -> Complex64 {
        self.0
            .iter()
            .map(|(idx, v)| Complex64::from_polar(v, -omega * idx as f64))
            .sum()
    }

    /// Evaluation at `z = 1`.
    pub fn eval_one(&self) -> f64 {
        self.0.sum()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add(self, rhs)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::sub(self, rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::mul(self, rhs)
    }
}
